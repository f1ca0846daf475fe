#include "sfm/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <memory>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "sfm/text.hpp"

namespace sfm::sim {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

std::string_view policy_name(Policy p) {
  switch (p) {
    case Policy::Script: return "script";
    case Policy::Wander: return "wander";
    case Policy::Approach: return "approach";
    case Policy::Rotate: return "rotate";
  }
  return "?";
}

Policy parse_policy(std::string_view s) {
  if (s == "script") return Policy::Script;
  if (s == "wander") return Policy::Wander;
  if (s == "approach") return Policy::Approach;
  if (s == "rotate") return Policy::Rotate;
  throw Error("unknown policy '" + std::string(s) + "'");
}

int frames_for(double seconds, double rate) { return std::max(1, static_cast<int>(std::lround(seconds * rate))); }

// Decides the command issued at each frame. Policies only see the previous step's outcome.
class ActionPolicy {
 public:
  virtual ~ActionPolicy() = default;
  virtual std::optional<ActionKind> next(const StepResult* last) = 0;
  std::vector<Episode> episodes;
  std::size_t frame = 0;
};

class ScriptPolicy : public ActionPolicy {
 public:
  ScriptPolicy(const std::vector<ScriptStep>& script, double rate) {
    for (const auto& s : script) {
      for (int i = 0; i < frames_for(s.duration, rate); ++i) plan_.push_back(s.kind);
    }
  }
  std::optional<ActionKind> next(const StepResult*) override {
    if (frame >= plan_.size()) return std::nullopt;
    return plan_[frame++];
  }

 protected:
  ScriptPolicy() = default;
  std::vector<ActionKind> plan_;
};

// Forward / stop / backward / stop cycles whose backward leg cancels the forward drift.
class WanderPolicy : public ScriptPolicy {
 public:
  WanderPolicy(const Scenario& s, std::mt19937_64& rng) {
    const auto total = static_cast<std::size_t>(frames_for(s.duration, s.frame_rate));
    std::uniform_real_distribution<double> fw(1.0, 3.0);
    std::uniform_real_distribution<double> st(0.3, 0.4);
    std::uniform_real_distribution<double> jitter(-0.5, 0.5);
    double drift = 0.0;  // intended displacement along the heading, m
    auto push = [&](ActionKind k, double seconds) {
      for (int i = 0; i < frames_for(seconds, s.frame_rate); ++i) plan_.push_back(k);
    };
    while (plan_.size() < total) {
      const double f = fw(rng);
      push(ActionKind::Forward, f);
      drift += s.actions.linear * static_cast<double>(frames_for(f, s.frame_rate)) / s.frame_rate;
      push(ActionKind::Stop, st(rng));
      const double b = std::clamp(drift / s.actions.linear + jitter(rng), 1.0, 5.0);
      push(ActionKind::Backward, b);
      drift -= s.actions.linear * static_cast<double>(frames_for(b, s.frame_rate)) / s.frame_rate;
      push(ActionKind::Stop, st(rng));
    }
    plan_.resize(total);
  }
};

class RotatePolicy : public ScriptPolicy {
 public:
  RotatePolicy(const Scenario& s, std::mt19937_64& rng) {
    const auto total = static_cast<std::size_t>(frames_for(s.duration, s.frame_rate));
    std::uniform_real_distribution<double> turn(1.0, 3.0);
    std::uniform_real_distribution<double> st(0.5, 1.5);
    while (plan_.size() < total) {
      for (auto k : {ActionKind::TurnLeft, ActionKind::Stop, ActionKind::TurnRight, ActionKind::Stop}) {
        const double d = k == ActionKind::Stop ? st(rng) : turn(rng);
        for (int i = 0; i < frames_for(d, s.frame_rate); ++i) plan_.push_back(k);
      }
    }
    plan_.resize(total);
  }
};

// Drive forward until the bumper fires, stop, optionally push again while touching,
// back off to a new random gap and repeat.
class ApproachPolicy : public ActionPolicy {
 public:
  ApproachPolicy(const Scenario& s, std::mt19937_64& rng, double first_gap)
      : s_(s), rng_(rng), gap_(first_gap), remaining_(s.episodes), statics_(s.static_contacts) {
    queue(ActionKind::Stop, 0.5);
  }

  std::optional<ActionKind> next(const StepResult* last) override {
    const std::size_t now = frame++;
    if (last && last->bump && !bumped_prev_) on_bump(now - 1);
    bumped_prev_ = last && last->bump;
    if (!plan_.empty()) {
      const auto k = plan_.front();
      plan_.pop_front();
      return k;
    }
    switch (phase_) {
      case Phase::Idle:
        if (remaining_ == 0) {
          if (!finished_) {
            finished_ = true;
            queue(ActionKind::Stop, 1.0);
            return next_from_plan();
          }
          return std::nullopt;
        }
        phase_ = Phase::Approach;
        episodes.push_back({now, 0, false});
        return ActionKind::Forward;
      case Phase::Approach:
      case Phase::Push:
        return ActionKind::Forward;
    }
    return std::nullopt;
  }

 private:
  enum class Phase { Idle, Approach, Push };

  std::optional<ActionKind> next_from_plan() {
    const auto k = plan_.front();
    plan_.pop_front();
    return k;
  }

  void queue(ActionKind k, double seconds) {
    for (int i = 0; i < frames_for(seconds, s_.frame_rate); ++i) plan_.push_back(k);
  }

  void on_bump(std::size_t contact_frame) {
    if (phase_ == Phase::Approach) {
      episodes.back().contact_frame = contact_frame;
      --remaining_;
      queue(ActionKind::Stop, 1.0);
      if (remaining_ < statics_) {
        // Robot is resting against the wall: push once more.
        --statics_;
        phase_ = Phase::Push;
        const std::size_t push_start = frame + plan_.size();
        episodes.push_back({push_start, 0, true});
        return;
      }
    } else if (phase_ == Phase::Push) {
      episodes.back().contact_frame = contact_frame;
      queue(ActionKind::Stop, 1.0);
    } else {
      return;
    }
    std::uniform_real_distribution<double> gap(s_.approach_min, s_.approach_max);
    gap_ = gap(rng_);
    queue(ActionKind::Backward, gap_ / s_.actions.linear);
    queue(ActionKind::Stop, 0.5);
    phase_ = Phase::Idle;
  }

  const Scenario& s_;
  std::mt19937_64& rng_;
  double gap_;
  int remaining_;
  int statics_;
  Phase phase_ = Phase::Idle;
  bool bumped_prev_ = false;
  bool finished_ = false;
  std::deque<ActionKind> plan_;
};

}  // namespace

double Camera::focal() const { return 0.5 * image_width / std::tan(0.5 * hfov_deg * kDeg); }

Eigen::Vector2d Camera::cell_point(std::size_t row, std::size_t col, std::size_t rows, std::size_t cols) const {
  const double f = focal();
  const double px = (static_cast<double>(col) + 0.5) * image_width / static_cast<double>(cols);
  const double py = (static_cast<double>(row) + 0.5) * image_height / static_cast<double>(rows);
  return {(px - 0.5 * image_width) / f, (py - 0.5 * image_height) / f};
}

Eigen::Matrix3d Camera::robot_from_camera() const {
  const double c = std::cos(tilt_deg * kDeg);
  const double s = std::sin(tilt_deg * kDeg);
  Eigen::Matrix3d r;
  r.col(0) = Eigen::Vector3d(0.0, -1.0, 0.0);
  r.col(1) = Eigen::Vector3d(-s, 0.0, -c);
  r.col(2) = Eigen::Vector3d(c, 0.0, -s);
  return r;
}

Eigen::Vector2d rigid_flow(const Eigen::Vector2d& p, double z, const Eigen::Vector3d& t, const Eigen::Vector3d& w,
                           double focal) {
  const double x = p.x();
  const double y = p.y();
  const double inv_z = 1.0 / z;
  const double u = (-t.x() + x * t.z()) * inv_z + x * y * w.x() - (1.0 + x * x) * w.y() + y * w.z();
  const double v = (-t.y() + y * t.z()) * inv_z + (1.0 + y * y) * w.x() - x * y * w.y() - x * w.z();
  return {focal * u, focal * v};
}

void Scenario::validate() const {
  if (!(frame_rate > 0.0)) throw Error("frame rate must be positive");
  if (rows == 0 || cols == 0) throw Error("grid must be non-empty");
  if (actuation_delay < 0) throw Error("actuation delay must be >= 0");
  if (!(actions.linear > 0.0 && actions.angular > 0.0)) throw Error("action constants must be positive");
  if (!(room.x_max - room.x_min > 2.0 * robot_radius && room.y_max - room.y_min > 2.0 * robot_radius)) {
    throw Error("room too small for the robot");
  }
  if (!(camera.height > 0.0 && camera.height < room.wall_height)) throw Error("camera must sit below the wall tops");
  if (!(camera.hfov_deg > 0.0 && camera.hfov_deg < 180.0)) throw Error("invalid field of view");
  if (start.x - robot_radius < room.x_min || start.x + robot_radius > room.x_max ||
      start.y - robot_radius < room.y_min || start.y + robot_radius > room.y_max) {
    throw Error("robot must start inside the room");
  }
  if (proprio_noise_linear < 0.0 || proprio_noise_angular < 0.0) throw Error("noise std must be >= 0");
  if (policy == Policy::Script && script.empty()) throw Error("script policy needs a [script] section");
  for (const auto& s : script) {
    if (!(s.duration > 0.0)) throw Error("script step durations must be positive");
  }
  if (policy == Policy::Wander || policy == Policy::Rotate) {
    if (!(duration > 0.0)) throw Error("duration must be positive");
  }
  if (policy == Policy::Approach) {
    if (episodes < 1) throw Error("approach scenario needs at least one episode");
    if (!(approach_min > 0.0 && approach_max >= approach_min)) throw Error("invalid approach distances");
    if (static_contacts < 0 || static_contacts > episodes) throw Error("invalid static contact count");
    if (approach_max + robot_radius > room.x_max - room.x_min) throw Error("approach distance exceeds room");
  }
  Simulator probe(*this, Simulator::Unchecked{});
  (void)probe;
}

// Geometry check shared by validation and construction.
static void check_rays(const Simulator& sim, const Scenario& s) {
  for (std::size_t r = 0; r < s.rows; ++r) {
    for (std::size_t c = 0; c < s.cols; ++c) {
      if (!sim.depth(s.start, s.camera.cell_point(r, c, s.rows, s.cols))) {
        throw Error("grid ray (" + std::to_string(r) + "," + std::to_string(c) + ") intersects no surface");
      }
    }
  }
}

Simulator::Simulator(Scenario scenario) : scenario_(std::move(scenario)) {
  scenario_.validate();
}

Simulator::Simulator(Scenario scenario, Unchecked) : scenario_(std::move(scenario)) { check_rays(*this, scenario_); }

StepResult Simulator::step(RobotState& state, const ActionCommand& issued) const {
  const auto& s = scenario_;
  state.pending.push_back(issued);
  ActionCommand executed = ActionCommand::make(ActionKind::Stop, s.actions);
  if (state.pending.size() > static_cast<std::size_t>(s.actuation_delay)) {
    executed = state.pending.front();
    state.pending.pop_front();
  }
  const double h = dt();
  const Pose before = state.pose;
  Pose p = before;
  p.x += executed.linear * std::cos(before.yaw) * h;
  p.y += executed.linear * std::sin(before.yaw) * h;
  p.yaw += executed.angular * h;
  const double r = s.robot_radius;
  Pose clamped = p;
  clamped.x = std::clamp(p.x, s.room.x_min + r, s.room.x_max - r);
  clamped.y = std::clamp(p.y, s.room.y_min + r, s.room.y_max - r);
  // Reaching the boundary counts as contact, not only overshooting it.
  constexpr double kTouch = 1e-9;
  const bool contact = p.x <= s.room.x_min + r + kTouch || p.x >= s.room.x_max - r - kTouch ||
                       p.y <= s.room.y_min + r + kTouch || p.y >= s.room.y_max - r - kTouch;
  const bool moved = std::hypot(clamped.x - before.x, clamped.y - before.y) > 1e-12;

  StepResult out;
  out.pose = clamped;
  out.executed = executed;
  out.contact = contact;
  out.bump = contact && executed.linear != 0.0;
  // The frame in which contact happens still images the approach at full speed.
  out.linear = (!contact || moved) ? executed.linear : 0.0;
  out.angular = executed.angular;
  state.pose = clamped;
  state.in_contact = contact;
  return out;
}

std::optional<double> Simulator::depth(const Pose& pose, const Eigen::Vector2d& p) const {
  const auto& s = scenario_;
  const Eigen::Vector3d dr = s.camera.robot_from_camera() * Eigen::Vector3d(p.x(), p.y(), 1.0);
  const double cy = std::cos(pose.yaw);
  const double sy = std::sin(pose.yaw);
  const Eigen::Vector3d d(cy * dr.x() - sy * dr.y(), sy * dr.x() + cy * dr.y(), dr.z());
  const Eigen::Vector3d o(pose.x, pose.y, s.camera.height);
  double best = std::numeric_limits<double>::infinity();
  if (d.z() < 0.0) best = std::min(best, -o.z() / d.z());
  auto wall = [&](double plane, double origin, double dir, int axis) {
    if (dir == 0.0) return;
    const double t = (plane - origin) / dir;
    if (!(t > 0.0)) return;
    const Eigen::Vector3d hit = o + t * d;
    if (hit.z() < 0.0 || hit.z() > s.room.wall_height) return;
    const double other = axis == 0 ? hit.y() : hit.x();
    const double lo = axis == 0 ? s.room.y_min : s.room.x_min;
    const double hi = axis == 0 ? s.room.y_max : s.room.x_max;
    if (other < lo - 1e-9 || other > hi + 1e-9) return;
    best = std::min(best, t);
  };
  wall(s.room.x_min, o.x(), d.x(), 0);
  wall(s.room.x_max, o.x(), d.x(), 0);
  wall(s.room.y_min, o.y(), d.y(), 1);
  wall(s.room.y_max, o.y(), d.y(), 1);
  if (!std::isfinite(best)) return std::nullopt;
  return best;
}

FlowGrid Simulator::render_flow(const Pose& pose, double linear, double angular) const {
  const auto& s = scenario_;
  const Eigen::Matrix3d rc = s.camera.robot_from_camera();
  const Eigen::Vector3d t = rc.transpose() * Eigen::Vector3d(linear, 0.0, 0.0);
  const Eigen::Vector3d w = rc.transpose() * Eigen::Vector3d(0.0, 0.0, angular);
  const double f = s.camera.focal();
  std::vector<FlowVector> cells(s.rows * s.cols);
  for (std::size_t r = 0; r < s.rows; ++r) {
    for (std::size_t c = 0; c < s.cols; ++c) {
      const auto p = s.camera.cell_point(r, c, s.rows, s.cols);
      const auto z = depth(pose, p);
      if (!z) throw Error("grid ray intersects no surface at the current pose");
      const auto fl = rigid_flow(p, *z, t, w, f);
      cells[r * s.cols + c] = {fl.x(), fl.y()};
    }
  }
  return FlowGrid(s.rows, s.cols, std::move(cells));
}

StreamLog Simulator::run(Truth* truth) const {
  const auto& s = scenario_;
  std::mt19937_64 policy_rng(s.seed);
  std::mt19937_64 noise_rng(s.seed ^ 0x9e3779b97f4a7c15ull);
  std::mt19937_64 proprio_rng(s.seed ^ 0xc2b2ae3d27d4eb4full);

  RobotState state;
  state.pose = s.start;
  std::unique_ptr<ActionPolicy> policy;
  switch (s.policy) {
    case Policy::Script: policy = std::make_unique<ScriptPolicy>(s.script, s.frame_rate); break;
    case Policy::Wander: policy = std::make_unique<WanderPolicy>(s, policy_rng); break;
    case Policy::Rotate: policy = std::make_unique<RotatePolicy>(s, policy_rng); break;
    case Policy::Approach: {
      std::uniform_real_distribution<double> gap(s.approach_min, s.approach_max);
      const double g = gap(policy_rng);
      state.pose = {s.room.x_max - s.robot_radius - g, 0.5 * (s.room.y_min + s.room.y_max), 0.0};
      policy = std::make_unique<ApproachPolicy>(s, policy_rng, g);
      break;
    }
  }

  std::vector<ActionCommand> issued;
  std::vector<StepResult> steps;
  std::vector<FlowGrid> clean;
  const std::size_t max_frames = 1'000'000;
  std::optional<StepResult> last;
  while (issued.size() < max_frames) {
    const auto kind = policy->next(last ? &*last : nullptr);
    if (!kind) break;
    const auto cmd = ActionCommand::make(*kind, s.actions);
    const auto res = step(state, cmd);
    issued.push_back(cmd);
    clean.push_back(render_flow(res.pose, res.linear, res.angular));
    steps.push_back(res);
    last = res;
  }

  double noise = s.flow_noise_std;
  if (noise < 0.0) {
    std::vector<double> mags;
    for (const auto& g : clean) {
      for (const auto& c : g.cells()) mags.push_back(std::hypot(c.u, c.v));
    }
    if (mags.empty()) {
      noise = 0.0;
    } else {
      const auto k = static_cast<std::size_t>(0.9 * static_cast<double>(mags.size() - 1));
      std::nth_element(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(k), mags.end());
      noise = 0.05 * mags[k];
    }
  }

  StreamLog log;
  log.header.rows = s.rows;
  log.header.cols = s.cols;
  log.header.frame_rate = s.frame_rate;
  log.header.actions = s.actions;
  log.header.scenario = s.name;
  log.header.seed = s.seed;
  log.header.injected_delay = s.actuation_delay;
  std::normal_distribution<double> unit(0.0, 1.0);
  log.frames.reserve(steps.size());
  for (std::size_t i = 0; i < steps.size(); ++i) {
    SensorimotorFrame f;
    f.t = static_cast<std::int64_t>(i);
    std::vector<FlowVector> cells = clean[i].cells();
    if (noise > 0.0) {
      for (auto& c : cells) {
        c.u += noise * unit(noise_rng);
        c.v += noise * unit(noise_rng);
      }
    }
    f.flow = FlowGrid(s.rows, s.cols, std::move(cells));
    f.action = issued[i];
    f.proprio.linear = steps[i].linear + s.proprio_noise_linear * unit(proprio_rng);
    f.proprio.angular = steps[i].angular + s.proprio_noise_angular * unit(proprio_rng);
    f.bump = steps[i].bump;
    log.frames.push_back(std::move(f));
  }

  if (truth) {
    truth->poses.clear();
    truth->velocity.clear();
    for (const auto& st : steps) {
      truth->poses.push_back(st.pose);
      truth->velocity.emplace_back(st.linear, st.angular);
    }
    truth->clean_flow = std::move(clean);
    truth->episodes = policy->episodes;
    truth->flow_noise_std = noise;
  }
  return log;
}

Scenario parse_scenario(std::istream& in) {
  Scenario s;
  std::string line;
  bool in_script = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto sv = text::trim(line);
    if (sv.empty() || sv.front() == '#') continue;
    if (sv == "[script]") {
      in_script = true;
      continue;
    }
    if (in_script) {
      const auto tok = text::split_ws(sv);
      if (tok.size() != 2) throw Error("script line " + std::to_string(lineno) + ": expected '<seconds> <action>'");
      s.script.push_back({text::parse_double(tok[0]), parse_action_kind(tok[1])});
      continue;
    }
    const auto eq = sv.find('=');
    if (eq == std::string_view::npos) throw Error("scenario line " + std::to_string(lineno) + ": expected key=value");
    const auto key = text::trim(sv.substr(0, eq));
    const auto val = text::trim(sv.substr(eq + 1));
    const auto nums = [&](std::size_t n) {
      const auto tok = text::split_ws(val);
      if (tok.size() != n) throw Error("scenario key '" + std::string(key) + "' expects " + std::to_string(n) + " values");
      std::vector<double> v;
      for (auto t : tok) v.push_back(text::parse_double(t));
      return v;
    };
    if (key == "name") s.name = std::string(val);
    else if (key == "seed") s.seed = static_cast<std::uint64_t>(text::parse_int(val));
    else if (key == "policy") s.policy = parse_policy(val);
    else if (key == "duration") s.duration = text::parse_double(val);
    else if (key == "rows") s.rows = static_cast<std::size_t>(text::parse_int(val));
    else if (key == "cols") s.cols = static_cast<std::size_t>(text::parse_int(val));
    else if (key == "frame_rate") s.frame_rate = text::parse_double(val);
    else if (key == "actuation_delay") s.actuation_delay = static_cast<int>(text::parse_int(val));
    else if (key == "action_linear") s.actions.linear = text::parse_double(val);
    else if (key == "action_angular") s.actions.angular = text::parse_double(val);
    else if (key == "flow_noise") s.flow_noise_std = val == "auto" ? -1.0 : text::parse_double(val);
    else if (key == "proprio_noise_linear") s.proprio_noise_linear = text::parse_double(val);
    else if (key == "proprio_noise_angular") s.proprio_noise_angular = text::parse_double(val);
    else if (key == "room") {
      const auto v = nums(4);
      s.room.x_min = v[0];
      s.room.x_max = v[1];
      s.room.y_min = v[2];
      s.room.y_max = v[3];
    } else if (key == "wall_height") s.room.wall_height = text::parse_double(val);
    else if (key == "camera_height") s.camera.height = text::parse_double(val);
    else if (key == "camera_tilt_deg") s.camera.tilt_deg = text::parse_double(val);
    else if (key == "camera_hfov_deg") s.camera.hfov_deg = text::parse_double(val);
    else if (key == "image_width") s.camera.image_width = text::parse_double(val);
    else if (key == "image_height") s.camera.image_height = text::parse_double(val);
    else if (key == "robot_radius") s.robot_radius = text::parse_double(val);
    else if (key == "start") {
      const auto v = nums(3);
      s.start = {v[0], v[1], v[2]};
    } else if (key == "episodes") s.episodes = static_cast<int>(text::parse_int(val));
    else if (key == "approach_min") s.approach_min = text::parse_double(val);
    else if (key == "approach_max") s.approach_max = text::parse_double(val);
    else if (key == "static_contacts") s.static_contacts = static_cast<int>(text::parse_int(val));
    else throw Error("unknown scenario key '" + std::string(key) + "'");
  }
  s.validate();
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scenario: " + path);
  return parse_scenario(in);
}

void write_scenario(std::ostream& out, const Scenario& s) {
  using text::fmt;
  out << "name=" << s.name << '\n';
  out << "seed=" << s.seed << '\n';
  out << "policy=" << policy_name(s.policy) << '\n';
  out << "duration=" << fmt(s.duration) << '\n';
  out << "rows=" << s.rows << '\n';
  out << "cols=" << s.cols << '\n';
  out << "frame_rate=" << fmt(s.frame_rate) << '\n';
  out << "actuation_delay=" << s.actuation_delay << '\n';
  out << "action_linear=" << fmt(s.actions.linear) << '\n';
  out << "action_angular=" << fmt(s.actions.angular) << '\n';
  out << "flow_noise=" << (s.flow_noise_std < 0.0 ? std::string("auto") : fmt(s.flow_noise_std)) << '\n';
  out << "proprio_noise_linear=" << fmt(s.proprio_noise_linear) << '\n';
  out << "proprio_noise_angular=" << fmt(s.proprio_noise_angular) << '\n';
  out << "room=" << fmt(s.room.x_min) << ' ' << fmt(s.room.x_max) << ' ' << fmt(s.room.y_min) << ' '
      << fmt(s.room.y_max) << '\n';
  out << "wall_height=" << fmt(s.room.wall_height) << '\n';
  out << "camera_height=" << fmt(s.camera.height) << '\n';
  out << "camera_tilt_deg=" << fmt(s.camera.tilt_deg) << '\n';
  out << "camera_hfov_deg=" << fmt(s.camera.hfov_deg) << '\n';
  out << "image_width=" << fmt(s.camera.image_width) << '\n';
  out << "image_height=" << fmt(s.camera.image_height) << '\n';
  out << "robot_radius=" << fmt(s.robot_radius) << '\n';
  out << "start=" << fmt(s.start.x) << ' ' << fmt(s.start.y) << ' ' << fmt(s.start.yaw) << '\n';
  out << "episodes=" << s.episodes << '\n';
  out << "approach_min=" << fmt(s.approach_min) << '\n';
  out << "approach_max=" << fmt(s.approach_max) << '\n';
  out << "static_contacts=" << s.static_contacts << '\n';
  if (!s.script.empty()) {
    out << "[script]\n";
    for (const auto& st : s.script) out << fmt(st.duration) << ' ' << to_string(st.kind) << '\n';
  }
}

Scenario preset(const std::string& name, std::uint64_t seed) {
  Scenario s;
  s.name = name;
  s.seed = seed;
  if (name == "wander") {
    s.policy = Policy::Wander;
    s.duration = 120.0;
  } else if (name == "approach") {
    s.policy = Policy::Approach;
    s.episodes = 20;
  } else if (name == "rotate") {
    s.policy = Policy::Rotate;
    s.duration = 60.0;
  } else {
    throw Error("unknown preset '" + name + "'");
  }
  s.validate();
  return s;
}

}  // namespace sfm::sim
