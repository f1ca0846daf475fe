#include "sfm/core.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "sfm/text.hpp"

namespace sfm {

namespace {

constexpr std::string_view kLogFormat = "sfm-streamlog";

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw Error(std::string("non-finite ") + what);
}

}  // namespace

FlowGrid::FlowGrid(std::size_t rows, std::size_t cols) : FlowGrid(rows, cols, std::vector<FlowVector>(rows * cols)) {}

FlowGrid::FlowGrid(std::size_t rows, std::size_t cols, std::vector<FlowVector> cells)
    : rows_(rows), cols_(cols), cells_(std::move(cells)) {
  if (rows == 0 || cols == 0) throw Error("flow grid needs at least one row and one column");
  if (cells_.size() != rows * cols) {
    throw Error("flow grid cell count " + std::to_string(cells_.size()) + " != " + std::to_string(rows) + "x" +
                std::to_string(cols));
  }
  for (const auto& c : cells_) {
    require_finite(c.u, "flow component");
    require_finite(c.v, "flow component");
  }
}

std::string_view to_string(ActionKind k) {
  switch (k) {
    case ActionKind::Stop: return "stop";
    case ActionKind::Forward: return "forward";
    case ActionKind::Backward: return "backward";
    case ActionKind::TurnLeft: return "turn_left";
    case ActionKind::TurnRight: return "turn_right";
  }
  return "?";
}

ActionKind parse_action_kind(std::string_view s) {
  if (s == "stop") return ActionKind::Stop;
  if (s == "forward") return ActionKind::Forward;
  if (s == "backward") return ActionKind::Backward;
  if (s == "turn_left") return ActionKind::TurnLeft;
  if (s == "turn_right") return ActionKind::TurnRight;
  throw Error("unknown action '" + std::string(s) + "'");
}

ActionCommand ActionCommand::make(ActionKind kind, const ActionConstants& k) {
  switch (kind) {
    case ActionKind::Stop: return {kind, 0.0, 0.0};
    case ActionKind::Forward: return {kind, k.linear, 0.0};
    case ActionKind::Backward: return {kind, -k.linear, 0.0};
    case ActionKind::TurnLeft: return {kind, 0.0, k.angular};
    case ActionKind::TurnRight: return {kind, 0.0, -k.angular};
  }
  throw Error("invalid action kind");
}

void StreamLog::validate() const {
  if (header.rows == 0 || header.cols == 0) throw Error("stream log header has an empty grid");
  if (!(header.frame_rate > 0.0)) throw Error("stream log frame rate must be positive");
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto& f = frames[i];
    if (f.flow.rows() != header.rows || f.flow.cols() != header.cols) {
      throw Error("frame " + std::to_string(f.t) + " grid shape does not match header");
    }
    if (i > 0 && f.t <= frames[i - 1].t) throw Error("frame indices must be strictly increasing");
  }
}

void write_stream_log(std::ostream& out, const StreamLog& log) {
  const auto& h = log.header;
  out << "format=" << kLogFormat << '\n';
  out << "version=" << h.version << '\n';
  out << "rows=" << h.rows << '\n';
  out << "cols=" << h.cols << '\n';
  out << "frame_rate=" << text::fmt(h.frame_rate) << '\n';
  out << "action_linear=" << text::fmt(h.actions.linear) << '\n';
  out << "action_angular=" << text::fmt(h.actions.angular) << '\n';
  out << "scenario=" << h.scenario << '\n';
  out << "seed=" << h.seed << '\n';
  if (h.injected_delay) out << "injected_delay=" << *h.injected_delay << '\n';
  out << "frames=" << log.frames.size() << '\n';
  for (const auto& f : log.frames) {
    out << f.t << ' ' << to_string(f.action.kind) << ' ' << text::fmt(f.proprio.linear) << ' '
        << text::fmt(f.proprio.angular) << ' ' << (f.bump ? 1 : 0);
    for (const auto& c : f.flow.cells()) out << ' ' << text::fmt(c.u) << ' ' << text::fmt(c.v);
    out << '\n';
  }
}

StreamLog read_stream_log(std::istream& in) {
  StreamLog log;
  auto& h = log.header;
  std::string line;
  bool saw_format = false;
  std::optional<std::size_t> declared_frames;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = text::trim(line);
    if (sv.empty() || sv.front() == '#') continue;
    const auto eq = sv.find('=');
    if (eq != std::string_view::npos && log.frames.empty()) {
      const auto key = sv.substr(0, eq);
      const auto val = sv.substr(eq + 1);
      if (key == "format") {
        if (val != kLogFormat) throw Error("not a stream log: format=" + std::string(val));
        saw_format = true;
      } else if (key == "version") {
        h.version = static_cast<int>(text::parse_int(val));
        if (h.version != 1) throw Error("unsupported stream log version " + std::string(val));
      } else if (key == "rows") {
        h.rows = static_cast<std::size_t>(text::parse_int(val));
      } else if (key == "cols") {
        h.cols = static_cast<std::size_t>(text::parse_int(val));
      } else if (key == "frame_rate") {
        h.frame_rate = text::parse_double(val);
      } else if (key == "action_linear") {
        h.actions.linear = text::parse_double(val);
      } else if (key == "action_angular") {
        h.actions.angular = text::parse_double(val);
      } else if (key == "scenario") {
        h.scenario = std::string(val);
      } else if (key == "seed") {
        h.seed = static_cast<std::uint64_t>(text::parse_int(val));
      } else if (key == "injected_delay") {
        h.injected_delay = static_cast<int>(text::parse_int(val));
      } else if (key == "frames") {
        declared_frames = static_cast<std::size_t>(text::parse_int(val));
      }
      // Unknown keys are tolerated for forward compatibility.
      continue;
    }
    if (!saw_format) throw Error("stream log missing format header");
    if (h.rows == 0 || h.cols == 0) throw Error("stream log header lacks rows/cols");
    const auto tok = text::split_ws(sv);
    const std::size_t ncells = h.rows * h.cols;
    if (tok.size() != 5 + 2 * ncells) {
      throw Error("line " + std::to_string(lineno) + ": expected " + std::to_string(ncells) + " cells, got " +
                  std::to_string(tok.size() < 5 ? 0 : (tok.size() - 5) / 2) + " values");
    }
    SensorimotorFrame f;
    f.t = text::parse_int(tok[0]);
    f.action = ActionCommand::make(parse_action_kind(tok[1]), h.actions);
    f.proprio.linear = text::parse_double(tok[2]);
    f.proprio.angular = text::parse_double(tok[3]);
    require_finite(f.proprio.linear, "proprioception");
    require_finite(f.proprio.angular, "proprioception");
    const auto b = text::parse_int(tok[4]);
    if (b != 0 && b != 1) throw Error("bump flag must be 0 or 1");
    f.bump = b == 1;
    std::vector<FlowVector> cells(ncells);
    for (std::size_t i = 0; i < ncells; ++i) {
      cells[i].u = text::parse_double(tok[5 + 2 * i]);
      cells[i].v = text::parse_double(tok[6 + 2 * i]);
    }
    f.flow = FlowGrid(h.rows, h.cols, std::move(cells));
    log.frames.push_back(std::move(f));
  }
  if (!saw_format) throw Error("empty or truncated stream log");
  if (declared_frames && *declared_frames != log.frames.size()) {
    throw Error("stream log truncated: header declares " + std::to_string(*declared_frames) + " frames, found " +
                std::to_string(log.frames.size()));
  }
  log.validate();
  return log;
}

StreamLog load_stream_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open stream log: " + path);
  return read_stream_log(in);
}

Eigen::Vector2d encode_action(const ActionCommand& a, const Eigen::Vector2d& scale) {
  return {a.linear * scale.x(), a.angular * scale.y()};
}

std::size_t PairOptions::input_dim() const {
  return 2 + (use_action ? 2 : 0) + (use_proprio ? 2 : 0) + (use_cell_coords ? 2 : 0);
}

Eigen::VectorXd cell_features(const FlowVector& flow, const ActionCommand& action, const Proprioception& proprio,
                              std::size_t row, std::size_t col, std::size_t rows, std::size_t cols,
                              const PairOptions& opt) {
  Eigen::VectorXd x(opt.input_dim());
  Eigen::Index k = 0;
  x[k++] = flow.u;
  x[k++] = flow.v;
  if (opt.use_action) {
    x.segment<2>(k) = encode_action(action, opt.action_scale);
    k += 2;
  }
  if (opt.use_proprio) {
    x[k++] = proprio.linear * opt.proprio_scale.x();
    x[k++] = proprio.angular * opt.proprio_scale.y();
  }
  if (opt.use_cell_coords) {
    x[k++] = rows > 1 ? static_cast<double>(row) / static_cast<double>(rows - 1) : 0.5;
    x[k++] = cols > 1 ? static_cast<double>(col) / static_cast<double>(cols - 1) : 0.5;
  }
  return x;
}

std::vector<TrainingPair> make_pairs(const StreamLog& log, int horizon, const PairOptions& opt) {
  if (horizon < 1) throw Error("horizon must be >= 1");
  if (!opt.per_cell) throw Error("only per-cell pair layout is supported");
  std::vector<TrainingPair> pairs;
  const auto n = log.frames.size();
  const auto T = static_cast<std::size_t>(horizon);
  if (n <= T) return pairs;
  const auto rows = log.header.rows;
  const auto cols = log.header.cols;
  pairs.reserve((n - T) * rows * cols);
  for (std::size_t i = T; i < n; ++i) {
    const auto& src = log.frames[i - T];
    const auto& dst = log.frames[i];
    const auto& cmd = opt.timing == CommandTiming::Input ? src : dst;
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        TrainingPair p;
        const auto& a = src.flow.at(r, c);
        const auto& b = dst.flow.at(r, c);
        p.x = cell_features(a, cmd.action, cmd.proprio, r, c, rows, cols, opt);
        p.y = {b.u - a.u, b.v - a.v};
        p.row = r;
        p.col = c;
        p.t = dst.t;
        pairs.push_back(std::move(p));
      }
    }
  }
  return pairs;
}

}  // namespace sfm
