#include <cmath>
#include <sstream>

#include <Eigen/Geometry>

#include "doctest.h"
#include "sfm/simulator.hpp"

using namespace sfm;
using namespace sfm::sim;

namespace {

// Projects the scene point seen at `p` from `from` into the camera at `to`.
Eigen::Vector2d reproject(const Simulator& sim, const Pose& from, const Pose& to, const Eigen::Vector2d& p) {
  const auto& s = sim.scenario();
  const double z = *sim.depth(from, p);
  auto world_from_camera = [&](const Pose& q) -> Eigen::Matrix3d {
    return Eigen::Matrix3d(Eigen::AngleAxisd(q.yaw, Eigen::Vector3d::UnitZ())) * s.camera.robot_from_camera();
  };
  const Eigen::Vector3d o0(from.x, from.y, s.camera.height);
  const Eigen::Vector3d o1(to.x, to.y, s.camera.height);
  const Eigen::Vector3d point = o0 + world_from_camera(from) * Eigen::Vector3d(p.x() * z, p.y() * z, z);
  const Eigen::Vector3d q = world_from_camera(to).transpose() * (point - o1);
  return {q.x() / q.z(), q.y() / q.z()};
}

Pose advance(const Pose& p, double v, double w, double h) {
  return {p.x + v * std::cos(p.yaw) * h, p.y + v * std::sin(p.yaw) * h, p.yaw + w * h};
}

}  // namespace

TEST_CASE("rendered flow equals the time derivative of reprojected scene points") {
  Scenario s = preset("wander", 1);
  const Simulator sim(s);
  const double f = s.camera.focal();
  const double h = 1e-5;
  for (const Pose pose : {Pose{0.0, 0.0, 0.0}, Pose{1.2, -2.0, 0.7}, Pose{-3.0, 2.5, -2.4}}) {
    for (const auto& [v, w] : std::vector<std::pair<double, double>>{{0.3, 0.0}, {-0.3, 0.0}, {0.0, 0.6}, {0.2, -0.4}}) {
      const auto grid = sim.render_flow(pose, v, w);
      for (std::size_t r = 0; r < s.rows; ++r) {
        for (std::size_t c = 0; c < s.cols; ++c) {
          const auto p = s.camera.cell_point(r, c, s.rows, s.cols);
          const Eigen::Vector2d fwd = reproject(sim, pose, advance(pose, v, w, h), p);
          const Eigen::Vector2d back = reproject(sim, pose, advance(pose, v, w, -h), p);
          const Eigen::Vector2d want = f * (fwd - back) / (2.0 * h);
          CHECK(grid.at(r, c).u == doctest::Approx(want.x()).epsilon(1e-6).scale(1.0));
          CHECK(grid.at(r, c).v == doctest::Approx(want.y()).epsilon(1e-6).scale(1.0));
        }
      }
    }
  }
}

TEST_CASE("forward motion moves 0.02 m per frame after the delay") {
  Scenario s = preset("wander", 1);
  s.actuation_delay = 3;
  const Simulator sim(s);
  RobotState st;
  const auto fwd = ActionCommand::make(ActionKind::Forward, s.actions);
  for (int i = 0; i < 3; ++i) CHECK(sim.step(st, fwd).linear == 0.0);
  const double x0 = st.pose.x;
  sim.step(st, fwd);
  CHECK(st.pose.x - x0 == doctest::Approx(0.3 / 15.0).epsilon(1e-12));
}

TEST_CASE("wander run is deterministic and two minutes long") {
  const auto a = Simulator(preset("wander", 9)).run();
  const auto b = Simulator(preset("wander", 9)).run();
  CHECK(a == b);
  CHECK(a.size() == 1800);
  CHECK(a.header.injected_delay == 6);
  CHECK_FALSE(a == Simulator(preset("wander", 10)).run());
}

TEST_CASE("the log stores the issued command while the robot executes it later") {
  Truth t;
  const auto log = Simulator(preset("wander", 2)).run(&t);
  for (std::size_t i = 6; i < log.size(); ++i) {
    CHECK(t.velocity[i].x() == log.frames[i - 6].action.linear);
  }
}

TEST_CASE("approach episodes end in exactly one bump each") {
  Truth t;
  auto s = preset("approach", 3);
  s.static_contacts = 2;
  const auto log = Simulator(s).run(&t);
  REQUIRE(t.episodes.size() == 22);
  std::size_t edges = 0;
  for (std::size_t i = 0; i < log.size(); ++i) {
    if (log.frames[i].bump && (i == 0 || !log.frames[i - 1].bump)) ++edges;
  }
  CHECK(edges == t.episodes.size());
  std::size_t statics = 0;
  for (const auto& e : t.episodes) {
    CHECK(log.frames[e.contact_frame].bump);
    CHECK_FALSE(log.frames[e.contact_frame - 1].bump);
    CHECK(e.start_frame < e.contact_frame);
    statics += e.static_contact;
  }
  CHECK(statics == 2);
}

TEST_CASE("scenario files round-trip and invalid scenarios are rejected") {
  auto s = preset("approach", 4);
  std::stringstream out;
  write_scenario(out, s);
  const auto back = parse_scenario(out);
  std::stringstream again;
  write_scenario(again, back);
  CHECK(again.str() == out.str());

  auto bad = preset("wander", 1);
  bad.camera.tilt_deg = -60.0;  // rays above the walls hit nothing
  CHECK_THROWS_AS(Simulator{bad}, Error);
  bad = preset("wander", 1);
  bad.actuation_delay = -1;
  CHECK_THROWS_AS(bad.validate(), Error);
  CHECK_THROWS_AS(preset("nope", 1), Error);
}
