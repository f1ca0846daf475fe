#pragma once

// Deterministic synthetic data source: a differential-drive robot in a walled
// rectangular room, a tilted pinhole camera, analytic ego-motion flow sampled
// on an N x M grid, actuation delay, sensor noise and bump events.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sfm/core.hpp"

namespace sfm::sim {

struct Room {
  double x_min = -4.0;
  double x_max = 4.0;
  double y_min = -4.0;
  double y_max = 4.0;
  double wall_height = 3.0;
};

struct Camera {
  double height = 1.0;       // m above the floor
  double tilt_deg = 20.0;    // downward pitch
  double hfov_deg = 57.0;
  double image_width = 320.0;
  double image_height = 240.0;

  double focal() const;
  /// Normalized image coordinates of a grid cell centre.
  Eigen::Vector2d cell_point(std::size_t row, std::size_t col, std::size_t rows, std::size_t cols) const;
  /// Columns are the camera axes (x right, y down, z optical) expressed in the robot frame (x fwd, y left, z up).
  Eigen::Matrix3d robot_from_camera() const;
};

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
};

enum class Policy { Script, Wander, Approach, Rotate };

struct ScriptStep {
  double duration = 0.0;  // s
  ActionKind kind = ActionKind::Stop;
};

struct Scenario {
  std::string name = "wander";
  std::uint64_t seed = 1;
  Policy policy = Policy::Wander;
  double duration = 120.0;  // s, for wander/rotate
  std::vector<ScriptStep> script;

  std::size_t rows = 4;
  std::size_t cols = 5;
  double frame_rate = 15.0;
  int actuation_delay = 6;
  ActionConstants actions;
  /// Negative selects the automatic level: 5% of the 90th-percentile noiseless flow magnitude.
  double flow_noise_std = -1.0;
  double proprio_noise_linear = 0.005;
  double proprio_noise_angular = 0.01;

  Room room;
  Camera camera;
  double robot_radius = 0.25;
  Pose start;

  // Approach-and-bump policy.
  int episodes = 20;
  double approach_min = 1.5;  // gap between robot and wall at episode start, m
  double approach_max = 3.0;
  int static_contacts = 0;    // extra pushes against the wall while already touching

  /// Throws on invalid geometry or parameters, including grid rays that hit nothing.
  void validate() const;
};

Scenario parse_scenario(std::istream& in);
Scenario load_scenario(const std::string& path);
void write_scenario(std::ostream& out, const Scenario& s);

/// Preset scenarios: "wander", "approach", "rotate".
Scenario preset(const std::string& name, std::uint64_t seed);

struct RobotState {
  Pose pose;
  std::deque<ActionCommand> pending;  // issued commands not yet executed
  bool in_contact = false;
};

struct StepResult {
  Pose pose;
  ActionCommand executed;
  double linear = 0.0;   // actual velocity during the frame
  double angular = 0.0;
  bool contact = false;
  bool bump = false;
};

struct Episode {
  std::size_t start_frame = 0;    // first frame with a forward command
  std::size_t contact_frame = 0;  // frame of the bump rising edge
  bool static_contact = false;    // pushed while already touching
};

struct Truth {
  std::vector<Pose> poses;
  std::vector<Eigen::Vector2d> velocity;  // actual (linear, angular)
  std::vector<FlowGrid> clean_flow;
  std::vector<Episode> episodes;
  double flow_noise_std = 0.0;
};

class Simulator {
 public:
  struct Unchecked {};

  explicit Simulator(Scenario scenario);
  /// Checks only the grid rays; used by Scenario::validate.
  Simulator(Scenario scenario, Unchecked);

  const Scenario& scenario() const { return scenario_; }
  double dt() const { return 1.0 / scenario_.frame_rate; }

  /// Queues `issued` and integrates one frame with the command issued `actuation_delay` frames ago.
  StepResult step(RobotState& state, const ActionCommand& issued) const;

  /// Depth along the optical axis of the scene point seen at normalized image point `p`.
  std::optional<double> depth(const Pose& pose, const Eigen::Vector2d& p) const;

  /// Noiseless rigid-motion flow (pixels/s) on the grid.
  FlowGrid render_flow(const Pose& pose, double linear, double angular) const;

  StreamLog run(Truth* truth = nullptr) const;

 private:
  Scenario scenario_;
};

/// Pixel flow at normalized point p for camera-frame translation/rotation and depth z.
Eigen::Vector2d rigid_flow(const Eigen::Vector2d& p, double z, const Eigen::Vector3d& translation,
                           const Eigen::Vector3d& rotation, double focal);

}  // namespace sfm::sim
