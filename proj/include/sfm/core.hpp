#pragma once

// Shared sensorimotor vocabulary: flow grids, actions, proprioception,
// recorded frames, stream logs and training-pair assembly.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace sfm {

/// Raised for any contract violation or corrupted input across the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FlowVector {
  double u = 0.0;  // horizontal, pixels/s
  double v = 0.0;  // vertical, pixels/s

  friend bool operator==(const FlowVector&, const FlowVector&) = default;
};

/// Row-major N x M grid of flow vectors.
class FlowGrid {
 public:
  FlowGrid() = default;
  FlowGrid(std::size_t rows, std::size_t cols);
  FlowGrid(std::size_t rows, std::size_t cols, std::vector<FlowVector> cells);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return cells_.size(); }

  FlowVector& at(std::size_t r, std::size_t c) { return cells_[r * cols_ + c]; }
  const FlowVector& at(std::size_t r, std::size_t c) const { return cells_[r * cols_ + c]; }
  FlowVector& operator[](std::size_t i) { return cells_[i]; }
  const FlowVector& operator[](std::size_t i) const { return cells_[i]; }

  const std::vector<FlowVector>& cells() const { return cells_; }
  bool same_shape(const FlowGrid& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

  friend bool operator==(const FlowGrid&, const FlowGrid&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<FlowVector> cells_;
};

enum class ActionKind : std::uint8_t { Stop, Forward, Backward, TurnLeft, TurnRight };

std::string_view to_string(ActionKind k);
ActionKind parse_action_kind(std::string_view s);

/// Commanded speeds for the five-action repertoire.
struct ActionConstants {
  double linear = 0.3;   // m/s
  double angular = 0.6;  // rad/s
  friend bool operator==(const ActionConstants&, const ActionConstants&) = default;
};

struct ActionCommand {
  ActionKind kind = ActionKind::Stop;
  double linear = 0.0;
  double angular = 0.0;

  static ActionCommand make(ActionKind kind, const ActionConstants& k = {});
  friend bool operator==(const ActionCommand&, const ActionCommand&) = default;
};

struct Proprioception {
  double linear = 0.0;
  double angular = 0.0;
  friend bool operator==(const Proprioception&, const Proprioception&) = default;
};

struct SensorimotorFrame {
  std::int64_t t = 0;
  FlowGrid flow;
  ActionCommand action;
  Proprioception proprio;
  bool bump = false;

  friend bool operator==(const SensorimotorFrame&, const SensorimotorFrame&) = default;
};

struct LogHeader {
  int version = 1;
  std::size_t rows = 0;
  std::size_t cols = 0;
  double frame_rate = 15.0;
  ActionConstants actions;
  std::string scenario;  // free-form, no newlines
  std::uint64_t seed = 0;
  std::optional<int> injected_delay;

  friend bool operator==(const LogHeader&, const LogHeader&) = default;
};

struct StreamLog {
  LogHeader header;
  std::vector<SensorimotorFrame> frames;

  std::size_t size() const { return frames.size(); }
  /// Throws if frames disagree with the header shape or timestamps are not increasing.
  void validate() const;

  friend bool operator==(const StreamLog&, const StreamLog&) = default;
};

void write_stream_log(std::ostream& out, const StreamLog& log);
StreamLog read_stream_log(std::istream& in);
StreamLog load_stream_log(const std::string& path);

/// Returns (linear, angular) multiplied per axis by `scale`.
Eigen::Vector2d encode_action(const ActionCommand& a, const Eigen::Vector2d& scale = Eigen::Vector2d::Ones());

/// Which frame's action/proprioception enters the input vector.
enum class CommandTiming {
  Input,   // frame t - T, the forward-model convention
  Target,  // frame t, used when scoring stream alignment
};

struct PairOptions {
  bool per_cell = true;
  bool use_action = true;
  bool use_proprio = true;
  bool use_cell_coords = false;
  CommandTiming timing = CommandTiming::Input;
  Eigen::Vector2d action_scale = Eigen::Vector2d::Ones();
  Eigen::Vector2d proprio_scale = Eigen::Vector2d::Ones();

  std::size_t input_dim() const;
};

/// One per-cell learning sample: inputs from frame t - T, delta-flow output at frame t.
struct TrainingPair {
  Eigen::VectorXd x;
  Eigen::Vector2d y;
  std::size_t row = 0;
  std::size_t col = 0;
  std::int64_t t = 0;
};

/// Feature vector for one cell; layout: flow(2), action(2)?, proprio(2)?, coords(2)?.
Eigen::VectorXd cell_features(const FlowVector& flow, const ActionCommand& action, const Proprioception& proprio,
                              std::size_t row, std::size_t col, std::size_t rows, std::size_t cols,
                              const PairOptions& opt);

/// Pairs ordered by target frame, then row-major cell. Empty when the log is too short.
std::vector<TrainingPair> make_pairs(const StreamLog& log, int horizon, const PairOptions& opt = {});

}  // namespace sfm
