#pragma once

// Per-cell forward model: learns P(delta flow, flow_{t-T}, action_{t-T}, proprio_{t-T})
// with an incremental mixture and predicts the flow grid T frames ahead by
// picking the most probable component given the inputs.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "sfm/core.hpp"
#include "sfm/igmm.hpp"

namespace sfm {

struct ForwardModelConfig {
  int horizon = 15;
  bool use_action = true;
  bool use_proprio = true;
  bool use_cell_coords = false;

  /// Mahalanobis radius of a fresh component at which a sample counts as novel.
  double novelty_distance = 3.0;
  /// Fresh-component std as a fraction of each feature's nominal spread.
  double sigma_ini_fraction = 0.25;
  double update_skip_threshold = 1e-4;
  /// Eigenvalue floor in standardized units.
  double regularization_floor = 1e-2;
  double mass_fraction = 0.90;
  igmm::CovarianceUpdate covariance_update = igmm::CovarianceUpdate::Exact;
  /// Frames buffered before feature scales are frozen and learning starts.
  int warmup_frames = 300;

  PairOptions pair_options(const ActionConstants& k) const;
  void validate() const;
};

/// Divisors mapping raw features to the mixture's standardized space.
struct FeatureScales {
  Eigen::VectorXd input;
  Eigen::Vector2d output = Eigen::Vector2d::Ones();
};

struct CellPrediction {
  Eigen::Vector2d delta = Eigen::Vector2d::Zero();  // physical units
  std::size_t component = 0;
  double posterior = 0.0;
};

struct FlowPrediction {
  FlowGrid grid;
  std::vector<std::size_t> map_component;
  std::vector<double> map_posterior;
  std::vector<double> log_lik;  // filled by evaluation when the target is known
};

class ForwardModel {
 public:
  /// Untrained model; scales are fixed after the warm-up window.
  ForwardModel(ForwardModelConfig config, std::size_t rows, std::size_t cols, ActionConstants actions = {});
  /// Model around an existing mixture (already standardized with `scales`).
  ForwardModel(ForwardModelConfig config, std::size_t rows, std::size_t cols, ActionConstants actions,
               FeatureScales scales, igmm::Mixture mixture);

  const ForwardModelConfig& config() const { return config_; }
  const PairOptions& pair_options() const { return options_; }
  int horizon() const { return config_.horizon; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t input_dim() const { return options_.input_dim(); }
  const ActionConstants& actions() const { return actions_; }

  bool ready() const { return mixture_.has_value(); }
  const igmm::Mixture& mixture() const;
  igmm::Mixture& mixture();
  const FeatureScales& scales() const;

  /// Streams one pair. During warm-up the pair is buffered and replayed once scales are frozen.
  void learn(const TrainingPair& pair);
  void learn(const std::vector<TrainingPair>& pairs);
  /// Freezes scales from whatever has been buffered. No-op when already ready.
  void finish_warmup();

  Eigen::VectorXd standardize_input(const Eigen::VectorXd& x) const;
  Eigen::VectorXd standardize_output(const Eigen::Vector2d& y) const;

  /// Raw input features for one cell of `frame`.
  Eigen::VectorXd features(const SensorimotorFrame& frame, std::size_t row, std::size_t col) const;

  std::vector<std::size_t> prediction_set() const;
  CellPrediction predict_cell(const Eigen::VectorXd& x) const;
  CellPrediction predict_cell(const Eigen::VectorXd& x, const std::vector<std::size_t>& candidates) const;
  FlowPrediction predict_grid(const SensorimotorFrame& frame) const;

  /// log p(y_true | x) under the prediction set with renormalized priors, in physical units.
  double posterior_predictive_loglik(const Eigen::VectorXd& x, const Eigen::Vector2d& y_true) const;
  double posterior_predictive_loglik(const Eigen::VectorXd& x, const Eigen::Vector2d& y_true,
                                     const std::vector<std::size_t>& candidates) const;

  /// The `k` most probable components for `x` among the top `mass_fraction` of the mixture.
  std::vector<std::size_t> active_components(const Eigen::VectorXd& x, std::size_t k, double mass_fraction) const;

  void write(std::ostream& out) const;
  static ForwardModel read(std::istream& in);
  std::string snapshot() const;
  static ForwardModel restore(std::string_view bytes);

 private:
  void check_ready() const;
  void initialize_from_buffer();
  std::vector<double> input_scores(const Eigen::VectorXd& xs, const std::vector<std::size_t>& candidates) const;

  ForwardModelConfig config_;
  std::size_t rows_;
  std::size_t cols_;
  ActionConstants actions_;
  PairOptions options_;
  std::optional<FeatureScales> scales_;
  std::optional<igmm::Mixture> mixture_;
  std::vector<TrainingPair> warmup_;
};

}  // namespace sfm
