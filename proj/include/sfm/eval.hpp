#pragma once

// Evaluation protocol: naive constant-flow baseline, AEPE / AAE, likelihood ratio,
// action ablation, novelty sweeps and distribution dumps.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sfm/core.hpp"
#include "sfm/forward_model.hpp"

namespace sfm::eval {

struct MetricReport {
  int horizon = 0;
  bool with_action = true;
  double aepe_model = 0.0;
  double aepe_naive = 0.0;
  double relative_reduction = 0.0;
  double aae_model = 0.0;
  double aae_naive = 0.0;
  double mean_loglik_ratio = 0.0;
  std::size_t n_pairs = 0;
  std::size_t component_count = 0;
  std::size_t prediction_set_size = 0;
  double mass_in_prediction_set = 0.0;
};

/// Constant-flow predictor: the predicted delta is always zero.
Eigen::Vector2d naive_predict(const Eigen::VectorXd& x);

double aepe(const std::vector<Eigen::Vector2d>& pred, const std::vector<Eigen::Vector2d>& truth);
double aae(const std::vector<Eigen::Vector2d>& pred, const std::vector<Eigen::Vector2d>& truth,
           double stabilizer = 1.0);

/// Zero-mean isotropic Gaussian over delta-flow, per-axis variance = mean |y|^2 / 2.
class NaiveDensity {
 public:
  NaiveDensity() = default;
  static NaiveDensity fit(const std::vector<TrainingPair>& pairs);
  static NaiveDensity fit(const std::vector<TrainingPair>& pairs, std::size_t begin, std::size_t end);
  explicit NaiveDensity(double variance);

  bool fitted() const { return variance_ > 0.0; }
  double variance() const { return variance_; }
  double logpdf(const Eigen::Vector2d& y) const;

 private:
  double variance_ = 0.0;
};

/// Per-pair [model log-density - naive log-density] under the model's prediction set.
std::vector<double> loglik_ratios(const ForwardModel& fm, const std::vector<TrainingPair>& pairs,
                                  const NaiveDensity& naive, std::size_t begin = 0, std::size_t end = SIZE_MAX);
double loglik_ratio(const ForwardModel& fm, const std::vector<TrainingPair>& pairs, const NaiveDensity& naive);

struct BootstrapInterval {
  double mean = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};
/// Percentile bootstrap of the mean.
BootstrapInterval bootstrap_mean(const std::vector<double>& values, std::size_t resamples, double confidence,
                                 std::uint64_t seed);

/// Hartigan's dip: sup distance from the empirical CDF to the nearest unimodal CDF.
double dip_statistic(std::vector<double> values);

struct DipTest {
  double dip = 0.0;
  double p_value = 1.0;  // Monte Carlo against the uniform null
};
DipTest dip_test(const std::vector<double>& values, std::size_t resamples, std::uint64_t seed);

struct EvalConfig {
  ForwardModelConfig model;
  double train_fraction = 0.7;
  double aae_stabilizer = 1.0;
};

struct PredictionRecord {
  std::int64_t t = 0;
  std::size_t row = 0;
  std::size_t col = 0;
  Eigen::VectorXd x;
  Eigen::Vector2d predicted = Eigen::Vector2d::Zero();
  Eigen::Vector2d truth = Eigen::Vector2d::Zero();
  std::size_t component = 0;
  double posterior = 0.0;
  double model_loglik = 0.0;
  double naive_loglik = 0.0;
};

/// Index of the first held-out pair: a whole number of frames times the cell count.
std::size_t split_index(std::size_t n_pairs, std::size_t cells, double train_fraction);

/// Scores a trained model on pairs[begin, end).
MetricReport evaluate(const ForwardModel& fm, const std::vector<TrainingPair>& pairs, std::size_t begin,
                      std::size_t end, const NaiveDensity& naive, double aae_stabilizer,
                      std::vector<PredictionRecord>* records = nullptr);

struct AblationResult {
  MetricReport report;
  ForwardModel model;
  std::vector<double> loglik_ratios;
};

/// Temporal split, train on the head, evaluate on the tail. Without action the
/// model sees flow only (no action, no proprioception).
AblationResult ablation_run(const StreamLog& log, int horizon, bool with_action, const EvalConfig& config);

struct SweepPoint {
  double novelty_distance = 0.0;
  MetricReport with_action;
  MetricReport without_action;
};
std::vector<double> default_novelty_grid();
std::vector<SweepPoint> novelty_sweep(const StreamLog& log, int horizon, const std::vector<double>& distances,
                                      const EvalConfig& config);

/// Axis-aligned rectangle in (u, v) flow space, pixels/s.
struct Region {
  double u_min = 0.0;
  double u_max = 0.0;
  double v_min = 0.0;
  double v_max = 0.0;
  bool contains(const FlowVector& f) const;
};

struct DistributionRow {
  std::size_t region = 0;
  int horizon = 0;
  ActionKind action = ActionKind::Stop;  // action issued at the source frame
  double du = 0.0;
  double dv = 0.0;
  std::size_t row = 0;
  std::size_t col = 0;
};

std::vector<DistributionRow> export_distributions(const StreamLog& log, const std::vector<Region>& regions,
                                                  const std::vector<int>& horizons);

void write_distributions(std::ostream& out, const std::vector<DistributionRow>& rows);
void write_predictions(std::ostream& out, const std::vector<PredictionRecord>& records);
void write_report_text(std::ostream& out, const MetricReport& r);
std::string report_json(const MetricReport& r);
void write_sweep(std::ostream& out, const std::vector<SweepPoint>& sweep);

}  // namespace sfm::eval
