#pragma once

// Incremental Gaussian mixture with a block-diagonal (input X, output Y)
// covariance structure. Components are created when no existing component
// explains a sample well enough, otherwise every component absorbs the sample
// in proportion to its posterior responsibility.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "sfm/core.hpp"

namespace sfm::igmm {

enum class CovarianceUpdate {
  // Weighted-scatter recurrence: S <- (1-w)(S + w a a^T), a = z - mu_old. Always PSD.
  Exact,
  // Literature form S <- S - d d^T + w[(z - mu_new)(z - mu_new)^T - S]; relies on the floor.
  Igmn,
};

std::string_view to_string(CovarianceUpdate u);
CovarianceUpdate parse_covariance_update(std::string_view s);

struct Config {
  /// Log-density below which a sample is considered unexplained by a component.
  double novelty_threshold = 0.0;
  /// Per-dimension standard deviations of freshly created components.
  Eigen::VectorXd sigma_ini_x;
  Eigen::VectorXd sigma_ini_y;
  /// Minimum w / (mass + w) for a component to be updated.
  double update_skip_threshold = 1e-4;
  /// Minimum covariance eigenvalue.
  double regularization_floor = 1e-6;
  double min_mass_fraction_for_prediction = 0.90;
  CovarianceUpdate covariance_update = CovarianceUpdate::Exact;
  /// When false, only the very first sample creates a component.
  bool allow_creation = true;

  void validate(std::size_t dx, std::size_t dy) const;
  friend bool operator==(const Config&, const Config&) = default;
};

/// Log-density of a point at Mahalanobis distance `distance` from a freshly created component.
double calibrated_novelty_threshold(double distance, const Eigen::VectorXd& sigma_ini_x,
                                    const Eigen::VectorXd& sigma_ini_y);

/// Mean and covariance of one block, plus the cached precision and log-determinant.
struct GaussianBlock {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;

  Eigen::MatrixXd precision;
  double log_det = 0.0;
  bool dirty = true;

  /// Recomputes the cache. Throws if the covariance is not positive-definite.
  void refresh();
  /// Uses the cache when clean; otherwise evaluates from scratch without touching it.
  double logpdf(const Eigen::VectorXd& z) const;
};

struct Component {
  GaussianBlock x;
  GaussianBlock y;
  double mass = 0.0;
  std::uint64_t created_at = 0;
  double collision_value = 0.0;
};

double component_loglik(const Component& c, const Eigen::VectorXd& x);
double component_loglik(const Component& c, const Eigen::VectorXd& x, const Eigen::VectorXd& y);

struct LearnOutcome {
  bool created = false;
  std::size_t component = 0;  // the created component, when created
  /// (component index, posterior weight) for every component that absorbed the sample.
  std::vector<std::pair<std::size_t, double>> updates;
};

class Mixture {
 public:
  Mixture(std::size_t dx, std::size_t dy, Config config);

  std::size_t dx() const { return dx_; }
  std::size_t dy() const { return dy_; }
  const Config& config() const { return config_; }
  std::size_t size() const { return components_.size(); }
  bool empty() const { return components_.empty(); }
  std::uint64_t n_samples() const { return n_samples_; }
  const std::vector<Component>& components() const { return components_; }
  const Component& operator[](std::size_t j) const { return components_[j]; }

  double total_mass() const;
  double prior(std::size_t j) const;
  std::size_t regularization_count() const { return regularizations_; }

  double component_loglik(std::size_t j, const Eigen::VectorXd& x) const;
  double component_loglik(std::size_t j, const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;

  /// Absorbs one (x, y) sample. Non-finite or mis-sized samples throw and leave the mixture untouched.
  LearnOutcome learn_one(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

  /// Smallest highest-mass prefix (older first on ties) covering the configured mass fraction.
  std::vector<std::size_t> prediction_set() const;
  std::vector<std::size_t> prediction_set(double mass_fraction) const;

  void add_collision_value(std::size_t j, double amount);

  void write(std::ostream& out) const;
  static Mixture read(std::istream& in);
  std::string snapshot() const;
  static Mixture restore(std::string_view bytes);

 private:
  void check_sample(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
  void create(const Eigen::VectorXd& x, const Eigen::VectorXd& y);
  void update_block(GaussianBlock& b, const Eigen::VectorXd& z, double omega);
  void enforce_floor(Eigen::MatrixXd& cov);

  std::size_t dx_;
  std::size_t dy_;
  Config config_;
  std::vector<Component> components_;
  std::uint64_t n_samples_ = 0;
  std::size_t regularizations_ = 0;
};

}  // namespace sfm::igmm
