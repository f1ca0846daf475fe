#include "sfm/igmm.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "sfm/text.hpp"

namespace sfm::igmm {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // log(2*pi)
constexpr std::string_view kSnapshotMagic = "sfm-mixture";
constexpr int kSnapshotVersion = 1;

bool all_finite(const Eigen::VectorXd& v) { return v.allFinite(); }

double logsumexp(const std::vector<double>& v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double a : v) m = std::max(m, a);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double a : v) s += std::exp(a - m);
  return m + std::log(s);
}

}  // namespace

std::string_view to_string(CovarianceUpdate u) { return u == CovarianceUpdate::Exact ? "exact" : "igmn"; }

CovarianceUpdate parse_covariance_update(std::string_view s) {
  if (s == "exact") return CovarianceUpdate::Exact;
  if (s == "igmn") return CovarianceUpdate::Igmn;
  throw Error("unknown covariance update '" + std::string(s) + "'");
}

void Config::validate(std::size_t dx, std::size_t dy) const {
  if (static_cast<std::size_t>(sigma_ini_x.size()) != dx || static_cast<std::size_t>(sigma_ini_y.size()) != dy) {
    throw Error("sigma_ini dimensions do not match the mixture blocks");
  }
  if (!((sigma_ini_x.array() > 0.0).all() && (sigma_ini_y.array() > 0.0).all())) {
    throw Error("sigma_ini entries must be positive");
  }
  if (!std::isfinite(novelty_threshold)) throw Error("novelty threshold must be finite");
  if (!(update_skip_threshold >= 0.0)) throw Error("update skip threshold must be >= 0");
  if (!(regularization_floor > 0.0)) throw Error("regularization floor must be positive");
  if (!(min_mass_fraction_for_prediction > 0.0 && min_mass_fraction_for_prediction <= 1.0)) {
    throw Error("prediction mass fraction must be in (0, 1]");
  }
}

double calibrated_novelty_threshold(double distance, const Eigen::VectorXd& sigma_ini_x,
                                    const Eigen::VectorXd& sigma_ini_y) {
  const auto d = static_cast<double>(sigma_ini_x.size() + sigma_ini_y.size());
  const double log_det =
      2.0 * (sigma_ini_x.array().log().sum() + sigma_ini_y.array().log().sum());
  return -0.5 * (d * kLog2Pi + log_det + distance * distance);
}

void GaussianBlock::refresh() {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw Error("component covariance is not positive-definite");
  const auto n = cov.rows();
  precision = llt.solve(Eigen::MatrixXd::Identity(n, n));
  log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  dirty = false;
}

double GaussianBlock::logpdf(const Eigen::VectorXd& z) const {
  if (dirty) {
    GaussianBlock fresh{mean, cov, {}, 0.0, true};
    fresh.refresh();
    return fresh.logpdf(z);
  }
  const auto n = mean.size();
  Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 32, 1> d;
  if (n > 32) return -0.5 * (static_cast<double>(n) * kLog2Pi + log_det + (z - mean).dot(precision * (z - mean)));
  d = z - mean;
  double q = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    double off = 0.0;
    for (Eigen::Index i = j + 1; i < n; ++i) off += precision(i, j) * d[i];
    q += d[j] * (precision(j, j) * d[j] + 2.0 * off);
  }
  return -0.5 * (static_cast<double>(mean.size()) * kLog2Pi + log_det + q);
}

double component_loglik(const Component& c, const Eigen::VectorXd& x) { return c.x.logpdf(x); }

double component_loglik(const Component& c, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  return c.x.logpdf(x) + c.y.logpdf(y);
}

Mixture::Mixture(std::size_t dx, std::size_t dy, Config config) : dx_(dx), dy_(dy), config_(std::move(config)) {
  if (dx == 0 || dy == 0) throw Error("mixture blocks must be non-empty");
  config_.validate(dx, dy);
}

double Mixture::total_mass() const {
  double s = 0.0;
  for (const auto& c : components_) s += c.mass;
  return s;
}

double Mixture::prior(std::size_t j) const { return components_.at(j).mass / total_mass(); }

double Mixture::component_loglik(std::size_t j, const Eigen::VectorXd& x) const {
  if (static_cast<std::size_t>(x.size()) != dx_) throw Error("input dimension mismatch");
  if (!all_finite(x)) throw Error("non-finite input");
  return igmm::component_loglik(components_.at(j), x);
}

double Mixture::component_loglik(std::size_t j, const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
  check_sample(x, y);
  return igmm::component_loglik(components_.at(j), x, y);
}

void Mixture::check_sample(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
  if (static_cast<std::size_t>(x.size()) != dx_ || static_cast<std::size_t>(y.size()) != dy_) {
    throw Error("sample dimension mismatch");
  }
  if (!all_finite(x) || !all_finite(y)) throw Error("non-finite sample rejected");
}

void Mixture::create(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  Component c;
  c.x.mean = x;
  c.x.cov = config_.sigma_ini_x.array().square().matrix().asDiagonal();
  c.y.mean = y;
  c.y.cov = config_.sigma_ini_y.array().square().matrix().asDiagonal();
  c.x.refresh();
  c.y.refresh();
  c.mass = 1.0;
  c.created_at = n_samples_;
  components_.push_back(std::move(c));
}

void Mixture::enforce_floor(Eigen::MatrixXd& cov) {
  cov = 0.5 * (cov + cov.transpose()).eval();
  // Cholesky of the shifted matrix succeeds iff every eigenvalue exceeds the floor.
  const auto n = cov.rows();
  Eigen::LLT<Eigen::MatrixXd> shifted(cov - config_.regularization_floor * Eigen::MatrixXd::Identity(n, n));
  if (shifted.info() == Eigen::Success) return;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  const auto& ev = es.eigenvalues();
  if (ev.minCoeff() >= config_.regularization_floor) return;
  const Eigen::VectorXd clamped = ev.cwiseMax(config_.regularization_floor);
  cov = es.eigenvectors() * clamped.asDiagonal() * es.eigenvectors().transpose();
  cov = 0.5 * (cov + cov.transpose()).eval();
  ++regularizations_;
}

void Mixture::update_block(GaussianBlock& b, const Eigen::VectorXd& z, double omega) {
  const Eigen::VectorXd a = z - b.mean;
  const Eigen::VectorXd delta = omega * a;
  b.mean += delta;
  const Eigen::VectorXd e = z - b.mean;
  if (config_.covariance_update == CovarianceUpdate::Exact) {
    b.cov = (1.0 - omega) * b.cov + (1.0 - omega) * delta * delta.transpose() + omega * e * e.transpose();
  } else {
    b.cov = b.cov - delta * delta.transpose() + omega * (e * e.transpose() - b.cov);
  }
  enforce_floor(b.cov);
  b.dirty = true;
}

LearnOutcome Mixture::learn_one(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  check_sample(x, y);
  LearnOutcome out;
  const auto k = components_.size();
  std::vector<double> loglik(k);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < k; ++j) {
    loglik[j] = igmm::component_loglik(components_[j], x, y);
    best = std::max(best, loglik[j]);
  }
  if (k == 0 || (config_.allow_creation && best < config_.novelty_threshold)) {
    create(x, y);
    out.created = true;
    out.component = components_.size() - 1;
    ++n_samples_;
    return out;
  }

  std::vector<double> logpost(k);
  for (std::size_t j = 0; j < k; ++j) logpost[j] = std::log(components_[j].mass) + loglik[j];
  const double norm = logsumexp(logpost);
  for (std::size_t j = 0; j < k; ++j) {
    const double w = std::exp(logpost[j] - norm);
    auto& c = components_[j];
    if (!(w > 0.0) || w / (c.mass + w) < config_.update_skip_threshold) continue;
    c.mass += w;
    const double omega = w / c.mass;
    update_block(c.x, x, omega);
    update_block(c.y, y, omega);
    out.updates.emplace_back(j, w);
  }
  for (const auto& [j, w] : out.updates) {
    components_[j].x.refresh();
    components_[j].y.refresh();
  }
  ++n_samples_;
  return out;
}

std::vector<std::size_t> Mixture::prediction_set() const {
  return prediction_set(config_.min_mass_fraction_for_prediction);
}

std::vector<std::size_t> Mixture::prediction_set(double mass_fraction) const {
  if (components_.empty()) throw Error("prediction set of an empty mixture");
  std::vector<std::size_t> order(components_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ca = components_[a];
    const auto& cb = components_[b];
    if (ca.mass != cb.mass) return ca.mass > cb.mass;
    return ca.created_at < cb.created_at;
  });
  const double target = mass_fraction * total_mass() * (1.0 - 1e-12);
  double cum = 0.0;
  std::size_t n = 0;
  while (n < order.size()) {
    cum += components_[order[n]].mass;
    ++n;
    if (cum >= target) break;
  }
  order.resize(n);
  return order;
}

void Mixture::add_collision_value(std::size_t j, double amount) {
  if (!(amount >= 0.0)) throw Error("collision credit must be non-negative");
  components_.at(j).collision_value += amount;
}

namespace {

void write_vec(std::ostream& out, std::string_view key, const Eigen::VectorXd& v) {
  out << key;
  for (Eigen::Index i = 0; i < v.size(); ++i) out << ' ' << text::fmt(v[i]);
  out << '\n';
}

void write_mat(std::ostream& out, std::string_view key, const Eigen::MatrixXd& m) {
  out << key;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << ' ' << text::fmt(m(r, c));
  }
  out << '\n';
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  std::vector<std::string> next(std::string_view key, std::size_t nvalues) {
    std::string line;
    while (std::getline(in_, line)) {
      if (!text::trim(line).empty()) break;
      line.clear();
    }
    if (line.empty()) throw Error("truncated mixture snapshot: expected '" + std::string(key) + "'");
    const auto tok = text::split_ws(line);
    if (tok.empty() || tok[0] != key) throw Error("malformed mixture snapshot: expected '" + std::string(key) + "'");
    if (tok.size() != nvalues + 1) throw Error("malformed mixture snapshot: wrong arity for '" + std::string(key) + "'");
    std::vector<std::string> vals;
    for (std::size_t i = 1; i < tok.size(); ++i) vals.emplace_back(tok[i]);
    return vals;
  }

  Eigen::VectorXd vec(std::string_view key, std::size_t n) {
    const auto v = next(key, n);
    Eigen::VectorXd out(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) out[static_cast<Eigen::Index>(i)] = text::parse_double(v[i]);
    return out;
  }

  Eigen::MatrixXd mat(std::string_view key, std::size_t n) {
    const auto v = next(key, n * n);
    Eigen::MatrixXd out(n, n);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) out(r, c) = text::parse_double(v[r * n + c]);
    }
    return out;
  }

  double scalar(std::string_view key) { return text::parse_double(next(key, 1)[0]); }
  long long integer(std::string_view key) { return text::parse_int(next(key, 1)[0]); }

 private:
  std::istream& in_;
};

}  // namespace

void Mixture::write(std::ostream& out) const {
  out << kSnapshotMagic << ' ' << kSnapshotVersion << '\n';
  out << "dx " << dx_ << '\n';
  out << "dy " << dy_ << '\n';
  out << "novelty_threshold " << text::fmt(config_.novelty_threshold) << '\n';
  write_vec(out, "sigma_ini_x", config_.sigma_ini_x);
  write_vec(out, "sigma_ini_y", config_.sigma_ini_y);
  out << "update_skip_threshold " << text::fmt(config_.update_skip_threshold) << '\n';
  out << "regularization_floor " << text::fmt(config_.regularization_floor) << '\n';
  out << "min_mass_fraction " << text::fmt(config_.min_mass_fraction_for_prediction) << '\n';
  out << "covariance_update " << to_string(config_.covariance_update) << '\n';
  out << "allow_creation " << (config_.allow_creation ? 1 : 0) << '\n';
  out << "n_samples " << n_samples_ << '\n';
  out << "regularizations " << regularizations_ << '\n';
  out << "components " << components_.size() << '\n';
  for (const auto& c : components_) {
    out << "component " << c.created_at << ' ' << text::fmt(c.mass) << ' ' << text::fmt(c.collision_value) << '\n';
    write_vec(out, "mu_x", c.x.mean);
    write_mat(out, "cov_x", c.x.cov);
    write_vec(out, "mu_y", c.y.mean);
    write_mat(out, "cov_y", c.y.cov);
  }
  out << "end\n";
}

Mixture Mixture::read(std::istream& in) {
  LineReader r(in);
  const auto magic = r.next(kSnapshotMagic, 1);
  if (text::parse_int(magic[0]) != kSnapshotVersion) throw Error("mixture snapshot version mismatch: " + magic[0]);
  const auto dx = static_cast<std::size_t>(r.integer("dx"));
  const auto dy = static_cast<std::size_t>(r.integer("dy"));
  Config cfg;
  cfg.novelty_threshold = r.scalar("novelty_threshold");
  cfg.sigma_ini_x = r.vec("sigma_ini_x", dx);
  cfg.sigma_ini_y = r.vec("sigma_ini_y", dy);
  cfg.update_skip_threshold = r.scalar("update_skip_threshold");
  cfg.regularization_floor = r.scalar("regularization_floor");
  cfg.min_mass_fraction_for_prediction = r.scalar("min_mass_fraction");
  cfg.covariance_update = parse_covariance_update(r.next("covariance_update", 1)[0]);
  cfg.allow_creation = r.integer("allow_creation") != 0;
  Mixture m(dx, dy, std::move(cfg));
  m.n_samples_ = static_cast<std::uint64_t>(r.integer("n_samples"));
  m.regularizations_ = static_cast<std::size_t>(r.integer("regularizations"));
  const auto k = static_cast<std::size_t>(r.integer("components"));
  m.components_.reserve(k);
  for (std::size_t j = 0; j < k; ++j) {
    const auto head = r.next("component", 3);
    Component c;
    c.created_at = static_cast<std::uint64_t>(text::parse_int(head[0]));
    c.mass = text::parse_double(head[1]);
    c.collision_value = text::parse_double(head[2]);
    c.x.mean = r.vec("mu_x", dx);
    c.x.cov = r.mat("cov_x", dx);
    c.y.mean = r.vec("mu_y", dy);
    c.y.cov = r.mat("cov_y", dy);
    c.x.refresh();
    c.y.refresh();
    m.components_.push_back(std::move(c));
  }
  r.next("end", 0);
  return m;
}

std::string Mixture::snapshot() const {
  std::ostringstream ss;
  write(ss);
  return ss.str();
}

Mixture Mixture::restore(std::string_view bytes) {
  if (text::trim(bytes).empty()) throw Error("empty mixture snapshot");
  std::istringstream ss{std::string(bytes)};
  return read(ss);
}

}  // namespace sfm::igmm
