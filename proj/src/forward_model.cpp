#include "sfm/forward_model.hpp"


#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "sfm/text.hpp"

namespace sfm {

namespace {

constexpr std::string_view kModelMagic = "sfm-forward-model";
constexpr int kModelVersion = 1;

double logsumexp(const std::vector<double>& v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double a : v) m = std::max(m, a);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double a : v) s += std::exp(a - m);
  return m + std::log(s);
}

}  // namespace

PairOptions ForwardModelConfig::pair_options(const ActionConstants& k) const {
  PairOptions o;
  o.use_action = use_action;
  o.use_proprio = use_proprio;
  o.use_cell_coords = use_cell_coords;
  o.action_scale = {1.0 / k.linear, 1.0 / k.angular};
  o.proprio_scale = o.action_scale;
  return o;
}

void ForwardModelConfig::validate() const {
  if (horizon < 1) throw Error("horizon must be >= 1");
  if (!(novelty_distance > 0.0)) throw Error("novelty distance must be positive");
  if (!(sigma_ini_fraction > 0.0)) throw Error("sigma_ini fraction must be positive");
  if (!(update_skip_threshold >= 0.0)) throw Error("update skip threshold must be >= 0");
  if (!(regularization_floor > 0.0)) throw Error("regularization floor must be positive");
  if (!(mass_fraction > 0.0 && mass_fraction <= 1.0)) throw Error("mass fraction must be in (0, 1]");
  if (warmup_frames < 0) throw Error("warm-up frames must be >= 0");
}

ForwardModel::ForwardModel(ForwardModelConfig config, std::size_t rows, std::size_t cols, ActionConstants actions)
    : config_(config), rows_(rows), cols_(cols), actions_(actions) {
  config_.validate();
  if (rows == 0 || cols == 0) throw Error("forward model grid must be non-empty");
  if (!(actions.linear > 0.0 && actions.angular > 0.0)) throw Error("action constants must be positive");
  options_ = config_.pair_options(actions_);
}

ForwardModel::ForwardModel(ForwardModelConfig config, std::size_t rows, std::size_t cols, ActionConstants actions,
                           FeatureScales scales, igmm::Mixture mixture)
    : ForwardModel(config, rows, cols, actions) {
  if (static_cast<std::size_t>(scales.input.size()) != input_dim() || mixture.dx() != input_dim() ||
      mixture.dy() != 2) {
    throw Error("mixture/scales do not match the feature layout");
  }
  if (!((scales.input.array() > 0.0).all() && (scales.output.array() > 0.0).all())) {
    throw Error("feature scales must be positive");
  }
  scales_ = std::move(scales);
  mixture_ = std::move(mixture);
}

const igmm::Mixture& ForwardModel::mixture() const {
  check_ready();
  return *mixture_;
}

igmm::Mixture& ForwardModel::mixture() {
  check_ready();
  return *mixture_;
}

const FeatureScales& ForwardModel::scales() const {
  check_ready();
  return *scales_;
}

void ForwardModel::check_ready() const {
  if (!mixture_) throw Error("forward model has not finished its warm-up");
}

void ForwardModel::learn(const TrainingPair& pair) {
  if (static_cast<std::size_t>(pair.x.size()) != input_dim()) throw Error("training pair does not match layout");
  if (!pair.x.allFinite() || !pair.y.allFinite()) throw Error("non-finite training pair rejected");
  if (!mixture_) {
    warmup_.push_back(pair);
    const auto needed = static_cast<std::size_t>(config_.warmup_frames) * rows_ * cols_;
    if (warmup_.size() >= needed) initialize_from_buffer();
    return;
  }
  mixture_->learn_one(standardize_input(pair.x), standardize_output(pair.y));
}

void ForwardModel::learn(const std::vector<TrainingPair>& pairs) {
  for (const auto& p : pairs) learn(p);
}

void ForwardModel::finish_warmup() {
  if (!mixture_) initialize_from_buffer();
}

namespace {

// Population std of n evenly spaced coordinates on [0, 1].
double grid_coordinate_std(std::size_t n) {
  if (n < 2) return 1.0;
  const double m = static_cast<double>(n);
  return std::sqrt((m + 1.0) / (12.0 * (m - 1.0)));
}

}  // namespace

void ForwardModel::initialize_from_buffer() {
  const auto dx = input_dim();
  FeatureScales s;
  s.input = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(dx));
  double sq = 0.0;
  for (const auto& p : warmup_) sq += p.x[0] * p.x[0] + p.x[1] * p.x[1];
  double flow_scale = warmup_.empty() ? 1.0 : std::sqrt(sq / (2.0 * static_cast<double>(warmup_.size())));
  if (!(flow_scale > 1e-9)) flow_scale = 1.0;
  s.input[0] = s.input[1] = flow_scale;
  s.output = {flow_scale, flow_scale};

  // Fresh components get a fixed fraction of each feature's nominal spread: one flow-scale
  // unit for flow, one action constant for commands and proprioception, and the spread of
  // evenly spaced grid positions for coordinates.
  Eigen::VectorXd sx = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(dx));
  Eigen::VectorXd sy = Eigen::VectorXd::Ones(2);
  if (options_.use_cell_coords) {
    const auto k = static_cast<Eigen::Index>(dx) - 2;
    sx[k] = grid_coordinate_std(rows_);
    sx[k + 1] = grid_coordinate_std(cols_);
  }
  sx *= config_.sigma_ini_fraction;
  sy *= config_.sigma_ini_fraction;

  igmm::Config mc;
  mc.sigma_ini_x = sx;
  mc.sigma_ini_y = sy;
  mc.novelty_threshold = igmm::calibrated_novelty_threshold(config_.novelty_distance, sx, sy);
  mc.update_skip_threshold = config_.update_skip_threshold;
  mc.regularization_floor = config_.regularization_floor;
  mc.min_mass_fraction_for_prediction = config_.mass_fraction;
  mc.covariance_update = config_.covariance_update;
  scales_ = s;
  mixture_.emplace(dx, 2, std::move(mc));
  auto buffered = std::move(warmup_);
  warmup_.clear();
  for (const auto& p : buffered) mixture_->learn_one(standardize_input(p.x), standardize_output(p.y));
}

Eigen::VectorXd ForwardModel::standardize_input(const Eigen::VectorXd& x) const {
  if (static_cast<std::size_t>(x.size()) != input_dim()) throw Error("input does not match feature layout");
  return x.cwiseQuotient(scales().input);
}

Eigen::VectorXd ForwardModel::standardize_output(const Eigen::Vector2d& y) const {
  return y.cwiseQuotient(scales().output);
}

Eigen::VectorXd ForwardModel::features(const SensorimotorFrame& frame, std::size_t row, std::size_t col) const {
  return cell_features(frame.flow.at(row, col), frame.action, frame.proprio, row, col, rows_, cols_, options_);
}

std::vector<std::size_t> ForwardModel::prediction_set() const { return mixture().prediction_set(); }

std::vector<double> ForwardModel::input_scores(const Eigen::VectorXd& xs,
                                               const std::vector<std::size_t>& candidates) const {
  const auto& m = *mixture_;
  std::vector<double> s(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto j = candidates[i];
    s[i] = std::log(m[j].mass) + igmm::component_loglik(m[j], xs);
  }
  return s;
}

CellPrediction ForwardModel::predict_cell(const Eigen::VectorXd& x) const {
  return predict_cell(x, prediction_set());
}

CellPrediction ForwardModel::predict_cell(const Eigen::VectorXd& x, const std::vector<std::size_t>& candidates) const {
  check_ready();
  if (candidates.empty()) throw Error("empty prediction set");
  const auto xs = standardize_input(x);
  if (!xs.allFinite()) throw Error("non-finite input");
  const auto scores = input_scores(xs, candidates);
  const auto& m = *mixture_;
  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const auto& ci = m[candidates[i]];
    const auto& cb = m[candidates[best]];
    if (scores[i] > scores[best] ||
        (scores[i] == scores[best] &&
         (ci.mass > cb.mass || (ci.mass == cb.mass && ci.created_at < cb.created_at)))) {
      best = i;
    }
  }
  CellPrediction out;
  out.component = candidates[best];
  out.posterior = std::exp(scores[best] - logsumexp(scores));
  out.delta = m[out.component].y.mean.cwiseProduct(scales_->output);
  return out;
}

FlowPrediction ForwardModel::predict_grid(const SensorimotorFrame& frame) const {
  check_ready();
  if (frame.flow.rows() != rows_ || frame.flow.cols() != cols_) throw Error("frame grid shape differs from model");
  const auto candidates = prediction_set();
  FlowPrediction out;
  std::vector<FlowVector> cells(rows_ * cols_);
  out.map_component.resize(cells.size());
  out.map_posterior.resize(cells.size());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) {
      const auto i = r * cols_ + c;
      const auto p = predict_cell(features(frame, r, c), candidates);
      const auto& f = frame.flow[i];
      cells[i] = {f.u + p.delta.x(), f.v + p.delta.y()};
      out.map_component[i] = p.component;
      out.map_posterior[i] = p.posterior;
    }
  }
  out.grid = FlowGrid(rows_, cols_, std::move(cells));
  return out;
}

double ForwardModel::posterior_predictive_loglik(const Eigen::VectorXd& x, const Eigen::Vector2d& y_true) const {
  return posterior_predictive_loglik(x, y_true, prediction_set());
}

double ForwardModel::posterior_predictive_loglik(const Eigen::VectorXd& x, const Eigen::Vector2d& y_true,
                                                 const std::vector<std::size_t>& candidates) const {
  check_ready();
  if (candidates.empty()) throw Error("empty prediction set");
  if (!y_true.allFinite()) throw Error("non-finite target");
  const auto xs = standardize_input(x);
  if (!xs.allFinite()) throw Error("non-finite input");
  const Eigen::VectorXd ys = standardize_output(y_true);
  const auto scores = input_scores(xs, candidates);
  std::vector<double> joint(scores.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    joint[i] = scores[i] + (*mixture_)[candidates[i]].y.logpdf(ys);
  }
  const double log_jacobian = std::log(scales_->output.x()) + std::log(scales_->output.y());
  return logsumexp(joint) - logsumexp(scores) - log_jacobian;
}

std::vector<std::size_t> ForwardModel::active_components(const Eigen::VectorXd& x, std::size_t k,
                                                         double mass_fraction) const {
  check_ready();
  if (k == 0) return {};
  const auto candidates = mixture_->prediction_set(mass_fraction);
  const auto xs = standardize_input(x);
  if (!xs.allFinite()) throw Error("non-finite input");
  const auto scores = input_scores(xs, candidates);
  const auto& m = *mixture_;
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto n = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (scores[a] != scores[b]) return scores[a] > scores[b];
                      const auto& ca = m[candidates[a]];
                      const auto& cb = m[candidates[b]];
                      if (ca.mass != cb.mass) return ca.mass > cb.mass;
                      return ca.created_at < cb.created_at;
                    });
  std::vector<std::size_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = candidates[order[i]];
  return out;
}

void ForwardModel::write(std::ostream& out) const {
  check_ready();
  const auto& s = *scales_;
  out << kModelMagic << ' ' << kModelVersion << '\n';
  out << "horizon " << config_.horizon << '\n';
  out << "rows " << rows_ << '\n';
  out << "cols " << cols_ << '\n';
  out << "action_linear " << text::fmt(actions_.linear) << '\n';
  out << "action_angular " << text::fmt(actions_.angular) << '\n';
  out << "use_action " << (config_.use_action ? 1 : 0) << '\n';
  out << "use_proprio " << (config_.use_proprio ? 1 : 0) << '\n';
  out << "use_cell_coords " << (config_.use_cell_coords ? 1 : 0) << '\n';
  out << "novelty_distance " << text::fmt(config_.novelty_distance) << '\n';
  out << "sigma_ini_fraction " << text::fmt(config_.sigma_ini_fraction) << '\n';
  out << "warmup_frames " << config_.warmup_frames << '\n';
  out << "input_scale";
  for (Eigen::Index i = 0; i < s.input.size(); ++i) out << ' ' << text::fmt(s.input[i]);
  out << '\n';
  out << "output_scale " << text::fmt(s.output.x()) << ' ' << text::fmt(s.output.y()) << '\n';
  mixture_->write(out);
}

ForwardModel ForwardModel::read(std::istream& in) {
  auto expect = [&](std::string_view key, std::size_t n) {
    std::string line;
    if (!std::getline(in, line)) throw Error("truncated model snapshot: expected '" + std::string(key) + "'");
    const auto tok = text::split_ws(line);
    if (tok.size() != n + 1 || tok[0] != key) {
      throw Error("malformed model snapshot: expected '" + std::string(key) + "'");
    }
    std::vector<std::string> v;
    for (std::size_t i = 1; i < tok.size(); ++i) v.emplace_back(tok[i]);
    return v;
  };
  const auto magic = expect(kModelMagic, 1);
  if (text::parse_int(magic[0]) != kModelVersion) throw Error("model snapshot version mismatch: " + magic[0]);
  ForwardModelConfig cfg;
  cfg.horizon = static_cast<int>(text::parse_int(expect("horizon", 1)[0]));
  const auto rows = static_cast<std::size_t>(text::parse_int(expect("rows", 1)[0]));
  const auto cols = static_cast<std::size_t>(text::parse_int(expect("cols", 1)[0]));
  ActionConstants k;
  k.linear = text::parse_double(expect("action_linear", 1)[0]);
  k.angular = text::parse_double(expect("action_angular", 1)[0]);
  cfg.use_action = text::parse_int(expect("use_action", 1)[0]) != 0;
  cfg.use_proprio = text::parse_int(expect("use_proprio", 1)[0]) != 0;
  cfg.use_cell_coords = text::parse_int(expect("use_cell_coords", 1)[0]) != 0;
  cfg.novelty_distance = text::parse_double(expect("novelty_distance", 1)[0]);
  cfg.sigma_ini_fraction = text::parse_double(expect("sigma_ini_fraction", 1)[0]);
  cfg.warmup_frames = static_cast<int>(text::parse_int(expect("warmup_frames", 1)[0]));
  const auto dx = cfg.pair_options(k).input_dim();
  FeatureScales s;
  const auto in_scale = expect("input_scale", dx);
  s.input.resize(static_cast<Eigen::Index>(dx));
  for (std::size_t i = 0; i < dx; ++i) s.input[static_cast<Eigen::Index>(i)] = text::parse_double(in_scale[i]);
  const auto out_scale = expect("output_scale", 2);
  s.output = {text::parse_double(out_scale[0]), text::parse_double(out_scale[1])};
  auto mixture = igmm::Mixture::read(in);
  const auto& mc = mixture.config();
  cfg.update_skip_threshold = mc.update_skip_threshold;
  cfg.regularization_floor = mc.regularization_floor;
  cfg.mass_fraction = mc.min_mass_fraction_for_prediction;
  cfg.covariance_update = mc.covariance_update;
  return ForwardModel(cfg, rows, cols, k, std::move(s), std::move(mixture));
}

std::string ForwardModel::snapshot() const {
  std::ostringstream ss;
  write(ss);
  return ss.str();
}

ForwardModel ForwardModel::restore(std::string_view bytes) {
  if (text::trim(bytes).empty()) throw Error("empty model snapshot");
  std::istringstream ss{std::string(bytes)};
  return read(ss);
}

}  // namespace sfm
