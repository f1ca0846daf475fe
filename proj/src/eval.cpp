#include "sfm/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

#include <json.hpp>

#include "sfm/text.hpp"

namespace sfm::eval {

Eigen::Vector2d naive_predict(const Eigen::VectorXd&) { return Eigen::Vector2d::Zero(); }

double aepe(const std::vector<Eigen::Vector2d>& pred, const std::vector<Eigen::Vector2d>& truth) {
  if (pred.size() != truth.size()) throw Error("prediction and truth lengths differ");
  if (pred.empty()) throw Error("AEPE of an empty sequence");
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += (pred[i] - truth[i]).norm();
  return s / static_cast<double>(pred.size());
}

namespace {

double angular_error(const Eigen::Vector2d& a, const Eigen::Vector2d& b, double s) {
  const Eigen::Vector3d ha(a.x(), a.y(), s);
  const Eigen::Vector3d hb(b.x(), b.y(), s);
  const double c = ha.dot(hb) / (ha.norm() * hb.norm());
  return std::acos(std::clamp(c, -1.0, 1.0));
}

}  // namespace

double aae(const std::vector<Eigen::Vector2d>& pred, const std::vector<Eigen::Vector2d>& truth, double stabilizer) {
  if (!(stabilizer > 0.0)) throw Error("AAE stabilizer must be positive");
  if (pred.size() != truth.size()) throw Error("prediction and truth lengths differ");
  if (pred.empty()) throw Error("AAE of an empty sequence");
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += angular_error(pred[i], truth[i], stabilizer);
  return s / static_cast<double>(pred.size());
}

NaiveDensity::NaiveDensity(double variance) : variance_(variance) {
  if (!(variance > 0.0) || !std::isfinite(variance)) throw Error("naive variance must be positive");
}

NaiveDensity NaiveDensity::fit(const std::vector<TrainingPair>& pairs) { return fit(pairs, 0, pairs.size()); }

NaiveDensity NaiveDensity::fit(const std::vector<TrainingPair>& pairs, std::size_t begin, std::size_t end) {
  end = std::min(end, pairs.size());
  if (begin >= end) throw Error("cannot fit the naive density without pairs");
  double sq = 0.0;
  for (std::size_t i = begin; i < end; ++i) sq += pairs[i].y.squaredNorm();
  return NaiveDensity(sq / (2.0 * static_cast<double>(end - begin)));
}

double NaiveDensity::logpdf(const Eigen::Vector2d& y) const {
  if (!fitted()) throw Error("naive density is not fitted");
  return -std::log(2.0 * std::numbers::pi * variance_) - 0.5 * y.squaredNorm() / variance_;
}

std::vector<double> loglik_ratios(const ForwardModel& fm, const std::vector<TrainingPair>& pairs,
                                  const NaiveDensity& naive, std::size_t begin, std::size_t end) {
  if (!naive.fitted()) throw Error("naive density is not fitted");
  end = std::min(end, pairs.size());
  const auto candidates = fm.prediction_set();
  std::vector<double> out;
  out.reserve(end > begin ? end - begin : 0);
  for (std::size_t i = begin; i < end; ++i) {
    out.push_back(fm.posterior_predictive_loglik(pairs[i].x, pairs[i].y, candidates) - naive.logpdf(pairs[i].y));
  }
  return out;
}

double loglik_ratio(const ForwardModel& fm, const std::vector<TrainingPair>& pairs, const NaiveDensity& naive) {
  if (pairs.empty()) throw Error("likelihood ratio needs pairs");
  const auto r = loglik_ratios(fm, pairs, naive);
  double s = 0.0;
  for (double v : r) s += v;
  return s / static_cast<double>(r.size());
}

BootstrapInterval bootstrap_mean(const std::vector<double>& values, std::size_t resamples, double confidence,
                                 std::uint64_t seed) {
  if (values.empty()) throw Error("bootstrap of an empty sample");
  if (resamples == 0) throw Error("bootstrap needs resamples");
  if (!(confidence > 0.0 && confidence < 1.0)) throw Error("confidence must be in (0,1)");
  const auto n = values.size();
  BootstrapInterval out;
  for (double v : values) out.mean += v;
  out.mean /= static_cast<double>(n);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<double> means(resamples);
  for (auto& m : means) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += values[pick(rng)];
    m = s / static_cast<double>(n);
  }
  std::sort(means.begin(), means.end());
  const double a = 0.5 * (1.0 - confidence);
  const auto at = [&](double q) {
    const auto k = static_cast<std::size_t>(std::floor(q * static_cast<double>(resamples - 1)));
    return means[std::min(k, resamples - 1)];
  };
  out.lower = at(a);
  out.upper = at(1.0 - a);
  return out;
}

namespace {

// Hartigan's dip on sorted data, in units of 1/n (halved at the end). The search narrows a
// modal interval [low, high] until the greatest convex minorant left of it and the least
// concave majorant right of it stop improving the fit.
double sorted_dip(const std::vector<double>& x) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  if (n < 2 || x.front() == x.back()) return 0.0;
  std::ptrdiff_t low = 0;
  std::ptrdiff_t high = n - 1;
  double dip = 1.0;

  // Previous vertex of the convex minorant ending at j; next vertex of the concave majorant from k.
  std::vector<std::ptrdiff_t> prev_gcm(static_cast<std::size_t>(n));
  std::vector<std::ptrdiff_t> next_lcm(static_cast<std::size_t>(n));
  auto X = [&](std::ptrdiff_t i) { return x[static_cast<std::size_t>(i)]; };
  auto at = [](std::vector<std::ptrdiff_t>& v, std::ptrdiff_t i) -> std::ptrdiff_t& {
    return v[static_cast<std::size_t>(i)];
  };
  at(prev_gcm, low) = low;
  for (std::ptrdiff_t j = low + 1; j <= high; ++j) {
    at(prev_gcm, j) = j - 1;
    for (;;) {
      const auto a = at(prev_gcm, j);
      const auto b = at(prev_gcm, a);
      if (a == low || (X(j) - X(a)) * static_cast<double>(a - b) < (X(a) - X(b)) * static_cast<double>(j - a)) break;
      at(prev_gcm, j) = b;
    }
  }
  at(next_lcm, high) = high;
  for (std::ptrdiff_t k = high - 1; k >= low; --k) {
    at(next_lcm, k) = k + 1;
    for (;;) {
      const auto a = at(next_lcm, k);
      const auto b = at(next_lcm, a);
      if (a == high || (X(k) - X(a)) * static_cast<double>(a - b) < (X(a) - X(b)) * static_cast<double>(k - a)) break;
      at(next_lcm, k) = b;
    }
  }

  std::vector<std::ptrdiff_t> gcm;
  std::vector<std::ptrdiff_t> lcm;
  for (;;) {
    gcm.assign(1, high);
    while (gcm.back() > low) gcm.push_back(at(prev_gcm, gcm.back()));
    lcm.assign(1, low);
    while (lcm.back() < high) lcm.push_back(at(next_lcm, lcm.back()));
    const auto n_gcm = static_cast<std::ptrdiff_t>(gcm.size()) - 1;
    const auto n_lcm = static_cast<std::ptrdiff_t>(lcm.size()) - 1;
    auto G = [&](std::ptrdiff_t i) { return gcm[static_cast<std::size_t>(i)]; };
    auto L = [&](std::ptrdiff_t i) { return lcm[static_cast<std::size_t>(i)]; };

    // Largest vertical gap between the two hulls and where it occurs.
    std::ptrdiff_t ig = n_gcm;
    std::ptrdiff_t ih = n_lcm;
    double d = 0.0;
    if (n_gcm != 1 || n_lcm != 1) {
      std::ptrdiff_t ix = n_gcm - 1;
      std::ptrdiff_t iv = 1;
      do {
        const auto g = G(ix);
        const auto l = L(iv);
        if (g > l) {
          const auto g1 = G(ix + 1);
          const double dx = static_cast<double>(l - g1 + 1) -
                            (X(l) - X(g1)) * static_cast<double>(g - g1) / (X(g) - X(g1));
          ++iv;
          if (dx >= d) {
            d = dx;
            ig = ix + 1;
            ih = iv - 1;
          }
        } else {
          const auto l1 = L(iv - 1);
          const double dx = (X(g) - X(l1)) * static_cast<double>(l - l1) / (X(l) - X(l1)) -
                            static_cast<double>(g - l1 - 1);
          --ix;
          if (dx >= d) {
            d = dx;
            ig = ix + 1;
            ih = iv;
          }
        }
        ix = std::max<std::ptrdiff_t>(ix, 0);
        iv = std::min(iv, n_lcm);
      } while (G(ix) != L(iv));
    } else {
      d = 1.0;
    }
    if (d < dip) break;

    // Fit of the hulls outside the new modal interval.
    double dip_l = 0.0;
    for (std::ptrdiff_t j = ig; j < n_gcm; ++j) {
      double worst = 1.0;
      const auto a = G(j + 1);
      const auto b = G(j);
      if (b - a > 1 && X(b) != X(a)) {
        const double c = static_cast<double>(b - a) / (X(b) - X(a));
        for (auto k = a; k <= b; ++k) worst = std::max(worst, static_cast<double>(k - a + 1) - (X(k) - X(a)) * c);
      }
      dip_l = std::max(dip_l, worst);
    }
    double dip_u = 0.0;
    for (std::ptrdiff_t j = ih; j < n_lcm; ++j) {
      double worst = 1.0;
      const auto a = L(j);
      const auto b = L(j + 1);
      if (b - a > 1 && X(b) != X(a)) {
        const double c = static_cast<double>(b - a) / (X(b) - X(a));
        for (auto k = a; k <= b; ++k) worst = std::max(worst, (X(k) - X(a)) * c - static_cast<double>(k - a - 1));
      }
      dip_u = std::max(dip_u, worst);
    }
    dip = std::max({dip, dip_l, dip_u});
    if (low == G(ig) && high == L(ih)) break;
    low = G(ig);
    high = L(ih);
  }
  return dip / (2.0 * static_cast<double>(n));
}

}  // namespace

double dip_statistic(std::vector<double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) throw Error("dip statistic of non-finite data");
  }
  std::sort(values.begin(), values.end());
  return sorted_dip(values);
}

DipTest dip_test(const std::vector<double>& values, std::size_t resamples, std::uint64_t seed) {
  if (values.size() < 4) throw Error("dip test needs at least 4 values");
  if (resamples == 0) throw Error("dip test needs resamples");
  DipTest out;
  out.dip = dip_statistic(values);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> u(values.size());
  std::size_t at_least = 0;
  for (std::size_t r = 0; r < resamples; ++r) {
    for (auto& v : u) v = unit(rng);
    if (dip_statistic(u) >= out.dip) ++at_least;
  }
  out.p_value = static_cast<double>(at_least + 1) / static_cast<double>(resamples + 1);
  return out;
}

std::size_t split_index(std::size_t n_pairs, std::size_t cells, double train_fraction) {
  if (cells == 0) throw Error("grid has no cells");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw Error("train fraction must be in (0,1)");
  const std::size_t frames = n_pairs / cells;
  return static_cast<std::size_t>(train_fraction * static_cast<double>(frames)) * cells;
}

MetricReport evaluate(const ForwardModel& fm, const std::vector<TrainingPair>& pairs, std::size_t begin,
                      std::size_t end, const NaiveDensity& naive, double aae_stabilizer,
                      std::vector<PredictionRecord>* records) {
  end = std::min(end, pairs.size());
  if (begin >= end) throw Error("no evaluation pairs");
  const auto candidates = fm.prediction_set();
  std::vector<Eigen::Vector2d> pred;
  std::vector<Eigen::Vector2d> zero;
  std::vector<Eigen::Vector2d> truth;
  double ratio = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    const auto& p = pairs[i];
    const auto c = fm.predict_cell(p.x, candidates);
    const double ll = fm.posterior_predictive_loglik(p.x, p.y, candidates);
    const double nl = naive.logpdf(p.y);
    ratio += ll - nl;
    pred.push_back(c.delta);
    zero.push_back(naive_predict(p.x));
    truth.push_back(p.y);
    if (records) records->push_back({p.t, p.row, p.col, p.x, c.delta, p.y, c.component, c.posterior, ll, nl});
  }
  MetricReport r;
  r.horizon = fm.horizon();
  r.with_action = fm.config().use_action;
  r.aepe_model = aepe(pred, truth);
  r.aepe_naive = aepe(zero, truth);
  r.relative_reduction = r.aepe_naive > 0.0 ? 1.0 - r.aepe_model / r.aepe_naive : 0.0;
  r.aae_model = aae(pred, truth, aae_stabilizer);
  r.aae_naive = aae(zero, truth, aae_stabilizer);
  r.n_pairs = end - begin;
  r.mean_loglik_ratio = ratio / static_cast<double>(r.n_pairs);
  const auto& m = fm.mixture();
  r.component_count = m.size();
  r.prediction_set_size = candidates.size();
  double mass = 0.0;
  for (auto j : candidates) mass += m[j].mass;
  r.mass_in_prediction_set = mass / m.total_mass();
  return r;
}

AblationResult ablation_run(const StreamLog& log, int horizon, bool with_action, const EvalConfig& config) {
  ForwardModelConfig mc = config.model;
  mc.horizon = horizon;
  mc.use_action = with_action && config.model.use_action;
  mc.use_proprio = with_action && config.model.use_proprio;
  mc.validate();
  log.validate();
  ForwardModel fm(mc, log.header.rows, log.header.cols, log.header.actions);
  const auto pairs = make_pairs(log, horizon, fm.pair_options());
  const std::size_t cells = log.header.rows * log.header.cols;
  const std::size_t split = split_index(pairs.size(), cells, config.train_fraction);
  if (split == 0 || split >= pairs.size()) throw Error("log too short for a train/evaluation split");
  for (std::size_t i = 0; i < split; ++i) fm.learn(pairs[i]);
  fm.finish_warmup();
  const auto naive = NaiveDensity::fit(pairs, 0, split);
  auto report = evaluate(fm, pairs, split, pairs.size(), naive, config.aae_stabilizer);
  auto ratios = loglik_ratios(fm, pairs, naive, split, pairs.size());
  return {report, std::move(fm), std::move(ratios)};
}

std::vector<double> default_novelty_grid() { return {1.5, 2.0, 2.5, 3.0, 3.5, 4.0}; }

std::vector<SweepPoint> novelty_sweep(const StreamLog& log, int horizon, const std::vector<double>& distances,
                                      const EvalConfig& config) {
  std::vector<SweepPoint> out;
  for (double d : distances) {
    EvalConfig c = config;
    c.model.novelty_distance = d;
    SweepPoint p;
    p.novelty_distance = d;
    p.with_action = ablation_run(log, horizon, true, c).report;
    p.without_action = ablation_run(log, horizon, false, c).report;
    out.push_back(p);
  }
  return out;
}

bool Region::contains(const FlowVector& f) const {
  return f.u >= u_min && f.u < u_max && f.v >= v_min && f.v < v_max;
}

std::vector<DistributionRow> export_distributions(const StreamLog& log, const std::vector<Region>& regions,
                                                  const std::vector<int>& horizons) {
  for (int h : horizons) {
    if (h < 1) throw Error("horizons must be >= 1");
  }
  std::vector<DistributionRow> rows;
  const auto n = log.frames.size();
  for (int h : horizons) {
    const auto T = static_cast<std::size_t>(h);
    for (std::size_t i = T; i < n; ++i) {
      const auto& src = log.frames[i - T];
      const auto& dst = log.frames[i];
      for (std::size_t r = 0; r < log.header.rows; ++r) {
        for (std::size_t c = 0; c < log.header.cols; ++c) {
          const auto& a = src.flow.at(r, c);
          const auto& b = dst.flow.at(r, c);
          for (std::size_t k = 0; k < regions.size(); ++k) {
            if (!regions[k].contains(a)) continue;
            rows.push_back({k, h, src.action.kind, b.u - a.u, b.v - a.v, r, c});
          }
        }
      }
    }
  }
  return rows;
}

void write_distributions(std::ostream& out, const std::vector<DistributionRow>& rows) {
  out << "region,T,action,du,dv,row,col\n";
  for (const auto& r : rows) {
    out << r.region << ',' << r.horizon << ',' << to_string(r.action) << ',' << text::fmt(r.du) << ','
        << text::fmt(r.dv) << ',' << r.row << ',' << r.col << '\n';
  }
}

void write_predictions(std::ostream& out, const std::vector<PredictionRecord>& records) {
  out << "t row col x pred_du pred_dv true_du true_dv component posterior model_loglik naive_loglik\n";
  for (const auto& r : records) {
    out << r.t << ' ' << r.row << ' ' << r.col << ' ';
    for (Eigen::Index i = 0; i < r.x.size(); ++i) out << (i ? "," : "") << text::fmt(r.x[i]);
    out << ' ' << text::fmt(r.predicted.x()) << ' ' << text::fmt(r.predicted.y()) << ' ' << text::fmt(r.truth.x())
        << ' ' << text::fmt(r.truth.y()) << ' ' << r.component << ' ' << text::fmt(r.posterior) << ' '
        << text::fmt(r.model_loglik) << ' ' << text::fmt(r.naive_loglik) << '\n';
  }
}

void write_report_text(std::ostream& out, const MetricReport& r) {
  out << "horizon " << r.horizon << '\n'
      << "with_action " << (r.with_action ? "yes" : "no") << '\n'
      << "pairs " << r.n_pairs << '\n'
      << "components " << r.component_count << '\n'
      << "prediction_set " << r.prediction_set_size << " (" << text::fmt(r.mass_in_prediction_set) << " of mass)\n"
      << "aepe_model " << text::fmt(r.aepe_model) << '\n'
      << "aepe_naive " << text::fmt(r.aepe_naive) << '\n'
      << "relative_reduction " << text::fmt(r.relative_reduction) << '\n'
      << "aae_model " << text::fmt(r.aae_model) << '\n'
      << "aae_naive " << text::fmt(r.aae_naive) << '\n'
      << "mean_loglik_ratio " << text::fmt(r.mean_loglik_ratio) << '\n';
}

std::string report_json(const MetricReport& r) {
  nlohmann::ordered_json j;
  j["horizon"] = r.horizon;
  j["with_action"] = r.with_action;
  j["n_pairs"] = r.n_pairs;
  j["component_count"] = r.component_count;
  j["prediction_set_size"] = r.prediction_set_size;
  j["mass_in_prediction_set"] = r.mass_in_prediction_set;
  j["aepe_model"] = r.aepe_model;
  j["aepe_naive"] = r.aepe_naive;
  j["relative_reduction"] = r.relative_reduction;
  j["aae_model"] = r.aae_model;
  j["aae_naive"] = r.aae_naive;
  j["mean_loglik_ratio"] = r.mean_loglik_ratio;
  return j.dump(2) + "\n";
}

void write_sweep(std::ostream& out, const std::vector<SweepPoint>& sweep) {
  out << "novelty_distance components_action reduction_action loglik_ratio_action components_flow_only "
         "reduction_flow_only loglik_ratio_flow_only\n";
  for (const auto& p : sweep) {
    out << text::fmt(p.novelty_distance) << ' ' << p.with_action.component_count << ' '
        << text::fmt(p.with_action.relative_reduction) << ' ' << text::fmt(p.with_action.mean_loglik_ratio) << ' '
        << p.without_action.component_count << ' ' << text::fmt(p.without_action.relative_reduction) << ' '
        << text::fmt(p.without_action.mean_loglik_ratio) << '\n';
  }
}

}  // namespace sfm::eval
