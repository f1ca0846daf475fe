// Acceptance gate: one PASS/FAIL line per criterion. Exit status is nonzero if any fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <Eigen/Dense>

#include "sfm/alignment.hpp"
#include "sfm/collision.hpp"
#include "sfm/eval.hpp"
#include "sfm/forward_model.hpp"
#include "sfm/igmm.hpp"
#include "sfm/simulator.hpp"
#include "sfm/text.hpp"

namespace fs = std::filesystem;
using namespace sfm;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void verdict(int id, bool ok, const std::string& detail) {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << ": " << detail << std::endl;
  if (!ok) ++failures;
}

std::string num(double v, int precision = 4) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

// ---- 1 ---------------------------------------------------------------------------------

struct Em {
  std::vector<Eigen::Vector2d> mean;
  std::vector<Eigen::Matrix2d> cov;
  std::vector<double> weight;
};

// Full-covariance batch EM, started from a farthest-point seeding of the data.
Em batch_em(const std::vector<Eigen::Vector2d>& data, int k) {
  Em m;
  m.mean.push_back(data.front());
  while (static_cast<int>(m.mean.size()) < k) {
    double far = -1.0;
    Eigen::Vector2d pick = data.front();
    for (const auto& p : data) {
      double d = 1e300;
      for (const auto& c : m.mean) d = std::min(d, (p - c).squaredNorm());
      if (d > far) {
        far = d;
        pick = p;
      }
    }
    m.mean.push_back(pick);
  }
  m.cov.assign(k, Eigen::Matrix2d::Identity());
  m.weight.assign(k, 1.0 / k);
  const auto n = data.size();
  std::vector<double> r(n * k);
  double prev = -1e300;
  for (int it = 0; it < 1000; ++it) {
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double norm = 0.0;
      for (int j = 0; j < k; ++j) {
        const Eigen::Vector2d d = data[i] - m.mean[j];
        const double q = d.dot(m.cov[j].inverse() * d);
        const double p = m.weight[j] * std::exp(-0.5 * q) / (2.0 * M_PI * std::sqrt(m.cov[j].determinant()));
        r[i * k + j] = p;
        norm += p;
      }
      for (int j = 0; j < k; ++j) r[i * k + j] /= norm;
      ll += std::log(norm);
    }
    for (int j = 0; j < k; ++j) {
      double w = 0.0;
      Eigen::Vector2d mu = Eigen::Vector2d::Zero();
      for (std::size_t i = 0; i < n; ++i) {
        w += r[i * k + j];
        mu += r[i * k + j] * data[i];
      }
      mu /= w;
      Eigen::Matrix2d c = Eigen::Matrix2d::Zero();
      for (std::size_t i = 0; i < n; ++i) c += r[i * k + j] * (data[i] - mu) * (data[i] - mu).transpose();
      m.mean[j] = mu;
      m.cov[j] = c / w;
      m.weight[j] = w / static_cast<double>(n);
    }
    if (std::abs(ll - prev) < 1e-10 * std::abs(ll)) break;
    prev = ll;
  }
  return m;
}

void criterion_1() {
  const auto t0 = Clock::now();
  const std::array<Eigen::Vector2d, 3> mu{Eigen::Vector2d(0, 0), Eigen::Vector2d(8, 0), Eigen::Vector2d(0, 8)};
  const std::array<Eigen::Vector2d, 3> sd{Eigen::Vector2d(1.0, 0.7), Eigen::Vector2d(0.8, 1.2), Eigen::Vector2d(1.0, 1.0)};
  const std::array<double, 3> w{0.5, 0.3, 0.2};
  std::mt19937_64 rng(42);
  std::discrete_distribution<int> pick(w.begin(), w.end());
  std::normal_distribution<double> g;
  std::vector<Eigen::Vector2d> data(3000);
  for (auto& p : data) {
    const int j = pick(rng);
    p = mu[j] + Eigen::Vector2d(sd[j].x() * g(rng), sd[j].y() * g(rng));
  }

  igmm::Config cfg;
  cfg.sigma_ini_x = Eigen::VectorXd::Constant(1, 1.0);
  cfg.sigma_ini_y = Eigen::VectorXd::Constant(1, 1.0);
  // A joint 2-D radius of 5 leaves an expected 3000 * exp(-12.5) ~ 0.01 in-cluster samples
  // flagged as novel, so any extra component is a learner defect rather than tail noise.
  cfg.novelty_threshold = igmm::calibrated_novelty_threshold(5.0, cfg.sigma_ini_x, cfg.sigma_ini_y);
  igmm::Mixture mix(1, 1, cfg);
  for (const auto& p : data) mix.learn_one(Eigen::VectorXd::Constant(1, p.x()), Eigen::VectorXd::Constant(1, p.y()));
  const double elapsed = seconds_since(t0);

  const auto em = batch_em(data, 3);
  // Components holding at least 1% of the mass count as recovered.
  std::vector<std::size_t> major;
  for (std::size_t j = 0; j < mix.size(); ++j) {
    if (mix.prior(j) >= 0.01) major.push_back(j);
  }
  bool ok = major.size() == 3;
  double worst_mean = 0.0;
  double worst_mass = 0.0;
  std::vector<bool> used(3, false);
  for (auto j : major) {
    const Eigen::Vector2d m(mix[j].x.mean[0], mix[j].y.mean[0]);
    int best = 0;
    for (int k = 1; k < 3; ++k) {
      if ((em.mean[k] - m).norm() < (em.mean[best] - m).norm()) best = k;
    }
    ok = ok && !used[best];
    used[best] = true;
    const Eigen::Vector2d sigma = em.cov[best].diagonal().cwiseSqrt();
    worst_mean = std::max(worst_mean, ((m - em.mean[best]).cwiseAbs().cwiseQuotient(sigma)).maxCoeff());
    worst_mass = std::max(worst_mass, std::abs(mix.prior(j) - em.weight[best]) / em.weight[best]);
  }
  ok = ok && worst_mean <= 0.1 && worst_mass <= 0.05 && elapsed < 5.0;
  verdict(1, ok,
          "components>=1% " + std::to_string(major.size()) + " (total " + std::to_string(mix.size()) +
              "), max mean offset " + num(worst_mean) + " sd (<=0.1), max relative mass error " + num(worst_mass) +
              " (<=0.05), " + num(elapsed, 3) + " s (<5)");
}

// ---- 2 ---------------------------------------------------------------------------------

void criterion_2() {
  igmm::Config cfg;
  cfg.sigma_ini_x = Eigen::Vector2d(0.8, 0.8);
  cfg.sigma_ini_y = Eigen::VectorXd::Constant(1, 0.5);
  cfg.novelty_threshold = igmm::calibrated_novelty_threshold(3.0, cfg.sigma_ini_x, cfg.sigma_ini_y);
  cfg.update_skip_threshold = 0.0;
  cfg.regularization_floor = 1e-12;
  igmm::Mixture mix(2, 1, cfg);

  struct Absorbed {
    Eigen::VectorXd x, y;
    double w;
  };
  std::vector<std::vector<Absorbed>> history;
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> cluster(0, 3);
  for (int i = 0; i < 2000; ++i) {
    const int c = cluster(rng);
    Eigen::VectorXd x(2), y(1);
    x << 4.0 * c + g(rng), (c % 2) * 3.0 + 0.5 * g(rng);
    y << -2.0 * c + 0.7 * g(rng);
    const auto out = mix.learn_one(x, y);
    if (out.created) history.push_back({{x, y, 1.0}});
    for (const auto& [j, wj] : out.updates) history[j].push_back({x, y, wj});
  }

  // Closed form of the weighted-scatter recursion: the fresh covariance enters with unit weight.
  double worst = 0.0;
  for (std::size_t j = 0; j < mix.size(); ++j) {
    const auto& h = history[j];
    double m = 0.0;
    Eigen::VectorXd mx = Eigen::VectorXd::Zero(2), my = Eigen::VectorXd::Zero(1);
    for (const auto& a : h) {
      m += a.w;
      mx += a.w * a.x;
      my += a.w * a.y;
    }
    mx /= m;
    my /= m;
    Eigen::MatrixXd sx = cfg.sigma_ini_x.array().square().matrix().asDiagonal();
    Eigen::MatrixXd sy = cfg.sigma_ini_y.array().square().matrix().asDiagonal();
    for (const auto& a : h) {
      sx += a.w * (a.x - mx) * (a.x - mx).transpose();
      sy += a.w * (a.y - my) * (a.y - my).transpose();
    }
    sx /= m;
    sy /= m;
    const auto& c = mix[j];
    const auto rel = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
      return ((a - b).array().abs() / (1.0 + b.array().abs())).maxCoeff();
    };
    worst = std::max({worst, std::abs(c.mass - m) / m, rel(c.x.mean, mx), rel(c.y.mean, my), rel(c.x.cov, sx),
                      rel(c.y.cov, sy)});
  }
  const bool ok = worst <= 1e-8 && mix.regularization_count() == 0;
  verdict(2, ok,
          std::to_string(mix.size()) + " components, max deviation from replay " + num(worst, 3) +
              " (<=1e-8), floor clamps " + std::to_string(mix.regularization_count()));
}

// ---- 3 ---------------------------------------------------------------------------------

void criterion_3() {
  std::string detail;
  bool ok = true;
  for (int delay : {6, 0}) {
    auto s = sim::preset("wander", 7);
    s.actuation_delay = delay;
    const auto log = sim::Simulator(s).run();
    const auto t0 = Clock::now();
    const auto r = estimate_delay(log, default_delay_candidates());
    const double el = seconds_since(t0);
    ok = ok && r.best_delay == delay && el < 60.0;
    detail += "injected " + std::to_string(delay) + " -> " + std::to_string(r.best_delay) + " in " + num(el, 3) +
              " s; ";
  }
  verdict(3, ok, detail + "(exact, <60 s each)");
}

// ---- 4 ---------------------------------------------------------------------------------

struct CellStats {
  double ratio = 0.0;  // largest per-action centroid separation / within-action std
  double dip_p = 1.0;
  std::size_t n = 0;
};

CellStats cell_stats(const std::vector<eval::DistributionRow>& rows, bool with_dip, std::uint64_t seed) {
  std::map<int, std::vector<Eigen::Vector2d>> by;
  for (const auto& r : rows) by[static_cast<int>(r.action)].push_back({r.du, r.dv});
  std::vector<Eigen::Vector2d> centroids;
  double ss = 0.0;
  std::size_t n = 0;
  std::vector<Eigen::Vector2d> all;
  for (const auto& [a, v] : by) {
    all.insert(all.end(), v.begin(), v.end());
    if (v.size() < 10) continue;
    Eigen::Vector2d c = Eigen::Vector2d::Zero();
    for (const auto& p : v) c += p;
    c /= static_cast<double>(v.size());
    for (const auto& p : v) ss += (p - c).squaredNorm();
    n += v.size();
    centroids.push_back(c);
  }
  CellStats out;
  out.n = all.size();
  double sep = 0.0;
  for (const auto& a : centroids) {
    for (const auto& b : centroids) sep = std::max(sep, (a - b).norm());
  }
  const double within = n ? std::sqrt(ss / static_cast<double>(n) / 2.0) : 0.0;
  out.ratio = within > 0.0 ? sep / within : 0.0;
  if (with_dip && all.size() >= 4) {
    Eigen::Vector2d m = Eigen::Vector2d::Zero();
    for (const auto& p : all) m += p;
    m /= static_cast<double>(all.size());
    Eigen::Matrix2d c = Eigen::Matrix2d::Zero();
    for (const auto& p : all) c += (p - m) * (p - m).transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(c);
    const Eigen::Vector2d axis = es.eigenvectors().col(1);
    std::vector<double> proj;
    for (const auto& p : all) proj.push_back((p - m).dot(axis));
    out.dip_p = eval::dip_test(proj, 200, seed).p_value;
  }
  return out;
}

void criterion_4() {
  const auto log = sim::Simulator(sim::preset("wander", 7)).run();
  // Low-flow centre of the flow distribution; each cell is analysed on its own.
  const std::vector<eval::Region> regions{{-5.0, 5.0, -5.0, 5.0}};
  const auto rows = eval::export_distributions(log, regions, {1, 2, 10, 15});
  const std::size_t cells = log.header.rows * log.header.cols;
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v.empty() ? 0.0 : v[v.size() / 2];
  };
  bool ok = true;
  std::string detail;
  for (int T : {10, 15}) {
    std::vector<double> ratios;
    for (std::size_t c = 0; c < cells; ++c) {
      std::vector<eval::DistributionRow> sel;
      for (const auto& r : rows) {
        if (r.horizon == T && r.row * log.header.cols + r.col == c) sel.push_back(r);
      }
      ratios.push_back(cell_stats(sel, false, 0).ratio);
    }
    const double m = median(ratios);
    ok = ok && m > 2.0;
    detail += "T=" + std::to_string(T) + " median separation/std " + num(m) + " (>2); ";
  }
  for (int T : {1, 2}) {
    std::size_t unimodal = 0;
    for (std::size_t c = 0; c < cells; ++c) {
      std::vector<eval::DistributionRow> sel;
      for (const auto& r : rows) {
        if (r.horizon == T && r.row * log.header.cols + r.col == c) sel.push_back(r);
      }
      const auto st = cell_stats(sel, true, 100 + c);
      if (st.dip_p >= 0.05 || st.ratio < 0.5) ++unimodal;
    }
    ok = ok && 2 * unimodal > cells;
    detail += "T=" + std::to_string(T) + " unimodal cells " + std::to_string(unimodal) + "/" + std::to_string(cells) +
              " (majority); ";
  }
  verdict(4, ok, detail);
}

// ---- 5, 6 ------------------------------------------------------------------------------

eval::EvalConfig wander_eval_config() {
  eval::EvalConfig c;
  c.model.horizon = 15;
  c.model.use_cell_coords = true;
  return c;
}

void criterion_5_6() {
  const auto log = sim::Simulator(sim::preset("wander", 7)).run();
  const auto cfg = wander_eval_config();
  const auto t0 = Clock::now();
  const auto with = eval::ablation_run(log, 15, true, cfg);
  const auto sweep = eval::novelty_sweep(log, 15, eval::default_novelty_grid(), cfg);
  const double el = seconds_since(t0);
  bool dominates = true;
  std::string points;
  for (const auto& p : sweep) {
    dominates = dominates && p.with_action.relative_reduction > p.without_action.relative_reduction;
    points += num(p.novelty_distance, 2) + ":" + num(p.with_action.relative_reduction, 3) + ">" +
              num(p.without_action.relative_reduction, 3) + " ";
  }
  const double e = with.report.relative_reduction;
  verdict(5, e >= 0.40 && dominates && el < 180.0,
          "reduction " + num(e) + " (>=0.40); sweep with>without " + points + "; " + num(el, 3) + " s (<180)");

  const auto ci = eval::bootstrap_mean(with.loglik_ratios, 2000, 0.95, 2024);
  verdict(6, ci.lower > 0.0,
          "mean log-likelihood ratio " + num(ci.mean) + ", 95% CI [" + num(ci.lower) + ", " + num(ci.upper) +
              "] over " + std::to_string(with.loglik_ratios.size()) + " pairs (lower > 0)");
}

// ---- 7 ---------------------------------------------------------------------------------

std::vector<double> signals(const std::vector<TraceRecord>& t) {
  std::vector<double> s;
  for (const auto& r : t) s.push_back(r.signal);
  return s;
}

std::vector<bool> bumps(const std::vector<TraceRecord>& t) {
  std::vector<bool> b;
  for (const auto& r : t) b.push_back(r.bump);
  return b;
}

void criterion_7() {
  auto run = [](const char* preset, std::uint64_t seed, int statics, sim::Truth* truth) {
    auto s = sim::preset(preset, seed);
    s.static_contacts = statics;
    return sim::Simulator(s).run(truth);
  };
  const auto train = run("approach", 11, 0, nullptr);
  const auto calib = run("approach", 12, 0, nullptr);
  sim::Truth test_truth;
  const auto test = run("approach", 13, 3, &test_truth);
  const auto wander = run("wander", 14, 0, nullptr);

  ForwardModelConfig mc;
  mc.horizon = 15;
  mc.use_cell_coords = true;
  ForwardModel fm(mc, train.header.rows, train.header.cols, train.header.actions);
  fm.learn(make_pairs(train, 15, fm.pair_options()));
  fm.finish_warmup();
  CreditConfig cc;
  replay_collisions(fm, train, cc, true);
  const auto cal = replay_collisions(fm, calib, cc, false);
  cc.alarm_threshold = calibrate_threshold(signals(cal), pre_bump_labels(bumps(cal), 30));

  const auto tt = replay_collisions(fm, test, cc, false);
  std::vector<ContactEpisode> eps;
  for (const auto& e : test_truth.episodes) eps.push_back({e.start_frame, e.contact_frame, e.static_contact});
  const auto a = score_anticipation(tt, eps, 15);
  std::string static_leads;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (eps[i].static_contact) static_leads += std::to_string(a.leads[i]) + " ";
  }
  const auto tw = replay_collisions(fm, wander, cc, false);
  const double fa = false_alarms_per_minute(tw, wander.header.frame_rate);
  verdict(7, a.scored == 20 && a.detection_rate() >= 0.8 && fa <= 1.0,
          "detected " + std::to_string(a.detected) + "/" + std::to_string(a.scored) + " with lead >= 15 frames (>=80%), " +
              num(fa, 3) + " false alarms/min (<=1), threshold " + num(cc.alarm_threshold) +
              ", static-contact leads [" + static_leads + "] (unscored)");
}

// ---- 8 ---------------------------------------------------------------------------------

StreamLog constant_flow_log(std::size_t frames) {
  StreamLog log;
  log.header.rows = 4;
  log.header.cols = 5;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 10.0);
  FlowGrid grid(4, 5);
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = {g(rng), g(rng)};
  const std::array<ActionKind, 3> kinds{ActionKind::Stop, ActionKind::Forward, ActionKind::Backward};
  for (std::size_t t = 0; t < frames; ++t) {
    SensorimotorFrame f;
    f.t = static_cast<std::int64_t>(t);
    f.flow = grid;
    f.action = ActionCommand::make(kinds[(t / 20) % 3]);
    log.frames.push_back(f);
  }
  return log;
}

void criterion_8() {
  // (a) A single-component mixture predicts its output mean for any input.
  ForwardModelConfig mc;
  mc.use_proprio = false;
  igmm::Config ic;
  ic.sigma_ini_x = Eigen::VectorXd::Ones(4);
  ic.sigma_ini_y = Eigen::VectorXd::Ones(2);
  ic.novelty_threshold = 0.0;
  ic.allow_creation = false;
  igmm::Mixture one(4, 2, ic);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  for (int i = 0; i < 50; ++i) {
    one.learn_one(Eigen::Vector4d(g(rng), g(rng), g(rng), g(rng)), Eigen::Vector2d(3.0 + g(rng), -1.0 + g(rng)));
  }
  FeatureScales scales;
  scales.input = Eigen::VectorXd::Ones(4);
  const ForwardModel single(mc, 4, 5, {}, scales, one);
  const Eigen::Vector2d mu = one[0].y.mean;
  bool a_ok = one.size() == 1;
  for (int i = 0; i < 200; ++i) {
    const Eigen::Vector4d x(50.0 * g(rng), 50.0 * g(rng), g(rng), g(rng));
    a_ok = a_ok && single.predict_cell(x).delta == mu;
  }

  // (b) Training on zero deltas predicts the input grid unchanged.
  const auto log = constant_flow_log(400);
  ForwardModelConfig zc;
  zc.horizon = 5;
  zc.warmup_frames = 50;
  ForwardModel fm(zc, 4, 5, {});
  fm.learn(make_pairs(log, 5, fm.pair_options()));
  fm.finish_warmup();
  bool b_ok = true;
  for (const auto& f : log.frames) b_ok = b_ok && fm.predict_grid(f).grid == f.flow;

  // (c) The naive predictor is exact on constant flow.
  const auto pairs = make_pairs(log, 5, fm.pair_options());
  const auto split = eval::split_index(pairs.size(), 20, 0.7);
  const auto report = eval::evaluate(fm, pairs, split, pairs.size(), eval::NaiveDensity(1.0), 1.0);
  const bool c_ok = report.aepe_naive == 0.0;

  verdict(8, a_ok && b_ok && c_ok,
          std::string("single component -> mu_Y ") + (a_ok ? "exact" : "differs") + "; zero delta -> input grid " +
              (b_ok ? "exact" : "differs") + "; naive AEPE on constant flow " + num(report.aepe_naive));
}

// ---- 9 ---------------------------------------------------------------------------------

int sh(const std::string& cmd) {
  const int rc = std::system((cmd + " > /dev/null 2>&1").c_str());
  return rc;
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  if (!fs::exists(root)) return out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = text::read_file(e.path().string());
  }
  return out;
}

fs::path only_dir(const fs::path& root, const std::string& prefix) {
  for (const auto& e : fs::directory_iterator(root)) {
    if (e.is_directory() && e.path().filename().string().rfind(prefix, 0) == 0) return e.path();
  }
  throw Error("no " + prefix + " run under " + root.string());
}

void criterion_9() {
  const fs::path base = fs::temp_directory_path() / ("sfm-acceptance-" + std::to_string(::getpid()));
  fs::remove_all(base);
  const std::string cli = SFM_CLI_PATH;
  const fs::path a = base / "a";
  const fs::path b = base / "b";
  const fs::path in = base / "inputs";
  bool ok = true;
  std::string detail;
  auto both = [&](const std::string& name, const std::string& args) {
    const int ra = sh(cli + " --out " + a.string() + " " + args);
    const int rb = sh(cli + " --out " + b.string() + " " + args);
    const auto ta = tree(a);
    const auto tb = tree(b);
    const bool same = ra == 0 && rb == 0 && !ta.empty() && ta == tb;
    ok = ok && same;
    detail += name + (same ? " ok; " : " DIFFERS; ");
    fs::remove_all(a);
    fs::remove_all(b);
  };
  try {
    // Shared inputs, produced once.
    sh(cli + " --out " + in.string() + " simulate --preset wander --seed 5 --duration 60");
    sh(cli + " --out " + (in / "approach").string() + " simulate --preset approach --seed 6 --static-contacts 1");
    const auto wlog = (only_dir(in, "simulate-") / "log.txt").string();
    const auto alog = (only_dir(in / "approach", "simulate-") / "log.txt").string();
    sh(cli + " --out " + (in / "model").string() + " train --log " + wlog + " --cell-coords");
    const auto model = (only_dir(in / "model", "train-") / "model.txt").string();

    both("simulate", "simulate --preset wander --seed 5 --duration 60");
    both("align", "align --log " + wlog + " --candidates 0 3 6");
    both("train", "train --log " + wlog + " --cell-coords");
    both("predict", "predict --log " + wlog + " --model " + model);
    both("eval", "eval --log " + wlog + " --cell-coords --bootstrap 200 --distributions");
    both("collide", "collide --log " + alog + " --cell-coords");
    both("pipeline", "pipeline --seed 3 --cell-coords");
  } catch (const std::exception& e) {
    ok = false;
    detail += std::string("error: ") + e.what();
  }
  fs::remove_all(base);
  verdict(9, ok, detail);
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> checks{criterion_1, criterion_2, criterion_3, criterion_4,
                                                  criterion_5_6, criterion_7, criterion_8, criterion_9};
  for (const auto& c : checks) {
    try {
      c();
    } catch (const std::exception& e) {
      std::cout << "FAIL criterion ?: exception " << e.what() << std::endl;
      ++failures;
    }
  }
  std::cout << (failures ? "ACCEPTANCE FAILED: " + std::to_string(failures) + " criteria" : "ACCEPTANCE PASSED")
            << std::endl;
  return failures ? 1 : 0;
}
