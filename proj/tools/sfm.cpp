// Command-line front end: simulate, align, train, predict, eval, collide, pipeline.
//
// Every command writes into <out>/<command>-<stamp>/, where the stamp is a digest of the
// command, its configuration and its input files, plus a manifest.json listing all three.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <deque>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "sfm/alignment.hpp"
#include "sfm/collision.hpp"
#include "sfm/core.hpp"
#include "sfm/eval.hpp"
#include "sfm/forward_model.hpp"
#include "sfm/simulator.hpp"
#include "sfm/text.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct Options {
  std::string out = "runs";
  std::uint64_t seed = 1;

  // model
  int horizon = 15;
  bool no_action = false;
  bool no_proprio = false;
  bool cell_coords = false;
  double novelty = 3.0;
  double sigma_fraction = 0.25;
  double mass_fraction = 0.90;
  double update_skip = 1e-4;
  double floor = 1e-2;
  int warmup = 300;
  bool igmn_update = false;
  double split = 0.7;

  // credit
  double gamma = 0.9;
  std::size_t window = 30;
  std::size_t lead = 15;

  // inputs
  std::string log;
  std::string model;
  std::string scenario;
  std::string preset = "wander";
  int delay = -1;
  double duration = -1.0;
  int static_contacts = -1;
  std::vector<int> candidates;
  bool sweep = false;
  bool distributions = false;
  std::string calibrate_log;
  std::string test_log;
  std::string test_episodes;
  std::string wander_log;
  double threshold = -1.0;
  std::size_t bootstrap = 2000;
};

sfm::ForwardModelConfig model_config(const Options& o) {
  sfm::ForwardModelConfig c;
  c.horizon = o.horizon;
  c.use_action = !o.no_action;
  c.use_proprio = !o.no_proprio && !o.no_action;
  c.use_cell_coords = o.cell_coords;
  c.novelty_distance = o.novelty;
  c.sigma_ini_fraction = o.sigma_fraction;
  c.mass_fraction = o.mass_fraction;
  c.update_skip_threshold = o.update_skip;
  c.regularization_floor = o.floor;
  c.warmup_frames = o.warmup;
  c.covariance_update = o.igmn_update ? sfm::igmm::CovarianceUpdate::Igmn : sfm::igmm::CovarianceUpdate::Exact;
  c.validate();
  return c;
}

json model_json(const Options& o) {
  return {{"horizon", o.horizon},           {"use_action", !o.no_action},
          {"use_proprio", !o.no_proprio && !o.no_action},
          {"use_cell_coords", o.cell_coords}, {"novelty_distance", o.novelty},
          {"sigma_ini_fraction", o.sigma_fraction}, {"mass_fraction", o.mass_fraction},
          {"update_skip", o.update_skip},   {"regularization_floor", o.floor},
          {"warmup_frames", o.warmup},      {"covariance_update", o.igmn_update ? "igmn" : "exact"},
          {"split", o.split}};
}

sfm::CreditConfig credit_config(const Options& o) {
  sfm::CreditConfig c;
  c.gamma = o.gamma;
  c.window = o.window;
  c.validate();
  return c;
}

// Collects outputs in memory and commits them with atomic renames once the command succeeded.
class Run {
 public:
  Run(const Options& o, std::string command, json config, const std::vector<std::string>& inputs)
      : command_(std::move(command)) {
    manifest_["command"] = command_;
    manifest_["config"] = std::move(config);
    json in = json::array();
    std::string key = command_ + manifest_["config"].dump();
    for (const auto& path : inputs) {
      if (path.empty()) continue;
      const auto d = sfm::text::digest(sfm::text::read_file(path));
      in.push_back({{"path", path}, {"digest", d}});
      key += d;
    }
    manifest_["inputs"] = std::move(in);
    dir_ = fs::path(o.out) / (command_ + "-" + sfm::text::digest(key).substr(0, 12));
  }

  const fs::path& dir() const { return dir_; }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void add(const std::string& name, std::string content) { files_.emplace_back(name, std::move(content)); }

  void commit() {
    fs::create_directories(dir_);
    json outs = json::array();
    for (const auto& [name, content] : files_) {
      fs::create_directories((dir_ / name).parent_path());
      sfm::text::atomic_write(path(name), content);
      outs.push_back({{"path", name}, {"digest", sfm::text::digest(content)}});
    }
    manifest_["outputs"] = std::move(outs);
    sfm::text::atomic_write(path("manifest.json"), manifest_.dump(2) + "\n");
    std::cout << command_ << ": " << dir_.string() << '\n';
  }

 private:
  std::string command_;
  json manifest_;
  fs::path dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

template <class F>
std::string render(F&& f) {
  std::ostringstream s;
  f(s);
  return s.str();
}

std::string log_text(const sfm::StreamLog& log) {
  return render([&](std::ostream& s) { sfm::write_stream_log(s, log); });
}

std::string episodes_text(const std::vector<sfm::ContactEpisode>& eps) {
  return render([&](std::ostream& s) {
    s << "start contact static\n";
    for (const auto& e : eps) s << e.start << ' ' << e.contact << ' ' << (e.static_contact ? 1 : 0) << '\n';
  });
}

std::vector<sfm::ContactEpisode> read_episodes(const std::string& path) {
  std::istringstream in(sfm::text::read_file(path));
  std::string line;
  std::getline(in, line);
  std::vector<sfm::ContactEpisode> out;
  while (std::getline(in, line)) {
    const auto f = sfm::text::split_ws(line);
    if (f.empty()) continue;
    if (f.size() != 3) throw sfm::Error("bad episode line: " + line);
    out.push_back({static_cast<std::size_t>(sfm::text::parse_int(f[0])),
                   static_cast<std::size_t>(sfm::text::parse_int(f[1])), sfm::text::parse_int(f[2]) != 0});
  }
  return out;
}

std::vector<sfm::ContactEpisode> truth_episodes(const sfm::sim::Truth& truth) {
  std::vector<sfm::ContactEpisode> out;
  for (const auto& e : truth.episodes) out.push_back({e.start_frame, e.contact_frame, e.static_contact});
  return out;
}

sfm::sim::Scenario scenario_for(const Options& o, const std::string& preset, std::uint64_t seed) {
  auto s = o.scenario.empty() ? sfm::sim::preset(preset, seed) : sfm::sim::load_scenario(o.scenario);
  s.seed = seed;
  if (o.delay >= 0) s.actuation_delay = o.delay;
  if (o.duration > 0.0) s.duration = o.duration;
  if (o.static_contacts >= 0) s.static_contacts = o.static_contacts;
  s.validate();
  return s;
}

struct Simulated {
  sfm::StreamLog log;
  sfm::sim::Truth truth;
};

Simulated simulate(const sfm::sim::Scenario& s) {
  Simulated r;
  r.log = sfm::sim::Simulator(s).run(&r.truth);
  return r;
}

// ---- simulate --------------------------------------------------------------------------

void add_simulation(Run& run, const std::string& prefix, const sfm::sim::Scenario& s, const Simulated& sim) {
  run.add(prefix + "scenario.txt", render([&](std::ostream& o) { sfm::sim::write_scenario(o, s); }));
  run.add(prefix + "log.txt", log_text(sim.log));
  if (!sim.truth.episodes.empty()) run.add(prefix + "episodes.txt", episodes_text(truth_episodes(sim.truth)));
}

void cmd_simulate(const Options& o) {
  const auto s = scenario_for(o, o.preset, o.seed);
  const std::string scen = render([&](std::ostream& out) { sfm::sim::write_scenario(out, s); });
  Run run(o, "simulate", {{"seed", o.seed}, {"scenario", scen}}, {});
  add_simulation(run, "", s, simulate(s));
  run.commit();
}

// ---- align -----------------------------------------------------------------------------

sfm::AlignmentResult align(const Options& o, const sfm::StreamLog& log) {
  sfm::AlignmentConfig cfg;
  cfg.model = model_config(o);
  cfg.train_fraction = o.split;
  const auto cands = o.candidates.empty() ? sfm::default_delay_candidates() : o.candidates;
  return sfm::estimate_delay(log, cands, cfg);
}

std::string alignment_text(const sfm::AlignmentResult& r) {
  return render([&](std::ostream& s) {
    s << "delay score n_pairs\n";
    for (const auto& [d, v] : r.scores) s << d << ' ' << sfm::text::fmt(v) << ' ' << r.n_pairs.at(d) << '\n';
    for (int d : r.absent) s << d << " absent 0\n";
  });
}

void cmd_align(const Options& o) {
  const auto log = sfm::load_stream_log(o.log);
  json cfg = model_json(o);
  cfg["candidates"] = o.candidates;
  Run run(o, "align", cfg, {o.log});
  const auto r = align(o, log);
  const auto table = alignment_text(r);
  std::cout << table << "best " << r.best_delay << '\n';
  run.add("alignment.txt", table);
  run.add("best_delay.txt", std::to_string(r.best_delay) + "\n");
  run.commit();
}

// ---- train -----------------------------------------------------------------------------

struct Trained {
  sfm::ForwardModel model;
  std::string progress;
};

// Streams the training head in time order. Before each update the current model predicts the
// pair, so the progress table shows a prequential error over the last 100 samples.
Trained train(const Options& o, const sfm::StreamLog& log) {
  const auto cfg = model_config(o);
  sfm::ForwardModel fm(cfg, log.header.rows, log.header.cols, log.header.actions);
  const auto pairs = sfm::make_pairs(log, cfg.horizon, fm.pair_options());
  const auto split = sfm::eval::split_index(pairs.size(), log.header.rows * log.header.cols, o.split);
  if (split == 0) throw sfm::Error("log too short to train");
  constexpr std::size_t kEvery = 100;
  std::ostringstream progress;
  progress << "samples components rolling_aepe\n";
  std::deque<double> recent;
  double recent_sum = 0.0;
  for (std::size_t i = 0; i < split; ++i) {
    if (fm.ready()) {
      const double e = (fm.predict_cell(pairs[i].x).delta - pairs[i].y).norm();
      recent.push_back(e);
      recent_sum += e;
      if (recent.size() > kEvery) {
        recent_sum -= recent.front();
        recent.pop_front();
      }
    }
    fm.learn(pairs[i]);
    if ((i + 1) % kEvery == 0 || i + 1 == split) {
      progress << i + 1 << ' ' << (fm.ready() ? fm.mixture().size() : 0) << ' ';
      if (recent.empty()) {
        progress << "nan\n";
      } else {
        progress << sfm::text::fmt(recent_sum / static_cast<double>(recent.size())) << '\n';
      }
    }
  }
  fm.finish_warmup();
  return {std::move(fm), progress.str()};
}

void cmd_train(const Options& o) {
  const auto log = sfm::load_stream_log(o.log);
  Run run(o, "train", model_json(o), {o.log});
  auto t = train(o, log);
  std::cout << "components " << t.model.mixture().size() << '\n';
  run.add("progress.txt", std::move(t.progress));
  run.add("model.txt", t.model.snapshot());
  run.commit();
}

// ---- predict / eval --------------------------------------------------------------------

struct HeldOut {
  std::vector<sfm::TrainingPair> pairs;
  std::size_t split = 0;
  sfm::eval::NaiveDensity naive;
};

HeldOut held_out(const sfm::ForwardModel& fm, const sfm::StreamLog& log, double split_fraction) {
  if (log.header.rows != fm.rows() || log.header.cols != fm.cols()) throw sfm::Error("log grid does not match model");
  HeldOut h;
  h.pairs = sfm::make_pairs(log, fm.horizon(), fm.pair_options());
  h.split = sfm::eval::split_index(h.pairs.size(), log.header.rows * log.header.cols, split_fraction);
  if (h.split == 0 || h.split >= h.pairs.size()) throw sfm::Error("log too short for a train/evaluation split");
  h.naive = sfm::eval::NaiveDensity::fit(h.pairs, 0, h.split);
  return h;
}

sfm::ForwardModel load_model(const std::string& path) { return sfm::ForwardModel::restore(sfm::text::read_file(path)); }

void cmd_predict(const Options& o) {
  const auto log = sfm::load_stream_log(o.log);
  const auto fm = load_model(o.model);
  Run run(o, "predict", {{"split", o.split}}, {o.log, o.model});
  const auto h = held_out(fm, log, o.split);
  std::vector<sfm::eval::PredictionRecord> records;
  const auto report = sfm::eval::evaluate(fm, h.pairs, h.split, h.pairs.size(), h.naive, 1.0, &records);
  run.add("predictions.txt", render([&](std::ostream& s) { sfm::eval::write_predictions(s, records); }));
  run.add("report.json", sfm::eval::report_json(report));
  sfm::eval::write_report_text(std::cout, report);
  run.commit();
}

json interval_json(const sfm::eval::BootstrapInterval& b) {
  return {{"mean", b.mean}, {"lower", b.lower}, {"upper", b.upper}};
}

json ablation_json(const sfm::eval::AblationResult& a, const Options& o) {
  json j = json::parse(sfm::eval::report_json(a.report));
  j["loglik_ratio_ci95"] = interval_json(sfm::eval::bootstrap_mean(a.loglik_ratios, o.bootstrap, 0.95, o.seed));
  return j;
}

std::vector<sfm::eval::Region> default_regions() {
  // Low-flow centre of the flow distribution, where the next motion depends on the command.
  return {{-5.0, 5.0, -5.0, 5.0}};
}

void cmd_eval(const Options& o) {
  const auto log = sfm::load_stream_log(o.log);
  json cfg = model_json(o);
  cfg["sweep"] = o.sweep;
  cfg["distributions"] = o.distributions;
  cfg["seed"] = o.seed;
  cfg["bootstrap"] = o.bootstrap;
  Run run(o, "eval", cfg, {o.log, o.model});
  json summary;
  if (!o.model.empty()) {
    const auto fm = load_model(o.model);
    const auto h = held_out(fm, log, o.split);
    const auto report = sfm::eval::evaluate(fm, h.pairs, h.split, h.pairs.size(), h.naive, 1.0);
    const auto ratios = sfm::eval::loglik_ratios(fm, h.pairs, h.naive, h.split, h.pairs.size());
    summary["model"] = json::parse(sfm::eval::report_json(report));
    summary["model"]["loglik_ratio_ci95"] = interval_json(sfm::eval::bootstrap_mean(ratios, o.bootstrap, 0.95, o.seed));
    sfm::eval::write_report_text(std::cout, report);
  } else {
    sfm::eval::EvalConfig ec;
    ec.model = model_config(o);
    ec.train_fraction = o.split;
    const auto with = sfm::eval::ablation_run(log, o.horizon, true, ec);
    const auto without = sfm::eval::ablation_run(log, o.horizon, false, ec);
    summary["with_action"] = ablation_json(with, o);
    summary["without_action"] = ablation_json(without, o);
    std::cout << "with action\n";
    sfm::eval::write_report_text(std::cout, with.report);
    std::cout << "without action\n";
    sfm::eval::write_report_text(std::cout, without.report);
    if (o.sweep) {
      const auto sweep = sfm::eval::novelty_sweep(log, o.horizon, sfm::eval::default_novelty_grid(), ec);
      run.add("sweep.txt", render([&](std::ostream& s) { sfm::eval::write_sweep(s, sweep); }));
    }
  }
  if (o.distributions) {
    const auto rows = sfm::eval::export_distributions(log, default_regions(), {1, 2, 5, 10, 15, 20});
    run.add("distributions.csv", render([&](std::ostream& s) { sfm::eval::write_distributions(s, rows); }));
  }
  run.add("report.json", summary.dump(2) + "\n");
  run.commit();
}

// ---- collide ---------------------------------------------------------------------------

struct CollisionOutcome {
  json summary;
  std::string trace;
  std::string test_trace;
  std::string model;
};

std::vector<bool> bumps_of(const std::vector<sfm::TraceRecord>& trace) {
  std::vector<bool> b;
  for (const auto& r : trace) b.push_back(r.bump);
  return b;
}

std::vector<double> signal_of(const std::vector<sfm::TraceRecord>& trace) {
  std::vector<double> s;
  for (const auto& r : trace) s.push_back(r.signal);
  return s;
}

void apply_threshold(std::vector<sfm::TraceRecord>& trace, double thr) {
  for (auto& r : trace) r.alarm = r.signal >= thr && r.signal > 0.0;
}

json anticipation_json(const sfm::AnticipationResult& a) {
  return {{"episodes", a.leads.size()}, {"scored", a.scored}, {"detected", a.detected},
          {"detection_rate", a.detection_rate()}, {"leads", a.leads}};
}

// Learns credit on `train_log`, fixes the alarm threshold, then scores held-out logs.
CollisionOutcome collide(const Options& o, sfm::ForwardModel fm, const sfm::StreamLog& train_log,
                         const sfm::StreamLog* calibration, const sfm::StreamLog* test,
                         const std::vector<sfm::ContactEpisode>* test_episodes, const sfm::StreamLog* wander) {
  auto cc = credit_config(o);
  const double labels_frames = 2.0 * train_log.header.frame_rate;
  auto trace = sfm::replay_collisions(fm, train_log, cc, true);
  CollisionOutcome out;
  double thr = o.threshold;
  if (thr < 0.0) {
    const auto cal = calibration ? sfm::replay_collisions(fm, *calibration, cc, false) : trace;
    thr = sfm::calibrate_threshold(signal_of(cal),
                                   sfm::pre_bump_labels(bumps_of(cal), static_cast<std::size_t>(labels_frames)));
  }
  cc.alarm_threshold = thr;
  apply_threshold(trace, thr);
  out.summary["threshold"] = thr;
  out.summary["components"] = fm.mixture().size();
  out.summary["train"] = anticipation_json(sfm::score_anticipation(trace, sfm::episodes_from_bumps(trace), o.lead));
  out.trace = render([&](std::ostream& s) { sfm::write_trace(s, trace); });
  if (test) {
    const auto tt = sfm::replay_collisions(fm, *test, cc, false);
    const auto eps = test_episodes ? *test_episodes : sfm::episodes_from_bumps(tt);
    out.summary["test"] = anticipation_json(sfm::score_anticipation(tt, eps, o.lead));
    out.test_trace = render([&](std::ostream& s) { sfm::write_trace(s, tt); });
  }
  if (wander) {
    const auto tw = sfm::replay_collisions(fm, *wander, cc, false);
    out.summary["false_alarms_per_minute"] = sfm::false_alarms_per_minute(tw, wander->header.frame_rate);
  }
  out.model = fm.snapshot();
  return out;
}

void cmd_collide(const Options& o) {
  const auto log = sfm::load_stream_log(o.log);
  json cfg = model_json(o);
  cfg["gamma"] = o.gamma;
  cfg["window"] = o.window;
  cfg["lead"] = o.lead;
  cfg["threshold"] = o.threshold;
  Run run(o, "collide", cfg, {o.log, o.model, o.calibrate_log, o.test_log, o.test_episodes, o.wander_log});
  sfm::ForwardModel fm = [&] {
    if (!o.model.empty()) return load_model(o.model);
    auto m = model_config(o);
    sfm::ForwardModel f(m, log.header.rows, log.header.cols, log.header.actions);
    f.learn(sfm::make_pairs(log, m.horizon, f.pair_options()));
    f.finish_warmup();
    return f;
  }();
  std::optional<sfm::StreamLog> cal, test, wander;
  std::optional<std::vector<sfm::ContactEpisode>> eps;
  if (!o.calibrate_log.empty()) cal = sfm::load_stream_log(o.calibrate_log);
  if (!o.test_log.empty()) test = sfm::load_stream_log(o.test_log);
  if (!o.test_episodes.empty()) eps = read_episodes(o.test_episodes);
  if (!o.wander_log.empty()) wander = sfm::load_stream_log(o.wander_log);
  auto r = collide(o, std::move(fm), log, cal ? &*cal : nullptr, test ? &*test : nullptr, eps ? &*eps : nullptr,
                   wander ? &*wander : nullptr);
  std::cout << r.summary.dump(2) << '\n';
  run.add("trace.txt", std::move(r.trace));
  if (!r.test_trace.empty()) run.add("test_trace.txt", std::move(r.test_trace));
  run.add("model.txt", std::move(r.model));
  run.add("summary.json", r.summary.dump(2) + "\n");
  run.commit();
}

// ---- pipeline --------------------------------------------------------------------------

// simulate -> align -> train -> eval -> collide from one seed. Each stage writes a subdirectory.
void cmd_pipeline(const Options& o) {
  json cfg = model_json(o);
  cfg["seed"] = o.seed;
  cfg["gamma"] = o.gamma;
  cfg["window"] = o.window;
  cfg["delay"] = o.delay;
  cfg["lead"] = o.lead;
  cfg["sweep"] = o.sweep;
  Run run(o, "pipeline", cfg, {o.scenario});
  json summary;

  const auto ws = scenario_for(o, "wander", o.seed);
  const auto wander = simulate(ws);
  add_simulation(run, "simulate/", ws, wander);

  const auto al = align(o, wander.log);
  run.add("align/alignment.txt", alignment_text(al));
  summary["best_delay"] = al.best_delay;
  if (wander.log.header.injected_delay) summary["injected_delay"] = *wander.log.header.injected_delay;

  auto trained = train(o, wander.log);
  run.add("train/progress.txt", trained.progress);
  run.add("train/model.txt", trained.model.snapshot());
  summary["components"] = trained.model.mixture().size();

  sfm::eval::EvalConfig ec;
  ec.model = model_config(o);
  ec.train_fraction = o.split;
  const auto with = sfm::eval::ablation_run(wander.log, o.horizon, true, ec);
  const auto without = sfm::eval::ablation_run(wander.log, o.horizon, false, ec);
  json ev;
  ev["with_action"] = ablation_json(with, o);
  ev["without_action"] = ablation_json(without, o);
  run.add("eval/report.json", ev.dump(2) + "\n");
  summary["relative_reduction"] = with.report.relative_reduction;
  summary["relative_reduction_without_action"] = without.report.relative_reduction;
  summary["mean_loglik_ratio"] = with.report.mean_loglik_ratio;
  if (o.sweep) {
    const auto sweep = sfm::eval::novelty_sweep(wander.log, o.horizon, sfm::eval::default_novelty_grid(), ec);
    run.add("eval/sweep.txt", render([&](std::ostream& s) { sfm::eval::write_sweep(s, sweep); }));
  }

  // Collision: credit on one approach run, threshold on a second, scoring on a third, and
  // false alarms on a fresh wander run.
  Options co = o;
  co.scenario.clear();
  co.duration = -1.0;
  co.static_contacts = -1;
  const auto as = scenario_for(co, "approach", o.seed + 1);
  const auto cs = scenario_for(co, "approach", o.seed + 2);
  const auto ts = scenario_for(co, "approach", o.seed + 3);
  const auto fs2 = scenario_for(co, "wander", o.seed + 4);
  const auto a = simulate(as);
  const auto c = simulate(cs);
  const auto t = simulate(ts);
  const auto w = simulate(fs2);
  add_simulation(run, "collide/train/", as, a);
  add_simulation(run, "collide/calibrate/", cs, c);
  add_simulation(run, "collide/test/", ts, t);
  add_simulation(run, "collide/wander/", fs2, w);
  auto mc = model_config(o);
  sfm::ForwardModel fm(mc, a.log.header.rows, a.log.header.cols, a.log.header.actions);
  fm.learn(sfm::make_pairs(a.log, mc.horizon, fm.pair_options()));
  fm.finish_warmup();
  const auto eps = truth_episodes(t.truth);
  auto col = collide(o, std::move(fm), a.log, &c.log, &t.log, &eps, &w.log);
  run.add("collide/trace.txt", col.trace);
  run.add("collide/test_trace.txt", col.test_trace);
  run.add("collide/model.txt", col.model);
  run.add("collide/summary.json", col.summary.dump(2) + "\n");
  summary["collision"] = col.summary;

  run.add("summary.json", summary.dump(2) + "\n");
  std::cout << summary.dump(2) << '\n';
  run.commit();
}

void model_flags(CLI::App* c, Options& o) {
  c->add_option("--horizon", o.horizon, "Prediction horizon in frames")->envname("SFM_HORIZON");
  c->add_flag("--no-action", o.no_action, "Drop the action (and proprioception) inputs")->envname("SFM_NO_ACTION");
  c->add_flag("--no-proprio", o.no_proprio, "Drop the proprioception input")->envname("SFM_NO_PROPRIO");
  c->add_flag("--cell-coords", o.cell_coords, "Append grid coordinates to each cell's input")
      ->envname("SFM_CELL_COORDS");
  c->add_option("--novelty", o.novelty, "Mahalanobis radius of the novelty test")->envname("SFM_NOVELTY");
  c->add_option("--sigma-fraction", o.sigma_fraction, "Fresh-component std as a fraction of nominal spread")
      ->envname("SFM_SIGMA_FRACTION");
  c->add_option("--mass-fraction", o.mass_fraction, "Cumulative mass of the prediction set")
      ->envname("SFM_MASS_FRACTION");
  c->add_option("--update-skip", o.update_skip, "Minimum posterior share for an update")->envname("SFM_UPDATE_SKIP");
  c->add_option("--floor", o.floor, "Covariance eigenvalue floor (standardized units)")->envname("SFM_FLOOR");
  c->add_option("--warmup", o.warmup, "Frames buffered before feature scales are fixed")->envname("SFM_WARMUP");
  c->add_flag("--igmn-update", o.igmn_update, "Use the approximate covariance update")->envname("SFM_IGMN_UPDATE");
  c->add_option("--split", o.split, "Training fraction of the log")->envname("SFM_SPLIT");
}

void credit_flags(CLI::App* c, Options& o) {
  c->add_option("--gamma", o.gamma, "Credit discount per frame")->envname("SFM_GAMMA");
  c->add_option("--window", o.window, "Frames of history receiving credit")->envname("SFM_WINDOW");
  c->add_option("--lead", o.lead, "Minimum alarm lead counted as anticipation, frames")->envname("SFM_LEAD");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sensorimotor flow forward model"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--out", o.out, "Root directory for run outputs")->envname("SFM_OUT");
  app.add_option("--seed", o.seed, "Random seed")->envname("SFM_SEED");

  auto* sim = app.add_subcommand("simulate", "Run the simulator and write a stream log");
  sim->add_option("--scenario", o.scenario, "Scenario file")->check(CLI::ExistingFile);
  sim->add_option("--preset", o.preset, "wander, approach or rotate")->envname("SFM_PRESET");
  sim->add_option("--delay", o.delay, "Actuation delay override, frames")->envname("SFM_DELAY");
  sim->add_option("--duration", o.duration, "Duration override, s")->envname("SFM_DURATION");
  sim->add_option("--static-contacts", o.static_contacts, "Pushes while already touching (approach)");

  auto* al = app.add_subcommand("align", "Estimate the action-to-flow delay of a log");
  al->add_option("--log", o.log, "Stream log")->required()->check(CLI::ExistingFile);
  al->add_option("--candidates", o.candidates, "Delays to test (default 0..15)");
  model_flags(al, o);

  auto* tr = app.add_subcommand("train", "Stream the training part of a log into a model");
  tr->add_option("--log", o.log, "Stream log")->required()->check(CLI::ExistingFile);
  model_flags(tr, o);

  auto* pr = app.add_subcommand("predict", "Predict the held-out part of a log");
  pr->add_option("--log", o.log, "Stream log")->required()->check(CLI::ExistingFile);
  pr->add_option("--model", o.model, "Model snapshot")->required()->check(CLI::ExistingFile);
  pr->add_option("--split", o.split, "Training fraction of the log")->envname("SFM_SPLIT");

  auto* ev = app.add_subcommand("eval", "Ablation, novelty sweep and distribution export");
  ev->add_option("--log", o.log, "Stream log")->required()->check(CLI::ExistingFile);
  ev->add_option("--model", o.model, "Score this snapshot instead of training")->check(CLI::ExistingFile);
  ev->add_flag("--sweep", o.sweep, "Run the novelty sweep");
  ev->add_flag("--distributions", o.distributions, "Export delta-flow samples per action");
  ev->add_option("--bootstrap", o.bootstrap, "Bootstrap resamples for intervals");
  model_flags(ev, o);

  auto* co = app.add_subcommand("collide", "Learn collision credit and score anticipation");
  co->add_option("--log", o.log, "Log with bumps used to assign credit")->required()->check(CLI::ExistingFile);
  co->add_option("--model", o.model, "Start from this snapshot")->check(CLI::ExistingFile);
  co->add_option("--calibrate-log", o.calibrate_log, "Log used to pick the alarm threshold")
      ->check(CLI::ExistingFile);
  co->add_option("--test-log", o.test_log, "Held-out log to score")->check(CLI::ExistingFile);
  co->add_option("--test-episodes", o.test_episodes, "Episode file for the test log")->check(CLI::ExistingFile);
  co->add_option("--wander-log", o.wander_log, "Bump-free log for false alarms")->check(CLI::ExistingFile);
  co->add_option("--threshold", o.threshold, "Fixed alarm threshold (default: calibrate)");
  model_flags(co, o);
  credit_flags(co, o);

  auto* pl = app.add_subcommand("pipeline", "Simulate, align, train, evaluate and collide from one seed");
  pl->add_option("--delay", o.delay, "Actuation delay override, frames")->envname("SFM_DELAY");
  pl->add_flag("--sweep", o.sweep, "Include the novelty sweep");
  model_flags(pl, o);
  credit_flags(pl, o);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*sim) cmd_simulate(o);
    if (*al) cmd_align(o);
    if (*tr) cmd_train(o);
    if (*pr) cmd_predict(o);
    if (*ev) cmd_eval(o);
    if (*co) cmd_collide(o);
    if (*pl) cmd_pipeline(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
