#include "sfm/alignment.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace sfm {

StreamLog apply_delay(const StreamLog& log, int d) {
  if (d < 0) throw Error("delay must be >= 0");
  const auto n = log.frames.size();
  if (static_cast<std::size_t>(d) >= n) throw Error("delay is not shorter than the log");
  StreamLog out;
  out.header = log.header;
  out.frames.reserve(n - static_cast<std::size_t>(d));
  for (std::size_t t = static_cast<std::size_t>(d); t < n; ++t) {
    SensorimotorFrame f = log.frames[t];
    f.action = log.frames[t - static_cast<std::size_t>(d)].action;
    f.proprio = log.frames[t - static_cast<std::size_t>(d)].proprio;
    out.frames.push_back(std::move(f));
  }
  return out;
}

std::vector<int> default_delay_candidates() {
  std::vector<int> c(16);
  std::iota(c.begin(), c.end(), 0);
  return c;
}

namespace {

// Mean held-out log-likelihood for one shift; nullopt when the split leaves nothing to train or score.
std::optional<std::pair<double, std::size_t>> score_delay(const StreamLog& shifted, const AlignmentConfig& cfg) {
  ForwardModelConfig mc = cfg.model;
  // Proprioception is synchronous with flow and would mask the action shift.
  mc.use_proprio = false;
  mc.mass_fraction = cfg.mass_fraction;
  ForwardModel fm(mc, shifted.header.rows, shifted.header.cols, shifted.header.actions);
  PairOptions opt = fm.pair_options();
  opt.timing = CommandTiming::Target;
  const auto pairs = make_pairs(shifted, mc.horizon, opt);
  if (pairs.empty()) return std::nullopt;
  const std::size_t cells = shifted.header.rows * shifted.header.cols;
  const std::size_t n_targets = pairs.size() / cells;
  const auto train_targets = static_cast<std::size_t>(cfg.train_fraction * static_cast<double>(n_targets));
  if (train_targets == 0 || train_targets >= n_targets) return std::nullopt;
  const std::size_t split = train_targets * cells;
  for (std::size_t i = 0; i < split; ++i) fm.learn(pairs[i]);
  fm.finish_warmup();
  const auto candidates = fm.prediction_set();
  double sum = 0.0;
  for (std::size_t i = split; i < pairs.size(); ++i) {
    sum += fm.posterior_predictive_loglik(pairs[i].x, pairs[i].y, candidates);
  }
  const std::size_t n = pairs.size() - split;
  return std::make_pair(sum / static_cast<double>(n), n);
}

}  // namespace

AlignmentResult estimate_delay(const StreamLog& log, const std::vector<int>& candidates, const AlignmentConfig& config) {
  if (candidates.empty()) throw Error("no candidate delays");
  if (!(config.train_fraction > 0.0 && config.train_fraction < 1.0)) throw Error("train fraction must be in (0,1)");
  if (!(config.mass_fraction > 0.0 && config.mass_fraction <= 1.0)) throw Error("mass fraction must be in (0,1]");
  config.model.validate();
  const std::set<int> unique(candidates.begin(), candidates.end());
  if (*unique.begin() < 0) throw Error("candidate delays must be >= 0");
  const int max_d = *unique.rbegin();

  AlignmentResult res;
  for (int d : unique) {
    // Every candidate scores the same target frames.
    const int drop = max_d - d;
    if (static_cast<std::size_t>(max_d) >= log.frames.size()) {
      res.absent.push_back(d);
      continue;
    }
    StreamLog shifted = apply_delay(log, d);
    shifted.frames.erase(shifted.frames.begin(), shifted.frames.begin() + drop);
    const auto s = score_delay(shifted, config);
    if (!s) {
      res.absent.push_back(d);
      continue;
    }
    res.scores[d] = s->first;
    res.n_pairs[d] = s->second;
  }
  if (res.scores.empty()) throw Error("no candidate delay has enough data");
  auto best = res.scores.begin();
  for (auto it = res.scores.begin(); it != res.scores.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  res.best_delay = best->first;
  return res;
}

}  // namespace sfm
