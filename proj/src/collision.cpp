#include "sfm/collision.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

#include "sfm/text.hpp"

namespace sfm {

void CreditConfig::validate() const {
  if (window < 1) throw Error("credit window must be >= 1");
  if (!(gamma > 0.0 && gamma < 1.0)) throw Error("gamma must be in (0,1)");
  if (active_set_size < 1) throw Error("active set size must be >= 1");
  if (!(mass_fraction > 0.0 && mass_fraction <= 1.0)) throw Error("mass fraction must be in (0,1]");
  if (!std::isfinite(alarm_threshold)) throw Error("alarm threshold must be finite");
}

ActivationHistory::ActivationHistory(std::size_t window) : window_(window) {
  if (window < 1) throw Error("credit window must be >= 1");
}

void ActivationHistory::record(std::int64_t t, std::vector<std::vector<std::size_t>> active) {
  entries_.push_back({t, std::move(active)});
  while (entries_.size() > window_) entries_.pop_front();
}

std::vector<std::vector<std::size_t>> active_components(const ForwardModel& fm, const SensorimotorFrame& frame,
                                                        const CreditConfig& cfg) {
  std::vector<std::vector<std::size_t>> out;
  out.reserve(fm.rows() * fm.cols());
  for (std::size_t r = 0; r < fm.rows(); ++r) {
    for (std::size_t c = 0; c < fm.cols(); ++c) {
      out.push_back(fm.active_components(fm.features(frame, r, c), cfg.active_set_size, cfg.mass_fraction));
    }
  }
  return out;
}

double assign_credit(igmm::Mixture& mixture, const ActivationHistory& history, const CreditConfig& cfg) {
  double total = 0.0;
  const std::size_t n = history.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double w = std::pow(cfg.gamma, static_cast<double>(n - 1 - i));
    const auto& cells = history[i].cells;
    if (cfg.per_cell) {
      for (const auto& comps : cells) {
        for (auto j : comps) {
          mixture.add_collision_value(j, w);
          total += w;
        }
      }
    } else {
      std::set<std::size_t> once;
      for (const auto& comps : cells) once.insert(comps.begin(), comps.end());
      for (auto j : once) {
        mixture.add_collision_value(j, w);
        total += w;
      }
    }
  }
  return total;
}

double collision_signal(const igmm::Mixture& mixture, const std::vector<std::vector<std::size_t>>& active) {
  if (active.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& comps : active) {
    if (comps.empty()) continue;
    double cell = 0.0;
    for (auto j : comps) cell += mixture.components().at(j).collision_value;
    sum += cell / static_cast<double>(comps.size());
  }
  return sum / static_cast<double>(active.size());
}

double collision_signal(const ForwardModel& fm, const SensorimotorFrame& frame, const CreditConfig& cfg) {
  return collision_signal(fm.mixture(), active_components(fm, frame, cfg));
}

std::vector<TraceRecord> replay_collisions(ForwardModel& fm, const StreamLog& log, const CreditConfig& cfg,
                                           bool learn_credit) {
  cfg.validate();
  if (log.header.rows != fm.rows() || log.header.cols != fm.cols()) throw Error("log grid does not match the model");
  ActivationHistory history(cfg.window);
  std::vector<TraceRecord> trace;
  trace.reserve(log.frames.size());
  bool prev_bump = false;
  for (const auto& f : log.frames) {
    auto active = active_components(fm, f, cfg);
    const double s = collision_signal(fm.mixture(), active);
    history.record(f.t, std::move(active));
    trace.push_back({f.t, s, s >= cfg.alarm_threshold && s > 0.0, f.bump});
    if (learn_credit && f.bump && !prev_bump) assign_credit(fm.mixture(), history, cfg);
    prev_bump = f.bump;
  }
  return trace;
}

std::vector<bool> pre_bump_labels(const std::vector<bool>& bumps, std::size_t horizon_frames) {
  std::vector<bool> labels(bumps.size(), false);
  for (std::size_t i = 0; i < bumps.size(); ++i) {
    if (!bumps[i] || (i > 0 && bumps[i - 1])) continue;
    const std::size_t lo = i >= horizon_frames ? i - horizon_frames : 0;
    for (std::size_t k = lo; k <= i; ++k) labels[k] = true;
  }
  return labels;
}

double calibrate_threshold(const std::vector<double>& signal, const std::vector<bool>& labels) {
  if (signal.size() != labels.size()) throw Error("signal and labels differ in length");
  std::vector<double> levels;
  for (double s : signal) {
    if (s > 0.0) levels.push_back(s);
  }
  if (levels.empty()) throw Error("collision signal is zero everywhere; cannot calibrate");
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  const auto positives = static_cast<double>(std::count(labels.begin(), labels.end(), true));
  double best_f1 = -1.0;
  double best = levels.front();
  for (double thr : levels) {
    double tp = 0.0;
    double fp = 0.0;
    for (std::size_t i = 0; i < signal.size(); ++i) {
      if (signal[i] >= thr) (labels[i] ? tp : fp) += 1.0;
    }
    const double denom = 2.0 * tp + fp + (positives - tp);
    const double f1 = denom > 0.0 ? 2.0 * tp / denom : 0.0;
    if (f1 > best_f1) {
      best_f1 = f1;
      best = thr;
    }
  }
  return best;
}

void write_trace(std::ostream& out, const std::vector<TraceRecord>& trace) {
  out << "t signal alarm bump\n";
  for (const auto& r : trace) {
    out << r.t << ' ' << text::fmt(r.signal) << ' ' << (r.alarm ? 1 : 0) << ' ' << (r.bump ? 1 : 0) << '\n';
  }
}

std::vector<ContactEpisode> episodes_from_bumps(const std::vector<TraceRecord>& trace) {
  std::vector<ContactEpisode> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const bool prev = i > 0 && trace[i - 1].bump;
    if (trace[i].bump && !prev) out.push_back({start, i, false});
    if (!trace[i].bump && prev) start = i;
  }
  return out;
}

AnticipationResult score_anticipation(const std::vector<TraceRecord>& trace,
                                      const std::vector<ContactEpisode>& episodes, std::size_t min_lead) {
  AnticipationResult out;
  for (const auto& e : episodes) {
    if (e.contact >= trace.size() || e.start > e.contact) throw Error("episode outside the trace");
    std::size_t on = e.contact;
    long lead = -1;
    if (!trace[on].alarm && on > e.start) --on;
    if (trace[on].alarm) {
      while (on > e.start && trace[on - 1].alarm) --on;
      lead = static_cast<long>(e.contact - on);
    }
    out.leads.push_back(lead);
    if (e.static_contact) continue;
    ++out.scored;
    if (lead >= static_cast<long>(min_lead)) ++out.detected;
  }
  return out;
}

double false_alarms_per_minute(const std::vector<TraceRecord>& trace, double frame_rate) {
  if (!(frame_rate > 0.0)) throw Error("frame rate must be positive");
  if (trace.empty()) return 0.0;
  std::size_t edges = 0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (trace[i].alarm && (i == 0 || !trace[i - 1].alarm)) ++edges;
  }
  return static_cast<double>(edges) / (static_cast<double>(trace.size()) / frame_rate / 60.0);
}

}  // namespace sfm
