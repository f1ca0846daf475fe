#pragma once

// Bump credit assignment onto recently active mixture components and the
// resulting anticipatory collision signal.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <iosfwd>
#include <vector>

#include "sfm/core.hpp"
#include "sfm/forward_model.hpp"
#include "sfm/igmm.hpp"

namespace sfm {

struct CreditConfig {
  std::size_t window = 30;  // frames of history receiving credit
  double gamma = 0.9;
  double alarm_threshold = 0.0;
  std::size_t active_set_size = 1;  // components per cell counted as active
  bool per_cell = true;             // false: a component is credited once per frame
  /// Share of mixture mass eligible for activation.
  double mass_fraction = 1.0;

  void validate() const;
};

struct ActivationEntry {
  std::int64_t t = 0;
  std::vector<std::vector<std::size_t>> cells;  // active component indices per cell
};

class ActivationHistory {
 public:
  explicit ActivationHistory(std::size_t window);

  void record(std::int64_t t, std::vector<std::vector<std::size_t>> active);
  std::size_t size() const { return entries_.size(); }
  std::size_t window() const { return window_; }
  /// Index 0 is the oldest entry.
  const ActivationEntry& operator[](std::size_t i) const { return entries_[i]; }
  const std::deque<ActivationEntry>& entries() const { return entries_; }

 private:
  std::size_t window_;
  std::deque<ActivationEntry> entries_;
};

/// Active components of every cell of `frame`, row-major.
std::vector<std::vector<std::size_t>> active_components(const ForwardModel& fm, const SensorimotorFrame& frame,
                                                        const CreditConfig& cfg);

/// Adds gamma^age to each component active in the history; age 0 is the newest entry.
/// Returns the total credit added.
double assign_credit(igmm::Mixture& mixture, const ActivationHistory& history, const CreditConfig& cfg);

/// Mean collision value of the active components over all cells.
double collision_signal(const igmm::Mixture& mixture, const std::vector<std::vector<std::size_t>>& active);
double collision_signal(const ForwardModel& fm, const SensorimotorFrame& frame, const CreditConfig& cfg);

struct TraceRecord {
  std::int64_t t = 0;
  double signal = 0.0;
  bool alarm = false;
  bool bump = false;
};

/// Replays `log` through the model. With `learn_credit`, every bump rising edge credits the
/// components active in the preceding window.
std::vector<TraceRecord> replay_collisions(ForwardModel& fm, const StreamLog& log, const CreditConfig& cfg,
                                           bool learn_credit);

/// Frames within `horizon_frames` before (and including) each bump rising edge are positives.
std::vector<bool> pre_bump_labels(const std::vector<bool>& bumps, std::size_t horizon_frames);

/// Threshold maximizing frame-level F1 of (signal >= threshold) against `labels`.
double calibrate_threshold(const std::vector<double>& signal, const std::vector<bool>& labels);

void write_trace(std::ostream& out, const std::vector<TraceRecord>& trace);

struct ContactEpisode {
  std::size_t start = 0;
  std::size_t contact = 0;  // bump rising edge
  bool static_contact = false;
};

/// One episode per bump rising edge, starting right after the previous contact ends.
std::vector<ContactEpisode> episodes_from_bumps(const std::vector<TraceRecord>& trace);

struct AnticipationResult {
  /// Frames between alarm onset and contact; -1 when the alarm is off at contact.
  std::vector<long> leads;
  std::size_t detected = 0;
  std::size_t scored = 0;  // episodes that are not static contacts
  double detection_rate() const { return scored ? static_cast<double>(detected) / static_cast<double>(scored) : 0.0; }
};

/// The onset is the start of the alarm run still active at contact (or one frame before),
/// clipped to the episode start. Static-contact episodes get a lead but are not scored.
AnticipationResult score_anticipation(const std::vector<TraceRecord>& trace,
                                      const std::vector<ContactEpisode>& episodes, std::size_t min_lead);

/// Alarm rising edges per minute.
double false_alarms_per_minute(const std::vector<TraceRecord>& trace, double frame_rate);

}  // namespace sfm
