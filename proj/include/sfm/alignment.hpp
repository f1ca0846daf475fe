#pragma once

// Sensorimotor delay estimation: pick the action-stream shift that maximizes
// held-out predictive likelihood of the flow stream.

#include <cstddef>
#include <map>
#include <vector>

#include "sfm/core.hpp"
#include "sfm/forward_model.hpp"

namespace sfm {

struct AlignmentConfig {
  ForwardModelConfig model;
  double train_fraction = 0.7;
  /// Mixture mass scored per held-out pair. A truncated set makes single pairs dominate the mean.
  double mass_fraction = 1.0;
};

struct AlignmentResult {
  int best_delay = 0;
  std::map<int, double> scores;            // mean held-out log-likelihood per delay
  std::map<int, std::size_t> n_pairs;      // held-out pairs scored per delay
  std::vector<int> absent;                 // candidates without enough data
};

/// Frame t keeps its flow and bump but takes the action/proprioception of frame t - d.
/// The first d frames are dropped.
StreamLog apply_delay(const StreamLog& log, int d);

/// Default candidate set 0..15.
std::vector<int> default_delay_candidates();

AlignmentResult estimate_delay(const StreamLog& log, const std::vector<int>& candidates,
                               const AlignmentConfig& config = {});

}  // namespace sfm
