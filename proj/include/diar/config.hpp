#pragma once

#include <limits>
#include <string>

namespace diar {

struct MetricSet {
  bool der = true;
  bool jer = true;
  bool cder = true;
  bool ser = true;
  bool ber = true;
};

// Parses a comma-separated list like "der,ser,ber". Throws
// std::invalid_argument on an unknown metric name.
MetricSet parse_metric_set(const std::string& list);

// Every scoring tunable in one place. Defaults follow the reference
// configuration: zero boundary collar, overlap included, IoU lower bound
// 0.5, fixed IoU 0.5 for CDER.
struct ScoringConfig {
  double der_collar = 0.0;   // seconds excised around reference boundaries (DER only)
  double iou_collar = 0.25;  // seconds, feeds the adaptive IoU threshold
  double lb = 0.5;           // adaptive IoU lower bound
  double eps = 1e-6;         // harmonic-mean regularizer
  double cder_iou = 0.5;     // fixed IoU threshold for CDER
  double cder_max_gap = std::numeric_limits<double>::infinity();  // merge gap bound
  MetricSet metrics;
};

}  // namespace diar
