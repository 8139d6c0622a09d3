#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace renewalctl {

// One scalar backlog driven by max[Q + arrival - service, 0]. The running
// increment sum costs one add per frame and lets any run certify its
// constraint gap without storing history; full (arrival, service) history is
// opt-in for replay diagnostics.
struct VirtualQueue {
  double value = 0.0;
  std::string label;
  double initial = 0.0;
  double increment_sum = 0.0;  // running sum of (arrival - service)
  double max_value = 0.0;
  bool record_history = false;
  std::vector<std::pair<double, double>> history;
};

inline VirtualQueue make_queue(std::string label, double initial = 0.0) {
  VirtualQueue q;
  q.label = std::move(label);
  q.value = initial;
  q.initial = initial;
  q.max_value = initial;
  return q;
}

inline void queue_update(VirtualQueue& q, double arrival, double service) {
  if (!std::isfinite(arrival) || !std::isfinite(service))
    throw std::invalid_argument("queue_update: non-finite increment on " + q.label);
  q.increment_sum += arrival - service;
  q.value = std::max(q.value + arrival - service, 0.0);
  q.max_value = std::max(q.max_value, q.value);
  if (q.record_history) q.history.emplace_back(arrival, service);
}

struct QueueBank {
  std::vector<VirtualQueue> queues;
  std::uint64_t frames = 0;  // completed updates
};

// L[k] = half the sum of squared backlogs.
inline double lyapunov(const QueueBank& bank) {
  double sum = 0.0;
  for (const VirtualQueue& q : bank.queues) sum += q.value * q.value;
  return 0.5 * sum;
}

// (Q[K] - Q[0]) / K, an upper bound on the running average of
// (arrival - service) over the first K frames.
inline double constraint_gap(const VirtualQueue& q, std::uint64_t frames, double initial) {
  if (frames == 0) throw std::invalid_argument("constraint_gap: no frames elapsed");
  return (q.value - initial) / static_cast<double>(frames);
}

inline double constraint_gap(const VirtualQueue& q, std::uint64_t frames) {
  return constraint_gap(q, frames, q.initial);
}

}  // namespace renewalctl
