#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "renewalctl/model.hpp"
#include "renewalctl/queues.hpp"

namespace renewalctl {

// Penalty weight plus the constants the decision rules read. Ties in every
// argmin below resolve to the lowest class index, then the lowest mode index,
// then the smaller idle time; that is the enumeration order used throughout,
// and it keeps traces reproducible.
struct ControllerConfig {
  double V = 0.0;
  double additive_slack = 0.0;  // C: accepted gap to the exact per-frame minimum
  std::vector<double> weights;  // w_n (flow control); empty = all ones
  double power_budget = 0.0;    // P_av
  double rate_target = 0.0;     // lambda for frame-rate constraints

  double weight(std::size_t n) const { return weights.empty() ? 1.0 : weights[n]; }
};

struct AnalysisConstants {
  double drift_bound = 0.0;  // B
  double beta = 0.0;
  double power_opt = 0.0;
  double duration_min = 0.0;
};

// Running ratio theta[k] = (sum of y_0) / (sum of T), optionally over a
// sliding window of the most recent frames.
class ThetaTracker {
 public:
  ThetaTracker() = default;
  explicit ThetaTracker(std::size_t window) : window_(window) {}

  double value() const { return den_ > 0.0 ? num_ / den_ : 0.0; }
  std::size_t window() const { return window_; }

  void push(double y0, double frame_time) {
    num_ += y0;
    den_ += frame_time;
    if (window_ == 0) return;
    recent_.emplace_back(y0, frame_time);
    if (recent_.size() > window_) {
      num_ -= recent_.front().first;
      den_ -= recent_.front().second;
      recent_.pop_front();
    }
  }

 private:
  std::size_t window_ = 0;  // 0 = average since frame 0
  double num_ = 0.0;
  double den_ = 0.0;
  std::deque<std::pair<double, double>> recent_;
};

struct TaskDecision {
  std::size_t task_class = 0;
  std::size_t mode = 0;
  double idle = 0.0;
};

// Idle endpoint for a fixed (class, mode): the per-frame ratio has a constant
// numerator in I, so only I = 0 or I = idle_max can be optimal.
inline double idle_choice(const TaskModel& model, std::size_t c, std::size_t m,
                          double queue_value, const ControllerConfig& cfg) {
  return cfg.V * model.mean_energy(c, m) - queue_value <= 0.0 ? 0.0 : model.idle_max;
}

// Scheduler for always-available tasks: minimize
// (V e(c,m) - Q_c) / (D(c,m) + idle(c,m)) over classes and modes.
inline TaskDecision task_schedule_decision(const TaskModel& model, const QueueBank& bank,
                                           const ControllerConfig& cfg) {
  if (bank.queues.size() < model.num_classes)
    throw std::invalid_argument("task_schedule_decision: one queue per class required");
  TaskDecision best;
  double best_val = std::numeric_limits<double>::infinity();
  for (std::size_t c = 1; c <= model.num_classes; ++c) {
    const double q = bank.queues[c - 1].value;
    for (std::size_t m = 1; m <= model.num_modes; ++m) {
      const double num = cfg.V * model.mean_energy(c, m) - q;
      const double idle = num <= 0.0 ? 0.0 : model.idle_max;
      const double val = num / (model.mean_duration(c, m) + idle);
      if (val < best_val) {
        best_val = val;
        best = TaskDecision{c, m, idle};
      }
    }
  }
  return best;
}

// General per-frame rule: pick the action minimizing
// [V y_0 + sum_l Q_l y_l] / T over the event's action list.
inline std::size_t general_ratio_decision(const AttributeModel& attr, std::size_t event,
                                          const QueueBank& bank, const ControllerConfig& cfg) {
  const std::size_t actions = attr.num_actions(event);
  if (actions == 0) throw std::invalid_argument("general_ratio_decision: empty action set");
  std::size_t best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < actions; ++a) {
    double num = cfg.V * attr.attr_mean(event, a, 0);
    for (std::size_t l = 1; l <= attr.num_constraints; ++l)
      num += bank.queues[l - 1].value * attr.attr_mean(event, a, l);
    const double val = num / attr.frame_mean(event, a);
    if (val < best_val) {
      best_val = val;
      best = a;
    }
  }
  return best;
}

// Bang-bang admission: admit class n this frame iff Q_n <= V w_n. Needs no
// knowledge of the arrival rates.
inline std::vector<double> flow_control_decision(const QueueBank& bank,
                                                 const ControllerConfig& cfg) {
  std::vector<double> admit(bank.queues.size(), 0.0);
  for (std::size_t n = 0; n < bank.queues.size(); ++n)
    admit[n] = bank.queues[n].value <= cfg.V * cfg.weight(n) ? 1.0 : 0.0;
  return admit;
}

// Service rule under flow control: minimize [Z e(c,m) - Q_c] / (D(c,m) + I)
// over classes (including the null class when the model has one), modes, and
// the idle endpoints. V plays no role here; it enters through admission only.
inline TaskDecision flow_task_decision(const TaskModel& model, const QueueBank& bank,
                                       double power_queue, const ControllerConfig&) {
  if (bank.queues.size() < model.num_classes)
    throw std::invalid_argument("flow_task_decision: one queue per class required");
  TaskDecision best;
  double best_val = std::numeric_limits<double>::infinity();
  auto consider = [&](std::size_t c, std::size_t m, double queue_value) {
    const double num = power_queue * model.mean_energy(c, m) - queue_value;
    const double idle = num <= 0.0 ? 0.0 : model.idle_max;
    const double val = num / (model.mean_duration(c, m) + idle);
    if (val < best_val) {
      best_val = val;
      best = TaskDecision{c, m, idle};
    }
  };
  if (model.has_null_class) consider(0, 0, 0.0);
  for (std::size_t c = 1; c <= model.num_classes; ++c)
    for (std::size_t m = 1; m <= model.num_modes; ++m) consider(c, m, bank.queues[c - 1].value);
  return best;
}

// Running-ratio rule: minimize
// V [y_0 - theta T] + sum_l Q_l [y_l - c_l T] over the event's actions.
inline std::size_t algorithm2_decision(const AttributeModel& attr, std::size_t event,
                                       const QueueBank& bank, const ThetaTracker& theta,
                                       const ControllerConfig& cfg) {
  const std::size_t actions = attr.num_actions(event);
  if (actions == 0) throw std::invalid_argument("algorithm2_decision: empty action set");
  const double th = theta.value();
  if (!std::isfinite(th)) throw std::invalid_argument("algorithm2_decision: non-finite running ratio");
  std::size_t best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < actions; ++a) {
    const double t = attr.frame_mean(event, a);
    double val = cfg.V * (attr.attr_mean(event, a, 0) - th * t);
    for (std::size_t l = 1; l <= attr.num_constraints; ++l)
      val += bank.queues[l - 1].value * (attr.attr_mean(event, a, l) - attr.bounds[l - 1] * t);
    if (val < best_val) {
      best_val = val;
      best = a;
    }
  }
  return best;
}

struct RatioPolicy {
  std::vector<std::size_t> actions;  // one per event
  double ratio = 0.0;                // E[numerator] / E[frame time] it attains
  double root = 0.0;                 // bisection point
};

// Event-aware ratio minimization. The expected minimized value of
// numerator - h * T is nonincreasing in h; bisection finds the root h*, and
// the per-event argmin at h* attains ratio h*. Needs the event distribution.
inline RatioPolicy algorithm1_policy(const AttributeModel& attr, const QueueBank& bank,
                                     const ControllerConfig& cfg, double tol = 1e-9) {
  if (!(tol > 0.0)) throw std::invalid_argument("algorithm1_policy: tol must be positive");
  const std::size_t events = attr.num_events();
  const std::size_t stride = attr.num_constraints + 1;

  // numerators at the current queue vector, one per action row
  std::vector<double> num(attr.total_actions());
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t w = 0; w < events; ++w) {
    if (attr.num_actions(w) == 0) throw std::invalid_argument("algorithm1_policy: empty action set");
    for (std::size_t a = 0; a < attr.num_actions(w); ++a) {
      const std::size_t r = attr.row(w, a);
      double v = cfg.V * attr.attr_means[r * stride];
      for (std::size_t l = 1; l < stride; ++l)
        v += bank.queues[l - 1].value * attr.attr_means[r * stride + l];
      num[r] = v;
      const double ratio = v / attr.frame_means[r];
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
  }

  auto expected_min = [&](double h) {
    double total = 0.0;
    for (std::size_t w = 0; w < events; ++w) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < attr.num_actions(w); ++a) {
        const std::size_t r = attr.row(w, a);
        best = std::min(best, num[r] - h * attr.frame_means[r]);
      }
      total += attr.event_probs[w] * best;
    }
    return total;
  };

  for (int iter = 0; iter < 200 && hi - lo > tol; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (expected_min(mid) > 0.0 ? lo : hi) = mid;
  }
  const double h = 0.5 * (lo + hi);

  RatioPolicy out;
  out.root = h;
  out.actions.resize(events);
  double policy_num = 0.0;
  double policy_den = 0.0;
  for (std::size_t w = 0; w < events; ++w) {
    std::size_t best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < attr.num_actions(w); ++a) {
      const std::size_t r = attr.row(w, a);
      const double v = num[r] - h * attr.frame_means[r];
      if (v < best_val) {
        best_val = v;
        best = a;
      }
    }
    out.actions[w] = best;
    const std::size_t r = attr.row(w, best);
    policy_num += attr.event_probs[w] * num[r];
    policy_den += attr.event_probs[w] * attr.frame_means[r];
  }
  out.ratio = policy_den > 0.0 ? policy_num / policy_den : 0.0;
  return out;
}

inline bool constant_frame_size(const AttributeModel& attr, double rel_tol = 1e-9) {
  if (attr.frame_means.empty()) return true;
  const double t0 = attr.frame_means.front();
  for (double t : attr.frame_means)
    if (std::abs(t - t0) > rel_tol * std::max(1.0, std::abs(t0))) return false;
  return true;
}

// Fixed-slot rule: with a constant frame size the denominator drops and the
// decision is argmin of V y_0 + sum_l Q_l y_l.
inline std::size_t fixed_frame_decision(const AttributeModel& attr, std::size_t event,
                                        const QueueBank& bank, const ControllerConfig& cfg) {
  const std::size_t actions = attr.num_actions(event);
  if (actions == 0) throw std::invalid_argument("fixed_frame_decision: empty action set");
  const double t0 = attr.frame_means.front();
  for (std::size_t a = 0; a < actions; ++a)
    if (std::abs(attr.frame_mean(event, a) - t0) > 1e-9 * std::max(1.0, std::abs(t0)))
      throw std::domain_error("fixed_frame_decision: frame size is not constant");
  std::size_t best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < actions; ++a) {
    double val = cfg.V * attr.attr_mean(event, a, 0);
    for (std::size_t l = 1; l <= attr.num_constraints; ++l)
      val += bank.queues[l - 1].value * attr.attr_mean(event, a, l);
    if (val < best_val) {
      best_val = val;
      best = a;
    }
  }
  return best;
}

// Rewrite to an equivalent system with frame size 1: y'_0 = y_0,
// y'_l = y_l - c_l T, c'_l = 0. Minimizing the frame average of y_0 subject
// to ratio constraints on the original equals minimizing the ratio objective
// on the transform.
inline AttributeModel unit_frame_transform(const AttributeModel& attr) {
  AttributeModel out = attr;
  const std::size_t stride = attr.num_constraints + 1;
  for (std::size_t r = 0; r < attr.total_actions(); ++r) {
    for (std::size_t l = 1; l < stride; ++l)
      out.attr_means[r * stride + l] -= attr.bounds[l - 1] * attr.frame_means[r];
    out.frame_means[r] = 1.0;
  }
  std::fill(out.bounds.begin(), out.bounds.end(), 0.0);
  return out;
}

// Conservative drift constant: B = (1/2) sum_n max(rate_n (D_max + I_max), 1)^2
// dominates (1/2) sum_n E[(rate_n (D + I) - 1_n)^2] under every policy.
inline double compute_drift_bound(const TaskModel& model, const std::vector<double>& rates) {
  if (rates.size() != model.num_classes)
    throw std::invalid_argument("compute_drift_bound: one rate per class required");
  const double frame_max = worst_case_duration(model) + model.idle_max;
  double sum = 0.0;
  for (double r : rates) {
    const double worst = std::max(r * frame_max, 1.0);
    sum += worst * worst;
  }
  return 0.5 * sum;
}

}  // namespace renewalctl
