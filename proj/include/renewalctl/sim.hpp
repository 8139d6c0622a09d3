#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "renewalctl/controllers.hpp"
#include "renewalctl/lfp.hpp"
#include "renewalctl/model.hpp"
#include "renewalctl/queues.hpp"
#include "renewalctl/rng.hpp"

namespace renewalctl {

// Ratio of cumulative sums; never an average of per-frame ratios.
inline double time_average_ratio(double cumulative_numerator, double cumulative_denominator) {
  if (cumulative_denominator == 0.0)
    throw std::domain_error("time_average_ratio: zero cumulative denominator");
  return cumulative_numerator / cumulative_denominator;
}

// Windowed ratio of sums over the trailing `window` entries.
class MovingRatio {
 public:
  explicit MovingRatio(std::size_t window) : window_(window) {
    if (window_ == 0) throw std::invalid_argument("MovingRatio: window must be at least 1");
  }
  void push(double num, double den) {
    num_ += num;
    den_ += den;
    recent_.emplace_back(num, den);
    if (recent_.size() > window_) {
      num_ -= recent_.front().first;
      den_ -= recent_.front().second;
      recent_.pop_front();
    }
  }
  double value() const { return den_ != 0.0 ? num_ / den_ : 0.0; }

 private:
  std::size_t window_;
  double num_ = 0.0;
  double den_ = 0.0;
  std::deque<std::pair<double, double>> recent_;
};

inline std::vector<double> moving_average(const std::vector<double>& numerators,
                                          const std::vector<double>& denominators,
                                          std::size_t window) {
  if (denominators.size() != numerators.size())
    throw std::invalid_argument("moving_average: series must have equal length");
  MovingRatio ratio(window);
  std::vector<double> out;
  out.reserve(numerators.size());
  for (std::size_t i = 0; i < numerators.size(); ++i) {
    ratio.push(numerators[i], denominators[i]);
    out.push_back(ratio.value());
  }
  return out;
}

// Moving average of a plain stream (denominator 1 per entry).
inline std::vector<double> moving_average(const std::vector<double>& stream, std::size_t window) {
  return moving_average(stream, std::vector<double>(stream.size(), 1.0), window);
}

// ---------------------------------------------------------------------------
// Scenarios
// ---------------------------------------------------------------------------

enum class ControllerKind {
  task_scheduler,  // always-available tasks, rate targets
  flow_control,    // random arrivals, admission + service + power budget
  algorithm1,      // event-aware bisection rule
  algorithm2,      // event-aware running-ratio rule
  fixed_frame,     // unit/constant frame drift-plus-penalty rule
  online_lfp,      // per-frame box LFP over a constrained instance
};

inline const char* to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::task_scheduler: return "task_scheduler";
    case ControllerKind::flow_control: return "flow_control";
    case ControllerKind::algorithm1: return "algorithm1";
    case ControllerKind::algorithm2: return "algorithm2";
    case ControllerKind::fixed_frame: return "fixed_frame";
    case ControllerKind::online_lfp: return "online_lfp";
  }
  return "unknown";
}

struct RatePhase {
  std::uint64_t start_frame = 0;
  double multiplier = 1.0;
};

struct Scenario {
  std::string name;
  ControllerKind kind = ControllerKind::task_scheduler;
  TaskModel task_model;                // task_scheduler / flow_control
  AttributeModel attribute_model;      // algorithm1 / algorithm2 / fixed_frame
  ConstrainedLfpInstance lfp_instance; // online_lfp
  ControllerConfig control;
  std::uint64_t horizon = 1'000'000;
  std::uint64_t seed = 1;
  std::vector<RatePhase> rate_schedule;  // flow_control arrival-rate multipliers
  std::size_t moving_window = 10'000;
  std::size_t theta_window = 0;  // 0 = running ratio since frame 0
  double bisection_tol = 1e-9;   // algorithm1
};

inline bool uses_task_model(ControllerKind kind) {
  return kind == ControllerKind::task_scheduler || kind == ControllerKind::flow_control;
}

// Constants for the performance bounds of a task system: the conservative
// drift constant B, the oracle power, and the smallest beta valid for every
// action in the grid.
inline AnalysisConstants compute_analysis_constants(const TaskModel& model,
                                                    const std::vector<double>& rates) {
  AnalysisConstants out;
  out.drift_bound = compute_drift_bound(model, rates);
  out.duration_min = model.duration_min;
  const StationaryPolicy opt = stationary_policy_optimum(model, rates, model.idle_max);
  if (opt.status != LfpStatus::optimal)
    throw std::domain_error("compute_analysis_constants: no feasible stationary policy");
  out.power_opt = opt.power;
  for (std::size_t c = 1; c <= model.num_classes; ++c)
    for (std::size_t m = 1; m <= model.num_modes; ++m)
      for (double idle : {0.0, model.idle_max})
        out.beta = std::max(out.beta, std::abs(opt.power * (model.mean_duration(c, m) + idle) -
                                               model.mean_energy(c, m)));
  return out;
}

inline bool uses_attribute_model(ControllerKind kind) {
  return kind == ControllerKind::algorithm1 || kind == ControllerKind::algorithm2 ||
         kind == ControllerKind::fixed_frame;
}

inline void validate_scenario(const Scenario& s) {
  if (s.horizon < 1) throw std::invalid_argument("scenario: horizon must be at least 1");
  if (!s.rate_schedule.empty()) {
    if (s.kind != ControllerKind::flow_control)
      throw std::invalid_argument("scenario: rate_schedule applies to flow_control only");
    for (std::size_t i = 1; i < s.rate_schedule.size(); ++i)
      if (s.rate_schedule[i].start_frame <= s.rate_schedule[i - 1].start_frame)
        throw std::invalid_argument("scenario: rate_schedule frames must be strictly increasing");
  }
  if (uses_task_model(s.kind)) {
    if (s.task_model.num_classes == 0)
      throw std::invalid_argument("scenario: task model required for this controller");
  } else if (uses_attribute_model(s.kind)) {
    validate_attribute_model(s.attribute_model);
    if (s.kind == ControllerKind::fixed_frame && !constant_frame_size(s.attribute_model))
      throw std::domain_error("scenario: fixed_frame requires a constant frame size");
  } else {
    validate_constrained_lfp(s.lfp_instance);
  }
}

// One recorded frame. For event systems `task_class` holds the event index
// and `mode` the action index; for the online LFP both stay 0.
struct FrameTrace {
  std::uint64_t frame = 0;
  std::size_t task_class = 0;
  std::size_t mode = 0;
  double idle = 0.0;
  double busy = 0.0;       // busy time (event systems: the full frame)
  double energy = 0.0;     // energy (event systems: y_0)
  double frame_time = 0.0;
  std::vector<double> admitted;       // per-class admissions (flow control)
  std::vector<double> queues;         // snapshot after the frame's updates
  double theta = 0.0;
  double running_power = 0.0;          // cumulative energy / cumulative time
  std::vector<double> running_rates;   // per class: served/time; events: y_l/time
  double running_admission = 0.0;      // flow control only
  double moving_admission = 0.0;       // flow control only
};

struct RunSummary {
  std::string scenario;
  std::string controller;
  double v = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t frames = 0;

  double avg_energy = 0.0;      // per frame
  double avg_busy = 0.0;
  double avg_idle = 0.0;
  double avg_frame_time = 0.0;
  double power = 0.0;           // cumulative energy / cumulative time
  double objective = 0.0;       // generic ratio objective (== power for task systems)
  std::vector<double> mode_fractions;
  std::vector<double> served_fractions;  // per class fraction of frames
  std::vector<double> rates;             // per class served / cumulative time
  std::vector<double> avg_admitted;      // per class per frame
  std::vector<double> admission_rates;   // per class admitted / cumulative time
  double total_admission_rate = 0.0;
  double theta = 0.0;
  std::vector<double> x_avg;             // online LFP time-averaged decision

  std::vector<std::string> queue_labels;
  std::vector<double> final_queues;
  std::vector<double> max_queues;
  std::vector<double> gaps;                   // (Q[K] - Q[0]) / K
  std::vector<double> queue_increment_sums;   // sum of (arrival - service)
};

struct RunOptions {
  bool collect_trace = false;
  std::uint64_t trace_stride = 0;  // 0 = every frame up to 10^4 rows, strided after
  std::function<void(const FrameTrace&)> observer;  // called every frame
};

struct RunResult {
  RunSummary summary;
  std::vector<FrameTrace> trace;
};

namespace detail {

inline std::uint64_t auto_stride(std::uint64_t horizon, std::uint64_t requested) {
  if (requested > 0) return requested;
  return horizon <= 10'000 ? 1 : horizon / 10'000;
}

inline double phase_multiplier(const std::vector<RatePhase>& schedule, std::uint64_t frame) {
  double mult = 1.0;
  for (const RatePhase& p : schedule) {
    if (frame >= p.start_frame) mult = p.multiplier;
    else break;
  }
  return mult;
}

inline void fill_queue_stats(const QueueBank& bank, std::uint64_t frames, RunSummary& out) {
  for (const VirtualQueue& q : bank.queues) {
    out.queue_labels.push_back(q.label);
    out.final_queues.push_back(q.value);
    out.max_queues.push_back(q.max_value);
    out.gaps.push_back(constraint_gap(q, frames));
    out.queue_increment_sums.push_back(q.increment_sum);
  }
}

}  // namespace detail

inline RunResult run_scenario(const Scenario& s, const RunOptions& opts = {}) {
  validate_scenario(s);
  RunResult result;
  RunSummary& sum = result.summary;
  sum.scenario = s.name;
  sum.controller = to_string(s.kind);
  sum.v = s.control.V;
  sum.seed = s.seed;
  sum.frames = s.horizon;

  Rng rng(s.seed);
  const std::uint64_t stride = detail::auto_stride(s.horizon, opts.trace_stride);
  const bool tracing = opts.collect_trace || static_cast<bool>(opts.observer);
  FrameTrace row;

  auto emit = [&](std::uint64_t k) {
    if (!tracing) return;
    if (opts.observer) opts.observer(row);
    if (opts.collect_trace && k % stride == 0) result.trace.push_back(row);
  };

  if (uses_task_model(s.kind)) {
    const TaskModel& model = s.task_model;
    const std::size_t n_classes = model.num_classes;
    const bool flow = s.kind == ControllerKind::flow_control;

    QueueBank bank;  // one queue per class; the power queue Z lives beside it
    for (std::size_t n = 1; n <= n_classes; ++n)
      bank.queues.push_back(make_queue("Q_" + std::to_string(n)));
    VirtualQueue power_queue = make_queue("Z");

    double cum_energy = 0.0, cum_busy = 0.0, cum_idle = 0.0, cum_time = 0.0;
    std::vector<double> served(n_classes, 0.0);
    std::vector<double> admitted(n_classes, 0.0);
    std::vector<double> mode_frames(model.num_modes + 1, 0.0);  // [0] = null
    std::vector<double> rates_now(n_classes, 0.0);
    MovingRatio moving_admit(std::max<std::size_t>(s.moving_window, 1));

    for (std::uint64_t k = 0; k < s.horizon; ++k) {
      TaskDecision dec;
      std::vector<double> admit;
      if (flow) {
        admit = flow_control_decision(bank, s.control);
        dec = flow_task_decision(model, bank, power_queue.value, s.control);
      } else {
        dec = task_schedule_decision(model, bank, s.control);
      }

      FrameOutcome out = sample_outcome(model, TaskAction{dec.task_class, dec.mode, dec.idle}, rng);
      const double frame_time = out.frame_total();
      double admitted_now = 0.0;
      if (flow) {
        const double mult = detail::phase_multiplier(s.rate_schedule, k);
        for (std::size_t n = 0; n < n_classes; ++n) rates_now[n] = model.rates[n] * mult;
        out.admitted = sample_arrivals(rates_now, admit, std::llround(frame_time), rng);
        for (std::size_t n = 0; n < n_classes; ++n) {
          queue_update(bank.queues[n], out.admitted[n], out.serves(n + 1) ? 1.0 : 0.0);
          admitted[n] += out.admitted[n];
          admitted_now += out.admitted[n];
        }
        queue_update(power_queue, out.energy, s.control.power_budget * frame_time);
      } else {
        for (std::size_t n = 0; n < n_classes; ++n)
          queue_update(bank.queues[n], model.rates[n] * frame_time, out.serves(n + 1) ? 1.0 : 0.0);
      }
      ++bank.frames;

      cum_energy += out.energy;
      cum_busy += out.busy;
      cum_idle += out.idle;
      cum_time += frame_time;
      if (out.task_class > 0) served[out.task_class - 1] += 1.0;
      mode_frames[out.mode] += 1.0;
      moving_admit.push(admitted_now, frame_time);

      if (tracing) {
        row.frame = k;
        row.task_class = out.task_class;
        row.mode = out.mode;
        row.idle = out.idle;
        row.busy = out.busy;
        row.energy = out.energy;
        row.frame_time = frame_time;
        row.admitted = out.admitted;
        row.queues.resize(n_classes + (flow ? 1 : 0));
        for (std::size_t n = 0; n < n_classes; ++n) row.queues[n] = bank.queues[n].value;
        if (flow) row.queues[n_classes] = power_queue.value;
        row.theta = 0.0;
        row.running_power = cum_energy / cum_time;
        row.running_rates.resize(n_classes);
        for (std::size_t n = 0; n < n_classes; ++n) row.running_rates[n] = served[n] / cum_time;
        if (flow) {
          double total_admitted = 0.0;
          for (double a : admitted) total_admitted += a;
          row.running_admission = total_admitted / cum_time;
          row.moving_admission = moving_admit.value();
        }
        emit(k);
      }
    }

    const double frames = static_cast<double>(s.horizon);
    sum.avg_energy = cum_energy / frames;
    sum.avg_busy = cum_busy / frames;
    sum.avg_idle = cum_idle / frames;
    sum.avg_frame_time = cum_time / frames;
    sum.power = time_average_ratio(cum_energy, cum_time);
    sum.objective = sum.power;
    sum.mode_fractions.assign(model.num_modes, 0.0);
    for (std::size_t m = 1; m <= model.num_modes; ++m) sum.mode_fractions[m - 1] = mode_frames[m] / frames;
    sum.served_fractions.resize(n_classes);
    sum.rates.resize(n_classes);
    for (std::size_t n = 0; n < n_classes; ++n) {
      sum.served_fractions[n] = served[n] / frames;
      sum.rates[n] = served[n] / cum_time;
    }
    if (flow) {
      sum.avg_admitted.resize(n_classes);
      sum.admission_rates.resize(n_classes);
      double total = 0.0;
      for (std::size_t n = 0; n < n_classes; ++n) {
        sum.avg_admitted[n] = admitted[n] / frames;
        sum.admission_rates[n] = admitted[n] / cum_time;
        total += admitted[n];
      }
      sum.total_admission_rate = total / cum_time;
    }
    detail::fill_queue_stats(bank, s.horizon, sum);
    if (flow) {
      sum.queue_labels.push_back(power_queue.label);
      sum.final_queues.push_back(power_queue.value);
      sum.max_queues.push_back(power_queue.max_value);
      sum.gaps.push_back(constraint_gap(power_queue, s.horizon));
      sum.queue_increment_sums.push_back(power_queue.increment_sum);
    }
    return result;
  }

  if (uses_attribute_model(s.kind)) {
    const AttributeModel& attr = s.attribute_model;
    const std::size_t n_cons = attr.num_constraints;

    QueueBank bank;
    for (std::size_t l = 1; l <= n_cons; ++l)
      bank.queues.push_back(make_queue("Q_" + std::to_string(l)));
    ThetaTracker theta(s.theta_window);

    double cum_y0 = 0.0, cum_time = 0.0;
    std::vector<double> cum_attr(n_cons, 0.0);

    for (std::uint64_t k = 0; k < s.horizon; ++k) {
      const std::size_t event = sample_event(attr, rng);
      std::size_t action = 0;
      switch (s.kind) {
        case ControllerKind::algorithm1:
          action = algorithm1_policy(attr, bank, s.control, s.bisection_tol).actions[event];
          break;
        case ControllerKind::algorithm2:
          action = algorithm2_decision(attr, event, bank, theta, s.control);
          break;
        default:
          action = fixed_frame_decision(attr, event, bank, s.control);
          break;
      }

      const double frame_time = attr.frame_mean(event, action);
      const double y0 = attr.attr_mean(event, action, 0);
      for (std::size_t l = 1; l <= n_cons; ++l) {
        const double yl = attr.attr_mean(event, action, l);
        queue_update(bank.queues[l - 1], yl, attr.bounds[l - 1] * frame_time);
        cum_attr[l - 1] += yl;
      }
      ++bank.frames;
      theta.push(y0, frame_time);
      cum_y0 += y0;
      cum_time += frame_time;

      if (tracing) {
        row.frame = k;
        row.task_class = event;
        row.mode = action;
        row.idle = 0.0;
        row.busy = frame_time;
        row.energy = y0;
        row.frame_time = frame_time;
        row.queues.resize(n_cons);
        for (std::size_t l = 0; l < n_cons; ++l) row.queues[l] = bank.queues[l].value;
        row.theta = theta.value();
        row.running_power = cum_y0 / cum_time;
        row.running_rates.resize(n_cons);
        for (std::size_t l = 0; l < n_cons; ++l) row.running_rates[l] = cum_attr[l] / cum_time;
        emit(k);
      }
    }

    const double frames = static_cast<double>(s.horizon);
    sum.avg_energy = cum_y0 / frames;
    sum.avg_busy = cum_time / frames;
    sum.avg_frame_time = cum_time / frames;
    sum.power = time_average_ratio(cum_y0, cum_time);
    sum.objective = sum.power;
    sum.theta = theta.value();
    detail::fill_queue_stats(bank, s.horizon, sum);
    return result;
  }

  // online_lfp: deterministic per-frame box LFP at the current queue vector
  const ConstrainedLfpInstance& inst = s.lfp_instance;
  const std::size_t m = inst.size();
  const std::size_t n_cons = inst.constraint_coeffs.size();

  QueueBank bank;
  for (std::size_t l = 1; l <= n_cons; ++l)
    bank.queues.push_back(make_queue("Q_" + std::to_string(l)));

  double cum_y0 = 0.0, cum_time = 0.0;
  std::vector<double> cum_x(m, 0.0);

  BoxLfpInstance box;
  box.numerator.resize(m + 1);
  box.denominator = inst.obj_denominator;

  for (std::uint64_t k = 0; k < s.horizon; ++k) {
    box.numerator[0] = s.control.V * inst.obj_numerator[0];
    for (std::size_t l = 0; l < n_cons; ++l)
      box.numerator[0] -= bank.queues[l].value * inst.constraint_limits[l];
    for (std::size_t i = 0; i < m; ++i) {
      double phi = s.control.V * inst.obj_numerator[i + 1];
      for (std::size_t l = 0; l < n_cons; ++l)
        phi += bank.queues[l].value * inst.constraint_coeffs[l][i];
      box.numerator[i + 1] = phi;
    }
    const BoxLfpSolution choice = solve_box_lfp(box);

    double y0 = inst.obj_numerator[0];
    double frame_time = inst.obj_denominator[0];
    for (std::size_t i = 0; i < m; ++i) {
      y0 += inst.obj_numerator[i + 1] * choice.x[i];
      frame_time += inst.obj_denominator[i + 1] * choice.x[i];
      cum_x[i] += choice.x[i];
    }
    for (std::size_t l = 0; l < n_cons; ++l) {
      double yl = -inst.constraint_limits[l];
      for (std::size_t i = 0; i < m; ++i) yl += inst.constraint_coeffs[l][i] * choice.x[i];
      queue_update(bank.queues[l], yl, 0.0);
    }
    ++bank.frames;
    cum_y0 += y0;
    cum_time += frame_time;

    if (tracing) {
      row.frame = k;
      row.task_class = 0;
      row.mode = 0;
      row.idle = 0.0;
      row.busy = frame_time;
      row.energy = y0;
      row.frame_time = frame_time;
      row.queues.resize(n_cons);
      for (std::size_t l = 0; l < n_cons; ++l) row.queues[l] = bank.queues[l].value;
      row.theta = 0.0;
      row.running_power = cum_y0 / cum_time;
      row.running_rates.assign(choice.x.begin(), choice.x.end());
      emit(k);
    }
  }

  const double frames = static_cast<double>(s.horizon);
  sum.avg_energy = cum_y0 / frames;
  sum.avg_frame_time = cum_time / frames;
  sum.power = time_average_ratio(cum_y0, cum_time);
  sum.objective = sum.power;
  sum.x_avg.resize(m);
  for (std::size_t i = 0; i < m; ++i) sum.x_avg[i] = cum_x[i] / frames;
  detail::fill_queue_stats(bank, s.horizon, sum);
  return result;
}

}  // namespace renewalctl
