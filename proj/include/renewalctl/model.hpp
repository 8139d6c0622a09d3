#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "renewalctl/rng.hpp"

namespace renewalctl {

// ---------------------------------------------------------------------------
// Task system: N task classes, a finite set of processing modes, and a
// per-frame idle knob. Class 0 is the null choice (process nothing); real
// classes are 1..N. Modes are 1..num_modes.
// ---------------------------------------------------------------------------

enum class NoiseKind { deterministic, uniform, exponential_shifted };

// Outcome distribution for one (class, mode) table entry. Every kind keeps the
// configured means exact: uniform widths are validated at build time so the
// floors at duration_min and at zero energy never truncate.
struct NoiseSpec {
  NoiseKind kind = NoiseKind::deterministic;
  double width = 0.0;  // half-width of uniform(+-w); unused otherwise
};

struct TaskModel {
  std::size_t num_classes = 0;  // N
  std::size_t num_modes = 0;
  std::vector<double> energy_means;    // N x M row-major mean energy per (c,m)
  std::vector<double> duration_means;  // N x M row-major mean busy time per (c,m)
  double idle_max = 0.0;
  double duration_min = 0.0;  // every busy period lasts at least this long
  std::vector<double> rates;  // per-class rate (target or arrival), size N
  bool has_null_class = false;
  double null_duration = 0.0;
  double null_energy = 0.0;
  std::vector<NoiseSpec> noise;  // per (c,m), same layout as the tables

  std::size_t table_index(std::size_t c, std::size_t m) const {
    return (c - 1) * num_modes + (m - 1);
  }
  double mean_energy(std::size_t c, std::size_t m) const {
    return c == 0 ? null_energy : energy_means[table_index(c, m)];
  }
  double mean_duration(std::size_t c, std::size_t m) const {
    return c == 0 ? null_duration : duration_means[table_index(c, m)];
  }
  const NoiseSpec& noise_spec(std::size_t c, std::size_t m) const {
    return noise[table_index(c, m)];
  }
};

// Scenario-facing description from which a validated TaskModel is built.
struct TaskModelConfig {
  std::size_t num_classes = 0;
  std::size_t num_modes = 0;
  std::vector<double> energy;    // N x M row-major
  std::vector<double> duration;  // N x M row-major
  double idle_max = 0.0;
  std::optional<double> duration_min;  // min of the table when absent
  std::vector<double> rates;           // zeros when absent
  bool has_null_class = false;
  std::optional<double> null_duration;  // defaults to duration_min
  double null_energy = 0.0;
  std::vector<NoiseSpec> noise;  // empty = deterministic, size 1 = broadcast
};

inline TaskModel build_task_model(const TaskModelConfig& cfg) {
  if (cfg.num_classes == 0) throw std::invalid_argument("task model: needs at least one class");
  if (cfg.num_modes == 0) throw std::invalid_argument("task model: empty mode set");
  const std::size_t cells = cfg.num_classes * cfg.num_modes;
  if (cfg.energy.size() != cells || cfg.duration.size() != cells)
    throw std::invalid_argument("task model: energy/duration tables must cover all (class, mode) pairs");
  double table_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cells; ++i) {
    if (!std::isfinite(cfg.energy[i]) || cfg.energy[i] < 0.0)
      throw std::invalid_argument("task model: energy entries must be finite and non-negative");
    if (!std::isfinite(cfg.duration[i]) || cfg.duration[i] <= 0.0)
      throw std::invalid_argument("task model: non-positive duration entry");
    table_min = std::min(table_min, cfg.duration[i]);
  }

  TaskModel m;
  m.num_classes = cfg.num_classes;
  m.num_modes = cfg.num_modes;
  m.energy_means = cfg.energy;
  m.duration_means = cfg.duration;

  if (!std::isfinite(cfg.idle_max) || cfg.idle_max < 0.0)
    throw std::invalid_argument("task model: idle_max must be finite and non-negative");
  m.idle_max = cfg.idle_max;

  m.duration_min = cfg.duration_min.value_or(table_min);
  if (!(m.duration_min > 0.0))
    throw std::invalid_argument("task model: duration_min must be positive");
  if (m.duration_min > table_min + 1e-15)
    throw std::invalid_argument("task model: a duration entry is below duration_min");

  if (cfg.rates.empty()) {
    m.rates.assign(cfg.num_classes, 0.0);
  } else if (cfg.rates.size() == cfg.num_classes) {
    for (double r : cfg.rates)
      if (!std::isfinite(r) || r < 0.0)
        throw std::invalid_argument("task model: rates must be finite and non-negative");
    m.rates = cfg.rates;
  } else {
    throw std::invalid_argument("task model: rates must list one value per class");
  }

  m.has_null_class = cfg.has_null_class;
  m.null_duration = cfg.null_duration.value_or(m.duration_min);
  if (cfg.has_null_class && !(m.null_duration > 0.0))
    throw std::invalid_argument("task model: null class duration must be positive");
  if (cfg.null_energy < 0.0 || !std::isfinite(cfg.null_energy))
    throw std::invalid_argument("task model: null class energy must be finite and non-negative");
  m.null_energy = cfg.null_energy;

  if (cfg.noise.empty()) {
    m.noise.assign(cells, NoiseSpec{});
  } else if (cfg.noise.size() == 1) {
    m.noise.assign(cells, cfg.noise.front());
  } else if (cfg.noise.size() == cells) {
    m.noise = cfg.noise;
  } else {
    throw std::invalid_argument("task model: noise spec must be empty, single, or one per (class, mode)");
  }
  for (std::size_t i = 0; i < cells; ++i) {
    const NoiseSpec& ns = m.noise[i];
    if (ns.kind == NoiseKind::uniform) {
      if (!(ns.width >= 0.0) || !std::isfinite(ns.width))
        throw std::invalid_argument("task model: uniform noise width must be finite and non-negative");
      // keep the floors vacuous so sampled means stay exact
      if (ns.width > m.duration_means[i] - m.duration_min + 1e-12 || ns.width > m.energy_means[i] + 1e-12)
        throw std::invalid_argument("task model: uniform noise width too large for entry " + std::to_string(i));
    }
  }
  return m;
}

// Largest busy period the model can produce; throws for unbounded noise.
inline double worst_case_duration(const TaskModel& m) {
  double worst = m.has_null_class ? m.null_duration : 0.0;
  for (std::size_t i = 0; i < m.duration_means.size(); ++i) {
    switch (m.noise[i].kind) {
      case NoiseKind::deterministic:
        worst = std::max(worst, m.duration_means[i]);
        break;
      case NoiseKind::uniform:
        worst = std::max(worst, m.duration_means[i] + m.noise[i].width);
        break;
      case NoiseKind::exponential_shifted:
        throw std::domain_error("worst_case_duration: exponential noise has unbounded support");
    }
  }
  return worst;
}

struct TaskAction {
  std::size_t task_class = 0;  // 0 = null
  std::size_t mode = 0;        // 0 only together with the null class
  double idle = 0.0;
};

struct FrameOutcome {
  std::size_t task_class = 0;
  std::size_t mode = 0;
  double busy = 0.0;    // D
  double idle = 0.0;    // I
  double energy = 0.0;  // e
  std::vector<double> admitted;  // A_n, filled by flow-control runs

  double frame_total() const { return busy + idle; }
  bool serves(std::size_t n) const { return task_class == n; }
};

// Draw the busy time and energy for one frame. Means of the draw match the
// table entries exactly; the deterministic kind returns them as-is.
inline FrameOutcome sample_outcome(const TaskModel& m, const TaskAction& a, Rng& rng) {
  FrameOutcome out;
  out.task_class = a.task_class;
  out.mode = a.mode;
  out.idle = a.idle;
  if (a.task_class == 0) {
    out.busy = m.null_duration;
    out.energy = m.null_energy;
    return out;
  }
  const double d_mean = m.mean_duration(a.task_class, a.mode);
  const double e_mean = m.mean_energy(a.task_class, a.mode);
  const NoiseSpec& ns = m.noise_spec(a.task_class, a.mode);
  switch (ns.kind) {
    case NoiseKind::deterministic:
      out.busy = d_mean;
      out.energy = e_mean;
      break;
    case NoiseKind::uniform:
      out.busy = std::max(m.duration_min, d_mean + rng.uniform(-ns.width, ns.width));
      out.energy = std::max(0.0, e_mean + rng.uniform(-ns.width, ns.width));
      break;
    case NoiseKind::exponential_shifted:
      out.busy = m.duration_min + rng.exponential(d_mean - m.duration_min);
      out.energy = rng.exponential(e_mean);
      break;
  }
  return out;
}

// Admitted arrivals over an integer number of slots: one Bernoulli trial per
// slot and class with per-slot probability rate * admit_prob.
inline std::vector<double> sample_arrivals(const std::vector<double>& rates,
                                           const std::vector<double>& admit_prob,
                                           long frame_slots, Rng& rng) {
  if (admit_prob.size() != rates.size())
    throw std::invalid_argument("sample_arrivals: admit probabilities must match class count");
  std::vector<double> arrivals(rates.size(), 0.0);
  for (std::size_t n = 0; n < rates.size(); ++n) {
    if (admit_prob[n] < 0.0 || admit_prob[n] > 1.0)
      throw std::domain_error("sample_arrivals: admit probability outside [0,1]");
    const double p = rates[n] * admit_prob[n];
    if (p > 1.0)
      throw std::domain_error("sample_arrivals: per-slot arrival probability exceeds 1");
    arrivals[n] = static_cast<double>(rng.binomial(frame_slots, p));
  }
  return arrivals;
}

inline std::vector<double> sample_arrivals(const TaskModel& m, long frame_slots,
                                           const std::vector<double>& admit_prob, Rng& rng) {
  return sample_arrivals(m.rates, admit_prob, frame_slots, rng);
}

// ---------------------------------------------------------------------------
// General attribute system: a finite event space, a finite action list per
// event, and mean frame time / attribute values per (event, action). Row l=0
// is the penalty attribute; rows 1..L carry the constrained attributes with
// bounds c_l.
// ---------------------------------------------------------------------------

struct AttributeModel {
  std::vector<double> event_probs;
  std::size_t num_constraints = 0;  // L
  std::vector<double> bounds;       // c_l, size L
  std::vector<std::size_t> offsets{0};  // action-row offsets, size num_events+1
  std::vector<double> frame_means;      // one per action row
  std::vector<double> attr_means;       // (L+1) per action row

  std::size_t num_events() const { return event_probs.size(); }
  std::size_t num_actions(std::size_t event) const { return offsets[event + 1] - offsets[event]; }
  std::size_t total_actions() const { return offsets.back(); }
  std::size_t row(std::size_t event, std::size_t action) const { return offsets[event] + action; }
  double frame_mean(std::size_t event, std::size_t action) const {
    return frame_means[row(event, action)];
  }
  double attr_mean(std::size_t event, std::size_t action, std::size_t l) const {
    return attr_means[row(event, action) * (num_constraints + 1) + l];
  }

  std::size_t add_event(double prob) {
    event_probs.push_back(prob);
    offsets.push_back(offsets.back());
    return event_probs.size() - 1;
  }
  // appends to the most recently added event
  std::size_t add_action(double frame_mean_value, const std::vector<double>& attrs) {
    if (event_probs.empty()) throw std::logic_error("attribute model: add_event first");
    if (attrs.size() != num_constraints + 1)
      throw std::invalid_argument("attribute model: action needs attribute values y_0..y_L");
    frame_means.push_back(frame_mean_value);
    attr_means.insert(attr_means.end(), attrs.begin(), attrs.end());
    ++offsets.back();
    return offsets.back() - offsets[event_probs.size() - 1] - 1;
  }
};

inline void validate_attribute_model(const AttributeModel& m) {
  if (m.event_probs.empty()) throw std::invalid_argument("attribute model: empty event space");
  double total = 0.0;
  for (double p : m.event_probs) {
    if (!std::isfinite(p) || p < 0.0)
      throw std::invalid_argument("attribute model: event probabilities must be non-negative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("attribute model: event probabilities must sum to 1");
  if (m.bounds.size() != m.num_constraints)
    throw std::invalid_argument("attribute model: bounds must list one value per constraint");
  if (m.offsets.size() != m.num_events() + 1)
    throw std::invalid_argument("attribute model: inconsistent action offsets");
  for (std::size_t w = 0; w < m.num_events(); ++w)
    if (m.num_actions(w) == 0)
      throw std::invalid_argument("attribute model: every event needs at least one action");
  if (m.frame_means.size() != m.total_actions() ||
      m.attr_means.size() != m.total_actions() * (m.num_constraints + 1))
    throw std::invalid_argument("attribute model: table sizes do not match action count");
  for (double t : m.frame_means)
    if (!std::isfinite(t) || t <= 0.0)
      throw std::invalid_argument("attribute model: frame means must be positive");
  for (double y : m.attr_means)
    if (!std::isfinite(y)) throw std::invalid_argument("attribute model: attribute means must be finite");
}

inline std::size_t sample_event(const AttributeModel& m, Rng& rng) {
  const double u = rng.uniform01();
  double acc = 0.0;
  for (std::size_t w = 0; w < m.event_probs.size(); ++w) {
    acc += m.event_probs[w];
    if (u < acc) return w;
  }
  return m.event_probs.size() - 1;
}

}  // namespace renewalctl
