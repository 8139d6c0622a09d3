#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "renewalctl/sim.hpp"

namespace renewalctl {

// ---------------------------------------------------------------------------
// Built-in scenario catalog. Each builder returns a complete Scenario with
// experiment defaults; callers override V, horizon, and seed as needed.
// ---------------------------------------------------------------------------

// One task class, two modes: (energy, duration) = (1,7) and (3,4), idle up to
// 10, target processing rate 0.2.
inline TaskModel one_class_model(double rate) {
  TaskModelConfig cfg;
  cfg.num_classes = 1;
  cfg.num_modes = 2;
  cfg.energy = {1.0, 3.0};
  cfg.duration = {7.0, 4.0};
  cfg.idle_max = 10.0;
  cfg.rates = {rate};
  return build_task_model(cfg);
}

// Ten classes, two modes: mode 1 is (i, 5i), mode 2 is (2i, 3i); rates
// rho / (30 i).
inline TaskModel ten_class_model(double rho, bool for_flow) {
  TaskModelConfig cfg;
  cfg.num_classes = 10;
  cfg.num_modes = 2;
  cfg.energy.resize(20);
  cfg.duration.resize(20);
  cfg.rates.resize(10);
  for (std::size_t i = 1; i <= 10; ++i) {
    cfg.energy[(i - 1) * 2] = static_cast<double>(i);
    cfg.duration[(i - 1) * 2] = 5.0 * static_cast<double>(i);
    cfg.energy[(i - 1) * 2 + 1] = 2.0 * static_cast<double>(i);
    cfg.duration[(i - 1) * 2 + 1] = 3.0 * static_cast<double>(i);
    cfg.rates[i - 1] = rho / (30.0 * static_cast<double>(i));
  }
  cfg.idle_max = 10.0;
  cfg.has_null_class = false;  // the flow experiment drops the null option
  (void)for_flow;
  return build_task_model(cfg);
}

// Fixed-slot opportunistic transmitter: events are (arrival count, channel
// gain), the action is a transmit power from a grid, service is log(1 + S p).
inline AttributeModel opportunistic_model(std::size_t grid_points = 101, double p_max = 10.0) {
  AttributeModel m;
  m.num_constraints = 1;
  m.bounds = {0.0};
  const std::vector<double> arrivals = {0.0, 1.0, 2.0};
  const std::vector<double> arrival_probs = {0.5, 0.3, 0.2};
  const std::vector<double> gains = {0.5, 1.0, 2.0};
  const std::vector<double> gain_probs = {0.3, 0.4, 0.3};
  for (std::size_t ia = 0; ia < arrivals.size(); ++ia) {
    for (std::size_t ig = 0; ig < gains.size(); ++ig) {
      m.add_event(arrival_probs[ia] * gain_probs[ig]);
      for (std::size_t gp = 0; gp < grid_points; ++gp) {
        const double p = p_max * static_cast<double>(gp) / static_cast<double>(grid_points - 1);
        const double mu = std::log(1.0 + gains[ig] * p);
        m.add_action(1.0, {p, arrivals[ia] - mu});
      }
    }
  }
  return m;
}

// Fixed-slot server with outsourcing: events are (task size, outsourcing
// price, energy price); actions pair an accept bit with a purchased-energy
// grid; service is 2 sqrt(e).
inline AttributeModel energy_price_model(std::size_t grid_points = 51, double e_max = 4.0) {
  AttributeModel m;
  m.num_constraints = 1;
  m.bounds = {0.0};
  const std::vector<double> sizes = {0.0, 1.0, 2.0};
  const std::vector<double> size_probs = {0.3, 0.4, 0.3};
  const std::vector<double> out_prices = {1.0, 3.0};
  const std::vector<double> energy_prices = {0.5, 2.0};
  for (std::size_t is = 0; is < sizes.size(); ++is) {
    for (double phi : out_prices) {
      for (double psi : energy_prices) {
        m.add_event(size_probs[is] * 0.5 * 0.5);
        for (int accept = 0; accept <= 1; ++accept) {
          for (std::size_t gp = 0; gp < grid_points; ++gp) {
            const double e = e_max * static_cast<double>(gp) / static_cast<double>(grid_points - 1);
            const double mu = 2.0 * std::sqrt(e);
            const double size = sizes[is];
            const double cost = phi * (1.0 - accept) * size + psi * e;
            m.add_action(1.0, {cost, accept * size - mu});
          }
        }
      }
    }
  }
  return m;
}

// Smart device: read meta-data, compute with one of two modes, transmit over
// a two-state channel with one of two radios; maximize quality per unit time
// under a frame-rate and a power constraint. Small event/action sets keep the
// exhaustive policy oracle cheap.
inline AttributeModel smart_device_model(double rate_target = 0.25, double power_budget = 0.6) {
  AttributeModel m;
  m.num_constraints = 2;
  m.bounds = {0.0, 0.0};
  const double read_time = 0.5;
  struct Compute { double time, energy, quality, bits; };
  const std::vector<std::vector<Compute>> compute_modes = {
      {{1.0, 0.5, 1.0, 1.0}, {0.6, 1.2, 1.5, 1.6}},   // small tasks
      {{2.0, 1.0, 2.0, 2.0}, {1.2, 2.2, 2.6, 3.0}}};  // large tasks
  const std::vector<double> meta_probs = {0.6, 0.4};
  struct Radio { double rate, power; };
  const std::vector<Radio> radios = {{1.0, 0.8}, {2.5, 2.0}};
  const std::vector<double> channels = {1.0, 2.0};
  const std::vector<double> channel_probs = {0.5, 0.5};

  for (std::size_t b = 0; b < compute_modes.size(); ++b) {
    for (std::size_t sc = 0; sc < channels.size(); ++sc) {
      m.add_event(meta_probs[b] * channel_probs[sc]);
      for (const Compute& comp : compute_modes[b]) {
        for (const Radio& radio : radios) {
          const double tran_time = comp.bits / (radio.rate * channels[sc]);
          const double tran_energy = radio.power * tran_time;
          const double frame = read_time + comp.time + tran_time;
          const double y1 = frame - 1.0 / rate_target;
          const double y2 = comp.energy + tran_energy - power_budget * frame;
          m.add_action(frame, {-comp.quality, y1, y2});
        }
      }
    }
  }
  return m;
}

// Small constrained fractional instance for the online decision loop.
inline ConstrainedLfpInstance online_lfp_instance() {
  ConstrainedLfpInstance inst;
  inst.obj_numerator = {1.0, 2.0, -1.0, 0.5, -0.25};
  inst.obj_denominator = {2.0, 1.0, 0.5, 0.0, 1.0};
  inst.constraint_coeffs = {{1.0, 0.5, -0.25, 1.0}, {0.3, -1.0, 0.8, 0.2}};
  inst.constraint_limits = {1.0, 0.6};
  return inst;
}

inline std::vector<std::string> builtin_scenario_names() {
  return {"one_class",  "one_class_unconstrained", "ten_class",
          "flow_control_ten_class", "rate_switch", "opportunistic",
          "energy_price", "smart_device", "online_lfp"};
}

inline Scenario make_builtin_scenario(const std::string& name) {
  Scenario s;
  s.name = name;
  if (name == "one_class") {
    s.kind = ControllerKind::task_scheduler;
    s.task_model = one_class_model(0.2);
    s.control.V = 1.0;
  } else if (name == "one_class_unconstrained") {
    s.kind = ControllerKind::task_scheduler;
    s.task_model = one_class_model(0.0);
    s.control.V = 1.0;
  } else if (name == "ten_class") {
    s.kind = ControllerKind::task_scheduler;
    s.task_model = ten_class_model(0.8, false);
    s.control.V = 1.0;
  } else if (name == "flow_control_ten_class") {
    s.kind = ControllerKind::flow_control;
    s.task_model = ten_class_model(0.8, true);
    s.control.V = 100.0;
    s.control.weights.assign(10, 1.0);
    s.control.power_budget = 0.5;
  } else if (name == "rate_switch") {
    s = make_builtin_scenario("flow_control_ten_class");
    s.name = name;
    const std::uint64_t third = s.horizon / 3;
    s.rate_schedule = {{0, 1.0}, {third, 2.0}, {2 * third, 1.0}};
  } else if (name == "opportunistic") {
    s.kind = ControllerKind::fixed_frame;
    s.attribute_model = opportunistic_model();
    s.control.V = 50.0;
    s.horizon = 100'000;
  } else if (name == "energy_price") {
    s.kind = ControllerKind::fixed_frame;
    s.attribute_model = energy_price_model();
    s.control.V = 50.0;
    s.horizon = 100'000;
  } else if (name == "smart_device") {
    s.kind = ControllerKind::algorithm2;
    s.attribute_model = smart_device_model();
    s.control.V = 50.0;
    s.control.rate_target = 0.25;
    s.control.power_budget = 0.6;
    s.horizon = 100'000;
  } else if (name == "online_lfp") {
    s.kind = ControllerKind::online_lfp;
    s.lfp_instance = online_lfp_instance();
    s.control.V = 1000.0;
  } else {
    throw std::invalid_argument("unknown scenario: " + name);
  }
  return s;
}

// Re-anchor the rate-switch phases when the horizon is overridden.
inline void rescale_rate_schedule(Scenario& s) {
  if (s.name == "rate_switch" && s.rate_schedule.size() == 3) {
    const std::uint64_t third = s.horizon / 3;
    s.rate_schedule[1].start_frame = third;
    s.rate_schedule[2].start_frame = 2 * third;
  }
}

}  // namespace renewalctl
