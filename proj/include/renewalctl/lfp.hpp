#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "renewalctl/model.hpp"
#include "renewalctl/simplex.hpp"

namespace renewalctl {

// ---------------------------------------------------------------------------
// Box-constrained linear fractional program:
//   minimize (phi_0 + phi.x) / (b_0 + b.x)  over  0 <= x_i <= 1
// with b_0 > 0 and b_i >= 0. The optimum sits at a 0/1 corner.
// ---------------------------------------------------------------------------

struct BoxLfpInstance {
  std::vector<double> numerator;    // phi_0 .. phi_M
  std::vector<double> denominator;  // b_0 .. b_M
  std::size_t size() const { return numerator.empty() ? 0 : numerator.size() - 1; }
};

struct BoxLfpSolution {
  std::vector<double> x;
  double value = 0.0;
};

inline void validate_box_lfp(const BoxLfpInstance& inst) {
  if (inst.numerator.empty() || inst.numerator.size() != inst.denominator.size())
    throw std::invalid_argument("box lfp: coefficient arrays must be non-empty and equal length");
  for (double v : inst.numerator)
    if (!std::isfinite(v)) throw std::invalid_argument("box lfp: non-finite numerator coefficient");
  if (!(inst.denominator[0] > 0.0) || !std::isfinite(inst.denominator[0]))
    throw std::invalid_argument("box lfp: b_0 must be positive");
  for (std::size_t i = 1; i < inst.denominator.size(); ++i)
    if (!(inst.denominator[i] >= 0.0) || !std::isfinite(inst.denominator[i]))
      throw std::invalid_argument("box lfp: b_i must be non-negative");
}

// Greedy rank-order rule. Variables with b_i = 0 follow the sign of phi_i.
// The rest are ranked by phi_j / b_j ascending and flipped to 1 while that
// strictly lowers the ratio; the scan stops at the first non-improvement.
inline BoxLfpSolution solve_box_lfp(const BoxLfpInstance& inst) {
  validate_box_lfp(inst);
  const std::size_t m = inst.size();
  BoxLfpSolution sol;
  sol.x.assign(m, 0.0);
  double num = inst.numerator[0];
  double den = inst.denominator[0];
  std::vector<std::size_t> ranked;
  for (std::size_t i = 1; i <= m; ++i) {
    if (inst.denominator[i] == 0.0) {
      if (inst.numerator[i] < 0.0) {
        sol.x[i - 1] = 1.0;
        num += inst.numerator[i];
      }
    } else {
      ranked.push_back(i);
    }
  }
  std::stable_sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
    return inst.numerator[a] / inst.denominator[a] < inst.numerator[b] / inst.denominator[b];
  });
  for (std::size_t j : ranked) {
    const double cand_num = num + inst.numerator[j];
    const double cand_den = den + inst.denominator[j];
    if (cand_num / cand_den < num / den) {
      sol.x[j - 1] = 1.0;
      num = cand_num;
      den = cand_den;
    } else {
      break;
    }
  }
  sol.value = num / den;
  return sol;
}

// Exhaustive corner scan; the oracle for solve_box_lfp. Ties keep the corner
// seen first in mask order (all-zeros first).
inline BoxLfpSolution brute_force_box_lfp(const BoxLfpInstance& inst, std::size_t max_vars = 16) {
  validate_box_lfp(inst);
  const std::size_t m = inst.size();
  if (m > max_vars)
    throw std::invalid_argument("brute_force_box_lfp: instance exceeds " + std::to_string(max_vars) +
                                " variables");
  BoxLfpSolution best;
  best.value = std::numeric_limits<double>::infinity();
  for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
    double num = inst.numerator[0];
    double den = inst.denominator[0];
    for (std::size_t i = 0; i < m; ++i) {
      if (mask & (std::size_t{1} << i)) {
        num += inst.numerator[i + 1];
        den += inst.denominator[i + 1];
      }
    }
    const double value = num / den;
    if (value < best.value) {
      best.value = value;
      best.x.assign(m, 0.0);
      for (std::size_t i = 0; i < m; ++i)
        if (mask & (std::size_t{1} << i)) best.x[i] = 1.0;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Fully constrained linear fractional program over the unit box:
//   minimize (a_0 + a.x) / (b_0 + b.x)
//   subject to  C x <= d,  0 <= x_i <= 1
// with b_0 > 0, b_i >= 0. Solved by a Charnes-Cooper rewrite to a linear
// program, cross-checkable with Dinkelbach's parametric iteration.
// ---------------------------------------------------------------------------

struct ConstrainedLfpInstance {
  std::vector<double> obj_numerator;    // a_0 .. a_M
  std::vector<double> obj_denominator;  // b_0 .. b_M
  std::vector<std::vector<double>> constraint_coeffs;  // L rows of length M
  std::vector<double> constraint_limits;               // d_l
  std::size_t size() const { return obj_numerator.empty() ? 0 : obj_numerator.size() - 1; }
};

enum class LfpStatus { optimal, infeasible };

struct LfpSolution {
  LfpStatus status = LfpStatus::infeasible;
  std::vector<double> x;
  double value = 0.0;
};

inline void validate_constrained_lfp(const ConstrainedLfpInstance& inst) {
  const std::size_t m = inst.size();
  if (inst.obj_numerator.empty() || inst.obj_denominator.size() != m + 1)
    throw std::invalid_argument("lfp: objective arrays must be non-empty and equal length");
  if (!(inst.obj_denominator[0] > 0.0))
    throw std::invalid_argument("lfp: b_0 must be positive");
  for (std::size_t i = 1; i <= m; ++i)
    if (inst.obj_denominator[i] < 0.0)
      throw std::invalid_argument("lfp: b_i must be non-negative");
  if (inst.constraint_coeffs.size() != inst.constraint_limits.size())
    throw std::invalid_argument("lfp: one limit per constraint row required");
  for (const auto& row : inst.constraint_coeffs)
    if (row.size() != m) throw std::invalid_argument("lfp: constraint row width mismatch");
}

inline double lfp_ratio_at(const ConstrainedLfpInstance& inst, const std::vector<double>& x) {
  double num = inst.obj_numerator[0];
  double den = inst.obj_denominator[0];
  for (std::size_t i = 0; i < inst.size(); ++i) {
    num += inst.obj_numerator[i + 1] * x[i];
    den += inst.obj_denominator[i + 1] * x[i];
  }
  return num / den;
}

// Charnes-Cooper: with y = t x and t = 1 / (b_0 + b.x), the program becomes
// the LP  min a.y + a_0 t  s.t.  b_0 t + b.y = 1, C y <= d t, y <= t, y,t >= 0.
// t > 0 at every feasible point because the box keeps the denominator finite.
inline LfpSolution charnes_cooper_solve(const ConstrainedLfpInstance& inst) {
  validate_constrained_lfp(inst);
  const std::size_t m = inst.size();
  const std::size_t t_col = m;
  std::vector<LpRow> rows;

  LpRow norm;
  norm.coeffs.assign(m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) norm.coeffs[i] = inst.obj_denominator[i + 1];
  norm.coeffs[t_col] = inst.obj_denominator[0];
  norm.op = RowOp::eq;
  norm.rhs = 1.0;
  rows.push_back(std::move(norm));

  for (std::size_t l = 0; l < inst.constraint_coeffs.size(); ++l) {
    LpRow row;
    row.coeffs.assign(m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i) row.coeffs[i] = inst.constraint_coeffs[l][i];
    row.coeffs[t_col] = -inst.constraint_limits[l];
    row.op = RowOp::le;
    row.rhs = 0.0;
    rows.push_back(std::move(row));
  }
  for (std::size_t i = 0; i < m; ++i) {
    LpRow row;
    row.coeffs.assign(m + 1, 0.0);
    row.coeffs[i] = 1.0;
    row.coeffs[t_col] = -1.0;
    row.op = RowOp::le;
    row.rhs = 0.0;
    rows.push_back(std::move(row));
  }

  std::vector<double> cost(m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) cost[i] = inst.obj_numerator[i + 1];
  cost[t_col] = inst.obj_numerator[0];

  const LpResult lp = solve_lp(rows, cost);
  LfpSolution sol;
  if (lp.status != LpStatus::optimal) return sol;
  const double t = lp.x[t_col];
  if (!(t > 0.0)) return sol;
  sol.status = LfpStatus::optimal;
  sol.x.resize(m);
  for (std::size_t i = 0; i < m; ++i) sol.x[i] = std::clamp(lp.x[i] / t, 0.0, 1.0);
  sol.value = lfp_ratio_at(inst, sol.x);
  return sol;
}

// Dinkelbach iteration: repeatedly solve the LP  min num(x) - h den(x)  and
// move h to the ratio at the minimizer, until the subproblem value is within
// tol of zero. Independent of the Charnes-Cooper route.
inline LfpSolution dinkelbach_solve(const ConstrainedLfpInstance& inst, double tol = 1e-9) {
  validate_constrained_lfp(inst);
  if (!(tol > 0.0)) throw std::invalid_argument("dinkelbach_solve: tol must be positive");
  const std::size_t m = inst.size();

  std::vector<LpRow> rows;
  for (std::size_t l = 0; l < inst.constraint_coeffs.size(); ++l) {
    LpRow row;
    row.coeffs = inst.constraint_coeffs[l];
    row.op = RowOp::le;
    row.rhs = inst.constraint_limits[l];
    rows.push_back(std::move(row));
  }
  for (std::size_t i = 0; i < m; ++i) {
    LpRow row;
    row.coeffs.assign(m, 0.0);
    row.coeffs[i] = 1.0;
    row.op = RowOp::le;
    row.rhs = 1.0;
    rows.push_back(std::move(row));
  }

  LfpSolution sol;
  // feasibility probe doubling as the starting point
  {
    const LpResult probe = solve_lp(rows, std::vector<double>(m, 0.0));
    if (probe.status != LpStatus::optimal) return sol;
    sol.x = probe.x;
  }
  double h = lfp_ratio_at(inst, sol.x);
  for (int iter = 0; iter < 100; ++iter) {
    std::vector<double> cost(m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
      cost[i] = inst.obj_numerator[i + 1] - h * inst.obj_denominator[i + 1];
    const LpResult lp = solve_lp(rows, cost);
    if (lp.status != LpStatus::optimal) return sol;  // box keeps it bounded; defensive
    const double value = lp.objective + inst.obj_numerator[0] - h * inst.obj_denominator[0];
    sol.x = lp.x;
    h = lfp_ratio_at(inst, sol.x);
    if (std::abs(value) <= tol) {
      sol.status = LfpStatus::optimal;
      sol.value = h;
      return sol;
    }
  }
  throw std::runtime_error("dinkelbach_solve: did not converge within 100 iterations");
}

// ---------------------------------------------------------------------------
// Offline optimum for the task system: the best stationary randomized policy
// (p(c,m), I) of the ratio program
//   minimize  sum p e / (I + sum p D)
//   s.t.      sum_m p(n,m) / (I + sum p D) >= rate_n,  0 <= I <= idle_max,
//             p a probability mass function.
// ---------------------------------------------------------------------------

struct StationaryPolicy {
  LfpStatus status = LfpStatus::infeasible;
  double power = 0.0;                // optimal ratio value
  std::vector<double> probabilities; // N x M row-major p*(c,m)
  double idle = 0.0;                 // I*
};

// Charnes-Cooper form with q = t p and J = t I:
//   min sum e q   s.t.  sum D q + J = 1,  sum q - t = 0,
//                       sum_m q(n,m) >= rate_n t ... rates enter as constants
//                       J <= idle_max t,  all vars >= 0.
inline StationaryPolicy stationary_policy_optimum(const TaskModel& model,
                                                  const std::vector<double>& rates,
                                                  double idle_max) {
  if (rates.size() != model.num_classes)
    throw std::invalid_argument("stationary_policy_optimum: one rate per class required");
  const std::size_t cells = model.num_classes * model.num_modes;
  const std::size_t j_col = cells;      // J = t I
  const std::size_t t_col = cells + 1;  // t = 1 / (I + sum p D)
  std::vector<LpRow> rows;

  LpRow norm;
  norm.coeffs.assign(cells + 2, 0.0);
  for (std::size_t i = 0; i < cells; ++i) norm.coeffs[i] = model.duration_means[i];
  norm.coeffs[j_col] = 1.0;
  norm.op = RowOp::eq;
  norm.rhs = 1.0;
  rows.push_back(std::move(norm));

  LpRow mass;
  mass.coeffs.assign(cells + 2, 0.0);
  for (std::size_t i = 0; i < cells; ++i) mass.coeffs[i] = 1.0;
  mass.coeffs[t_col] = -1.0;
  mass.op = RowOp::eq;
  mass.rhs = 0.0;
  rows.push_back(std::move(mass));

  for (std::size_t n = 1; n <= model.num_classes; ++n) {
    LpRow rate;
    rate.coeffs.assign(cells + 2, 0.0);
    for (std::size_t m = 1; m <= model.num_modes; ++m)
      rate.coeffs[model.table_index(n, m)] = 1.0;
    rate.op = RowOp::ge;
    rate.rhs = rates[n - 1];
    rows.push_back(std::move(rate));
  }

  LpRow idle;
  idle.coeffs.assign(cells + 2, 0.0);
  idle.coeffs[j_col] = 1.0;
  idle.coeffs[t_col] = -idle_max;
  idle.op = RowOp::le;
  idle.rhs = 0.0;
  rows.push_back(std::move(idle));

  std::vector<double> cost(cells + 2, 0.0);
  for (std::size_t i = 0; i < cells; ++i) cost[i] = model.energy_means[i];

  const LpResult lp = solve_lp(rows, cost);
  StationaryPolicy out;
  if (lp.status != LpStatus::optimal) return out;
  const double t = lp.x[t_col];
  if (!(t > 0.0)) return out;
  out.status = LfpStatus::optimal;
  out.probabilities.resize(cells);
  double den = 0.0;
  double num = 0.0;
  for (std::size_t i = 0; i < cells; ++i) {
    out.probabilities[i] = lp.x[i] / t;
    den += out.probabilities[i] * model.duration_means[i];
    num += out.probabilities[i] * model.energy_means[i];
  }
  out.idle = lp.x[j_col] / t;
  den += out.idle;
  out.power = num / den;
  return out;
}

inline StationaryPolicy stationary_policy_optimum(const TaskModel& model) {
  return stationary_policy_optimum(model, model.rates, model.idle_max);
}

// The same task program in the generic box form, for cross-checking the two
// oracle routes. Uses the mass constraint to fold the duration floor into
// b_0 so the denominator invariant holds.
inline ConstrainedLfpInstance encode_task_lfp(const TaskModel& model,
                                              const std::vector<double>& rates,
                                              double idle_max) {
  const std::size_t cells = model.num_classes * model.num_modes;
  const double d_floor = *std::min_element(model.duration_means.begin(), model.duration_means.end());
  ConstrainedLfpInstance inst;
  inst.obj_numerator.assign(cells + 2, 0.0);
  inst.obj_denominator.assign(cells + 2, 0.0);
  inst.obj_denominator[0] = d_floor;
  for (std::size_t i = 0; i < cells; ++i) {
    inst.obj_numerator[i + 1] = model.energy_means[i];
    inst.obj_denominator[i + 1] = model.duration_means[i] - d_floor;
  }
  inst.obj_denominator[cells + 1] = idle_max;  // x_last = I / idle_max

  std::vector<double> mass(cells + 1, 0.0);
  for (std::size_t i = 0; i < cells; ++i) mass[i] = 1.0;
  inst.constraint_coeffs.push_back(mass);
  inst.constraint_limits.push_back(1.0);
  for (double& v : mass) v = -v;
  inst.constraint_coeffs.push_back(mass);
  inst.constraint_limits.push_back(-1.0);

  for (std::size_t n = 1; n <= model.num_classes; ++n) {
    std::vector<double> row(cells + 1, 0.0);
    for (std::size_t i = 0; i < cells; ++i)
      row[i] = rates[n - 1] * model.duration_means[i];
    for (std::size_t m = 1; m <= model.num_modes; ++m)
      row[model.table_index(n, m)] -= 1.0;
    row[cells] = rates[n - 1] * idle_max;
    inst.constraint_coeffs.push_back(std::move(row));
    inst.constraint_limits.push_back(0.0);
  }
  return inst;
}

// ---------------------------------------------------------------------------
// Offline optimum over event-aware stationary policies: distribution z(w,a)
// with per-event mass P(w), minimizing E[y_0] / E[T] under E[y_l] <= c_l E[T].
// ---------------------------------------------------------------------------

struct AttributePolicyOptimum {
  LfpStatus status = LfpStatus::infeasible;
  double ratio = 0.0;
  std::vector<double> distribution;  // z(w,a) per action row
};

inline AttributePolicyOptimum attribute_policy_optimum(const AttributeModel& attr) {
  validate_attribute_model(attr);
  const std::size_t total = attr.total_actions();
  const std::size_t stride = attr.num_constraints + 1;
  const std::size_t t_col = total;
  std::vector<LpRow> rows;

  LpRow norm;
  norm.coeffs.assign(total + 1, 0.0);
  for (std::size_t r = 0; r < total; ++r) norm.coeffs[r] = attr.frame_means[r];
  norm.op = RowOp::eq;
  norm.rhs = 1.0;
  rows.push_back(std::move(norm));

  for (std::size_t w = 0; w < attr.num_events(); ++w) {
    LpRow mass;
    mass.coeffs.assign(total + 1, 0.0);
    for (std::size_t a = 0; a < attr.num_actions(w); ++a) mass.coeffs[attr.row(w, a)] = 1.0;
    mass.coeffs[t_col] = -attr.event_probs[w];
    mass.op = RowOp::eq;
    mass.rhs = 0.0;
    rows.push_back(std::move(mass));
  }

  for (std::size_t l = 1; l < stride; ++l) {
    LpRow con;
    con.coeffs.assign(total + 1, 0.0);
    for (std::size_t r = 0; r < total; ++r)
      con.coeffs[r] = attr.attr_means[r * stride + l] - attr.bounds[l - 1] * attr.frame_means[r];
    con.op = RowOp::le;
    con.rhs = 0.0;
    rows.push_back(std::move(con));
  }

  std::vector<double> cost(total + 1, 0.0);
  for (std::size_t r = 0; r < total; ++r) cost[r] = attr.attr_means[r * stride];

  const LpResult lp = solve_lp(rows, cost);
  AttributePolicyOptimum out;
  if (lp.status != LpStatus::optimal) return out;
  const double t = lp.x[t_col];
  if (!(t > 0.0)) return out;
  out.status = LfpStatus::optimal;
  out.distribution.resize(total);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t r = 0; r < total; ++r) {
    out.distribution[r] = lp.x[r] / t;
    num += out.distribution[r] * attr.attr_means[r * stride];
    den += out.distribution[r] * attr.frame_means[r];
  }
  out.ratio = num / den;
  return out;
}

}  // namespace renewalctl
