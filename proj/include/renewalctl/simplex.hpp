#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace renewalctl {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  std::vector<double> x;
  double objective = 0.0;
};

enum class RowOp { le, ge, eq };

struct LpRow {
  std::vector<double> coeffs;
  RowOp op = RowOp::le;
  double rhs = 0.0;
};

// Dense two-phase tableau simplex minimizing c.x over x >= 0 and the given
// rows. Bland's rule for both pivot choices, so it cannot cycle. Intended for
// the desk-scale programs here (tens of variables); no sparsity, no scaling.
class DenseSimplex {
 public:
  DenseSimplex(const std::vector<LpRow>& rows, std::vector<double> objective)
      : n_(objective.size()), m_(rows.size()), cost_(std::move(objective)) {
    std::size_t slacks = 0;
    std::size_t artificials = 0;
    for (const LpRow& row : rows) {
      if (row.coeffs.size() != n_)
        throw std::invalid_argument("simplex: row width must match objective length");
      RowOp op = row.op;
      if (row.rhs < 0.0 && op != RowOp::eq) op = (op == RowOp::le) ? RowOp::ge : RowOp::le;
      if (op != RowOp::eq) ++slacks;
      if (op != RowOp::le) ++artificials;
    }
    slack_begin_ = n_;
    art_begin_ = n_ + slacks;
    cols_ = art_begin_ + artificials;
    tab_.assign(m_, std::vector<double>(cols_ + 1, 0.0));
    basis_.assign(m_, 0);

    std::size_t slack = slack_begin_;
    std::size_t art = art_begin_;
    for (std::size_t i = 0; i < m_; ++i) {
      const LpRow& row = rows[i];
      double sign = row.rhs < 0.0 ? -1.0 : 1.0;
      RowOp op = row.op;
      if (sign < 0.0 && op != RowOp::eq) op = (op == RowOp::le) ? RowOp::ge : RowOp::le;
      for (std::size_t j = 0; j < n_; ++j) tab_[i][j] = sign * row.coeffs[j];
      tab_[i][cols_] = sign * row.rhs;
      switch (op) {
        case RowOp::le:
          tab_[i][slack] = 1.0;
          basis_[i] = slack++;
          break;
        case RowOp::ge:
          tab_[i][slack++] = -1.0;
          tab_[i][art] = 1.0;
          basis_[i] = art++;
          break;
        case RowOp::eq:
          tab_[i][art] = 1.0;
          basis_[i] = art++;
          break;
      }
    }
  }

  LpResult solve() {
    LpResult result;
    if (art_begin_ < cols_) {
      std::vector<double> phase1(cols_, 0.0);
      for (std::size_t j = art_begin_; j < cols_; ++j) phase1[j] = 1.0;
      if (!run(phase1, cols_)) {
        result.status = LpStatus::unbounded;  // cannot happen: phase 1 is bounded below
        return result;
      }
      double infeas = 0.0;
      for (std::size_t i = 0; i < m_; ++i)
        if (basis_[i] >= art_begin_) infeas += tab_[i][cols_];
      if (infeas > 1e-7) {
        result.status = LpStatus::infeasible;
        return result;
      }
      purge_artificials();
    }
    std::vector<double> phase2(cols_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) phase2[j] = cost_[j];
    if (!run(phase2, art_begin_)) {
      result.status = LpStatus::unbounded;
      return result;
    }
    result.status = LpStatus::optimal;
    result.x.assign(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] < n_) result.x[basis_[i]] = tab_[i][cols_];
    result.objective = 0.0;
    for (std::size_t j = 0; j < n_; ++j) result.objective += cost_[j] * result.x[j];
    return result;
  }

 private:
  // Price with the reduced-cost row for `cost`, allowing columns < limit to
  // enter. Returns false on unbounded.
  bool run(const std::vector<double>& cost, std::size_t limit) {
    std::vector<double> reduced(cols_ + 1, 0.0);
    for (std::size_t j = 0; j < cols_; ++j) reduced[j] = cost[j];
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = cost[basis_[i]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j <= cols_; ++j) reduced[j] -= cb * tab_[i][j];
    }
    const std::size_t max_iter = 2000 + 200 * cols_;
    for (std::size_t iter = 0; iter <= max_iter; ++iter) {
      if (iter == max_iter) throw std::runtime_error("simplex: iteration limit hit");
      std::size_t enter = cols_;
      for (std::size_t j = 0; j < limit; ++j) {
        if (reduced[j] < -kPriceEps) {
          enter = j;
          break;  // Bland: lowest eligible index
        }
      }
      if (enter == cols_) return true;

      std::size_t leave = m_;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = tab_[i][enter];
        if (a > kPivotEps) {
          const double ratio = tab_[i][cols_] / a;
          if (ratio < best_ratio - kRatioEps ||
              (ratio < best_ratio + kRatioEps && (leave == m_ || basis_[i] < basis_[leave]))) {
            best_ratio = ratio;
            leave = i;
          }
        }
      }
      if (leave == m_) return false;
      pivot(leave, enter, reduced);
    }
    return true;  // unreachable
  }

  void pivot(std::size_t row, std::size_t col, std::vector<double>& reduced) {
    const double p = tab_[row][col];
    for (std::size_t j = 0; j <= cols_; ++j) tab_[row][j] /= p;
    tab_[row][col] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == row) continue;
      const double f = tab_[i][col];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= cols_; ++j) tab_[i][j] -= f * tab_[row][j];
      tab_[i][col] = 0.0;
    }
    const double f = reduced[col];
    if (f != 0.0) {
      for (std::size_t j = 0; j <= cols_; ++j) reduced[j] -= f * tab_[row][j];
      reduced[col] = 0.0;
    }
    basis_[row] = col;
  }

  // After phase 1, pivot leftover zero-level artificials onto structural
  // columns; rows with no structural entry are redundant and get dropped.
  void purge_artificials() {
    for (std::size_t i = 0; i < m_;) {
      if (basis_[i] < art_begin_) {
        ++i;
        continue;
      }
      std::size_t col = art_begin_;
      for (std::size_t j = 0; j < art_begin_; ++j) {
        if (std::abs(tab_[i][j]) > kPivotEps) {
          col = j;
          break;
        }
      }
      if (col < art_begin_) {
        std::vector<double> dummy(cols_ + 1, 0.0);
        pivot(i, col, dummy);
        ++i;
      } else {
        tab_[i] = tab_.back();
        basis_[i] = basis_.back();
        tab_.pop_back();
        basis_.pop_back();
        --m_;
      }
    }
  }

  static constexpr double kPriceEps = 1e-9;
  static constexpr double kPivotEps = 1e-11;
  static constexpr double kRatioEps = 1e-12;

  std::size_t n_ = 0;     // structural variables
  std::size_t m_ = 0;     // rows
  std::size_t cols_ = 0;  // structural + slack + artificial
  std::size_t slack_begin_ = 0;
  std::size_t art_begin_ = 0;
  std::vector<double> cost_;
  std::vector<std::vector<double>> tab_;  // m x (cols + 1), last column = rhs
  std::vector<std::size_t> basis_;
};

inline LpResult solve_lp(const std::vector<LpRow>& rows, const std::vector<double>& objective) {
  return DenseSimplex(rows, objective).solve();
}

}  // namespace renewalctl
