#pragma once

// Dense bounded-variable primal simplex, two phases, Bland's rule.
//
//   maximize   cᵀx
//   subject to A_eq x  = b_eq
//              A_le x ≤ b_le
//              0 ≤ x ≤ u      (u may be +inf)

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace kweak {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct LinearTerm {
  int var = 0;
  double coef = 0.0;
};

struct LPRow {
  std::vector<LinearTerm> terms;
  double rhs = 0.0;
  std::string name;
};

struct LPProblem {
  std::vector<double> objective;  ///< maximized
  std::vector<double> upper;      ///< per-variable upper bound, lower bound is 0
  std::vector<std::string> names;
  std::vector<LPRow> equalities;
  std::vector<LPRow> inequalities;  ///< all of the form row ≤ rhs

  std::size_t num_vars() const { return objective.size(); }

  int add_variable(double cost, double ub, std::string name = {}) {
    objective.push_back(cost);
    upper.push_back(ub);
    names.push_back(name.empty() ? "x" + std::to_string(objective.size() - 1) : std::move(name));
    return static_cast<int>(objective.size() - 1);
  }
};

enum class LPStatus { optimal, infeasible, unbounded, iteration_limit };

inline std::string to_string(LPStatus s) {
  switch (s) {
    case LPStatus::optimal: return "optimal";
    case LPStatus::infeasible: return "infeasible";
    case LPStatus::unbounded: return "unbounded";
    case LPStatus::iteration_limit: return "iteration_limit";
  }
  return "unknown";
}

struct LPSolution {
  LPStatus status = LPStatus::infeasible;
  std::vector<double> values;
  double objective = 0.0;
};

struct SimplexOptions {
  double pivot_tol = 1e-10;
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  long max_iterations = 5'000'000;
};

/// Largest |row·x − rhs| over equalities and max(0, row·x − rhs) over
/// inequalities.
inline double primal_residual(const LPProblem& lp, const std::vector<double>& x) {
  double worst = 0.0;
  auto eval = [&](const LPRow& r) {
    double s = 0.0;
    for (const auto& t : r.terms) s += t.coef * x[static_cast<std::size_t>(t.var)];
    return s - r.rhs;
  };
  for (const auto& r : lp.equalities) worst = std::max(worst, std::abs(eval(r)));
  for (const auto& r : lp.inequalities) worst = std::max(worst, eval(r));
  return worst;
}

namespace detail {

class DenseSimplex {
 public:
  DenseSimplex(const LPProblem& lp, const SimplexOptions& opt) : opt_(opt), n_orig_(lp.num_vars()) {
    for (std::size_t j = 0; j < n_orig_; ++j) {
      if (lp.upper[j] < 0) throw std::invalid_argument("solve_lp: negative upper bound");
    }
    m_ = lp.equalities.size() + lp.inequalities.size();
    // Column layout: originals | slacks (one per ≤ row) | artificials (one per row).
    n_slack_ = lp.inequalities.size();
    slack0_ = n_orig_;
    art0_ = slack0_ + n_slack_;
    n_ = art0_ + m_;
    width_ = n_ + 1;  // last column holds nothing; basic values kept separately
    tab_.assign(m_ * width_, 0.0);
    upper_.assign(n_, kInf);
    for (std::size_t j = 0; j < n_orig_; ++j) upper_[j] = lp.upper[j];
    value_.assign(n_, 0.0);
    basis_.assign(m_, 0);
    std::vector<double> rhs(m_, 0.0);

    std::size_t r = 0;
    auto fill = [&](const LPRow& row) {
      for (const auto& t : row.terms) {
        if (t.var < 0 || static_cast<std::size_t>(t.var) >= n_orig_) throw std::invalid_argument("solve_lp: bad variable index");
        at(r, static_cast<std::size_t>(t.var)) += t.coef;
      }
      rhs[r] = row.rhs;
    };
    for (const auto& row : lp.equalities) {
      fill(row);
      ++r;
    }
    for (std::size_t k = 0; k < lp.inequalities.size(); ++k) {
      fill(lp.inequalities[k]);
      at(r, slack0_ + k) = 1.0;
      ++r;
    }
    // Make every rhs non-negative, then start from the artificial basis.
    for (std::size_t i = 0; i < m_; ++i) {
      if (rhs[i] < 0) {
        for (std::size_t j = 0; j < art0_; ++j) at(i, j) = -at(i, j);
        rhs[i] = -rhs[i];
      }
      at(i, art0_ + i) = 1.0;
      basis_[i] = art0_ + i;
      value_[art0_ + i] = rhs[i];
    }
  }

  LPSolution run(const LPProblem& lp) {
    LPSolution sol;
    // Phase 1: maximize −Σ artificials.
    std::vector<double> cost(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) cost[art0_ + i] = -1.0;
    auto st = optimize(cost, /*allow_artificial=*/true);
    if (st == LPStatus::iteration_limit) {
      sol.status = st;
      return sol;
    }
    double infeas = 0.0;
    for (std::size_t i = 0; i < m_; ++i) infeas += value_[art0_ + i];
    if (infeas > opt_.feasibility_tol * static_cast<double>(std::max<std::size_t>(1, m_))) {
      sol.status = LPStatus::infeasible;
      return sol;
    }
    drive_out_artificials();
    for (std::size_t i = 0; i < m_; ++i) upper_[art0_ + i] = 0.0;

    std::fill(cost.begin(), cost.end(), 0.0);
    for (std::size_t j = 0; j < n_orig_; ++j) cost[j] = lp.objective[j];
    st = optimize(cost, /*allow_artificial=*/false);
    sol.status = st;
    if (st != LPStatus::optimal) return sol;
    sol.values.assign(value_.begin(), value_.begin() + static_cast<std::ptrdiff_t>(n_orig_));
    for (auto& v : sol.values) {
      if (std::abs(v) < 1e-12) v = 0.0;
    }
    sol.objective = 0.0;
    for (std::size_t j = 0; j < n_orig_; ++j) sol.objective += lp.objective[j] * sol.values[j];
    return sol;
  }

 private:
  double& at(std::size_t i, std::size_t j) { return tab_[i * width_ + j]; }
  double at(std::size_t i, std::size_t j) const { return tab_[i * width_ + j]; }

  bool is_basic(std::size_t j) const { return in_basis_.size() == n_ && in_basis_[j]; }

  void refresh_basis_flags() {
    in_basis_.assign(n_, 0);
    for (auto b : basis_) in_basis_[b] = 1;
  }

  LPStatus optimize(const std::vector<double>& cost, bool allow_artificial) {
    refresh_basis_flags();
    std::vector<double> reduced(n_);
    for (long iter = 0; iter < opt_.max_iterations; ++iter) {
      // Reduced costs d_j = c_j − c_Bᵀ T_j.
      for (std::size_t j = 0; j < n_; ++j) reduced[j] = cost[j];
      for (std::size_t i = 0; i < m_; ++i) {
        const double cb = cost[basis_[i]];
        if (cb == 0.0) continue;
        const double* row = &tab_[i * width_];
        for (std::size_t j = 0; j < n_; ++j) reduced[j] -= cb * row[j];
      }
      // Bland: first eligible index.
      std::size_t enter = n_;
      int dir = 0;
      for (std::size_t j = 0; j < n_; ++j) {
        if (in_basis_[j]) continue;
        if (!allow_artificial && j >= art0_) continue;
        if (upper_[j] <= 0.0) continue;
        const bool at_upper = std::isfinite(upper_[j]) && value_[j] >= upper_[j] - 1e-15;
        if (!at_upper && reduced[j] > opt_.optimality_tol) {
          enter = j;
          dir = +1;
          break;
        }
        if (at_upper && reduced[j] < -opt_.optimality_tol) {
          enter = j;
          dir = -1;
          break;
        }
      }
      if (enter == n_) return LPStatus::optimal;

      // Ratio test. Basic i moves by −dir·θ·T_ij.
      double theta = std::isfinite(upper_[enter]) ? upper_[enter] : kInf;
      std::size_t leave_row = m_;
      bool leave_to_upper = false;
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = at(i, enter);
        if (std::abs(a) <= opt_.pivot_tol) continue;
        const double rate = -dir * a;  // d(value of basic i)/dθ
        const std::size_t b = basis_[i];
        double limit;
        bool to_upper;
        if (rate < 0) {
          limit = std::max(0.0, value_[b]) / -rate;
          to_upper = false;
        } else {
          if (!std::isfinite(upper_[b])) continue;
          limit = std::max(0.0, upper_[b] - value_[b]) / rate;
          to_upper = true;
        }
        // Ties: keep a pure bound flip; otherwise smallest leaving index.
        const bool better = limit < theta - 1e-12;
        const bool tie = !better && limit <= theta + 1e-12 && leave_row < m_ && b < basis_[leave_row];
        if (better || tie) {
          theta = std::min(theta, limit);
          leave_row = i;
          leave_to_upper = to_upper;
        }
      }
      if (!std::isfinite(theta)) return LPStatus::unbounded;

      for (std::size_t i = 0; i < m_; ++i) value_[basis_[i]] -= dir * theta * at(i, enter);
      value_[enter] += dir * theta;

      if (leave_row == m_) continue;  // bound flip only

      const std::size_t leaving = basis_[leave_row];
      value_[leaving] = leave_to_upper ? upper_[leaving] : 0.0;
      pivot(leave_row, enter);
      in_basis_[leaving] = 0;
      in_basis_[enter] = 1;
      basis_[leave_row] = enter;
    }
    return LPStatus::iteration_limit;
  }

  void pivot(std::size_t r, std::size_t c) {
    double* prow = &tab_[r * width_];
    const double p = prow[c];
    for (std::size_t j = 0; j < n_; ++j) prow[j] /= p;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* row = &tab_[i * width_];
      const double f = row[c];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n_; ++j) row[j] -= f * prow[j];
      row[c] = 0.0;
    }
  }

  // Artificials left basic at zero are swapped for any non-artificial column
  // with a usable pivot; rows without one are redundant and keep a zero-fixed
  // artificial.
  void drive_out_artificials() {
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < art0_) continue;
      for (std::size_t j = 0; j < art0_; ++j) {
        if (in_basis_[j] || std::abs(at(i, j)) <= 1e-8) continue;
        const std::size_t leaving = basis_[i];
        value_[leaving] = 0.0;
        pivot(i, j);
        in_basis_[leaving] = 0;
        in_basis_[j] = 1;
        basis_[i] = j;
        break;
      }
    }
  }

  SimplexOptions opt_;
  std::size_t n_orig_, n_slack_ = 0, slack0_ = 0, art0_ = 0, n_ = 0, m_ = 0, width_ = 0;
  std::vector<double> tab_, upper_, value_;
  std::vector<std::size_t> basis_;
  std::vector<char> in_basis_;
};

}  // namespace detail

inline LPSolution solve_lp(const LPProblem& lp, const SimplexOptions& opt = {}) {
  if (lp.upper.size() != lp.num_vars()) throw std::invalid_argument("solve_lp: bounds size mismatch");
  detail::DenseSimplex simplex(lp, opt);
  return simplex.run(lp);
}

/// CPLEX-style LP text ("Maximize / Subject To / Bounds / End").
inline void write_lp_text(std::ostream& os, const LPProblem& lp) {
  os << std::setprecision(12);
  auto term_list = [&](const std::vector<LinearTerm>& terms) {
    bool first = true;
    for (const auto& t : terms) {
      if (t.coef == 0.0) continue;
      os << (t.coef < 0 ? (first ? "-" : " - ") : (first ? "" : " + "));
      const double a = std::abs(t.coef);
      if (a != 1.0) os << a << ' ';
      os << lp.names[static_cast<std::size_t>(t.var)];
      first = false;
    }
    if (first) os << "0 " << (lp.names.empty() ? "x0" : lp.names.front());
  };
  os << "Maximize\n obj: ";
  std::vector<LinearTerm> obj;
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    if (lp.objective[j] != 0.0) obj.push_back({static_cast<int>(j), lp.objective[j]});
  }
  term_list(obj);
  os << "\nSubject To\n";
  int k = 0;
  for (const auto& r : lp.equalities) {
    os << ' ' << (r.name.empty() ? "e" + std::to_string(k) : r.name) << ": ";
    term_list(r.terms);
    os << " = " << r.rhs << '\n';
    ++k;
  }
  k = 0;
  for (const auto& r : lp.inequalities) {
    os << ' ' << (r.name.empty() ? "c" + std::to_string(k) : r.name) << ": ";
    term_list(r.terms);
    os << " <= " << r.rhs << '\n';
    ++k;
  }
  os << "Bounds\n";
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    os << " 0 <= " << lp.names[j];
    if (std::isfinite(lp.upper[j])) os << " <= " << lp.upper[j];
    os << '\n';
  }
  os << "End\n";
}

}  // namespace kweak
