#include "mpbo/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mpbo::lp {

namespace {

constexpr double kCostEps = 1e-9;
constexpr double kPivotEps = 1e-9;
constexpr double kValueEps = 1e-7;
constexpr int kBlandTrigger = 64;

class Tableau {
 public:
  explicit Tableau(const Problem& p) : p_(p) { build(); }

  Solution run() {
    if (!phase1_needed_ || phase1()) {
      switch (phase2()) {
        case SolveStatus::kOptimal: return extract(SolveStatus::kOptimal);
        case SolveStatus::kUnbounded: return extract(SolveStatus::kUnbounded);
        default: return extract(SolveStatus::kIterLimit);
      }
    }
    return extract(infeasible_ ? SolveStatus::kInfeasible
                               : SolveStatus::kIterLimit);
  }

 private:
  const Problem& p_;
  int m_ = 0;             // rows
  int n_struct_ = 0;      // structural (shifted) variables
  int n_total_ = 0;       // structural + slack + artificial
  int n_art_ = 0;
  std::vector<std::vector<double>> tab_;  // m x n_total
  std::vector<double> range_;             // upper - lower per column (inf ok)
  std::vector<double> xb_;                // value of basic variable per row
  std::vector<int> basic_;                // column basic in each row
  std::vector<int> basic_row_;            // column -> row, -1 if nonbasic
  std::vector<bool> at_upper_;
  std::vector<bool> row_active_;
  std::vector<double> cost_;              // current reduced-cost row
  bool phase1_needed_ = false;
  bool infeasible_ = false;
  int degenerate_streak_ = 0;
  long iter_limit_ = 0;

  void build() {
    m_ = static_cast<int>(p_.rows.size());
    n_struct_ = p_.num_vars;
    for (int j = 0; j < n_struct_; ++j) {
      if (!std::isfinite(p_.lower[j]))
        throw std::invalid_argument("simplex requires finite lower bounds");
      if (p_.upper[j] < p_.lower[j] - kValueEps)
        throw std::invalid_argument("empty variable bound range");
    }

    // Shift structural variables to start at zero; fold the shift into rhs.
    std::vector<double> rhs(m_);
    for (int i = 0; i < m_; ++i) {
      double b = p_.rows[i].rhs;
      for (const Term& t : p_.rows[i].terms) b -= t.coef * p_.lower[t.var];
      rhs[i] = b;
    }

    n_art_ = 0;
    for (int i = 0; i < m_; ++i)
      if (rhs[i] < 0) ++n_art_;
    phase1_needed_ = n_art_ > 0;

    n_total_ = n_struct_ + m_ + n_art_;
    tab_.assign(m_, std::vector<double>(n_total_, 0.0));
    range_.assign(n_total_, kInf);
    for (int j = 0; j < n_struct_; ++j) range_[j] = p_.upper[j] - p_.lower[j];

    basic_.assign(m_, -1);
    basic_row_.assign(n_total_, -1);
    at_upper_.assign(n_total_, false);
    xb_.assign(m_, 0.0);
    row_active_.assign(m_, true);

    int art = 0;
    for (int i = 0; i < m_; ++i) {
      const double sign = rhs[i] < 0 ? -1.0 : 1.0;
      for (const Term& t : p_.rows[i].terms) tab_[i][t.var] += sign * t.coef;
      tab_[i][n_struct_ + i] = sign;  // slack
      if (rhs[i] < 0) {
        const int col = n_struct_ + m_ + art;
        tab_[i][col] = 1.0;
        basic_[i] = col;
        xb_[i] = -rhs[i];
        ++art;
      } else {
        basic_[i] = n_struct_ + i;
        xb_[i] = rhs[i];
      }
      basic_row_[basic_[i]] = i;
    }
    iter_limit_ = 200L * (m_ + n_total_) + 20000;
  }

  bool is_artificial(int j) const { return j >= n_struct_ + m_; }

  void set_phase1_cost() {
    cost_.assign(n_total_, 0.0);
    for (int j = 0; j < n_total_; ++j) {
      double z = is_artificial(j) ? 1.0 : 0.0;
      for (int i = 0; i < m_; ++i)
        if (is_artificial(basic_[i])) z -= tab_[i][j];
      cost_[j] = z;
    }
  }

  void set_phase2_cost() {
    std::vector<double> c(n_total_, 0.0);
    for (int j = 0; j < n_struct_; ++j) c[j] = p_.objective[j];
    cost_ = c;
    for (int i = 0; i < m_; ++i) {
      const double cb = c[basic_[i]];
      if (cb == 0.0) continue;
      for (int j = 0; j < n_total_; ++j) cost_[j] -= cb * tab_[i][j];
    }
  }

  // Gauss-Jordan pivot; leaves xb_ untouched (callers maintain values).
  void pivot(int r, int q) {
    const double piv = tab_[r][q];
    const double inv = 1.0 / piv;
    for (int j = 0; j < n_total_; ++j) tab_[r][j] *= inv;
    tab_[r][q] = 1.0;
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      const double f = tab_[i][q];
      if (f == 0.0) continue;
      for (int j = 0; j < n_total_; ++j) tab_[i][j] -= f * tab_[r][j];
      tab_[i][q] = 0.0;
    }
    const double fc = cost_[q];
    if (fc != 0.0) {
      for (int j = 0; j < n_total_; ++j) cost_[j] -= fc * tab_[r][j];
      cost_[q] = 0.0;
    }
    basic_row_[basic_[r]] = -1;
    basic_[r] = q;
    basic_row_[q] = r;
  }

  // One priced simplex sweep. allow_artificial gates entering candidates.
  // Returns kOptimal when no candidate remains.
  SolveStatus iterate(bool allow_artificial) {
    long iters = 0;
    bool bland = false;
    degenerate_streak_ = 0;
    for (;;) {
      if (++iters > iter_limit_) return SolveStatus::kIterLimit;

      // entering column
      int q = -1;
      double best = kCostEps;
      for (int j = 0; j < n_total_; ++j) {
        if (basic_row_[j] >= 0) continue;
        if (!allow_artificial && is_artificial(j)) continue;
        if (range_[j] <= kValueEps) continue;  // fixed variable
        const double z = cost_[j];
        const double viol = at_upper_[j] ? z : -z;
        if (viol <= kCostEps) continue;
        if (bland) {
          q = j;
          break;
        }
        if (viol > best) {
          best = viol;
          q = j;
        }
      }
      if (q < 0) return SolveStatus::kOptimal;

      const double dir = at_upper_[q] ? -1.0 : 1.0;  // movement sign of q

      // ratio test: smallest step; ties prefer larger pivots (smallest basic
      // index under Bland's rule)
      double t_max = range_[q];
      int leave_row = -1;
      bool leave_at_upper = false;
      double leave_pivot = 0.0;
      auto consider = [&](int i, double t, bool hits_upper) {
        t = std::max(0.0, t);
        bool take = false;
        if (t < t_max - kValueEps) {
          take = true;
        } else if (t <= t_max + kValueEps) {
          if (leave_row < 0)
            take = true;
          else if (bland)
            take = basic_[i] < basic_[leave_row];
          else
            take = std::fabs(tab_[i][q]) > std::fabs(leave_pivot) + 1e-12;
        }
        if (take) {
          t_max = std::min(t_max, t);
          leave_row = i;
          leave_at_upper = hits_upper;
          leave_pivot = tab_[i][q];
        }
      };
      for (int i = 0; i < m_; ++i) {
        if (!row_active_[i]) continue;
        const double d = dir * tab_[i][q];  // basic i changes by -d * t
        if (d > kPivotEps) {
          consider(i, xb_[i] / d, false);
        } else if (d < -kPivotEps && std::isfinite(range_[basic_[i]])) {
          consider(i, (range_[basic_[i]] - xb_[i]) / (-d), true);
        }
      }

      if (leave_row < 0) {
        if (!std::isfinite(t_max)) return SolveStatus::kUnbounded;
        // bound flip: q runs to its opposite bound
        for (int i = 0; i < m_; ++i)
          xb_[i] -= dir * tab_[i][q] * t_max;
        at_upper_[q] = !at_upper_[q];
        degenerate_streak_ = 0;
        bland = false;
        continue;
      }

      if (t_max <= kValueEps) {
        if (++degenerate_streak_ > kBlandTrigger) bland = true;
      } else {
        degenerate_streak_ = 0;
        bland = false;
      }

      for (int i = 0; i < m_; ++i) {
        if (i == leave_row) continue;
        xb_[i] -= dir * tab_[i][q] * t_max;
      }
      const double entering_value =
          (at_upper_[q] ? range_[q] : 0.0) + dir * t_max;
      const int leaving = basic_[leave_row];
      at_upper_[leaving] = leave_at_upper;
      pivot(leave_row, q);
      at_upper_[q] = false;
      xb_[leave_row] = entering_value;
    }
  }

  bool phase1() {
    set_phase1_cost();
    const SolveStatus st = iterate(true);
    if (st == SolveStatus::kIterLimit) return false;
    double art_sum = 0;
    for (int i = 0; i < m_; ++i)
      if (is_artificial(basic_[i])) art_sum += xb_[i];
    if (art_sum > 1e-6) {
      infeasible_ = true;
      return false;
    }
    // Drive residual artificials out of the basis; a row with no usable
    // pivot column is redundant and drops out of later ratio tests.
    for (int i = 0; i < m_; ++i) {
      if (!is_artificial(basic_[i])) continue;
      int q = -1;
      for (int j = 0; j < n_struct_ + m_; ++j) {
        if (basic_row_[j] >= 0) continue;
        if (std::fabs(tab_[i][j]) > kPivotEps) {
          q = j;
          break;
        }
      }
      if (q >= 0) {
        pivot(i, q);  // degenerate swap, basic value stays (~0)
      } else {
        row_active_[i] = false;
        xb_[i] = 0.0;
      }
    }
    return true;
  }

  SolveStatus phase2() {
    set_phase2_cost();
    return iterate(false);
  }

  Solution extract(SolveStatus status) {
    Solution sol;
    sol.status = status;
    sol.x.assign(n_struct_, 0.0);
    for (int j = 0; j < n_struct_; ++j) {
      double v;
      const int r = basic_row_[j];
      if (r >= 0)
        v = xb_[r];
      else
        v = at_upper_[j] ? range_[j] : 0.0;
      v = std::clamp(v, 0.0, range_[j]);  // shave round-off at the bounds
      sol.x[j] = v + p_.lower[j];
    }
    sol.objective = 0;
    for (int j = 0; j < n_struct_; ++j)
      sol.objective += p_.objective[j] * sol.x[j];
    return sol;
  }
};

}  // namespace

Solution solve(const Problem& problem) {
  if (static_cast<int>(problem.lower.size()) != problem.num_vars ||
      static_cast<int>(problem.upper.size()) != problem.num_vars ||
      static_cast<int>(problem.objective.size()) != problem.num_vars)
    throw std::invalid_argument("inconsistent problem dimensions");
  Tableau t(problem);
  return t.run();
}

}  // namespace mpbo::lp
