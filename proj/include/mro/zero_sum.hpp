// Copyright 2026 The MRO Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MRO_ZERO_SUM_HPP
#define MRO_ZERO_SUM_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "mro/core.hpp"
#include "mro/policy.hpp"

namespace mro {

using PayoffMatrix = Eigen::MatrixXd;

inline constexpr double kSolverTolerance = 1e-9;
// Mixture weights below this are dropped from solved strategies.
inline constexpr double kSupportCutoff = 1e-12;

class SolverError : public Error {
  public:
   SolverError(const std::string& what, double row_residual, double column_residual)
       : Error(what + " (row residual " + std::to_string(row_residual) + ", column residual "
               + std::to_string(column_residual) + ")"),
         row_residual_(row_residual),
         column_residual_(column_residual)
   {
   }
   double row_residual() const { return row_residual_; }
   double column_residual() const { return column_residual_; }

  private:
   double row_residual_;
   double column_residual_;
};

struct SolveResult {
   Mixture blue;
   Mixture red;
   double value;  // Blue's game value
   double solver_tolerance = kSolverTolerance;
};

inline void check_payoff(const PayoffMatrix& a) {
   if(a.rows() == 0 || a.cols() == 0) throw InvalidArgument("payoff matrix must be nonempty");
   if(!a.allFinite()) throw InvalidArgument("payoff matrix entries must be finite");
}

namespace detail {

// Dense tableau simplex for  max 1'w  s.t.  B w <= 1, w >= 0  with B > 0.
// Dantzig pricing, switching to Bland's rule after a run of degenerate pivots.
// Returns the final basis (variable index per constraint row; slacks are
// numbered cols..cols+rows-1).
inline std::vector< Eigen::Index > simplex_basis(const Eigen::MatrixXd& b) {
   const Eigen::Index m = b.rows(), n = b.cols();
   const Eigen::Index width = n + m + 1;
   Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, width);
   t.topLeftCorner(m, n) = b;
   t.block(0, n, m, m).setIdentity();
   t.col(width - 1).head(m).setOnes();
   t.row(m).head(n).setConstant(-1.0);

   std::vector< Eigen::Index > basis(static_cast< std::size_t >(m));
   for(Eigen::Index i = 0; i < m; ++i) basis[static_cast< std::size_t >(i)] = n + i;

   constexpr double kPivotEps = 1e-11;
   constexpr double kDegenerateRhs = 1e-13;
   const Eigen::Index max_pivots = 200 * (m + n) + 1000;
   Eigen::Index degenerate_run = 0;
   bool bland = false;
   for(Eigen::Index pivots = 0;; ++pivots) {
      if(pivots > max_pivots) throw SolverError("simplex pivot limit exceeded", NAN, NAN);
      Eigen::Index enter = -1;
      double best = -kPivotEps;
      for(Eigen::Index j = 0; j < n + m; ++j) {
         const double rc = t(m, j);
         if(bland) {
            if(rc < -kPivotEps) {
               enter = j;
               break;
            }
         } else if(rc < best) {
            best = rc;
            enter = j;
         }
      }
      if(enter < 0) break;

      Eigen::Index leave = -1;
      double best_ratio = std::numeric_limits< double >::infinity();
      for(Eigen::Index i = 0; i < m; ++i) {
         const double coef = t(i, enter);
         if(coef <= kPivotEps) continue;
         const double ratio = t(i, width - 1) / coef;
         if(ratio < best_ratio
            || (ratio == best_ratio && leave >= 0
                && basis[static_cast< std::size_t >(i)] < basis[static_cast< std::size_t >(leave)])) {
            best_ratio = ratio;
            leave = i;
         }
      }
      if(leave < 0) throw SolverError("zero-sum LP reported unbounded", NAN, NAN);
      degenerate_run = best_ratio == 0.0 ? degenerate_run + 1 : 0;
      if(degenerate_run > 50) bland = true;

      t.row(leave) /= t(leave, enter);
      for(Eigen::Index i = 0; i <= m; ++i) {
         if(i == leave) continue;
         const double f = t(i, enter);
         if(f != 0.0) t.row(i) -= f * t.row(leave);
      }
      // Degenerate vertices must stay exactly degenerate, otherwise round-off
      // decides ratio ties and Bland's rule no longer prevents cycling.
      for(Eigen::Index i = 0; i < m; ++i)
         if(t(i, width - 1) < kDegenerateRhs) t(i, width - 1) = 0.0;
      basis[static_cast< std::size_t >(leave)] = enter;
   }
   return basis;
}

}  // namespace detail

/// Solves the zero-sum matrix game (Blue maximizes rows, Red minimizes columns)
/// by the shift-and-normalize minimax LP. The basis found by the simplex is
/// re-solved by LU so both mixtures are accurate to near machine precision.
inline SolveResult solve_zero_sum(const PayoffMatrix& payoff) {
   check_payoff(payoff);
   const Eigen::Index m = payoff.rows(), n = payoff.cols();
   const double shift = 1.0 - payoff.minCoeff();
   const Eigen::MatrixXd b = payoff.array() + shift;

   const auto basis = detail::simplex_basis(b);

   // Basis matrix over [B | I].
   Eigen::MatrixXd basis_matrix(m, m);
   Eigen::VectorXd objective = Eigen::VectorXd::Zero(m);
   for(Eigen::Index i = 0; i < m; ++i) {
      const auto var = basis[static_cast< std::size_t >(i)];
      if(var < n) {
         basis_matrix.col(i) = b.col(var);
         objective(i) = 1.0;
      } else {
         basis_matrix.col(i) = Eigen::VectorXd::Unit(m, var - n);
      }
   }
   Eigen::PartialPivLU< Eigen::MatrixXd > lu(basis_matrix);
   const Eigen::VectorXd primal = lu.solve(Eigen::VectorXd::Ones(m));
   const Eigen::VectorXd dual = Eigen::PartialPivLU< Eigen::MatrixXd >(basis_matrix.transpose()).solve(objective);

   std::vector< double > w(static_cast< std::size_t >(n), 0.0);
   for(Eigen::Index i = 0; i < m; ++i) {
      const auto var = basis[static_cast< std::size_t >(i)];
      if(var < n) w[static_cast< std::size_t >(var)] = std::max(0.0, primal(i));
   }
   std::vector< double > u(static_cast< std::size_t >(m));
   for(Eigen::Index i = 0; i < m; ++i) u[static_cast< std::size_t >(i)] = std::max(0.0, dual(i));

   // LU round-off leaves ~1e-16 weights on strategies outside the support.
   auto normalize = [](std::vector< double >& v) {
      double sum = 0.0;
      for(double& x : v) sum += (x = x < kSupportCutoff ? 0.0 : x);
      if(!(sum > 0.0)) throw SolverError("degenerate LP solution", NAN, NAN);
      for(double& x : v) x /= sum;
   };
   normalize(w);
   normalize(u);

   const Eigen::Map< const Eigen::VectorXd > x(u.data(), m), y(w.data(), n);
   const double value = x.dot(payoff * y);
   const double column_residual = (value - (x.transpose() * payoff).minCoeff());
   const double row_residual = ((payoff * y).maxCoeff() - value);
   if(column_residual > kSolverTolerance || row_residual > kSolverTolerance)
      throw SolverError("minimax certificate violated", row_residual, column_residual);
   return SolveResult{Mixture(Player::kBlue, std::move(u)), Mixture(Player::kRed, std::move(w)), value};
}

struct SupportGains {
   std::vector< double > blue;  // Blue's gain of each row against the Red mixture
   std::vector< double > red;   // Red's gain of each column against the Blue mixture
};

inline SupportGains support_gains(const PayoffMatrix& payoff, const Mixture& blue, const Mixture& red) {
   check_payoff(payoff);
   if(blue.size() != static_cast< std::size_t >(payoff.rows()))
      throw DimensionMismatch("blue mixture length", 0, static_cast< std::size_t >(payoff.rows()), blue.size());
   if(red.size() != static_cast< std::size_t >(payoff.cols()))
      throw DimensionMismatch("red mixture length", 1, static_cast< std::size_t >(payoff.cols()), red.size());
   const Eigen::Map< const Eigen::VectorXd > x(blue.weights().data(), payoff.rows());
   const Eigen::Map< const Eigen::VectorXd > y(red.weights().data(), payoff.cols());
   const Eigen::VectorXd rows = payoff * y;
   const Eigen::VectorXd cols = -(payoff.transpose() * x);
   return {{rows.data(), rows.data() + rows.size()}, {cols.data(), cols.data() + cols.size()}};
}

// Blue's expected payoff under a pair of mixtures.
inline double mixture_value(const PayoffMatrix& payoff, const Mixture& blue, const Mixture& red) {
   const Eigen::Map< const Eigen::VectorXd > x(blue.weights().data(), payoff.rows());
   const Eigen::Map< const Eigen::VectorXd > y(red.weights().data(), payoff.cols());
   return x.dot(payoff * y);
}

// ---------------------------------------------------------------------------
// Dominance (pure strategy versus pure strategy)

enum class DominanceMode { kStrict, kWeak };

namespace detail {

// True if strategy `dominator` dominates `dominated` for the given player.
inline bool dominates(const PayoffMatrix& a, Player player, Eigen::Index dominator, Eigen::Index dominated,
                      DominanceMode mode) {
   const bool blue = player == Player::kBlue;
   const Eigen::Index len = blue ? a.cols() : a.rows();
   bool strictly_better_once = false;
   for(Eigen::Index k = 0; k < len; ++k) {
      // Gains from the player's own perspective.
      const double g_dom = blue ? a(dominator, k) : -a(k, dominator);
      const double g_sub = blue ? a(dominated, k) : -a(k, dominated);
      if(mode == DominanceMode::kStrict) {
         if(!(g_dom > g_sub)) return false;
      } else {
         if(g_dom < g_sub) return false;
         if(g_dom > g_sub) strictly_better_once = true;
      }
   }
   return mode == DominanceMode::kStrict || strictly_better_once;
}

}  // namespace detail

inline std::vector< std::size_t > find_dominated(const PayoffMatrix& payoff, Player player, DominanceMode mode) {
   check_payoff(payoff);
   const Eigen::Index count = player == Player::kBlue ? payoff.rows() : payoff.cols();
   std::vector< std::size_t > out;
   for(Eigen::Index i = 0; i < count; ++i) {
      for(Eigen::Index k = 0; k < count; ++k) {
         if(k != i && detail::dominates(payoff, player, k, i, mode)) {
            out.push_back(static_cast< std::size_t >(i));
            break;
         }
      }
   }
   return out;
}

struct Elimination {
   Player player;
   std::size_t original_index;
};

struct ReducedGame {
   PayoffMatrix payoff;
   std::vector< std::size_t > blue_kept;  // original row indices, ascending
   std::vector< std::size_t > red_kept;   // original column indices, ascending
   std::vector< Elimination > order;

   std::vector< std::size_t > removed(Player p) const {
      std::vector< std::size_t > out;
      for(const auto& e : order)
         if(e.player == p) out.push_back(e.original_index);
      return out;
   }
};

/// Removes one dominated pure strategy at a time until none remain. Blue rows
/// are examined before Red columns and the lowest current index goes first.
inline ReducedGame eliminate_iteratively(const PayoffMatrix& payoff, DominanceMode mode) {
   check_payoff(payoff);
   ReducedGame g;
   g.payoff = payoff;
   for(Eigen::Index i = 0; i < payoff.rows(); ++i) g.blue_kept.push_back(static_cast< std::size_t >(i));
   for(Eigen::Index j = 0; j < payoff.cols(); ++j) g.red_kept.push_back(static_cast< std::size_t >(j));

   auto drop = [](PayoffMatrix& a, Player p, Eigen::Index idx) {
      PayoffMatrix next(p == Player::kBlue ? a.rows() - 1 : a.rows(), p == Player::kBlue ? a.cols() : a.cols() - 1);
      for(Eigen::Index i = 0, r = 0; i < a.rows(); ++i) {
         if(p == Player::kBlue && i == idx) continue;
         for(Eigen::Index j = 0, c = 0; j < a.cols(); ++j) {
            if(p == Player::kRed && j == idx) continue;
            next(r, c++) = a(i, j);
         }
         ++r;
      }
      a = std::move(next);
   };

   for(;;) {
      bool removed = false;
      for(Player p : {Player::kBlue, Player::kRed}) {
         const auto dominated = find_dominated(g.payoff, p, mode);
         if(dominated.empty()) continue;
         const auto idx = dominated.front();
         auto& kept = p == Player::kBlue ? g.blue_kept : g.red_kept;
         g.order.push_back({p, kept[idx]});
         kept.erase(kept.begin() + static_cast< std::ptrdiff_t >(idx));
         drop(g.payoff, p, static_cast< Eigen::Index >(idx));
         removed = true;
         break;
      }
      if(!removed) break;
   }
   return g;
}

}  // namespace mro

#endif  // MRO_ZERO_SUM_HPP
