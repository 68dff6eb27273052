#pragma once

#include "pf/exact.hpp"

#include <vector>

namespace pf {

/// maximize objectiveᵀx subject to
///   equalities·x  = equalityRhs
///   inequalities·x <= inequalityRhs
///   x_j >= 0 for every j with nonnegative[j]; the remaining variables are free.
///
/// Solved by a dense two-phase tableau simplex over exact rationals with Bland's
/// smallest-index rule, so it always terminates.
struct LpProblem {
    RationalVector objective;
    std::vector<RationalVector> equalities;
    RationalVector equalityRhs;
    std::vector<RationalVector> inequalities;
    RationalVector inequalityRhs;
    std::vector<bool> nonnegative;

    std::size_t variableCount() const { return objective.size(); }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

/// Certificates, in terms of the original rows/variables:
///   Optimal: `certificate` is a dual solution y (equality rows first, then inequality
///                rows) with yᵀb = optimal value.
///   Infeasible: Farkas vector y: y_ineq >= 0, (yᵀA)_j >= 0 for nonnegative j and = 0 for
///                free j, and yᵀb < 0.
///   Unbounded: `certificate` is a primal ray d: A_eq d = 0, A_ineq d <= 0, d_j >= 0 on
///                nonnegative variables, objectiveᵀd > 0. `primalSolution` holds a feasible point.
struct LpOutcome {
    LpStatus status = LpStatus::Infeasible;
    RationalVector primalSolution;
    Rational value;
    RationalVector certificate;
};

LpOutcome lpSolve(const LpProblem& problem);

} // namespace pf
