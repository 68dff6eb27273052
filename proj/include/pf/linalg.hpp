#pragma once

#include "pf/exact.hpp"

#include <optional>
#include <vector>

namespace pf {

/// Pivoted LDLᵀ factorization: P·M·Pᵀ = L·D·Lᵀ where (P·M·Pᵀ)(i,j) = M(perm[i], perm[j]).
///
/// Pivoting picks the remaining diagonal entry of greatest absolute value (first index on
/// ties). When every remaining diagonal entry is zero but the remaining block is not, the
/// elimination is blocked and completedRank records how many pivots were taken.
struct LdltResult {
    RationalVector pivots;
    RationalMatrix unitLower;
    std::vector<std::size_t> permutation;
    std::size_t completedRank = 0;
    /// Remaining Schur complement (size d - completedRank) when blocked, empty otherwise.
    RationalMatrix blockedRemainder;

    bool complete() const { return completedRank == unitLower.rows(); }
};

LdltResult ldlt(const RationalMatrix& m);

enum class Definiteness { PositiveDefinite, PositiveSemidefinite, Indefinite };

/// Definiteness verdict. For non-PD input `witness` is an integer vector with content 1
/// and first nonzero entry positive: a kernel vector when semidefinite, a vector with
/// negative value when indefinite.
struct DefinitenessResult {
    Definiteness kind;
    IntegerVector witness;
};

DefinitenessResult definiteness(const RationalMatrix& m);
bool isPositiveDefinite(const RationalMatrix& m);

/// Affine solution set of M x = b.
struct SolveResult {
    bool feasible = false;
    RationalVector particular;
    std::vector<RationalVector> kernel;
    /// When infeasible: y with yᵀM = 0 and yᵀb = 1.
    RationalVector certificate;
};

SolveResult solve(const RationalMatrix& m, std::span<const Rational> b);

/// Basis of {x : M x = 0}; vectors are primitive integers with first nonzero entry positive.
std::vector<IntegerVector> kernelBasis(const RationalMatrix& m);
std::size_t rank(const RationalMatrix& m);
Rational determinant(const RationalMatrix& m);
/// Throws PreconditionError for singular input.
RationalMatrix inverse(const RationalMatrix& m);

/// Indices of a maximal linearly independent subset, chosen greedily in order.
std::vector<std::size_t> independentRows(const std::vector<RationalVector>& rows);

/// Index of the lattice generated by integer vectors in ℤ^d, or 0 if they do not span ℝ^d.
Integer latticeIndex(const std::vector<LatticeVector>& vectors, std::size_t dim);

/// Incremental rank tracker over rational row vectors (echelon basis kept reduced).
class RowSpace {
public:
    explicit RowSpace(std::size_t dim) : dim_(dim) {}
    /// Returns true if v was independent of the rows added so far (and adds it).
    bool add(std::span<const Rational> v);
    bool contains(std::span<const Rational> v) const;
    std::size_t rank() const { return rows_.size(); }
    std::size_t dim() const { return dim_; }

private:
    RationalVector reduce(std::span<const Rational> v) const;
    std::size_t dim_;
    std::vector<RationalVector> rows_;
    std::vector<std::size_t> pivots_;
};

} // namespace pf
