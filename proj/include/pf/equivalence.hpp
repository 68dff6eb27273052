#pragma once

#include "pf/family.hpp"
#include "pf/qform.hpp"

#include <optional>

namespace pf {

/// Aut(A) = {P ∈ GL_d(ℤ) : PᵀAP = A}.
struct FormAutomorphisms {
    /// Integral generators with PᵀAP = A.
    std::vector<RationalMatrix> generators;
    Integer order;
    /// Action v ↦ Pv on the ± classes of the minimal vectors, indexed as in `minimal.vectors`.
    PermutationGroup minAction;
    MinimalVectorSet minimal;
};

FormAutomorphisms autGroup(const QuadraticForm& a);
FormAutomorphisms autGroup(const QuadraticForm& a, const MinimalVectorSet& min);

/// Some P ∈ GL_d(ℤ) with B = PᵀAP, verified exactly, or none.
std::optional<RationalMatrix> arithmeticEquivalence(const QuadraticForm& a, const QuadraticForm& b);

/// Permutation of the ± classes induced by v ↦ Pv; throws if P does not preserve the set.
Permutation actionOnClasses(const RationalMatrix& p, const std::vector<LatticeVector>& reps);

bool isUnimodular(const RationalMatrix& p);

} // namespace pf
