#pragma once

#include "pf/exact.hpp"

namespace pf {

/// Coordinates on the space of symmetric d×d matrices, m = d(d+1)/2.
///
/// Order: diagonal entries (1,1)..(d,d), then off-diagonal (i,j), i<j, row-major.
/// A functional F is stored as (F_ii; F_ij) and the rank-one ray v vᵀ as (v_i²; 2 v_i v_j),
/// so their dot product is exactly vᵀ F v.
class SymCoordinates {
public:
    explicit SymCoordinates(std::size_t dim);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return dim_ * (dim_ + 1) / 2; }
    std::pair<std::size_t, std::size_t> entry(std::size_t k) const { return entries_[k]; }

    RationalVector flattenFunctional(const RationalMatrix& f) const;
    RationalMatrix unflattenFunctional(std::span<const Rational> coords) const;
    RationalMatrix unflattenFunctional(std::span<const Integer> coords) const;
    IntegerVector rankOneRay(std::span<const long> v) const;

private:
    std::size_t dim_;
    std::vector<std::pair<std::size_t, std::size_t>> entries_;
};

} // namespace pf
