#include "pf/symcoords.hpp"

namespace pf {

SymCoordinates::SymCoordinates(std::size_t dim) : dim_(dim) {
    for (std::size_t i = 0; i < dim; ++i) entries_.emplace_back(i, i);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = i + 1; j < dim; ++j) entries_.emplace_back(i, j);
}

RationalVector SymCoordinates::flattenFunctional(const RationalMatrix& f) const {
    f.requireSymmetric("flattenFunctional");
    if (f.rows() != dim_) throw PreconditionError("flattenFunctional: dimension mismatch");
    RationalVector out(size());
    for (std::size_t k = 0; k < size(); ++k) out[k] = f(entries_[k].first, entries_[k].second);
    return out;
}

RationalMatrix SymCoordinates::unflattenFunctional(std::span<const Rational> coords) const {
    if (coords.size() != size()) throw PreconditionError("unflattenFunctional: length mismatch");
    RationalMatrix f(dim_, dim_);
    for (std::size_t k = 0; k < size(); ++k) {
        auto [i, j] = entries_[k];
        f(i, j) = coords[k];
        f(j, i) = coords[k];
    }
    return f;
}

RationalMatrix SymCoordinates::unflattenFunctional(std::span<const Integer> coords) const {
    RationalVector q = toRational(coords);
    return unflattenFunctional(std::span<const Rational>(q));
}

IntegerVector SymCoordinates::rankOneRay(std::span<const long> v) const {
    if (v.size() != dim_) throw PreconditionError("rankOneRay: dimension mismatch");
    IntegerVector out(size());
    for (std::size_t k = 0; k < size(); ++k) {
        auto [i, j] = entries_[k];
        out[k] = Integer(v[i]) * v[j];
        if (i != j) out[k] *= 2;
    }
    return out;
}

} // namespace pf
