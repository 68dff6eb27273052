#include "pf/linalg.hpp"

#include <algorithm>
#include <utility>

namespace pf {

namespace {

// Solves Lᵀ x = y for unit lower-triangular L.
RationalVector backSubstituteTransposed(const RationalMatrix& lower, const RationalVector& y) {
    const std::size_t n = y.size();
    RationalVector x(y);
    for (std::size_t i = n; i-- > 0;)
        for (std::size_t j = i + 1; j < n; ++j)
            if (sgn(lower(j, i)) != 0) x[i] -= lower(j, i) * x[j];
    return x;
}

IntegerVector canonicalWitness(const RationalVector& permuted, const std::vector<std::size_t>& perm) {
    RationalVector w(permuted.size());
    for (std::size_t i = 0; i < perm.size(); ++i) w[perm[i]] = permuted[i];
    IntegerVector out = primitiveInteger(std::span<const Rational>(w));
    makeFirstNonzeroPositive(out);
    return out;
}

struct Echelon {
    RationalMatrix reduced;
    std::vector<std::size_t> pivotCols;
    RationalMatrix transform;
};

// Gauss-Jordan elimination, recording the row transform T with T·M = reduced.
Echelon gaussJordan(const RationalMatrix& m, bool trackTransform) {
    Echelon e{m, {}, trackTransform ? RationalMatrix::identity(m.rows()) : RationalMatrix()};
    RationalMatrix& a = e.reduced;
    std::size_t row = 0;
    for (std::size_t col = 0; col < a.cols() && row < a.rows(); ++col) {
        std::size_t piv = row;
        while (piv < a.rows() && sgn(a(piv, col)) == 0) ++piv;
        if (piv == a.rows()) continue;
        if (piv != row) {
            for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a(piv, j), a(row, j));
            if (trackTransform)
                for (std::size_t j = 0; j < a.rows(); ++j) std::swap(e.transform(piv, j), e.transform(row, j));
        }
        Rational inv = 1 / a(row, col);
        for (std::size_t j = 0; j < a.cols(); ++j) a(row, j) *= inv;
        if (trackTransform)
            for (std::size_t j = 0; j < a.rows(); ++j) e.transform(row, j) *= inv;
        for (std::size_t i = 0; i < a.rows(); ++i) {
            if (i == row || sgn(a(i, col)) == 0) continue;
            Rational f = a(i, col);
            for (std::size_t j = col; j < a.cols(); ++j)
                if (sgn(a(row, j)) != 0) a(i, j) -= f * a(row, j);
            if (trackTransform)
                for (std::size_t j = 0; j < a.rows(); ++j)
                    if (sgn(e.transform(row, j)) != 0) e.transform(i, j) -= f * e.transform(row, j);
        }
        e.pivotCols.push_back(col);
        ++row;
    }
    return e;
}

} // namespace

LdltResult ldlt(const RationalMatrix& m) {
    m.requireSymmetric("ldlt");
    const std::size_t n = m.rows();
    RationalMatrix s(m);
    LdltResult r;
    r.unitLower = RationalMatrix::identity(n);
    r.permutation.resize(n);
    for (std::size_t i = 0; i < n; ++i) r.permutation[i] = i;

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (abs(s(i, i)) > abs(s(p, p))) p = i;
        if (sgn(s(p, p)) == 0) {
            bool remainderZero = true;
            for (std::size_t i = k; i < n && remainderZero; ++i)
                for (std::size_t j = k; j < n; ++j)
                    if (sgn(s(i, j)) != 0) {
                        remainderZero = false;
                        break;
                    }
            if (remainderZero) {
                for (std::size_t i = k; i < n; ++i) r.pivots.emplace_back(0);
                r.completedRank = n;
                return r;
            }
            r.completedRank = k;
            r.blockedRemainder = RationalMatrix(n - k, n - k);
            for (std::size_t i = k; i < n; ++i)
                for (std::size_t j = k; j < n; ++j) r.blockedRemainder(i - k, j - k) = s(i, j);
            return r;
        }
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(s(p, j), s(k, j));
            for (std::size_t i = 0; i < n; ++i) std::swap(s(i, p), s(i, k));
            for (std::size_t j = 0; j < k; ++j) std::swap(r.unitLower(p, j), r.unitLower(k, j));
            std::swap(r.permutation[p], r.permutation[k]);
        }
        const Rational pivot = s(k, k);
        r.pivots.push_back(pivot);
        for (std::size_t i = k + 1; i < n; ++i) r.unitLower(i, k) = s(i, k) / pivot;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (sgn(r.unitLower(i, k)) == 0) continue;
            for (std::size_t j = k + 1; j <= i; ++j) {
                s(i, j) -= r.unitLower(i, k) * s(k, j);
                s(j, i) = s(i, j);
            }
        }
        for (std::size_t i = k; i < n; ++i) {
            s(i, k) = 0;
            s(k, i) = 0;
        }
    }
    r.completedRank = n;
    return r;
}

DefinitenessResult definiteness(const RationalMatrix& m) {
    LdltResult f = ldlt(m);
    const std::size_t n = m.rows();
    if (!f.complete()) {
        const std::size_t k = f.completedRank;
        const RationalMatrix& rem = f.blockedRemainder;
        for (std::size_t a = 0; a < rem.rows(); ++a)
            for (std::size_t b = a + 1; b < rem.cols(); ++b) {
                if (sgn(rem(a, b)) == 0) continue;
                RationalVector y(n);
                y[k + a] = 1;
                y[k + b] = sgn(rem(a, b)) > 0 ? -1 : 1;
                return {Definiteness::Indefinite,
                        canonicalWitness(backSubstituteTransposed(f.unitLower, y), f.permutation)};
            }
        throw InternalError("ldlt blocked on a zero remainder");
    }
    for (std::size_t k = 0; k < n; ++k)
        if (sgn(f.pivots[k]) < 0) {
            RationalVector y(n);
            y[k] = 1;
            return {Definiteness::Indefinite, canonicalWitness(backSubstituteTransposed(f.unitLower, y), f.permutation)};
        }
    for (std::size_t k = 0; k < n; ++k)
        if (sgn(f.pivots[k]) == 0) {
            RationalVector y(n);
            y[k] = 1;
            return {Definiteness::PositiveSemidefinite,
                    canonicalWitness(backSubstituteTransposed(f.unitLower, y), f.permutation)};
        }
    return {Definiteness::PositiveDefinite, {}};
}

bool isPositiveDefinite(const RationalMatrix& m) {
    // Cheap exact pivot test without witness extraction.
    m.requireSymmetric("isPositiveDefinite");
    const std::size_t n = m.rows();
    RationalMatrix s(m);
    for (std::size_t k = 0; k < n; ++k) {
        if (sgn(s(k, k)) <= 0) return false;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (sgn(s(i, k)) == 0) continue;
            Rational f = s(i, k) / s(k, k);
            for (std::size_t j = k + 1; j <= i; ++j) s(i, j) -= f * s(k, j);
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < i; ++j) s(j, i) = s(i, j);
    }
    return true;
}

SolveResult solve(const RationalMatrix& m, std::span<const Rational> b) {
    if (b.size() != m.rows()) throw PreconditionError("solve: right-hand side length mismatch");
    RationalMatrix aug(m.rows(), m.cols() + 1);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) aug(i, j) = m(i, j);
        aug(i, m.cols()) = b[i];
    }
    Echelon e = gaussJordan(aug, true);
    SolveResult r;
    if (!e.pivotCols.empty() && e.pivotCols.back() == m.cols()) {
        const std::size_t row = e.pivotCols.size() - 1;
        r.certificate = e.transform.row(row);
        // reduced(row, last) == 1 so yᵀb = 1 already.
        return r;
    }
    r.feasible = true;
    r.particular.assign(m.cols(), Rational(0));
    std::vector<bool> isPivot(m.cols(), false);
    for (std::size_t i = 0; i < e.pivotCols.size(); ++i) {
        isPivot[e.pivotCols[i]] = true;
        r.particular[e.pivotCols[i]] = e.reduced(i, m.cols());
    }
    for (std::size_t f = 0; f < m.cols(); ++f) {
        if (isPivot[f]) continue;
        RationalVector k(m.cols());
        k[f] = 1;
        for (std::size_t i = 0; i < e.pivotCols.size(); ++i) k[e.pivotCols[i]] = -e.reduced(i, f);
        IntegerVector ik = primitiveInteger(std::span<const Rational>(k));
        makeFirstNonzeroPositive(ik);
        r.kernel.push_back(toRational(std::span<const Integer>(ik)));
    }
    return r;
}

std::vector<IntegerVector> kernelBasis(const RationalMatrix& m) {
    Echelon e = gaussJordan(m, false);
    std::vector<bool> isPivot(m.cols(), false);
    for (auto c : e.pivotCols) isPivot[c] = true;
    std::vector<IntegerVector> out;
    for (std::size_t f = 0; f < m.cols(); ++f) {
        if (isPivot[f]) continue;
        RationalVector k(m.cols());
        k[f] = 1;
        for (std::size_t i = 0; i < e.pivotCols.size(); ++i) k[e.pivotCols[i]] = -e.reduced(i, f);
        IntegerVector ik = primitiveInteger(std::span<const Rational>(k));
        makeFirstNonzeroPositive(ik);
        out.push_back(std::move(ik));
    }
    return out;
}

std::size_t rank(const RationalMatrix& m) { return gaussJordan(m, false).pivotCols.size(); }

Rational determinant(const RationalMatrix& m) {
    if (!m.square()) throw PreconditionError("determinant: matrix not square");
    RationalMatrix a(m);
    const std::size_t n = a.rows();
    Rational det = 1;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        while (p < n && sgn(a(p, k)) == 0) ++p;
        if (p == n) return 0;
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(p, j), a(k, j));
            det = -det;
        }
        det *= a(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            if (sgn(a(i, k)) == 0) continue;
            Rational f = a(i, k) / a(k, k);
            for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
        }
    }
    return det;
}

RationalMatrix inverse(const RationalMatrix& m) {
    if (!m.square()) throw PreconditionError("inverse: matrix not square");
    Echelon e = gaussJordan(m, true);
    if (e.pivotCols.size() != m.rows()) throw PreconditionError("inverse: matrix is singular");
    return e.transform;
}

std::vector<std::size_t> independentRows(const std::vector<RationalVector>& rows) {
    std::vector<std::size_t> out;
    if (rows.empty()) return out;
    RowSpace space(rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (space.add(rows[i])) out.push_back(i);
    return out;
}

Integer latticeIndex(const std::vector<LatticeVector>& vectors, std::size_t dim) {
    std::vector<IntegerVector> rows;
    for (const auto& v : vectors) {
        IntegerVector r(dim);
        for (std::size_t j = 0; j < dim; ++j) r[j] = v[j];
        rows.push_back(std::move(r));
    }
    Integer index = 1;
    std::size_t top = 0;
    for (std::size_t col = 0; col < dim; ++col) {
        // Euclid on column `col` among rows[top..].
        while (true) {
            std::size_t best = rows.size();
            for (std::size_t i = top; i < rows.size(); ++i)
                if (sgn(rows[i][col]) != 0 && (best == rows.size() || abs(rows[i][col]) < abs(rows[best][col])))
                    best = i;
            if (best == rows.size()) return 0;
            std::swap(rows[top], rows[best]);
            bool done = true;
            for (std::size_t i = top + 1; i < rows.size(); ++i) {
                if (sgn(rows[i][col]) == 0) continue;
                Integer q;
                mpz_fdiv_q(q.get_mpz_t(), rows[i][col].get_mpz_t(), rows[top][col].get_mpz_t());
                for (std::size_t j = col; j < dim; ++j) rows[i][j] -= q * rows[top][j];
                if (sgn(rows[i][col]) != 0) done = false;
            }
            if (done) break;
        }
        index *= abs(rows[top][col]);
        ++top;
    }
    return index;
}

RationalVector RowSpace::reduce(std::span<const Rational> v) const {
    RationalVector r(v.begin(), v.end());
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        const Rational& c = r[pivots_[i]];
        if (sgn(c) == 0) continue;
        Rational f = c;
        for (std::size_t j = 0; j < dim_; ++j)
            if (sgn(rows_[i][j]) != 0) r[j] -= f * rows_[i][j];
    }
    return r;
}

bool RowSpace::add(std::span<const Rational> v) {
    if (v.size() != dim_) throw PreconditionError("RowSpace: vector length mismatch");
    RationalVector r = reduce(v);
    std::size_t p = 0;
    while (p < dim_ && sgn(r[p]) == 0) ++p;
    if (p == dim_) return false;
    Rational inv = 1 / r[p];
    for (auto& x : r) x *= inv;
    for (auto& row : rows_) {
        if (sgn(row[p]) == 0) continue;
        Rational f = row[p];
        for (std::size_t j = 0; j < dim_; ++j)
            if (sgn(r[j]) != 0) row[j] -= f * r[j];
    }
    rows_.push_back(std::move(r));
    pivots_.push_back(p);
    return true;
}

bool RowSpace::contains(std::span<const Rational> v) const {
    RationalVector r = reduce(v);
    return std::all_of(r.begin(), r.end(), [](const Rational& x) { return sgn(x) == 0; });
}

} // namespace pf
