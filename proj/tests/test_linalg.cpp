#include "doctest.h"

#include "pf/linalg.hpp"
#include "pf/lp.hpp"

#include <random>

using namespace pf;

namespace {

RationalMatrix permutedInput(const RationalMatrix& m, const std::vector<std::size_t>& perm) {
    RationalMatrix p(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) p(i, j) = m(perm[i], perm[j]);
    return p;
}

RationalMatrix reconstruct(const LdltResult& f) {
    const std::size_t n = f.unitLower.rows();
    RationalMatrix d(n, n);
    for (std::size_t i = 0; i < n; ++i) d(i, i) = f.pivots[i];
    return f.unitLower * d * f.unitLower.transpose();
}

RationalMatrix randomSymmetric(std::mt19937& rng, std::size_t n, int lo, int hi) {
    std::uniform_int_distribution<int> dist(lo, hi);
    RationalMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) m(i, j) = m(j, i) = dist(rng);
    return m;
}

Rational valueAt(const RationalMatrix& m, const IntegerVector& v) {
    Rational s = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) s += m(i, j) * v[i] * v[j];
    return s;
}

} // namespace

TEST_CASE("ldlt of the identity") {
    auto f = ldlt(RationalMatrix::identity(3));
    CHECK(f.complete());
    CHECK(f.pivots == RationalVector{1, 1, 1});
    CHECK(f.unitLower == RationalMatrix::identity(3));
}

TEST_CASE("ldlt of the A2 Gram matrix") {
    auto m = RationalMatrix::symmetric({{2, -1}, {-1, 2}});
    auto f = ldlt(m);
    CHECK(f.pivots == RationalVector{2, Rational(3, 2)});
    CHECK(reconstruct(f) == permutedInput(m, f.permutation));
}

TEST_CASE("ldlt of a diagonal indefinite matrix") {
    auto f = ldlt(RationalMatrix::symmetric({{1, 0}, {0, -1}}));
    CHECK(f.pivots == RationalVector{1, -1});
}

TEST_CASE("ldlt rejects asymmetric input") {
    CHECK_THROWS_AS(ldlt(RationalMatrix{{1, 2}, {3, 4}}), PreconditionError);
    CHECK_THROWS_AS(RationalMatrix::symmetric({{1, 2}, {3, 4}}), PreconditionError);
}

TEST_CASE("ldlt blocks on a zero diagonal with nonzero off-diagonal") {
    auto f = ldlt(RationalMatrix::symmetric({{0, 1}, {1, 0}}));
    CHECK_FALSE(f.complete());
    CHECK(f.completedRank == 0);
    auto d = definiteness(RationalMatrix::symmetric({{0, 1}, {1, 0}}));
    CHECK(d.kind == Definiteness::Indefinite);
    CHECK(valueAt(RationalMatrix::symmetric({{0, 1}, {1, 0}}), d.witness) < 0);
}

TEST_CASE("definiteness examples") {
    CHECK(definiteness(RationalMatrix::symmetric({{2, -1}, {-1, 2}})).kind == Definiteness::PositiveDefinite);
    auto psd = definiteness(RationalMatrix::symmetric({{1, 1}, {1, 1}}));
    CHECK(psd.kind == Definiteness::PositiveSemidefinite);
    CHECK(psd.witness == IntegerVector{1, -1});
    auto ind = definiteness(RationalMatrix::symmetric({{1, 0}, {0, -1}}));
    CHECK(ind.kind == Definiteness::Indefinite);
    CHECK(ind.witness == IntegerVector{0, 1});
}

TEST_CASE("ldlt reconstruction and definiteness agree with brute force on random matrices") {
    std::mt19937 rng(20240601);
    int pd = 0, psd = 0, indef = 0;
    for (int trial = 0; trial < 300; ++trial) {
        RationalMatrix m = randomSymmetric(rng, 4, -5, 5);
        if (trial % 3 == 0) {
            // Bias toward PD/PSD: Gram matrices of random integer vectors.
            RationalMatrix b = randomSymmetric(rng, 4, -2, 2);
            m = b.transpose() * b;
        }
        auto f = ldlt(m);
        if (f.complete()) CHECK(reconstruct(f) == permutedInput(m, f.permutation));

        auto d = definiteness(m);
        bool sawNonPositive = false;
        for (int a = -3; a <= 3; ++a)
            for (int b = -3; b <= 3; ++b)
                for (int c = -3; c <= 3; ++c)
                    for (int e = -3; e <= 3; ++e) {
                        if (a == 0 && b == 0 && c == 0 && e == 0) continue;
                        if (valueAt(m, {a, b, c, e}) <= 0) sawNonPositive = true;
                    }
        switch (d.kind) {
        case Definiteness::PositiveDefinite:
            ++pd;
            CHECK_FALSE(sawNonPositive);
            break;
        case Definiteness::PositiveSemidefinite: {
            ++psd;
            CHECK(valueAt(m, d.witness) == 0);
            RationalVector w = toRational(std::span<const Integer>(d.witness));
            for (const auto& x : m.apply(w)) CHECK(x == 0);
            break;
        }
        case Definiteness::Indefinite:
            ++indef;
            CHECK(valueAt(m, d.witness) < 0);
            break;
        }
        if (d.kind != Definiteness::PositiveDefinite) {
            Integer g = 0;
            for (const auto& x : d.witness) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
            CHECK(g == 1);
        }
        CHECK(isPositiveDefinite(m) == (d.kind == Definiteness::PositiveDefinite));
    }
    CHECK(pd > 0);
    CHECK(psd > 0);
    CHECK(indef > 0);
}

TEST_CASE("solve examples") {
    auto r1 = solve(RationalMatrix::identity(2), RationalVector{1, 2});
    CHECK(r1.feasible);
    CHECK(r1.particular == RationalVector{1, 2});
    CHECK(r1.kernel.empty());

    auto r2 = solve(RationalMatrix(2, 2), RationalVector{0, 0});
    CHECK(r2.feasible);
    CHECK(r2.particular == RationalVector{0, 0});
    CHECK(r2.kernel.size() == 2);

    auto r3 = solve(RationalMatrix{{1, 1}}, RationalVector{2});
    CHECK(r3.feasible);
    CHECK(r3.particular == RationalVector{2, 0});
    REQUIRE(r3.kernel.size() == 1);
    CHECK(r3.kernel[0] == RationalVector{1, -1});
}

TEST_CASE("solve reports infeasibility with a certificate") {
    RationalMatrix m{{1, 1}, {2, 2}};
    RationalVector b{1, 3};
    auto r = solve(m, b);
    CHECK_FALSE(r.feasible);
    RationalVector yM(2);
    for (std::size_t j = 0; j < 2; ++j)
        for (std::size_t i = 0; i < 2; ++i) yM[j] += r.certificate[i] * m(i, j);
    CHECK(yM == RationalVector{0, 0});
    CHECK(dot(r.certificate, b) == 1);
}

TEST_CASE("determinant, inverse and rank") {
    auto a2 = RationalMatrix::symmetric({{2, -1}, {-1, 2}});
    CHECK(determinant(a2) == 3);
    CHECK(inverse(a2) * a2 == RationalMatrix::identity(2));
    CHECK(rank(RationalMatrix{{1, 2}, {2, 4}}) == 1);
    CHECK_THROWS_AS(inverse(RationalMatrix{{1, 2}, {2, 4}}), PreconditionError);
}

TEST_CASE("lattice index") {
    CHECK(latticeIndex({{1, 0}, {0, 1}, {1, 1}}, 2) == 1);
    CHECK(latticeIndex({{2, 0}, {0, 1}}, 2) == 2);
    CHECK(latticeIndex({{1, 1}, {1, -1}}, 2) == 2);
    CHECK(latticeIndex({{1, 1}}, 2) == 0);
}

TEST_CASE("lp: bounded maximum") {
    LpProblem p;
    p.objective = {1};
    p.inequalities = {{1}};
    p.inequalityRhs = {1};
    p.nonnegative = {true};
    auto r = lpSolve(p);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.primalSolution == RationalVector{1});
    CHECK(r.value == 1);
    CHECK(dot(r.certificate, p.inequalityRhs) == r.value);
}

TEST_CASE("lp: unbounded") {
    LpProblem p;
    p.objective = {1};
    p.nonnegative = {true};
    auto r = lpSolve(p);
    REQUIRE(r.status == LpStatus::Unbounded);
    CHECK(r.certificate[0] > 0);
}

TEST_CASE("lp: infeasible with Farkas certificate") {
    LpProblem p;
    p.objective = {1, 1};
    p.equalities = {{1, 1}};
    p.equalityRhs = {-1};
    p.nonnegative = {true, true};
    auto r = lpSolve(p);
    REQUIRE(r.status == LpStatus::Infeasible);
    // yᵀA >= 0 on nonnegative columns and yᵀb < 0.
    CHECK(r.certificate[0] * 1 >= 0);
    CHECK(r.certificate[0] * -1 < 0);
}

TEST_CASE("lp rejects dimension mismatches") {
    LpProblem p;
    p.objective = {1, 2};
    p.nonnegative = {true};
    CHECK_THROWS_AS(lpSolve(p), PreconditionError);
}

TEST_CASE("lp: random problems verify by substitution") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> coef(-4, 4);
    int optimal = 0, infeasible = 0, unbounded = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 4, me = 1 + trial % 2, mi = 2 + trial % 3;
        LpProblem p;
        for (std::size_t j = 0; j < n; ++j) {
            p.objective.push_back(coef(rng));
            p.nonnegative.push_back(j != 0 || trial % 4 != 0);
        }
        for (std::size_t i = 0; i < me; ++i) {
            RationalVector r;
            for (std::size_t j = 0; j < n; ++j) r.push_back(coef(rng));
            p.equalities.push_back(r);
            p.equalityRhs.push_back(coef(rng));
        }
        for (std::size_t i = 0; i < mi; ++i) {
            RationalVector r;
            for (std::size_t j = 0; j < n; ++j) r.push_back(coef(rng));
            p.inequalities.push_back(r);
            p.inequalityRhs.push_back(coef(rng));
        }
        auto out = lpSolve(p);
        auto rowValue = [](const RationalVector& row, const RationalVector& x) { return dot(row, x); };
        if (out.status != LpStatus::Infeasible) {
            for (std::size_t i = 0; i < me; ++i) CHECK(rowValue(p.equalities[i], out.primalSolution) == p.equalityRhs[i]);
            for (std::size_t i = 0; i < mi; ++i) CHECK(rowValue(p.inequalities[i], out.primalSolution) <= p.inequalityRhs[i]);
            for (std::size_t j = 0; j < n; ++j)
                if (p.nonnegative[j]) CHECK(out.primalSolution[j] >= 0);
        }
        if (out.status == LpStatus::Optimal) {
            ++optimal;
            // Dual feasibility: yᵀA = c on free columns, >= c on nonnegative ones; y_ineq >= 0.
            const auto& y = out.certificate;
            for (std::size_t i = 0; i < mi; ++i) CHECK(y[me + i] >= 0);
            for (std::size_t j = 0; j < n; ++j) {
                Rational col = 0;
                for (std::size_t i = 0; i < me; ++i) col += y[i] * p.equalities[i][j];
                for (std::size_t i = 0; i < mi; ++i) col += y[me + i] * p.inequalities[i][j];
                if (p.nonnegative[j]) CHECK(col >= p.objective[j]);
                else CHECK(col == p.objective[j]);
            }
            Rational dualValue = 0;
            for (std::size_t i = 0; i < me; ++i) dualValue += y[i] * p.equalityRhs[i];
            for (std::size_t i = 0; i < mi; ++i) dualValue += y[me + i] * p.inequalityRhs[i];
            CHECK(dualValue == out.value);
        } else if (out.status == LpStatus::Infeasible) {
            ++infeasible;
            const auto& y = out.certificate;
            for (std::size_t i = 0; i < mi; ++i) CHECK(y[me + i] >= 0);
            Rational yb = 0;
            for (std::size_t i = 0; i < me; ++i) yb += y[i] * p.equalityRhs[i];
            for (std::size_t i = 0; i < mi; ++i) yb += y[me + i] * p.inequalityRhs[i];
            CHECK(yb < 0);
            for (std::size_t j = 0; j < n; ++j) {
                Rational col = 0;
                for (std::size_t i = 0; i < me; ++i) col += y[i] * p.equalities[i][j];
                for (std::size_t i = 0; i < mi; ++i) col += y[me + i] * p.inequalities[i][j];
                if (p.nonnegative[j]) CHECK(col >= 0);
                else CHECK(col == 0);
            }
        } else {
            ++unbounded;
            const auto& d = out.certificate;
            for (std::size_t i = 0; i < me; ++i) CHECK(rowValue(p.equalities[i], d) == 0);
            for (std::size_t i = 0; i < mi; ++i) CHECK(rowValue(p.inequalities[i], d) <= 0);
            for (std::size_t j = 0; j < n; ++j)
                if (p.nonnegative[j]) CHECK(d[j] >= 0);
            CHECK(dot(p.objective, d) > 0);
        }
    }
    CHECK(optimal > 0);
    CHECK(infeasible > 0);
    CHECK(unbounded > 0);
}
