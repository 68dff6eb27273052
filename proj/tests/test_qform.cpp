#include "doctest.h"

#include "pf/qform.hpp"
#include "pf/symcoords.hpp"
#include "test_helpers.hpp"

#include <sstream>

using namespace pf;
using namespace pf::testing;

TEST_CASE("minimum of the identity") {
    for (std::size_t d = 1; d <= 5; ++d) {
        auto m = arithmeticalMinimum(catalogForm("I" + std::to_string(d)));
        CHECK(m.minimum == 1);
        REQUIRE(m.vectors.size() == d);
        // sorted lexicographically: e_d < ... < e_1
        for (std::size_t i = 0; i < d; ++i) {
            LatticeVector e(d, 0);
            e[d - 1 - i] = 1;
            CHECK(m.vectors[i] == e);
        }
    }
}

TEST_CASE("minimum of A2") {
    auto m = arithmeticalMinimum(catalogForm("A2"));
    CHECK(m.minimum == 2);
    CHECK(m.vectors == std::vector<LatticeVector>{{0, 1}, {1, 0}, {1, 1}});
    CHECK(m.kissingNumber() == 6);
}

TEST_CASE("catalog kissing numbers, determinants and minima") {
    struct Row { const char* name; std::size_t kissing; int det; };
    for (auto [name, kissing, det] : {Row{"A2", 6, 3}, Row{"A3", 12, 4}, Row{"A4", 20, 5}, Row{"D4", 24, 4},
                                      Row{"D5", 40, 4}, Row{"A6", 42, 7}, Row{"E6", 72, 3}, Row{"E7", 126, 2},
                                      Row{"E8", 240, 1}}) {
        auto q = catalogForm(name);
        auto m = arithmeticalMinimum(q);
        CAPTURE(name);
        CHECK(m.minimum == 2);
        CHECK(m.kissingNumber() == kissing);
        CHECK(determinant(q.gram()) == det);
    }
}

TEST_CASE("catalog entries") {
    CHECK(catalogForm("A2").gram() == RationalMatrix::symmetric({{2, -1}, {-1, 2}}));
    CHECK(catalogForm("A_3").gram() == RationalMatrix::symmetric({{2, -1, 0}, {-1, 2, -1}, {0, -1, 2}}));
    CHECK(catalogForm("Identity_2").gram() == RationalMatrix::identity(2));
    CHECK_THROWS_AS(catalogForm("F4"), PreconditionError);
    CHECK_THROWS_AS(catalogForm("E9"), PreconditionError);
    CHECK_THROWS_AS(catalogForm("Ax"), PreconditionError);
}

TEST_CASE("vectorsUpTo examples") {
    auto i2 = catalogForm("I2");
    auto v1 = vectorsUpTo(i2, 1);
    REQUIRE(v1.size() == 2);
    auto v2 = vectorsUpTo(i2, 2);
    std::set<LatticeVector> s2;
    for (auto& nv : v2) s2.insert(nv.vector);
    CHECK(s2 == std::set<LatticeVector>{{1, 0}, {0, 1}, {1, 1}, {1, -1}});
    auto a2 = vectorsUpTo(catalogForm("A2"), 2);
    CHECK(a2.size() == 3);
    // next norm of A2 is 6
    CHECK(vectorsUpTo(catalogForm("A2"), 5).size() == 3);
    CHECK(vectorsUpTo(catalogForm("A2"), 6).size() == 6);
}

TEST_CASE("non positive definite input is rejected with a witness") {
    QuadraticForm bad(RationalMatrix::symmetric({{1, 0}, {0, -1}}));
    try {
        arithmeticalMinimum(bad);
        FAIL("expected NotPositiveDefinite");
    } catch (const NotPositiveDefinite& e) {
        CHECK(e.verdict().kind == Definiteness::Indefinite);
        CHECK(e.verdict().witness == IntegerVector{0, 1});
    }
    CHECK_THROWS_AS(vectorsUpTo(QuadraticForm(RationalMatrix::symmetric({{1, 1}, {1, 1}})), 3), NotPositiveDefinite);
}

TEST_CASE("perfection") {
    CHECK_FALSE(isPerfect(catalogForm("I2")));
    CHECK(isPerfect(catalogForm("A2")));
    CHECK(isPerfect(catalogForm("A3")));
    CHECK(isPerfect(catalogForm("D4")));
    CHECK(isPerfect(catalogForm("E6")));
    CHECK(isPerfect(catalogForm("E8")));
    CHECK_FALSE(isPerfect(catalogForm("I4")));
}

TEST_CASE("eutaxy and extremeness") {
    CHECK(isEutactic(catalogForm("A2")));
    CHECK(isEutactic(catalogForm("I2")));
    CHECK(isExtreme(catalogForm("A2")));
    CHECK_FALSE(isExtreme(catalogForm("I2")));
    CHECK(isExtreme(catalogForm("D4")));
    CHECK(isExtreme(catalogForm("E6")));
}

TEST_CASE("eutaxy certificate reconstructs the inverse") {
    for (const char* name : {"A2", "A3", "D4", "D5", "E6"}) {
        CAPTURE(name);
        auto q = catalogForm(name);
        auto min = arithmeticalMinimum(q);
        auto e = eutaxy(q, min);
        REQUIRE(e.eutactic);
        const std::size_t d = q.dim();
        RationalMatrix sum(d, d);
        for (std::size_t k = 0; k < min.vectors.size(); ++k) {
            CHECK(e.coefficients[k] > 0);
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j)
                    sum(i, j) += e.coefficients[k] * min.vectors[k][i] * min.vectors[k][j];
        }
        CHECK(sum == inverse(q.gram()));
    }
}

TEST_CASE("a non-eutactic form") {
    // diag(1, 2) has Min = {e1} only, so A⁻¹ = diag(1, 1/2) is not a combination of e1 e1ᵀ.
    QuadraticForm q(RationalMatrix::symmetric({{1, 0}, {0, 2}}));
    CHECK_FALSE(isEutactic(q));
}

TEST_CASE("Hermite power") {
    CHECK(hermitePower(catalogForm("I3")) == 1);
    CHECK(hermitePower(catalogForm("A2")) == Rational(4, 3));
    CHECK(hermitePower(catalogForm("E8")) == 256);
    CHECK(hermitePower(catalogForm("A2").scaled(7)) == Rational(4, 3));
}

TEST_CASE("normalizeScale") {
    CHECK(normalizeScale(catalogForm("I2")) == catalogForm("I2").scaled(2));
    CHECK(normalizeScale(catalogForm("A2")) == catalogForm("A2"));
    CHECK(normalizeScale(catalogForm("A2").scaled(6)) == catalogForm("A2"));
    CHECK(normalizeScale(catalogForm("A2").scaled(Rational(1, 3))) == catalogForm("A2"));
}

TEST_CASE("re-enumeration oracle on random forms") {
    std::mt19937 rng(99);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t d = 2 + trial % 3;
        auto q = randomPositiveDefinite(rng, d);
        auto min = arithmeticalMinimum(q);
        auto brute = bruteForceUpTo(q, min.minimum);
        REQUIRE(!brute.empty());
        CHECK(brute.front().norm == min.minimum);
        std::vector<LatticeVector> bv;
        for (auto& nv : brute) bv.push_back(nv.vector);
        std::sort(bv.begin(), bv.end());
        CHECK(bv == min.vectors);

        Rational bound = min.minimum * 3;
        auto fp = vectorsUpTo(q, bound);
        auto bf = bruteForceUpTo(q, bound);
        REQUIRE(fp.size() == bf.size());
        for (std::size_t i = 0; i < fp.size(); ++i) {
            CHECK(fp[i].vector == bf[i].vector);
            CHECK(fp[i].norm == bf[i].norm);
        }
    }
}

TEST_CASE("scale equivariance and equivalence invariance") {
    std::mt19937 rng(5);
    for (const char* name : {"A2", "A3", "D4", "A4"}) {
        auto q = catalogForm(name);
        auto min = arithmeticalMinimum(q);
        for (int c : {3, 5}) {
            auto sm = arithmeticalMinimum(q.scaled(c));
            CHECK(sm.minimum == min.minimum * c);
            CHECK(sm.vectors == min.vectors);
        }
        for (int trial = 0; trial < 10; ++trial) {
            auto p = randomUnimodular(rng, q.dim());
            auto t = q.transformed(p);
            auto tm = arithmeticalMinimum(t);
            CHECK(tm.minimum == min.minimum);
            CHECK(tm.vectors.size() == min.vectors.size());
            CHECK(hermitePower(t) == hermitePower(q));
            CHECK(isPerfect(t, tm) == isPerfect(q, min));
            CHECK(eutaxy(t, tm).eutactic == eutaxy(q, min).eutactic);
        }
    }
    for (int trial = 0; trial < 10; ++trial) {
        auto q = randomPositiveDefinite(rng, 3);
        auto p = randomUnimodular(rng, 3);
        auto t = q.transformed(p);
        auto a = arithmeticalMinimum(q), b = arithmeticalMinimum(t);
        CHECK(a.minimum == b.minimum);
        CHECK(a.vectors.size() == b.vectors.size());
        CHECK(isPerfect(q, a) == isPerfect(t, b));
        CHECK(eutaxy(q, a).eutactic == eutaxy(t, b).eutactic);
    }
}

TEST_CASE("perfection rank law") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        auto q = randomPositiveDefinite(rng, 3);
        auto min = arithmeticalMinimum(q);
        SymCoordinates sc(3);
        RationalMatrix rows(min.vectors.size(), sc.size());
        for (std::size_t k = 0; k < min.vectors.size(); ++k) {
            auto r = sc.rankOneRay(min.vectors[k]);
            for (std::size_t j = 0; j < sc.size(); ++j) rows(k, j) = r[j];
        }
        CHECK(isPerfect(q, min) == (rank(rows) == 6));
    }
}

TEST_CASE("symmetric coordinates pair functionals with rank-one rays as vᵀFv") {
    SymCoordinates sc(3);
    RationalMatrix f = RationalMatrix::symmetric({{1, 2, Rational(1, 2)}, {2, -3, 0}, {Rational(1, 2), 0, 5}});
    LatticeVector v{1, -2, 3};
    auto flat = sc.flattenFunctional(f);
    CHECK(sc.unflattenFunctional(std::span<const Rational>(flat)) == f);
    auto ray = sc.rankOneRay(v);
    auto rr = toRational(std::span<const Integer>(ray));
    CHECK(dot(flat, rr) == quadraticValue(f, v));
}

TEST_CASE("form file parsing") {
    std::istringstream ok("2\n2 -1\n-1 2\n");
    CHECK(parseForm(ok) == catalogForm("A2"));
    std::istringstream frac("2\n1/2 0\n0 3/6\n");
    CHECK(parseForm(frac).gram()(1, 1) == Rational(1, 2));
    std::istringstream asym("2\n2 -1\n0 2\n");
    CHECK_THROWS_WITH_AS(parseForm(asym), doctest::Contains("(1,2)"), PreconditionError);
    std::istringstream badTok("2\n2 x\n-1 2\n");
    CHECK_THROWS_WITH_AS(parseForm(badTok), doctest::Contains("line 2, column 2"), PreconditionError);
    std::istringstream shortRow("2\n2\n-1 2\n");
    CHECK_THROWS_AS(parseForm(shortRow), PreconditionError);
    std::istringstream zeroDen("1\n1/0\n");
    CHECK_THROWS_AS(parseForm(zeroDen), PreconditionError);
    std::istringstream round(formatForm(catalogForm("E6")));
    CHECK(parseForm(round) == catalogForm("E6"));
}
