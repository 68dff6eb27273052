#include "doctest.h"

#include "pf/permgroup.hpp"

#include <algorithm>
#include <random>
#include <set>

using namespace pf;

namespace {

Permutation cycle(std::size_t n, std::initializer_list<std::uint32_t> c) {
    Permutation p = identityPermutation(n);
    std::vector<std::uint32_t> v(c);
    for (std::size_t k = 0; k < v.size(); ++k) p[v[k]] = v[(k + 1) % v.size()];
    return p;
}

PermutationGroup symmetric(std::size_t n) {
    if (n < 2) return PermutationGroup(n);
    Permutation rot = identityPermutation(n);
    for (std::uint32_t i = 0; i < n; ++i) rot[i] = static_cast<std::uint32_t>((i + 1) % n);
    return PermutationGroup(n, {cycle(n, {0, 1}), rot});
}

std::set<Permutation> closure(std::size_t n, const std::vector<Permutation>& gens) {
    std::set<Permutation> seen{identityPermutation(n)};
    std::vector<Permutation> queue{identityPermutation(n)};
    while (!queue.empty()) {
        Permutation p = queue.back();
        queue.pop_back();
        for (const auto& g : gens) {
            Permutation q = compose(g, p);
            if (seen.insert(q).second) queue.push_back(q);
        }
    }
    return seen;
}

Permutation randomPermutation(std::mt19937& rng, std::size_t n) {
    Permutation p = identityPermutation(n);
    std::shuffle(p.begin(), p.end(), rng);
    return p;
}

// Random generators that are products of few short cycles keep the groups varied.
std::vector<Permutation> randomGenerators(std::mt19937& rng, std::size_t n) {
    std::uniform_int_distribution<int> count(1, 3), kind(0, 2);
    std::vector<Permutation> gens;
    int k = count(rng);
    for (int i = 0; i < k; ++i) {
        if (kind(rng) == 0) {
            gens.push_back(randomPermutation(rng, n));
        } else {
            Permutation p = identityPermutation(n);
            std::uniform_int_distribution<std::uint32_t> pt(0, static_cast<std::uint32_t>(n - 1));
            std::swap(p[pt(rng)], p[pt(rng)]);
            std::swap(p[pt(rng)], p[pt(rng)]);
            gens.push_back(p);
        }
    }
    return gens;
}

PointSet randomSubset(std::mt19937& rng, std::size_t n) {
    std::uniform_int_distribution<int> coin(0, 2);
    PointSet s;
    for (std::uint32_t i = 0; i < n; ++i)
        if (coin(rng) == 0) s.push_back(i);
    return s;
}

} // namespace

TEST_CASE("permutation basics") {
    Permutation a = cycle(4, {0, 1, 2});
    Permutation b = cycle(4, {2, 3});
    CHECK(compose(a, inverse(a)) == identityPermutation(4));
    CHECK(compose(a, b)[3] == a[b[3]]);
    CHECK(imageOf(a, {0, 3}) == PointSet{1, 3});
    CHECK_THROWS_AS(requirePermutation({0, 0, 1}, 3), PreconditionError);
}

TEST_CASE("orders of symmetric and cyclic groups") {
    CHECK(symmetric(3).order() == 6);
    CHECK(symmetric(4).order() == 24);
    CHECK(symmetric(8).order() == 40320);
    CHECK(PermutationGroup(5, {cycle(5, {0, 1, 2, 3, 4})}).order() == 5);
    CHECK(PermutationGroup(5).order() == 1);
    PermutationGroup s5 = symmetric(5);
    CHECK(s5.contains(cycle(5, {1, 3})));
    CHECK_FALSE(PermutationGroup(5, {cycle(5, {0, 1, 2, 3, 4})}).contains(cycle(5, {1, 3})));
    PermutationGroup prefixed = s5.withBasePrefix({3, 1});
    CHECK(prefixed.base()[0] == 3);
    CHECK(prefixed.base()[1] == 1);
    CHECK(prefixed.order() == 120);
}

TEST_CASE("Schreier-Sims order matches brute-force closure") {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 150; ++trial) {
        std::size_t n = 2 + static_cast<std::size_t>(trial % 7);
        auto gens = randomGenerators(rng, n);
        PermutationGroup g(n, gens);
        auto all = closure(n, gens);
        CHECK(g.order() == static_cast<unsigned long>(all.size()));
        auto elems = g.elements();
        CHECK(std::set<Permutation>(elems.begin(), elems.end()) == all);
        Permutation r = randomPermutation(rng, n);
        CHECK(g.contains(r) == (all.count(r) == 1));
    }
}

TEST_CASE("set stabilizer examples") {
    CHECK(setStabilizer(symmetric(3), {0}).order() == 2);
    CHECK(setStabilizer(symmetric(4), {0, 1}).order() == 4);
    CHECK(setStabilizer(symmetric(6), {0, 2, 4}).order() == 36);
    CHECK(setStabilizer(PermutationGroup(4, {cycle(4, {0, 1, 2, 3})}), {0, 2}).order() == 2);
}

TEST_CASE("set stabilizer and transporter agree with brute force") {
    std::mt19937 rng(8);
    for (int trial = 0; trial < 120; ++trial) {
        std::size_t n = 3 + static_cast<std::size_t>(trial % 6);
        auto gens = randomGenerators(rng, n);
        PermutationGroup g(n, gens);
        auto all = closure(n, gens);
        PointSet s = randomSubset(rng, n);
        std::size_t fixing = 0;
        std::set<PointSet> orbit;
        for (const auto& p : all) {
            if (imageOf(p, s) == s) ++fixing;
            orbit.insert(imageOf(p, s));
        }
        PermutationGroup stab = setStabilizer(g, s);
        CHECK(stab.order() == static_cast<unsigned long>(fixing));
        for (const auto& h : stab.generators()) CHECK(imageOf(h, s) == s);
        CHECK(g.order() == stab.order() * static_cast<unsigned long>(orbit.size()));
        CHECK(setOrbit(g, s) == std::vector<PointSet>(orbit.begin(), orbit.end()));

        PointSet t = imageOf(randomPermutation(rng, n), s);
        auto tr = setTransporter(g, s, t);
        CHECK(tr.has_value() == (orbit.count(t) == 1));
        if (tr) {
            CHECK(g.contains(*tr));
            CHECK(imageOf(*tr, s) == t);
        }
    }
}

TEST_CASE("pruned set searches match the unpruned ones") {
    std::mt19937 rng(21);
    for (int trial = 0; trial < 80; ++trial) {
        std::size_t n = 4 + static_cast<std::size_t>(trial % 5);
        auto gens = randomGenerators(rng, n);
        PermutationGroup g(n, gens);
        auto all = closure(n, gens);
        PointSet s = randomSubset(rng, n);
        PointSet t = imageOf(randomPermutation(rng, n), s);
        // Exact prune: some element carries s to t and the fixed points to their images.
        auto exact = [&](const PointSet& to) {
            return [&, to](const PointSet& source, const PointSet& target) {
                for (const auto& p : all) {
                    if (imageOf(p, s) != to) continue;
                    bool ok = true;
                    for (std::size_t k = 0; k < source.size() && ok; ++k) ok = p[source[k]] == target[k];
                    if (ok) return true;
                }
                return false;
            };
        };
        CHECK(setStabilizer(g, s, exact(s)).order() == setStabilizer(g, s).order());
        auto pruned = setTransporter(g, s, t, exact(t));
        CHECK(pruned.has_value() == setTransporter(g, s, t).has_value());
        if (pruned) CHECK(imageOf(*pruned, s) == t);
        auto none = setTransporter(g, s, t, [](const PointSet&, const PointSet&) { return false; });
        CHECK(none.has_value() == (s == t));
    }
}

TEST_CASE("set transporter examples") {
    auto id = setTransporter(symmetric(3), {1}, {1});
    REQUIRE(id);
    CHECK(imageOf(*id, {1}) == PointSet{1});
    CHECK_FALSE(setTransporter(PermutationGroup(3, {cycle(3, {0, 1})}), {0}, {2}));
    auto t = setTransporter(symmetric(3), {0}, {1});
    REQUIRE(t);
    CHECK((*t)[0] == 1);
    CHECK_FALSE(setTransporter(symmetric(3), {0}, {0, 1}));
}

TEST_CASE("orbits on sets") {
    std::vector<PointSet> pairs{{0, 1}, {0, 2}, {1, 2}};
    auto trivial = orbitsOnSets(PermutationGroup(3), pairs);
    CHECK(trivial.size() == 3);
    auto c3 = orbitsOnSets(PermutationGroup(3, {cycle(3, {0, 1, 2})}), pairs);
    REQUIRE(c3.size() == 1);
    CHECK(c3[0].size() == 3);
    CHECK(orbitsOnSets(symmetric(3), {{0}, {1}, {2}}).size() == 1);
    auto mixed = orbitsOnSets(PermutationGroup(4, {cycle(4, {0, 1})}), {{2}, {0}, {3}, {1}});
    REQUIRE(mixed.size() == 3);
    CHECK(mixed[1] == std::vector<std::size_t>{1, 3});
}

TEST_CASE("splitting an orbit under a subgroup") {
    PermutationGroup s3 = symmetric(3);
    CHECK(splitOrbitUnderSubgroup(s3, s3, {0}).size() == 1);
    CHECK(splitOrbitUnderSubgroup(s3, PermutationGroup(3), {0}).size() == 3);
    auto parts = splitOrbitUnderSubgroup(s3, PermutationGroup(3, {cycle(3, {0, 1})}), {0});
    REQUIRE(parts.size() == 2);
    CHECK(parts[0] == PointSet{0});
    CHECK(parts[1] == PointSet{2});
    CHECK_THROWS_AS(splitOrbitUnderSubgroup(PermutationGroup(3, {cycle(3, {0, 1})}), s3, {0}), PreconditionError);

    std::mt19937 rng(21);
    for (int trial = 0; trial < 60; ++trial) {
        std::size_t n = 4 + static_cast<std::size_t>(trial % 9);
        auto gens = randomGenerators(rng, n);
        PermutationGroup g(n, gens);
        std::vector<Permutation> ugens;
        for (const auto& x : gens)
            if (trial % 2 == 0) ugens.push_back(compose(x, x));
        PermutationGroup u(n, ugens);
        PointSet s = randomSubset(rng, n);
        auto reps = splitOrbitUnderSubgroup(g, u, s);
        auto gOrbit = setOrbit(g, s);
        std::set<PointSet> covered;
        for (const auto& r : reps) {
            auto uo = setOrbit(u, r);
            for (const auto& x : uo) CHECK(covered.insert(x).second);
        }
        CHECK(std::vector<PointSet>(covered.begin(), covered.end()) == gOrbit);
    }
}
