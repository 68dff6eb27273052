#include "doctest.h"

#include "pf/symcoords.hpp"
#include "pf/voronoi.hpp"
#include "test_helpers.hpp"

#include <algorithm>
#include <filesystem>
#include <random>
#include <set>

using namespace pf;
using pf::testing::randomUnimodular;

namespace {

QuadraticForm norm2(const std::string& name) { return normalizeScale(catalogForm(name)); }

// The facet of Dom(b) whose rays are exactly the rank-one rays of `vectors`.
Face facetThrough(const QuadraticForm& b, const std::vector<LatticeVector>& vectors) {
    MinimalVectorSet m = arithmeticalMinimum(b);
    ConeV dom = perfectDomain(b, m);
    std::set<LatticeVector> want;
    for (auto v : vectors) {
        makeFirstNonzeroPositive(v);
        want.insert(v);
    }
    for (const auto& f : facetsOf(dom)) {
        std::set<LatticeVector> got;
        for (auto i : f.incidence) got.insert(m.vectors[i]);
        if (got == want) return f;
    }
    FAIL("no facet through the given vectors");
    return {};
}

std::vector<LatticeVector> onFacet(const MinimalVectorSet& m, const Face& f) {
    std::vector<LatticeVector> out;
    for (auto i : f.incidence) out.push_back(m.vectors[i]);
    return out;
}

} // namespace

TEST_CASE("perfect domains of root lattices") {
    ConeV a2 = perfectDomain(catalogForm("A2"));
    CHECK(a2.ambientDim == 3);
    CHECK(a2.rays.size() == 3);
    CHECK(perfectDomain(catalogForm("A3")).rays.size() == 6);
    ConeV e8 = perfectDomain(catalogForm("E8"));
    CHECK(e8.ambientDim == 36);
    CHECK(e8.rays.size() == 120);
    requireFullDimensionalPointed(a2);
    CHECK_THROWS_AS(perfectDomain(catalogForm("I3")), PreconditionError);
}

TEST_CASE("facet orbits agree with plain dual description") {
    for (const char* name : {"A2", "A3", "A4", "D4", "D5"}) {
        CAPTURE(name);
        QuadraticForm a = catalogForm(name);
        for (std::size_t threshold : {std::size_t(0), std::size_t(1)}) {
            VoronoiPolicy policy;
            policy.plainThreshold = threshold;
            FacetOrbitData fo = facetOrbits(a, policy);
            CHECK(fo.usedAdm == (threshold == 1));
            std::vector<Face> all = facetsOf(fo.domain);
            CHECK(fo.facetCount() == Integer(all.size()));
            CHECK(expandOrbits(fo.domain, fo.aut.minAction, fo.orbits) == all);
        }
    }
    FacetOrbitData a2 = facetOrbits(catalogForm("A2"));
    CHECK(a2.orbits.size() == 1);
    CHECK(a2.facetCount() == 3);
}

TEST_CASE("flip of A2 and A3 returns the same class") {
    for (const char* name : {"A2", "A3"}) {
        QuadraticForm a = norm2(name);
        MinimalVectorSet m = arithmeticalMinimum(a);
        ConeV dom = perfectDomain(a, m);
        for (const auto& f : facetsOf(dom)) {
            QuadraticForm b = flip(a, m, dom, f);
            CHECK(arithmeticalMinimum(b).minimum == 2);
            CHECK(arithmeticEquivalence(a, b).has_value());
        }
    }
    // Across the facet {e1, e2} of Q_A2 the neighbour is [[2,1],[1,2]].
    QuadraticForm a2 = norm2("A2");
    Face f = facetThrough(a2, {{1, 0}, {0, 1}});
    CHECK(flip(a2, f) == QuadraticForm(RationalMatrix::symmetric({{2, 1}, {1, 2}})));
}

TEST_CASE("flip from A4 reaches D4") {
    QuadraticForm a = norm2("A4");
    FacetOrbitData fo = facetOrbits(a);
    QuadraticForm d4 = norm2("D4");
    bool sawD4 = false;
    for (const auto& o : fo.orbits) {
        QuadraticForm b = flip(a, fo.minimal, fo.domain, o.representative);
        if (arithmeticEquivalence(d4, b)) sawD4 = true;
    }
    CHECK(sawD4);
}

TEST_CASE("flip is an involution and shares the facet") {
    for (const char* name : {"A3", "A4", "D4", "D5", "A5"}) {
        CAPTURE(name);
        QuadraticForm a = norm2(name);
        FacetOrbitData fo = facetOrbits(a);
        for (const auto& o : fo.orbits) {
            const Face& f = o.representative;
            QuadraticForm b = flip(a, fo.minimal, fo.domain, f);
            CHECK(checkNeighbour(a, fo.minimal, f, fo.domain, b).empty());
            Face back = facetThrough(b, onFacet(fo.minimal, f));
            // Same hyperplane, opposite side.
            IntegerVector neg = f.functional;
            for (auto& x : neg) x = -x;
            CHECK(back.functional == neg);
            CHECK(flip(b, back) == a);
        }
    }
}

TEST_CASE("flip rejects non-facets") {
    QuadraticForm a = norm2("A3");
    MinimalVectorSet m = arithmeticalMinimum(a);
    ConeV dom = perfectDomain(a, m);
    Face f = facetsOf(dom).front();
    Face ridge = faceOf(dom, f.functional);
    ridge.incidence.pop_back();
    CHECK_THROWS_AS(flip(a, m, dom, ridge), PreconditionError);
}

TEST_CASE("older doubling flip leaves the positive definite cone") {
    // With λ(A) = 2 both walks agree on these domains.
    for (const char* name : {"A2", "A3", "A4", "D4", "A5", "D5"}) {
        QuadraticForm a = norm2(name);
        FacetOrbitData fo = facetOrbits(a);
        for (const auto& o : fo.orbits) {
            LegacyFlipResult old = legacyFlip(a, o.representative);
            CHECK(old.failure.empty());
            REQUIRE(old.form.has_value());
            CHECK(*old.form == flip(a, fo.minimal, fo.domain, o.representative));
        }
    }
    // Across {e1, e2} of c·Q_A2 the walk must stop in [4c, 6c): new minima at 4c, indefinite
    // from 6c on. For c = 11/20 no power of two lies in that window, for c = 1/10 the first
    // step is already indefinite.
    for (const Rational c : {Rational(11, 20), Rational(1, 10), Rational(1, 20)}) {
        CAPTURE(c.get_str());
        QuadraticForm a = catalogForm("A2").scaled(c);
        Face f = facetThrough(a, {{1, 0}, {0, 1}});
        LegacyFlipResult old = legacyFlip(a, f);
        CHECK_FALSE(old.form.has_value());
        CHECK(old.failure.find("not positive definite") != std::string::npos);
        CHECK(flip(a, f) == QuadraticForm(RationalMatrix::symmetric({{2, 1}, {1, 2}})).scaled(c));
    }
    QuadraticForm ok = catalogForm("A2").scaled(Rational(3, 4));
    LegacyFlipResult fine = legacyFlip(ok, facetThrough(ok, {{1, 0}, {0, 1}}));
    CHECK(fine.failure.empty());
}

TEST_CASE("fingerprints and canonical Gram matrices are equivalence invariants") {
    std::mt19937 rng(41);
    for (const char* name : {"A3", "A4", "D4", "D5", "A5", "E6"}) {
        CAPTURE(name);
        QuadraticForm a = norm2(name);
        MinimalVectorSet m = arithmeticalMinimum(a);
        Fingerprint fp = fingerprint(a, m);
        auto cg = canonicalGram(a, m);
        REQUIRE(!cg.empty());
        for (int t = 0; t < 6; ++t) {
            QuadraticForm b = a.transformed(randomUnimodular(rng, a.dim(), 10));
            MinimalVectorSet mb = arithmeticalMinimum(b);
            CHECK(fingerprint(b, mb) == fp);
            CHECK(canonicalGram(b, mb) == cg);
            QuadraticForm r = reduceByMinimalVectors(b, mb);
            for (std::size_t i = 0; i < r.dim(); ++i) CHECK(r.gram()(i, i) == 2);
            CHECK(arithmeticEquivalence(a, r).has_value());
        }
    }
    CHECK(!(fingerprint(norm2("A4"), arithmeticalMinimum(norm2("A4"))) ==
            fingerprint(norm2("D4"), arithmeticalMinimum(norm2("D4")))));
}

TEST_CASE("catalog names") {
    std::mt19937 rng(5);
    CHECK(catalogName(norm2("D4").transformed(randomUnimodular(rng, 4, 8))) == "D4");
    CHECK(catalogName(catalogForm("A5")) == "A5");
    CHECK(catalogName(catalogForm("E6")) == "E6");
    CHECK(catalogName(QuadraticForm(RationalMatrix::symmetric({{2, 1}, {1, 2}}))) == "A2");
}

TEST_CASE("classification in dimensions 2 to 5") {
    const std::size_t perfect[] = {1, 1, 2, 3};
    const char* maximizer[] = {"A2", "A3", "D4", "D5"};
    for (std::size_t d = 2; d <= 5; ++d) {
        CAPTURE(d);
        ClassificationState st = classify(d);
        REQUIRE(st.complete());
        ClassificationReport rep = buildReport(st);
        CHECK(rep.perfectCount == perfect[d - 2]);
        CHECK(rep.extremeCount == perfect[d - 2]);
        CHECK(rep.classes[rep.maximizer].name == maximizer[d - 2]);
        for (const auto& r : st.records) {
            CHECK(r.closed);
            CHECK(isPerfect(r.form));
            CHECK(arithmeticalMinimum(r.form).minimum == 2);
            Integer g = 0;
            for (const auto& row : primitiveIntegerGram(r.form))
                for (const auto& x : row) g = gcd(g, x);
            CHECK(g == 1);
            for (auto nb : r.neighbours) CHECK(st.records[nb].closed);
        }
    }
}

TEST_CASE("contiguity") {
    auto rows2 = contiguityReport(classify(2));
    REQUIRE(rows2.size() == 1);
    CHECK(rows2[0].neighbours == std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}});
    auto rows3 = contiguityReport(classify(3));
    REQUIRE(rows3.size() == 1);
    CHECK(rows3[0].neighbours.size() == 1);
    CHECK(rows3[0].neighbours[0].first == 0);
    auto rows4 = contiguityReport(classify(4));
    REQUIRE(rows4.size() == 2);
    for (const auto& r : rows4) {
        std::set<std::size_t> to;
        for (const auto& [n, c] : r.neighbours) to.insert(n);
        CHECK(to.count(1 - r.id) == 1);
    }
    ClassifyLimits stop;
    stop.maxForms = 1;
    CHECK_THROWS_AS(contiguityReport(classify(4, stop)), StateError);
}

TEST_CASE("state files round trip and resume") {
    ClassificationState full = classify(4);
    std::string text = saveStateText(full);
    CHECK(saveStateText(loadStateText(text)) == text);
    CHECK(saveStateText(classify(4)) == text);

    ClassifyLimits one;
    one.maxForms = 1;
    ClassificationState part = initialState(5);
    CHECK_FALSE(advance(part, one));
    CHECK_FALSE(part.complete());
    auto dir = std::filesystem::temp_directory_path() / "pf_test_voronoi";
    std::filesystem::create_directories(dir);
    std::string path = (dir / "state.json").string();
    saveState(part, path);
    ClassificationState resumed = loadState(path);
    CHECK(advance(resumed));
    CHECK(reportJson(buildReport(resumed)) == reportJson(buildReport(classify(5))));
    std::filesystem::remove_all(dir);
}

TEST_CASE("corrupt state files are rejected") {
    std::string text = saveStateText(classify(3));
    CHECK_THROWS_AS(loadStateText("{"), StateError);
    std::string badVersion = text;
    badVersion.replace(badVersion.find("\"version\": 1"), 12, "\"version\": 7");
    CHECK_THROWS_AS(loadStateText(badVersion), StateError);
    std::string badGram = text;
    auto at = badGram.find("\"gram\"");
    REQUIRE(at != std::string::npos);
    auto two = badGram.find('2', at);
    badGram[two] = '3';
    CHECK_THROWS_AS(loadStateText(badGram), StateError);
}

TEST_CASE("parallel flips give the same state") {
    VoronoiPolicy par;
    par.workers = 4;
    CHECK(saveStateText(classify(5, {}, par)) == saveStateText(classify(5)));
}
