#include "pf/voronoi.hpp"

#include "pf/linalg.hpp"
#include "pf/symcoords.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

namespace pf {

namespace {

using json = nlohmann::ordered_json;

RationalMatrix functionalMatrix(std::size_t d, const IntegerVector& functional) {
    return SymCoordinates(d).unflattenFunctional(std::span<const Integer>(functional));
}

QuadraticForm along(const QuadraticForm& a, const RationalMatrix& u, const Rational& t) {
    return QuadraticForm(a.gram() + u.scaled(t));
}

bool hasVectorBelow(const QuadraticForm& b, const Rational& level) {
    bool found = false;
    ShortVectorEnumerator(b).enumerate(level, [&](const LatticeVector&, const Rational& norm, Rational& bound) {
        if (norm < level) {
            found = true;
            bound = -1;
        }
    });
    return found;
}

// All vectors of B at the level, or nullopt if some vector lies below it.
std::optional<std::vector<LatticeVector>> vectorsAtLevel(const QuadraticForm& b, const Rational& level) {
    std::vector<LatticeVector> at;
    bool below = false;
    ShortVectorEnumerator(b).enumerate(level, [&](const LatticeVector& v, const Rational& norm, Rational& bound) {
        if (norm < level) {
            below = true;
            bound = -1;
        } else {
            at.push_back(v);
        }
    });
    if (below) return std::nullopt;
    return at;
}

Rational integerDeterminant(const std::vector<LatticeVector>& cols, const std::vector<std::size_t>& rows) {
    const std::size_t k = cols.size();
    RationalMatrix m(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) m(i, j) = cols[j][rows[i]];
    return determinant(m);
}

// True when the vectors extend to a basis of ℤ^d: the gcd of their maximal minors is 1.
bool extendsToBasis(const std::vector<LatticeVector>& vs, std::size_t d) {
    const std::size_t k = vs.size();
    std::vector<std::size_t> rows(k);
    for (std::size_t i = 0; i < k; ++i) rows[i] = i;
    Integer g = 0;
    while (true) {
        Rational det = integerDeterminant(vs, rows);
        Integer x = det.get_num();
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
        if (g == 1) return true;
        std::size_t i = k;
        while (i > 0 && rows[i - 1] == d - k + i - 1) --i;
        if (i == 0) break;
        ++rows[i - 1];
        for (std::size_t j = i; j < k; ++j) rows[j] = rows[j - 1] + 1;
    }
    return false;
}

// Lexicographically first d positions whose vectors form a basis of ℤ^d.
std::optional<std::vector<std::size_t>> firstBasis(const std::vector<LatticeVector>& vs, std::size_t d,
                                                   std::size_t nodeLimit = 200000) {
    std::vector<std::size_t> chosen;
    std::vector<LatticeVector> current;
    std::size_t nodes = 0;
    auto search = [&](auto&& self, std::size_t from) -> bool {
        if (current.size() == d) return true;
        for (std::size_t i = from; i + (d - current.size()) <= vs.size(); ++i) {
            if (++nodes > nodeLimit) return false;
            current.push_back(vs[i]);
            chosen.push_back(i);
            if (extendsToBasis(current, d) && self(self, i + 1)) return true;
            current.pop_back();
            chosen.pop_back();
        }
        return false;
    };
    if (search(search, 0)) return chosen;
    return std::nullopt;
}

std::vector<LatticeVector> basisRows(const std::vector<LatticeVector>& columns) {
    const std::size_t d = columns.size();
    std::vector<LatticeVector> p(d, LatticeVector(d));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) p[i][j] = columns[j][i];
    return p;
}

// Repeated b_i -= round(a_ij / a_jj) b_j until no entry moves.
QuadraticForm pairReduce(const QuadraticForm& a) {
    const std::size_t d = a.dim();
    RationalMatrix g = a.gram();
    bool moved = true;
    while (moved) {
        moved = false;
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) {
                if (i == j) continue;
                Rational r = g(i, j) / g(j, j);
                Integer q;
                Rational shifted = r + Rational(1, 2);
                mpz_fdiv_q(q.get_mpz_t(), shifted.get_num_mpz_t(), shifted.get_den_mpz_t());
                if (q == 0) continue;
                Rational norm = g(i, i) - 2 * Rational(q) * g(i, j) + Rational(q * q) * g(j, j);
                if (norm >= g(i, i)) continue;
                // Row and column i become b_i - q b_j.
                for (std::size_t k = 0; k < d; ++k)
                    if (k != i) g(i, k) -= Rational(q) * g(j, k);
                g(i, i) = norm;
                for (std::size_t k = 0; k < d; ++k)
                    if (k != i) g(k, i) = g(i, k);
                moved = true;
            }
    }
    return QuadraticForm(g);
}

json integerJson(const Integer& x) {
    if (x.fits_slong_p()) return json(x.get_si());
    return json(x.get_str());
}

Integer integerFromJson(const json& j) {
    if (j.is_number_integer()) return Integer(j.get<long>());
    if (j.is_string()) return Integer(j.get<std::string>());
    throw StateError("expected an integer, got " + j.dump());
}

json gramJson(const std::vector<IntegerVector>& g) {
    json rows = json::array();
    for (const auto& r : g) {
        json row = json::array();
        for (const auto& x : r) row.push_back(integerJson(x));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string integerText(const Integer& x) { return x.get_str(); }

bool sameVectorSet(std::vector<LatticeVector> a, std::vector<LatticeVector> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
}

} // namespace

ConeV perfectDomain(const QuadraticForm& a, const MinimalVectorSet& min) {
    if (!isPerfect(a, min))
        throw PreconditionError("perfectDomain: form is not perfect (rank " + std::to_string(perfectionRank(a, min)) +
                                " of " + std::to_string(SymCoordinates(a.dim()).size()) + ")");
    SymCoordinates sc(a.dim());
    std::vector<IntegerVector> rays;
    for (const auto& v : min.vectors) rays.push_back(sc.rankOneRay(v));
    return ConeV(sc.size(), std::move(rays));
}

ConeV perfectDomain(const QuadraticForm& a) {
    requirePositiveDefinite(a, "perfectDomain");
    return perfectDomain(a, arithmeticalMinimum(a));
}

Integer FacetOrbitData::facetCount() const {
    Integer n = 0;
    for (const auto& o : orbits) n += o.orbitSize;
    return n;
}

FacetOrbitData facetOrbits(const QuadraticForm& a, const VoronoiPolicy& policy) {
    requirePositiveDefinite(a, "facetOrbits");
    FacetOrbitData out;
    out.minimal = arithmeticalMinimum(a);
    out.domain = perfectDomain(a, out.minimal);
    out.aut = autGroup(a, out.minimal);
    const PermutationGroup& g = out.aut.minAction;
    const std::size_t m = out.domain.ambientDim;
    const std::size_t threshold = policy.plainThreshold == 0 ? 2 * m : policy.plainThreshold;

    if (out.domain.rays.size() > threshold) {
        out.usedAdm = true;
        Bank bank;
        out.orbits = adm(out.domain, g, policy.adm, policy.adm.useBank ? &bank : nullptr, &out.counters);
        return out;
    }

    std::vector<Face> facets = facetsOf(out.domain);
    ++out.counters.dualDescriptionCalls;
    std::map<IndexSet, std::size_t> index;
    for (std::size_t i = 0; i < facets.size(); ++i) index.emplace(facets[i].incidence, i);
    std::vector<bool> seen(facets.size(), false);
    const Integer order = g.order();
    for (std::size_t i = 0; i < facets.size(); ++i) {
        if (seen[i]) continue;
        for (const auto& s : setOrbit(g, facets[i].incidence)) {
            auto it = index.find(s);
            if (it == index.end()) throw InternalError("facetOrbits: group image of a facet is not a facet");
            seen[it->second] = true;
        }
        FacetOrbitRecord rec;
        rec.representative = facets[i];
        rec.stabilizer = setStabilizer(g, facets[i].incidence);
        rec.orbitSize = order / rec.stabilizer.order();
        rec.closed = true;
        out.orbits.push_back(std::move(rec));
    }
    return out;
}

std::string checkNeighbour(const QuadraticForm& a, const MinimalVectorSet& min, const Face& facet,
                           const ConeV& domain, const QuadraticForm& neighbour) {
    if (!isPositiveDefinite(neighbour.gram())) return "neighbour is not positive definite";
    MinimalVectorSet nm = arithmeticalMinimum(neighbour);
    if (nm.minimum != min.minimum) return "neighbour minimum differs";
    if (!isPerfect(neighbour, nm)) return "neighbour is not perfect";
    const RationalMatrix u = functionalMatrix(a.dim(), facet.functional);
    std::vector<LatticeVector> onFacet;
    for (auto i : facet.incidence) {
        const LatticeVector& v = min.vectors[i];
        if (neighbour(v) != nm.minimum) return "a vector of Min_F is not minimal for the neighbour";
        onFacet.push_back(v);
    }
    std::vector<LatticeVector> zero;
    bool below = false;
    for (const auto& w : nm.vectors) {
        Rational f = quadraticValue(u, w);
        if (f > 0) return "neighbour minimal vector on the inner side of the facet";
        if (f == 0) zero.push_back(w);
        else below = true;
    }
    if (!below) return "neighbour has no minimal vector beyond the facet";
    if (!sameVectorSet(zero, onFacet)) return "neighbour domain meets the facet hyperplane outside the facet";
    (void)domain;
    return {};
}

QuadraticForm flip(const QuadraticForm& a, const MinimalVectorSet& min, const ConeV& domain, const Face& facet) {
    if (!isFacet(domain, facet)) throw PreconditionError("flip: face is not a facet of the perfect domain");
    const RationalMatrix u = functionalMatrix(a.dim(), facet.functional);
    const Rational& lambda = min.minimum;

    Rational lo = 0, hi = 1;
    while (true) {
        QuadraticForm b = along(a, u, hi);
        if (!isPositiveDefinite(b.gram())) {
            hi = (lo + hi) / 2;
        } else if (!hasVectorBelow(b, lambda)) {
            lo = hi;
            hi *= 2;
        } else {
            break;
        }
    }

    auto newMinimaAt = [&](const Rational& t) {
        auto at = vectorsAtLevel(along(a, u, t), lambda);
        if (!at) throw InternalError("flip: lower bound left the region of equal minimum");
        for (const auto& v : *at)
            if (a(v) != lambda) return true;
        return false;
    };

    while (!newMinimaAt(lo)) {
        Rational mid = (lo + hi) / 2;
        QuadraticForm b = along(a, u, mid);
        MinimalVectorSet bm = arithmeticalMinimum(b);
        if (bm.minimum >= lambda) {
            lo = mid;
        } else {
            hi = mid;
            for (const auto& v : bm.vectors) {
                Rational f = quadraticValue(u, v);
                if (f < 0) hi = std::min(hi, Rational((lambda - a(v)) / f));
            }
        }
        if (!hasVectorBelow(along(a, u, hi), lambda)) lo = hi;
    }

    QuadraticForm result = along(a, u, lo);
    std::string problem = checkNeighbour(a, min, facet, domain, result);
    if (!problem.empty()) throw InternalError("flip: " + problem);
    return result;
}

QuadraticForm flip(const QuadraticForm& a, const Face& facet) {
    requirePositiveDefinite(a, "flip");
    MinimalVectorSet min = arithmeticalMinimum(a);
    return flip(a, min, perfectDomain(a, min), facet);
}

LegacyFlipResult legacyFlip(const QuadraticForm& a, const Face& facet) {
    requirePositiveDefinite(a, "legacyFlip");
    LegacyFlipResult out;
    MinimalVectorSet min = arithmeticalMinimum(a);
    ConeV domain = perfectDomain(a, min);
    if (!isFacet(domain, facet)) throw PreconditionError("legacyFlip: face is not a facet of the perfect domain");
    RationalMatrix u = functionalMatrix(a.dim(), facet.functional);
    std::size_t off = 0;
    while (std::binary_search(facet.incidence.begin(), facet.incidence.end(), static_cast<std::uint32_t>(off))) ++off;
    u = u.scaled(Rational(1) / quadraticValue(u, min.vectors[off]));
    const Rational& lambda = min.minimum;

    Rational step = 1;
    for (int iter = 0;; ++iter) {
        out.lastStep = step;
        QuadraticForm b = along(a, u, step);
        if (!isPositiveDefinite(b.gram())) {
            out.failure = "A + λU is not positive definite at λ = " + toString(step) +
                          ", so Min(A + λU) is undefined";
            return out;
        }
        MinimalVectorSet bm = arithmeticalMinimum(b);
        bool inside = std::all_of(bm.vectors.begin(), bm.vectors.end(), [&](const LatticeVector& v) { return a(v) == lambda; });
        if (!inside) break;
        if (iter > 64) {
            out.failure = "doubling did not leave Min(A)";
            return out;
        }
        step *= 2;
    }

    for (int iter = 0;; ++iter) {
        if (iter > 1000) {
            out.failure = "shrinking loop did not settle";
            return out;
        }
        QuadraticForm b = along(a, u, step);
        DefinitenessResult def = definiteness(b.gram());
        LatticeVector v0;
        if (def.kind != Definiteness::PositiveDefinite) {
            v0 = toLattice(def.witness);
        } else {
            MinimalVectorSet bm = arithmeticalMinimum(b);
            if (bm.minimum >= lambda) break;
            v0 = bm.vectors.front();
        }
        Rational f = quadraticValue(u, v0);
        if (f >= 0) {
            out.failure = "violating vector does not decrease along U";
            return out;
        }
        step = (lambda - a(v0)) / f;
        out.lastStep = step;
    }
    QuadraticForm result = along(a, u, step);
    out.form = result;
    std::string problem = checkNeighbour(a, min, facet, domain, result);
    if (!problem.empty()) out.failure = problem;
    return out;
}

Fingerprint fingerprint(const QuadraticForm& a, const MinimalVectorSet& min) {
    Fingerprint fp;
    fp.minCount = 2 * min.vectors.size();
    fp.hermitePower = hermitePower(a, min.minimum);
    CharacteristicGraph g = characteristicGraph(VectorFamily::fromLattice(a.dim(), min.vectors, true));
    std::map<Rational, std::size_t> diag, off;
    for (std::size_t i = 0; i < g.size(); ++i) {
        ++diag[g.weights(i, i)];
        for (std::size_t j = i + 1; j < g.size(); ++j) ++off[abs(g.weights(i, j))];
    }
    std::ostringstream s;
    s << "d";
    for (const auto& [w, c] : diag) s << ' ' << toString(w) << '*' << c;
    s << " o";
    for (const auto& [w, c] : off) s << ' ' << toString(w) << '*' << c;
    fp.weights = s.str();
    return fp;
}

QuadraticForm reduceByMinimalVectors(const QuadraticForm& a, const MinimalVectorSet& min) {
    if (auto basis = firstBasis(min.vectors, a.dim())) {
        std::vector<LatticeVector> cols;
        for (auto i : *basis) cols.push_back(min.vectors[i]);
        return a.transformed(basisRows(cols));
    }
    return pairReduce(a);
}

std::vector<IntegerVector> canonicalGram(const QuadraticForm& a, const MinimalVectorSet& min) {
    CanonicalLabel label = canonicalKey(VectorFamily::fromLattice(a.dim(), min.vectors, true));
    std::vector<LatticeVector> ordered;
    for (auto k : label.order) {
        LatticeVector v = min.vectors[k / 2];
        if (k % 2 == 1)
            for (auto& c : v) c = -c;
        ordered.push_back(std::move(v));
    }
    auto basis = firstBasis(ordered, a.dim());
    if (!basis) return {};
    std::vector<LatticeVector> cols;
    for (auto i : *basis) cols.push_back(ordered[i]);
    return primitiveIntegerGram(a.transformed(basisRows(cols)));
}

ClassificationState initialState(std::size_t dim) {
    if (dim < 2) throw PreconditionError("classify: dimension must be at least 2");
    ClassificationState st;
    st.dim = dim;
    PerfectFormRecord seed;
    seed.id = 0;
    QuadraticForm a = catalogForm("A" + std::to_string(dim));
    seed.minimal = arithmeticalMinimum(a);
    seed.form = normalizeScale(a, seed.minimal.minimum);
    seed.minimal.minimum = 2;
    seed.fingerprint = fingerprint(seed.form, seed.minimal);
    st.records.push_back(std::move(seed));
    st.open.push_back(0);
    return st;
}

namespace {

struct Candidate {
    QuadraticForm form;
    MinimalVectorSet minimal;
    Fingerprint fingerprint;
};

void processRecord(ClassificationState& st, std::size_t id, const VoronoiPolicy& policy) {
    const QuadraticForm form = st.records[id].form;
    FacetOrbitData fo = facetOrbits(form, policy);
    const std::size_t n = fo.orbits.size();

    std::vector<std::optional<Candidate>> found(n);
    std::vector<std::exception_ptr> errors(n);
    auto work = [&](std::size_t k) {
        try {
            QuadraticForm nb = flip(form, fo.minimal, fo.domain, fo.orbits[k].representative);
            MinimalVectorSet nm = arithmeticalMinimum(nb);
            nb = reduceByMinimalVectors(normalizeScale(nb, nm.minimum), nm);
            nm = arithmeticalMinimum(nb);
            Fingerprint fp = fingerprint(nb, nm);
            found[k] = Candidate{std::move(nb), std::move(nm), std::move(fp)};
        } catch (...) {
            errors[k] = std::current_exception();
        }
    };
    const int workers = static_cast<int>(std::max<std::size_t>(1, policy.workers));
    if (workers > 1) {
#pragma omp parallel for num_threads(workers) schedule(dynamic, 1)
        for (std::size_t k = 0; k < n; ++k) work(k);
    } else {
        for (std::size_t k = 0; k < n; ++k) work(k);
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    st.counters.adm += fo.counters;
    if (!fo.usedAdm) ++st.counters.plainDualDescriptions;
    st.counters.flips += n;

    std::vector<std::size_t> targets(n);
    for (std::size_t k = 0; k < n; ++k) {
        Candidate& c = *found[k];
        std::optional<std::size_t> match;
        bool collided = false;
        for (const auto& r : st.records) {
            if (!(r.fingerprint == c.fingerprint)) continue;
            ++st.counters.equivalenceTests;
            if (arithmeticEquivalence(r.form, c.form)) {
                match = r.id;
                break;
            }
            collided = true;
        }
        if (collided && !match) ++st.counters.fingerprintCollisions;
        if (!match) {
            PerfectFormRecord rec;
            rec.id = st.records.size();
            rec.form = std::move(c.form);
            rec.minimal = std::move(c.minimal);
            rec.fingerprint = std::move(c.fingerprint);
            match = rec.id;
            st.records.push_back(std::move(rec));
            st.open.push_back(*match);
        }
        targets[k] = *match;
        st.edges.push_back({id, *match, k});
    }

    PerfectFormRecord& rec = st.records[id];
    rec.autOrder = fo.aut.order;
    rec.orbitSizes.clear();
    rec.orbitIncidence.clear();
    for (const auto& o : fo.orbits) {
        rec.orbitSizes.push_back(o.orbitSize);
        rec.orbitIncidence.push_back(o.incidence());
    }
    rec.neighbours = std::move(targets);
    rec.closed = true;
}

} // namespace

bool advance(ClassificationState& state, const ClassifyLimits& limits, const VoronoiPolicy& policy,
             const std::function<void(const ClassificationState&)>& checkpoint) {
    const auto start = std::chrono::steady_clock::now();
    std::size_t done = 0;
    while (!state.open.empty()) {
        if (limits.maxForms != 0 && done >= limits.maxForms) return false;
        if (limits.wallClock > 0) {
            std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
            if (elapsed.count() >= limits.wallClock) return false;
        }
        const std::size_t id = state.open.front();
        processRecord(state, id, policy);
        state.open.pop_front();
        state.closed.push_back(id);
        ++done;
        if (checkpoint) checkpoint(state);
    }
    return true;
}

ClassificationState classify(std::size_t dim, const ClassifyLimits& limits, const VoronoiPolicy& policy) {
    ClassificationState st = initialState(dim);
    advance(st, limits, policy);
    return st;
}

std::string saveStateText(const ClassificationState& st) {
    json j;
    j["version"] = ClassificationState::kVersion;
    j["kind"] = "perfect-form-classification";
    j["dimension"] = st.dim;
    json records = json::array();
    for (const auto& r : st.records) {
        json jr;
        jr["id"] = r.id;
        jr["gram"] = gramJson(primitiveIntegerGram(r.form));
        jr["fingerprint"] = {{"min", r.fingerprint.minCount},
                             {"hermitePower", toString(r.fingerprint.hermitePower)},
                             {"weights", r.fingerprint.weights}};
        jr["closed"] = r.closed;
        if (r.closed) {
            jr["autOrder"] = integerText(r.autOrder);
            json orbits = json::array();
            for (std::size_t k = 0; k < r.neighbours.size(); ++k)
                orbits.push_back({{"size", integerText(r.orbitSizes[k])},
                                  {"incidence", r.orbitIncidence[k]},
                                  {"neighbour", r.neighbours[k]}});
            jr["facetOrbits"] = std::move(orbits);
        }
        records.push_back(std::move(jr));
    }
    j["records"] = std::move(records);
    j["open"] = std::vector<std::size_t>(st.open.begin(), st.open.end());
    j["closed"] = st.closed;
    json edges = json::array();
    for (const auto& e : st.edges) edges.push_back({e.from, e.to, e.orbit});
    j["edges"] = std::move(edges);
    const auto& c = st.counters;
    j["instrumentation"] = {{"flips", c.flips},
                            {"equivalenceTests", c.equivalenceTests},
                            {"fingerprintCollisions", c.fingerprintCollisions},
                            {"plainDualDescriptions", c.plainDualDescriptions},
                            {"bankHits", c.adm.bankHits},
                            {"bankMisses", c.adm.bankMisses},
                            {"dualDescriptionCalls", c.adm.dualDescriptionCalls},
                            {"balinskiStops", c.adm.balinskiStops},
                            {"orbitsClosedByBalinski", c.adm.orbitsClosedByBalinski},
                            {"adjacencyCalls", c.adm.adjacencyCalls},
                            {"setEquivalenceTests", c.adm.equivalenceTests}};
    return j.dump(1) + "\n";
}

ClassificationState loadStateText(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw StateError(std::string("state file is not valid JSON: ") + e.what());
    }
    try {
        if (!j.contains("version") || j["version"].get<int>() != ClassificationState::kVersion)
            throw StateError("state file version mismatch (expected " + std::to_string(ClassificationState::kVersion) + ")");
        ClassificationState st;
        st.dim = j.at("dimension").get<std::size_t>();
        if (st.dim < 2) throw StateError("state file dimension must be at least 2");
        for (const auto& jr : j.at("records")) {
            PerfectFormRecord r;
            r.id = jr.at("id").get<std::size_t>();
            if (r.id != st.records.size()) throw StateError("record ids are not consecutive");
            const auto& rows = jr.at("gram");
            if (rows.size() != st.dim) throw StateError("record " + std::to_string(r.id) + ": Gram matrix has wrong size");
            RationalMatrix g(st.dim, st.dim);
            for (std::size_t i = 0; i < st.dim; ++i) {
                if (rows[i].size() != st.dim) throw StateError("record " + std::to_string(r.id) + ": Gram row has wrong size");
                for (std::size_t k = 0; k < st.dim; ++k) g(i, k) = Rational(integerFromJson(rows[i][k]));
            }
            if (!g.isSymmetric() || !isPositiveDefinite(g))
                throw StateError("record " + std::to_string(r.id) + ": Gram matrix is not symmetric positive definite");
            QuadraticForm raw(g);
            MinimalVectorSet m = arithmeticalMinimum(raw);
            if (!isPerfect(raw, m)) throw StateError("record " + std::to_string(r.id) + ": form is not perfect");
            r.form = normalizeScale(raw, m.minimum);
            m.minimum = 2;
            r.minimal = std::move(m);
            r.fingerprint = fingerprint(r.form, r.minimal);
            const auto& jf = jr.at("fingerprint");
            if (jf.at("min").get<std::size_t>() != r.fingerprint.minCount ||
                jf.at("hermitePower").get<std::string>() != toString(r.fingerprint.hermitePower) ||
                jf.at("weights").get<std::string>() != r.fingerprint.weights)
                throw StateError("record " + std::to_string(r.id) + ": stored fingerprint does not match the form");
            r.closed = jr.at("closed").get<bool>();
            if (r.closed) {
                r.autOrder = Integer(jr.at("autOrder").get<std::string>());
                for (const auto& o : jr.at("facetOrbits")) {
                    r.orbitSizes.emplace_back(o.at("size").get<std::string>());
                    r.orbitIncidence.push_back(o.at("incidence").get<std::size_t>());
                    r.neighbours.push_back(o.at("neighbour").get<std::size_t>());
                }
            }
            st.records.push_back(std::move(r));
        }
        if (st.records.empty()) throw StateError("state file has no records");
        for (auto id : j.at("open").get<std::vector<std::size_t>>()) st.open.push_back(id);
        st.closed = j.at("closed").get<std::vector<std::size_t>>();
        std::vector<int> status(st.records.size(), 0);
        for (auto id : st.open) {
            if (id >= st.records.size() || status[id]++ || st.records[id].closed)
                throw StateError("open list is inconsistent with the records");
        }
        for (auto id : st.closed) {
            if (id >= st.records.size() || status[id]++ || !st.records[id].closed)
                throw StateError("closed list is inconsistent with the records");
        }
        if (std::count(status.begin(), status.end(), 1) != static_cast<long>(st.records.size()))
            throw StateError("some record is neither open nor closed");
        for (const auto& r : st.records)
            for (auto nb : r.neighbours)
                if (nb >= st.records.size()) throw StateError("neighbour id out of range");
        for (const auto& e : j.at("edges")) {
            ContiguityEdge ce{e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>(), e.at(2).get<std::size_t>()};
            if (ce.from >= st.records.size() || ce.to >= st.records.size()) throw StateError("edge id out of range");
            st.edges.push_back(ce);
        }
        const auto& c = j.at("instrumentation");
        st.counters.flips = c.value("flips", 0ull);
        st.counters.equivalenceTests = c.value("equivalenceTests", 0ull);
        st.counters.fingerprintCollisions = c.value("fingerprintCollisions", 0ull);
        st.counters.plainDualDescriptions = c.value("plainDualDescriptions", 0ull);
        st.counters.adm.bankHits = c.value("bankHits", 0ull);
        st.counters.adm.bankMisses = c.value("bankMisses", 0ull);
        st.counters.adm.dualDescriptionCalls = c.value("dualDescriptionCalls", 0ull);
        st.counters.adm.balinskiStops = c.value("balinskiStops", 0ull);
        st.counters.adm.orbitsClosedByBalinski = c.value("orbitsClosedByBalinski", 0ull);
        st.counters.adm.adjacencyCalls = c.value("adjacencyCalls", 0ull);
        st.counters.adm.equivalenceTests = c.value("setEquivalenceTests", 0ull);
        return st;
    } catch (const json::exception& e) {
        throw StateError(std::string("malformed state file: ") + e.what());
    } catch (const PreconditionError& e) {
        throw StateError(std::string("invalid state file: ") + e.what());
    }
}

void saveState(const ClassificationState& state, const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw StateError("cannot write state file " + tmp);
        out << saveStateText(state);
        out.flush();
        if (!out) throw StateError("failed writing state file " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw StateError("cannot move state file into place at " + path + ": " + ec.message());
}

ClassificationState loadState(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StateError("cannot read state file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return loadStateText(buf.str());
}

std::string catalogName(const QuadraticForm& a) {
    const std::size_t d = a.dim();
    std::vector<std::string> names = {"A" + std::to_string(d)};
    if (d >= 4) names.push_back("D" + std::to_string(d));
    if (d >= 6 && d <= 8) names.push_back("E" + std::to_string(d));
    MinimalVectorSet m = arithmeticalMinimum(a);
    Fingerprint fp = fingerprint(a, m);
    for (const auto& name : names) {
        QuadraticForm c = catalogForm(name);
        if (!(fingerprint(c, arithmeticalMinimum(c)).hermitePower == fp.hermitePower)) continue;
        QuadraticForm cn = normalizeScale(c);
        QuadraticForm an = normalizeScale(a, m.minimum);
        if (arithmeticEquivalence(cn, an)) return name;
    }
    return {};
}

ClassificationReport buildReport(const ClassificationState& st) {
    ClassificationReport rep;
    rep.dim = st.dim;
    rep.complete = st.complete();
    for (const auto& r : st.records) {
        ClassReport c;
        c.id = r.id;
        c.name = catalogName(r.form);
        if (c.name.empty()) c.name = "P" + std::to_string(st.dim) + "." + std::to_string(r.id);
        c.canonical = canonicalGram(r.form, r.minimal);
        c.minCount = r.fingerprint.minCount;
        c.determinant = determinant(r.form.gram());
        c.hermitePower = r.fingerprint.hermitePower;
        c.hermite = std::pow(c.hermitePower.get_d(), 1.0 / static_cast<double>(st.dim));
        EutaxyResult eu = eutaxy(r.form, r.minimal);
        c.eutactic = eu.eutactic;
        c.extreme = eu.eutactic;
        c.autOrder = r.autOrder;
        c.facetOrbits = r.neighbours.size();
        c.facets = 0;
        for (const auto& s : r.orbitSizes) c.facets += s;
        std::set<std::size_t> nb(r.neighbours.begin(), r.neighbours.end());
        c.neighbourClasses.assign(nb.begin(), nb.end());
        if (c.extreme) ++rep.extremeCount;
        rep.classes.push_back(std::move(c));
    }
    rep.perfectCount = rep.classes.size();
    for (std::size_t i = 1; i < rep.classes.size(); ++i)
        if (rep.classes[i].hermitePower > rep.classes[rep.maximizer].hermitePower) rep.maximizer = i;
    return rep;
}

std::string reportJson(const ClassificationReport& rep) {
    json j;
    j["version"] = 1;
    j["dimension"] = rep.dim;
    j["complete"] = rep.complete;
    j["perfectCount"] = rep.perfectCount;
    j["extremeCount"] = rep.extremeCount;
    if (!rep.classes.empty())
        j["maximizer"] = {{"id", rep.classes[rep.maximizer].id}, {"name", rep.classes[rep.maximizer].name}};
    json classes = json::array();
    for (const auto& c : rep.classes) {
        std::ostringstream h;
        h << std::setprecision(12) << c.hermite;
        classes.push_back({{"id", c.id},
                           {"name", c.name},
                           {"canonicalGram", gramJson(c.canonical)},
                           {"kissingNumber", c.minCount},
                           {"determinant", toString(c.determinant)},
                           {"hermitePower", toString(c.hermitePower)},
                           {"hermite", h.str()},
                           {"eutactic", c.eutactic},
                           {"extreme", c.extreme},
                           {"autOrder", integerText(c.autOrder)},
                           {"facetOrbits", c.facetOrbits},
                           {"facets", integerText(c.facets)},
                           {"neighbours", c.neighbourClasses}});
    }
    j["classes"] = std::move(classes);
    return j.dump(1) + "\n";
}

std::string reportTable(const ClassificationReport& rep) {
    std::ostringstream s;
    s << "dimension  perfect  maximizer  extreme" << (rep.complete ? "" : "  (incomplete)") << "\n";
    s << std::left << std::setw(11) << rep.dim << std::setw(9) << rep.perfectCount << std::setw(11)
      << (rep.classes.empty() ? "-" : rep.classes[rep.maximizer].name) << rep.extremeCount << "\n\n";
    s << std::setw(5) << "id" << std::setw(10) << "name" << std::setw(8) << "|Min|" << std::setw(12) << "det"
      << std::setw(14) << "gamma" << std::setw(9) << "extreme" << std::setw(14) << "|Aut|" << std::setw(8)
      << "orbits" << std::setw(12) << "facets"
      << "neighbours\n";
    for (const auto& c : rep.classes) {
        std::ostringstream h, nb;
        h << std::setprecision(8) << c.hermite;
        for (std::size_t i = 0; i < c.neighbourClasses.size(); ++i) nb << (i ? "," : "") << c.neighbourClasses[i];
        s << std::setw(5) << c.id << std::setw(10) << c.name << std::setw(8) << c.minCount << std::setw(12)
          << toString(c.determinant) << std::setw(14) << h.str() << std::setw(9) << (c.extreme ? "yes" : "no")
          << std::setw(14) << integerText(c.autOrder) << std::setw(8) << c.facetOrbits << std::setw(12)
          << integerText(c.facets) << nb.str() << "\n";
    }
    return s.str();
}

std::vector<ContiguityRow> contiguityReport(const ClassificationState& st) {
    if (!st.complete()) throw StateError("contiguity report needs a complete classification");
    std::vector<ContiguityRow> rows;
    for (const auto& r : st.records) {
        std::map<std::size_t, std::size_t> count;
        for (auto nb : r.neighbours) ++count[nb];
        rows.push_back({r.id, {count.begin(), count.end()}});
    }
    return rows;
}

} // namespace pf
