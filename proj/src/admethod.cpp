#include "pf/admethod.hpp"

#include "matcher.hpp"
#include "pf/linalg.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <memory>
#include <set>
#include <unordered_set>

namespace pf {

AdmCounters& AdmCounters::operator+=(const AdmCounters& o) {
    bankHits += o.bankHits;
    bankMisses += o.bankMisses;
    dualDescriptionCalls += o.dualDescriptionCalls;
    balinskiStops += o.balinskiStops;
    orbitsClosedByBalinski += o.orbitsClosedByBalinski;
    adjacencyCalls += o.adjacencyCalls;
    equivalenceTests += o.equivalenceTests;
    return *this;
}

namespace {

bool linearlyRealized(const std::vector<IntegerVector>& from, const std::vector<IntegerVector>& to,
                      const Permutation& sigma, std::size_t dim) {
    std::vector<std::size_t> basis;
    RowSpace space(dim);
    for (std::size_t i = 0; i < from.size() && basis.size() < dim; ++i)
        if (space.add(toRational(std::span<const Integer>(from[i])))) basis.push_back(i);
    if (basis.size() != dim) return false;
    RationalMatrix b(dim, dim), t(dim, dim);
    for (std::size_t k = 0; k < dim; ++k)
        for (std::size_t r = 0; r < dim; ++r) {
            b(r, k) = from[basis[k]][r];
            t(r, k) = to[sigma[basis[k]]][r];
        }
    RationalMatrix a = t * inverse(b);
    for (std::size_t i = 0; i < from.size(); ++i)
        if (a.apply(toRational(std::span<const Integer>(from[i]))) != toRational(std::span<const Integer>(to[sigma[i]])))
            return false;
    return true;
}

CanonicalLabel faceLabel(const ConeV& face) {
    return canonicalKey(characteristicGraph(VectorFamily(face.ambientDim, face.rays)));
}

struct SetHash {
    std::size_t operator()(const IndexSet& s) const {
        std::size_t h = s.size();
        for (auto x : s) h = h * 1000003U ^ x;
        return h;
    }
};

std::vector<IndexSet> orbitRepresentatives(const PermutationGroup& k, const std::vector<Face>& facets) {
    std::unordered_set<IndexSet, SetHash> covered;
    std::vector<IndexSet> reps;
    for (const auto& f : facets) {
        if (covered.count(f.incidence)) continue;
        reps.push_back(f.incidence);
        for (auto& s : setOrbit(k, f.incidence)) covered.insert(std::move(s));
    }
    return reps;
}

std::uint64_t setInvariant(const detail::ColorGraph& g, const IndexSet& s) {
    std::vector<std::vector<std::uint32_t>> rows;
    rows.reserve(s.size());
    for (auto i : s) {
        std::vector<std::uint32_t> row;
        row.reserve(s.size());
        for (auto j : s) row.push_back(g(i, j));
        std::sort(row.begin(), row.end());
        rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end());
    std::uint64_t h = 1469598103934665603ULL;
    for (const auto& row : rows) {
        for (auto c : row) h = (h ^ c) * 1099511628211ULL;
        h = (h ^ 0xffffffffULL) * 1099511628211ULL;
    }
    // Equitable refinement with the set as an extra vertex color.
    std::vector<bool> in(g.n, false);
    for (auto i : s) in[i] = true;
    detail::Cells cells;
    for (auto& cell : detail::colorCells(g)) {
        std::vector<std::uint32_t> inside, outside;
        for (auto v : cell) (in[v] ? inside : outside).push_back(v);
        if (!inside.empty()) cells.push_back(std::move(inside));
        if (!outside.empty()) cells.push_back(std::move(outside));
    }
    h = (h ^ detail::refine(g, cells)) * 1099511628211ULL;
    for (const auto& cell : cells) h = (h ^ (cell.size() << 1 | (in[cell.front()] ? 1 : 0))) * 1099511628211ULL;
    return h;
}

// Refinement of the graph colored by membership in s, with `fixed` individualized in order.
// Graph automorphisms carrying s to t and fixed to its images keep the key.
std::uint64_t individualizedKey(const detail::ColorGraph& g, const IndexSet& s, const PointSet& fixed) {
    std::vector<char> in(g.n, 0);
    for (auto i : s) in[i] = 1;
    detail::Cells cells;
    for (auto p : fixed) {
        cells.push_back({p});
        in[p] |= 2;
    }
    for (auto& cell : detail::colorCells(g)) {
        std::vector<std::uint32_t> inside, outside;
        for (auto v : cell) {
            if (in[v] & 2) continue;
            (in[v] ? inside : outside).push_back(v);
        }
        if (!inside.empty()) cells.push_back(std::move(inside));
        if (!outside.empty()) cells.push_back(std::move(outside));
    }
    std::uint64_t h = detail::refine(g, cells);
    for (const auto& cell : cells) h = (h ^ (cell.size() << 1 | (in[cell.front()] & 1))) * 1099511628211ULL;
    return h;
}

SetSearchPrune refinementPrune(const detail::ColorGraph& g, const IndexSet& s1, const IndexSet& s2) {
    auto cache = std::make_shared<std::map<PointSet, std::uint64_t>>();
    return [&g, &s1, &s2, cache](const PointSet& source, const PointSet& target) {
        auto it = cache->find(source);
        if (it == cache->end()) it = cache->emplace(source, individualizedKey(g, s1, source)).first;
        return it->second == individualizedKey(g, s2, target);
    };
}

std::vector<FacetOrbitRecord> admImpl(const ConeV& cone, const PermutationGroup& g, const AdmPolicy& policy, Bank* bank,
                                      AdmCounters& counters, std::size_t depth) {
    const std::size_t m = cone.ambientDim;
    requireFullDimensionalPointed(cone);
    requireConeSymmetry(cone, g);
    CharacteristicGraph cg = characteristicGraph(VectorFamily(m, cone.rays));
    auto colors = detail::colorize({&cg.weights});
    const detail::ColorGraph& graph = colors[0];
    const Integer groupOrder = g.order();

    std::vector<FacetOrbitRecord> records;
    std::vector<std::uint64_t> invariants;
    std::set<IntegerVector> seen;
    auto insert = [&](Face f) {
        if (!seen.insert(f.functional).second) return;
        std::uint64_t inv = setInvariant(graph, f.incidence);
        for (std::size_t r = 0; r < records.size(); ++r) {
            if (invariants[r] != inv || records[r].incidence() != f.incidence.size()) continue;
            ++counters.equivalenceTests;
            const IndexSet& other = records[r].representative.incidence;
            if (setTransporter(g, f.incidence, other, refinementPrune(graph, f.incidence, other))) return;
        }
        FacetOrbitRecord rec;
        rec.stabilizer = setStabilizer(g, f.incidence, refinementPrune(graph, f.incidence, f.incidence));
        rec.orbitSize = groupOrder / rec.stabilizer.order();
        rec.representative = std::move(f);
        records.push_back(std::move(rec));
        invariants.push_back(inv);
    };

    insert(initialFacet(cone));
    std::size_t processed = 0;
    while (true) {
        std::size_t next = records.size();
        for (std::size_t r = 0; r < records.size(); ++r)
            if (!records[r].closed && (next == records.size() || records[r].incidence() < records[next].incidence()))
                next = r;
        if (next == records.size()) break;
        if (policy.balinski && processed > 0) {
            Integer open = 0;
            for (const auto& r : records)
                if (!r.closed) open += r.orbitSize;
            if (open < Integer(static_cast<unsigned long>(m)) - 1) {
                ++counters.balinskiStops;
                for (auto& r : records)
                    if (!r.closed) {
                        r.closed = true;
                        r.skipped = true;
                        ++counters.orbitsClosedByBalinski;
                    }
                break;
            }
        }
        records[next].closed = true;
        ++processed;
        const Face rep = records[next].representative;
        ConeV face = facetSubcone(cone, rep);
        PermutationGroup h = restrictToSet(records[next].stabilizer, rep.incidence);
        auto ridges = recursiveAdm(face, h, bank, policy, &counters, depth);
        for (const auto& ridge : ridges) {
            IndexSet global;
            for (auto k : ridge) global.push_back(rep.incidence[k]);
            ++counters.adjacencyCalls;
            insert(adjacentFacet(cone, rep, global));
        }
    }
    return records;
}

std::vector<IndexSet> computeFaceOrbits(const ConeV& face, const PermutationGroup& k, Bank* bank,
                                        const AdmPolicy& policy, AdmCounters& counters, std::size_t depth) {
    const std::size_t threshold = policy.recursionThreshold ? policy.recursionThreshold : 2 * (face.ambientDim + 1);
    if (face.rays.size() > threshold && depth < policy.maxDepth) {
        auto recs = admImpl(face, k, policy, bank, counters, depth + 1);
        std::vector<IndexSet> reps;
        for (auto& r : recs) reps.push_back(r.representative.incidence);
        return reps;
    }
    ++counters.dualDescriptionCalls;
    DualDescriptionOptions options;
    options.validate = false;
    return orbitRepresentatives(k, facetsOf(face, options));
}

Permutation conjugate(const Permutation& g, const Permutation& sigma, const Permutation& sigmaInv) {
    return compose(sigmaInv, compose(g, sigma));
}

std::vector<IndexSet> fromBank(Bank& bank, const Bank::Hit& hit, const PermutationGroup& h) {
    BankEntry& entry = bank.entry(hit.entry);
    const std::size_t n = hit.sigma.size();
    const Permutation& sigma = hit.sigma;
    const Permutation sigmaInv = inverse(sigma);
    std::vector<Permutation> gens;
    for (const auto& s : entry.storedGroup.generators()) gens.push_back(conjugate(s, sigma, sigmaInv));
    PermutationGroup stored(n, gens);
    std::vector<IndexSet> reps;
    for (const auto& r : entry.facetOrbits) reps.push_back(imageOf(sigmaInv, r));
    if (!h.isSubgroupOf(stored)) {
        for (const auto& x : h.generators()) gens.push_back(x);
        stored = PermutationGroup(n, gens);
        std::unordered_set<IndexSet, SetHash> covered;
        std::vector<IndexSet> merged;
        for (const auto& r : reps) {
            if (covered.count(r)) continue;
            merged.push_back(r);
            for (auto& x : setOrbit(stored, r)) covered.insert(std::move(x));
        }
        reps = std::move(merged);
        std::vector<Permutation> back;
        for (const auto& s : stored.generators()) back.push_back(conjugate(s, sigmaInv, sigma));
        entry.storedGroup = PermutationGroup(n, back);
        entry.facetOrbits.clear();
        for (const auto& r : reps) entry.facetOrbits.push_back(imageOf(sigma, r));
    }
    std::vector<IndexSet> out;
    for (const auto& r : reps)
        for (auto& s : splitOrbitUnderSubgroup(stored, h, r)) out.push_back(std::move(s));
    return out;
}

} // namespace

std::optional<Bank::Hit> Bank::lookup(const ConeV& face) const { return lookup(face, faceLabel(face)); }

std::optional<Bank::Hit> Bank::lookup(const ConeV& face, const CanonicalLabel& label) const {
    auto it = byKey_.find(label.key);
    if (it == byKey_.end()) return std::nullopt;
    const BankEntry& e = entries_[it->second];
    Permutation sigma(label.order.size());
    for (std::size_t k = 0; k < label.order.size(); ++k) sigma[label.order[k]] = e.label.order[k];
    if (!linearlyRealized(face.rays, e.rays, sigma, face.ambientDim)) return std::nullopt;
    return Hit{it->second, std::move(sigma)};
}

std::size_t Bank::store(BankEntry entry) {
    auto [it, inserted] = byKey_.emplace(entry.label.key, entries_.size());
    if (!inserted) return it->second;
    entries_.push_back(std::move(entry));
    return entries_.size() - 1;
}

void requireConeSymmetry(const ConeV& cone, const PermutationGroup& g) {
    if (g.degree() != cone.rays.size()) throw PreconditionError("group degree differs from the number of rays");
    for (const auto& s : g.generators())
        if (!linearlyRealized(cone.rays, cone.rays, s, cone.ambientDim))
            throw PreconditionError("group generator is not a linear symmetry of the cone");
}

PermutationGroup restrictToSet(const PermutationGroup& stabilizer, const IndexSet& incidence) {
    std::vector<std::int64_t> pos(stabilizer.degree(), -1);
    for (std::size_t k = 0; k < incidence.size(); ++k) pos[incidence[k]] = static_cast<std::int64_t>(k);
    std::vector<Permutation> gens;
    for (const auto& g : stabilizer.generators()) {
        Permutation local(incidence.size());
        for (std::size_t k = 0; k < incidence.size(); ++k) {
            auto p = pos[g[incidence[k]]];
            if (p < 0) throw PreconditionError("restrictToSet: group does not stabilize the set");
            local[k] = static_cast<std::uint32_t>(p);
        }
        if (!isIdentity(local)) gens.push_back(std::move(local));
    }
    return PermutationGroup(incidence.size(), std::move(gens));
}

std::vector<IndexSet> recursiveAdm(const ConeV& face, const PermutationGroup& h, Bank* bank, const AdmPolicy& policy,
                                   AdmCounters* countersIn, std::size_t depth) {
    AdmCounters local;
    AdmCounters& counters = countersIn ? *countersIn : local;
    PermutationGroup k = h;
    if (policy.fullAutOnFaces) {
        auto aut = restrictedAutomorphismGroup(VectorFamily(face.ambientDim, face.rays));
        std::vector<Permutation> gens = h.generators();
        for (const auto& x : aut.group.generators()) gens.push_back(x);
        k = PermutationGroup(face.rays.size(), std::move(gens));
    }
    std::optional<CanonicalLabel> label;
    if (bank && policy.useBank) {
        label = faceLabel(face);
        if (auto hit = bank->lookup(face, *label)) {
            ++counters.bankHits;
            return fromBank(*bank, *hit, h);
        }
        ++counters.bankMisses;
    }
    auto reps = computeFaceOrbits(face, k, bank, policy, counters, depth);
    if (label) bank->store(BankEntry{*label, face.rays, k, reps});
    if (policy.fullAutOnFaces) {
        std::vector<IndexSet> out;
        for (const auto& r : reps)
            for (auto& s : splitOrbitUnderSubgroup(k, h, r)) out.push_back(std::move(s));
        return out;
    }
    return reps;
}

std::vector<FacetOrbitRecord> adm(const ConeV& cone, const PermutationGroup& g, const AdmPolicy& policy, Bank* bank,
                                  AdmCounters* counters) {
    AdmCounters local;
    return admImpl(cone, g, policy, bank, counters ? *counters : local, 0);
}

Face facetFromIncidence(const ConeV& cone, const IndexSet& incidence) {
    const std::size_t m = cone.ambientDim;
    RationalMatrix a(incidence.size(), m);
    for (std::size_t k = 0; k < incidence.size(); ++k)
        for (std::size_t j = 0; j < m; ++j) a(k, j) = cone.rays[incidence[k]][j];
    auto kernel = kernelBasis(a);
    if (kernel.size() != 1) throw PreconditionError("incidence set does not span a hyperplane");
    IntegerVector f = kernel.front();
    for (const auto& r : cone.rays)
        if (sgn(dot(f, r)) < 0) {
            for (auto& x : f) x = -x;
            break;
        }
    Face face = faceOf(cone, f);
    if (face.incidence != incidence) throw PreconditionError("incidence set is not the zero set of a facet");
    return face;
}

std::vector<Face> expandOrbits(const ConeV& cone, const PermutationGroup& g, const std::vector<FacetOrbitRecord>& records) {
    std::vector<Face> out;
    for (const auto& r : records)
        for (const auto& s : setOrbit(g, r.representative.incidence)) out.push_back(facetFromIncidence(cone, s));
    std::sort(out.begin(), out.end(), [](const Face& a, const Face& b) { return a.functional < b.functional; });
    return out;
}

} // namespace pf
