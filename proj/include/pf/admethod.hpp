#pragma once

#include "pf/family.hpp"
#include "pf/permgroup.hpp"
#include "pf/polycone.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pf {

struct AdmPolicy {
    /// Faces with more rays than this are handled by recursive ADM; 0 means 2m.
    std::size_t recursionThreshold = 0;
    std::size_t maxDepth = 3;
    bool useBank = true;
    /// Compute faces under their full restricted automorphism group instead of the stabilizer.
    bool fullAutOnFaces = false;
    bool balinski = true;
};

struct AdmCounters {
    std::uint64_t bankHits = 0;
    std::uint64_t bankMisses = 0;
    std::uint64_t dualDescriptionCalls = 0;
    std::uint64_t balinskiStops = 0;
    std::uint64_t orbitsClosedByBalinski = 0;
    std::uint64_t adjacencyCalls = 0;
    std::uint64_t equivalenceTests = 0;

    AdmCounters& operator+=(const AdmCounters& o);
};

struct FacetOrbitRecord {
    Face representative;
    PermutationGroup stabilizer;
    Integer orbitSize;
    bool closed = false;
    /// Closed by the Balinski criterion without enumerating its ridges.
    bool skipped = false;

    std::size_t incidence() const { return representative.incidence.size(); }
};

/// Facet orbits of a face stored by isomorphism class of its ray family.
struct BankEntry {
    CanonicalLabel label;
    std::vector<IntegerVector> rays;
    /// Group on the stored ray indices under which `facetOrbits` are representatives.
    PermutationGroup storedGroup;
    std::vector<IndexSet> facetOrbits;
};

class Bank {
public:
    struct Hit {
        std::size_t entry;
        /// sigma[i] is the stored index of the looked-up family's ray i.
        Permutation sigma;
    };

    std::optional<Hit> lookup(const ConeV& face) const;
    std::optional<Hit> lookup(const ConeV& face, const CanonicalLabel& label) const;
    std::size_t store(BankEntry entry);
    BankEntry& entry(std::size_t i) { return entries_[i]; }
    const BankEntry& entry(std::size_t i) const { return entries_[i]; }
    std::size_t size() const { return entries_.size(); }

private:
    std::vector<BankEntry> entries_;
    std::map<std::string, std::size_t> byKey_;
};

/// Throws unless every generator is realized by a linear map permuting the rays.
void requireConeSymmetry(const ConeV& cone, const PermutationGroup& g);

/// One record per G-orbit of facets, all closed.
std::vector<FacetOrbitRecord> adm(const ConeV& cone, const PermutationGroup& g, const AdmPolicy& policy = {},
                                  Bank* bank = nullptr, AdmCounters* counters = nullptr);

/// Facet orbit representatives (as index sets on the face's rays) of a face under `h`,
/// consulting the bank first and recursing into ADM for large faces.
std::vector<IndexSet> recursiveAdm(const ConeV& face, const PermutationGroup& h, Bank* bank, const AdmPolicy& policy,
                                   AdmCounters* counters, std::size_t depth = 0);

/// Every facet in the orbits, sorted by functional.
std::vector<Face> expandOrbits(const ConeV& cone, const PermutationGroup& g, const std::vector<FacetOrbitRecord>& records);

/// The functional of the facet with the given incidence set.
Face facetFromIncidence(const ConeV& cone, const IndexSet& incidence);

/// Stabilizer action restricted to a face: a permutation group on positions in `incidence`.
PermutationGroup restrictToSet(const PermutationGroup& stabilizer, const IndexSet& incidence);

} // namespace pf
