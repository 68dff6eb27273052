#pragma once

#include "pf/admethod.hpp"
#include "pf/equivalence.hpp"
#include "pf/polycone.hpp"
#include "pf/qform.hpp"

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace pf {

/// Cone generated by v vᵀ for v ∈ Min(A)/±, one ray per class in the order of `min.vectors`.
ConeV perfectDomain(const QuadraticForm& a);
ConeV perfectDomain(const QuadraticForm& a, const MinimalVectorSet& min);

struct VoronoiPolicy {
    AdmPolicy adm;
    /// Domains with at most this many rays use plain double description plus orbit
    /// reduction; 0 means 2m.
    std::size_t plainThreshold = 0;
    std::size_t workers = 1;
};

struct FacetOrbitData {
    MinimalVectorSet minimal;
    ConeV domain;
    FormAutomorphisms aut;
    std::vector<FacetOrbitRecord> orbits;
    AdmCounters counters;
    bool usedAdm = false;

    Integer facetCount() const;
};

FacetOrbitData facetOrbits(const QuadraticForm& a, const VoronoiPolicy& policy = {});

/// The perfect form across a facet of Dom(A): A + lF with F the facet functional as a
/// matrix (nonnegative on Dom(A)), l the largest value keeping λ(A + lF) = λ(A).
/// Throws PreconditionError if `facet` is not a facet of the domain, and InternalError if
/// the result fails the neighbour checks.
QuadraticForm flip(const QuadraticForm& a, const Face& facet);
QuadraticForm flip(const QuadraticForm& a, const MinimalVectorSet& min, const ConeV& domain, const Face& facet);

/// Checks that A' is perfect, Min_F(A) ⊆ Min(A'), and that the facet functional is <= 0 on
/// Min(A') and zero exactly on Min_F(A). Returns an empty string on success.
std::string checkNeighbour(const QuadraticForm& a, const MinimalVectorSet& min, const Face& facet,
                           const ConeV& domain, const QuadraticForm& neighbour);

/// The older doubling walk: U vanishes on Min_F and is 1 on one other minimal vector,
/// λ doubles while Min(A + λU) ⊂ Min(A), then shrinks onto violating vectors. Kept to
/// show how it breaks; never used for classification.
struct LegacyFlipResult {
    std::optional<QuadraticForm> form;
    std::string failure;
    Rational lastStep;
};
LegacyFlipResult legacyFlip(const QuadraticForm& a, const Face& facet);

/// Equivalence invariants of a perfect form.
struct Fingerprint {
    std::size_t minCount = 0;
    Rational hermitePower;
    /// Sorted multiset of characteristic-graph weights over Min/±, |c_ij| for i < j and
    /// c_ii, written as "value*count" terms.
    std::string weights;

    friend bool operator==(const Fingerprint&, const Fingerprint&) = default;
};

Fingerprint fingerprint(const QuadraticForm& a, const MinimalVectorSet& min);

/// An equivalent form whose basis is drawn from Min(A) when Min(A) contains a basis of ℤ^d,
/// otherwise a pairwise size-reduced form.
QuadraticForm reduceByMinimalVectors(const QuadraticForm& a, const MinimalVectorSet& min);

/// Invariant integer Gram matrix of a perfect form: the first ℤ-basis in the canonical order
/// of its minimal vectors, scaled to content 1. Empty when Min(A) holds no ℤ-basis.
std::vector<IntegerVector> canonicalGram(const QuadraticForm& a, const MinimalVectorSet& min);

struct PerfectFormRecord {
    std::size_t id = 0;
    /// λ = 2.
    QuadraticForm form;
    MinimalVectorSet minimal;
    Fingerprint fingerprint;
    Integer autOrder;
    bool closed = false;
    /// Per facet orbit of Dom(form): orbit size and the record across it.
    std::vector<Integer> orbitSizes;
    std::vector<std::size_t> orbitIncidence;
    std::vector<std::size_t> neighbours;
};

struct ContiguityEdge {
    std::size_t from = 0;
    std::size_t to = 0;
    std::size_t orbit = 0;
    friend bool operator==(const ContiguityEdge&, const ContiguityEdge&) = default;
};

struct ClassifyCounters {
    AdmCounters adm;
    std::uint64_t flips = 0;
    std::uint64_t equivalenceTests = 0;
    std::uint64_t fingerprintCollisions = 0;
    std::uint64_t plainDualDescriptions = 0;
};

struct ClassificationState {
    static constexpr int kVersion = 1;
    std::size_t dim = 0;
    std::vector<PerfectFormRecord> records;
    std::deque<std::size_t> open;
    std::vector<std::size_t> closed;
    std::vector<ContiguityEdge> edges;
    ClassifyCounters counters;

    bool complete() const { return open.empty() && !records.empty(); }
};

struct ClassifyLimits {
    /// Records closed in this call; 0 means no limit.
    std::size_t maxForms = 0;
    /// Seconds; checked between records; 0 means no limit.
    double wallClock = 0;
};

/// Seeded with A_d.
ClassificationState initialState(std::size_t dim);

/// Processes open records in FIFO order until done or a limit is hit; `checkpoint` runs
/// after every closed record. Returns true when the state is complete.
bool advance(ClassificationState& state, const ClassifyLimits& limits = {}, const VoronoiPolicy& policy = {},
             const std::function<void(const ClassificationState&)>& checkpoint = {});

ClassificationState classify(std::size_t dim, const ClassifyLimits& limits = {}, const VoronoiPolicy& policy = {});

/// Versioned JSON text; loading revalidates perfection and fingerprints of every record.
std::string saveStateText(const ClassificationState& state);
ClassificationState loadStateText(const std::string& text);
/// Writes through a temporary file and rename.
void saveState(const ClassificationState& state, const std::string& path);
ClassificationState loadState(const std::string& path);

/// Thrown for state files that fail to parse or validate.
class StateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ClassReport {
    std::size_t id = 0;
    std::string name;
    std::vector<IntegerVector> canonical;
    std::size_t minCount = 0;
    Rational determinant;
    Rational hermitePower;
    double hermite = 0;
    bool eutactic = false;
    bool extreme = false;
    Integer autOrder;
    std::size_t facetOrbits = 0;
    Integer facets;
    std::vector<std::size_t> neighbourClasses;
};

struct ClassificationReport {
    std::size_t dim = 0;
    bool complete = false;
    std::vector<ClassReport> classes;
    std::size_t perfectCount = 0;
    std::size_t extremeCount = 0;
    /// Index into `classes` of the Hermite maximizer.
    std::size_t maximizer = 0;
};

ClassificationReport buildReport(const ClassificationState& state);
std::string reportJson(const ClassificationReport& report);
std::string reportTable(const ClassificationReport& report);

/// Root-lattice name of a form equivalent to A_d, D_d or E_d, or empty.
std::string catalogName(const QuadraticForm& a);

struct ContiguityRow {
    std::size_t id = 0;
    /// (neighbour record, number of facet orbits leading to it), sorted by neighbour.
    std::vector<std::pair<std::size_t, std::size_t>> neighbours;
};

/// Throws StateError for incomplete states.
std::vector<ContiguityRow> contiguityReport(const ClassificationState& state);

} // namespace pf
