#pragma once

#include "pf/exact.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pf {

using IndexSet = std::vector<std::uint32_t>;

/// A cone given by generators: integer vectors, no two on the same ray. They are scaled to
/// primitive vectors unless `keepScale` is set.
struct ConeV {
    std::size_t ambientDim = 0;
    std::vector<IntegerVector> rays;

    ConeV() = default;
    ConeV(std::size_t m, std::vector<IntegerVector> r, bool keepScale = false);
    /// Scales rational generators to primitive integers and checks they are distinct.
    static ConeV fromRational(std::size_t m, const std::vector<RationalVector>& r);
};

/// A cone given by facet functionals f with f(x) >= 0, each primitive integer.
struct ConeH {
    std::size_t ambientDim = 0;
    std::vector<IntegerVector> facets;
};

/// A face encoded by the rays it contains and a functional vanishing exactly there.
struct Face {
    IndexSet incidence;
    IntegerVector functional;

    std::size_t incidenceNumber() const { return incidence.size(); }
    friend bool operator==(const Face&, const Face&) = default;
};

/// Rejected cone input. `witness` is a hyperplane normal containing every ray when the
/// cone is not full-dimensional, or a ray lying in the lineality space when not pointed.
class ConeShapeError : public PreconditionError {
public:
    enum class Kind { NotFullDimensional, NotPointed };
    ConeShapeError(Kind kind, IntegerVector witness, const std::string& what);
    Kind kind() const { return kind_; }
    const IntegerVector& witness() const { return witness_; }

private:
    Kind kind_;
    IntegerVector witness_;
};

struct DualDescriptionOptions {
    /// Verify full dimension and pointedness (LP) before running.
    bool validate = true;
    /// Use the OpenMP pair-generation kernel.
    bool parallel = true;
};

/// Facets of a full-dimensional pointed cone with their incidence sets, sorted by
/// functional. Incremental double description: rays inserted by (coordinate sum, lex),
/// adjacency by the combinatorial zero-set test.
std::vector<Face> facetsOf(const ConeV& cone, const DualDescriptionOptions& options = {});
ConeH dualDescription(const ConeV& cone, const DualDescriptionOptions& options = {});
/// Extreme rays of {x : f(x) >= 0 for all facets}, by polar duality.
ConeV extremeRays(const ConeH& cone, const DualDescriptionOptions& options = {});

/// Throws ConeShapeError unless the cone is full-dimensional and pointed.
void requireFullDimensionalPointed(const ConeV& cone);

/// One facet found from an interior functional (exact LP) tightened onto m-1 independent rays.
Face initialFacet(const ConeV& cone);

/// Zero set of a valid functional; throws if it is negative on some ray.
Face faceOf(const ConeV& cone, IntegerVector functional);
/// True when the functional is >= 0 on all rays and vanishes on rays of rank m - 1.
bool isFacet(const ConeV& cone, const Face& face);

/// The face's rays as a full-dimensional cone in m - 1 coordinates: the first coordinate
/// where the functional is nonzero is dropped (an isomorphism on the face's hyperplane).
/// Ray k of the result is cone.rays[face.incidence[k]] with that coordinate removed and no
/// rescaling, so linear symmetries of the face act exactly on the projected rays.
ConeV facetSubcone(const ConeV& cone, const Face& face);

/// Gift-wrapping: the facet F' != F with F ∩ F' ⊇ ridge. Throws when the ridge rays do not
/// leave a 2-dimensional space of vanishing functionals.
Face adjacentFacet(const ConeV& cone, const Face& facet, const IndexSet& ridge);

inline std::size_t incidenceNumber(const Face& f) { return f.incidence.size(); }

/// Balinski: facets in unfinished orbits cannot hide undiscovered facets when fewer than m - 1.
inline bool balinskiStop(std::size_t ambientDim, std::size_t unfinishedFacetTotal) {
    return ambientDim >= 1 && unfinishedFacetTotal < ambientDim - 1;
}

/// Cone exchange format: "V m N" or "H m M" header, then one vector per line.
struct ConeFile {
    bool generators = true;
    std::size_t ambientDim = 0;
    std::vector<IntegerVector> vectors;
};
ConeFile parseConeFile(std::istream& in);
ConeFile readConeFile(const std::string& path);
std::string formatConeFile(const ConeFile& file);

} // namespace pf
