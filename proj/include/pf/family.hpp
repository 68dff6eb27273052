#pragma once

#include "pf/exact.hpp"
#include "pf/permgroup.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pf {

/// Spanning family of integer vectors. An antipodal family stores one representative per
/// pair ±v, and maps between such families may send v to either sign of its image.
struct VectorFamily {
    std::size_t dim = 0;
    std::vector<IntegerVector> vectors;
    bool antipodal = false;

    VectorFamily() = default;
    VectorFamily(std::size_t d, std::vector<IntegerVector> v, bool antipodalFamily = false);
    static VectorFamily fromLattice(std::size_t d, const std::vector<LatticeVector>& v, bool antipodalFamily);
    std::size_t size() const { return vectors.size(); }
    /// Throws unless the family has rank dim and no repeated vector (or ± pair when antipodal).
    void validate() const;
    /// The family together with all negatives, in the order v_0, -v_0, v_1, -v_1, ...
    VectorFamily expanded() const;
};

/// Weights c_ij = v_iᵀ Q⁻¹ v_j with Q = Σ v_k v_kᵀ over the family's own vectors.
struct CharacteristicGraph {
    RationalMatrix weights;
    std::size_t size() const { return weights.rows(); }
};

CharacteristicGraph characteristicGraph(const VectorFamily& family);

/// `key` is equal for two graphs iff they are isomorphic as edge-weighted graphs.
/// order[k] is the vertex placed at canonical position k.
struct CanonicalLabel {
    std::string key;
    std::vector<std::uint32_t> order;
};

CanonicalLabel canonicalKey(const CharacteristicGraph& graph);
/// Key of the family's graph; antipodal families are keyed through their expansion, and the
/// order then lists expanded indices (2i for v_i, 2i+1 for -v_i).
CanonicalLabel canonicalKey(const VectorFamily& family);

/// matrix · v_i = ε_i w_{sigma[i]}, with ε_i = 1 unless the families are antipodal.
struct RestrictedMap {
    RationalMatrix matrix;
    Permutation sigma;
};

std::optional<RestrictedMap> restrictedIsomorphism(const VectorFamily& f1, const VectorFamily& f2);

struct RestrictedAutomorphisms {
    /// Action on family indices (± classes for antipodal families).
    PermutationGroup group;
    /// One realizing matrix per generator of `group`.
    std::vector<RationalMatrix> matrices;
    /// Order of the group of linear maps preserving the family (includes -I when antipodal).
    Integer linearOrder;
};

RestrictedAutomorphisms restrictedAutomorphismGroup(const VectorFamily& family);

/// Equal for the graphs of restricted-isomorphic families; a cheap prefilter.
std::vector<Rational> sortedWeightMultiset(const CharacteristicGraph& graph);

} // namespace pf
