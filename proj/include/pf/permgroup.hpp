#pragma once

#include "pf/exact.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace pf {

/// p[i] is the image of point i.
using Permutation = std::vector<std::uint32_t>;
using PointSet = std::vector<std::uint32_t>;

Permutation identityPermutation(std::size_t n);
/// (a ∘ b)(i) = a(b(i)).
Permutation compose(const Permutation& a, const Permutation& b);
Permutation inverse(const Permutation& p);
bool isIdentity(const Permutation& p);
/// Sorted image of a point set.
PointSet imageOf(const Permutation& p, const PointSet& s);
/// Throws unless p is a bijection of {0..n-1}.
void requirePermutation(const Permutation& p, std::size_t n);

/// Finite permutation group with a base and strong generating set built eagerly by
/// deterministic Schreier-Sims. Immutable once constructed.
class PermutationGroup {
public:
    PermutationGroup() = default;
    explicit PermutationGroup(std::size_t degree);
    /// `basePrefix` points come first in the base, in the given order.
    PermutationGroup(std::size_t degree, std::vector<Permutation> generators, const PointSet& basePrefix = {});

    std::size_t degree() const { return degree_; }
    const std::vector<Permutation>& generators() const { return generators_; }
    const std::vector<Permutation>& strongGenerators() const { return strong_; }
    Integer order() const;
    bool isTrivial() const { return strong_.empty(); }
    bool contains(const Permutation& p) const;
    bool isSubgroupOf(const PermutationGroup& g) const;

    const PointSet& base() const { return base_; }
    std::size_t levels() const { return base_.size(); }
    const std::vector<std::uint32_t>& basicOrbit(std::size_t level) const { return levels_[level].orbit; }
    /// Element of the level's stabilizer subgroup mapping base()[level] to `point`.
    const Permutation& transversal(std::size_t level, std::uint32_t point) const;
    /// Strong generators fixing base()[0..level-1]; level == levels() gives none.
    std::vector<Permutation> levelGenerators(std::size_t level) const;
    /// Orbit labels of the pointwise stabilizer of base()[0..level-1], level in [0, levels()].
    const std::vector<std::uint32_t>& levelOrbitLabels(std::size_t level) const { return orbitLabels_[level]; }

    /// Orbits on points, each sorted, ordered by least element.
    std::vector<PointSet> orbits() const;
    PointSet orbit(std::uint32_t point) const;
    /// Same group, rebuilt with another base prefix.
    PermutationGroup withBasePrefix(const PointSet& prefix) const;
    /// Every element, for small groups only.
    std::vector<Permutation> elements() const;

private:
    struct Level {
        std::vector<std::uint32_t> orbit;
        std::vector<std::int32_t> slot;
        std::vector<Permutation> trans;
    };
    void build(const PointSet& prefix);
    void computeLevel(std::size_t i, const std::vector<Permutation>& gens);
    std::pair<Permutation, std::size_t> strip(Permutation g, std::size_t from) const;

    std::size_t degree_ = 0;
    std::vector<Permutation> generators_;
    std::vector<Permutation> strong_;
    PointSet base_;
    std::vector<Level> levels_;
    std::vector<std::vector<std::uint32_t>> orbitLabels_;
};

/// Partition of `sets` into G-orbits; each part lists indices into `sets`, the first being
/// the representative. Parts are ordered by their representative.
std::vector<std::vector<std::size_t>> orbitsOnSets(const PermutationGroup& g, const std::vector<PointSet>& sets);
/// Optional pruning for the set searches: called with source points and their proposed images
/// (in the same order); returning false cuts the branch. It must never reject a partial map
/// that extends to a group element carrying s1 onto s2.
using SetSearchPrune = std::function<bool(const PointSet& source, const PointSet& target)>;

PermutationGroup setStabilizer(const PermutationGroup& g, const PointSet& s, const SetSearchPrune& prune = {});
std::optional<Permutation> setTransporter(const PermutationGroup& g, const PointSet& s1, const PointSet& s2,
                                          const SetSearchPrune& prune = {});
/// Representatives of the U-orbits into which the G-orbit of `rep` splits; the first is `rep`.
std::vector<PointSet> splitOrbitUnderSubgroup(const PermutationGroup& g, const PermutationGroup& u, const PointSet& rep);
/// G-orbit of a point set by closure under the generators, sorted.
std::vector<PointSet> setOrbit(const PermutationGroup& g, const PointSet& s);

} // namespace pf
