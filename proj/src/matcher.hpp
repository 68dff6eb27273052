#pragma once

#include "pf/family.hpp"

#include <functional>
#include <map>

namespace pf::detail {

/// Complete graph with colored vertices (diagonal) and edges, colors given as small ids.
struct ColorGraph {
    std::size_t n = 0;
    std::vector<std::uint32_t> colors;
    std::uint32_t operator()(std::size_t i, std::size_t j) const { return colors[i * n + j]; }
};

/// Assigns every value of the given matrices its rank in the sorted union of values.
std::vector<ColorGraph> colorize(const std::vector<const RationalMatrix*>& weights, std::vector<Rational>* palette = nullptr);

using Cells = std::vector<std::vector<std::uint32_t>>;

/// Refines `cells` to the coarsest equitable partition below it. Pieces of a split cell keep
/// its position and are ordered by their color profile, so the result is label-invariant.
/// Returns a hash of the refinement history.
std::uint64_t refine(const ColorGraph& g, Cells& cells);
/// Vertices grouped by diagonal color, in color order.
Cells colorCells(const ColorGraph& g);

struct ColoredFamily {
    std::size_t dim = 0;
    std::vector<IntegerVector> vectors;
    ColorGraph graph;
};

struct MatchResult {
    RationalMatrix matrix;
    Permutation sigma;
};

struct AutomorphismResult {
    std::vector<Permutation> permutations;
    std::vector<RationalMatrix> matrices;
    Integer order;
};

/// Linear maps A with A v_i = w_σ(i) preserving all colors, found by backtracking over the
/// images of a basis subfamily. `accept` can reject further leaves (e.g. non-integral maps).
class LinearMatcher {
public:
    using Accept = std::function<bool(const RationalMatrix&)>;
    LinearMatcher(const ColoredFamily& source, const ColoredFamily& target, Accept accept = {});

    std::optional<MatchResult> find();
    /// Requires source and target to be the same family.
    AutomorphismResult automorphisms();

private:
    bool candidate(std::size_t level, std::uint32_t t, const std::vector<std::uint32_t>& images) const;
    bool dfs(std::size_t level, std::vector<std::uint32_t>& images, MatchResult& out);
    bool leaf(const std::vector<std::uint32_t>& images, MatchResult& out);

    const ColoredFamily& src_;
    const ColoredFamily& dst_;
    Accept accept_;
    bool feasible_ = true;
    std::vector<std::uint32_t> cellSrc_, cellDst_;
    std::vector<std::uint32_t> basis_;
    RationalMatrix basisInverse_;
    Integer denominator_;
    std::vector<IntegerVector> coords_;
    std::map<IntegerVector, std::uint32_t> dstIndex_;
    std::vector<bool> used_;
};

} // namespace pf::detail
