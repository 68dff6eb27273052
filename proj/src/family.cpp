#include "pf/family.hpp"

#include "matcher.hpp"
#include "pf/linalg.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace pf {

VectorFamily::VectorFamily(std::size_t d, std::vector<IntegerVector> v, bool antipodalFamily)
    : dim(d), vectors(std::move(v)), antipodal(antipodalFamily) {
    for (const auto& x : vectors)
        if (x.size() != dim) throw PreconditionError("vector family: vector length differs from dimension");
}

VectorFamily VectorFamily::fromLattice(std::size_t d, const std::vector<LatticeVector>& v, bool antipodalFamily) {
    std::vector<IntegerVector> out;
    for (const auto& x : v) {
        IntegerVector y;
        for (long c : x) y.emplace_back(c);
        out.push_back(std::move(y));
    }
    return VectorFamily(d, std::move(out), antipodalFamily);
}

void VectorFamily::validate() const {
    std::set<IntegerVector> seen;
    RowSpace space(dim);
    for (const auto& v : vectors) {
        IntegerVector key = v;
        if (antipodal) makeFirstNonzeroPositive(key);
        if (!seen.insert(key).second) throw PreconditionError("vector family has a repeated vector");
        space.add(toRational(std::span<const Integer>(v)));
    }
    if (space.rank() != dim) throw PreconditionError("vector family is not full rank");
}

VectorFamily VectorFamily::expanded() const {
    std::vector<IntegerVector> out;
    for (const auto& v : vectors) {
        out.push_back(v);
        IntegerVector neg = v;
        for (auto& x : neg) x = -x;
        out.push_back(std::move(neg));
    }
    return VectorFamily(dim, std::move(out), false);
}

CharacteristicGraph characteristicGraph(const VectorFamily& family) {
    family.validate();
    const std::size_t d = family.dim, n = family.size();
    RationalMatrix q(d, d);
    for (const auto& v : family.vectors)
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) q(i, j) += v[i] * v[j];
    RationalMatrix qi = inverse(q);
    std::vector<RationalVector> w;
    for (const auto& v : family.vectors) w.push_back(qi.apply(toRational(std::span<const Integer>(v))));
    CharacteristicGraph g{RationalMatrix(n, n)};
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a; b < n; ++b) {
            Rational s = 0;
            for (std::size_t k = 0; k < d; ++k) s += family.vectors[a][k] * w[b][k];
            g.weights(a, b) = s;
            g.weights(b, a) = s;
        }
    return g;
}

std::vector<Rational> sortedWeightMultiset(const CharacteristicGraph& graph) {
    std::vector<Rational> out;
    for (std::size_t i = 0; i < graph.size(); ++i)
        for (std::size_t j = i; j < graph.size(); ++j) out.push_back(graph.weights(i, j));
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

using detail::Cells;
using detail::ColorGraph;

// Individualization-refinement over the equitable partition, keeping the lexicographically
// least relabeled color matrix. Subtrees are pruned by automorphisms found on the way.
class CanonicalSearch {
public:
    explicit CanonicalSearch(const ColorGraph& g) : g_(g) {}

    std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>> run() {
        Cells cells = detail::colorCells(g_);
        std::vector<std::uint32_t> prefix;
        search(cells, prefix, true);
        return {bestOrder_, bestMatrix_};
    }

private:
    std::vector<std::uint32_t> relabel(const std::vector<std::uint32_t>& order) const {
        std::vector<std::uint32_t> m(g_.n * g_.n);
        for (std::size_t a = 0; a < g_.n; ++a)
            for (std::size_t b = 0; b < g_.n; ++b) m[a * g_.n + b] = g_(order[a], order[b]);
        return m;
    }

    void addAutomorphism(const std::vector<std::uint32_t>& from, const std::vector<std::uint32_t>& to) {
        Permutation p(g_.n);
        for (std::size_t k = 0; k < g_.n; ++k) p[from[k]] = to[k];
        if (!isIdentity(p)) autos_.push_back(std::move(p));
    }

    std::vector<std::uint32_t> stabilizerOrbits(const std::vector<std::uint32_t>& prefix) const {
        std::vector<std::uint32_t> parent(g_.n);
        std::iota(parent.begin(), parent.end(), 0U);
        auto find = [&](std::uint32_t x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        for (const auto& a : autos_) {
            bool fixes = true;
            for (auto v : prefix) fixes = fixes && a[v] == v;
            if (!fixes) continue;
            for (std::uint32_t i = 0; i < g_.n; ++i) {
                auto x = find(i), y = find(a[i]);
                if (x != y) parent[std::max(x, y)] = std::min(x, y);
            }
        }
        for (std::uint32_t i = 0; i < g_.n; ++i) parent[i] = find(i);
        return parent;
    }

    // Returns true when the subtree proved equivalent to the first path (jump back).
    bool search(Cells cells, std::vector<std::uint32_t>& prefix, bool firstPath) {
        detail::refine(g_, cells);
        if (cells.size() == g_.n) {
            std::vector<std::uint32_t> order;
            for (const auto& c : cells) order.push_back(c.front());
            auto m = relabel(order);
            if (firstOrder_.empty()) {
                firstOrder_ = bestOrder_ = order;
                firstMatrix_ = bestMatrix_ = m;
                return false;
            }
            if (m == firstMatrix_) {
                addAutomorphism(order, firstOrder_);
                return true;
            }
            if (m == bestMatrix_) {
                addAutomorphism(order, bestOrder_);
            } else if (m < bestMatrix_) {
                bestMatrix_ = std::move(m);
                bestOrder_ = std::move(order);
            }
            return false;
        }
        std::size_t target = cells.size();
        for (std::size_t c = 0; c < cells.size(); ++c)
            if (cells[c].size() > 1 && (target == cells.size() || cells[c].size() < cells[target].size())) target = c;
        const auto members = cells[target];
        std::vector<std::uint32_t> explored;
        for (std::size_t k = 0; k < members.size(); ++k) {
            const auto v = members[k];
            if (!explored.empty()) {
                auto orb = stabilizerOrbits(prefix);
                bool seen = false;
                for (auto e : explored) seen = seen || orb[e] == orb[v];
                if (seen) continue;
            }
            Cells child;
            child.reserve(cells.size() + 1);
            for (std::size_t c = 0; c < cells.size(); ++c) {
                if (c != target) {
                    child.push_back(cells[c]);
                    continue;
                }
                child.push_back({v});
                std::vector<std::uint32_t> rest;
                for (auto u : members)
                    if (u != v) rest.push_back(u);
                child.push_back(std::move(rest));
            }
            prefix.push_back(v);
            bool jumped = search(std::move(child), prefix, firstPath && k == 0);
            prefix.pop_back();
            explored.push_back(v);
            if (jumped && !firstPath) return true;
        }
        return false;
    }

    const ColorGraph& g_;
    std::vector<std::uint32_t> firstOrder_, firstMatrix_, bestOrder_, bestMatrix_;
    std::vector<Permutation> autos_;
};

CanonicalLabel labelOf(const ColorGraph& g, const std::vector<Rational>& palette) {
    CanonicalLabel out;
    std::ostringstream os;
    os << g.n << ';';
    for (const auto& p : palette) os << p.get_str() << ',';
    os << ';';
    if (g.n == 0) {
        out.key = os.str();
        return out;
    }
    auto [order, matrix] = CanonicalSearch(g).run();
    for (auto c : matrix) os << c << ' ';
    out.key = os.str();
    out.order = std::move(order);
    return out;
}

struct ColoredPair {
    detail::ColoredFamily a, b;
};

ColoredPair colorPair(const VectorFamily& f1, const VectorFamily& f2) {
    CharacteristicGraph g1 = characteristicGraph(f1), g2 = characteristicGraph(f2);
    auto graphs = detail::colorize({&g1.weights, &g2.weights});
    return {{f1.dim, f1.vectors, std::move(graphs[0])}, {f2.dim, f2.vectors, std::move(graphs[1])}};
}

} // namespace

CanonicalLabel canonicalKey(const CharacteristicGraph& graph) {
    std::vector<Rational> palette;
    auto graphs = detail::colorize({&graph.weights}, &palette);
    return labelOf(graphs[0], palette);
}

CanonicalLabel canonicalKey(const VectorFamily& family) {
    return canonicalKey(characteristicGraph(family.antipodal ? family.expanded() : family));
}

std::optional<RestrictedMap> restrictedIsomorphism(const VectorFamily& f1, const VectorFamily& f2) {
    f1.validate();
    f2.validate();
    if (f1.dim != f2.dim || f1.size() != f2.size() || f1.antipodal != f2.antipodal) return std::nullopt;
    const bool anti = f1.antipodal;
    VectorFamily e1 = anti ? f1.expanded() : f1, e2 = anti ? f2.expanded() : f2;
    ColoredPair pair = colorPair(e1, e2);
    detail::LinearMatcher matcher(pair.a, pair.b);
    auto found = matcher.find();
    if (!found) return std::nullopt;
    RestrictedMap out{std::move(found->matrix), {}};
    if (anti) {
        out.sigma.resize(f1.size());
        for (std::size_t i = 0; i < f1.size(); ++i) out.sigma[i] = found->sigma[2 * i] / 2;
    } else {
        out.sigma = std::move(found->sigma);
    }
    return out;
}

RestrictedAutomorphisms restrictedAutomorphismGroup(const VectorFamily& family) {
    family.validate();
    const bool anti = family.antipodal;
    VectorFamily e = anti ? family.expanded() : family;
    CharacteristicGraph g = characteristicGraph(e);
    auto graphs = detail::colorize({&g.weights});
    detail::ColoredFamily cf{e.dim, e.vectors, std::move(graphs[0])};
    detail::LinearMatcher matcher(cf, cf);
    auto aut = matcher.automorphisms();
    std::vector<Permutation> perms;
    std::vector<RationalMatrix> mats;
    for (std::size_t k = 0; k < aut.permutations.size(); ++k) {
        Permutation p = aut.permutations[k];
        if (anti) {
            Permutation q(family.size());
            for (std::size_t i = 0; i < family.size(); ++i) q[i] = p[2 * i] / 2;
            p = std::move(q);
        }
        if (isIdentity(p)) continue;
        perms.push_back(std::move(p));
        mats.push_back(std::move(aut.matrices[k]));
    }
    return {PermutationGroup(family.size(), std::move(perms)), std::move(mats), aut.order};
}

} // namespace pf
