#include "pf/permgroup.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <numeric>
#include <set>
#include <unordered_set>

namespace pf {

Permutation identityPermutation(std::size_t n) {
    Permutation p(n);
    std::iota(p.begin(), p.end(), 0U);
    return p;
}

Permutation compose(const Permutation& a, const Permutation& b) {
    Permutation r(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) r[i] = a[b[i]];
    return r;
}

Permutation inverse(const Permutation& p) {
    Permutation r(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) r[p[i]] = static_cast<std::uint32_t>(i);
    return r;
}

bool isIdentity(const Permutation& p) {
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] != i) return false;
    return true;
}

PointSet imageOf(const Permutation& p, const PointSet& s) {
    PointSet r;
    r.reserve(s.size());
    for (auto x : s) r.push_back(p[x]);
    std::sort(r.begin(), r.end());
    return r;
}

void requirePermutation(const Permutation& p, std::size_t n) {
    if (p.size() != n) throw PreconditionError("permutation has the wrong degree");
    std::vector<bool> seen(n, false);
    for (auto x : p) {
        if (x >= n || seen[x]) throw PreconditionError("not a permutation");
        seen[x] = true;
    }
}

namespace {

struct SetHash {
    std::size_t operator()(const PointSet& s) const {
        std::size_t h = s.size();
        for (auto x : s) h = h * 1000003U ^ x;
        return h;
    }
};

std::vector<std::uint32_t> orbitLabels(std::size_t n, const std::vector<Permutation>& gens) {
    std::vector<std::uint32_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0U);
    std::function<std::uint32_t(std::uint32_t)> find = [&](std::uint32_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& g : gens)
        for (std::uint32_t i = 0; i < n; ++i) {
            auto a = find(i), b = find(g[i]);
            if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }
    std::vector<std::uint32_t> label(n);
    for (std::uint32_t i = 0; i < n; ++i) label[i] = find(i);
    return label;
}

} // namespace

PermutationGroup::PermutationGroup(std::size_t degree) : degree_(degree) { build({}); }

PermutationGroup::PermutationGroup(std::size_t degree, std::vector<Permutation> generators, const PointSet& basePrefix)
    : degree_(degree), generators_(std::move(generators)) {
    for (const auto& g : generators_) requirePermutation(g, degree_);
    for (auto b : basePrefix)
        if (b >= degree_) throw PreconditionError("base point out of range");
    build(basePrefix);
}

void PermutationGroup::computeLevel(std::size_t i, const std::vector<Permutation>& gens) {
    Level& lv = levels_[i];
    lv.orbit.clear();
    lv.trans.clear();
    lv.slot.assign(degree_, -1);
    const std::uint32_t beta = base_[i];
    lv.orbit.push_back(beta);
    lv.slot[beta] = 0;
    lv.trans.push_back(identityPermutation(degree_));
    for (std::size_t k = 0; k < lv.orbit.size(); ++k) {
        const std::uint32_t delta = lv.orbit[k];
        for (const auto& s : gens) {
            const std::uint32_t img = s[delta];
            if (lv.slot[img] >= 0) continue;
            lv.slot[img] = static_cast<std::int32_t>(lv.trans.size());
            lv.trans.push_back(compose(s, lv.trans[static_cast<std::size_t>(lv.slot[delta])]));
            lv.orbit.push_back(img);
        }
    }
}

std::pair<Permutation, std::size_t> PermutationGroup::strip(Permutation g, std::size_t from) const {
    for (std::size_t j = from; j < base_.size(); ++j) {
        const std::uint32_t img = g[base_[j]];
        const auto slot = levels_[j].slot[img];
        if (slot < 0) return {std::move(g), j};
        g = compose(inverse(levels_[j].trans[static_cast<std::size_t>(slot)]), g);
    }
    return {std::move(g), base_.size()};
}

std::vector<Permutation> PermutationGroup::levelGenerators(std::size_t level) const {
    std::vector<Permutation> out;
    for (const auto& s : strong_) {
        bool fixes = true;
        for (std::size_t j = 0; j < level && fixes; ++j) fixes = s[base_[j]] == base_[j];
        if (fixes) out.push_back(s);
    }
    return out;
}

void PermutationGroup::build(const PointSet& prefix) {
    base_.clear();
    for (auto b : prefix)
        if (std::find(base_.begin(), base_.end(), b) == base_.end()) base_.push_back(b);
    strong_.clear();
    for (const auto& g : generators_)
        if (!isIdentity(g) && std::find(strong_.begin(), strong_.end(), g) == strong_.end()) strong_.push_back(g);
    auto extendBase = [&](const Permutation& g) {
        for (auto b : base_)
            if (g[b] != b) return;
        for (std::uint32_t x = 0; x < degree_; ++x)
            if (g[x] != x) {
                base_.push_back(x);
                return;
            }
    };
    for (const auto& g : strong_) extendBase(g);
    levels_.assign(base_.size(), Level{});
    for (std::size_t i = 0; i < base_.size(); ++i) computeLevel(i, levelGenerators(i));

    std::size_t i = base_.size();
    while (i > 0) {
        const std::size_t lvl = i - 1;
        auto gens = levelGenerators(lvl);
        bool restarted = false;
        const Level& lv = levels_[lvl];
        for (std::size_t k = 0; k < lv.orbit.size() && !restarted; ++k) {
            const std::uint32_t delta = lv.orbit[k];
            const Permutation& tDelta = lv.trans[static_cast<std::size_t>(lv.slot[delta])];
            for (const auto& s : gens) {
                const std::uint32_t img = s[delta];
                const Permutation& tImg = lv.trans[static_cast<std::size_t>(lv.slot[img])];
                Permutation y = compose(inverse(tImg), compose(s, tDelta));
                auto [h, j] = strip(std::move(y), lvl + 1);
                if (j < base_.size() || !isIdentity(h)) {
                    if (j == base_.size()) {
                        extendBase(h);
                        levels_.emplace_back();
                    }
                    strong_.push_back(h);
                    for (std::size_t l = lvl + 1; l <= j && l < base_.size(); ++l) computeLevel(l, levelGenerators(l));
                    if (j >= levels_.size() - 1) computeLevel(levels_.size() - 1, levelGenerators(levels_.size() - 1));
                    i = std::min(j, base_.size() - 1) + 1;
                    restarted = true;
                    break;
                }
            }
        }
        if (!restarted) --i;
    }
    orbitLabels_.clear();
    for (std::size_t l = 0; l <= base_.size(); ++l) orbitLabels_.push_back(orbitLabels(degree_, levelGenerators(l)));
}

Integer PermutationGroup::order() const {
    Integer n = 1;
    for (const auto& lv : levels_) n *= static_cast<unsigned long>(lv.orbit.size());
    return n;
}

bool PermutationGroup::contains(const Permutation& p) const {
    if (p.size() != degree_) return false;
    auto [h, j] = strip(p, 0);
    return j == base_.size() && isIdentity(h);
}

bool PermutationGroup::isSubgroupOf(const PermutationGroup& g) const {
    if (g.degree() != degree_) return false;
    for (const auto& s : generators_)
        if (!g.contains(s)) return false;
    return true;
}

const Permutation& PermutationGroup::transversal(std::size_t level, std::uint32_t point) const {
    const auto slot = levels_[level].slot[point];
    if (slot < 0) throw PreconditionError("point is not in the basic orbit");
    return levels_[level].trans[static_cast<std::size_t>(slot)];
}

std::vector<PointSet> PermutationGroup::orbits() const {
    const auto& label = orbitLabels_.front();
    std::vector<PointSet> out;
    std::vector<std::int64_t> index(degree_, -1);
    for (std::uint32_t x = 0; x < degree_; ++x) {
        auto l = label[x];
        if (index[l] < 0) {
            index[l] = static_cast<std::int64_t>(out.size());
            out.emplace_back();
        }
        out[static_cast<std::size_t>(index[l])].push_back(x);
    }
    return out;
}

PointSet PermutationGroup::orbit(std::uint32_t point) const {
    PointSet out;
    const auto& label = orbitLabels_.front();
    for (std::uint32_t x = 0; x < degree_; ++x)
        if (label[x] == label[point]) out.push_back(x);
    return out;
}

PermutationGroup PermutationGroup::withBasePrefix(const PointSet& prefix) const {
    return PermutationGroup(degree_, strong_.empty() ? generators_ : strong_, prefix);
}

std::vector<Permutation> PermutationGroup::elements() const {
    std::vector<Permutation> out{identityPermutation(degree_)};
    for (std::size_t l = levels_.size(); l-- > 0;) {
        std::vector<Permutation> next;
        for (const auto& t : levels_[l].trans)
            for (const auto& e : out) next.push_back(compose(t, e));
        out = std::move(next);
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

// Backtrack over a stabilizer chain whose base starts with the points of s1.
class SetSearch {
public:
    SetSearch(const PermutationGroup& g, const PointSet& s1, const PointSet& s2, const SetSearchPrune& prune)
        : g_(g), s1_(s1), s2_(s2), prune_(prune), inS1_(g.degree(), false), inS2_(g.degree(), false) {
        for (auto x : s1) inS1_[x] = true;
        for (auto x : s2) inS2_[x] = true;
    }

    std::optional<Permutation> run(std::size_t level, const Permutation& p) const {
        if (level >= g_.levels() || !inS1_[g_.base()[level]]) {
            if (imageOf(p, s1_) == s2_) return p;
            return std::nullopt;
        }
        for (auto delta : g_.basicOrbit(level)) {
            if (!inS2_[p[delta]]) continue;
            Permutation q = compose(p, g_.transversal(level, delta));
            if (!countsAgree(level + 1, q) || !admissible(level + 1, q)) continue;
            if (auto r = run(level + 1, q)) return r;
        }
        return std::nullopt;
    }

    // The remaining factor lies in the level stabilizer, which preserves each of its orbits.
    bool countsAgree(std::size_t level, const Permutation& q) const {
        const auto& label = g_.levelOrbitLabels(std::min(level, g_.levels()));
        Permutation qi = inverse(q);
        std::vector<std::int64_t> count(g_.degree(), 0);
        for (auto x : s1_) ++count[label[x]];
        for (auto y : s2_) --count[label[qi[y]]];
        return std::all_of(count.begin(), count.end(), [](std::int64_t c) { return c == 0; });
    }

    // Prune hook on the first `levels` base points and their images under q.
    bool admissible(std::size_t levels, const Permutation& q) const {
        if (!prune_) return true;
        PointSet source(g_.base().begin(), g_.base().begin() + static_cast<std::ptrdiff_t>(levels)), target;
        for (auto b : source) target.push_back(q[b]);
        return prune_(source, target);
    }

private:
    const PermutationGroup& g_;
    const PointSet& s1_;
    const PointSet& s2_;
    const SetSearchPrune& prune_;
    std::vector<bool> inS1_, inS2_;
};

PointSet sortedCopy(PointSet s) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
}

} // namespace

std::optional<Permutation> setTransporter(const PermutationGroup& g, const PointSet& s1In, const PointSet& s2In,
                                          const SetSearchPrune& prune) {
    PointSet s1 = sortedCopy(s1In), s2 = sortedCopy(s2In);
    if (s1.size() != s2.size()) return std::nullopt;
    if (s1 == s2) return identityPermutation(g.degree());
    PermutationGroup h = g.withBasePrefix(s1);
    SetSearch search(h, s1, s2, prune);
    Permutation id = identityPermutation(g.degree());
    if (!search.countsAgree(0, id) || !search.admissible(0, id)) return std::nullopt;
    return search.run(0, id);
}

PermutationGroup setStabilizer(const PermutationGroup& g, const PointSet& sIn, const SetSearchPrune& prune) {
    PointSet s = sortedCopy(sIn);
    const std::size_t n = g.degree();
    PermutationGroup h = g.withBasePrefix(s);
    SetSearch search(h, s, s, prune);
    std::size_t prefix = 0;
    while (prefix < h.levels() && std::binary_search(s.begin(), s.end(), h.base()[prefix])) ++prefix;
    std::vector<Permutation> found = h.levelGenerators(prefix);
    for (std::size_t lvl = prefix; lvl-- > 0;) {
        const std::uint32_t beta = h.base()[lvl];
        std::vector<std::uint32_t> failed;
        auto labels = orbitLabels(n, found);
        for (auto delta : h.basicOrbit(lvl)) {
            if (!std::binary_search(s.begin(), s.end(), delta)) continue;
            if (labels[delta] == labels[beta]) continue;
            bool known = false;
            for (auto f : failed) known = known || labels[f] == labels[delta];
            if (known) continue;
            const Permutation& q = h.transversal(lvl, delta);
            std::optional<Permutation> r;
            if (search.countsAgree(lvl + 1, q) && search.admissible(lvl + 1, q)) r = search.run(lvl + 1, q);
            if (r) {
                found.push_back(*r);
                labels = orbitLabels(n, found);
            } else {
                failed.push_back(delta);
            }
        }
    }
    return PermutationGroup(n, std::move(found));
}

std::vector<PointSet> setOrbit(const PermutationGroup& g, const PointSet& sIn) {
    PointSet s = sortedCopy(sIn);
    std::unordered_set<PointSet, SetHash> seen{s};
    std::deque<PointSet> queue{s};
    std::vector<PointSet> out;
    while (!queue.empty()) {
        PointSet cur = std::move(queue.front());
        queue.pop_front();
        for (const auto& gen : g.generators()) {
            PointSet img = imageOf(gen, cur);
            if (seen.insert(img).second) queue.push_back(img);
        }
        out.push_back(std::move(cur));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::vector<std::size_t>> orbitsOnSets(const PermutationGroup& g, const std::vector<PointSet>& sets) {
    std::vector<PointSet> normalized;
    for (const auto& s : sets) normalized.push_back(sortedCopy(s));
    std::vector<std::vector<std::size_t>> parts;
    std::vector<bool> assigned(sets.size(), false);
    for (std::size_t i = 0; i < sets.size(); ++i) {
        if (assigned[i]) continue;
        auto orbit = setOrbit(g, normalized[i]);
        std::vector<std::size_t> part;
        for (std::size_t j = i; j < sets.size(); ++j)
            if (!assigned[j] && std::binary_search(orbit.begin(), orbit.end(), normalized[j])) {
                assigned[j] = true;
                part.push_back(j);
            }
        parts.push_back(std::move(part));
    }
    return parts;
}

std::vector<PointSet> splitOrbitUnderSubgroup(const PermutationGroup& g, const PermutationGroup& u, const PointSet& repIn) {
    if (!u.isSubgroupOf(g)) throw PreconditionError("splitOrbitUnderSubgroup: U is not a subgroup of G");
    PointSet rep = sortedCopy(repIn);
    // Breadth-first G-orbit keeps discovery order, so the first representative is rep itself.
    std::vector<PointSet> orbit{rep};
    std::unordered_set<PointSet, SetHash> seen{rep};
    for (std::size_t k = 0; k < orbit.size(); ++k)
        for (const auto& gen : g.generators()) {
            PointSet img = imageOf(gen, orbit[k]);
            if (seen.insert(img).second) orbit.push_back(img);
        }
    std::unordered_set<PointSet, SetHash> covered;
    std::vector<PointSet> reps;
    for (const auto& s : orbit) {
        if (covered.count(s)) continue;
        reps.push_back(s);
        std::vector<PointSet> stack{s};
        covered.insert(s);
        while (!stack.empty()) {
            PointSet cur = std::move(stack.back());
            stack.pop_back();
            for (const auto& gen : u.generators()) {
                PointSet img = imageOf(gen, cur);
                if (covered.insert(img).second) stack.push_back(std::move(img));
            }
        }
    }
    return reps;
}

} // namespace pf
