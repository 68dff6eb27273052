#include "matcher.hpp"

#include "pf/linalg.hpp"

#include <algorithm>
#include <numeric>

namespace pf::detail {

std::vector<ColorGraph> colorize(const std::vector<const RationalMatrix*>& weights, std::vector<Rational>* palette) {
    std::vector<Rational> values;
    for (const auto* w : weights)
        for (std::size_t i = 0; i < w->rows(); ++i)
            for (std::size_t j = 0; j < w->cols(); ++j) values.push_back((*w)(i, j));
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    std::vector<ColorGraph> out;
    for (const auto* w : weights) {
        ColorGraph g;
        g.n = w->rows();
        g.colors.resize(g.n * g.n);
        for (std::size_t i = 0; i < g.n; ++i)
            for (std::size_t j = 0; j < g.n; ++j)
                g.colors[i * g.n + j] = static_cast<std::uint32_t>(
                    std::lower_bound(values.begin(), values.end(), (*w)(i, j)) - values.begin());
        out.push_back(std::move(g));
    }
    if (palette) *palette = std::move(values);
    return out;
}

Cells colorCells(const ColorGraph& g) {
    std::vector<std::uint32_t> v(g.n);
    std::iota(v.begin(), v.end(), 0U);
    std::stable_sort(v.begin(), v.end(), [&](auto a, auto b) { return g(a, a) < g(b, b); });
    Cells cells;
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (k == 0 || g(v[k], v[k]) != g(v[k - 1], v[k - 1])) cells.emplace_back();
        cells.back().push_back(v[k]);
    }
    return cells;
}

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t x) {
    h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

} // namespace

std::uint64_t refine(const ColorGraph& g, Cells& cells) {
    std::uint64_t trace = 1469598103934665603ULL;
    std::vector<std::uint32_t> cellOf(g.n);
    bool changed = true;
    std::vector<std::uint64_t> sig;
    while (changed) {
        changed = false;
        for (std::size_t c = 0; c < cells.size(); ++c)
            for (auto v : cells[c]) cellOf[v] = static_cast<std::uint32_t>(c);
        Cells next;
        next.reserve(cells.size());
        for (auto& cell : cells) {
            if (cell.size() == 1) {
                next.push_back(std::move(cell));
                continue;
            }
            std::vector<std::pair<std::vector<std::uint64_t>, std::uint32_t>> profiles;
            profiles.reserve(cell.size());
            for (auto v : cell) {
                sig.clear();
                for (std::size_t u = 0; u < g.n; ++u)
                    sig.push_back((static_cast<std::uint64_t>(cellOf[u]) << 32) | g(v, u));
                std::sort(sig.begin(), sig.end());
                profiles.emplace_back(sig, v);
            }
            std::sort(profiles.begin(), profiles.end());
            std::size_t start = next.size();
            for (std::size_t k = 0; k < profiles.size(); ++k) {
                if (k == 0 || profiles[k].first != profiles[k - 1].first) {
                    next.emplace_back();
                    std::uint64_t h = 0;
                    for (auto x : profiles[k].first) h = mix(h, x);
                    trace = mix(trace, h);
                }
                next.back().push_back(profiles[k].second);
            }
            if (next.size() - start > 1) changed = true;
            trace = mix(trace, next.size() - start);
        }
        cells = std::move(next);
    }
    for (auto& cell : cells) std::sort(cell.begin(), cell.end());
    return trace;
}

namespace {

std::vector<std::uint32_t> cellIndex(const Cells& cells, std::size_t n) {
    std::vector<std::uint32_t> out(n);
    for (std::size_t c = 0; c < cells.size(); ++c)
        for (auto v : cells[c]) out[v] = static_cast<std::uint32_t>(c);
    return out;
}

} // namespace

LinearMatcher::LinearMatcher(const ColoredFamily& source, const ColoredFamily& target, Accept accept)
    : src_(source), dst_(target), accept_(std::move(accept)) {
    const std::size_t n = src_.vectors.size();
    if (n != dst_.vectors.size() || src_.dim != dst_.dim) {
        feasible_ = false;
        return;
    }
    Cells cs = colorCells(src_.graph), cd = colorCells(dst_.graph);
    std::uint64_t ts = refine(src_.graph, cs), td = refine(dst_.graph, cd);
    if (ts != td || cs.size() != cd.size()) {
        feasible_ = false;
        return;
    }
    for (std::size_t c = 0; c < cs.size(); ++c)
        if (cs[c].size() != cd[c].size()) {
            feasible_ = false;
            return;
        }
    cellSrc_ = cellIndex(cs, n);
    cellDst_ = cellIndex(cd, n);

    // Basis from the most distinctive cells first.
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0U);
    std::stable_sort(order.begin(), order.end(),
                     [&](auto a, auto b) { return cs[cellSrc_[a]].size() < cs[cellSrc_[b]].size(); });
    RowSpace space(src_.dim);
    for (auto v : order) {
        if (space.add(toRational(std::span<const Integer>(src_.vectors[v])))) basis_.push_back(v);
        if (basis_.size() == src_.dim) break;
    }
    if (basis_.size() != src_.dim) throw PreconditionError("vector family does not span");
    const std::size_t d = src_.dim;
    RationalMatrix b(d, d);
    for (std::size_t k = 0; k < d; ++k)
        for (std::size_t r = 0; r < d; ++r) b(r, k) = src_.vectors[basis_[k]][r];
    basisInverse_ = inverse(b);
    denominator_ = 1;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) denominator_ = lcm(denominator_, basisInverse_(i, j).get_den());
    for (const auto& v : src_.vectors) {
        IntegerVector c(d);
        for (std::size_t i = 0; i < d; ++i) {
            Rational s = 0;
            for (std::size_t j = 0; j < d; ++j) s += basisInverse_(i, j) * v[j];
            s *= denominator_;
            c[i] = s.get_num();
        }
        coords_.push_back(std::move(c));
    }
    for (std::size_t i = 0; i < n; ++i) dstIndex_.emplace(dst_.vectors[i], static_cast<std::uint32_t>(i));
    used_.assign(n, false);
}

bool LinearMatcher::candidate(std::size_t level, std::uint32_t t, const std::vector<std::uint32_t>& images) const {
    const auto s = basis_[level];
    if (used_[t] || cellDst_[t] != cellSrc_[s]) return false;
    for (std::size_t j = 0; j < level; ++j)
        if (src_.graph(basis_[j], s) != dst_.graph(images[j], t)) return false;
    return true;
}

bool LinearMatcher::leaf(const std::vector<std::uint32_t>& images, MatchResult& out) {
    const std::size_t d = src_.dim, n = src_.vectors.size();
    Permutation sigma(n);
    std::vector<bool> hit(n, false);
    IntegerVector y(d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t r = 0; r < d; ++r) {
            Integer acc = 0;
            for (std::size_t k = 0; k < d; ++k) acc += dst_.vectors[images[k]][r] * coords_[i][k];
            if (!mpz_divisible_p(acc.get_mpz_t(), denominator_.get_mpz_t())) return false;
            mpz_divexact(acc.get_mpz_t(), acc.get_mpz_t(), denominator_.get_mpz_t());
            y[r] = std::move(acc);
        }
        auto it = dstIndex_.find(y);
        if (it == dstIndex_.end() || hit[it->second]) return false;
        if (src_.graph(i, i) != dst_.graph(it->second, it->second)) return false;
        hit[it->second] = true;
        sigma[i] = it->second;
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (src_.graph(i, j) != dst_.graph(sigma[i], sigma[j])) return false;
    RationalMatrix t(d, d);
    for (std::size_t k = 0; k < d; ++k)
        for (std::size_t r = 0; r < d; ++r) t(r, k) = dst_.vectors[images[k]][r];
    RationalMatrix a = t * basisInverse_;
    if (accept_ && !accept_(a)) return false;
    out.matrix = std::move(a);
    out.sigma = std::move(sigma);
    return true;
}

bool LinearMatcher::dfs(std::size_t level, std::vector<std::uint32_t>& images, MatchResult& out) {
    if (level == basis_.size()) return leaf(images, out);
    for (std::uint32_t t = 0; t < dst_.vectors.size(); ++t) {
        if (!candidate(level, t, images)) continue;
        images[level] = t;
        used_[t] = true;
        bool ok = dfs(level + 1, images, out);
        used_[t] = false;
        if (ok) return true;
    }
    return false;
}

std::optional<MatchResult> LinearMatcher::find() {
    if (!feasible_) return std::nullopt;
    std::vector<std::uint32_t> images(basis_.size());
    MatchResult out;
    if (dfs(0, images, out)) return out;
    return std::nullopt;
}

namespace {

std::vector<std::uint32_t> labelsOf(std::size_t n, const std::vector<Permutation>& gens) {
    std::vector<std::uint32_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0U);
    auto find = [&](std::uint32_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& g : gens)
        for (std::uint32_t i = 0; i < n; ++i) {
            auto a = find(i), b = find(g[i]);
            if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }
    for (std::uint32_t i = 0; i < n; ++i) parent[i] = find(i);
    return parent;
}

} // namespace

AutomorphismResult LinearMatcher::automorphisms() {
    if (!feasible_) throw InternalError("automorphism search on mismatched families");
    const std::size_t n = src_.vectors.size(), d = basis_.size();
    AutomorphismResult result;
    result.order = 1;
    std::vector<std::uint32_t> images(basis_.begin(), basis_.end());
    for (std::size_t k = d; k-- > 0;) {
        std::fill(used_.begin(), used_.end(), false);
        for (std::size_t j = 0; j < k; ++j) used_[basis_[j]] = true;
        auto labels = labelsOf(n, result.permutations);
        std::vector<std::uint32_t> failed;
        for (std::uint32_t t = 0; t < n; ++t) {
            if (labels[t] == labels[basis_[k]]) continue;
            if (!candidate(k, t, images)) continue;
            bool known = false;
            for (auto f : failed) known = known || labels[f] == labels[t];
            if (known) continue;
            images[k] = t;
            used_[t] = true;
            MatchResult out;
            bool ok = dfs(k + 1, images, out);
            used_[t] = false;
            if (ok) {
                result.permutations.push_back(std::move(out.sigma));
                result.matrices.push_back(std::move(out.matrix));
                labels = labelsOf(n, result.permutations);
            } else {
                failed.push_back(t);
            }
        }
        images[k] = basis_[k];
        std::size_t orbit = 0;
        for (std::uint32_t t = 0; t < n; ++t)
            if (labels[t] == labels[basis_[k]]) ++orbit;
        result.order *= static_cast<unsigned long>(orbit);
    }
    return result;
}

} // namespace pf::detail
