#include "pf/equivalence.hpp"

#include "matcher.hpp"
#include "pf/linalg.hpp"

#include <algorithm>
#include <map>

namespace pf {

namespace {

bool isIntegral(const RationalMatrix& p) {
    for (std::size_t i = 0; i < p.rows(); ++i)
        for (std::size_t j = 0; j < p.cols(); ++j)
            if (p(i, j).get_den() != 1) return false;
    return true;
}

// Vectors whose ± classes carry the form's isometries: Min when it spans, otherwise the
// characteristic set of all vectors up to the largest diagonal entry (it contains e_1..e_d).
std::vector<LatticeVector> characteristicSet(const QuadraticForm& a, const MinimalVectorSet& min, const Rational& bound) {
    RowSpace space(a.dim());
    for (const auto& v : min.vectors) space.add(toRational(std::span<const long>(v)));
    if (space.rank() == a.dim()) return min.vectors;
    std::vector<LatticeVector> out;
    for (const auto& nv : vectorsUpTo(a, bound)) out.push_back(nv.vector);
    return out;
}

detail::ColoredFamily gramColoredFamily(const QuadraticForm& a, const std::vector<LatticeVector>& reps,
                                        detail::ColorGraph graph) {
    detail::ColoredFamily f;
    f.dim = a.dim();
    for (const auto& v : reps) {
        IntegerVector x, y;
        for (long c : v) {
            x.emplace_back(c);
            y.emplace_back(-c);
        }
        f.vectors.push_back(std::move(x));
        f.vectors.push_back(std::move(y));
    }
    f.graph = std::move(graph);
    return f;
}

RationalMatrix gramWeights(const QuadraticForm& a, const std::vector<LatticeVector>& reps) {
    std::vector<LatticeVector> full;
    for (const auto& v : reps) {
        full.push_back(v);
        LatticeVector n = v;
        for (auto& c : n) c = -c;
        full.push_back(std::move(n));
    }
    RationalMatrix w(full.size(), full.size());
    for (std::size_t i = 0; i < full.size(); ++i)
        for (std::size_t j = i; j < full.size(); ++j) {
            Rational x = a.inner(full[i], full[j]);
            w(i, j) = x;
            w(j, i) = x;
        }
    return w;
}

} // namespace

bool isUnimodular(const RationalMatrix& p) {
    if (!p.square() || !isIntegral(p)) return false;
    Rational det = determinant(p);
    return det == 1 || det == -1;
}

Permutation actionOnClasses(const RationalMatrix& p, const std::vector<LatticeVector>& reps) {
    std::map<LatticeVector, std::uint32_t> index;
    for (std::size_t i = 0; i < reps.size(); ++i) {
        LatticeVector v = reps[i];
        makeFirstNonzeroPositive(v);
        index.emplace(v, static_cast<std::uint32_t>(i));
    }
    Permutation out(reps.size());
    for (std::size_t i = 0; i < reps.size(); ++i) {
        RationalVector img = p.apply(toRational(std::span<const long>(reps[i])));
        LatticeVector v;
        for (const auto& x : img) {
            if (x.get_den() != 1) throw PreconditionError("matrix does not preserve the vector classes");
            v.push_back(x.get_num().get_si());
        }
        makeFirstNonzeroPositive(v);
        auto it = index.find(v);
        if (it == index.end()) throw PreconditionError("matrix does not preserve the vector classes");
        out[i] = it->second;
    }
    requirePermutation(out, reps.size());
    return out;
}

FormAutomorphisms autGroup(const QuadraticForm& a) { return autGroup(a, arithmeticalMinimum(a)); }

FormAutomorphisms autGroup(const QuadraticForm& a, const MinimalVectorSet& min) {
    requirePositiveDefinite(a, "autGroup");
    auto reps = characteristicSet(a, min, a.maxDiagonal());
    RationalMatrix w = gramWeights(a, reps);
    auto graphs = detail::colorize({&w});
    detail::ColoredFamily f = gramColoredFamily(a, reps, std::move(graphs[0]));
    detail::LinearMatcher matcher(f, f, [](const RationalMatrix& p) { return isUnimodular(p); });
    auto aut = matcher.automorphisms();
    FormAutomorphisms out;
    out.minimal = min;
    out.order = aut.order;
    std::vector<Permutation> perms;
    for (auto& p : aut.matrices) {
        if (p.transpose() * a.gram() * p != a.gram()) throw InternalError("automorphism fails PᵀAP = A");
        perms.push_back(actionOnClasses(p, min.vectors));
        out.generators.push_back(std::move(p));
    }
    std::vector<Permutation> nontrivial;
    for (auto& p : perms)
        if (!isIdentity(p)) nontrivial.push_back(std::move(p));
    out.minAction = PermutationGroup(min.vectors.size(), std::move(nontrivial));
    return out;
}

std::optional<RationalMatrix> arithmeticEquivalence(const QuadraticForm& a, const QuadraticForm& b) {
    if (a.dim() != b.dim()) throw PreconditionError("arithmeticEquivalence: dimension mismatch");
    requirePositiveDefinite(a, "arithmeticEquivalence");
    requirePositiveDefinite(b, "arithmeticEquivalence");
    if (determinant(a.gram()) != determinant(b.gram())) return std::nullopt;
    MinimalVectorSet ma = arithmeticalMinimum(a), mb = arithmeticalMinimum(b);
    if (ma.minimum != mb.minimum || ma.vectors.size() != mb.vectors.size()) return std::nullopt;
    const Rational bound = std::max(a.maxDiagonal(), b.maxDiagonal());
    auto ra = characteristicSet(a, ma, bound), rb = characteristicSet(b, mb, bound);
    if (ra.size() != rb.size()) return std::nullopt;
    RationalMatrix wa = gramWeights(a, ra), wb = gramWeights(b, rb);
    auto graphs = detail::colorize({&wb, &wa});
    detail::ColoredFamily fb = gramColoredFamily(b, rb, std::move(graphs[0]));
    detail::ColoredFamily fa = gramColoredFamily(a, ra, std::move(graphs[1]));
    // A map T sending B's family onto A's preserving Gram values satisfies TᵀAT = B.
    detail::LinearMatcher matcher(fb, fa, [&](const RationalMatrix& p) {
        return isUnimodular(p) && p.transpose() * a.gram() * p == b.gram();
    });
    auto found = matcher.find();
    if (!found) return std::nullopt;
    return found->matrix;
}

} // namespace pf
