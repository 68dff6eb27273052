#include "pf/polycone.hpp"

#include "pf/linalg.hpp"
#include "pf/lp.hpp"

#include <omp.h>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace pf {

namespace {

class Bits {
public:
    explicit Bits(std::size_t n = 0) : words_((n + 63) / 64, 0) {}
    void set(std::size_t i) { words_[i / 64] |= (std::uint64_t{1} << (i % 64)); }
    bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }
    std::size_t count() const {
        std::size_t c = 0;
        for (auto w : words_) c += static_cast<std::size_t>(__builtin_popcountll(w));
        return c;
    }
    Bits operator&(const Bits& o) const {
        Bits r(*this);
        for (std::size_t k = 0; k < words_.size(); ++k) r.words_[k] &= o.words_[k];
        return r;
    }
    std::size_t words() const { return words_.size(); }
    std::uint64_t word(std::size_t k) const { return words_[k]; }

private:
    std::vector<std::uint64_t> words_;
};

std::size_t commonCount(const Bits& a, const Bits& b) {
    std::size_t c = 0;
    for (std::size_t k = 0; k < a.words(); ++k) c += static_cast<std::size_t>(__builtin_popcountll(a.word(k) & b.word(k)));
    return c;
}

struct DdFacet {
    IntegerVector functional;
    Bits zeros;
};

// Combination of a positive and a negative facet vanishing on the new ray.
DdFacet combine(const DdFacet& p, const Integer& sp, const DdFacet& n, const Integer& sn, std::size_t rayIndex) {
    IntegerVector f(p.functional.size());
    const Integer a = sp, b = -sn;
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = a * n.functional[k] + b * p.functional[k];
    DdFacet out{primitiveInteger(std::span<const Integer>(f)), p.zeros & n.zeros};
    out.zeros.set(rayIndex);
    return out;
}

// Zero sets copied into one flat array, plus the facets through each ray, so the adjacency
// test only scans facets through the rarest common ray.
struct RayIndex {
    std::size_t words = 0;
    std::vector<std::uint64_t> flat;
    std::vector<std::vector<std::uint32_t>> facetsThrough;

    RayIndex(const std::vector<DdFacet>& facets, std::size_t rays) : facetsThrough(rays) {
        words = facets.empty() ? 0 : facets.front().zeros.words();
        flat.resize(facets.size() * words);
        for (std::size_t g = 0; g < facets.size(); ++g) {
            const Bits& z = facets[g].zeros;
            for (std::size_t k = 0; k < words; ++k) {
                flat[g * words + k] = z.word(k);
                for (std::uint64_t w = z.word(k); w; w &= w - 1)
                    facetsThrough[k * 64 + static_cast<std::size_t>(__builtin_ctzll(w))].push_back(
                        static_cast<std::uint32_t>(g));
            }
        }
    }
    const std::uint64_t* zeros(std::size_t g) const { return flat.data() + g * words; }
};

// No third facet contains the common zero set of p and n.
bool combinatoriallyAdjacent(const RayIndex& index, std::size_t p, std::size_t n) {
    const std::size_t words = index.words;
    const std::uint64_t* a = index.zeros(p);
    const std::uint64_t* b = index.zeros(n);
    std::uint64_t common[8];
    std::vector<std::uint64_t> spill;
    std::uint64_t* c = common;
    if (words > 8) {
        spill.resize(words);
        c = spill.data();
    }
    const std::vector<std::uint32_t>* best = nullptr;
    for (std::size_t k = 0; k < words; ++k) {
        c[k] = a[k] & b[k];
        for (std::uint64_t w = c[k]; w; w &= w - 1) {
            const auto& list = index.facetsThrough[k * 64 + static_cast<std::size_t>(__builtin_ctzll(w))];
            if (!best || list.size() < best->size()) best = &list;
        }
    }
    if (!best) return true;
    for (std::uint32_t g : *best) {
        if (g == p || g == n) continue;
        const std::uint64_t* z = index.zeros(g);
        bool within = true;
        for (std::size_t k = 0; k < words && within; ++k) within = (c[k] & ~z[k]) == 0;
        if (within) return false;
    }
    return true;
}

// Reference kernel: new facets from adjacent (positive, negative) pairs, in (pos, neg) order.
std::vector<DdFacet> adjacentPairsSerial(const std::vector<DdFacet>& facets, const std::vector<Integer>& values,
                                         const std::vector<std::size_t>& pos, const std::vector<std::size_t>& neg,
                                         std::size_t m, std::size_t rayIndex, const RayIndex& index) {
    std::vector<DdFacet> out;
    for (std::size_t p : pos)
        for (std::size_t n : neg) {
            if (commonCount(facets[p].zeros, facets[n].zeros) + 2 < m) continue;
            if (!combinatoriallyAdjacent(index, p, n)) continue;
            out.push_back(combine(facets[p], values[p], facets[n], values[n], rayIndex));
        }
    return out;
}

// OpenMP kernel: same output order as the serial kernel.
std::vector<DdFacet> adjacentPairsParallel(const std::vector<DdFacet>& facets, const std::vector<Integer>& values,
                                           const std::vector<std::size_t>& pos, const std::vector<std::size_t>& neg,
                                           std::size_t m, std::size_t rayIndex, const RayIndex& index) {
    std::vector<std::vector<DdFacet>> perPositive(pos.size());
    const long count = static_cast<long>(pos.size());
#pragma omp parallel for schedule(dynamic, 4)
    for (long i = 0; i < count; ++i) {
        const std::size_t p = pos[static_cast<std::size_t>(i)];
        auto& bucket = perPositive[static_cast<std::size_t>(i)];
        for (std::size_t n : neg) {
            if (commonCount(facets[p].zeros, facets[n].zeros) + 2 < m) continue;
            if (!combinatoriallyAdjacent(index, p, n)) continue;
            bucket.push_back(combine(facets[p], values[p], facets[n], values[n], rayIndex));
        }
    }
    std::vector<DdFacet> out;
    for (auto& b : perPositive)
        for (auto& f : b) out.push_back(std::move(f));
    return out;
}

std::vector<std::size_t> insertionOrder(const std::vector<IntegerVector>& rays) {
    std::vector<std::size_t> order(rays.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<Integer> sums(rays.size());
    for (std::size_t i = 0; i < rays.size(); ++i)
        for (const auto& x : rays[i]) sums[i] += x;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (sums[a] != sums[b]) return sums[a] < sums[b];
        return rays[a] < rays[b];
    });
    return order;
}

IndexSet zeroSet(const std::vector<IntegerVector>& rays, const IntegerVector& f) {
    IndexSet z;
    for (std::size_t i = 0; i < rays.size(); ++i)
        if (sgn(dot(f, rays[i])) == 0) z.push_back(static_cast<std::uint32_t>(i));
    return z;
}

RationalMatrix rowsMatrix(const std::vector<IntegerVector>& rays, const IndexSet& subset, std::size_t m) {
    RationalMatrix a(subset.size(), m);
    for (std::size_t k = 0; k < subset.size(); ++k)
        for (std::size_t j = 0; j < m; ++j) a(k, j) = rays[subset[k]][j];
    return a;
}

std::size_t rankOf(const std::vector<IntegerVector>& rays, const IndexSet& subset, std::size_t m) {
    RowSpace space(m);
    for (auto i : subset) {
        space.add(toRational(std::span<const Integer>(rays[i])));
        if (space.rank() == m) break;
    }
    return space.rank();
}

} // namespace

ConeV::ConeV(std::size_t m, std::vector<IntegerVector> r, bool keepScale) : ambientDim(m), rays(std::move(r)) {
    std::set<IntegerVector> seen;
    for (auto& ray : rays) {
        if (ray.size() != m) throw PreconditionError("ConeV: ray length differs from ambient dimension");
        if (std::all_of(ray.begin(), ray.end(), [](const Integer& x) { return sgn(x) == 0; }))
            throw PreconditionError("ConeV: zero generator");
        IntegerVector primitive = primitiveInteger(std::span<const Integer>(ray));
        if (!seen.insert(primitive).second) throw PreconditionError("ConeV: duplicate generator");
        if (!keepScale) ray = std::move(primitive);
    }
}

ConeV ConeV::fromRational(std::size_t m, const std::vector<RationalVector>& r) {
    std::vector<IntegerVector> ints;
    for (const auto& v : r) ints.push_back(primitiveInteger(std::span<const Rational>(v)));
    return ConeV(m, std::move(ints));
}

ConeShapeError::ConeShapeError(Kind kind, IntegerVector witness, const std::string& what)
    : PreconditionError(what), kind_(kind), witness_(std::move(witness)) {}

void requireFullDimensionalPointed(const ConeV& cone) {
    const std::size_t m = cone.ambientDim;
    IndexSet all(cone.rays.size());
    std::iota(all.begin(), all.end(), 0);
    RationalMatrix a = rowsMatrix(cone.rays, all, m);
    auto kernel = kernelBasis(a);
    if (!kernel.empty())
        throw ConeShapeError(ConeShapeError::Kind::NotFullDimensional, kernel.front(),
                             "cone is not full-dimensional: all rays lie in a hyperplane");
    // Pointed iff some functional is >= 1 on every ray.
    LpProblem lp;
    lp.objective.assign(m, Rational(0));
    lp.nonnegative.assign(m, false);
    for (const auto& r : cone.rays) {
        RationalVector row(m);
        for (std::size_t j = 0; j < m; ++j) row[j] = -r[j];
        lp.inequalities.push_back(std::move(row));
        lp.inequalityRhs.emplace_back(-1);
    }
    LpOutcome out = lpSolve(lp);
    if (out.status == LpStatus::Infeasible) {
        // Σ y_i r_i = 0 with y >= 0: any ray with y_i > 0 lies in the lineality space.
        for (std::size_t i = 0; i < cone.rays.size(); ++i)
            if (sgn(out.certificate[i]) > 0)
                throw ConeShapeError(ConeShapeError::Kind::NotPointed, cone.rays[i],
                                     "cone is not pointed: it contains a line");
        throw InternalError("pointedness LP certificate has no positive entry");
    }
}

std::vector<Face> facetsOf(const ConeV& cone, const DualDescriptionOptions& options) {
    const std::size_t m = cone.ambientDim;
    const std::size_t n = cone.rays.size();
    if (options.validate) requireFullDimensionalPointed(cone);
    if (n < m) throw ConeShapeError(ConeShapeError::Kind::NotFullDimensional, {}, "fewer rays than dimensions");

    auto order = insertionOrder(cone.rays);
    // Initial simplicial cone on the first m independent rays in insertion order.
    std::vector<std::size_t> basis;
    std::vector<bool> used(n, false);
    {
        RowSpace space(m);
        for (std::size_t idx : order) {
            if (space.add(toRational(std::span<const Integer>(cone.rays[idx])))) {
                basis.push_back(idx);
                used[idx] = true;
            }
            if (basis.size() == m) break;
        }
        if (basis.size() < m)
            throw ConeShapeError(ConeShapeError::Kind::NotFullDimensional, {}, "cone is not full-dimensional");
    }
    RationalMatrix b(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) b(i, j) = cone.rays[basis[i]][j];
    RationalMatrix binv = inverse(b);
    std::vector<DdFacet> facets;
    for (std::size_t i = 0; i < m; ++i) {
        RationalVector col = binv.column(i);
        DdFacet f{primitiveInteger(std::span<const Rational>(col)), Bits(n)};
        for (std::size_t k = 0; k < m; ++k)
            if (k != i) f.zeros.set(basis[k]);
        facets.push_back(std::move(f));
    }

    for (std::size_t idx : order) {
        if (used[idx]) continue;
        const IntegerVector& ray = cone.rays[idx];
        std::vector<Integer> values(facets.size());
        const long fc = static_cast<long>(facets.size());
#pragma omp parallel for if (options.parallel) schedule(static)
        for (long k = 0; k < fc; ++k) values[static_cast<std::size_t>(k)] = dot(facets[static_cast<std::size_t>(k)].functional, ray);
        std::vector<std::size_t> pos, neg, zero;
        for (std::size_t k = 0; k < facets.size(); ++k) {
            int s = sgn(values[k]);
            (s > 0 ? pos : s < 0 ? neg : zero).push_back(k);
        }
        if (!neg.empty()) {
            RayIndex index(facets, n);
            auto created = options.parallel ? adjacentPairsParallel(facets, values, pos, neg, m, idx, index)
                                            : adjacentPairsSerial(facets, values, pos, neg, m, idx, index);
            std::vector<DdFacet> next;
            next.reserve(pos.size() + zero.size() + created.size());
            for (std::size_t k = 0; k < facets.size(); ++k) {
                if (sgn(values[k]) < 0) continue;
                next.push_back(std::move(facets[k]));
            }
            for (auto& c : created) next.push_back(std::move(c));
            facets = std::move(next);
            // Recompute zero flags for the kept zero facets below.
            for (auto& f : facets)
                if (sgn(dot(f.functional, ray)) == 0) f.zeros.set(idx);
        } else {
            for (std::size_t k : zero) facets[k].zeros.set(idx);
        }
    }

    std::vector<Face> out;
    out.reserve(facets.size());
    for (auto& f : facets) {
        Face face;
        face.functional = std::move(f.functional);
        for (std::size_t i = 0; i < n; ++i)
            if (f.zeros.test(i)) face.incidence.push_back(static_cast<std::uint32_t>(i));
        out.push_back(std::move(face));
    }
    std::sort(out.begin(), out.end(), [](const Face& a, const Face& b) { return a.functional < b.functional; });
    return out;
}

ConeH dualDescription(const ConeV& cone, const DualDescriptionOptions& options) {
    ConeH h;
    h.ambientDim = cone.ambientDim;
    for (auto& f : facetsOf(cone, options)) h.facets.push_back(std::move(f.functional));
    return h;
}

ConeV extremeRays(const ConeH& cone, const DualDescriptionOptions& options) {
    ConeV polar(cone.ambientDim, cone.facets);
    ConeH back = dualDescription(polar, options);
    return ConeV(cone.ambientDim, std::move(back.facets));
}

Face faceOf(const ConeV& cone, IntegerVector functional) {
    Face f;
    f.functional = primitiveInteger(std::span<const Integer>(functional));
    for (std::size_t i = 0; i < cone.rays.size(); ++i) {
        int s = sgn(dot(f.functional, cone.rays[i]));
        if (s < 0) throw PreconditionError("functional is negative on a ray: not a valid inequality");
        if (s == 0) f.incidence.push_back(static_cast<std::uint32_t>(i));
    }
    return f;
}

bool isFacet(const ConeV& cone, const Face& face) {
    for (std::size_t i = 0, k = 0; i < cone.rays.size(); ++i) {
        int s = sgn(dot(face.functional, cone.rays[i]));
        if (s < 0) return false;
        const bool listed = k < face.incidence.size() && face.incidence[k] == i;
        if (listed) ++k;
        if ((s == 0) != listed) return false;
    }
    return rankOf(cone.rays, face.incidence, cone.ambientDim) + 1 == cone.ambientDim;
}

Face initialFacet(const ConeV& cone) {
    requireFullDimensionalPointed(cone);
    const std::size_t m = cone.ambientDim;
    LpProblem lp;
    lp.objective.assign(m, Rational(0));
    lp.nonnegative.assign(m, false);
    for (const auto& r : cone.rays) {
        RationalVector row(m);
        for (std::size_t j = 0; j < m; ++j) row[j] = -r[j];
        lp.inequalities.push_back(std::move(row));
        lp.inequalityRhs.emplace_back(-1);
    }
    LpOutcome interior = lpSolve(lp);
    if (interior.status == LpStatus::Infeasible) throw InternalError("interior functional LP infeasible");
    RationalVector f = interior.primalSolution;

    while (true) {
        IndexSet zeros;
        std::vector<Rational> values(cone.rays.size());
        for (std::size_t i = 0; i < cone.rays.size(); ++i) {
            values[i] = dot(f, toRational(std::span<const Integer>(cone.rays[i])));
            if (sgn(values[i]) == 0) zeros.push_back(static_cast<std::uint32_t>(i));
        }
        if (rankOf(cone.rays, zeros, m) + 1 == m) {
            IntegerVector fi = primitiveInteger(std::span<const Rational>(f));
            return Face{zeros, fi};
        }
        // Move f inside {g : g(r) = 0 for r in zeros} until another ray becomes tight.
        auto space = kernelBasis(rowsMatrix(cone.rays, zeros, m));
        RowSpace withF(m);
        withF.add(f);
        std::optional<RationalVector> dir;
        for (const auto& g : space) {
            RationalVector gq = toRational(std::span<const Integer>(g));
            if (!withF.contains(gq)) {
                dir = gq;
                break;
            }
        }
        if (!dir) throw InternalError("initialFacet: no direction independent of the current functional");
        for (int attempt = 0; attempt < 2; ++attempt) {
            std::optional<Rational> step;
            for (std::size_t i = 0; i < cone.rays.size(); ++i) {
                Rational gv = dot(*dir, toRational(std::span<const Integer>(cone.rays[i])));
                if (sgn(gv) <= 0) continue;
                Rational t = values[i] / gv;
                if (!step || t < *step) step = t;
            }
            if (step) {
                for (std::size_t j = 0; j < m; ++j) f[j] -= *step * (*dir)[j];
                break;
            }
            for (auto& x : *dir) x = -x;
            if (attempt == 1) throw InternalError("initialFacet: direction vanishes on every ray");
        }
    }
}

ConeV facetSubcone(const ConeV& cone, const Face& face) {
    const std::size_t m = cone.ambientDim;
    std::size_t dropped = m;
    for (std::size_t j = 0; j < m; ++j)
        if (sgn(face.functional[j]) != 0) {
            dropped = j;
            break;
        }
    if (dropped == m) throw PreconditionError("facetSubcone: zero functional");
    std::vector<IntegerVector> rays;
    for (auto i : face.incidence) {
        IntegerVector r;
        for (std::size_t j = 0; j < m; ++j)
            if (j != dropped) r.push_back(cone.rays[i][j]);
        rays.push_back(std::move(r));
    }
    return ConeV(m - 1, std::move(rays), true);
}

Face adjacentFacet(const ConeV& cone, const Face& facet, const IndexSet& ridge) {
    const std::size_t m = cone.ambientDim;
    auto space = kernelBasis(rowsMatrix(cone.rays, ridge, m));
    if (space.size() != 2) throw PreconditionError("adjacentFacet: ridge does not have codimension 2");
    const IntegerVector& f1 = space[0];
    const IntegerVector& f2 = space[1];
    std::vector<std::pair<Integer, Integer>> coeffs;
    for (const auto& r : cone.rays) coeffs.emplace_back(dot(f1, r), dot(f2, r));

    std::set<IntegerVector> candidates;
    for (const auto& [a, b] : coeffs) {
        if (sgn(a) == 0 && sgn(b) == 0) continue;
        for (int s : {1, -1}) {
            Integer al = -b * s, be = a * s;
            bool feasible = true;
            for (const auto& [c, d] : coeffs)
                if (sgn(al * c + be * d) < 0) {
                    feasible = false;
                    break;
                }
            if (!feasible) continue;
            IntegerVector f(m);
            for (std::size_t j = 0; j < m; ++j) f[j] = al * f1[j] + be * f2[j];
            candidates.insert(primitiveInteger(std::span<const Integer>(f)));
        }
    }
    if (candidates.size() != 2) throw PreconditionError("adjacentFacet: ridge is not a face of codimension 2");
    if (!candidates.count(facet.functional))
        throw PreconditionError("adjacentFacet: given facet does not contain the ridge");
    for (const auto& c : candidates)
        if (c != facet.functional) return Face{zeroSet(cone.rays, c), c};
    throw InternalError("adjacentFacet: unreachable");
}

ConeFile parseConeFile(std::istream& in) {
    ConeFile out;
    std::string line;
    std::size_t lineNo = 0;
    auto fail = [&](const std::string& msg) {
        std::ostringstream os;
        os << "cone file line " << lineNo << ": " << msg;
        throw PreconditionError(os.str());
    };
    while (std::getline(in, line)) {
        ++lineNo;
        if (line.find_first_not_of(" \t\r") != std::string::npos) break;
    }
    std::istringstream hs(line);
    std::string kind;
    long m = -1, count = -1;
    if (!(hs >> kind >> m >> count) || (kind != "V" && kind != "H") || m <= 0 || count < 0)
        fail("expected header 'V m N' or 'H m M'");
    out.generators = kind == "V";
    out.ambientDim = static_cast<std::size_t>(m);
    while (static_cast<long>(out.vectors.size()) < count && std::getline(in, line)) {
        ++lineNo;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        RationalVector v;
        std::string tok;
        while (ls >> tok) {
            try {
                v.push_back(parseRational(tok));
            } catch (const PreconditionError& e) {
                fail(e.what());
            }
        }
        if (v.size() != out.ambientDim) fail("vector length differs from ambient dimension");
        out.vectors.push_back(primitiveInteger(std::span<const Rational>(v)));
    }
    if (static_cast<long>(out.vectors.size()) != count) fail("fewer vectors than announced in the header");
    return out;
}

ConeFile readConeFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw PreconditionError("cannot open cone file '" + path + "'");
    return parseConeFile(in);
}

std::string formatConeFile(const ConeFile& file) {
    std::ostringstream os;
    os << (file.generators ? "V " : "H ") << file.ambientDim << ' ' << file.vectors.size() << '\n';
    for (const auto& v : file.vectors) {
        for (std::size_t j = 0; j < v.size(); ++j) os << (j ? " " : "") << v[j].get_str();
        os << '\n';
    }
    return os.str();
}

} // namespace pf
