#include "pf/qform.hpp"

#include "pf/lp.hpp"
#include "pf/symcoords.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace pf {

namespace {

std::string describe(const DefinitenessResult& v) {
    std::ostringstream os;
    os << (v.kind == Definiteness::PositiveSemidefinite ? "positive semidefinite, kernel vector ("
                                                         : "indefinite, non-positive vector (");
    for (std::size_t i = 0; i < v.witness.size(); ++i) os << (i ? "," : "") << v.witness[i].get_str();
    os << ")";
    return os.str();
}

Integer floorOf(const Rational& q) {
    Integer f;
    mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return f;
}

} // namespace

NotPositiveDefinite::NotPositiveDefinite(const std::string& what, DefinitenessResult verdict)
    : PreconditionError(what + ": form is not positive definite (" + describe(verdict) + ")"),
      verdict_(std::move(verdict)) {}

void requirePositiveDefinite(const QuadraticForm& a, const char* what) {
    if (isPositiveDefinite(a.gram())) return;
    throw NotPositiveDefinite(what, definiteness(a.gram()));
}

QuadraticForm::QuadraticForm(RationalMatrix gram) : gram_(std::move(gram)) {
    gram_.requireSymmetric("QuadraticForm");
}

QuadraticForm QuadraticForm::transformed(const std::vector<LatticeVector>& p) const {
    const std::size_t d = dim();
    RationalMatrix pm(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) pm(i, j) = p[i][j];
    return QuadraticForm(pm.transpose() * gram_ * pm);
}

Rational QuadraticForm::maxDiagonal() const {
    Rational m = gram_(0, 0);
    for (std::size_t i = 1; i < dim(); ++i) m = std::max(m, gram_(i, i));
    return m;
}

Rational QuadraticForm::minDiagonal() const {
    Rational m = gram_(0, 0);
    for (std::size_t i = 1; i < dim(); ++i) m = std::min(m, gram_(i, i));
    return m;
}

ShortVectorEnumerator::ShortVectorEnumerator(const QuadraticForm& form) : dim_(form.dim()) {
    LdltResult f = ldlt(form.gram());
    bool pd = f.complete();
    for (const auto& p : f.pivots) pd = pd && sgn(p) > 0;
    if (!pd) throw NotPositiveDefinite("short vector enumeration", definiteness(form.gram()));
    lower_ = std::move(f.unitLower);
    pivots_ = std::move(f.pivots);
    perm_ = std::move(f.permutation);
}

void ShortVectorEnumerator::enumerate(Rational bound, const Visitor& visit) const {
    const std::size_t d = dim_;
    std::vector<long> y(d, 0);
    LatticeVector x(d);

    // q(y) = Σ_k D_k (y_k + Σ_{i>k} L_ik y_i)²; walk k = d-1 .. 0.
    auto recurse = [&](auto&& self, std::size_t k, const Rational& above, bool zeroAbove) -> void {
        Rational center = 0;
        for (std::size_t i = k + 1; i < d; ++i)
            if (y[i] != 0 && sgn(lower_(i, k)) != 0) center -= lower_(i, k) * y[i];
        const Rational& dk = pivots_[k];
        auto fits = [&](long v) {
            Rational t = Rational(v) - center;
            return above + dk * t * t <= bound;
        };
        if (above > bound) return;
        // Floating point only proposes the search window; exact tests decide membership.
        const double slack = std::max(0.0, Rational(bound - above).get_d() / dk.get_d());
        const double cd = center.get_d();
        const double sd = std::sqrt(slack);
        long nearest = floorOf(center + Rational(1, 2)).get_si();
        long lo = std::min(nearest, static_cast<long>(std::floor(cd - sd)) - 1);
        long hi = std::max(nearest, static_cast<long>(std::ceil(cd + sd)) + 1);
        while (fits(lo - 1)) --lo;
        while (fits(hi + 1)) ++hi;
        if (zeroAbove) lo = std::max(lo, 0L);
        for (long v = lo; v <= hi; ++v) {
            Rational t = Rational(v) - center;
            Rational partial = above + dk * t * t;
            if (partial > bound) continue;
            y[k] = v;
            const bool zeroHere = zeroAbove && v == 0;
            if (k == 0) {
                if (zeroHere) continue;
                for (std::size_t i = 0; i < d; ++i) x[perm_[i]] = y[i];
                LatticeVector out = x;
                makeFirstNonzeroPositive(out);
                visit(out, partial, bound);
            } else {
                self(self, k - 1, partial, zeroHere);
            }
        }
        y[k] = 0;
    };
    if (d > 0) recurse(recurse, d - 1, Rational(0), true);
}

MinimalVectorSet arithmeticalMinimum(const QuadraticForm& a) {
    ShortVectorEnumerator en(a);
    MinimalVectorSet out;
    out.minimum = a.minDiagonal();
    en.enumerate(out.minimum, [&](const LatticeVector& v, const Rational& norm, Rational& bound) {
        if (norm < bound) {
            bound = norm;
            out.vectors.clear();
        }
        out.vectors.push_back(v);
    });
    out.minimum = quadraticValue(a.gram(), out.vectors.front());
    std::sort(out.vectors.begin(), out.vectors.end());
    return out;
}

std::vector<NormedVector> vectorsUpTo(const QuadraticForm& a, const Rational& bound) {
    ShortVectorEnumerator en(a);
    std::vector<NormedVector> out;
    en.enumerate(bound, [&](const LatticeVector& v, const Rational& norm, Rational&) { out.push_back({v, norm}); });
    std::sort(out.begin(), out.end(), [](const NormedVector& p, const NormedVector& q) {
        if (p.norm != q.norm) return p.norm < q.norm;
        return p.vector < q.vector;
    });
    return out;
}

std::size_t perfectionRank(const QuadraticForm& a, const MinimalVectorSet& min) {
    SymCoordinates sc(a.dim());
    RowSpace space(sc.size());
    for (const auto& v : min.vectors) {
        IntegerVector ray = sc.rankOneRay(v);
        space.add(toRational(std::span<const Integer>(ray)));
        if (space.rank() == sc.size()) break;
    }
    return space.rank();
}

bool isPerfect(const QuadraticForm& a, const MinimalVectorSet& min) {
    return perfectionRank(a, min) == SymCoordinates(a.dim()).size();
}

bool isPerfect(const QuadraticForm& a) {
    requirePositiveDefinite(a, "isPerfect");
    return isPerfect(a, arithmeticalMinimum(a));
}

EutaxyResult eutaxy(const QuadraticForm& a, const MinimalVectorSet& min) {
    const std::size_t d = a.dim();
    const std::size_t n = min.vectors.size();
    RationalMatrix inv = inverse(a.gram());
    LpProblem p;
    p.objective.assign(n + 1, Rational(0));
    p.objective[n] = 1;
    p.nonnegative.assign(n + 1, false);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i; j < d; ++j) {
            RationalVector row(n + 1);
            for (std::size_t k = 0; k < n; ++k) row[k] = min.vectors[k][i] * min.vectors[k][j];
            p.equalities.push_back(std::move(row));
            p.equalityRhs.push_back(inv(i, j));
        }
    for (std::size_t k = 0; k < n; ++k) {
        RationalVector row(n + 1);
        row[k] = -1;
        row[n] = 1;
        p.inequalities.push_back(std::move(row));
        p.inequalityRhs.emplace_back(0);
    }
    LpOutcome r = lpSolve(p);
    EutaxyResult out;
    if (r.status == LpStatus::Infeasible) return out;
    if (r.status == LpStatus::Unbounded) throw InternalError("eutaxy LP reported unbounded");
    out.feasible = true;
    out.margin = r.value;
    out.eutactic = sgn(r.value) > 0;
    out.coefficients.assign(r.primalSolution.begin(), r.primalSolution.begin() + static_cast<std::ptrdiff_t>(n));
    return out;
}

bool isEutactic(const QuadraticForm& a) {
    requirePositiveDefinite(a, "isEutactic");
    return eutaxy(a, arithmeticalMinimum(a)).eutactic;
}

bool isExtreme(const QuadraticForm& a) {
    requirePositiveDefinite(a, "isExtreme");
    MinimalVectorSet min = arithmeticalMinimum(a);
    return isPerfect(a, min) && eutaxy(a, min).eutactic;
}

Rational hermitePower(const QuadraticForm& a, const Rational& minimum) {
    Rational p = 1;
    for (std::size_t i = 0; i < a.dim(); ++i) p *= minimum;
    return p / determinant(a.gram());
}

Rational hermitePower(const QuadraticForm& a) {
    requirePositiveDefinite(a, "hermitePower");
    return hermitePower(a, arithmeticalMinimum(a).minimum);
}

QuadraticForm catalogForm(const std::string& name) {
    if (name.empty()) throw PreconditionError("catalogForm: empty name");
    const char family = name[0];
    std::string rest = name.substr(1);
    if (!rest.empty() && rest[0] == '_') rest.erase(0, 1);
    if (name.rfind("Identity", 0) == 0) {
        rest = name.substr(8);
        if (!rest.empty() && rest[0] == '_') rest.erase(0, 1);
        return catalogForm("I" + rest);
    }
    std::size_t n = 0;
    try {
        std::size_t used = 0;
        n = std::stoul(rest, &used);
        if (used != rest.size()) throw PreconditionError("");
    } catch (const std::exception&) {
        throw PreconditionError("catalogForm: unknown form '" + name + "'");
    }
    RationalMatrix g(n, n);
    auto edge = [&](std::size_t i, std::size_t j) { g(i, j) = g(j, i) = -1; };
    switch (family) {
    case 'A':
        if (n < 1) break;
        for (std::size_t i = 0; i < n; ++i) g(i, i) = 2;
        for (std::size_t i = 1; i < n; ++i) edge(i - 1, i);
        return QuadraticForm(g);
    case 'D':
        if (n < 3) break;
        for (std::size_t i = 0; i < n; ++i) g(i, i) = 2;
        for (std::size_t i = 1; i + 1 < n; ++i) edge(i - 1, i);
        edge(n - 3, n - 1);
        return QuadraticForm(g);
    case 'E':
        if (n < 6 || n > 8) break;
        // Chain of n-1 nodes with the last node attached to the third node from the chain's end.
        for (std::size_t i = 0; i < n; ++i) g(i, i) = 2;
        for (std::size_t i = 1; i + 1 < n; ++i) edge(i - 1, i);
        edge(n - 4, n - 1);
        return QuadraticForm(g);
    case 'I':
        if (n < 1) break;
        return QuadraticForm(RationalMatrix::identity(n));
    default:
        break;
    }
    throw PreconditionError("catalogForm: unknown form '" + name + "'");
}

QuadraticForm normalizeScale(const QuadraticForm& a, const Rational& minimum) {
    return a.scaled(Rational(2) / minimum);
}

QuadraticForm normalizeScale(const QuadraticForm& a) {
    requirePositiveDefinite(a, "normalizeScale");
    return normalizeScale(a, arithmeticalMinimum(a).minimum);
}

std::vector<IntegerVector> primitiveIntegerGram(const QuadraticForm& a) {
    const std::size_t d = a.dim();
    RationalVector flat;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) flat.push_back(a.gram()(i, j));
    IntegerVector ints = primitiveInteger(std::span<const Rational>(flat));
    std::vector<IntegerVector> out(d, IntegerVector(d));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) out[i][j] = ints[i * d + j];
    if (sgn(out[0][0]) < 0)
        for (auto& r : out)
            for (auto& x : r) x = -x;
    return out;
}

QuadraticForm parseForm(std::istream& in) {
    std::string line;
    std::size_t lineNo = 0;
    auto nextLine = [&]() -> bool {
        while (std::getline(in, line)) {
            ++lineNo;
            if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
        }
        return false;
    };
    auto fail = [&](std::size_t col, const std::string& msg) {
        std::ostringstream os;
        os << "form file line " << lineNo << ", column " << col << ": " << msg;
        throw PreconditionError(os.str());
    };
    if (!nextLine()) throw PreconditionError("form file: missing dimension line");
    std::size_t d = 0;
    {
        std::istringstream ls(line);
        std::string tok, extra;
        ls >> tok;
        try {
            std::size_t used = 0;
            long v = std::stol(tok, &used);
            if (used != tok.size() || v <= 0) fail(1, "dimension must be a positive integer");
            d = static_cast<std::size_t>(v);
        } catch (const std::logic_error&) {
            fail(1, "dimension must be a positive integer");
        }
        if (ls >> extra) fail(2, "unexpected text after dimension");
    }
    RationalMatrix g(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        if (!nextLine()) {
            std::ostringstream os;
            os << "form file: expected " << d << " matrix rows, found " << i;
            throw PreconditionError(os.str());
        }
        std::istringstream ls(line);
        std::string tok;
        std::size_t col = 0;
        while (ls >> tok) {
            ++col;
            if (col > d) fail(col, "too many entries in row");
            try {
                g(i, col - 1) = parseRational(tok);
            } catch (const PreconditionError& e) {
                fail(col, e.what());
            }
        }
        if (col < d) fail(col + 1, "too few entries in row");
    }
    return QuadraticForm(g);
}

QuadraticForm readFormFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw PreconditionError("cannot open form file '" + path + "'");
    return parseForm(in);
}

std::string formatForm(const QuadraticForm& a) {
    std::ostringstream os;
    os << a.dim() << '\n' << a.gram().toString();
    return os.str();
}

} // namespace pf
