#include "pf/exact.hpp"

#include <limits>
#include <sstream>

namespace pf {

RationalMatrix::RationalMatrix(std::initializer_list<std::initializer_list<Rational>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw PreconditionError("ragged matrix literal");
        for (const auto& x : r) data_.push_back(x);
    }
}

RationalMatrix RationalMatrix::identity(std::size_t n) {
    RationalMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

RationalMatrix RationalMatrix::fromRows(const std::vector<RationalVector>& rows, std::size_t cols) {
    RationalMatrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols) throw PreconditionError("row length mismatch");
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

RationalMatrix RationalMatrix::symmetric(std::initializer_list<std::initializer_list<Rational>> rows) {
    RationalMatrix m(rows);
    m.requireSymmetric("symmetric matrix literal");
    return m;
}

RationalVector RationalMatrix::row(std::size_t i) const {
    return RationalVector(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                          data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
}

RationalVector RationalMatrix::column(std::size_t j) const {
    RationalVector c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
}

bool RationalMatrix::isSymmetric() const {
    if (!square()) return false;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = i + 1; j < cols_; ++j)
            if ((*this)(i, j) != (*this)(j, i)) return false;
    return true;
}

void RationalMatrix::requireSymmetric(const char* what) const {
    if (!square()) throw PreconditionError(std::string(what) + ": matrix is not square");
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = i + 1; j < cols_; ++j)
            if ((*this)(i, j) != (*this)(j, i)) {
                std::ostringstream os;
                os << what << ": asymmetric entries (" << i + 1 << "," << j + 1 << ")="
                   << (*this)(i, j).get_str() << " vs (" << j + 1 << "," << i + 1
                   << ")=" << (*this)(j, i).get_str();
                throw PreconditionError(os.str());
            }
}

RationalMatrix RationalMatrix::transpose() const {
    RationalMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

RationalMatrix RationalMatrix::operator*(const RationalMatrix& rhs) const {
    if (cols_ != rhs.rows_) throw PreconditionError("matrix product shape mismatch");
    RationalMatrix p(rows_, rhs.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k) {
            const Rational& a = (*this)(i, k);
            if (sgn(a) == 0) continue;
            for (std::size_t j = 0; j < rhs.cols_; ++j) p(i, j) += a * rhs(k, j);
        }
    return p;
}

RationalMatrix RationalMatrix::operator+(const RationalMatrix& rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw PreconditionError("matrix sum shape mismatch");
    RationalMatrix s(*this);
    for (std::size_t k = 0; k < data_.size(); ++k) s.data_[k] += rhs.data_[k];
    return s;
}

RationalMatrix RationalMatrix::operator-(const RationalMatrix& rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw PreconditionError("matrix difference shape mismatch");
    RationalMatrix s(*this);
    for (std::size_t k = 0; k < data_.size(); ++k) s.data_[k] -= rhs.data_[k];
    return s;
}

RationalMatrix RationalMatrix::scaled(const Rational& c) const {
    RationalMatrix s(*this);
    for (auto& x : s.data_) x *= c;
    return s;
}

RationalVector RationalMatrix::apply(std::span<const Rational> v) const {
    if (v.size() != cols_) throw PreconditionError("matrix-vector shape mismatch");
    RationalVector out(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) out[i] += (*this)(i, j) * v[j];
    return out;
}

std::string RationalMatrix::toString() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) os << (j ? " " : "") << (*this)(i, j).get_str();
        os << '\n';
    }
    return os.str();
}

Rational dot(std::span<const Rational> a, std::span<const Rational> b) {
    if (a.size() != b.size()) throw PreconditionError("dot: length mismatch");
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

Integer dot(std::span<const Integer> a, std::span<const Integer> b) {
    if (a.size() != b.size()) throw PreconditionError("dot: length mismatch");
    Integer s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

Rational quadraticValue(const RationalMatrix& m, std::span<const long> x) {
    return bilinearValue(m, x, x);
}

Rational bilinearValue(const RationalMatrix& m, std::span<const long> x, std::span<const long> y) {
    if (x.size() != m.rows() || y.size() != m.cols()) throw PreconditionError("bilinear form shape mismatch");
    Rational s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0) continue;
        Rational r = 0;
        for (std::size_t j = 0; j < y.size(); ++j)
            if (y[j] != 0) r += m(i, j) * y[j];
        s += r * x[i];
    }
    return s;
}

IntegerVector primitiveInteger(std::span<const Rational> v) {
    Integer den = 1;
    for (const auto& x : v) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), x.get_den_mpz_t());
    IntegerVector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].get_num() * (den / v[i].get_den());
    return primitiveInteger(std::span<const Integer>(out));
}

IntegerVector primitiveInteger(std::span<const Integer> v) {
    Integer g = 0;
    for (const auto& x : v) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
    IntegerVector out(v.begin(), v.end());
    if (g > 1)
        for (auto& x : out) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
    return out;
}

void makeFirstNonzeroPositive(IntegerVector& v) {
    for (const auto& x : v) {
        if (sgn(x) == 0) continue;
        if (sgn(x) < 0)
            for (auto& y : v) y = -y;
        return;
    }
}

void makeFirstNonzeroPositive(LatticeVector& v) {
    for (long x : v) {
        if (x == 0) continue;
        if (x < 0)
            for (auto& y : v) y = -y;
        return;
    }
}

RationalVector toRational(std::span<const Integer> v) {
    RationalVector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i];
    return out;
}

RationalVector toRational(std::span<const long> v) {
    RationalVector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i];
    return out;
}

LatticeVector toLattice(std::span<const Integer> v) {
    LatticeVector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].fits_slong_p()) throw InternalError("lattice vector entry overflows machine integer");
        out[i] = v[i].get_si();
    }
    return out;
}

Rational parseRational(const std::string& text) {
    if (text.empty()) throw PreconditionError("empty rational literal");
    auto slash = text.find('/');
    auto checkDigits = [&](const std::string& s) {
        std::size_t start = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
        if (start >= s.size()) throw PreconditionError("malformed rational literal '" + text + "'");
        for (std::size_t i = start; i < s.size(); ++i)
            if (s[i] < '0' || s[i] > '9') throw PreconditionError("malformed rational literal '" + text + "'");
    };
    std::string num = text.substr(0, slash);
    std::string den = slash == std::string::npos ? "1" : text.substr(slash + 1);
    checkDigits(num);
    checkDigits(den);
    if (num[0] == '+') num.erase(0, 1);
    if (den[0] == '+') den.erase(0, 1);
    Integer d(den);
    if (sgn(d) == 0) throw PreconditionError("zero denominator in '" + text + "'");
    Rational q(Integer(num), d);
    q.canonicalize();
    return q;
}

std::string toString(const Rational& q) { return q.get_str(); }

} // namespace pf
