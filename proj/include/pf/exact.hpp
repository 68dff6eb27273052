#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pf {

using Integer = mpz_class;
using Rational = mpq_class;
using RationalVector = std::vector<Rational>;
using IntegerVector = std::vector<Integer>;
using LatticeVector = std::vector<long>;

/// Thrown when an operation's shape or domain precondition is violated.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when an internal consistency check fails (an algorithm bug, never user error).
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Dense row-major matrix of exact rationals.
class RationalMatrix {
public:
    RationalMatrix() = default;
    RationalMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
    RationalMatrix(std::initializer_list<std::initializer_list<Rational>> rows);

    static RationalMatrix identity(std::size_t n);
    static RationalMatrix fromRows(const std::vector<RationalVector>& rows, std::size_t cols);
    /// Rejects asymmetric input, naming the first offending pair.
    static RationalMatrix symmetric(std::initializer_list<std::initializer_list<Rational>> rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    Rational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Rational& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    RationalVector row(std::size_t i) const;
    RationalVector column(std::size_t j) const;

    bool isSymmetric() const;
    /// Throws PreconditionError unless square and symmetric.
    void requireSymmetric(const char* what) const;

    RationalMatrix transpose() const;
    RationalMatrix operator*(const RationalMatrix& rhs) const;
    RationalMatrix operator+(const RationalMatrix& rhs) const;
    RationalMatrix operator-(const RationalMatrix& rhs) const;
    RationalMatrix scaled(const Rational& c) const;
    RationalVector apply(std::span<const Rational> v) const;

    friend bool operator==(const RationalMatrix& a, const RationalMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

    std::string toString() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Rational> data_;
};

Rational dot(std::span<const Rational> a, std::span<const Rational> b);
Integer dot(std::span<const Integer> a, std::span<const Integer> b);

/// xᵀ M x for an integer vector x.
Rational quadraticValue(const RationalMatrix& m, std::span<const long> x);
/// xᵀ M y.
Rational bilinearValue(const RationalMatrix& m, std::span<const long> x, std::span<const long> y);

/// Scale to integers with gcd 1; sign preserved. The zero vector stays zero.
IntegerVector primitiveInteger(std::span<const Rational> v);
IntegerVector primitiveInteger(std::span<const Integer> v);
/// Flip sign so that the first nonzero entry is positive.
void makeFirstNonzeroPositive(IntegerVector& v);
void makeFirstNonzeroPositive(LatticeVector& v);

RationalVector toRational(std::span<const Integer> v);
RationalVector toRational(std::span<const long> v);
LatticeVector toLattice(std::span<const Integer> v);

/// Parses "p/q" or "p"; throws PreconditionError on malformed text or zero denominator.
Rational parseRational(const std::string& text);
std::string toString(const Rational& q);

} // namespace pf
