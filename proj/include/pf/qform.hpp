#pragma once

#include "pf/exact.hpp"
#include "pf/linalg.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace pf {

/// Raised when an operation needs a positive definite form; carries the integer witness
/// from the exact definiteness test.
class NotPositiveDefinite : public PreconditionError {
public:
    NotPositiveDefinite(const std::string& what, DefinitenessResult verdict);
    const DefinitenessResult& verdict() const { return verdict_; }

private:
    DefinitenessResult verdict_;
};

/// A quadratic form identified with its symmetric Gram matrix.
class QuadraticForm {
public:
    QuadraticForm() = default;
    explicit QuadraticForm(RationalMatrix gram);

    std::size_t dim() const { return gram_.rows(); }
    const RationalMatrix& gram() const { return gram_; }
    Rational operator()(std::span<const long> v) const { return quadraticValue(gram_, v); }
    Rational inner(std::span<const long> v, std::span<const long> w) const { return bilinearValue(gram_, v, w); }

    QuadraticForm scaled(const Rational& c) const { return QuadraticForm(gram_.scaled(c)); }
    QuadraticForm operator+(const QuadraticForm& o) const { return QuadraticForm(gram_ + o.gram_); }
    /// Pᵀ A P.
    QuadraticForm transformed(const std::vector<LatticeVector>& p) const;

    Rational maxDiagonal() const;
    Rational minDiagonal() const;

    friend bool operator==(const QuadraticForm& a, const QuadraticForm& b) { return a.gram_ == b.gram_; }

private:
    RationalMatrix gram_;
};

/// λ(A) and Min(A)/±: one representative per antipodal pair, first nonzero entry positive,
/// sorted lexicographically.
struct MinimalVectorSet {
    Rational minimum;
    std::vector<LatticeVector> vectors;

    std::size_t kissingNumber() const { return 2 * vectors.size(); }
};

struct NormedVector {
    LatticeVector vector;
    Rational norm;
};

/// Fincke-Pohst enumeration over half the lattice (one of each ±v) inside vᵀAv <= bound.
/// The visitor may lower `bound` during the walk. Requires A positive definite.
class ShortVectorEnumerator {
public:
    explicit ShortVectorEnumerator(const QuadraticForm& form);

    using Visitor = std::function<void(const LatticeVector&, const Rational& norm, Rational& bound)>;
    void enumerate(Rational bound, const Visitor& visit) const;

private:
    std::size_t dim_;
    RationalMatrix lower_;
    RationalVector pivots_;
    std::vector<std::size_t> perm_;
};

MinimalVectorSet arithmeticalMinimum(const QuadraticForm& a);
/// All antipodal representatives with vᵀAv <= bound, sorted by (norm, vector).
std::vector<NormedVector> vectorsUpTo(const QuadraticForm& a, const Rational& bound);

bool isPerfect(const QuadraticForm& a);
bool isPerfect(const QuadraticForm& a, const MinimalVectorSet& min);
/// Rank of {v vᵀ : v ∈ Min(A)} in the space of symmetric matrices.
std::size_t perfectionRank(const QuadraticForm& a, const MinimalVectorSet& min);

struct EutaxyResult {
    bool eutactic = false;
    /// Optimal value of max t s.t. Σ λ_v v vᵀ = A⁻¹, λ_v >= t; absent when infeasible.
    bool feasible = false;
    Rational margin;
    /// λ_v aligned with MinimalVectorSet::vectors.
    RationalVector coefficients;
};

EutaxyResult eutaxy(const QuadraticForm& a, const MinimalVectorSet& min);
bool isEutactic(const QuadraticForm& a);
bool isExtreme(const QuadraticForm& a);

/// γ(A)^d = λ(A)^d / det(A).
Rational hermitePower(const QuadraticForm& a);
Rational hermitePower(const QuadraticForm& a, const Rational& minimum);

/// Root lattice and identity Gram matrices: "A<n>", "D<n>", "E6", "E7", "E8", "I<n>"
/// (an underscore after the letter is accepted).
QuadraticForm catalogForm(const std::string& name);

/// (2 / λ(A)) · A.
QuadraticForm normalizeScale(const QuadraticForm& a);
QuadraticForm normalizeScale(const QuadraticForm& a, const Rational& minimum);
/// Positive integer multiple of A with entries of gcd 1.
std::vector<IntegerVector> primitiveIntegerGram(const QuadraticForm& a);

/// Form file: first line d, then d rows of d rationals ("p/q" or integers).
QuadraticForm parseForm(std::istream& in);
QuadraticForm readFormFile(const std::string& path);
std::string formatForm(const QuadraticForm& a);

/// Throws NotPositiveDefinite unless A is positive definite.
void requirePositiveDefinite(const QuadraticForm& a, const char* what);

} // namespace pf
