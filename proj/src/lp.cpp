#include "pf/lp.hpp"

#include <optional>

namespace pf {

namespace {

class Tableau {
public:
    // Columns: structural [0, n), artificial [n, n + m). Last column of `rhs_` is b.
    Tableau(const RationalMatrix& a, const RationalVector& b)
        : m_(a.rows()), n_(a.cols()), t_(a.rows(), a.cols() + a.rows()), rhs_(b), basis_(a.rows()) {
        for (std::size_t i = 0; i < m_; ++i) {
            for (std::size_t j = 0; j < n_; ++j) t_(i, j) = a(i, j);
            t_(i, n_ + i) = 1;
            basis_[i] = n_ + i;
        }
    }

    std::size_t rows() const { return m_; }
    std::size_t structural() const { return n_; }
    const std::vector<std::size_t>& basis() const { return basis_; }
    const Rational& rhs(std::size_t i) const { return rhs_[i]; }
    const Rational& at(std::size_t i, std::size_t j) const { return t_(i, j); }

    // y = c_Bᵀ B⁻¹, read off the artificial block.
    RationalVector duals(const RationalVector& cost) const {
        RationalVector y(m_);
        for (std::size_t i = 0; i < m_; ++i) {
            const Rational& cb = cost[basis_[i]];
            if (sgn(cb) == 0) continue;
            for (std::size_t k = 0; k < m_; ++k) y[k] += cb * t_(i, n_ + k);
        }
        return y;
    }

    // c_j - c_Bᵀ T_j
    Rational reducedCost(const RationalVector& cost, std::size_t j) const {
        Rational r = cost[j];
        for (std::size_t i = 0; i < m_; ++i)
            if (sgn(t_(i, j)) != 0) r -= cost[basis_[i]] * t_(i, j);
        return r;
    }

    void pivot(std::size_t row, std::size_t col) {
        Rational inv = 1 / t_(row, col);
        for (std::size_t j = 0; j < t_.cols(); ++j)
            if (sgn(t_(row, j)) != 0) t_(row, j) *= inv;
        rhs_[row] *= inv;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == row || sgn(t_(i, col)) == 0) continue;
            Rational f = t_(i, col);
            for (std::size_t j = 0; j < t_.cols(); ++j)
                if (sgn(t_(row, j)) != 0) t_(i, j) -= f * t_(row, j);
            rhs_[i] -= f * rhs_[row];
        }
        basis_[row] = col;
    }

    enum class Result { Optimal, Unbounded };

    // Bland's rule simplex over columns allowed by `allowed`.
    Result run(const RationalVector& cost, const std::vector<bool>& allowed, std::size_t& unboundedColumn) {
        while (true) {
            std::optional<std::size_t> entering;
            for (std::size_t j = 0; j < t_.cols(); ++j) {
                if (!allowed[j] || isBasic(j)) continue;
                if (sgn(reducedCost(cost, j)) > 0) {
                    entering = j;
                    break;
                }
            }
            if (!entering) return Result::Optimal;
            std::optional<std::size_t> leaving;
            Rational best;
            for (std::size_t i = 0; i < m_; ++i) {
                if (sgn(t_(i, *entering)) <= 0) continue;
                Rational ratio = rhs_[i] / t_(i, *entering);
                if (!leaving || ratio < best || (ratio == best && basis_[i] < basis_[*leaving])) {
                    leaving = i;
                    best = ratio;
                }
            }
            if (!leaving) {
                unboundedColumn = *entering;
                return Result::Unbounded;
            }
            pivot(*leaving, *entering);
        }
    }

    bool isBasic(std::size_t j) const {
        for (auto b : basis_)
            if (b == j) return true;
        return false;
    }

private:
    std::size_t m_, n_;
    RationalMatrix t_;
    RationalVector rhs_;
    std::vector<std::size_t> basis_;
};

} // namespace

LpOutcome lpSolve(const LpProblem& p) {
    const std::size_t nv = p.variableCount();
    if (p.nonnegative.size() != nv) throw PreconditionError("lpSolve: nonnegativity flags length mismatch");
    if (p.equalities.size() != p.equalityRhs.size() || p.inequalities.size() != p.inequalityRhs.size())
        throw PreconditionError("lpSolve: row/rhs count mismatch");
    for (const auto& r : p.equalities)
        if (r.size() != nv) throw PreconditionError("lpSolve: equality row length mismatch");
    for (const auto& r : p.inequalities)
        if (r.size() != nv) throw PreconditionError("lpSolve: inequality row length mismatch");

    // Standard-form columns: one per nonnegative variable, two per free variable, one slack
    // per inequality row.
    std::vector<std::size_t> plusCol(nv), minusCol(nv, SIZE_MAX);
    std::size_t cols = 0;
    for (std::size_t j = 0; j < nv; ++j) {
        plusCol[j] = cols++;
        if (!p.nonnegative[j]) minusCol[j] = cols++;
    }
    const std::size_t firstSlack = cols;
    cols += p.inequalities.size();
    const std::size_t rows = p.equalities.size() + p.inequalities.size();

    RationalMatrix a(rows, cols);
    RationalVector b(rows);
    std::vector<int> flip(rows, 1);
    for (std::size_t i = 0; i < rows; ++i) {
        const bool eq = i < p.equalities.size();
        const RationalVector& row = eq ? p.equalities[i] : p.inequalities[i - p.equalities.size()];
        b[i] = eq ? p.equalityRhs[i] : p.inequalityRhs[i - p.equalities.size()];
        for (std::size_t j = 0; j < nv; ++j) {
            a(i, plusCol[j]) = row[j];
            if (minusCol[j] != SIZE_MAX) a(i, minusCol[j]) = -row[j];
        }
        if (!eq) a(i, firstSlack + (i - p.equalities.size())) = 1;
        if (sgn(b[i]) < 0) {
            flip[i] = -1;
            b[i] = -b[i];
            for (std::size_t j = 0; j < cols; ++j) a(i, j) = -a(i, j);
        }
    }

    Tableau tab(a, b);
    const std::size_t total = cols + rows;
    std::size_t unboundedColumn = 0;

    // Phase 1: maximize -Σ artificials.
    RationalVector phase1(total);
    for (std::size_t i = 0; i < rows; ++i) phase1[cols + i] = -1;
    std::vector<bool> all(total, true);
    tab.run(phase1, all, unboundedColumn);
    Rational infeas = 0;
    for (std::size_t i = 0; i < rows; ++i)
        if (tab.basis()[i] >= cols) infeas += tab.rhs(i);

    LpOutcome out;
    if (sgn(infeas) > 0) {
        RationalVector y = tab.duals(phase1);
        for (std::size_t i = 0; i < rows; ++i) y[i] *= flip[i];
        out.status = LpStatus::Infeasible;
        out.certificate = std::move(y);
        return out;
    }
    // Drive zero-level artificials out of the basis where possible.
    for (std::size_t i = 0; i < rows; ++i) {
        if (tab.basis()[i] < cols) continue;
        for (std::size_t j = 0; j < cols; ++j)
            if (sgn(tab.at(i, j)) != 0 && !tab.isBasic(j)) {
                tab.pivot(i, j);
                break;
            }
    }

    RationalVector cost(total);
    for (std::size_t j = 0; j < nv; ++j) {
        cost[plusCol[j]] = p.objective[j];
        if (minusCol[j] != SIZE_MAX) cost[minusCol[j]] = -p.objective[j];
    }
    std::vector<bool> structuralOnly(total, false);
    for (std::size_t j = 0; j < cols; ++j) structuralOnly[j] = true;
    auto result = tab.run(cost, structuralOnly, unboundedColumn);

    RationalVector x(cols);
    for (std::size_t i = 0; i < rows; ++i)
        if (tab.basis()[i] < cols) x[tab.basis()[i]] = tab.rhs(i);
    auto toOriginal = [&](const RationalVector& v) {
        RationalVector o(nv);
        for (std::size_t j = 0; j < nv; ++j) {
            o[j] = v[plusCol[j]];
            if (minusCol[j] != SIZE_MAX) o[j] -= v[minusCol[j]];
        }
        return o;
    };
    out.primalSolution = toOriginal(x);
    out.value = dot(p.objective, out.primalSolution);

    if (result == Tableau::Result::Unbounded) {
        RationalVector d(cols);
        d[unboundedColumn] = 1;
        for (std::size_t i = 0; i < rows; ++i)
            if (tab.basis()[i] < cols) d[tab.basis()[i]] = -tab.at(i, unboundedColumn);
        out.status = LpStatus::Unbounded;
        out.certificate = toOriginal(d);
        return out;
    }
    RationalVector y = tab.duals(cost);
    for (std::size_t i = 0; i < rows; ++i) y[i] *= flip[i];
    out.status = LpStatus::Optimal;
    out.certificate = std::move(y);
    return out;
}

} // namespace pf
