#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sparse_bandit/errors.hpp"

namespace sparse_bandit {

// minimize objective . x  subject to  constraints * x >= lower_bounds,  x >= 0.
template <typename Scalar>
struct LpProblem {
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    Vec objective;
    Mat constraints;
    Vec lower_bounds;

    Eigen::Index num_variables() const { return objective.size(); }
    Eigen::Index num_constraints() const { return constraints.rows(); }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

template <typename Scalar>
struct LpSolution {
    typename LpProblem<Scalar>::Vec coefficients;
    Scalar objective_value{};
    LpStatus status = LpStatus::Infeasible;
    int iterations = 0;
};

namespace detail {

// Dense tableau. The last column is the right-hand side, the last row the
// reduced costs (its rhs entry holds minus the current objective).
template <typename Scalar>
class Tableau {
public:
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    Tableau(Eigen::Index rows, Eigen::Index cols) : t_(Mat::Zero(rows + 1, cols + 1)), basis_(rows) {}

    Eigen::Index rows() const { return t_.rows() - 1; }
    Eigen::Index cols() const { return t_.cols() - 1; }
    Scalar& at(Eigen::Index r, Eigen::Index c) { return t_(r, c); }
    Scalar at(Eigen::Index r, Eigen::Index c) const { return t_(r, c); }
    Scalar& rhs(Eigen::Index r) { return t_(r, cols()); }
    Scalar rhs(Eigen::Index r) const { return t_(r, cols()); }
    auto cost_row() { return t_.row(rows()); }
    auto row(Eigen::Index r) { return t_.row(r); }
    std::vector<Eigen::Index>& basis() { return basis_; }
    const std::vector<Eigen::Index>& basis() const { return basis_; }

    void pivot(Eigen::Index r, Eigen::Index c) {
        const Scalar p = t_(r, c);
        t_.row(r) /= p;
        for (Eigen::Index i = 0; i < t_.rows(); ++i) {
            if (i == r) continue;
            const Scalar factor = t_(i, c);
            if (factor != Scalar(0)) t_.row(i) -= factor * t_.row(r);
        }
        t_(r, c) = Scalar(1);
        basis_[static_cast<std::size_t>(r)] = c;
    }

private:
    Mat t_;
    std::vector<Eigen::Index> basis_;
};

enum class PhaseOutcome { Optimal, Unbounded };

// Bland's rule: lowest-index improving column, ratio ties to the lowest
// basic index. `allowed(c)` filters entering columns. A column with no
// admissible pivot whose reduced cost is within `noise` of zero is rounding
// residue and is skipped; in a bounded phase every such column is skipped.
template <typename Scalar, typename Allowed>
PhaseOutcome run_simplex(Tableau<Scalar>& tab, Allowed allowed, Scalar tol, Scalar noise, bool bounded,
                         int& iterations, int max_iterations) {
    const Eigen::Index m = tab.rows();
    while (true) {
        bool pivoted = false;
        for (Eigen::Index entering = 0; entering < tab.cols() && !pivoted; ++entering) {
            if (!allowed(entering) || !(tab.at(m, entering) < -tol)) continue;

            Eigen::Index leaving = -1;
            Scalar best_ratio = std::numeric_limits<Scalar>::infinity();
            for (Eigen::Index r = 0; r < m; ++r) {
                const Scalar a = tab.at(r, entering);
                if (a <= tol) continue;
                const Scalar ratio = tab.rhs(r) / a;
                if (leaving < 0) {
                    leaving = r;
                    best_ratio = ratio;
                    continue;
                }
                const Scalar slack = tol * (Scalar(1) + std::abs(best_ratio));
                if (ratio < best_ratio - slack ||
                    (ratio <= best_ratio + slack &&
                     tab.basis()[static_cast<std::size_t>(r)] < tab.basis()[static_cast<std::size_t>(leaving)])) {
                    leaving = r;
                    best_ratio = ratio;
                }
            }
            if (leaving < 0) {
                if (bounded || tab.at(m, entering) > -noise) continue;
                return PhaseOutcome::Unbounded;
            }
            tab.pivot(leaving, entering);
            pivoted = true;
            if (++iterations > max_iterations) {
                throw BanditError(ErrorCode::NumericalFailure,
                                  "simplex exceeded " + std::to_string(max_iterations) + " pivots");
            }
        }
        if (!pivoted) return PhaseOutcome::Optimal;
    }
}

}  // namespace detail

// Pivot and optimality tolerance on the equilibrated problem.
template <typename Scalar>
Scalar default_lp_tolerance() {
    using std::cbrt;
    const Scalar eps = std::numeric_limits<Scalar>::epsilon();
    return cbrt(eps * eps);
}

// Dense two-phase simplex with Bland's anti-cycling rule on a row- and
// column-equilibrated copy of the problem. Infeasible and unbounded problems
// are reported through the status; numerical breakdown (pivot cap, or an
// "optimal" point that violates the constraints) throws.
template <typename Scalar>
LpSolution<Scalar> solve_lp(const LpProblem<Scalar>& problem) {
    using std::abs;
    using std::sqrt;
    using Vec = typename LpProblem<Scalar>::Vec;
    using Mat = typename LpProblem<Scalar>::Mat;
    const Eigen::Index n = problem.num_variables();
    const Eigen::Index m = problem.num_constraints();
    if (problem.constraints.cols() != n || problem.lower_bounds.size() != m) {
        throw BanditError(ErrorCode::LengthMismatch, "LP dimensions disagree");
    }
    const Scalar tol = default_lp_tolerance<Scalar>();
    const Scalar noise = sqrt(std::numeric_limits<Scalar>::epsilon());

    // Equilibrate: rows, then columns, to unit max-abs; x = col_scale .* y.
    Mat a = problem.constraints;
    Vec b = problem.lower_bounds;
    for (Eigen::Index r = 0; r < m; ++r) {
        const Scalar big = n > 0 ? a.row(r).cwiseAbs().maxCoeff() : Scalar(0);
        if (big > Scalar(0)) {
            a.row(r) /= big;
            b[r] /= big;
        }
    }
    Vec col_scale = Vec::Ones(n);
    for (Eigen::Index c = 0; c < n; ++c) {
        const Scalar big = m > 0 ? a.col(c).cwiseAbs().maxCoeff() : Scalar(0);
        if (big > Scalar(0)) {
            col_scale[c] = Scalar(1) / big;
            a.col(c) /= big;
        }
    }
    Vec cost = problem.objective.cwiseProduct(col_scale);
    const Scalar cost_scale = n > 0 ? cost.cwiseAbs().maxCoeff() : Scalar(0);
    if (cost_scale > Scalar(0)) cost /= cost_scale;

    // Columns: [y (n) | surplus/slack (m) | artificial (one per row with b >= 0)].
    std::vector<Eigen::Index> artificial_of_row(static_cast<std::size_t>(m), -1);
    Eigen::Index num_artificial = 0;
    for (Eigen::Index r = 0; r < m; ++r) {
        if (b[r] >= Scalar(0)) artificial_of_row[static_cast<std::size_t>(r)] = n + m + num_artificial++;
    }
    const Eigen::Index first_artificial = n + m;
    detail::Tableau<Scalar> tab(m, n + m + num_artificial);

    for (Eigen::Index r = 0; r < m; ++r) {
        const auto art = artificial_of_row[static_cast<std::size_t>(r)];
        const Scalar sign = art >= 0 ? Scalar(1) : Scalar(-1);
        tab.row(r).head(n) = sign * a.row(r);
        tab.rhs(r) = sign * b[r];
        if (art >= 0) {
            tab.at(r, n + r) = Scalar(-1);
            tab.at(r, art) = Scalar(1);
            tab.basis()[static_cast<std::size_t>(r)] = art;
        } else {
            tab.at(r, n + r) = Scalar(1);
            tab.basis()[static_cast<std::size_t>(r)] = n + r;
        }
    }

    LpSolution<Scalar> out;
    const int max_iterations = 200 * static_cast<int>(n + 2 * m + 10);

    // Phase 1: minimize the sum of artificials.
    if (num_artificial > 0) {
        auto cost_row = tab.cost_row();
        cost_row.setZero();
        for (Eigen::Index r = 0; r < m; ++r) {
            if (artificial_of_row[static_cast<std::size_t>(r)] >= 0) cost_row -= tab.row(r);
        }
        for (Eigen::Index c = first_artificial; c < tab.cols(); ++c) tab.at(m, c) = Scalar(0);
        detail::run_simplex(tab, [](Eigen::Index) { return true; }, tol, noise, true, out.iterations,
                            max_iterations);

        const Scalar infeasibility = -tab.rhs(m);
        const Scalar scale = Scalar(1) + b.cwiseAbs().sum();
        if (infeasibility > noise * scale) {
            out.status = LpStatus::Infeasible;
            return out;
        }
        // Drive zero-valued artificials out of the basis; rows where that is
        // impossible are redundant and stay inert.
        for (Eigen::Index r = 0; r < m; ++r) {
            if (tab.basis()[static_cast<std::size_t>(r)] < first_artificial) continue;
            Eigen::Index best = -1;
            for (Eigen::Index c = 0; c < first_artificial; ++c) {
                if (abs(tab.at(r, c)) > tol && (best < 0 || abs(tab.at(r, c)) > abs(tab.at(r, best)))) best = c;
            }
            if (best >= 0) tab.pivot(r, best);
        }
    }

    // Phase 2: original costs, priced out against the current basis.
    {
        auto cost_row = tab.cost_row();
        cost_row.setZero();
        cost_row.head(n) = cost.transpose();
        for (Eigen::Index r = 0; r < m; ++r) {
            const auto basic = tab.basis()[static_cast<std::size_t>(r)];
            if (basic < n && cost[basic] != Scalar(0)) cost_row -= cost[basic] * tab.row(r);
        }
    }
    const auto outcome = detail::run_simplex(
        tab, [first_artificial](Eigen::Index c) { return c < first_artificial; }, tol, noise, false,
        out.iterations, max_iterations);
    if (outcome == detail::PhaseOutcome::Unbounded) {
        out.status = LpStatus::Unbounded;
        return out;
    }

    out.coefficients = Vec::Zero(n);
    for (Eigen::Index r = 0; r < m; ++r) {
        const auto basic = tab.basis()[static_cast<std::size_t>(r)];
        if (basic < n) out.coefficients[basic] = std::max(tab.rhs(r), Scalar(0)) * col_scale[basic];
    }
    out.objective_value = problem.objective.dot(out.coefficients);
    out.status = LpStatus::Optimal;

    // Optimal => every row holds to 1e-9 relative.
    const Vec lhs = problem.constraints * out.coefficients;
    for (Eigen::Index r = 0; r < m; ++r) {
        const Scalar bound = problem.lower_bounds[r];
        const Scalar row_scale = Scalar(1) + abs(bound) + problem.constraints.row(r).cwiseAbs().dot(out.coefficients);
        if (lhs[r] < bound - Scalar(1e-9) * row_scale) {
            throw BanditError(ErrorCode::NumericalFailure,
                              "row " + std::to_string(r) + " violated by " +
                                  std::to_string(static_cast<double>(bound - lhs[r])) + " after " +
                                  std::to_string(out.iterations) + " pivots");
        }
    }
    return out;
}

}  // namespace sparse_bandit
