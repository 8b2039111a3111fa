#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "sparse_bandit/bandit_core.hpp"
#include "sparse_bandit/simplex.hpp"

namespace sparse_bandit {

enum class SparsityRegime { Strong, Weak };

std::string_view to_string(SparsityRegime regime);

// Asymptotic lower bound on lim inf Reg(T) / ln T, with the optimal
// per-arm coefficients c (expected pulls per unit of ln T).
template <typename Scalar = double>
struct LowerBoundResult {
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    Scalar value{};
    SparsityRegime regime = SparsityRegime::Strong;
    std::optional<ArmIndex> k;  // critical index, set only when lambda > 0
    Scalar lambda{};
    Vec coefficients;
    std::vector<ArmIndex> s_star;
    Scalar lp_value = std::numeric_limits<Scalar>::quiet_NaN();  // NaN when not cross-checked
};

struct LowerBoundOptions {
    bool verify_with_lp = true;
};

// Sign test (d - s) / mu_1 - sum_{i in [s], Delta_i > 0} Delta_i / mu_i^2 > 0.
// Requires bad arms with mean exactly 0.
SparsityRegime sparsity_regime(const SparseBanditInstance& instance);

// Sum over all arms with positive gap of 1 / (2 Delta_i).
double classical_lower_bound(const SparseBanditInstance& instance);

// mu_s below this makes the sparsity information useless.
double irrelevance_threshold(std::size_t d, std::size_t s, double mu1);

namespace detail {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

inline void require_null_bad_arms(const SparseBanditInstance& instance) {
    if (!instance.bad_arms_null()) {
        throw BanditError(ErrorCode::NonzeroBadArm,
                          "the lower bound is stated for bad arms with mean exactly 0; "
                          "this instance has a strictly negative bad arm");
    }
}

// Good-arm means used in the denominators: mu_i, or mu_i - mu_s + eps.
template <typename Scalar>
Vec<Scalar> effective_means(const SparseBanditInstance& instance, std::optional<Scalar> epsilon) {
    const auto s = static_cast<Eigen::Index>(instance.s());
    Vec<Scalar> eff = instance.means().head(s).template cast<Scalar>();
    if (epsilon) {
        if (!(*epsilon > Scalar(0))) throw BanditError(ErrorCode::InvalidArgument, "epsilon must be > 0");
        eff.array() += *epsilon - eff[s - 1];
    }
    return eff;
}

// Relaxed LP over c_1..c_d:
//   2 c_i Delta_i^2 >= 1                 for good i with Delta_i > 0
//   2 c_j mu_1^2 + 2 c_i eff_i^2 >= 1    for the same i and every bad j
template <typename Scalar>
LpProblem<Scalar> relaxed_lp(const SparseBanditInstance& instance, const Vec<Scalar>& eff) {
    const auto d = static_cast<Eigen::Index>(instance.d());
    const auto s = static_cast<Eigen::Index>(instance.s());
    const Vec<Scalar> gaps = instance.gaps().template cast<Scalar>();
    const Scalar mu1 = static_cast<Scalar>(instance.best_mean());

    std::vector<Eigen::Index> positive;
    for (Eigen::Index i = 1; i < s; ++i) {
        if (gaps[i] > Scalar(0)) positive.push_back(i);
    }
    const auto g = static_cast<Eigen::Index>(positive.size());
    const Eigen::Index rows = g + (d - s) * g;

    LpProblem<Scalar> lp;
    lp.objective = gaps;
    lp.constraints = LpProblem<Scalar>::Mat::Zero(rows, d);
    lp.lower_bounds = Vec<Scalar>::Ones(rows);
    Eigen::Index r = 0;
    for (auto i : positive) lp.constraints(r++, i) = Scalar(2) * gaps[i] * gaps[i];
    for (auto i : positive) {
        for (Eigen::Index j = s; j < d; ++j) {
            lp.constraints(r, j) = Scalar(2) * mu1 * mu1;
            lp.constraints(r, i) = Scalar(2) * eff[i] * eff[i];
            ++r;
        }
    }
    return lp;
}

template <typename Scalar>
Scalar solved_value(const LpProblem<Scalar>& lp) {
    const auto sol = solve_lp(lp);
    if (sol.status != LpStatus::Optimal) {
        throw BanditError(ErrorCode::NumericalFailure,
                          sol.status == LpStatus::Infeasible ? "relaxed LP reported infeasible"
                                                             : "relaxed LP reported unbounded");
    }
    return sol.objective_value;
}

// Closed-form optimum of the relaxed LP. With lambda the common slack
// handed to bad arms (c_j = lambda / (2 mu_1^2)), the objective is convex
// and piecewise linear in lambda with breakpoints Theta_i = 1 - eff_i^2 /
// Delta_i^2; its minimum sits at Theta_k for the largest k whose tail sum
// (d - s) / mu_1 - sum_{i >= k} Delta_i / eff_i^2 is negative, or at 0.
template <typename Scalar>
LowerBoundResult<Scalar> closed_form(const SparseBanditInstance& instance, const Vec<Scalar>& eff,
                                     const LowerBoundOptions& options) {
    using std::abs;
    const auto d = static_cast<Eigen::Index>(instance.d());
    const auto s = static_cast<Eigen::Index>(instance.s());
    const Vec<Scalar> gaps = instance.gaps().template cast<Scalar>();
    const Scalar mu1 = static_cast<Scalar>(instance.best_mean());
    const Scalar bad = static_cast<Scalar>(d - s);

    // Good arms with positive gap form the contiguous block [first, s).
    Eigen::Index first = 1;
    while (first < s && !(gaps[first] > Scalar(0))) ++first;

    LowerBoundResult<Scalar> out;
    out.coefficients = Vec<Scalar>::Zero(d);
    for (Eigen::Index i = 0; i < s; ++i) {
        if (eff[i] >= gaps[i]) out.s_star.push_back(static_cast<ArmIndex>(i));
    }

    auto theta = [&](Eigen::Index i) { return Scalar(1) - (eff[i] * eff[i]) / (gaps[i] * gaps[i]); };
    auto weight = [&](Eigen::Index i) { return gaps[i] / (eff[i] * eff[i]); };

    Scalar total_weight(0);
    for (Eigen::Index i = first; i < s; ++i) total_weight += weight(i);
    out.regime = bad / mu1 - total_weight > Scalar(0) ? SparsityRegime::Strong : SparsityRegime::Weak;

    std::optional<Eigen::Index> kstar;
    {
        Scalar tail(0);
        for (Eigen::Index k = s - 1; k >= first; --k) {
            tail += weight(k);
            if (bad / mu1 - tail < Scalar(0)) {
                kstar = k;
                break;
            }
        }
    }

    if (!kstar || !(theta(*kstar) > Scalar(0))) {
        out.lambda = Scalar(0);
        out.value = Scalar(0);
        for (Eigen::Index i = first; i < s; ++i) {
            const Scalar e2 = eff[i] * eff[i];
            const Scalar g2 = gaps[i] * gaps[i];
            out.coefficients[i] = Scalar(1) / (Scalar(2) * std::min(g2, e2));
            out.value += std::max(Scalar(1) / (Scalar(2) * gaps[i]), gaps[i] / (Scalar(2) * e2));
        }
    } else {
        out.lambda = theta(*kstar);
        Eigen::Index k = first;
        while (theta(k) < out.lambda) ++k;
        out.k = static_cast<ArmIndex>(k);

        const Scalar ek2 = eff[k] * eff[k];
        const Scalar gk2 = gaps[k] * gaps[k];
        const Scalar keep = ek2 / gk2;  // 1 - lambda
        out.value = Scalar(0);
        for (Eigen::Index i = first; i <= k; ++i) out.value += Scalar(1) / (Scalar(2) * gaps[i]);
        for (Eigen::Index i = k + 1; i < s; ++i) {
            out.value += (ek2 / (eff[i] * eff[i])) * gaps[i] / (Scalar(2) * gk2);
        }
        out.value += bad / (Scalar(2) * mu1) * (Scalar(1) - keep);

        for (Eigen::Index i = first; i < k; ++i) out.coefficients[i] = Scalar(1) / (Scalar(2) * gaps[i] * gaps[i]);
        for (Eigen::Index i = k; i < s; ++i) out.coefficients[i] = keep / (Scalar(2) * eff[i] * eff[i]);
        for (Eigen::Index j = s; j < d; ++j) out.coefficients[j] = out.lambda / (Scalar(2) * mu1 * mu1);
    }

    const Scalar by_coefficients = out.coefficients.dot(gaps);
    if (abs(by_coefficients - out.value) > Scalar(1e-12) * (Scalar(1) + abs(out.value))) {
        throw BanditError(ErrorCode::InvariantViolation, "bound value disagrees with sum c_i Delta_i");
    }

    const auto lp = relaxed_lp(instance, eff);
    const Vec<Scalar> slack = lp.constraints * out.coefficients - lp.lower_bounds;
    if (slack.size() > 0 && slack.minCoeff() < Scalar(-1e-12)) {
        throw BanditError(ErrorCode::InvariantViolation, "closed-form coefficients violate an LP row");
    }

    if (options.verify_with_lp) {
        out.lp_value = solved_value(lp);
        if (abs(out.value - out.lp_value) > Scalar(1e-9) * (Scalar(1) + abs(out.lp_value))) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "closed form " << static_cast<double>(out.value) << " vs LP "
                << static_cast<double>(out.lp_value) << " (regime "
                << (out.regime == SparsityRegime::Strong ? "Strong" : "Weak") << ", lambda "
                << static_cast<double>(out.lambda) << ")";
            throw BanditError(ErrorCode::NoValidK, msg.str());
        }
    }
    return out;
}

}  // namespace detail

template <typename Scalar = double>
LpProblem<Scalar> build_relaxed_lp(const SparseBanditInstance& instance) {
    detail::require_null_bad_arms(instance);
    return detail::relaxed_lp(instance, detail::effective_means<Scalar>(instance, std::nullopt));
}

// Same LP with good-arm means shifted to mu_i - mu_s + epsilon.
template <typename Scalar = double>
LpProblem<Scalar> build_relaxed_lp(const SparseBanditInstance& instance, Scalar epsilon) {
    detail::require_null_bad_arms(instance);
    return detail::relaxed_lp(instance, detail::effective_means<Scalar>(instance, epsilon));
}

// LP-oracle route to the bound.
template <typename Scalar = double>
Scalar lp_lower_bound(const SparseBanditInstance& instance) {
    return detail::solved_value(build_relaxed_lp<Scalar>(instance));
}

template <typename Scalar = double>
Scalar lp_lower_bound(const SparseBanditInstance& instance, Scalar epsilon) {
    return detail::solved_value(build_relaxed_lp<Scalar>(instance, epsilon));
}

// Explicit solution of the relaxed LP. Every result is checked against the
// LP rows; with `verify_with_lp` also against solve_lp (NoValidK on mismatch).
template <typename Scalar = double>
LowerBoundResult<Scalar> explicit_lower_bound(const SparseBanditInstance& instance,
                                              const LowerBoundOptions& options = {}) {
    detail::require_null_bad_arms(instance);
    return detail::closed_form(instance, detail::effective_means<Scalar>(instance, std::nullopt), options);
}

// Bound for the wider class where only mu_i > mu_s - epsilon is known for
// good arms: every good-arm mu_i in a denominator becomes mu_i - mu_s + eps.
template <typename Scalar = double>
LowerBoundResult<Scalar> generalized_lower_bound(const SparseBanditInstance& instance, Scalar epsilon,
                                                 const LowerBoundOptions& options = {}) {
    detail::require_null_bad_arms(instance);
    return detail::closed_form(instance, detail::effective_means<Scalar>(instance, epsilon), options);
}

extern template LowerBoundResult<double> explicit_lower_bound<double>(const SparseBanditInstance&,
                                                                      const LowerBoundOptions&);
extern template LowerBoundResult<double> generalized_lower_bound<double>(const SparseBanditInstance&,
                                                                         double, const LowerBoundOptions&);

}  // namespace sparse_bandit
