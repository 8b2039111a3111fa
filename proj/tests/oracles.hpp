#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls into the library's lower-bound or simplex code.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sparse_bandit/simplex.hpp"

namespace oracle {

// Relaxed LP value by direct minimization over lambda = 2 mu_1^2 c_j.
// For fixed lambda every bad arm takes c_j = lambda / (2 mu_1^2) and each
// good arm the smallest feasible c_i = max(1 / (2 D^2), (1 - lambda) / (2 e^2)).
// The objective is convex piecewise linear in lambda on [0, 1], so checking
// 0, 1 and every breakpoint 1 - e^2 / D^2 inside (0, 1) finds the minimum.
inline double lambda_objective(const std::vector<double>& mu, std::size_t s, const std::vector<double>& eff,
                               double lambda) {
    const double mu1 = mu[0];
    double value = static_cast<double>(mu.size() - s) * lambda / (2.0 * mu1);
    for (std::size_t i = 1; i < s; ++i) {
        const double gap = mu1 - mu[i];
        if (gap <= 0.0) continue;
        const double c = std::max(1.0 / (2.0 * gap * gap), (1.0 - lambda) / (2.0 * eff[i] * eff[i]));
        value += gap * c;
    }
    return value;
}

inline double relaxed_lp_value(const std::vector<double>& mu, std::size_t s, double epsilon = 0.0) {
    std::vector<double> eff(mu.begin(), mu.begin() + static_cast<std::ptrdiff_t>(s));
    if (epsilon > 0.0) {
        const double mus = mu[s - 1];
        for (double& e : eff) e = e - mus + epsilon;
    }
    if (mu.size() == s) {
        // No bad arms: nothing couples the good arms.
        return lambda_objective(mu, s, eff, 1.0);
    }
    std::vector<double> candidates{0.0, 1.0};
    for (std::size_t i = 1; i < s; ++i) {
        const double gap = mu[0] - mu[i];
        if (gap <= 0.0) continue;
        const double theta = 1.0 - eff[i] * eff[i] / (gap * gap);
        if (theta > 0.0 && theta < 1.0) candidates.push_back(theta);
    }
    double best = std::numeric_limits<double>::infinity();
    for (double lambda : candidates) best = std::min(best, lambda_objective(mu, s, eff, lambda));
    return best;
}

inline double classical(const std::vector<double>& mu) {
    double total = 0.0;
    for (double m : mu) {
        if (mu[0] - m > 0.0) total += 1.0 / (2.0 * (mu[0] - m));
    }
    return total;
}

// Sign of (d - s) / mu_1 - sum_{i <= s, D_i > 0} D_i / mu_i^2.
inline double regime_margin(const std::vector<double>& mu, std::size_t s) {
    double sum = 0.0;
    for (std::size_t i = 1; i < s; ++i) {
        const double gap = mu[0] - mu[i];
        if (gap > 0.0) sum += gap / (mu[i] * mu[i]);
    }
    return static_cast<double>(mu.size() - s) / mu[0] - sum;
}

// Sorted nonincreasing instance: s good arms with distinct means in
// (0, mu_1], the rest exactly 0.
inline std::vector<double> random_instance(std::mt19937_64& rng, std::size_t d_max, std::size_t& s_out) {
    std::uniform_int_distribution<std::size_t> pick_d(1, d_max);
    const std::size_t d = pick_d(rng);
    std::uniform_int_distribution<std::size_t> pick_s(1, d);
    const std::size_t s = pick_s(rng);
    std::uniform_real_distribution<double> pick_mu1(0.2, 1.0);
    const double mu1 = pick_mu1(rng);
    std::uniform_real_distribution<double> frac(0.01, 0.99);

    std::vector<double> mu{mu1};
    while (mu.size() < s) {
        const double candidate = mu1 * frac(rng);
        bool distinct = true;
        for (double m : mu) distinct = distinct && std::abs(m - candidate) > 1e-3;
        if (distinct) mu.push_back(candidate);
    }
    std::sort(mu.begin() + 1, mu.end(), std::greater<>());
    mu.resize(d, 0.0);
    s_out = s;
    return mu;
}

// Random LP  min c.x  s.t. A x >= b, x >= 0  with a planted optimal vertex:
// complementary slackness holds by construction for (x*, y*), so
// c.x* = b.y* is the optimum.
struct PlantedLp {
    sparse_bandit::LpProblem<double> problem;
    Eigen::VectorXd x;
    double value = 0.0;
};

inline PlantedLp planted_lp(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> coeff(-1.0, 2.0);
    PlantedLp out;
    Eigen::MatrixXd a(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) a(r, c) = coeff(rng);

    Eigen::VectorXd x = Eigen::VectorXd::Zero(cols);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(rows);
    for (Eigen::Index c = 0; c < cols; ++c)
        if (unit(rng) < 0.5) x[c] = 0.5 + unit(rng);
    for (Eigen::Index r = 0; r < rows; ++r)
        if (unit(rng) < 0.5) y[r] = 0.5 + unit(rng);

    Eigen::VectorXd b = a * x;
    for (Eigen::Index r = 0; r < rows; ++r)
        if (y[r] == 0.0) b[r] -= 0.5 + unit(rng);  // inactive rows get slack

    Eigen::VectorXd reduced = Eigen::VectorXd::Zero(cols);
    for (Eigen::Index c = 0; c < cols; ++c)
        if (x[c] == 0.0) reduced[c] = 0.5 + unit(rng);  // zero coordinates get positive reduced cost

    out.problem.objective = a.transpose() * y + reduced;
    out.problem.constraints = a;
    out.problem.lower_bounds = b;
    out.x = x;
    out.value = out.problem.objective.dot(x);
    return out;
}

// Ordinary least squares y = a + b x; returns slope and R^2.
struct Fit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

inline Fit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    Fit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
    return f;
}

inline std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline std::filesystem::path fresh_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() /
               ("sparse_bandit_" + name + "_" + std::to_string(std::random_device{}()));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace oracle
