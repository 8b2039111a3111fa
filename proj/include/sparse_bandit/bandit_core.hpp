#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sparse_bandit/errors.hpp"

namespace sparse_bandit {

using Vector = Eigen::VectorXd;
using CountVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

// Arms are 0-based in code; arm 0 is the best arm after canonical sorting.
using ArmIndex = std::size_t;

// Every replication owns one engine.
using Rng = std::mt19937_64;

enum class NoiseModel { GaussianQuarterVariance };

inline constexpr double kRewardStddev = 0.5;

// A sparse bandit instance in canonical form: means sorted nonincreasing,
// exactly `s` strictly positive means. Immutable after validate_instance().
class SparseBanditInstance {
public:
    const Vector& means() const noexcept { return means_; }
    const Vector& gaps() const noexcept { return gaps_; }
    std::size_t d() const noexcept { return static_cast<std::size_t>(means_.size()); }
    std::size_t s() const noexcept { return s_; }
    double best_mean() const noexcept { return means_[0]; }
    NoiseModel noise() const noexcept { return NoiseModel::GaussianQuarterVariance; }
    bool is_good(ArmIndex arm) const noexcept { return arm < s_; }

    // original_index()[k] is the position, in the caller's input, of sorted arm k.
    const std::vector<std::size_t>& original_index() const noexcept { return original_index_; }

    // True when every bad arm has mean exactly 0 (the lower-bound model).
    bool bad_arms_null() const noexcept;

private:
    friend SparseBanditInstance validate_instance(std::span<const double>, std::size_t);

    SparseBanditInstance() = default;

    Vector means_;
    Vector gaps_;
    std::size_t s_ = 0;
    std::vector<std::size_t> original_index_;
};

// Sorts `means` nonincreasing (stable, so equal means keep input order) and
// checks the sparsity structure.
SparseBanditInstance validate_instance(std::span<const double> means, std::size_t s);
SparseBanditInstance validate_instance(const Vector& means, std::size_t s);

// Gaussian draw with mean mu_arm and standard deviation 1/2.
double sample_reward(const SparseBanditInstance& instance, ArmIndex arm, Rng& rng);

// Sum_i Delta_i N_i.
double pseudo_regret(const SparseBanditInstance& instance, const CountVector& pull_counts);

// Empirical mean with the zero-sample convention Xbar(0) = 0.
inline double empirical_mean(double sum, std::int64_t count) noexcept {
    return count > 0 ? sum / static_cast<double>(count) : 0.0;
}

struct TrajectoryPoint {
    std::int64_t t;
    double regret;
};

// Pull counts and pseudo-regret of one replication. `checkpoints` must be
// strictly increasing; the regret after round t is stored when t is one.
class RegretLedger {
public:
    RegretLedger(const SparseBanditInstance& instance, std::vector<std::int64_t> checkpoints);

    void record(ArmIndex arm);

    const CountVector& pull_counts() const noexcept { return counts_; }
    std::int64_t rounds() const noexcept { return rounds_; }
    double cumulative_pseudo_regret() const;
    const std::vector<TrajectoryPoint>& trajectory() const noexcept { return trajectory_; }

private:
    Vector gaps_;
    CountVector counts_;
    std::int64_t rounds_ = 0;
    std::vector<std::int64_t> checkpoints_;
    std::size_t next_checkpoint_ = 0;
    std::vector<TrajectoryPoint> trajectory_;
};

}  // namespace sparse_bandit
