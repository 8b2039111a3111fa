#include "sparse_bandit/bandit_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace sparse_bandit {

bool SparseBanditInstance::bad_arms_null() const noexcept {
    for (std::size_t j = s_; j < d(); ++j) {
        if (means_[static_cast<Eigen::Index>(j)] != 0.0) return false;
    }
    return true;
}

SparseBanditInstance validate_instance(std::span<const double> means, std::size_t s) {
    if (means.empty()) throw BanditError(ErrorCode::EmptyInstance, "no arms given");
    const std::size_t d = means.size();
    if (s < 1 || s > d) {
        throw BanditError(ErrorCode::InvalidArgument,
                          "s=" + std::to_string(s) + " outside [1, " + std::to_string(d) + "]");
    }
    for (double m : means) {
        if (!std::isfinite(m)) throw BanditError(ErrorCode::InvalidArgument, "non-finite mean");
    }
    const auto positive = static_cast<std::size_t>(
        std::count_if(means.begin(), means.end(), [](double m) { return m > 0.0; }));
    if (positive != s) {
        throw BanditError(ErrorCode::SparsityMismatch,
                          std::to_string(positive) + " strictly positive means, expected s=" +
                              std::to_string(s));
    }

    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return means[a] > means[b]; });

    SparseBanditInstance inst;
    inst.means_.resize(static_cast<Eigen::Index>(d));
    for (std::size_t k = 0; k < d; ++k) inst.means_[static_cast<Eigen::Index>(k)] = means[order[k]];
    inst.gaps_ = (Vector::Constant(inst.means_.size(), inst.means_[0]) - inst.means_);
    inst.gaps_[0] = 0.0;
    inst.s_ = s;
    inst.original_index_ = std::move(order);
    return inst;
}

SparseBanditInstance validate_instance(const Vector& means, std::size_t s) {
    return validate_instance(std::span<const double>(means.data(), static_cast<std::size_t>(means.size())), s);
}

double sample_reward(const SparseBanditInstance& instance, ArmIndex arm, Rng& rng) {
    if (arm >= instance.d()) {
        throw BanditError(ErrorCode::IndexOutOfRange, "arm " + std::to_string(arm) + " of " +
                                                          std::to_string(instance.d()));
    }
    std::normal_distribution<double> noise(instance.means()[static_cast<Eigen::Index>(arm)],
                                           kRewardStddev);
    return noise(rng);
}

double pseudo_regret(const SparseBanditInstance& instance, const CountVector& pull_counts) {
    if (static_cast<std::size_t>(pull_counts.size()) != instance.d()) {
        throw BanditError(ErrorCode::LengthMismatch, "pull_counts has " +
                                                         std::to_string(pull_counts.size()) +
                                                         " entries, instance has " +
                                                         std::to_string(instance.d()));
    }
    return instance.gaps().dot(pull_counts.cast<double>());
}

RegretLedger::RegretLedger(const SparseBanditInstance& instance, std::vector<std::int64_t> checkpoints)
    : gaps_(instance.gaps()),
      counts_(CountVector::Zero(static_cast<Eigen::Index>(instance.d()))),
      checkpoints_(std::move(checkpoints)) {
    for (std::size_t i = 1; i < checkpoints_.size(); ++i) {
        if (checkpoints_[i] <= checkpoints_[i - 1]) {
            throw BanditError(ErrorCode::InvalidArgument, "checkpoints must be strictly increasing");
        }
    }
    trajectory_.reserve(checkpoints_.size());
}

void RegretLedger::record(ArmIndex arm) {
    if (arm >= static_cast<std::size_t>(gaps_.size())) {
        throw BanditError(ErrorCode::IndexOutOfRange, "arm " + std::to_string(arm));
    }
    ++counts_[static_cast<Eigen::Index>(arm)];
    ++rounds_;
    if (next_checkpoint_ < checkpoints_.size() && checkpoints_[next_checkpoint_] == rounds_) {
        trajectory_.push_back({rounds_, cumulative_pseudo_regret()});
        ++next_checkpoint_;
    }
}

double RegretLedger::cumulative_pseudo_regret() const {
    return gaps_.dot(counts_.cast<double>());
}

}  // namespace sparse_bandit
