#include "sparse_bandit/policies.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sparse_bandit {

std::string_view to_string(Phase phase) {
    switch (phase) {
        case Phase::RoundRobin: return "round-robin";
        case Phase::ForceLog: return "force-log";
        case Phase::Ucb: return "ucb";
    }
    return "?";
}

std::string_view to_string(EventClass event) {
    switch (event) {
        case EventClass::R: return "R";
        case EventClass::F: return "F";
        case EventClass::U: return "U";
        case EventClass::V: return "V";
        case EventClass::A: return "A";
        case EventClass::None: return "none";
    }
    return "?";
}

void PolicyConfig::validate() const {
    if (s < 1) throw BanditError(ErrorCode::InvalidArgument, "policy sparsity s must be >= 1");
    if (forcelog_variant == ForceLogVariant::HorizonAware && horizon < 1) {
        throw BanditError(ErrorCode::InvalidArgument, "HorizonAware force-log needs horizon >= 1");
    }
}

SparseUcbState::SparseUcbState(std::size_t d)
    : counts(CountVector::Zero(static_cast<Eigen::Index>(d))),
      sums(Vector::Zero(static_cast<Eigen::Index>(d))) {
    if (d == 0) throw BanditError(ErrorCode::EmptyInstance, "policy state needs d >= 1");
}

Eigen::ArrayXd SparseUcbState::means() const {
    const Eigen::ArrayXd n = counts.cast<double>().array();
    return (n > 0.0).select(sums.array() / n, 0.0);
}

namespace {

void require_initialized(const SparseUcbState& state) {
    if ((state.counts.array() < 1).any()) {
        throw BanditError(ErrorCode::NotInitialized,
                          "J(t)/K(t) need every arm pulled at least once (t=" +
                              std::to_string(state.t) + ")");
    }
}

void require_arm(const SparseUcbState& state, ArmIndex arm) {
    if (arm >= state.d()) {
        throw BanditError(ErrorCode::IndexOutOfRange,
                          "arm " + std::to_string(arm) + " of " + std::to_string(state.d()));
    }
}

ArmIndex argmax_lowest(const Eigen::ArrayXd& score, const ArmMask& eligible) {
    std::optional<ArmIndex> best;
    for (Eigen::Index i = 0; i < score.size(); ++i) {
        if (!eligible[i]) continue;
        if (!best || score[i] > score[static_cast<Eigen::Index>(*best)]) best = static_cast<ArmIndex>(i);
    }
    if (!best) throw BanditError(ErrorCode::InvariantViolation, "argmax over an empty arm set");
    return *best;
}

}  // namespace

ArmSet members(const ArmMask& mask) {
    ArmSet out;
    for (Eigen::Index i = 0; i < mask.size(); ++i) {
        if (mask[i]) out.push_back(static_cast<ArmIndex>(i));
    }
    return out;
}

ArmMask active_mask(const SparseUcbState& state) {
    require_initialized(state);
    const Eigen::ArrayXd n = state.counts.cast<double>().array();
    return state.means() >= 2.0 * (n.log() / n).sqrt();
}

ArmSet active_set(const SparseUcbState& state) { return members(active_mask(state)); }

ArmMask sufficiently_sampled_mask(const SparseUcbState& state, const PolicyConfig& config) {
    require_initialized(state);
    const Eigen::ArrayXd n = state.counts.cast<double>().array();
    if (config.forcelog_variant == ForceLogVariant::HorizonAware) {
        const Eigen::ArrayXd log_ratio =
            (static_cast<double>(config.horizon) / n).log().max(0.0);
        return active_mask(state) && (state.means() >= 2.0 * (log_ratio / n).sqrt());
    }
    const double log_t = std::log(static_cast<double>(state.t));
    return state.means() >= 2.0 * (log_t / n).sqrt();
}

ArmSet sufficiently_sampled_set(const SparseUcbState& state, const PolicyConfig& config) {
    return members(sufficiently_sampled_mask(state, config));
}

Eigen::ArrayXd ucb_indices(const SparseUcbState& state) {
    require_initialized(state);
    const Eigen::ArrayXd n = state.counts.cast<double>().array();
    const double log_t = std::log(static_cast<double>(state.t));
    return state.means() + 2.0 * (log_t / n).sqrt();
}

Decision sparse_ucb_select(const SparseUcbState& state, const PolicyConfig& config) {
    const auto d = state.d();
    if (config.s > d) {
        throw BanditError(ErrorCode::InvalidArgument,
                          "s=" + std::to_string(config.s) + " exceeds d=" + std::to_string(d));
    }
    if (state.t <= static_cast<std::int64_t>(d)) {
        return {static_cast<ArmIndex>(state.t - 1), Phase::RoundRobin};
    }
    if (state.rr_remaining > 0) return {state.rr_next, Phase::RoundRobin};

    const ArmMask active = active_mask(state);
    if (static_cast<std::size_t>(active.count()) < config.s) return {0, Phase::RoundRobin};

    const ArmMask sampled = sufficiently_sampled_mask(state, config);
    if (static_cast<std::size_t>(sampled.count()) < config.s) {
        const ArmMask pending = active && !sampled;
        for (Eigen::Index i = 0; i < pending.size(); ++i) {
            if (pending[i]) return {static_cast<ArmIndex>(i), Phase::ForceLog};
        }
        throw BanditError(ErrorCode::InvariantViolation,
                          "|J| >= s > |K| but J \\ K is empty at t=" + std::to_string(state.t));
    }
    return {argmax_lowest(ucb_indices(state), sampled), Phase::Ucb};
}

ArmIndex ucb_select(const SparseUcbState& state) {
    return argmax_lowest(ucb_indices(state), ArmMask::Constant(state.counts.size(), true));
}

void update(SparseUcbState& state, ArmIndex arm, double reward) {
    require_arm(state, arm);
    const auto i = static_cast<Eigen::Index>(arm);
    state.counts[i] += 1;
    state.sums[i] += reward;
    state.t += 1;
}

void update(SparseUcbState& state, ArmIndex arm, double reward, Phase phase) {
    const bool after_init = state.t > static_cast<std::int64_t>(state.d());
    update(state, arm, reward);
    state.last_phase = phase;
    if (phase != Phase::RoundRobin || !after_init) return;
    if (state.rr_remaining == 0) {
        state.rr_remaining = state.d() - 1;  // arm 0 opened a fresh sweep
    } else {
        state.rr_remaining -= 1;
    }
    state.rr_next = arm + 1;
}

EventClass classify_event(const SparseUcbState& before, ArmIndex arm, Phase phase,
                          const PolicyConfig& config) {
    require_arm(before, arm);
    if (phase == Phase::RoundRobin) return EventClass::R;
    if (arm >= config.s) return EventClass::A;
    if (phase == Phase::ForceLog) return EventClass::F;
    return sufficiently_sampled_mask(before, config)[0] ? EventClass::U : EventClass::V;
}

}  // namespace sparse_bandit
