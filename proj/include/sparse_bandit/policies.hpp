#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "sparse_bandit/bandit_core.hpp"

namespace sparse_bandit {

enum class Phase { RoundRobin, ForceLog, Ucb };

enum class EventClass { R, F, U, V, A, None };

std::string_view to_string(Phase phase);
std::string_view to_string(EventClass event);

enum class ForceLogVariant {
    Anytime,       // K threshold 2 sqrt(ln t / N_i)
    HorizonAware,  // K threshold 2 sqrt(ln(T / N_i) / N_i), needs the horizon T
};

enum class TieBreak { LowestIndex };

struct PolicyConfig {
    std::size_t s = 1;
    ForceLogVariant forcelog_variant = ForceLogVariant::Anytime;
    std::int64_t horizon = 0;  // used by HorizonAware only
    TieBreak tie_break = TieBreak::LowestIndex;

    void validate() const;
};

// Sufficient statistics of a policy run. `t` is the round about to be
// played (1-based), so counts.sum() == t - 1.
struct SparseUcbState {
    explicit SparseUcbState(std::size_t d);

    std::int64_t t = 1;
    CountVector counts;
    Vector sums;
    std::size_t rr_remaining = 0;  // pulls left in the running sweep
    ArmIndex rr_next = 0;
    std::optional<Phase> last_phase;

    std::size_t d() const noexcept { return static_cast<std::size_t>(counts.size()); }
    double mean(ArmIndex arm) const noexcept {
        const auto i = static_cast<Eigen::Index>(arm);
        return empirical_mean(sums[i], counts[i]);
    }
    Eigen::ArrayXd means() const;
};

using ArmMask = Eigen::Array<bool, Eigen::Dynamic, 1>;
using ArmSet = std::vector<ArmIndex>;  // ascending

ArmSet members(const ArmMask& mask);

// J(t): Xbar_i >= 2 sqrt(ln N_i / N_i). Needs every count >= 1.
ArmMask active_mask(const SparseUcbState& state);
ArmSet active_set(const SparseUcbState& state);

// K(t): Xbar_i >= 2 sqrt(ln t / N_i) for the anytime rule. The HorizonAware
// rule uses ln(T / N_i) and is intersected with J(t).
ArmMask sufficiently_sampled_mask(const SparseUcbState& state, const PolicyConfig& config = {});
ArmSet sufficiently_sampled_set(const SparseUcbState& state, const PolicyConfig& config = {});

// Xbar_i + 2 sqrt(ln t / N_i) for every arm.
Eigen::ArrayXd ucb_indices(const SparseUcbState& state);

struct Decision {
    ArmIndex arm;
    Phase phase;
};

Decision sparse_ucb_select(const SparseUcbState& state, const PolicyConfig& config);

// Classical UCB over all arms; rounds 1..d must have initialized every arm.
ArmIndex ucb_select(const SparseUcbState& state);

// Records one observation: counts, sums and t advance.
void update(SparseUcbState& state, ArmIndex arm, double reward);
// Same, and also advances round-robin bookkeeping for the decided phase.
void update(SparseUcbState& state, ArmIndex arm, double reward, Phase phase);

// Event class of pulling `arm` at the round described by `before`.
// Good arms (index < s): R / F / U / V; bad arms: R or A.
EventClass classify_event(const SparseUcbState& before, ArmIndex arm, Phase phase,
                          const PolicyConfig& config);

}  // namespace sparse_bandit
