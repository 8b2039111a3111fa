#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "sparse_bandit/bandit_core.hpp"
#include "sparse_bandit/policies.hpp"

namespace sparse_bandit {

enum class PolicyKind { Ucb, SparseUcb };

std::string_view to_string(PolicyKind kind);

struct ExperimentConfig {
    SparseBanditInstance instance;
    PolicyKind policy = PolicyKind::SparseUcb;
    PolicyConfig sparse_config;  // read only for SparseUcb
    std::int64_t horizon = 10000;
    std::size_t replications = 100;
    std::uint64_t base_seed = 0;
    std::vector<std::int64_t> checkpoints;  // empty: geometric_checkpoints(horizon)
    std::size_t threads = 0;                // 0: hardware concurrency; never affects results

    void validate() const;
    std::vector<std::int64_t> resolved_checkpoints() const;
};

// 1, then powers of `ratio` rounded up to the next integer, then T.
std::vector<std::int64_t> geometric_checkpoints(std::int64_t horizon, double ratio = 1.2);

// Counter-based seed of replication r; a pure function of (base_seed, r).
std::uint64_t replication_seed(std::uint64_t base_seed, std::uint64_t r);

inline constexpr int kEventClasses = 5;  // R, F, U, V, A
using EventMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, kEventClasses>;

inline int event_column(EventClass e) {
    switch (e) {
        case EventClass::R: return 0;
        case EventClass::F: return 1;
        case EventClass::U: return 2;
        case EventClass::V: return 3;
        case EventClass::A: return 4;
        case EventClass::None: break;
    }
    return -1;
}

struct ReplicationResult {
    CountVector final_counts;
    std::vector<TrajectoryPoint> regret_trajectory;
    EventMatrix event_counts;                       // d x {R, F, U, V, A}
    std::array<std::int64_t, 3> phase_round_counts{};  // round-robin, force-log, ucb
    double final_regret = 0.0;

    // R+F+U+V = N_i on good arms, R+A = N_j on bad arms, sum N = T.
    void check_invariants(const SparseBanditInstance& instance, std::int64_t horizon) const;
};

struct Statistic {
    double mean = 0.0;
    double stderr_ = 0.0;
};

// Sorted before reduction, so the result does not depend on input order.
Statistic summarize(std::vector<double> values);

struct LemmaCheck {
    std::string lemma;
    std::optional<ArmIndex> arm;
    double empirical_mean = 0.0;
    double stderr_ = 0.0;
    double bound = 0.0;
    bool pass = false;
};

struct AggregateResult {
    PolicyKind policy = PolicyKind::SparseUcb;
    ForceLogVariant forcelog_variant = ForceLogVariant::Anytime;
    std::size_t replications = 0;
    std::int64_t horizon = 0;
    bool stderr_defined = false;  // false with a single replication (stderr reported as 0)

    std::vector<std::int64_t> checkpoints;
    std::vector<double> mean_regret;
    std::vector<double> stderr_regret;

    Eigen::MatrixXd mean_event_counts;    // d x 5
    Eigen::MatrixXd stderr_event_counts;  // d x 5
    Eigen::VectorXd mean_final_counts;
    std::array<double, 3> mean_phase_rounds{};
    Statistic final_regret;
    Statistic weighted_v;  // sum over good arms of Delta_i V_i

    std::vector<LemmaCheck> lemma_report;
};

ReplicationResult run_replication(const ExperimentConfig& config, std::size_t r);

AggregateResult aggregate(const ExperimentConfig& config, std::span<const ReplicationResult> runs);

// Runs every replication (possibly in parallel) and aggregates. For
// SparseUcb with the anytime rule the lemma report is filled in as well.
AggregateResult run_experiment(const ExperimentConfig& config);

// Closed-form lemma bounds against empirical means; pass means
// empirical <= bound + 3 stderr.
std::vector<LemmaCheck> lemma_diagnostics(const AggregateResult& aggregate,
                                          const SparseBanditInstance& instance, std::int64_t horizon);

// Constant-explicit regret bound of the SparseUCB analysis, as stated.
double theorem4_bound(const SparseBanditInstance& instance, std::int64_t horizon);

// Delta-weighted sum of the per-lemma bounds.
double lemma_composition_bound(const SparseBanditInstance& instance, std::int64_t horizon);

// Leading coefficient of ln T in the constant-explicit bound:
// 16 sum_{good, Delta_i > 0} (1 / Delta_i + Delta_i / mu_i^2).
double log_coefficient_bound(const SparseBanditInstance& instance);

}  // namespace sparse_bandit
