#include "sparse_bandit/sim_harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numbers>
#include <thread>

namespace sparse_bandit {

std::string_view to_string(PolicyKind kind) {
    return kind == PolicyKind::Ucb ? "ucb" : "sparse-ucb";
}

void ExperimentConfig::validate() const {
    if (horizon < 1) throw BanditError(ErrorCode::InvalidArgument, "horizon must be >= 1");
    if (replications < 1) throw BanditError(ErrorCode::InvalidArgument, "replications must be >= 1");
    if (policy == PolicyKind::SparseUcb) {
        sparse_config.validate();
        if (sparse_config.s > instance.d()) {
            throw BanditError(ErrorCode::InvalidArgument, "policy s exceeds d");
        }
    }
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        if (checkpoints[i] < 1 || checkpoints[i] > horizon || (i > 0 && checkpoints[i] <= checkpoints[i - 1])) {
            throw BanditError(ErrorCode::InvalidArgument,
                              "checkpoints must be strictly increasing within [1, T]");
        }
    }
}

std::vector<std::int64_t> ExperimentConfig::resolved_checkpoints() const {
    return checkpoints.empty() ? geometric_checkpoints(horizon) : checkpoints;
}

std::vector<std::int64_t> geometric_checkpoints(std::int64_t horizon, double ratio) {
    if (horizon < 1) throw BanditError(ErrorCode::InvalidArgument, "horizon must be >= 1");
    if (!(ratio > 1.0)) throw BanditError(ErrorCode::InvalidArgument, "ratio must exceed 1");
    std::vector<std::int64_t> grid{1};
    double x = 1.0;
    while (grid.back() < horizon) {
        x *= ratio;
        const auto next = std::max(grid.back() + 1, static_cast<std::int64_t>(std::ceil(x - 1e-9)));
        grid.push_back(std::min(next, horizon));
    }
    return grid;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t replication_seed(std::uint64_t base_seed, std::uint64_t r) {
    return splitmix64(splitmix64(base_seed) ^ splitmix64(r ^ 0xD1B54A32D192ED03ULL));
}

void ReplicationResult::check_invariants(const SparseBanditInstance& instance, std::int64_t horizon) const {
    if (final_counts.sum() != horizon) {
        throw BanditError(ErrorCode::InvariantViolation, "sum of pulls differs from T");
    }
    for (std::size_t i = 0; i < instance.d(); ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        const std::int64_t n = final_counts[row];
        const auto& ev = event_counts.row(row);
        const bool ok = instance.is_good(i) ? (ev(0) + ev(1) + ev(2) + ev(3) == n && ev(4) == 0)
                                            : (ev(0) + ev(4) == n && ev(1) + ev(2) + ev(3) == 0);
        if (!ok) {
            throw BanditError(ErrorCode::InvariantViolation,
                              "event classes do not partition the pulls of arm " + std::to_string(i));
        }
    }
    for (std::size_t i = 1; i < regret_trajectory.size(); ++i) {
        if (regret_trajectory[i].regret < regret_trajectory[i - 1].regret) {
            throw BanditError(ErrorCode::InvariantViolation, "pseudo-regret decreased");
        }
    }
}

ReplicationResult run_replication(const ExperimentConfig& config, std::size_t r) {
    config.validate();
    const auto& instance = config.instance;
    const std::size_t d = instance.d();

    PolicyConfig labels = config.sparse_config;  // event classes use the true sparsity
    labels.s = instance.s();
    if (config.policy == PolicyKind::Ucb) labels.forcelog_variant = ForceLogVariant::Anytime;

    Rng rng(replication_seed(config.base_seed, r));
    SparseUcbState state(d);
    RegretLedger ledger(instance, config.resolved_checkpoints());
    ReplicationResult out;
    out.event_counts = EventMatrix::Zero(static_cast<Eigen::Index>(d), kEventClasses);

    for (std::int64_t t = 1; t <= config.horizon; ++t) {
        Decision decision{};
        if (config.policy == PolicyKind::SparseUcb) {
            decision = sparse_ucb_select(state, config.sparse_config);
        } else if (t <= static_cast<std::int64_t>(d)) {
            decision = {static_cast<ArmIndex>(t - 1), Phase::RoundRobin};
        } else {
            decision = {ucb_select(state), Phase::Ucb};
        }
        const EventClass event = classify_event(state, decision.arm, decision.phase, labels);
        const double reward = sample_reward(instance, decision.arm, rng);
        update(state, decision.arm, reward, decision.phase);
        ledger.record(decision.arm);

        out.event_counts(static_cast<Eigen::Index>(decision.arm), event_column(event)) += 1;
        out.phase_round_counts[static_cast<std::size_t>(decision.phase)] += 1;
    }

    out.final_counts = ledger.pull_counts();
    out.regret_trajectory = ledger.trajectory();
    out.final_regret = ledger.cumulative_pseudo_regret();
    out.check_invariants(instance, config.horizon);
    return out;
}

Statistic summarize(std::vector<double> values) {
    Statistic st;
    if (values.empty()) return st;
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    st.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - st.mean) * (v - st.mean);
        const double n = static_cast<double>(values.size());
        st.stderr_ = std::sqrt(ss / (n - 1.0) / n);
    }
    return st;
}

AggregateResult aggregate(const ExperimentConfig& config, std::span<const ReplicationResult> runs) {
    if (runs.empty()) throw BanditError(ErrorCode::InvalidArgument, "nothing to aggregate");
    const auto& instance = config.instance;
    const auto d = static_cast<Eigen::Index>(instance.d());
    const std::size_t n = runs.size();

    AggregateResult agg;
    agg.policy = config.policy;
    agg.forcelog_variant = config.sparse_config.forcelog_variant;
    agg.replications = n;
    agg.horizon = config.horizon;
    agg.stderr_defined = n > 1;
    agg.checkpoints = config.resolved_checkpoints();

    std::vector<double> column(n);
    auto stat_of = [&](auto&& pick) {
        for (std::size_t r = 0; r < n; ++r) column[r] = pick(runs[r]);
        return summarize(column);
    };

    for (std::size_t c = 0; c < agg.checkpoints.size(); ++c) {
        const auto st = stat_of([c](const ReplicationResult& run) { return run.regret_trajectory.at(c).regret; });
        agg.mean_regret.push_back(st.mean);
        agg.stderr_regret.push_back(st.stderr_);
    }

    agg.mean_event_counts = Eigen::MatrixXd::Zero(d, kEventClasses);
    agg.stderr_event_counts = Eigen::MatrixXd::Zero(d, kEventClasses);
    agg.mean_final_counts = Eigen::VectorXd::Zero(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (int e = 0; e < kEventClasses; ++e) {
            const auto st = stat_of([i, e](const ReplicationResult& run) {
                return static_cast<double>(run.event_counts(i, e));
            });
            agg.mean_event_counts(i, e) = st.mean;
            agg.stderr_event_counts(i, e) = st.stderr_;
        }
        agg.mean_final_counts[i] =
            stat_of([i](const ReplicationResult& run) { return static_cast<double>(run.final_counts[i]); }).mean;
    }
    for (std::size_t p = 0; p < 3; ++p) {
        agg.mean_phase_rounds[p] =
            stat_of([p](const ReplicationResult& run) { return static_cast<double>(run.phase_round_counts[p]); })
                .mean;
    }
    agg.final_regret = stat_of([](const ReplicationResult& run) { return run.final_regret; });

    const auto s = static_cast<Eigen::Index>(instance.s());
    const Vector& gaps = instance.gaps();
    agg.weighted_v = stat_of([&](const ReplicationResult& run) {
        double total = 0.0;
        for (Eigen::Index i = 0; i < s; ++i) total += gaps[i] * static_cast<double>(run.event_counts(i, 3));
        return total;
    });
    return agg;
}

AggregateResult run_experiment(const ExperimentConfig& config) {
    config.validate();
    const std::size_t n = config.replications;
    std::vector<ReplicationResult> runs(n);
    std::vector<std::exception_ptr> failures(n);

    std::size_t workers = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, n);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t r = next++; r < n; r = next++) {
            try {
                runs[r] = run_replication(config, r);
            } catch (...) {
                failures[r] = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }

    for (std::size_t r = 0; r < n; ++r) {
        if (!failures[r]) continue;
        try {
            std::rethrow_exception(failures[r]);
        } catch (const BanditError& e) {
            throw BanditError(e.code(), "replication " + std::to_string(r) + " failed: " + e.what());
        } catch (const std::exception& e) {
            throw BanditError(ErrorCode::InvariantViolation,
                              "replication " + std::to_string(r) + " failed: " + e.what());
        }
    }

    AggregateResult agg = aggregate(config, runs);
    if (config.policy == PolicyKind::SparseUcb &&
        config.sparse_config.forcelog_variant == ForceLogVariant::Anytime) {
        agg.lemma_report = lemma_diagnostics(agg, config.instance, config.horizon);
    }
    return agg;
}

namespace {

constexpr double kPiSquaredOver6 = std::numbers::pi * std::numbers::pi / 6.0;

double round_robin_bound(const SparseBanditInstance& instance) {
    const auto s = static_cast<Eigen::Index>(instance.s());
    double total = 1.0 + 3.0 * static_cast<double>(instance.s());
    for (Eigen::Index j = 0; j < s; ++j) {
        const double m2 = instance.means()[j] * instance.means()[j];
        total += (8.0 + 32.0 * std::log(16.0 / m2)) / m2;
    }
    return total;
}

double force_log_bound(double mu, std::int64_t horizon) {
    return (16.0 * std::log(static_cast<double>(horizon)) + 8.0) / (mu * mu);
}

double ucb_bound(double gap, std::int64_t horizon) {
    return (16.0 * std::log(static_cast<double>(horizon)) + 8.0) / (gap * gap) + 3.0;
}

double wrong_ucb_bound(const SparseBanditInstance& instance) {
    const auto s = static_cast<Eigen::Index>(instance.s());
    return static_cast<double>(instance.d()) * instance.gaps()[s - 1] * kPiSquaredOver6;
}

}  // namespace

double log_coefficient_bound(const SparseBanditInstance& instance) {
    const auto s = static_cast<Eigen::Index>(instance.s());
    double total = 0.0;
    for (Eigen::Index i = 0; i < s; ++i) {
        const double gap = instance.gaps()[i];
        if (gap > 0.0) total += 1.0 / gap + gap / (instance.means()[i] * instance.means()[i]);
    }
    return 16.0 * total;
}

double theorem4_bound(const SparseBanditInstance& instance, std::int64_t horizon) {
    const auto s = static_cast<Eigen::Index>(instance.s());
    const Vector& mu = instance.means();
    const Vector& gaps = instance.gaps();

    double rr_constant = 1.0 + 3.0 * static_cast<double>(instance.s());
    for (Eigen::Index j = 0; j < s; ++j) {
        rr_constant += (1.0 + 4.0 * std::log(16.0 / (mu[j] * mu[j]))) / (mu[j] * mu[j]);
    }
    double good_constant = 0.0;
    for (Eigen::Index i = 0; i < s; ++i) {
        if (gaps[i] > 0.0) good_constant += gaps[i] * (3.0 + 8.0 / (mu[i] * mu[i]) + 8.0 / (gaps[i] * gaps[i]));
    }
    const double bad_gaps = gaps.tail(gaps.size() - s).sum();
    return log_coefficient_bound(instance) * std::log(static_cast<double>(horizon)) + gaps.sum() * rr_constant +
           good_constant + kPiSquaredOver6 * bad_gaps + wrong_ucb_bound(instance);
}

double lemma_composition_bound(const SparseBanditInstance& instance, std::int64_t horizon) {
    const auto s = static_cast<Eigen::Index>(instance.s());
    const auto d = static_cast<Eigen::Index>(instance.d());
    const Vector& gaps = instance.gaps();
    double total = gaps.sum() * round_robin_bound(instance) + wrong_ucb_bound(instance);
    for (Eigen::Index i = 0; i < s; ++i) {
        if (gaps[i] > 0.0) {
            total += gaps[i] * (force_log_bound(instance.means()[i], horizon) + ucb_bound(gaps[i], horizon));
        }
    }
    for (Eigen::Index j = s; j < d; ++j) total += gaps[j] * kPiSquaredOver6;
    return total;
}

std::vector<LemmaCheck> lemma_diagnostics(const AggregateResult& agg, const SparseBanditInstance& instance,
                                          std::int64_t horizon) {
    if (agg.policy != PolicyKind::SparseUcb || agg.forcelog_variant != ForceLogVariant::Anytime) {
        throw BanditError(ErrorCode::WrongPolicy, "lemma bounds apply to SparseUCB with the anytime rule");
    }
    if (agg.mean_event_counts.rows() != static_cast<Eigen::Index>(instance.d())) {
        throw BanditError(ErrorCode::LengthMismatch, "aggregate and instance disagree on d");
    }
    std::vector<LemmaCheck> report;
    auto add = [&report](std::string name, std::optional<ArmIndex> arm, double mean, double se, double bound) {
        report.push_back({std::move(name), arm, mean, se, bound, mean <= bound + 3.0 * se});
    };
    const auto d = static_cast<Eigen::Index>(instance.d());
    const auto s = static_cast<Eigen::Index>(instance.s());
    const auto& mean = agg.mean_event_counts;
    const auto& se = agg.stderr_event_counts;

    const double rr = round_robin_bound(instance);
    for (Eigen::Index i = 0; i < d; ++i) add("lemma6", static_cast<ArmIndex>(i), mean(i, 0), se(i, 0), rr);
    for (Eigen::Index i = 0; i < s; ++i) {
        add("lemma7", static_cast<ArmIndex>(i), mean(i, 1), se(i, 1),
            force_log_bound(instance.means()[i], horizon));
    }
    for (Eigen::Index i = 0; i < s; ++i) {
        if (instance.gaps()[i] > 0.0) {
            add("lemma8", static_cast<ArmIndex>(i), mean(i, 2), se(i, 2), ucb_bound(instance.gaps()[i], horizon));
        }
    }
    add("lemma9", std::nullopt, agg.weighted_v.mean, agg.weighted_v.stderr_, wrong_ucb_bound(instance));
    for (Eigen::Index j = s; j < d; ++j) add("lemma10", static_cast<ArmIndex>(j), mean(j, 4), se(j, 4), kPiSquaredOver6);
    add("theorem4", std::nullopt, agg.final_regret.mean, agg.final_regret.stderr_, theorem4_bound(instance, horizon));
    add("lemma_composition", std::nullopt, agg.final_regret.mean, agg.final_regret.stderr_,
        lemma_composition_bound(instance, horizon));
    return report;
}

}  // namespace sparse_bandit
