#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sparse_bandit/bandit_core.hpp"
#include "sparse_bandit/lower_bound.hpp"
#include "sparse_bandit/sim_harness.hpp"

namespace sparse_bandit::cli {

enum class PolicySelection { Ucb, SparseUcb, Both };

struct RunSpec {
    std::optional<std::string> preset;
    std::optional<std::size_t> d;
    std::optional<std::size_t> s;
    std::optional<double> mu1;
    std::optional<double> delta_s;
    std::optional<std::vector<double>> means;

    PolicySelection policy = PolicySelection::Both;
    ForceLogVariant forcelog = ForceLogVariant::Anytime;
    std::int64_t horizon = 10000;
    std::size_t replications = 100;
    std::uint64_t seed = 1;
    std::size_t threads = 0;
    std::filesystem::path out = ".";
    std::vector<double> epsilons;
};

struct Preset {
    std::string_view name;
    std::size_t d;
    std::size_t s;
    double mu1;
    double delta_s;
    SparsityRegime regime;  // documented regime of the resulting instance
};

const std::vector<Preset>& presets();
const Preset& find_preset(std::string_view name);

// One `key = value` assignment; keys are the long flag names without dashes
// (d, s, mu1, delta-s, means, policy, forcelog, horizon, reps, seed, threads,
// out, preset, epsilon). `where` prefixes error messages.
void apply_setting(RunSpec& spec, std::string_view key, std::string_view value, const std::string& where);

// Flat `key = value` file; `#` starts a comment. Unknown keys are rejected.
RunSpec parse_config_text(std::string_view text, const std::string& source = "<config>");
RunSpec parse_config_file(const std::filesystem::path& path);

// Preset/explicit exclusivity and instance resolution.
void validate_spec(const RunSpec& spec);
std::vector<double> resolve_means(const RunSpec& spec);
SparseBanditInstance resolve_instance(const RunSpec& spec);

ExperimentConfig experiment_config(const RunSpec& spec, const SparseBanditInstance& instance, PolicyKind policy);

// "0.1", "0.1,0.2" or "start:stop:step" (inclusive).
std::vector<double> parse_epsilon_grid(std::string_view text);

// Shortest decimal form that round-trips to the same double.
std::string format_double(double value);

// Writes regret.csv, events.csv and lemmas.csv into spec.out.
int cmd_simulate(const RunSpec& spec, std::ostream& out, std::ostream& err);

// Writes bound.csv into spec.out and prints a summary.
int cmd_lower_bound(const RunSpec& spec, std::ostream& out, std::ostream& err);

int cmd_presets_list(std::ostream& out);

inline constexpr std::string_view kRegretHeader = "t,policy,mean_regret,stderr,replications";
inline constexpr std::string_view kEventsHeader = "policy,arm,label,mu,mean_pulls,R,F,U,V,A";
inline constexpr std::string_view kLemmasHeader = "lemma,arm,empirical_mean,stderr,bound,pass";
inline constexpr std::string_view kBoundHeader =
    "regime,k,lambda,value,classical_value,irrelevance_threshold,lp_value,lp_gap";

}  // namespace sparse_bandit::cli
