#include "sparse_bandit/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace sparse_bandit::cli {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void parse_fail(const std::string& where, std::string_view key, const std::string& why) {
    throw BanditError(ErrorCode::ParseError, where + ": field '" + std::string(key) + "': " + why);
}

double parse_double(std::string_view text, const std::string& where, std::string_view key) {
    text = trim(text);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
        parse_fail(where, key, "'" + std::string(text) + "' is not a finite number");
    }
    return value;
}

template <typename Int>
Int parse_integer(std::string_view text, const std::string& where, std::string_view key) {
    text = trim(text);
    Int value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        parse_fail(where, key, "'" + std::string(text) + "' is not an integer");
    }
    return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        parts.push_back(trim(text.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

[[noreturn]] void invalid(const std::string& why) { throw BanditError(ErrorCode::ValidationError, why); }

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw BanditError(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    file << content;
    if (!file) throw BanditError(ErrorCode::IoError, "write failed for " + path.string());
}

std::string label_of(std::optional<ArmIndex> arm) { return arm ? std::to_string(*arm + 1) : std::string(); }

}  // namespace

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

const std::vector<Preset>& presets() {
    static const std::vector<Preset> table{
        {"fig2-left", 15, 7, 0.9, 0.7, SparsityRegime::Weak},
        {"fig2-mid", 15, 7, 0.9, 0.25, SparsityRegime::Strong},
        {"fig2-right", 15, 7, 0.9, 0.1, SparsityRegime::Strong},
        {"fig3-left", 15, 12, 0.9, 0.3, SparsityRegime::Weak},
        {"fig3-mid", 15, 6, 0.9, 0.3, SparsityRegime::Strong},
        {"fig3-right", 15, 2, 0.9, 0.3, SparsityRegime::Strong},
    };
    return table;
}

const Preset& find_preset(std::string_view name) {
    for (const auto& p : presets()) {
        if (p.name == name) return p;
    }
    invalid("unknown preset '" + std::string(name) + "' (see `presets list`)");
}

void apply_setting(RunSpec& spec, std::string_view key, std::string_view value, const std::string& where) {
    key = trim(key);
    value = trim(value);
    if (value.empty()) parse_fail(where, key, "empty value");

    if (key == "d") {
        spec.d = parse_integer<std::size_t>(value, where, key);
    } else if (key == "s") {
        spec.s = parse_integer<std::size_t>(value, where, key);
    } else if (key == "mu1") {
        spec.mu1 = parse_double(value, where, key);
    } else if (key == "delta-s" || key == "delta_s") {
        spec.delta_s = parse_double(value, where, key);
    } else if (key == "means") {
        std::vector<double> means;
        for (auto part : split(value, ',')) means.push_back(parse_double(part, where, key));
        spec.means = std::move(means);
    } else if (key == "policy") {
        if (value == "ucb") spec.policy = PolicySelection::Ucb;
        else if (value == "sparse-ucb" || value == "sparseucb") spec.policy = PolicySelection::SparseUcb;
        else if (value == "both") spec.policy = PolicySelection::Both;
        else parse_fail(where, key, "expected ucb, sparse-ucb or both");
    } else if (key == "forcelog") {
        if (value == "anytime") spec.forcelog = ForceLogVariant::Anytime;
        else if (value == "horizon") spec.forcelog = ForceLogVariant::HorizonAware;
        else parse_fail(where, key, "expected anytime or horizon");
    } else if (key == "horizon") {
        spec.horizon = parse_integer<std::int64_t>(value, where, key);
        if (spec.horizon < 1) parse_fail(where, key, "must be >= 1");
    } else if (key == "reps") {
        spec.replications = parse_integer<std::size_t>(value, where, key);
        if (spec.replications < 1) parse_fail(where, key, "must be >= 1");
    } else if (key == "seed") {
        spec.seed = parse_integer<std::uint64_t>(value, where, key);
    } else if (key == "threads") {
        spec.threads = parse_integer<std::size_t>(value, where, key);
    } else if (key == "out") {
        spec.out = std::filesystem::path(std::string(value));
    } else if (key == "preset") {
        spec.preset = std::string(value);
    } else if (key == "epsilon") {
        try {
            spec.epsilons = parse_epsilon_grid(value);
        } catch (const BanditError& e) {
            parse_fail(where, key, e.what());
        }
    } else {
        throw BanditError(ErrorCode::ParseError, where + ": unknown key '" + std::string(key) + "'");
    }
}

RunSpec parse_config_text(std::string_view text, const std::string& source) {
    RunSpec spec;
    std::size_t line_no = 0;
    for (auto line : split(text, '\n')) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = source + ":" + std::to_string(line_no);
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw BanditError(ErrorCode::ParseError, where + ": expected `key = value`");
        }
        apply_setting(spec, line.substr(0, eq), line.substr(eq + 1), where);
    }
    return spec;
}

RunSpec parse_config_file(const std::filesystem::path& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw BanditError(ErrorCode::IoError, "cannot read config " + path.string());
    std::ostringstream text;
    text << file.rdbuf();
    return parse_config_text(text.str(), path.string());
}

std::vector<double> parse_epsilon_grid(std::string_view text) {
    text = trim(text);
    std::vector<double> grid;
    if (text.find(':') != std::string_view::npos) {
        const auto parts = split(text, ':');
        if (parts.size() != 3) invalid("epsilon range must be start:stop:step");
        const double start = parse_double(parts[0], "epsilon", "start");
        const double stop = parse_double(parts[1], "epsilon", "stop");
        const double step = parse_double(parts[2], "epsilon", "step");
        if (!(step > 0.0) || stop < start) invalid("epsilon range needs step > 0 and stop >= start");
        const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
        for (std::size_t i = 0; i < count; ++i) grid.push_back(start + static_cast<double>(i) * step);
    } else {
        for (auto part : split(text, ',')) grid.push_back(parse_double(part, "epsilon", "value"));
    }
    for (double e : grid) {
        if (!(e > 0.0)) invalid("epsilon values must be > 0");
    }
    return grid;
}

void validate_spec(const RunSpec& spec) {
    if (spec.preset) {
        if (spec.d || spec.s || spec.mu1 || spec.delta_s || spec.means) {
            invalid("preset '" + *spec.preset + "' and explicit instance parameters (d, s, mu1, delta-s, means) "
                    "are mutually exclusive");
        }
        find_preset(*spec.preset);
    }
    if (spec.horizon < 1) invalid("horizon must be >= 1");
    if (spec.replications < 1) invalid("reps must be >= 1");
}

std::vector<double> resolve_means(const RunSpec& spec) {
    validate_spec(spec);
    std::size_t d = 0, s = 0;
    double mu1 = 0.0, delta_s = 0.0;
    if (spec.preset) {
        const auto& p = find_preset(*spec.preset);
        d = p.d, s = p.s, mu1 = p.mu1, delta_s = p.delta_s;
    } else if (spec.means) {
        if (spec.mu1 || spec.delta_s) invalid("means and mu1/delta-s are mutually exclusive");
        if (spec.d && *spec.d != spec.means->size()) {
            invalid("d=" + std::to_string(*spec.d) + " but " + std::to_string(spec.means->size()) + " means given");
        }
        return *spec.means;
    } else {
        if (!spec.d || !spec.s || !spec.mu1) invalid("instance needs a preset, a means list, or d, s and mu1");
        d = *spec.d, s = *spec.s, mu1 = *spec.mu1;
        if (s > 1 && !spec.delta_s) invalid("delta-s is required when s > 1");
        delta_s = spec.delta_s.value_or(0.0);
    }
    if (s < 1 || s > d) invalid("need 1 <= s <= d");
    if (!(mu1 > 0.0)) invalid("mu1 must be positive");
    if (s > 1 && !(delta_s >= 0.0 && delta_s < mu1)) invalid("delta-s must lie in [0, mu1) so that mu_s > 0");
    std::vector<double> means(d, 0.0);
    means[0] = mu1;
    for (std::size_t i = 1; i < s; ++i) means[i] = mu1 - delta_s;
    return means;
}

SparseBanditInstance resolve_instance(const RunSpec& spec) {
    const auto means = resolve_means(spec);
    std::size_t s = 0;
    if (spec.preset) {
        s = find_preset(*spec.preset).s;
    } else if (spec.s) {
        s = *spec.s;
    } else {
        s = static_cast<std::size_t>(std::count_if(means.begin(), means.end(), [](double m) { return m > 0.0; }));
    }
    try {
        return validate_instance(means, s);
    } catch (const BanditError& e) {
        invalid(e.what());
    }
}

ExperimentConfig experiment_config(const RunSpec& spec, const SparseBanditInstance& instance, PolicyKind policy) {
    return ExperimentConfig{
        .instance = instance,
        .policy = policy,
        .sparse_config = {.s = instance.s(), .forcelog_variant = spec.forcelog, .horizon = spec.horizon},
        .horizon = spec.horizon,
        .replications = spec.replications,
        .base_seed = spec.seed,
        .checkpoints = {},
        .threads = spec.threads,
    };
}

int cmd_simulate(const RunSpec& spec, std::ostream& out, std::ostream& err) {
    try {
        const auto instance = resolve_instance(spec);
        std::vector<PolicyKind> kinds;
        if (spec.policy != PolicySelection::SparseUcb) kinds.push_back(PolicyKind::Ucb);
        if (spec.policy != PolicySelection::Ucb) kinds.push_back(PolicyKind::SparseUcb);

        std::ostringstream regret, events, lemmas;
        regret << kRegretHeader << '\n';
        events << kEventsHeader << '\n';
        lemmas << kLemmasHeader << '\n';

        for (const auto kind : kinds) {
            const auto agg = run_experiment(experiment_config(spec, instance, kind));
            const auto name = to_string(kind);
            for (std::size_t c = 0; c < agg.checkpoints.size(); ++c) {
                regret << agg.checkpoints[c] << ',' << name << ',' << format_double(agg.mean_regret[c]) << ','
                       << format_double(agg.stderr_regret[c]) << ',' << agg.replications << '\n';
            }
            for (std::size_t i = 0; i < instance.d(); ++i) {
                const auto row = static_cast<Eigen::Index>(i);
                events << name << ',' << i + 1 << ',' << instance.original_index()[i] + 1 << ','
                       << format_double(instance.means()[row]) << ','
                       << format_double(agg.mean_final_counts[row]);
                for (int e = 0; e < kEventClasses; ++e) events << ',' << format_double(agg.mean_event_counts(row, e));
                events << '\n';
            }
            for (const auto& check : agg.lemma_report) {
                lemmas << check.lemma << ',' << label_of(check.arm) << ',' << format_double(check.empirical_mean)
                       << ',' << format_double(check.stderr_) << ',' << format_double(check.bound) << ','
                       << (check.pass ? "true" : "false") << '\n';
            }

            const auto passed = std::count_if(agg.lemma_report.begin(), agg.lemma_report.end(),
                                              [](const LemmaCheck& c) { return c.pass; });
            out << name << ": mean regret at T=" << agg.horizon << " = " << agg.final_regret.mean << " +/- "
                << agg.final_regret.stderr_ << " (" << agg.replications << " replications";
            if (!agg.stderr_defined) out << ", stderr undefined";
            out << ")";
            if (!agg.lemma_report.empty()) out << ", lemma checks " << passed << "/" << agg.lemma_report.size();
            out << '\n';
        }

        std::filesystem::create_directories(spec.out);
        write_file(spec.out / "regret.csv", regret.str());
        write_file(spec.out / "events.csv", events.str());
        write_file(spec.out / "lemmas.csv", lemmas.str());
        out << "wrote " << (spec.out / "regret.csv").string() << ", events.csv, lemmas.csv\n";
        return 0;
    } catch (const BanditError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: IoError: " << e.what() << '\n';
        return 1;
    }
}

int cmd_lower_bound(const RunSpec& spec, std::ostream& out, std::ostream& err) {
    try {
        const auto instance = resolve_instance(spec);
        if (!instance.bad_arms_null()) {
            throw BanditError(ErrorCode::NonzeroBadArm,
                              "the lower bound models bad arms with mean exactly 0; set every "
                              "nonpositive mean to 0 to evaluate it");
        }
        const double classical = classical_lower_bound(instance);
        std::optional<double> threshold;
        if (instance.d() > instance.s()) threshold = irrelevance_threshold(instance.d(), instance.s(), instance.best_mean());

        std::ostringstream csv;
        csv << kBoundHeader << '\n';
        auto emit = [&](const LowerBoundResult<double>& r, std::optional<double> eps) {
            const double gap = std::abs(r.value - r.lp_value);
            csv << to_string(r.regime) << ',' << label_of(r.k) << ',' << format_double(r.lambda) << ','
                << format_double(r.value) << ',' << format_double(classical) << ','
                << (threshold ? format_double(*threshold) : std::string()) << ',' << format_double(r.lp_value)
                << ',' << format_double(gap) << '\n';
            if (eps) out << "epsilon=" << *eps << ": ";
            out << "regime " << to_string(r.regime) << ", bound " << r.value << " (LP " << r.lp_value
                << "), classical " << classical;
            if (r.k) out << ", k=" << *r.k + 1 << ", lambda=" << r.lambda;
            out << '\n';
        };

        out << "instance d=" << instance.d() << " s=" << instance.s() << " mu1=" << instance.best_mean();
        if (threshold) out << ", sparsity irrelevant once mu_s <= " << *threshold;
        out << '\n';
        if (spec.epsilons.empty()) {
            emit(explicit_lower_bound(instance), std::nullopt);
        } else {
            for (double eps : spec.epsilons) emit(generalized_lower_bound(instance, eps), eps);
        }

        std::filesystem::create_directories(spec.out);
        write_file(spec.out / "bound.csv", csv.str());
        out << "wrote " << (spec.out / "bound.csv").string() << '\n';
        return 0;
    } catch (const BanditError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: IoError: " << e.what() << '\n';
        return 1;
    }
}

int cmd_presets_list(std::ostream& out) {
    out << std::left << std::setw(12) << "name" << std::setw(5) << "d" << std::setw(5) << "s" << std::setw(6)
        << "mu1" << std::setw(9) << "delta_s" << "regime\n";
    for (const auto& p : presets()) {
        out << std::setw(12) << p.name << std::setw(5) << p.d << std::setw(5) << p.s << std::setw(6) << p.mu1
            << std::setw(9) << p.delta_s << to_string(p.regime) << '\n';
    }
    return 0;
}

}  // namespace sparse_bandit::cli
