#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sparse_bandit/cli.hpp"

using namespace sparse_bandit;
using namespace sparse_bandit::cli;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

std::vector<std::string> fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double to_double(const std::string& text) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    REQUIRE(ec == std::errc{});
    REQUIRE(ptr == text.data() + text.size());
    return v;
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const BanditError& e) {
        return e.code();
    }
    FAIL("expected a BanditError");
    return ErrorCode::InvalidArgument;
}

std::string message_of(auto&& fn) {
    try {
        fn();
    } catch (const BanditError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("presets resolve to the experiment instances") {
    RunSpec left;
    left.preset = "fig2-left";
    const auto inst = resolve_instance(left);
    CHECK(inst.d() == 15);
    CHECK(inst.s() == 7);
    CHECK(inst.best_mean() == 0.9);
    CHECK(inst.gaps()[6] == doctest::Approx(0.7));

    RunSpec right;
    right.preset = "fig3-right";
    const auto r = resolve_instance(right);
    CHECK(r.d() == 15);
    CHECK(r.s() == 2);
    CHECK(r.gaps()[1] == doctest::Approx(0.3));

    for (const auto& p : presets()) {
        RunSpec spec;
        spec.preset = std::string(p.name);
        const auto i = resolve_instance(spec);
        CAPTURE(p.name);
        CHECK(sparsity_regime(i) == p.regime);
    }
    CHECK(code_of([] { find_preset("fig9"); }) == ErrorCode::ValidationError);
}

TEST_CASE("preset and explicit parameters are exclusive") {
    RunSpec spec;
    spec.preset = "fig2-left";
    spec.d = 15;
    CHECK(code_of([&] { validate_spec(spec); }) == ErrorCode::ValidationError);
}

TEST_CASE("config text parsing") {
    const auto spec = parse_config_text(
        "# experiment\n"
        "d = 10\n"
        "s = 3   # good arms\n"
        "mu1 = 0.8\n"
        "delta-s = 0.2\n"
        "policy = sparse-ucb\n"
        "horizon = 500\n"
        "reps = 4\n"
        "seed = 9\n"
        "forcelog = horizon\n"
        "epsilon = 0.1:0.3:0.1\n");
    CHECK(spec.d == 10u);
    CHECK(spec.s == 3u);
    CHECK(spec.mu1 == 0.8);
    CHECK(spec.delta_s == 0.2);
    CHECK(spec.policy == PolicySelection::SparseUcb);
    CHECK(spec.horizon == 500);
    CHECK(spec.replications == 4u);
    CHECK(spec.seed == 9u);
    CHECK(spec.forcelog == ForceLogVariant::HorizonAware);
    REQUIRE(spec.epsilons.size() == 3);
    CHECK(spec.epsilons[2] == doctest::Approx(0.3));

    const auto means = parse_config_text("means = 0.2, 0.9, 0\n");
    REQUIRE(means.means.has_value());
    const auto inst = resolve_instance(means);
    CHECK(inst.s() == 2);
    CHECK(inst.means()[0] == 0.9);
}

TEST_CASE("config errors carry location") {
    CHECK(code_of([] { parse_config_text("d = 3\ncolour = blue\n", "run.cfg"); }) == ErrorCode::ParseError);
    CHECK(message_of([] { parse_config_text("d = 3\ncolour = blue\n", "run.cfg"); }).find("run.cfg:2") !=
          std::string::npos);
    CHECK(message_of([] { parse_config_text("\n\nhorizon = ten\n", "x"); }).find("x:3") != std::string::npos);
    CHECK(message_of([] { parse_config_text("\n\nhorizon = ten\n", "x"); }).find("horizon") != std::string::npos);
    CHECK(code_of([] { parse_config_text("just words\n"); }) == ErrorCode::ParseError);
    CHECK(code_of([] { parse_config_text("policy = thompson\n"); }) == ErrorCode::ParseError);
    CHECK(code_of([] { parse_config_file("/nonexistent/file.cfg"); }) == ErrorCode::IoError);
}

TEST_CASE("flags override the file") {
    auto spec = parse_config_text("horizon = 500\nreps = 4\n");
    apply_setting(spec, "horizon", "800", "--horizon");
    CHECK(spec.horizon == 800);
    CHECK(spec.replications == 4u);
}

TEST_CASE("instance validation errors") {
    RunSpec spec;
    spec.means = std::vector<double>{0.9, 0.0};
    spec.s = 2;
    CHECK(code_of([&] { resolve_instance(spec); }) == ErrorCode::ValidationError);
    RunSpec partial;
    partial.d = 4;
    CHECK(code_of([&] { resolve_instance(partial); }) == ErrorCode::ValidationError);
}

TEST_CASE("epsilon grids") {
    CHECK(parse_epsilon_grid("0.1") == std::vector<double>{0.1});
    CHECK(parse_epsilon_grid("0.1,0.2") == std::vector<double>{0.1, 0.2});
    CHECK(parse_epsilon_grid("0.1:0.5:0.1").size() == 5);
    CHECK(code_of([] { parse_epsilon_grid("0"); }) == ErrorCode::ValidationError);
    CHECK(code_of([] { parse_epsilon_grid("0.1:0.5"); }) == ErrorCode::ValidationError);
}

TEST_CASE("format_double round-trips") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int k = 0; k < 1000; ++k) {
        const double x = u(rng) / (k + 1);
        CHECK(to_double(format_double(x)) == x);
    }
    CHECK(format_double(0.1) == "0.1");
}

TEST_CASE("simulate smoke test and byte-identical rerun") {
    const auto dir_a = oracle::fresh_dir("sim_a");
    const auto dir_b = oracle::fresh_dir("sim_b");
    RunSpec spec;
    spec.preset = "fig2-right";
    spec.horizon = 10;
    spec.replications = 1;
    spec.out = dir_a;
    std::ostringstream out, err;
    REQUIRE(cmd_simulate(spec, out, err) == 0);
    spec.out = dir_b;
    REQUIRE(cmd_simulate(spec, out, err) == 0);

    for (const char* name : {"regret.csv", "events.csv", "lemmas.csv"}) {
        const auto a = oracle::slurp(dir_a / name);
        CHECK(a == oracle::slurp(dir_b / name));
        CHECK(a.find('\r') == std::string::npos);
        CHECK(a.back() == '\n');
    }

    const auto regret = lines_of(oracle::slurp(dir_a / "regret.csv"));
    REQUIRE(!regret.empty());
    CHECK(regret[0] == kRegretHeader);
    std::size_t ucb_rows = 0, sparse_rows = 0;
    for (std::size_t k = 1; k < regret.size(); ++k) {
        const auto f = fields(regret[k]);
        REQUIRE(f.size() == 5);
        (f[1] == "ucb" ? ucb_rows : sparse_rows)++;
        CHECK(to_double(f[2]) >= 0.0);
        CHECK(to_double(f[3]) == 0.0);
        CHECK(f[4] == "1");
    }
    CHECK(ucb_rows <= 10);
    CHECK(sparse_rows <= 10);
    CHECK(ucb_rows > 0);

    const auto events = lines_of(oracle::slurp(dir_a / "events.csv"));
    CHECK(events[0] == kEventsHeader);
    CHECK(events.size() == 1 + 2 * 15);
    CHECK(lines_of(oracle::slurp(dir_a / "lemmas.csv"))[0] == kLemmasHeader);

    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);
}

TEST_CASE("lower-bound table for a two-arm instance") {
    const auto dir = oracle::fresh_dir("lb");
    RunSpec spec;
    spec.means = std::vector<double>{0.9, 0.0};
    spec.out = dir;
    std::ostringstream out, err;
    REQUIRE(cmd_lower_bound(spec, out, err) == 0);
    const auto rows = lines_of(oracle::slurp(dir / "bound.csv"));
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == kBoundHeader);
    const auto f = fields(rows[1]);
    REQUIRE(f.size() == 8);
    CHECK(f[0] == "Strong");
    CHECK(f[1].empty());
    CHECK(to_double(f[3]) == 0.0);
    CHECK(to_double(f[4]) == doctest::Approx(1.0 / 1.8).epsilon(1e-15));
    CHECK(to_double(f[7]) <= 1e-9);
    std::filesystem::remove_all(dir);
}

TEST_CASE("lower-bound epsilon sweep writes one row per value") {
    const auto dir = oracle::fresh_dir("lb_eps");
    RunSpec spec;
    spec.preset = "fig2-mid";
    spec.epsilons = parse_epsilon_grid("0.1:0.6:0.1");
    spec.out = dir;
    std::ostringstream out, err;
    REQUIRE(cmd_lower_bound(spec, out, err) == 0);
    const auto rows = lines_of(oracle::slurp(dir / "bound.csv"));
    CHECK(rows.size() == 1 + spec.epsilons.size());
    for (std::size_t k = 1; k < rows.size(); ++k) CHECK(to_double(fields(rows[k])[7]) <= 1e-9);
    std::filesystem::remove_all(dir);
}

TEST_CASE("lower-bound rejects negative bad arms with a message") {
    RunSpec spec;
    spec.means = std::vector<double>{0.9, -0.2};
    spec.out = oracle::fresh_dir("lb_neg");
    std::ostringstream out, err;
    CHECK(cmd_lower_bound(spec, out, err) != 0);
    CHECK(err.str().find("NonzeroBadArm") != std::string::npos);
    std::filesystem::remove_all(spec.out);
}

TEST_CASE("presets list") {
    std::ostringstream out;
    CHECK(cmd_presets_list(out) == 0);
    for (const auto& p : presets()) CHECK(out.str().find(std::string(p.name)) != std::string::npos);
}
