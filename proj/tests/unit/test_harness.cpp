#include "harness.hpp"
#include "helpers.hpp"

#include <fstream>
#include <sstream>

using namespace banditlab;
using namespace bltest;
namespace fs = std::filesystem;

namespace {

const char* kInstance = R"({"d": 3, "actions": [[1,0,0],[0,1,0],[0,0,1]], "theta": [-0.3, -0.1, 0.1]})";

std::string config_text(const std::string& algorithm, const std::string& horizons, const std::string& seeds,
                        const std::string& out, const std::string& envs = R"([{"type": "stochastic"}])") {
    return std::string(R"({"version": 1, "preset": "demo", "algorithm": {"name": ")") + algorithm +
           R"("}, "instance": )" + kInstance + R"(, "environments": )" + envs + R"(, "horizons": )" + horizons +
           R"(, "seeds": )" + seeds + R"(, "output": {"dir": ")" + out + R"(", "svg": true, "traces": true}})";
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("banditlab_test_" + name);
    fs::remove_all(p);
    return p;
}

/// Minimal well-formedness check: every element closes in order.
bool well_formed(const std::string& xml) {
    std::vector<std::string> stack;
    std::size_t i = 0;
    while ((i = xml.find('<', i)) != std::string::npos) {
        const std::size_t j = xml.find('>', i);
        if (j == std::string::npos) return false;
        std::string tag = xml.substr(i + 1, j - i - 1);
        i = j + 1;
        if (tag.empty() || tag[0] == '?' || tag[0] == '!') continue;
        if (tag.back() == '/') continue;
        if (tag[0] == '/') {
            if (stack.empty() || stack.back() != tag.substr(1)) return false;
            stack.pop_back();
            continue;
        }
        stack.push_back(tag.substr(0, tag.find(' ')));
    }
    return stack.empty();
}

}  // namespace

TEST_CASE("T=8 REOLB run follows the doubling blocks") {
    const auto cfg = parse_config(config_text("reolb", "[8]", "[1]", "unused"));
    const auto trace = run_experiment(cfg, 1);
    REQUIRE(trace.size() == 8);
    const std::int64_t blocks[] = {0, 1, 1, 2, 2, 2, 2, 3};
    for (std::size_t i = 0; i < 8; ++i) {
        CHECK(trace.records[i].t == i + 1);
        CHECK(trace.records[i].block_or_epoch == blocks[i]);
    }
}

TEST_CASE("runs are byte-identical per seed") {
    for (const char* alg : {"reolb", "botw", "ghp"}) {
        const auto cfg = parse_config(config_text(alg, "[2000]", "[1]", "unused"));
        CHECK(trace_csv(run_experiment(cfg, 5)) == trace_csv(run_experiment(cfg, 5)));
        CHECK(trace_csv(run_experiment(cfg, 5)) != trace_csv(run_experiment(cfg, 6)));
    }
}

TEST_CASE("config errors") {
    CHECK(error_of([] { parse_config(config_text("linucb", "[8]", "[1]", "x")); }) == ErrorCode::ConfigError);
    CHECK(error_of([] { parse_config("{not json"); }) == ErrorCode::ConfigError);
    CHECK(error_of([] { parse_config(config_text("reolb", "[]", "[1]", "x")); }) == ErrorCode::ConfigError);
    CHECK(error_of([] { parse_config(config_text("reolb", "[8]", "[]", "x")); }) == ErrorCode::ConfigError);
    CHECK(error_of([] { parse_config(config_text("reolb", "[0]", "[1]", "x")); }) == ErrorCode::ConfigError);
    std::string bad_delta = config_text("reolb", "[8]", "[1]", "x");
    bad_delta.replace(bad_delta.find(R"("name": "reolb")"), 15, R"("name": "reolb", "delta": 0.5)");
    CHECK(error_of([&] { parse_config(bad_delta); }) == ErrorCode::ConfigError);
    CHECK(error_of([] {
              parse_config(config_text("reolb", "[8]", "[1]", "x", R"([{"type": "corrupted", "corruption": {"kind": "sideways"}}])"));
          }) == ErrorCode::ConfigError);
    CHECK(error_of([] { load_config("/nonexistent/config.json"); }) == ErrorCode::IoError);
    const std::string bad_norm = R"({"actions": [[2, 0], [0, 1]], "theta": [0.1, 0.2]})";
    CHECK(error_of([&] { parse_instance(bad_norm).build(); }) == ErrorCode::NormViolation);
}

TEST_CASE("seed ranges and instance files") {
    const fs::path dir = scratch("instfile");
    fs::create_directories(dir);
    std::ofstream(dir / "inst.json") << kInstance;
    const std::string text = R"({"algorithm": "reolb", "instance_file": "inst.json", "horizon": 16,
                                 "seeds": {"count": 3, "start": 10}})";
    std::ofstream(dir / "cfg.json") << text;
    const auto cfg = load_config(dir / "cfg.json");
    CHECK(cfg.seeds == std::vector<std::uint64_t>{10, 11, 12});
    CHECK(cfg.horizons == std::vector<std::uint64_t>{16});
    CHECK(cfg.instance.actions.size() == 3);
    CHECK(cfg.environments.size() == 1);
    CHECK(cfg.environments[0].name == "stochastic");
}

TEST_CASE("trace CSV round trip") {
    Trace empty;
    CHECK(trace_csv(empty) == "t,arm,y,phase,block_or_epoch,pseudo_regret_cum,adv_regret_cum\n");
    CHECK(parse_trace_csv(trace_csv(empty)).empty());

    const auto cfg = parse_config(config_text("botw", "[3000]", "[1]", "unused",
                                              R"([{"type": "adversarial", "sequence": {"kind": "switch"}}])"));
    const auto trace = run_experiment(cfg, 2);
    const auto back = parse_trace_csv(trace_csv(trace));
    REQUIRE(back.size() == trace.size());
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const auto& a = trace.records[i];
        const auto& b = back.records[i];
        CHECK(a.t == b.t);
        CHECK(a.arm == b.arm);
        CHECK(a.y == b.y);
        CHECK(a.phase == b.phase);
        CHECK(a.block_or_epoch == b.block_or_epoch);
        CHECK(a.pseudo_regret_cum == b.pseudo_regret_cum);
        CHECK(a.adv_regret_cum == b.adv_regret_cum);
    }
    CHECK(trace_csv(back) == trace_csv(trace));
}

TEST_CASE("regret accounting in traces") {
    const auto cfg = parse_config(config_text("reolb", "[500]", "[1]", "unused"));
    const auto trace = run_experiment(cfg, 3);
    const auto inst = cfg.instance.build();
    const auto arms = trace.arms();
    const auto pr = pseudo_regret(arms, inst);
    std::vector<Vector> losses(arms.size(), inst.theta());
    for (std::size_t i = 0; i < trace.size(); ++i) CHECK(trace.records[i].pseudo_regret_cum == doctest::Approx(pr[i]));
    CHECK(trace.records.back().adv_regret_cum == doctest::Approx(adversarial_regret(arms, losses, inst.actions())));
}

TEST_CASE("quantiles") {
    std::vector<double> v{4, 1, 3, 2};
    CHECK(quantile(v, 0.5) == doctest::Approx(2.5));
    CHECK(quantile(v, 0.1) == doctest::Approx(1.3));
    CHECK(quantile(v, 0.9) == doctest::Approx(3.7));
    CHECK(quantile({7.0}, 0.9) == 7.0);
    CHECK(error_of([] { quantile({}, 0.5); }) == ErrorCode::EmptySamples);
}

TEST_CASE("sweep writes traces and a summary that recomputes from them") {
    const fs::path out = scratch("sweep");
    const auto cfg = parse_config(config_text("reolb", "[64, 256]", "[1, 2, 3]", out.string()));
    const auto result = sweep(cfg, 2);
    CHECK(result.traces.size() == 6);
    CHECK(result.rows.size() == 2);
    const std::string summary = slurp(out / "summary.csv");
    std::istringstream lines(summary);
    std::string header;
    std::getline(lines, header);
    CHECK(header == "algorithm,env,T,seed_count,regret_median,regret_q10,regret_q90");
    std::size_t k = 0;
    for (std::uint64_t horizon : {64u, 256u}) {
        std::vector<double> finals;
        for (int seed = 1; seed <= 3; ++seed) {
            const fs::path p = out / "traces" / ("trace_reolb_stochastic_T" + std::to_string(horizon) + "_seed" +
                                                 std::to_string(seed) + ".csv");
            REQUIRE(fs::exists(p));
            finals.push_back(final_regret(parse_trace_csv(slurp(p)), false));
        }
        std::string row;
        std::getline(lines, row);
        CHECK(row == summary_line(summarise("reolb", "stochastic", horizon, finals)).substr(0, row.size()));
        CHECK(result.rows[k].median == quantile(finals, 0.5));
        ++k;
    }
    CHECK(well_formed(slurp(out / "regret.svg")));
}

TEST_CASE("sweep output does not depend on the thread count") {
    const fs::path a = scratch("jobs1"), b = scratch("jobs4");
    const std::string envs = R"([{"type": "stochastic"}, {"type": "corrupted", "corruption": {"kind": "front_loaded", "budget_fraction": 0.01}}])";
    sweep(parse_config(config_text("botw", "[300, 600]", "[1, 2, 3]", a.string(), envs)), 1);
    sweep(parse_config(config_text("botw", "[300, 600]", "[1, 2, 3]", b.string(), envs)), 4);
    CHECK(slurp(a / "summary.csv") == slurp(b / "summary.csv"));
    CHECK(slurp(a / "regret.svg") == slurp(b / "regret.svg"));
    for (const auto& e : fs::directory_iterator(a / "traces"))
        CHECK(slurp(e.path()) == slurp(b / "traces" / e.path().filename()));
}

TEST_CASE("failed sweep leaves a valid partial summary") {
    const fs::path out = scratch("partial");
    const std::string envs = R"([{"name": "first", "type": "stochastic"}, {"name": "second", "type": "stochastic"}])";
    const auto cfg = parse_config(config_text("reolb", "[32]", "[1, 2]", out.string(), envs));
    // A directory where the second group's first trace file should go.
    fs::create_directories(out / "traces" / "trace_reolb_second_T32_seed1.csv");
    CHECK(error_of([&] { sweep(cfg, 2); }) == ErrorCode::IoError);
    const std::string summary = slurp(out / "summary.csv");
    std::istringstream lines(summary);
    std::string line;
    std::vector<std::string> rows;
    while (std::getline(lines, line)) rows.push_back(line);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].rfind("reolb,first,32,2,", 0) == 0);
}

TEST_CASE("design CSV") {
    const auto inst = parse_instance(kInstance).build();
    for (const char* what : {"op", "c", "expl"}) {
        const auto csv = design_csv(inst, what, 1024, 0.1, 1.0);
        CHECK(csv.rfind("arm,weight,quad_norm,bound\n", 0) == 0);
        CHECK(csv.find("metric,value") != std::string::npos);
    }
    CHECK(error_of([&] { design_csv(inst, "nope", 16, 0.1, 1.0); }) == ErrorCode::ConfigError);
}

TEST_CASE("lower-bound report") {
    const auto inst = BanditInstance::make(basis(2), vec({-0.05, 0.05}));
    AlgorithmSpec spec;
    spec.preset = Preset::Demo;
    const auto rep = lowerbound_report(inst, 0.25, 4096, 4, spec);
    CHECK(rep.c_reg == doctest::Approx(0.25 / 256));
    CHECK(std::abs(rep.flip_residual) <= 1e-10);
    CHECK(rep.kl >= 0.0);
    double total = 0.0;
    for (double c : rep.counts) total += c;
    CHECK(total == doctest::Approx(static_cast<double>(rep.intervals[rep.switch_interval - 1])));
    const auto csv = lowerbound_csv(rep);
    CHECK(csv.find("kl_bound,") != std::string::npos);
}
