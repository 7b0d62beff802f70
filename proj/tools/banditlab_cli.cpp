#include <banditlab/banditlab.h>

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

int exit_code(bl_status s) {
    switch (s) {
        case BL_OK: return 0;
        case BL_ERR_INVALID_ARGUMENT:
        case BL_ERR_CONFIG:
        case BL_ERR_IO: return 2;
        case BL_ERR_NUMERIC: return 3;
        default: return 1;
    }
}

int report(bl_status s) {
    if (s != BL_OK) std::fprintf(stderr, "banditlab: %s\n", bl_last_error());
    return exit_code(s);
}

int print_owned(bl_status s, char* text) {
    if (s == BL_OK) {
        std::fputs(text, stdout);
        bl_string_free(text);
    }
    return report(s);
}

int cmd_run(const std::string& config_path, uint64_t seed, const std::string& out_path) {
    bl_config* cfg = nullptr;
    if (bl_status s = bl_config_load(config_path.c_str(), &cfg); s != BL_OK) return report(s);
    bl_trace* trace = nullptr;
    bl_status s = bl_run(cfg, seed, &trace);
    bl_config_free(cfg);
    if (s != BL_OK) return report(s);
    if (out_path.empty()) {
        char* text = nullptr;
        s = bl_trace_csv(trace, &text);
        bl_trace_free(trace);
        return print_owned(s, text);
    }
    s = bl_trace_write(trace, out_path.c_str());
    if (s == BL_OK) {
        double pseudo = 0.0, adv = 0.0;
        bl_trace_regret(trace, &pseudo, &adv);
        std::fprintf(stderr, "rounds=%zu pseudo_regret=%.6g adversarial_regret=%.6g\n", bl_trace_length(trace), pseudo,
                     adv);
    }
    bl_trace_free(trace);
    return report(s);
}

int cmd_sweep(const std::string& config_path, unsigned jobs) {
    bl_config* cfg = nullptr;
    if (bl_status s = bl_config_load(config_path.c_str(), &cfg); s != BL_OK) return report(s);
    char* summary = nullptr;
    const bl_status s = bl_sweep(cfg, jobs, &summary);
    bl_config_free(cfg);
    return print_owned(s, summary);
}

int cmd_design(const std::string& instance_path, const std::string& what, uint64_t t, double delta, double scale) {
    bl_instance* inst = nullptr;
    if (bl_status s = bl_instance_load(instance_path.c_str(), &inst); s != BL_OK) return report(s);
    char* text = nullptr;
    const bl_status s = bl_design_csv(inst, what.c_str(), t, delta, scale, &text);
    bl_instance_free(inst);
    return print_owned(s, text);
}

int cmd_catoni(const std::string& path, double alpha, const std::vector<double>& clip) {
    std::ifstream in(path);
    if (!in) {
        std::fprintf(stderr, "banditlab: cannot read %s\n", path.c_str());
        return 2;
    }
    std::vector<double> samples;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ss(line);
        double v = 0.0;
        std::string rest;
        if (!(ss >> v) || (ss >> rest)) {
            std::fprintf(stderr, "banditlab: %s:%zu: not a number\n", path.c_str(), lineno);
            return 2;
        }
        samples.push_back(v);
    }
    double est = 0.0;
    const bl_status s = bl_catoni(samples.data(), samples.size(), alpha, clip[0], clip[1], &est);
    if (s == BL_OK) std::printf("%.17g\n", est);
    return report(s);
}

int cmd_lowerbound(const std::string& instance_path, double gamma, uint64_t horizon, int runs,
                   const std::string& algorithm, const std::string& preset, double c_reg) {
    bl_instance* inst = nullptr;
    if (bl_status s = bl_instance_load(instance_path.c_str(), &inst); s != BL_OK) return report(s);
    char* text = nullptr;
    const bl_status s =
        bl_lowerbound_report(inst, gamma, horizon, runs, algorithm.c_str(), preset.c_str(), c_reg, &text);
    bl_instance_free(inst);
    return print_owned(s, text);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Best-of-three-worlds linear bandit simulator"};
    app.set_version_flag("--version", std::string(bl_version()));
    app.require_subcommand(1);

    std::string config_path, out_path;
    uint64_t seed = 1;
    auto* run = app.add_subcommand("run", "Run one seeded trial and emit its trace CSV");
    run->add_option("--config", config_path, "Experiment config (JSON)")->required();
    run->add_option("--seed", seed, "Trial seed");
    run->add_option("--out", out_path, "Write the trace here instead of stdout");

    unsigned jobs = 1;
    auto* sw = app.add_subcommand("sweep", "Run seeds x horizons x environments and write summary.csv");
    sw->add_option("--config", config_path, "Experiment config (JSON)")->required();
    sw->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

    std::string instance_path, what = "op";
    uint64_t t = 1024;
    double delta = 0.1, scale = 1.0;
    auto* design = app.add_subcommand("design", "Print design weights and certificates as CSV");
    design->add_option("--instance", instance_path, "Instance file (JSON)")->required();
    design->add_option("--what", what, "op, c or expl")->check(CLI::IsMember({"op", "c", "expl"}));
    design->add_option("--t", t, "Round index for op and expl");
    design->add_option("--delta", delta, "Confidence parameter");
    design->add_option("--scale", scale, "Multiplier on the 2^15 factor of beta_t");

    std::string samples_path;
    double alpha = 1.0;
    std::vector<double> clip{-1.0, 1.0};
    auto* catoni = app.add_subcommand("catoni", "Catoni mean of one sample per line");
    catoni->add_option("file", samples_path, "Sample file")->required();
    catoni->add_option("--alpha", alpha, "Scale parameter")->check(CLI::PositiveNumber);
    catoni->add_option("--clip", clip, "lo,hi")->delimiter(',')->expected(2);

    double gamma = 0.25, c_reg = 0.0;
    uint64_t horizon = 1 << 14;
    int runs = 100;
    std::string algorithm = "reolb", preset = "demo";
    auto* lb = app.add_subcommand("lowerbound", "Lower-bound diagnostics from measured pull counts");
    lb->add_option("--instance", instance_path, "Instance file (JSON)")->required();
    lb->add_option("--gamma", gamma, "Regret exponent gamma in (0, 1)");
    lb->add_option("--T", horizon, "Horizon");
    lb->add_option("--runs", runs, "Seeded runs averaged for G_i and pull counts")->check(CLI::PositiveNumber);
    lb->add_option("--algorithm", algorithm, "reolb, botw or ghp")->check(CLI::IsMember({"reolb", "botw", "ghp"}));
    lb->add_option("--preset", preset, "paper or demo")->check(CLI::IsMember({"paper", "demo"}));
    lb->add_option("--c-reg", c_reg, "Regret constant (default gamma/256)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (*run) return cmd_run(config_path, seed, out_path);
    if (*sw) return cmd_sweep(config_path, jobs);
    if (*design) return cmd_design(instance_path, what, t, delta, scale);
    if (*catoni) return cmd_catoni(samples_path, alpha, clip);
    if (*lb) return cmd_lowerbound(instance_path, gamma, horizon, runs, algorithm, preset, c_reg);
    return 2;
}
