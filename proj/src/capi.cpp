#include <banditlab/banditlab.h>

#include "errors.hpp"
#include "harness.hpp"
#include "robust.hpp"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <string>

struct bl_config {
    banditlab::ExperimentConfig config;
};

struct bl_trace {
    banditlab::Trace trace;
    bool adversarial = false;
};

struct bl_instance {
    banditlab::BanditInstance instance;
};

namespace {

thread_local std::string tl_error;

bl_status fail(bl_status status, const std::string& message) {
    tl_error = message;
    return status;
}

bl_status null_arg(const char* name) { return fail(BL_ERR_INVALID_ARGUMENT, std::string("null pointer: ") + name); }

template <class F>
bl_status guarded(F&& body) {
    try {
        body();
        tl_error.clear();
        return BL_OK;
    } catch (const banditlab::BanditError& e) {
        if (e.code() == banditlab::ErrorCode::IoError) return fail(BL_ERR_IO, e.what());
        if (banditlab::is_numerical(e.code())) return fail(BL_ERR_NUMERIC, e.what());
        return fail(BL_ERR_CONFIG, e.what());
    } catch (const std::bad_alloc&) {
        return fail(BL_ERR_INTERNAL, "out of memory");
    } catch (const std::filesystem::filesystem_error& e) {
        return fail(BL_ERR_IO, e.what());
    } catch (const std::exception& e) {
        return fail(BL_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(BL_ERR_INTERNAL, "unknown exception");
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.data(), s.size() + 1);
    return out;
}

}  // namespace

extern "C" {

const char* bl_last_error(void) { return tl_error.c_str(); }

const char* bl_version(void) { return "1.0.0"; }

void bl_string_free(char* s) { std::free(s); }

bl_status bl_config_load(const char* path, bl_config** out) {
    if (!path) return null_arg("path");
    if (!out) return null_arg("out");
    *out = nullptr;
    return guarded([&] { *out = new bl_config{banditlab::load_config(path)}; });
}

bl_status bl_config_parse(const char* json_text, const char* base_dir, bl_config** out) {
    if (!json_text) return null_arg("json_text");
    if (!out) return null_arg("out");
    *out = nullptr;
    return guarded([&] { *out = new bl_config{banditlab::parse_config(json_text, base_dir ? base_dir : ".")}; });
}

void bl_config_free(bl_config* config) { delete config; }

bl_status bl_run(const bl_config* config, uint64_t seed, bl_trace** out) {
    if (!config) return null_arg("config");
    if (!out) return null_arg("out");
    *out = nullptr;
    return guarded([&] {
        const auto& cfg = config->config;
        const auto inst = cfg.instance.build();
        const auto horizon = cfg.horizons.front();
        auto env = std::make_shared<const banditlab::Environment>(
            banditlab::build_environment(inst, cfg.environments.front(), horizon));
        auto run = banditlab::run_once(cfg.algorithm, env, horizon, seed);
        *out = new bl_trace{std::move(run.trace), env->is_adversarial()};
    });
}

size_t bl_trace_length(const bl_trace* trace) { return trace ? trace->trace.size() : 0; }

bl_status bl_trace_csv(const bl_trace* trace, char** out) {
    if (!trace) return null_arg("trace");
    if (!out) return null_arg("out");
    *out = nullptr;
    return guarded([&] { *out = dup_string(banditlab::trace_csv(trace->trace)); });
}

bl_status bl_trace_write(const bl_trace* trace, const char* path) {
    if (!trace) return null_arg("trace");
    if (!path) return null_arg("path");
    return guarded([&] { banditlab::write_trace_csv(trace->trace, path); });
}

bl_status bl_trace_regret(const bl_trace* trace, double* pseudo, double* adversarial) {
    if (!trace) return null_arg("trace");
    if (pseudo) *pseudo = banditlab::final_regret(trace->trace, false);
    if (adversarial) *adversarial = banditlab::final_regret(trace->trace, true);
    tl_error.clear();
    return BL_OK;
}

void bl_trace_free(bl_trace* trace) { delete trace; }

bl_status bl_sweep(const bl_config* config, unsigned jobs, char** summary_out) {
    if (!config) return null_arg("config");
    if (summary_out) *summary_out = nullptr;
    return guarded([&] {
        const auto result = banditlab::sweep(config->config, jobs);
        if (summary_out) {
            std::string s = banditlab::summary_header();
            for (const auto& row : result.rows) s += banditlab::summary_line(row);
            *summary_out = dup_string(s);
        }
    });
}

bl_status bl_instance_load(const char* path, bl_instance** out) {
    if (!path) return null_arg("path");
    if (!out) return null_arg("out");
    *out = nullptr;
    return guarded([&] { *out = new bl_instance{banditlab::load_instance(path).build()}; });
}

bl_status bl_instance_parse(const char* json_text, bl_instance** out) {
    if (!json_text) return null_arg("json_text");
    if (!out) return null_arg("out");
    *out = nullptr;
    return guarded([&] { *out = new bl_instance{banditlab::parse_instance(json_text).build()}; });
}

void bl_instance_free(bl_instance* instance) { delete instance; }

bl_status bl_design_csv(const bl_instance* instance, const char* what, uint64_t t, double delta, double scale,
                        char** out) {
    if (!instance) return null_arg("instance");
    if (!what) return null_arg("what");
    if (!out) return null_arg("out");
    *out = nullptr;
    return guarded([&] { *out = dup_string(banditlab::design_csv(instance->instance, what, t, delta, scale)); });
}

bl_status bl_catoni(const double* samples, size_t n, double alpha, double clip_lo, double clip_hi, double* out) {
    if (!samples && n > 0) return null_arg("samples");
    if (!out) return null_arg("out");
    return guarded([&] {
        if (clip_lo > clip_hi) throw banditlab::BanditError(banditlab::ErrorCode::BadBounds, "clip_lo exceeds clip_hi");
        const double est = banditlab::catoni_estimate(std::span<const double>(samples, n), alpha);
        *out = banditlab::clip(est, clip_lo, clip_hi);
    });
}

bl_status bl_lowerbound_report(const bl_instance* instance, double gamma, uint64_t horizon, int runs,
                               const char* algorithm, const char* preset, double c_reg, char** out) {
    if (!instance) return null_arg("instance");
    if (!out) return null_arg("out");
    *out = nullptr;
    return guarded([&] {
        banditlab::AlgorithmSpec spec;
        spec.name = algorithm ? algorithm : "reolb";
        const std::string p = preset ? preset : "demo";
        if (p == "demo")
            spec.preset = banditlab::Preset::Demo;
        else if (p != "paper")
            throw banditlab::BanditError(banditlab::ErrorCode::ConfigError, "unknown preset '" + p + "'");
        std::optional<double> c;
        if (c_reg > 0.0) c = c_reg;
        const auto rep = banditlab::lowerbound_report(instance->instance, gamma, horizon, runs, spec, c);
        *out = dup_string(banditlab::lowerbound_csv(rep));
    });
}

}  // extern "C"
