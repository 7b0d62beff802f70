#ifndef BANDITLAB_BANDITLAB_H
#define BANDITLAB_BANDITLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define BL_API __declspec(dllexport)
#else
#define BL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bl_status {
    BL_OK = 0,
    BL_ERR_INVALID_ARGUMENT = 1,
    BL_ERR_CONFIG = 2,
    BL_ERR_NUMERIC = 3,
    BL_ERR_IO = 4,
    BL_ERR_INTERNAL = 5
} bl_status;

typedef struct bl_config bl_config;
typedef struct bl_trace bl_trace;
typedef struct bl_instance bl_instance;

/* Message for the most recent failure on the calling thread. */
BL_API const char* bl_last_error(void);
BL_API const char* bl_version(void);
/* Frees strings returned through char** out-parameters. */
BL_API void bl_string_free(char* s);

BL_API bl_status bl_config_load(const char* path, bl_config** out);
BL_API bl_status bl_config_parse(const char* json_text, const char* base_dir, bl_config** out);
BL_API void bl_config_free(bl_config* config);

/* First environment and first horizon of the config. */
BL_API bl_status bl_run(const bl_config* config, uint64_t seed, bl_trace** out);

BL_API size_t bl_trace_length(const bl_trace* trace);
BL_API bl_status bl_trace_csv(const bl_trace* trace, char** out);
BL_API bl_status bl_trace_write(const bl_trace* trace, const char* path);
/* Final pseudo-regret and adversarial regret. */
BL_API bl_status bl_trace_regret(const bl_trace* trace, double* pseudo, double* adversarial);
BL_API void bl_trace_free(bl_trace* trace);

/* Writes traces, summary.csv and regret.svg under the config's output dir.
   summary_out may be NULL. */
BL_API bl_status bl_sweep(const bl_config* config, unsigned jobs, char** summary_out);

BL_API bl_status bl_instance_load(const char* path, bl_instance** out);
BL_API bl_status bl_instance_parse(const char* json_text, bl_instance** out);
BL_API void bl_instance_free(bl_instance* instance);

/* what: "op", "c" or "expl". */
BL_API bl_status bl_design_csv(const bl_instance* instance, const char* what, uint64_t t, double delta,
                               double scale, char** out);

BL_API bl_status bl_catoni(const double* samples, size_t n, double alpha, double clip_lo, double clip_hi,
                           double* out);

/* preset: "paper" or "demo"; algorithm: "reolb", "botw" or "ghp".
   c_reg <= 0 selects gamma / 256. */
BL_API bl_status bl_lowerbound_report(const bl_instance* instance, double gamma, uint64_t horizon, int runs,
                                      const char* algorithm, const char* preset, double c_reg, char** out);

#ifdef __cplusplus
}
#endif

#endif
