/* C interface to the kelvinprobe library. Every call returns a kp_status;
 * on failure kp_last_error() holds a message for the calling thread.
 * Abscissae crossing this interface are user-frame values. */
#ifndef KELVINPROBE_H
#define KELVINPROBE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define KP_API __declspec(dllexport)
#else
#define KP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kp_status {
  KP_OK = 0,
  KP_ERR_INVALID_ARGUMENT = 1,
  KP_ERR_CONFIG = 2,
  KP_ERR_IO = 3,
  KP_ERR_NUMERICAL = 4,
  KP_ERR_DOMAIN = 5,
  KP_ERR_INTERNAL = 6
} kp_status;

KP_API const char* kp_status_name(kp_status status);
KP_API const char* kp_last_error(void);

/* Run configuration */
typedef struct kp_config kp_config;

KP_API kp_status kp_config_default(kp_config** out);
KP_API kp_status kp_config_load(const char* path, kp_config** out);
KP_API kp_status kp_config_parse(const char* text, kp_config** out);
KP_API void kp_config_free(kp_config* cfg);

KP_API kp_status kp_config_set_seed(kp_config* cfg, uint64_t seed);
/* Turns noise on or off; a negative level keeps the configured one. */
KP_API kp_status kp_config_set_noise(kp_config* cfg, int enabled, double level);
KP_API kp_status kp_config_set_threads(kp_config* cfg, int threads);
KP_API kp_status kp_config_set_delta(kp_config* cfg, double delta);
KP_API kp_status kp_config_set_tau_grid(kp_config* cfg, double lo, double hi, double step);
KP_API kp_status kp_config_set_run_dir(kp_config* cfg, const char* dir);

KP_API kp_status kp_config_get_seed(const kp_config* cfg, uint64_t* seed);
/* 16 hex digits; `cap` must be at least 17. */
KP_API kp_status kp_config_hash(const kp_config* cfg, char* buf, size_t cap);
/* Text getters copy into `buf` (NUL-terminated); `needed` receives the full
 * length + 1 and may be queried with buf = NULL. */
KP_API kp_status kp_config_run_dir(const kp_config* cfg, char* buf, size_t cap, size_t* needed);
KP_API kp_status kp_config_serialize(const kp_config* cfg, char* buf, size_t cap, size_t* needed);
/* Interior crack tips of the configured crack set. */
KP_API kp_status kp_config_true_tips(const kp_config* cfg, double* tips, size_t cap, size_t* count);

/* Forward solve: mesh, Neumann data, P1 solution, optional noise. */
typedef struct kp_solution kp_solution;

KP_API kp_status kp_solve(const kp_config* cfg, kp_solution** out);
KP_API void kp_solution_free(kp_solution* sol);
KP_API kp_status kp_solution_info(const kp_solution* sol, size_t* elements, size_t* boundary_nodes,
                                  double* relative_residual);
KP_API kp_status kp_solution_write_mesh(const kp_solution* sol, const char* path);
KP_API kp_status kp_solution_write_cauchy_csv(const kp_solution* sol, const char* path);

/* Indicator samples above xi1 on the probing line. With a configured delta
 * the partial-boundary variant is used. `count` receives the grid size;
 * arrays may be NULL to query it. */
KP_API kp_status kp_indicator(const kp_solution* sol, double xi1, size_t cap, double* tau, double* re, double* im,
                              int* valid, size_t* count);
KP_API kp_status kp_indicator_write_csv(const kp_solution* sol, double xi1, const char* path);

/* Slope profile along the probing line */
typedef struct kp_profile kp_profile;

typedef struct kp_tips {
  int has_left;
  int has_right;
  double x_left;
  double x_right;
} kp_tips;

KP_API kp_status kp_profile_sweep(const kp_solution* sol, kp_profile** out);
KP_API void kp_profile_free(kp_profile* prof);
KP_API kp_status kp_profile_tips(const kp_profile* prof, double x_star, kp_tips* out);
KP_API kp_status kp_profile_write_csv(const kp_profile* prof, const char* path);
KP_API kp_status kp_profile_write_svg(const kp_profile* prof, const char* path, const char* title);

/* Monitoring loop; writes per-round artifacts under run_dir and the JSON log
 * to log_path. `all_success` is set when every pressure point succeeded. */
KP_API kp_status kp_monitor_run(const kp_config* cfg, const char* run_dir, const char* log_path, int* all_success);

/* Tip-integral oracle. Pass NAN for eta_prime to use the default. */
typedef struct kp_oracle_report kp_oracle_report;

KP_API kp_status kp_oracle_run(int n, double s0, double alpha, double eta_prime, const double* taus, size_t ntau,
                               kp_oracle_report** out);
KP_API void kp_oracle_free(kp_oracle_report* rep);
KP_API int kp_oracle_passed(const kp_oracle_report* rep);
/* Owned by the report. */
KP_API const char* kp_oracle_json(const kp_oracle_report* rep);
KP_API const char* kp_oracle_text(const kp_oracle_report* rep);

/* Re-renders a profile CSV as SVG; tips are drawn as vertical lines,
 * rows flagged is_max as dots. */
KP_API kp_status kp_plot_profile_csv(const char* csv_path, const char* svg_path, const char* title,
                                     const double* true_tips, size_t n_tips);

#ifdef __cplusplus
}
#endif

#endif
