/*
 * C interface to the uncertainty-based perturb-and-observe library.
 *
 * All functions return a upo_status; on failure a thread-local message is
 * available from upo_last_error() until the next failing call on the same
 * thread. Handles are opaque and owned by the caller, who releases them with
 * the matching *_destroy function. Destroy functions accept NULL.
 */
#ifndef UPO_UPO_H
#define UPO_UPO_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(UPO_BUILDING_LIBRARY)
#    define UPO_API __declspec(dllexport)
#  else
#    define UPO_API __declspec(dllimport)
#  endif
#else
#  define UPO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum upo_status {
  UPO_OK = 0,
  UPO_ERR_INVALID_ARGUMENT = 1,
  UPO_ERR_UNMEASURED_POINT = 2,
  UPO_ERR_OFF_GRID = 3,
  UPO_ERR_NON_CONVERGENCE = 4,
  UPO_ERR_IO = 5,
  UPO_ERR_CONFIG = 6,
  UPO_ERR_INFEASIBLE = 7,
  UPO_ERR_NULL_POINTER = 8,
  UPO_ERR_OUT_OF_RANGE = 9,
  UPO_ERR_INTERNAL = 99
} upo_status;

UPO_API const char* upo_version(void);
UPO_API const char* upo_last_error(void);
UPO_API const char* upo_status_name(upo_status status);

/* ---- Experiments ------------------------------------------------------ */

typedef struct upo_experiment upo_experiment;
typedef struct upo_run upo_run;
typedef struct upo_comparison upo_comparison;

typedef struct upo_record {
  int64_t k;
  double u;
  double y;
  double f_true;
  double u_star;
  int perturbed;
  double cumulative;
} upo_record;

typedef struct upo_metrics {
  int64_t perturbations;
  double cumulative;
} upo_metrics;

typedef struct upo_summary_row {
  char method[48];
  uint64_t seed;
  int64_t perturbations;
  double cumulative;
  double improvement_vs_pando;
  double improvement_vs_const;
} upo_summary_row;

/* Experiment configuration with defaults: method upo, scenario pv_default,
 * 300 steps, seed 1, lambda 0.88, rho-est 5, horizon 2, 5 quadrature
 * points, weight 0. */
UPO_API upo_status upo_experiment_create(upo_experiment** out);
UPO_API void upo_experiment_destroy(upo_experiment* exp);
UPO_API upo_status upo_experiment_clone(const upo_experiment* exp, upo_experiment** out);

/* Set one option; keys are the CLI long flags without dashes (method,
 * scenario, steps, seed, seeds, lambda, rho-est, horizon, quad-points,
 * weight, u-init, out, profile-csv, rho, noise, ...) and the photovoltaic
 * parameter names (T_r, I_s, I_0, k_i, N, E_g, k, q, n_s, R_s, R_p, C_c,
 * L_c, R_c). */
UPO_API upo_status upo_experiment_set(upo_experiment* exp, const char* key, const char* value);

/* Apply a key=value config file ('#' comments). */
UPO_API upo_status upo_experiment_load_file(upo_experiment* exp, const char* path);

/* Copies the configured output directory into buf (NUL-terminated). */
UPO_API upo_status upo_experiment_out_dir(const upo_experiment* exp, char* buf, size_t len);

/* Single run of the configured method with the configured seed. */
UPO_API upo_status upo_experiment_run(const upo_experiment* exp, upo_run** out);

UPO_API void upo_run_destroy(upo_run* run);
UPO_API size_t upo_run_length(const upo_run* run);
UPO_API upo_status upo_run_record(const upo_run* run, size_t index, upo_record* out);
UPO_API upo_status upo_run_metrics(const upo_run* run, upo_metrics* out);
UPO_API upo_status upo_run_write_csv(const upo_run* run, const char* path);

/* Runs the configured method over seeds [seed, seed + seeds) together with
 * the P&O and best-constant baselines. */
UPO_API upo_status upo_experiment_compare(const upo_experiment* exp, upo_comparison** out);

/* Same, for several configurations sharing scenario, steps and seeds. */
UPO_API upo_status upo_compare(const upo_experiment* const* exps, size_t count,
                               upo_comparison** out);

UPO_API void upo_comparison_destroy(upo_comparison* cmp);
UPO_API size_t upo_comparison_rows(const upo_comparison* cmp);
UPO_API upo_status upo_comparison_row(const upo_comparison* cmp, size_t index, upo_summary_row* out);
/* Best constant input value found by exhaustive scan. */
UPO_API upo_status upo_comparison_best_constant(const upo_comparison* cmp, double* u);
UPO_API upo_status upo_comparison_write_summary(const upo_comparison* cmp, const char* path);
/* Writes trajectory_<method>_seed<seed>.csv for every row into dir. */
UPO_API upo_status upo_comparison_write_trajectories(const upo_comparison* cmp, const char* dir);

/* ---- Controllers -------------------------------------------------------- */

typedef struct upo_controller upo_controller;

typedef struct upo_grid_spec {
  double u_min;
  double delta_u;
  size_t n_u;
} upo_grid_spec;

typedef struct upo_controller_config {
  double lambda;
  double rho_est;
  int horizon;
  int quad_points;
  double weight;
} upo_controller_config;

/* Fills cfg with the defaults (0.88, 5, 2, 5, 0). */
UPO_API void upo_controller_config_default(upo_controller_config* cfg);

UPO_API upo_status upo_controller_create_pando(const upo_grid_spec* grid, upo_controller** out);
UPO_API upo_status upo_controller_create_upo(const upo_grid_spec* grid,
                                             const upo_controller_config* cfg,
                                             upo_controller** out);
UPO_API void upo_controller_destroy(upo_controller* ctl);

/* First measurement y1 at grid value u1; writes the second input. */
UPO_API upo_status upo_controller_start(upo_controller* ctl, double u1, double y1, double* next_u);
/* Measurement at the most recently returned input; writes the next input. */
UPO_API upo_status upo_controller_step(upo_controller* ctl, double y, double* next_u);

/* ---- Numerics ----------------------------------------------------------- */

/* Probabilists' Gauss-Hermite rule; nodes and weights must hold `points` values. */
UPO_API upo_status upo_gauss_hermite(int points, double* nodes, double* weights);

UPO_API upo_status upo_beta_bound(double L_k, double rho, double L_b, double* beta);

/* Steady-state operating point of the default photovoltaic plant. */
UPO_API upo_status upo_pv_steady_state(double duty, double temperature, double irradiance,
                                       double* v, double* i, double* power);

#ifdef __cplusplus
}
#endif

#endif /* UPO_UPO_H */
