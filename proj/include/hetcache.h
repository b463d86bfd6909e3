/* C interface to the hetcache core: random-cache multi-antenna HetNet
 * throughput analysis, Monte-Carlo verification and cache-placement
 * optimization behind opaque handles and status codes.
 *
 * Every function returning hc_status leaves a human-readable detail string
 * in hc_last_error() (thread-local) when it fails. Handles are created by
 * the library and released with the matching *_free call.
 */
#ifndef HETCACHE_H
#define HETCACHE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define HC_API __declspec(dllexport)
#else
#define HC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hc_status {
  HC_OK = 0,
  HC_ERR_INVALID_ARGUMENT = 1,
  HC_ERR_VALIDATION = 2,
  HC_ERR_NUMERIC = 3,
  HC_ERR_IO = 4,
  HC_ERR_UNKNOWN = 5
} hc_status;

typedef enum hc_mode { HC_MODE_IN = 0, HC_MODE_MRT = 1 } hc_mode;

typedef enum hc_fidelity { HC_FIDELITY_MATCHED = 0, HC_FIDELITY_FULL = 1 } hc_fidelity;

typedef enum hc_opt_method {
  HC_OPT_GRADIENT_PROJECTION = 0,
  HC_OPT_KKT_NEAR_OPT = 1
} hc_opt_method;

typedef struct hc_scenario hc_scenario;
typedef struct hc_report hc_report;
typedef struct hc_opt_result hc_opt_result;

HC_API const char* hc_status_name(hc_status status);
HC_API const char* hc_last_error(void);

/* --- scenario ----------------------------------------------------------- */

HC_API hc_status hc_scenario_load(const char* path, hc_scenario** out);
HC_API hc_status hc_scenario_parse(const char* text, hc_scenario** out);
HC_API hc_status hc_scenario_clone(const hc_scenario* s, hc_scenario** out);
HC_API void hc_scenario_free(hc_scenario* s);

/* Numeric keys: lambda0 lambda1 lambda_u n0 n1 wm_hz ws_hz alpha0 alpha1
 * rc_m f gamma c. Setting f or gamma rebuilds the Zipf catalog and drops any
 * cache vector. */
HC_API hc_status hc_scenario_set(hc_scenario* s, const char* key, double value);
HC_API hc_status hc_scenario_get(const hc_scenario* s, const char* key, double* out);

HC_API hc_status hc_scenario_set_cache(hc_scenario* s, const double* t, size_t len);
/* family: "mpc", "uc" or "iidc" */
HC_API hc_status hc_scenario_set_scheme(hc_scenario* s, const char* family);
HC_API hc_status hc_scenario_clear_cache(hc_scenario* s);
HC_API hc_status hc_scenario_get_cache(const hc_scenario* s, double* t, size_t cap, size_t* len);

HC_API hc_status hc_scenario_serialize(const hc_scenario* s, char* buf, size_t cap, size_t* len);
HC_API hc_status hc_scenario_hash(const hc_scenario* s, char buf[17]);
HC_API hc_status hc_scenario_validate(const hc_scenario* s);

/* --- closed-form helpers ------------------------------------------------- */

HC_API hc_status hc_zipf_popularity(size_t f, double gamma, double* out);
HC_API hc_status hc_epsilon(int n1, double kbar, double* out);
HC_API hc_status hc_hit_probability(double t_n, double lambda1, double rc, double* out);
HC_API hc_status hc_incomplete_beta(double x, double y, double z, double* out);
HC_API hc_status hc_kbar(const hc_scenario* s, double* out);
HC_API hc_status hc_convex_regime_radius(const hc_scenario* s, double* out);

/* --- engines -------------------------------------------------------------- */

HC_API hc_status hc_analyze(const hc_scenario* s, hc_mode mode, hc_report** out);
HC_API hc_status hc_simulate(const hc_scenario* s, hc_mode mode, hc_fidelity fidelity,
                             uint32_t realizations, uint64_t seed, int workers,
                             const char* raw_export_path, hc_report** out);

typedef struct hc_file_rates {
  double ps;
  double pm;
  double r0;
  double r1;
  double fm;
  double fs;
  double se;
} hc_file_rates;

HC_API double hc_report_throughput(const hc_report* r);
HC_API double hc_report_std_error(const hc_report* r);
HC_API double hc_report_epsilon(const hc_report* r);
HC_API double hc_report_kbar(const hc_report* r);
HC_API int hc_report_support_size(const hc_report* r);
HC_API size_t hc_report_files(const hc_report* r);
HC_API hc_status hc_report_file(const hc_report* r, size_t index, hc_file_rates* out);
HC_API const char* hc_report_provenance(const hc_report* r);
HC_API size_t hc_report_warnings(const hc_report* r);
HC_API const char* hc_report_warning(const hc_report* r, size_t index);
HC_API void hc_report_free(hc_report* r);

/* --- optimizer ------------------------------------------------------------ */

HC_API hc_status hc_optimize(const hc_scenario* s, hc_opt_method method, hc_mode mode,
                             hc_opt_result** out);
HC_API double hc_opt_objective(const hc_opt_result* r);
HC_API double hc_opt_nu_star(const hc_opt_result* r); /* NaN for gradient projection */
HC_API int hc_opt_iterations(const hc_opt_result* r);
HC_API int hc_opt_converged(const hc_opt_result* r);
HC_API int hc_opt_heuristic(const hc_opt_result* r);
HC_API size_t hc_opt_cache(const hc_opt_result* r, double* t, size_t cap);
HC_API size_t hc_opt_trace(const hc_opt_result* r, double* objectives, size_t cap);
HC_API size_t hc_opt_warnings(const hc_opt_result* r);
HC_API const char* hc_opt_warning(const hc_opt_result* r, size_t index);
HC_API void hc_opt_result_free(hc_opt_result* r);

typedef struct hc_convexity {
  int inside_convex_regime;
  int all_nonpositive;
  double fm_second_at_zero;
  double min_fs_second;
  double max_fs_second;
} hc_convexity;

HC_API hc_status hc_convexity_probe(const hc_scenario* s, const double* grid, size_t grid_len,
                                    hc_convexity* out);

#ifdef __cplusplus
}
#endif

#endif /* HETCACHE_H */
