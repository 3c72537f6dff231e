#ifndef SOHB_SOHB_H
#define SOHB_SOHB_H

/* C interface of the sohb library. Every fallible call returns a status
 * code; on failure the message is available from sohb_last_error() on the
 * calling thread until the next failing call. Handles are opaque and owned
 * by the caller, who releases them with the matching *_free function. */

#include <stddef.h>
#include <stdint.h>

#if defined(SOHB_BUILDING_LIBRARY)
#define SOHB_API __attribute__((visibility("default")))
#else
#define SOHB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sohb_status {
    SOHB_OK = 0,
    SOHB_ERR_DEGENERATE_AVERAGE = 1,
    SOHB_ERR_BOX_TOO_SMALL = 2,
    SOHB_ERR_NO_CONVERGENCE = 3,
    SOHB_ERR_DOMAIN = 4,
    SOHB_ERR_SIGN_DISCONTINUITY = 5,
    SOHB_ERR_CFL_VIOLATION = 6,
    SOHB_ERR_PARSE = 7,
    SOHB_ERR_SCHEMA = 8,
    SOHB_ERR_TOO_FEW_SAMPLES = 9,
    SOHB_ERR_IO = 10,
    SOHB_ERR_INVALID_ARGUMENT = 11,
    SOHB_ERR_INTERNAL = 99
} sohb_status;

typedef enum sohb_model { SOHB_MODEL_GRADUAL = 0, SOHB_MODEL_JUMP = 1 } sohb_model;

typedef struct sohb_config sohb_config;
typedef struct sohb_sim sohb_sim;

SOHB_API const char* sohb_version(void);
SOHB_API const char* sohb_last_error(void);
/* "Ok", "DegenerateAverage", ... */
SOHB_API const char* sohb_status_name(int status);

/* ---- configuration ---------------------------------------------------- */

/* Both validate against the run-configuration schema and fill defaults.
 * A nonzero has_seed replaces the document's seed before validation. */
SOHB_API int sohb_config_load(const char* path, int has_seed, uint64_t seed, sohb_config** out);
SOHB_API int sohb_config_parse(const char* json_text, int has_seed, uint64_t seed, sohb_config** out);
SOHB_API void sohb_config_free(sohb_config* config);

/* Overrides applied after loading; each re-validates the document. */
SOHB_API int sohb_config_set_mode(sohb_config* config, const char* mode);
SOHB_API int sohb_config_set_output(sohb_config* config, const char* dir, const char* prefix);

/* Copies the resolved configuration as JSON into buf (NUL-terminated) when
 * cap is large enough; *needed receives the size including the NUL. */
SOHB_API int sohb_config_json(const sohb_config* config, char* buf, size_t cap, size_t* needed);

/* ---- runs ------------------------------------------------------------- */

typedef void (*sohb_output_callback)(const char* path, void* user);

/* Executes the configuration in its mode, writing data files and metadata
 * sidecars. on_output (may be NULL) receives each written path. *passed
 * (may be NULL) is 0 only when a validate-mode run had a failing criterion. */
SOHB_API int sohb_run(const sohb_config* config, sohb_output_callback on_output, void* user, int* passed);

/* ---- particle simulation handle --------------------------------------- */

SOHB_API int sohb_sim_create(const sohb_config* config, sohb_sim** out);
SOHB_API void sohb_sim_free(sohb_sim* sim);
/* Gradual model: `steps` time steps of size dt. Jump model: advances the
 * event loop by steps * dt in time. */
SOHB_API int sohb_sim_advance(sohb_sim* sim, uint64_t steps);
SOHB_API int sohb_sim_size(const sohb_sim* sim, size_t* n);
SOHB_API int sohb_sim_time(const sohb_sim* sim, double* t);
/* out: 3 * n doubles. */
SOHB_API int sohb_sim_positions(const sohb_sim* sim, double* out);
/* out: 9 * n doubles, row-major rotation matrices for either representation. */
SOHB_API int sohb_sim_rotations(const sohb_sim* sim, double* out);
SOHB_API int sohb_sim_order_parameter(const sohb_sim* sim, double* value);
SOHB_API int sohb_sim_stats(const sohb_sim* sim, uint64_t* steps, uint64_t* events, uint64_t* degenerate_targets);

/* ---- constants ------------------------------------------------------- */

typedef struct sohb_constants {
    double D;
    int model; /* sohb_model */
    double c1, c2, c2p, c3, c4;
} sohb_constants;

SOHB_API int sohb_c1(double D, double* out);
SOHB_API int sohb_gci_constants(double D, int model, sohb_constants* out);
/* "D,model,c1,c2,c2p,c3,c4" */
SOHB_API const char* sohb_constants_csv_header(void);
/* One CSV row in shortest round-trip formatting; same sizing contract as
 * sohb_config_json. */
SOHB_API int sohb_constants_csv_row(const sohb_constants* k, char* buf, size_t cap, size_t* needed);
SOHB_API int sohb_format_double(double x, char* buf, size_t cap, size_t* needed);

/* ---- rotations (row-major 3x3 and 4x4, quaternions as w,x,y,z) --------- */

SOHB_API int sohb_quat_to_rot(const double q[4], double r[9]);
SOHB_API int sohb_polar_rotation(const double m[9], double r[9]);
SOHB_API int sohb_max_eigvec(const double q[16], double out[4]);

/* ---- acceptance criteria --------------------------------------------- */

typedef void (*sohb_criterion_callback)(int id, const char* name, int passed, double seconds, const char* detail,
                                        void* user);

SOHB_API int sohb_criterion_count(void);
SOHB_API const char* sohb_criterion_name(int id);
/* Runs the listed criteria (all when n_ids is 0) and reports each through
 * cb (may be NULL). *all_passed receives 1 when every criterion passed. */
SOHB_API int sohb_validate(const int* ids, size_t n_ids, uint64_t seed, sohb_criterion_callback cb, void* user,
                           int* all_passed);

#ifdef __cplusplus
}
#endif

#endif /* SOHB_SOHB_H */
