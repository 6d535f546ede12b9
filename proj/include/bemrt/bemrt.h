/*
 * C interface to the bemrt boundary-element engine and benchmark harness.
 *
 * All objects are opaque handles created by bemrt_*_create/load/run style
 * calls and released with the matching bemrt_*_free. Every fallible call
 * returns a bemrt_status; on failure bemrt_last_error() holds a message for
 * the calling thread until its next failing call.
 */
#ifndef BEMRT_BEMRT_H
#define BEMRT_BEMRT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define BEMRT_API __declspec(dllexport)
#else
#define BEMRT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bemrt_status {
  BEMRT_OK = 0,
  BEMRT_ERR_INVALID_ARGUMENT = 1,
  BEMRT_ERR_PARSE = 2,
  BEMRT_ERR_EMPTY_MESH = 3,
  BEMRT_ERR_DEGENERATE_ELEMENT = 4,
  BEMRT_ERR_INVALID_MATERIAL = 5,
  BEMRT_ERR_SINGULAR_EVALUATION = 6,
  BEMRT_ERR_UNSUPPORTED_ORDER = 7,
  BEMRT_ERR_SINGULAR_SYSTEM = 8,
  BEMRT_ERR_STALE_OPERATOR = 9,
  BEMRT_ERR_IO = 10,
  BEMRT_ERR_INTERNAL = 11
} bemrt_status;

typedef enum bemrt_self_strategy {
  BEMRT_SELF_SUBDIVIDE = 0,
  BEMRT_SELF_PAPER_FAITHFUL = 1
} bemrt_self_strategy;

typedef enum bemrt_mode {
  BEMRT_MODE_DIRECT = 0,
  BEMRT_MODE_PRECOMPUTED = 1,
  BEMRT_MODE_DUMMY = 2
} bemrt_mode;

typedef enum bemrt_report_format {
  BEMRT_REPORT_CSV = 0,
  BEMRT_REPORT_TABLE = 1
} bemrt_report_format;

typedef struct bemrt_mesh bemrt_mesh;
typedef struct bemrt_bc bemrt_bc;
typedef struct bemrt_solution bemrt_solution;
typedef struct bemrt_operator bemrt_operator;
typedef struct bemrt_sweep bemrt_sweep;

BEMRT_API const char* bemrt_version(void);
BEMRT_API const char* bemrt_last_error(void);
BEMRT_API const char* bemrt_status_string(bemrt_status status);
/* Extra integer carried by the last error: byte offset for STL parse errors,
 * line number for boundary files, pivot index for singular systems. */
BEMRT_API size_t bemrt_last_error_detail(void);

/* ---- mesh ---------------------------------------------------------------- */

BEMRT_API bemrt_status bemrt_mesh_generate_cube(double side, int k, bemrt_mesh** out);
BEMRT_API bemrt_status bemrt_mesh_load_stl(const char* path, bemrt_mesh** out);
BEMRT_API bemrt_status bemrt_mesh_load_stl_memory(const void* bytes, size_t size, bemrt_mesh** out);
BEMRT_API bemrt_status bemrt_mesh_write_stl(const bemrt_mesh* mesh, const char* path, int ascii);
BEMRT_API void bemrt_mesh_free(bemrt_mesh* mesh);

BEMRT_API size_t bemrt_mesh_element_count(const bemrt_mesh* mesh);
/* centroid[3], normal[3], area: any may be NULL. */
BEMRT_API bemrt_status bemrt_mesh_element(const bemrt_mesh* mesh, size_t element, double* centroid,
                                          double* normal, double* area);

typedef struct bemrt_validation {
  size_t elements;
  size_t degenerate;
  double closure_residual;
  double total_area;
  double min_area;
  double max_area;
  int closed;
} bemrt_validation;

BEMRT_API bemrt_status bemrt_mesh_validate(const bemrt_mesh* mesh, bemrt_validation* out);

/* ---- boundary conditions -------------------------------------------------- */

BEMRT_API bemrt_status bemrt_bc_load(const char* path, const bemrt_mesh* mesh, bemrt_bc** out);
BEMRT_API bemrt_status bemrt_bc_parse(const char* text, const bemrt_mesh* mesh, bemrt_bc** out);
/* Fixed face y = 0, traction (0, load, 0) on y = side, traction-free elsewhere. */
BEMRT_API bemrt_status bemrt_bc_cube_sample(const bemrt_mesh* mesh, double side, double load, bemrt_bc** out);
BEMRT_API bemrt_status bemrt_bc_scale_values(bemrt_bc* bc, double factor);
BEMRT_API size_t bemrt_bc_dof_count(const bemrt_bc* bc);
BEMRT_API size_t bemrt_bc_displacement_known_count(const bemrt_bc* bc);
BEMRT_API void bemrt_bc_free(bemrt_bc* bc);

/* ---- solve ------------------------------------------------------------- */

typedef struct bemrt_solve_options {
  double youngs_modulus;  /* N/mm^2, default 200000 */
  double poisson_ratio;   /* default 0.33 */
  int quad_order;         /* 4, 8, 16 (default) or 32 */
  int self_strategy;      /* bemrt_self_strategy */
  size_t workers;         /* default 1 */
  size_t block_size;      /* default 32 */
} bemrt_solve_options;

typedef struct bemrt_phase_timings {
  double assembly;
  double barrier;
  double solve;
  double total;
} bemrt_phase_timings;

BEMRT_API void bemrt_solve_options_default(bemrt_solve_options* options);

/* options and timings may be NULL. */
BEMRT_API bemrt_status bemrt_solve(const bemrt_mesh* mesh, const bemrt_bc* bc,
                                   const bemrt_solve_options* options, bemrt_solution** out,
                                   bemrt_phase_timings* timings);

/* Writes H and G in the binary matrix format. Either path may be NULL. */
BEMRT_API bemrt_status bemrt_dump_matrices(const bemrt_mesh* mesh, const bemrt_solve_options* options,
                                           const char* h_path, const char* g_path);

BEMRT_API size_t bemrt_solution_dof_count(const bemrt_solution* sol);
/* Copy min(len, dofs) values. */
BEMRT_API size_t bemrt_solution_copy_u(const bemrt_solution* sol, double* buffer, size_t len);
BEMRT_API size_t bemrt_solution_copy_t(const bemrt_solution* sol, double* buffer, size_t len);
BEMRT_API bemrt_status bemrt_solution_net_force(const bemrt_solution* sol, const bemrt_mesh* mesh,
                                                double force[3]);
BEMRT_API bemrt_status bemrt_solution_write_csv(const bemrt_solution* sol, const bemrt_mesh* mesh,
                                                const char* path);
BEMRT_API uint64_t bemrt_solution_hash(const bemrt_solution* sol);
BEMRT_API size_t bemrt_solution_warning_count(const bemrt_solution* sol);
BEMRT_API const char* bemrt_solution_warning(const bemrt_solution* sol, size_t index);
BEMRT_API void bemrt_solution_free(bemrt_solution* sol);

/* ---- precomputed operator ---------------------------------------------------- */

BEMRT_API bemrt_status bemrt_precompute(const bemrt_mesh* mesh, const bemrt_bc* bc,
                                        const bemrt_solve_options* options, bemrt_operator** out);
BEMRT_API bemrt_status bemrt_operator_save(const bemrt_operator* op, const char* path);
BEMRT_API bemrt_status bemrt_operator_load(const char* path, bemrt_operator** out);
BEMRT_API size_t bemrt_operator_dof_count(const bemrt_operator* op);
/* seconds (may be NULL) receives the wall-clock time of the online step. */
BEMRT_API bemrt_status bemrt_operator_apply(const bemrt_operator* op, const bemrt_bc* bc,
                                            bemrt_solution** out, double* seconds);
BEMRT_API void bemrt_operator_free(bemrt_operator* op);

/* ---- benchmark ------------------------------------------------------------ */

typedef struct bemrt_sweep_config {
  double side;              /* cube problem, used when mesh_path is NULL */
  int k;
  double load;
  const char* mesh_path;    /* STL; requires bc_path */
  const char* bc_path;      /* optional for the cube */
  double youngs_modulus;
  double poisson_ratio;
  int quad_order;
  int self_strategy;
  int mode;                 /* bemrt_mode */
  int trials;
  const size_t* workers;
  size_t worker_count;
  const size_t* block_sizes;
  size_t block_size_count;
  size_t dummy_size;
  uint64_t seed;
} bemrt_sweep_config;

typedef struct bemrt_cell_summary {
  size_t config_id;
  size_t workers;
  size_t block_size;
  size_t trials;
  double mean_seconds;
  uint64_t result_hash;
} bemrt_cell_summary;

typedef struct bemrt_verdict {
  double rate;
  int graphics_ok;
  int haptics_ok;
} bemrt_verdict;

/* Cube 4 mm, k = 2, load 4, direct mode, 4 trials, workers {1}, blocks {32}. */
BEMRT_API void bemrt_sweep_config_default(bemrt_sweep_config* config);
BEMRT_API bemrt_status bemrt_sweep_run(const bemrt_sweep_config* config, bemrt_sweep** out);
BEMRT_API size_t bemrt_sweep_record_count(const bemrt_sweep* sweep);
BEMRT_API size_t bemrt_sweep_cell_count(const bemrt_sweep* sweep);
BEMRT_API bemrt_status bemrt_sweep_cell(const bemrt_sweep* sweep, size_t index, bemrt_cell_summary* out);
BEMRT_API size_t bemrt_sweep_failure_count(const bemrt_sweep* sweep);
BEMRT_API const char* bemrt_sweep_failure(const bemrt_sweep* sweep, size_t index);
/* 1 when every measured record of the sweep carries the same result hash. */
BEMRT_API int bemrt_sweep_hashes_consistent(const bemrt_sweep* sweep);
BEMRT_API bemrt_status bemrt_sweep_write_report(const bemrt_sweep* sweep, const char* path, int format);
/* Copies the report (NUL-terminated, truncated to len) and stores the full
 * length excluding the terminator in *needed when non-NULL. */
BEMRT_API bemrt_status bemrt_sweep_report_string(const bemrt_sweep* sweep, int format, char* buffer,
                                                 size_t len, size_t* needed);
BEMRT_API void bemrt_sweep_free(bemrt_sweep* sweep);

BEMRT_API bemrt_status bemrt_realtime_verdict(double seconds, bemrt_verdict* out);
BEMRT_API bemrt_status bemrt_estimate_nonlinear(double linear_seconds, int iterations, double* seconds,
                                                bemrt_verdict* verdict);

#ifdef __cplusplus
}
#endif

#endif /* BEMRT_BEMRT_H */
