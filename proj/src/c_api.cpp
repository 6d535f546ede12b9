#include "bemrt/bemrt.h"

#include <chrono>
#include <cstring>
#include <exception>
#include <new>
#include <set>
#include <sstream>
#include <string>

#include "bemrt/assembly.hpp"
#include "bemrt/bench.hpp"
#include "bemrt/boundary_file.hpp"
#include "bemrt/distribution.hpp"
#include "bemrt/error.hpp"
#include "bemrt/matrix_io.hpp"
#include "bemrt/mesh.hpp"
#include "bemrt/solver.hpp"
#include "bemrt/stl.hpp"

struct bemrt_mesh {
  bemrt::SurfaceMesh mesh;
};

struct bemrt_bc {
  bemrt::BoundarySpec spec;
};

struct bemrt_solution {
  bemrt::Solution solution;
  std::vector<std::string> warnings;
};

struct bemrt_operator {
  bemrt::PrecomputedOperator op;
};

struct bemrt_sweep {
  bemrt::bench::SweepResult result;
};

namespace {

thread_local std::string g_last_error;
thread_local std::size_t g_last_detail = 0;

bemrt_status to_status(bemrt::ErrorCode code) {
  using bemrt::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return BEMRT_ERR_INVALID_ARGUMENT;
    case ErrorCode::Parse: return BEMRT_ERR_PARSE;
    case ErrorCode::EmptyMesh: return BEMRT_ERR_EMPTY_MESH;
    case ErrorCode::DegenerateElement: return BEMRT_ERR_DEGENERATE_ELEMENT;
    case ErrorCode::InvalidMaterial: return BEMRT_ERR_INVALID_MATERIAL;
    case ErrorCode::SingularEvaluation: return BEMRT_ERR_SINGULAR_EVALUATION;
    case ErrorCode::UnsupportedOrder: return BEMRT_ERR_UNSUPPORTED_ORDER;
    case ErrorCode::SingularSystem: return BEMRT_ERR_SINGULAR_SYSTEM;
    case ErrorCode::StaleOperator: return BEMRT_ERR_STALE_OPERATOR;
    case ErrorCode::Io: return BEMRT_ERR_IO;
  }
  return BEMRT_ERR_INTERNAL;
}

bemrt_status fail(bemrt_status status, std::string message, std::size_t detail = 0) {
  g_last_error = std::move(message);
  g_last_detail = detail;
  return status;
}

// Runs `fn`, translating exceptions into status codes.
template <class Fn>
bemrt_status guarded(Fn&& fn) {
  try {
    fn();
    return BEMRT_OK;
  } catch (const bemrt::Error& e) {
    return fail(to_status(e.code()), e.what(), e.detail());
  } catch (const std::bad_alloc&) {
    return fail(BEMRT_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(BEMRT_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(BEMRT_ERR_INTERNAL, "unknown exception");
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw bemrt::Error(bemrt::ErrorCode::InvalidArgument, what);
}

bemrt_solve_options resolve(const bemrt_solve_options* options) {
  bemrt_solve_options o;
  bemrt_solve_options_default(&o);
  return options ? *options : o;
}

bemrt::SelfStrategy to_strategy(int s) {
  if (s == BEMRT_SELF_SUBDIVIDE) return bemrt::SelfStrategy::Subdivide;
  if (s == BEMRT_SELF_PAPER_FAITHFUL) return bemrt::SelfStrategy::PaperFaithful;
  throw bemrt::Error(bemrt::ErrorCode::InvalidArgument, "unknown self-integration strategy");
}

std::string report_text(const bemrt_sweep* sweep, int format) {
  require(format == BEMRT_REPORT_CSV || format == BEMRT_REPORT_TABLE, "unknown report format");
  std::ostringstream os;
  bemrt::bench::emit_report(os, sweep->result.records,
                            format == BEMRT_REPORT_CSV ? bemrt::bench::ReportFormat::Csv
                                                       : bemrt::bench::ReportFormat::Table);
  return os.str();
}

}  // namespace

extern "C" {

const char* bemrt_version(void) { return "1.0.0"; }
const char* bemrt_last_error(void) { return g_last_error.c_str(); }
size_t bemrt_last_error_detail(void) { return g_last_detail; }

const char* bemrt_status_string(bemrt_status status) {
  switch (status) {
    case BEMRT_OK: return "ok";
    case BEMRT_ERR_INVALID_ARGUMENT: return bemrt::to_string(bemrt::ErrorCode::InvalidArgument);
    case BEMRT_ERR_PARSE: return bemrt::to_string(bemrt::ErrorCode::Parse);
    case BEMRT_ERR_EMPTY_MESH: return bemrt::to_string(bemrt::ErrorCode::EmptyMesh);
    case BEMRT_ERR_DEGENERATE_ELEMENT: return bemrt::to_string(bemrt::ErrorCode::DegenerateElement);
    case BEMRT_ERR_INVALID_MATERIAL: return bemrt::to_string(bemrt::ErrorCode::InvalidMaterial);
    case BEMRT_ERR_SINGULAR_EVALUATION: return bemrt::to_string(bemrt::ErrorCode::SingularEvaluation);
    case BEMRT_ERR_UNSUPPORTED_ORDER: return bemrt::to_string(bemrt::ErrorCode::UnsupportedOrder);
    case BEMRT_ERR_SINGULAR_SYSTEM: return bemrt::to_string(bemrt::ErrorCode::SingularSystem);
    case BEMRT_ERR_STALE_OPERATOR: return bemrt::to_string(bemrt::ErrorCode::StaleOperator);
    case BEMRT_ERR_IO: return bemrt::to_string(bemrt::ErrorCode::Io);
    case BEMRT_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

// ---- mesh -------------------------------------------------------------------

bemrt_status bemrt_mesh_generate_cube(double side, int k, bemrt_mesh** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    *out = new bemrt_mesh{bemrt::generate_cube(side, k)};
  });
}

bemrt_status bemrt_mesh_load_stl(const char* path, bemrt_mesh** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new bemrt_mesh{bemrt::load_stl_file(path)};
  });
}

bemrt_status bemrt_mesh_load_stl_memory(const void* bytes, size_t size, bemrt_mesh** out) {
  return guarded([&] {
    require((bytes || size == 0) && out, "null argument");
    const auto* p = static_cast<const std::byte*>(bytes);
    *out = new bemrt_mesh{bemrt::load_stl(std::span<const std::byte>(p, size))};
  });
}

bemrt_status bemrt_mesh_write_stl(const bemrt_mesh* mesh, const char* path, int ascii) {
  return guarded([&] {
    require(mesh && path, "null argument");
    bemrt::write_stl_file(mesh->mesh, path, ascii ? bemrt::StlFormat::Ascii : bemrt::StlFormat::Binary);
  });
}

void bemrt_mesh_free(bemrt_mesh* mesh) { delete mesh; }

size_t bemrt_mesh_element_count(const bemrt_mesh* mesh) { return mesh ? mesh->mesh.size() : 0; }

bemrt_status bemrt_mesh_element(const bemrt_mesh* mesh, size_t element, double* centroid, double* normal,
                                double* area) {
  return guarded([&] {
    require(mesh != nullptr, "null mesh");
    require(element < mesh->mesh.size(), "element index out of range");
    const bemrt::Element& e = mesh->mesh[element];
    for (int a = 0; a < 3; ++a) {
      if (centroid) centroid[a] = e.centroid[a];
      if (normal) normal[a] = e.normal[a];
    }
    if (area) *area = e.area;
  });
}

bemrt_status bemrt_mesh_validate(const bemrt_mesh* mesh, bemrt_validation* out) {
  return guarded([&] {
    require(mesh && out, "null argument");
    const bemrt::ValidationReport r = bemrt::validate(mesh->mesh);
    *out = bemrt_validation{r.element_count, r.degenerate.size(), r.closure_residual, r.total_area,
                            r.min_area,      r.max_area,          r.looks_closed() ? 1 : 0};
  });
}

// ---- boundary conditions ----------------------------------------------------

bemrt_status bemrt_bc_load(const char* path, const bemrt_mesh* mesh, bemrt_bc** out) {
  return guarded([&] {
    require(path && mesh && out, "null argument");
    *out = new bemrt_bc{bemrt::load_boundary_file(path, mesh->mesh)};
  });
}

bemrt_status bemrt_bc_parse(const char* text, const bemrt_mesh* mesh, bemrt_bc** out) {
  return guarded([&] {
    require(text && mesh && out, "null argument");
    *out = new bemrt_bc{bemrt::parse_boundary_file(text, mesh->mesh)};
  });
}

bemrt_status bemrt_bc_cube_sample(const bemrt_mesh* mesh, double side, double load, bemrt_bc** out) {
  return guarded([&] {
    require(mesh && out, "null argument");
    *out = new bemrt_bc{bemrt::cube_sample_bc(mesh->mesh, side, load)};
  });
}

bemrt_status bemrt_bc_scale_values(bemrt_bc* bc, double factor) {
  return guarded([&] {
    require(bc != nullptr, "null boundary spec");
    for (double& v : bc->spec.values) v *= factor;
  });
}

size_t bemrt_bc_dof_count(const bemrt_bc* bc) { return bc ? bc->spec.size() : 0; }

size_t bemrt_bc_displacement_known_count(const bemrt_bc* bc) {
  return bc ? bc->spec.displacement_known_count() : 0;
}

void bemrt_bc_free(bemrt_bc* bc) { delete bc; }

// ---- solve --------------------------------------------------------------------

void bemrt_solve_options_default(bemrt_solve_options* o) {
  if (!o) return;
  *o = bemrt_solve_options{200000.0, 0.33, 16, BEMRT_SELF_SUBDIVIDE, 1, 32};
}

bemrt_status bemrt_solve(const bemrt_mesh* mesh, const bemrt_bc* bc, const bemrt_solve_options* options,
                         bemrt_solution** out, bemrt_phase_timings* timings) {
  return guarded([&] {
    require(mesh && bc && out, "null argument");
    const bemrt_solve_options o = resolve(options);
    const bemrt::Material mat = bemrt::make_material(o.youngs_modulus, o.poisson_ratio);
    const bemrt::QuadratureRule rule = bemrt::gauss_rule(o.quad_order);
    bemrt::DistributedResult r = bemrt::distributed_assemble_solve(
        mesh->mesh, mat, bc->spec, o.workers, o.block_size, rule, to_strategy(o.self_strategy));
    if (timings) *timings = {r.timings.assembly, r.timings.barrier, r.timings.solve, r.timings.total};
    *out = new bemrt_solution{std::move(r.solution), std::move(r.warnings)};
  });
}

bemrt_status bemrt_dump_matrices(const bemrt_mesh* mesh, const bemrt_solve_options* options,
                                 const char* h_path, const char* g_path) {
  return guarded([&] {
    require(mesh != nullptr, "null mesh");
    const bemrt_solve_options o = resolve(options);
    const bemrt::InfluenceMatrices hg =
        bemrt::assemble(mesh->mesh, bemrt::make_material(o.youngs_modulus, o.poisson_ratio),
                        bemrt::gauss_rule(o.quad_order), to_strategy(o.self_strategy));
    if (h_path) bemrt::write_matrix_file(h_path, hg.H);
    if (g_path) bemrt::write_matrix_file(g_path, hg.G);
  });
}

size_t bemrt_solution_dof_count(const bemrt_solution* sol) { return sol ? sol->solution.size() : 0; }

size_t bemrt_solution_copy_u(const bemrt_solution* sol, double* buffer, size_t len) {
  if (!sol || !buffer) return 0;
  const size_t n = std::min(len, sol->solution.size());
  std::memcpy(buffer, sol->solution.u.data(), n * sizeof(double));
  return n;
}

size_t bemrt_solution_copy_t(const bemrt_solution* sol, double* buffer, size_t len) {
  if (!sol || !buffer) return 0;
  const size_t n = std::min(len, sol->solution.size());
  std::memcpy(buffer, sol->solution.t.data(), n * sizeof(double));
  return n;
}

bemrt_status bemrt_solution_net_force(const bemrt_solution* sol, const bemrt_mesh* mesh, double force[3]) {
  return guarded([&] {
    require(sol && mesh && force, "null argument");
    const bemrt::Vec3 f = bemrt::equilibrium_residual(sol->solution, mesh->mesh);
    force[0] = f.x;
    force[1] = f.y;
    force[2] = f.z;
  });
}

bemrt_status bemrt_solution_write_csv(const bemrt_solution* sol, const bemrt_mesh* mesh, const char* path) {
  return guarded([&] {
    require(sol && mesh && path, "null argument");
    bemrt::write_solution_csv(std::filesystem::path(path), sol->solution, mesh->mesh);
  });
}

uint64_t bemrt_solution_hash(const bemrt_solution* sol) {
  return sol ? bemrt::bench::hash_solution(sol->solution) : 0;
}

size_t bemrt_solution_warning_count(const bemrt_solution* sol) { return sol ? sol->warnings.size() : 0; }

const char* bemrt_solution_warning(const bemrt_solution* sol, size_t index) {
  if (!sol || index >= sol->warnings.size()) return nullptr;
  return sol->warnings[index].c_str();
}

void bemrt_solution_free(bemrt_solution* sol) { delete sol; }

// ---- precomputed operator -------------------------------------------------------

bemrt_status bemrt_precompute(const bemrt_mesh* mesh, const bemrt_bc* bc, const bemrt_solve_options* options,
                              bemrt_operator** out) {
  return guarded([&] {
    require(mesh && bc && out, "null argument");
    const bemrt_solve_options o = resolve(options);
    const bemrt::InfluenceMatrices hg =
        bemrt::assemble(mesh->mesh, bemrt::make_material(o.youngs_modulus, o.poisson_ratio),
                        bemrt::gauss_rule(o.quad_order), to_strategy(o.self_strategy));
    *out = new bemrt_operator{bemrt::precompute_operator(hg, bc->spec)};
  });
}

bemrt_status bemrt_operator_save(const bemrt_operator* op, const char* path) {
  return guarded([&] {
    require(op && path, "null argument");
    bemrt::save_operator(op->op, path);
  });
}

bemrt_status bemrt_operator_load(const char* path, bemrt_operator** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new bemrt_operator{bemrt::load_operator(path)};
  });
}

size_t bemrt_operator_dof_count(const bemrt_operator* op) { return op ? op->op.kinds.size() : 0; }

bemrt_status bemrt_operator_apply(const bemrt_operator* op, const bemrt_bc* bc, bemrt_solution** out,
                                  double* seconds) {
  return guarded([&] {
    require(op && bc && out, "null argument");
    const auto t0 = std::chrono::steady_clock::now();
    bemrt::Solution sol = bemrt::apply_precomputed(op->op, bc->spec);
    if (seconds) *seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    *out = new bemrt_solution{std::move(sol), {}};
  });
}

void bemrt_operator_free(bemrt_operator* op) { delete op; }

// ---- benchmark ------------------------------------------------------------------

void bemrt_sweep_config_default(bemrt_sweep_config* c) {
  if (!c) return;
  static const size_t kWorkers[] = {1};
  static const size_t kBlocks[] = {32};
  *c = bemrt_sweep_config{};
  c->side = 4.0;
  c->k = 2;
  c->load = 4.0;
  c->youngs_modulus = 200000.0;
  c->poisson_ratio = 0.33;
  c->quad_order = 16;
  c->self_strategy = BEMRT_SELF_SUBDIVIDE;
  c->mode = BEMRT_MODE_DIRECT;
  c->trials = 4;
  c->workers = kWorkers;
  c->worker_count = 1;
  c->block_sizes = kBlocks;
  c->block_size_count = 1;
  c->dummy_size = 0;
  c->seed = 20140314;
}

bemrt_status bemrt_sweep_run(const bemrt_sweep_config* c, bemrt_sweep** out) {
  return guarded([&] {
    require(c && out, "null argument");
    require(c->workers && c->worker_count > 0, "worker list is empty");
    require(c->block_sizes && c->block_size_count > 0, "block-size list is empty");
    require(c->mode >= BEMRT_MODE_DIRECT && c->mode <= BEMRT_MODE_DUMMY, "unknown mode");
    bemrt::bench::BenchConfig cfg;
    cfg.problem.side = c->side;
    cfg.problem.k = c->k;
    cfg.problem.load = c->load;
    if (c->mesh_path) cfg.problem.mesh_path = c->mesh_path;
    if (c->bc_path) cfg.problem.bc_path = c->bc_path;
    cfg.E = c->youngs_modulus;
    cfg.nu = c->poisson_ratio;
    cfg.quad_order = c->quad_order;
    cfg.self_strategy = to_strategy(c->self_strategy);
    cfg.mode = static_cast<bemrt::bench::SolveMode>(c->mode);
    cfg.trials = c->trials;
    cfg.workers.assign(c->workers, c->workers + c->worker_count);
    cfg.block_sizes.assign(c->block_sizes, c->block_sizes + c->block_size_count);
    cfg.dummy_size = c->dummy_size;
    cfg.seed = c->seed;
    *out = new bemrt_sweep{bemrt::bench::run_sweep(cfg)};
  });
}

size_t bemrt_sweep_record_count(const bemrt_sweep* s) { return s ? s->result.records.size() : 0; }

size_t bemrt_sweep_cell_count(const bemrt_sweep* s) {
  if (!s || s->result.records.empty()) return 0;
  return bemrt::bench::summarize(s->result.records).cells.size();
}

bemrt_status bemrt_sweep_cell(const bemrt_sweep* s, size_t index, bemrt_cell_summary* out) {
  return guarded([&] {
    require(s && out, "null argument");
    const auto summary = bemrt::bench::summarize(s->result.records);
    require(index < summary.cells.size(), "cell index out of range");
    const auto& c = summary.cells[index];
    *out = bemrt_cell_summary{c.config_id, c.workers, c.block_size, c.trial_seconds.size(), c.mean,
                              c.result_hash};
  });
}

size_t bemrt_sweep_failure_count(const bemrt_sweep* s) { return s ? s->result.failures.size() : 0; }

const char* bemrt_sweep_failure(const bemrt_sweep* s, size_t index) {
  if (!s || index >= s->result.failures.size()) return nullptr;
  return s->result.failures[index].message.c_str();
}

int bemrt_sweep_hashes_consistent(const bemrt_sweep* s) {
  if (!s) return 0;
  std::set<uint64_t> hashes;
  for (const auto& r : s->result.records) hashes.insert(r.result_hash);
  return hashes.size() <= 1 ? 1 : 0;
}

bemrt_status bemrt_sweep_write_report(const bemrt_sweep* s, const char* path, int format) {
  return guarded([&] {
    require(s && path, "null argument");
    require(format == BEMRT_REPORT_CSV || format == BEMRT_REPORT_TABLE, "unknown report format");
    bemrt::bench::emit_report(std::filesystem::path(path), s->result.records,
                              format == BEMRT_REPORT_CSV ? bemrt::bench::ReportFormat::Csv
                                                         : bemrt::bench::ReportFormat::Table);
  });
}

bemrt_status bemrt_sweep_report_string(const bemrt_sweep* s, int format, char* buffer, size_t len,
                                       size_t* needed) {
  return guarded([&] {
    require(s != nullptr, "null sweep");
    const std::string text = report_text(s, format);
    if (needed) *needed = text.size();
    if (buffer && len > 0) {
      const size_t n = std::min(len - 1, text.size());
      std::memcpy(buffer, text.data(), n);
      buffer[n] = '\0';
    }
  });
}

void bemrt_sweep_free(bemrt_sweep* s) { delete s; }

bemrt_status bemrt_realtime_verdict(double seconds, bemrt_verdict* out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    const auto v = bemrt::bench::realtime_verdict(seconds);
    *out = bemrt_verdict{v.rate, v.graphics_ok ? 1 : 0, v.haptics_ok ? 1 : 0};
  });
}

bemrt_status bemrt_estimate_nonlinear(double linear_seconds, int iterations, double* seconds,
                                      bemrt_verdict* verdict) {
  return guarded([&] {
    const auto e = bemrt::bench::estimate_nonlinear(linear_seconds, iterations);
    if (seconds) *seconds = e.seconds;
    if (verdict) *verdict = bemrt_verdict{e.verdict.rate, e.verdict.graphics_ok ? 1 : 0, e.verdict.haptics_ok ? 1 : 0};
  });
}

}  // extern "C"
