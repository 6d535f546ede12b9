// Command-line front end. Talks to the engine only through bemrt.h.
#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "bemrt/bemrt.h"

namespace {

enum Exit { kOk = 0, kUsage = 1, kNumerical = 2, kIo = 3 };

int exit_for(bemrt_status s) {
  switch (s) {
    case BEMRT_OK: return kOk;
    case BEMRT_ERR_INVALID_ARGUMENT:
    case BEMRT_ERR_INVALID_MATERIAL:
    case BEMRT_ERR_UNSUPPORTED_ORDER: return kUsage;
    case BEMRT_ERR_PARSE:
    case BEMRT_ERR_EMPTY_MESH:
    case BEMRT_ERR_IO: return kIo;
    default: return kNumerical;
  }
}

struct Failure {
  int code;
};

void check(bemrt_status s) {
  if (s == BEMRT_OK) return;
  std::cerr << "error (" << bemrt_status_string(s) << "): " << bemrt_last_error() << "\n";
  throw Failure{exit_for(s)};
}

[[noreturn]] void usage(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  throw Failure{kUsage};
}

template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
  T** out() { return &p; }
  T* get() const { return p; }
};

using Mesh = Handle<bemrt_mesh, bemrt_mesh_free>;
using Bc = Handle<bemrt_bc, bemrt_bc_free>;
using Sol = Handle<bemrt_solution, bemrt_solution_free>;
using Op = Handle<bemrt_operator, bemrt_operator_free>;
using Sweep = Handle<bemrt_sweep, bemrt_sweep_free>;

struct ProblemArgs {
  std::string mesh;
  std::string cube;
  std::string bc;
  double load = 4.0;

  bool is_cube() const { return mesh.empty(); }

  std::pair<double, int> cube_shape() const {
    const std::string s = cube.empty() ? "4,2" : cube;
    const auto comma = s.find(',');
    if (comma == std::string::npos) usage("--cube expects <side,k>");
    try {
      std::size_t used = 0;
      const double side = std::stod(s.substr(0, comma), &used);
      const int k = std::stoi(s.substr(comma + 1));
      if (!(side > 0.0) || k < 1) usage("--cube needs side > 0 and k >= 1");
      return {side, k};
    } catch (const std::logic_error&) {
      usage("--cube expects <side,k>");
    }
  }

  void load_mesh(Mesh& m) const {
    if (is_cube()) {
      const auto [side, k] = cube_shape();
      check(bemrt_mesh_generate_cube(side, k, m.out()));
    } else {
      check(bemrt_mesh_load_stl(mesh.c_str(), m.out()));
    }
  }

  void load_bc(const Mesh& m, Bc& b) const {
    if (!bc.empty()) {
      check(bemrt_bc_load(bc.c_str(), m.get(), b.out()));
    } else if (is_cube()) {
      check(bemrt_bc_cube_sample(m.get(), cube_shape().first, load, b.out()));
    } else {
      usage("--bc is required with --mesh");
    }
  }
};

void add_problem(CLI::App* cmd, ProblemArgs& p, bool needs_bc) {
  auto* mesh = cmd->add_option("--mesh", p.mesh, "STL surface mesh");
  auto* cube = cmd->add_option("--cube", p.cube, "generated cube <side,k> (default 4,2)");
  mesh->excludes(cube);
  if (needs_bc) {
    cmd->add_option("--bc", p.bc, "boundary condition file (cube default: fixed y=0, load on y=side)");
    cmd->add_option("--load", p.load, "traction on the loaded cube face")->capture_default_str();
  }
}

struct SolverArgs {
  int quad = 16;
  std::string self_quad = "subdivide";
  double E = 200000.0;
  double nu = 0.33;

  bemrt_solve_options options() const {
    bemrt_solve_options o;
    bemrt_solve_options_default(&o);
    o.quad_order = quad;
    o.self_strategy = self_quad == "paper-faithful" ? BEMRT_SELF_PAPER_FAITHFUL : BEMRT_SELF_SUBDIVIDE;
    o.youngs_modulus = E;
    o.poisson_ratio = nu;
    return o;
  }
};

void add_solver(CLI::App* cmd, SolverArgs& s) {
  cmd->add_option("--quad", s.quad, "Gauss points per direction")
      ->check(CLI::IsMember({4, 8, 16, 32}))
      ->capture_default_str();
  cmd->add_option("--self-quad", s.self_quad, "self-element G integration")
      ->check(CLI::IsMember({"subdivide", "paper-faithful"}))
      ->capture_default_str();
  cmd->add_option("--E", s.E, "Young's modulus")->capture_default_str();
  cmd->add_option("--nu", s.nu, "Poisson's ratio")->capture_default_str();
}

void print_solution(const bemrt_solution* sol, const bemrt_mesh* mesh) {
  const size_t n = bemrt_solution_dof_count(sol);
  std::vector<double> u(n), t(n);
  bemrt_solution_copy_u(sol, u.data(), n);
  bemrt_solution_copy_t(sol, t.data(), n);
  double umax = 0.0, tmax = 0.0;
  for (size_t i = 0; i < n; ++i) {
    umax = std::max(umax, std::fabs(u[i]));
    tmax = std::max(tmax, std::fabs(t[i]));
  }
  double f[3];
  check(bemrt_solution_net_force(sol, mesh, f));
  std::printf("dofs            %zu\n", n);
  std::printf("max |u|         %.6e\n", umax);
  std::printf("max |t|         %.6e\n", tmax);
  std::printf("net force       %.6e %.6e %.6e\n", f[0], f[1], f[2]);
  std::printf("result hash     %016llx\n", static_cast<unsigned long long>(bemrt_solution_hash(sol)));
  for (size_t i = 0; i < bemrt_solution_warning_count(sol); ++i)
    std::fprintf(stderr, "warning: %s\n", bemrt_solution_warning(sol, i));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary-element elastostatics solver and timing harness"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(bemrt_version()));

  // solve
  ProblemArgs solve_p;
  SolverArgs solve_s;
  std::size_t solve_workers = 1, solve_block = 32;
  std::string solve_out, dump_h, dump_g;
  auto* solve = app.add_subcommand("solve", "assemble and solve one problem");
  add_problem(solve, solve_p, true);
  add_solver(solve, solve_s);
  solve->add_option("--workers", solve_workers, "assembly workers / emulated processes")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  solve->add_option("--block-sizes", solve_block, "block-cyclic block size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  solve->add_option("--out", solve_out, "write per-element solution CSV");
  solve->add_option("--dump-h", dump_h, "write H in binary matrix format");
  solve->add_option("--dump-g", dump_g, "write G in binary matrix format");

  // sweep
  ProblemArgs sweep_p;
  SolverArgs sweep_s;
  std::string mode = "direct", report, format = "table";
  std::size_t dummy_size = 0;
  int trials = 4;
  std::vector<std::size_t> workers{1}, blocks{32};
  auto* sweep = app.add_subcommand("sweep", "timed runs over worker counts and block sizes");
  add_problem(sweep, sweep_p, true);
  add_solver(sweep, sweep_s);
  sweep->add_option("--mode", mode, "solve mode")
      ->check(CLI::IsMember({"direct", "precomputed", "dummy"}))
      ->capture_default_str();
  sweep->add_option("--size", dummy_size, "synthetic system size (dummy mode, or precomputed without a mesh)");
  sweep->add_option("--workers", workers, "worker counts")->delimiter(',')->check(CLI::PositiveNumber);
  sweep->add_option("--block-sizes", blocks, "block sizes")->delimiter(',')->check(CLI::PositiveNumber);
  sweep->add_option("--trials", trials, "measured trials per cell")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sweep->add_option("--report", report, "write the report here instead of stdout");
  sweep->add_option("--format", format, "report format")
      ->check(CLI::IsMember({"csv", "table"}))
      ->capture_default_str();

  // precompute
  ProblemArgs pre_p;
  SolverArgs pre_s;
  std::string pre_operator;
  auto* pre = app.add_subcommand("precompute", "invert the system offline and save the operator");
  add_problem(pre, pre_p, true);
  add_solver(pre, pre_s);
  pre->add_option("--operator", pre_operator, "output operator file")->required();

  // apply
  ProblemArgs apply_p;
  std::string apply_operator, apply_out;
  double scale = 1.0;
  auto* apply = app.add_subcommand("apply", "solve with a saved operator and new boundary values");
  add_problem(apply, apply_p, true);
  apply->add_option("--operator", apply_operator, "operator file from 'precompute'")->required();
  apply->add_option("--scale", scale, "multiply all prescribed values")->capture_default_str();
  apply->add_option("--out", apply_out, "write per-element solution CSV");

  // validate
  ProblemArgs val_p;
  std::string write_stl;
  bool ascii = false;
  auto* val = app.add_subcommand("validate", "check a mesh for degenerate elements and closure");
  add_problem(val, val_p, false);
  val->add_option("--write-stl", write_stl, "write the mesh as STL");
  val->add_flag("--ascii", ascii, "write ASCII instead of binary STL");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*solve) {
      Mesh m;
      Bc b;
      solve_p.load_mesh(m);
      solve_p.load_bc(m, b);
      bemrt_solve_options o = solve_s.options();
      o.workers = solve_workers;
      o.block_size = solve_block;
      if (!dump_h.empty() || !dump_g.empty())
        check(bemrt_dump_matrices(m.get(), &o, dump_h.empty() ? nullptr : dump_h.c_str(),
                                  dump_g.empty() ? nullptr : dump_g.c_str()));
      Sol s;
      bemrt_phase_timings tm{};
      check(bemrt_solve(m.get(), b.get(), &o, s.out(), &tm));
      std::printf("elements        %zu\n", bemrt_mesh_element_count(m.get()));
      print_solution(s.get(), m.get());
      std::printf("assembly  [s]   %.6f\nbarrier   [s]   %.6f\nsolve     [s]   %.6f\ntotal     [s]   %.6f\n",
                  tm.assembly, tm.barrier, tm.solve, tm.total);
      if (!solve_out.empty()) check(bemrt_solution_write_csv(s.get(), m.get(), solve_out.c_str()));
    } else if (*sweep) {
      bemrt_sweep_config c;
      bemrt_sweep_config_default(&c);
      if (sweep_p.is_cube()) {
        const auto [side, k] = sweep_p.cube_shape();
        c.side = side;
        c.k = k;
      } else {
        if (sweep_p.bc.empty() && mode != "dummy") usage("--bc is required with --mesh");
        c.mesh_path = sweep_p.mesh.c_str();
      }
      if (!sweep_p.bc.empty()) c.bc_path = sweep_p.bc.c_str();
      c.load = sweep_p.load;
      const bemrt_solve_options o = sweep_s.options();
      c.youngs_modulus = o.youngs_modulus;
      c.poisson_ratio = o.poisson_ratio;
      c.quad_order = o.quad_order;
      c.self_strategy = o.self_strategy;
      c.mode = mode == "direct" ? BEMRT_MODE_DIRECT : mode == "precomputed" ? BEMRT_MODE_PRECOMPUTED : BEMRT_MODE_DUMMY;
      if (c.mode == BEMRT_MODE_DUMMY && dummy_size == 0) usage("--mode dummy needs --size");
      c.trials = trials;
      c.workers = workers.data();
      c.worker_count = workers.size();
      c.block_sizes = blocks.data();
      c.block_size_count = blocks.size();
      c.dummy_size = dummy_size;
      Sweep sw;
      check(bemrt_sweep_run(&c, sw.out()));
      const int fmt = format == "csv" ? BEMRT_REPORT_CSV : BEMRT_REPORT_TABLE;
      if (bemrt_sweep_record_count(sw.get()) > 0) {
        if (report.empty()) {
          size_t needed = 0;
          check(bemrt_sweep_report_string(sw.get(), fmt, nullptr, 0, &needed));
          std::string text(needed + 1, '\0');
          check(bemrt_sweep_report_string(sw.get(), fmt, text.data(), text.size(), &needed));
          text.resize(needed);
          std::fputs(text.c_str(), stdout);
        } else {
          check(bemrt_sweep_write_report(sw.get(), report.c_str(), fmt));
        }
      }
      for (size_t i = 0; i < bemrt_sweep_failure_count(sw.get()); ++i)
        std::fprintf(stderr, "failed cell: %s\n", bemrt_sweep_failure(sw.get(), i));
      if (!bemrt_sweep_hashes_consistent(sw.get()))
        std::fprintf(stderr, "warning: result hashes differ between cells\n");
      if (bemrt_sweep_failure_count(sw.get()) > 0) return kNumerical;
    } else if (*pre) {
      Mesh m;
      Bc b;
      pre_p.load_mesh(m);
      pre_p.load_bc(m, b);
      const bemrt_solve_options o = pre_s.options();
      Op op;
      check(bemrt_precompute(m.get(), b.get(), &o, op.out()));
      check(bemrt_operator_save(op.get(), pre_operator.c_str()));
      std::printf("operator        %s (%zu dofs)\n", pre_operator.c_str(), bemrt_operator_dof_count(op.get()));
    } else if (*apply) {
      Mesh m;
      Bc b;
      Op op;
      apply_p.load_mesh(m);
      apply_p.load_bc(m, b);
      check(bemrt_bc_scale_values(b.get(), scale));
      check(bemrt_operator_load(apply_operator.c_str(), op.out()));
      Sol s;
      double seconds = 0.0;
      check(bemrt_operator_apply(op.get(), b.get(), s.out(), &seconds));
      print_solution(s.get(), m.get());
      std::printf("apply     [s]   %.6f\n", seconds);
      if (!apply_out.empty()) check(bemrt_solution_write_csv(s.get(), m.get(), apply_out.c_str()));
    } else if (*val) {
      Mesh m;
      val_p.load_mesh(m);
      bemrt_validation v{};
      check(bemrt_mesh_validate(m.get(), &v));
      std::printf("elements        %zu\ndofs            %zu\ndegenerate      %zu\n", v.elements, 3 * v.elements,
                  v.degenerate);
      std::printf("area            total %.6e  min %.6e  max %.6e\n", v.total_area, v.min_area, v.max_area);
      std::printf("closure         %.3e (%s)\n", v.closure_residual, v.closed ? "closed" : "open");
      if (!write_stl.empty()) check(bemrt_mesh_write_stl(m.get(), write_stl.c_str(), ascii ? 1 : 0));
      if (v.degenerate > 0) return kNumerical;
    }
  } catch (const Failure& f) {
    return f.code;
  }
  return kOk;
}
