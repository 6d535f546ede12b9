#include "bemrt/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include "bemrt/boundary_file.hpp"
#include "bemrt/distribution.hpp"
#include "bemrt/error.hpp"
#include "bemrt/stl.hpp"

namespace bemrt::bench {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Problem {
  SurfaceMesh mesh;
  BoundarySpec bc;
};

Problem load_problem(const ProblemSource& src) {
  Problem p;
  if (src.mesh_path.empty()) {
    p.mesh = generate_cube(src.side, src.k);
    p.bc = src.bc_path.empty() ? cube_sample_bc(p.mesh, src.side, src.load)
                               : load_boundary_file(src.bc_path, p.mesh);
  } else {
    if (src.bc_path.empty())
      throw Error(ErrorCode::InvalidArgument, "an STL problem needs a boundary-condition file");
    p.mesh = load_stl_file(src.mesh_path);
    p.bc = load_boundary_file(src.bc_path, p.mesh);
  }
  return p;
}

const char* ordinal(std::size_t i) {
  static constexpr const char* kNames[] = {"First", "Second", "Third", "Fourth", "Fifth",
                                           "Sixth", "Seventh", "Eighth", "Ninth", "Tenth"};
  return i < std::size(kNames) ? kNames[i] : nullptr;
}

}  // namespace

const char* to_string(Phase p) noexcept {
  switch (p) {
    case Phase::Assembly: return "assembly";
    case Phase::Barrier: return "barrier";
    case Phase::Solve: return "solve";
    case Phase::Matvec: return "matvec";
    case Phase::Total: return "total";
  }
  return "total";
}

Phase parse_phase(std::string_view s) {
  for (Phase p : {Phase::Assembly, Phase::Barrier, Phase::Solve, Phase::Matvec, Phase::Total})
    if (s == to_string(p)) return p;
  throw Error(ErrorCode::Parse, "unknown phase '" + std::string(s) + "'");
}

std::uint64_t hash_values(std::span<const double> values, std::uint64_t h) {
  const auto* p = reinterpret_cast<const unsigned char*>(values.data());
  for (std::size_t i = 0; i < values.size_bytes(); ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t hash_solution(const Solution& sol) { return hash_values(sol.t, hash_values(sol.u)); }

DummySystem make_dummy_system(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "dummy system size must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  DummySystem s{DenseMatrix(n, n), std::vector<double>(n)};
  for (double& v : s.A.data()) v = dist(rng);
  for (std::size_t i = 0; i < n; ++i) s.A(i, i) += static_cast<double>(n);
  for (double& v : s.b) v = dist(rng);
  return s;
}

SweepResult run_sweep(const BenchConfig& cfg) {
  if (cfg.trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be >= 1");
  if (cfg.workers.empty() || cfg.block_sizes.empty())
    throw Error(ErrorCode::InvalidArgument, "worker and block-size lists must be non-empty");
  for (std::size_t w : cfg.workers)
    if (w == 0) throw Error(ErrorCode::InvalidArgument, "worker counts must be positive");
  for (std::size_t b : cfg.block_sizes)
    if (b == 0) throw Error(ErrorCode::InvalidArgument, "block sizes must be positive");

  const Material mat = make_material(cfg.E, cfg.nu);
  const QuadratureRule rule = gauss_rule(cfg.quad_order);

  // Offline state shared by all cells.
  std::optional<Problem> problem;
  std::optional<DummySystem> dummy;
  std::optional<PrecomputedOperator> op;
  std::optional<DenseMatrix> dummy_inverse;
  const bool synthetic = cfg.mode == SolveMode::Dummy ||
                         (cfg.mode == SolveMode::Precomputed && cfg.dummy_size > 0);
  if (synthetic) {
    if (cfg.dummy_size == 0) throw Error(ErrorCode::InvalidArgument, "dummy mode needs a system size");
    dummy = make_dummy_system(cfg.dummy_size, cfg.seed);
    if (cfg.mode == SolveMode::Precomputed) dummy_inverse = precompute_inverse(dummy->A);
  } else {
    problem = load_problem(cfg.problem);
    if (cfg.mode == SolveMode::Precomputed)
      op = precompute_operator(assemble(problem->mesh, mat, rule, cfg.self_strategy), problem->bc);
  }

  SweepResult result;
  std::size_t config_id = 0;
  for (std::size_t workers : cfg.workers) {
    for (std::size_t block : cfg.block_sizes) {
      const std::size_t id = config_id++;
      std::vector<TimingRecord> cell;
      try {
        for (int trial = 0; trial <= cfg.trials; ++trial) {
          auto rec = [&](Phase ph, double s, std::uint64_t h) {
            cell.push_back(TimingRecord{id, workers, block, ph, trial, s, h});
          };
          switch (cfg.mode) {
            case SolveMode::Direct: {
              const DistributedResult r = distributed_assemble_solve(
                  problem->mesh, mat, problem->bc, workers, block, rule, cfg.self_strategy);
              const std::uint64_t h = hash_solution(r.solution);
              rec(Phase::Assembly, r.timings.assembly, h);
              rec(Phase::Barrier, r.timings.barrier, h);
              rec(Phase::Solve, r.timings.solve, h);
              rec(Phase::Total, r.timings.total, h);
              break;
            }
            case SolveMode::Precomputed: {
              const auto t0 = Clock::now();
              std::uint64_t h = 0;
              if (dummy_inverse) {
                const std::vector<double> x = multiply(*dummy_inverse, dummy->b);
                const double s = seconds_since(t0);
                h = hash_values(x);
                rec(Phase::Matvec, s, h);
                rec(Phase::Total, s, h);
              } else {
                const Solution sol = apply_precomputed(*op, problem->bc);
                const double s = seconds_since(t0);
                h = hash_solution(sol);
                rec(Phase::Matvec, s, h);
                rec(Phase::Total, s, h);
              }
              break;
            }
            case SolveMode::Dummy: {
              const auto t0 = Clock::now();
              const std::vector<double> x = distributed_solve(dummy->A, dummy->b, make_grid(workers), block);
              const double s = seconds_since(t0);
              const std::uint64_t h = hash_values(x);
              rec(Phase::Solve, s, h);
              rec(Phase::Total, s, h);
              break;
            }
          }
        }
      } catch (const Error& e) {
        result.failures.push_back(CellFailure{id, workers, block, e.what()});
        continue;
      }
      for (const TimingRecord& r : cell) (r.trial == 0 ? result.warmup : result.records).push_back(r);
    }
  }
  return result;
}

Summary summarize(std::span<const TimingRecord> records) {
  std::map<std::size_t, CellSummary> cells;
  std::map<std::size_t, std::map<int, double>> trials;
  for (const TimingRecord& r : records) {
    if (r.phase != Phase::Total || r.trial < 1) continue;
    CellSummary& c = cells[r.config_id];
    c.config_id = r.config_id;
    c.workers = r.workers;
    c.block_size = r.block_size;
    c.result_hash = r.result_hash;
    trials[r.config_id][r.trial] = r.seconds;
  }
  if (cells.empty()) throw Error(ErrorCode::InvalidArgument, "no measured total-phase records to summarize");

  Summary s;
  std::map<std::size_t, std::vector<double>> by_workers;
  for (auto& [id, c] : cells) {
    double sum = 0.0;
    for (const auto& [trial, secs] : trials[id]) {
      c.trial_seconds.push_back(secs);
    }
    // Sorted copy so the mean does not depend on trial order.
    std::vector<double> sorted = c.trial_seconds;
    std::sort(sorted.begin(), sorted.end());
    for (double v : sorted) sum += v;
    c.mean = sum / static_cast<double>(sorted.size());
    by_workers[c.workers].push_back(c.mean);
    s.cells.push_back(c);
  }
  for (auto& [w, means] : by_workers) {
    std::sort(means.begin(), means.end());
    double sum = 0.0;
    for (double m : means) sum += m;
    s.per_worker.push_back(WorkerSummary{w, means.size(), sum / static_cast<double>(means.size())});
  }
  return s;
}

double round_to(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::round(value * scale) / scale;
}

RealtimeVerdict realtime_verdict(double seconds) {
  if (!(seconds > 0.0) || !std::isfinite(seconds))
    throw Error(ErrorCode::InvalidArgument, "seconds per computation must be positive");
  RealtimeVerdict v;
  v.rate = 1.0 / seconds;
  v.graphics_ok = v.rate >= kGraphicsRate;
  v.haptics_ok = v.rate >= kHapticsRate;
  return v;
}

NonlinearEstimate estimate_nonlinear(double linear_seconds, int iterations) {
  if (!(linear_seconds > 0.0)) throw Error(ErrorCode::InvalidArgument, "linear solve time must be positive");
  if (iterations < 1) throw Error(ErrorCode::InvalidArgument, "iteration count must be >= 1");
  const double s = linear_seconds * iterations;
  return NonlinearEstimate{s, realtime_verdict(s)};
}

void emit_report(std::ostream& os, std::span<const TimingRecord> records, ReportFormat format) {
  if (records.empty()) throw Error(ErrorCode::InvalidArgument, "nothing to report");
  if (format == ReportFormat::Csv) {
    os << "config_id,workers,block_size,phase,trial,seconds,result_hash\n";
    char hash[17];
    for (const TimingRecord& r : records) {
      std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(r.result_hash));
      std::ostringstream secs;
      secs << std::setprecision(17) << r.seconds;
      os << r.config_id << ',' << r.workers << ',' << r.block_size << ',' << to_string(r.phase) << ','
         << r.trial << ',' << secs.str() << ',' << hash << '\n';
    }
    if (!os) throw Error(ErrorCode::Io, "report write failed");
    return;
  }

  const Summary s = summarize(records);
  std::size_t ntrials = 0;
  for (const CellSummary& c : s.cells) ntrials = std::max(ntrials, c.trial_seconds.size());

  auto label = [](std::size_t workers, std::size_t block) {
    std::ostringstream l;
    l << "Workers=" << workers << ", Block Size=" << block;
    return l.str();
  };
  std::size_t width = 13;
  for (const CellSummary& c : s.cells) width = std::max(width, label(c.workers, c.block_size).size());

  os << "Solution time in seconds\n";
  os << std::left << std::setw(static_cast<int>(width)) << "Configuration";
  for (std::size_t t = 0; t < ntrials; ++t) {
    std::string head = ordinal(t) ? std::string(ordinal(t)) + " Run" : "Run " + std::to_string(t + 1);
    os << " | " << std::right << std::setw(10) << head;
  }
  os << " | " << std::setw(10) << "Average" << '\n';
  os << std::fixed << std::setprecision(3);
  for (const CellSummary& c : s.cells) {
    os << std::left << std::setw(static_cast<int>(width)) << label(c.workers, c.block_size) << std::right;
    for (std::size_t t = 0; t < ntrials; ++t) {
      os << " | " << std::setw(10);
      if (t < c.trial_seconds.size())
        os << round_to(c.trial_seconds[t]);
      else
        os << "-";
    }
    os << " | " << std::setw(10) << round_to(c.mean) << '\n';
  }
  os << "\nAverage solution time in seconds over all runs and block sizes\n";
  for (const WorkerSummary& w : s.per_worker) {
    std::ostringstream l;
    l << "Workers=" << w.workers << " (" << w.cells << " block sizes)";
    os << std::left << std::setw(static_cast<int>(width)) << l.str() << " | " << std::right << std::setw(10)
       << round_to(w.mean) << '\n';
  }
  os.unsetf(std::ios::floatfield);
  if (!os) throw Error(ErrorCode::Io, "report write failed");
}

void emit_report(const std::filesystem::path& path, std::span<const TimingRecord> records, ReportFormat format) {
  if (records.empty()) throw Error(ErrorCode::InvalidArgument, "nothing to report");
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::Io, "cannot write report " + path.string());
  emit_report(os, records, format);
}

std::vector<TimingRecord> parse_report_csv(std::string_view text) {
  std::vector<TimingRecord> out;
  std::size_t pos = 0, line_no = 0;
  auto field_error = [&](const std::string& what) {
    throw Error(ErrorCode::Parse, "report line " + std::to_string(line_no) + ": " + what, line_no);
  };
  while (pos < text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != "config_id,workers,block_size,phase,trial,seconds,result_hash")
        field_error("unexpected header");
      continue;
    }
    std::vector<std::string_view> f;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      f.push_back(line.substr(start, comma == std::string_view::npos ? line.size() - start : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (f.size() != 7) field_error("expected 7 fields");
    auto uint_field = [&](std::string_view s, int base = 10) {
      unsigned long long v = 0;
      const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
      if (ec != std::errc{} || p != s.data() + s.size()) field_error("bad integer '" + std::string(s) + "'");
      return v;
    };
    TimingRecord r;
    r.config_id = uint_field(f[0]);
    r.workers = uint_field(f[1]);
    r.block_size = uint_field(f[2]);
    r.phase = parse_phase(f[3]);
    r.trial = static_cast<int>(uint_field(f[4]));
    const auto [p, ec] = std::from_chars(f[5].data(), f[5].data() + f[5].size(), r.seconds);
    if (ec != std::errc{} || p != f[5].data() + f[5].size()) field_error("bad seconds value");
    r.result_hash = uint_field(f[6], 16);
    out.push_back(r);
  }
  return out;
}

}  // namespace bemrt::bench
