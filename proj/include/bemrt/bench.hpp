#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bemrt/assembly.hpp"
#include "bemrt/dense.hpp"
#include "bemrt/solver.hpp"

namespace bemrt::bench {

enum class SolveMode {
  Direct,       // assemble and solve every trial
  Precomputed,  // offline inverse, one matvec per trial
  Dummy,        // solve-only on a synthetic system of the requested size
};

struct ProblemSource {
  // Cube problem when mesh_path is empty: fixed face y = 0, traction `load`
  // in +y on y = side.
  double side = 4.0;
  int k = 2;
  double load = 4.0;
  std::filesystem::path mesh_path;
  std::filesystem::path bc_path;
};

struct BenchConfig {
  ProblemSource problem;
  double E = 200000.0;
  double nu = 0.33;
  int quad_order = 16;
  SelfStrategy self_strategy = SelfStrategy::Subdivide;
  SolveMode mode = SolveMode::Direct;
  int trials = 4;
  std::vector<std::size_t> workers{1};
  std::vector<std::size_t> block_sizes{32};
  std::size_t dummy_size = 0;  // synthetic system size (Dummy, or Precomputed when > 0)
  std::uint64_t seed = 20140314;
};

enum class Phase { Assembly, Barrier, Solve, Matvec, Total };
const char* to_string(Phase p) noexcept;
Phase parse_phase(std::string_view s);

/// trial 0 is the warm-up run, trials 1..n are measured.
struct TimingRecord {
  std::size_t config_id = 0;
  std::size_t workers = 0;
  std::size_t block_size = 0;
  Phase phase = Phase::Total;
  int trial = 0;
  double seconds = 0.0;
  std::uint64_t result_hash = 0;
  friend bool operator==(const TimingRecord&, const TimingRecord&) = default;
};

struct CellFailure {
  std::size_t config_id = 0;
  std::size_t workers = 0;
  std::size_t block_size = 0;
  std::string message;
};

struct SweepResult {
  std::vector<TimingRecord> records;  // measured trials only
  std::vector<TimingRecord> warmup;
  std::vector<CellFailure> failures;
};

/// Cells are (workers x block size) in list order, run sequentially; a failed
/// cell is recorded and the sweep moves on.
SweepResult run_sweep(const BenchConfig& config);

struct CellSummary {
  std::size_t config_id = 0;
  std::size_t workers = 0;
  std::size_t block_size = 0;
  std::vector<double> trial_seconds;  // ordered by trial number
  double mean = 0.0;
  std::uint64_t result_hash = 0;
};

struct WorkerSummary {
  std::size_t workers = 0;
  std::size_t cells = 0;
  double mean = 0.0;  // mean of the cell means
};

struct Summary {
  std::vector<CellSummary> cells;       // ascending config id
  std::vector<WorkerSummary> per_worker;  // ascending worker count
};

/// Uses the Total-phase records of measured trials (trial >= 1). Throws
/// InvalidArgument when there are none.
Summary summarize(std::span<const TimingRecord> records);

/// Rounds half away from zero to `decimals` places, as printed in reports.
double round_to(double value, int decimals = 3);

struct RealtimeVerdict {
  double rate = 0.0;  // computations per second
  bool graphics_ok = false;
  bool haptics_ok = false;
};

inline constexpr double kGraphicsRate = 30.0;
inline constexpr double kHapticsRate = 1000.0;

RealtimeVerdict realtime_verdict(double mean_total_seconds);

struct NonlinearEstimate {
  double seconds = 0.0;
  RealtimeVerdict verdict;
};

/// Cost of a nonlinear solve as `iterations` linear solves.
NonlinearEstimate estimate_nonlinear(double linear_seconds, int iterations = 100);

enum class ReportFormat { Csv, Table };

/// CSV columns: config_id,workers,block_size,phase,trial,seconds,result_hash.
/// The table has one row per cell (trial columns, then the average) followed
/// by the per-worker averages over all block sizes.
void emit_report(std::ostream& os, std::span<const TimingRecord> records, ReportFormat format);
void emit_report(const std::filesystem::path& path, std::span<const TimingRecord> records,
                 ReportFormat format);

std::vector<TimingRecord> parse_report_csv(std::string_view text);

/// A = U(-1, 1) + n I, b = U(-1, 1); deterministic in `seed`.
struct DummySystem {
  DenseMatrix A;
  std::vector<double> b;
};
DummySystem make_dummy_system(std::size_t n, std::uint64_t seed);

/// FNV-1a over the raw bytes.
std::uint64_t hash_values(std::span<const double> values, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t hash_solution(const Solution& sol);

}  // namespace bemrt::bench
