#include "bemrt/distribution.hpp"

#include <algorithm>
#include <atomic>
#include <barrier>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

#include "bemrt/error.hpp"

namespace bemrt {

ProcessGrid make_grid(std::size_t processes) {
  if (processes == 0) throw Error(ErrorCode::InvalidArgument, "process count must be >= 1");
  std::size_t r = static_cast<std::size_t>(std::sqrt(static_cast<double>(processes)));
  while (r > 1 && processes % r != 0) --r;
  if (r == 0) r = 1;
  return ProcessGrid{r, processes / r};
}

BlockMapParams make_block_map(std::size_t M, std::size_t P) {
  if (P == 0) throw Error(ErrorCode::InvalidArgument, "process count must be >= 1");
  return BlockMapParams{M, P, (M + P - 1) / P};
}

BlockIndex block_map(std::size_t m, const BlockMapParams& params) {
  if (m >= params.M)
    throw Error(ErrorCode::InvalidArgument,
                "global index " + std::to_string(m) + " out of range [0, " + std::to_string(params.M) + ")");
  return BlockIndex{m / params.L, m % params.L};
}

BlockCyclicParams make_block_cyclic(std::size_t M, std::size_t P, std::size_t r) {
  if (P == 0) throw Error(ErrorCode::InvalidArgument, "process count must be >= 1");
  if (r == 0) throw Error(ErrorCode::InvalidArgument, "block size must be >= 1");
  return BlockCyclicParams{M, P, r, r * P};
}

BlockCyclicIndex block_cyclic_map(std::size_t m, const BlockCyclicParams& params) {
  if (m >= params.M)
    throw Error(ErrorCode::InvalidArgument,
                "global index " + std::to_string(m) + " out of range [0, " + std::to_string(params.M) + ")");
  return BlockCyclicIndex{(m % params.T) / params.r, m / params.T, m % params.r};
}

std::size_t block_cyclic_global(const BlockCyclicIndex& idx, const BlockCyclicParams& params) {
  return idx.b * params.T + idx.p * params.r + idx.i;
}

std::size_t block_cyclic_local_count(std::size_t p, const BlockCyclicParams& params) {
  const std::size_t full = (params.M / params.T) * params.r;
  const std::size_t rem = params.M % params.T;
  const std::size_t start = p * params.r;
  const std::size_t extra = rem > start ? std::min(rem - start, params.r) : 0;
  return full + extra;
}

EntryOwner owner_of_entry(std::size_t row, std::size_t col, std::size_t n_rows, std::size_t n_cols,
                          const ProcessGrid& grid, std::size_t row_block, std::size_t col_block) {
  const auto rp = block_cyclic_map(row, make_block_cyclic(n_rows, grid.rows, row_block));
  const auto cp = block_cyclic_map(col, make_block_cyclic(n_cols, grid.cols, col_block));
  return EntryOwner{rp.p, cp.p};
}

std::vector<RowRange> partition_rows(std::size_t n_rows, std::size_t workers) {
  const BlockMapParams params = make_block_map(n_rows, workers);
  std::vector<RowRange> out(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = std::min(n_rows, w * params.L);
    out[w] = RowRange{begin, std::min(n_rows, begin + params.L)};
  }
  return out;
}

// ---------------------------------------------------------------------------

BlockCyclicMatrix::BlockCyclicMatrix(const DenseMatrix& global, const ProcessGrid& grid,
                                     std::size_t block)
    : n_(global.rows()), grid_(grid), block_(block) {
  if (!global.square()) throw Error(ErrorCode::InvalidArgument, "block-cyclic layout needs a square matrix");
  if (grid.rows == 0 || grid.cols == 0) throw Error(ErrorCode::InvalidArgument, "empty process grid");
  row_params_ = make_block_cyclic(n_, grid.rows, block);
  col_params_ = make_block_cyclic(n_, grid.cols, block);
  locals_.resize(grid.size());
  for (std::size_t pr = 0; pr < grid.rows; ++pr) {
    for (std::size_t pc = 0; pc < grid.cols; ++pc) {
      Local& l = local(pr, pc);
      l.rows.reserve(block_cyclic_local_count(pr, row_params_));
      l.cols.reserve(block_cyclic_local_count(pc, col_params_));
    }
  }
  for (std::size_t m = 0; m < n_; ++m) {
    const std::size_t pr = block_cyclic_map(m, row_params_).p;
    for (std::size_t pc = 0; pc < grid.cols; ++pc) local(pr, pc).rows.push_back(m);
    const std::size_t pc = block_cyclic_map(m, col_params_).p;
    for (std::size_t q = 0; q < grid.rows; ++q) local(q, pc).cols.push_back(m);
  }
  for (auto& l : locals_) l.data.assign(l.rows.size() * l.cols.size(), 0.0);
  std::size_t stored = 0;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) {
      at(i, j) = global(i, j);
      ++stored;
    }
  std::size_t capacity = 0;
  for (const auto& l : locals_) capacity += l.data.size();
  if (stored != capacity) throw Error(ErrorCode::InvalidArgument, "block-cyclic ownership is not a partition");
}

std::size_t BlockCyclicMatrix::local_row(std::size_t i) const {
  const auto idx = block_cyclic_map(i, row_params_);
  return idx.b * row_params_.r + idx.i;
}

std::size_t BlockCyclicMatrix::local_col(std::size_t j) const {
  const auto idx = block_cyclic_map(j, col_params_);
  return idx.b * col_params_.r + idx.i;
}

EntryOwner BlockCyclicMatrix::owner(std::size_t i, std::size_t j) const {
  return EntryOwner{block_cyclic_map(i, row_params_).p, block_cyclic_map(j, col_params_).p};
}

double& BlockCyclicMatrix::at(std::size_t i, std::size_t j) {
  const EntryOwner o = owner(i, j);
  Local& l = local(o.p_row, o.p_col);
  return l.data[local_row(i) * l.cols.size() + local_col(j)];
}

double BlockCyclicMatrix::at(std::size_t i, std::size_t j) const {
  const EntryOwner o = owner(i, j);
  const Local& l = local(o.p_row, o.p_col);
  return l.data[local_row(i) * l.cols.size() + local_col(j)];
}

std::size_t BlockCyclicMatrix::local_size(std::size_t pr, std::size_t pc) const {
  return local(pr, pc).data.size();
}

DenseMatrix BlockCyclicMatrix::gather() const {
  DenseMatrix g(n_, n_);
  for (const Local& l : locals_)
    for (std::size_t a = 0; a < l.rows.size(); ++a)
      for (std::size_t b = 0; b < l.cols.size(); ++b) g(l.rows[a], l.cols[b]) = l.data[a * l.cols.size() + b];
  return g;
}

std::vector<std::size_t> BlockCyclicMatrix::factorize() {
  const std::size_t n = n_;
  double max_entry = 0.0;
  for (const Local& l : locals_)
    for (double v : l.data) {
      if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "matrix has non-finite entries");
      max_entry = std::max(max_entry, std::fabs(v));
    }
  const double tiny = singular_pivot_threshold(n, max_entry);

  struct Candidate {
    double value;
    std::size_t row;
  };
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<Candidate> candidates(grid_.rows, Candidate{-1.0, kNone});
  std::vector<std::size_t> pivots(n, 0);
  std::vector<double> lcol(n, 0.0);   // multipliers of the current step
  std::vector<double> urow(n, 0.0);   // pivot row of the current step
  std::size_t step = 0;
  std::size_t failed_at = kNone;

  auto choose_pivot = [&]() noexcept {
    Candidate best{-1.0, kNone};
    for (Candidate& c : candidates) {
      if (c.row != kNone && (c.value > best.value || (c.value == best.value && c.row < best.row)))
        best = c;
      c = Candidate{-1.0, kNone};
    }
    if (!(best.value > tiny)) failed_at = step;
    pivots[step] = best.row == kNone ? step : best.row;
  };
  std::barrier sync(static_cast<std::ptrdiff_t>(grid_.size()), [&]() noexcept {});
  std::barrier pivot_sync(static_cast<std::ptrdiff_t>(grid_.size()), choose_pivot);

  auto process = [&](std::size_t pr, std::size_t pc) {
    Local& me = local(pr, pc);
    const std::size_t ncols = me.cols.size();
    for (std::size_t k = 0; k < n; ++k) {
      const EntryOwner kk = owner(k, k);

      // Pivot candidates from the owners of column k.
      if (pc == kk.p_col) {
        const std::size_t lc = local_col(k);
        const auto first = std::lower_bound(me.rows.begin(), me.rows.end(), k);
        Candidate best{-1.0, kNone};
        for (auto it = first; it != me.rows.end(); ++it) {
          const double v = std::fabs(me.data[(it - me.rows.begin()) * ncols + lc]);
          if (v > best.value) best = Candidate{v, *it};
        }
        candidates[pr] = best;
      }
      if (pr == 0 && pc == 0) step = k;
      pivot_sync.arrive_and_wait();
      if (failed_at != kNone) return;

      // Row interchange, done by the owners of row k.
      const std::size_t p = pivots[k];
      if (p != k && pr == kk.p_row) {
        const std::size_t lr = local_row(k);
        for (std::size_t b = 0; b < ncols; ++b) std::swap(me.data[lr * ncols + b], at(p, me.cols[b]));
      }
      sync.arrive_and_wait();

      // Multipliers and pivot-row broadcast.
      const auto below = std::upper_bound(me.rows.begin(), me.rows.end(), k);
      const auto right = std::upper_bound(me.cols.begin(), me.cols.end(), k);
      if (pc == kk.p_col) {
        const double pivot = at(k, k);
        const std::size_t lc = local_col(k);
        for (auto it = below; it != me.rows.end(); ++it) {
          double& v = me.data[(it - me.rows.begin()) * ncols + lc];
          v = v / pivot;
          lcol[*it] = v;
        }
      }
      if (pr == kk.p_row) {
        const std::size_t lr = local_row(k);
        for (auto it = right; it != me.cols.end(); ++it) urow[*it] = me.data[lr * ncols + (it - me.cols.begin())];
      }
      sync.arrive_and_wait();

      // Trailing update of owned entries.
      const std::size_t c0 = static_cast<std::size_t>(right - me.cols.begin());
      for (auto it = below; it != me.rows.end(); ++it) {
        const double l = lcol[*it];
        if (l == 0.0) continue;
        double* row = me.data.data() + (it - me.rows.begin()) * ncols;
        for (std::size_t b = c0; b < ncols; ++b) row[b] -= l * urow[me.cols[b]];
      }
      sync.arrive_and_wait();
    }
  };

  if (grid_.size() == 1) {
    process(0, 0);
  } else {
    std::vector<std::jthread> threads;
    threads.reserve(grid_.size());
    for (std::size_t pr = 0; pr < grid_.rows; ++pr)
      for (std::size_t pc = 0; pc < grid_.cols; ++pc) threads.emplace_back(process, pr, pc);
  }
  if (failed_at != kNone)
    throw Error(ErrorCode::SingularSystem,
                "matrix is singular to working precision at pivot " + std::to_string(failed_at), failed_at);
  return pivots;
}

std::vector<double> distributed_solve(const DenseMatrix& a, std::span<const double> b,
                                      const ProcessGrid& grid, std::size_t block) {
  if (b.size() != a.rows()) throw Error(ErrorCode::InvalidArgument, "right-hand side size mismatch");
  BlockCyclicMatrix layout(a, grid, block);
  LuFactors f;
  f.pivots = layout.factorize();
  f.lu = layout.gather();
  std::vector<double> x(b.begin(), b.end());
  lu_solve(f, x);
  return x;
}

DistributedResult distributed_assemble_solve(const SurfaceMesh& mesh, const Material& mat,
                                             const BoundarySpec& bc, std::size_t workers,
                                             std::size_t block_size, const QuadratureRule& rule,
                                             SelfStrategy strategy) {
  using Clock = std::chrono::steady_clock;
  if (workers == 0) throw Error(ErrorCode::InvalidArgument, "worker count must be >= 1");
  if (block_size == 0) throw Error(ErrorCode::InvalidArgument, "block size must be >= 1");
  if (mesh.empty()) throw Error(ErrorCode::EmptyMesh, "cannot assemble an empty mesh");
  if (bc.size() != mesh.dof_count())
    throw Error(ErrorCode::InvalidArgument, "boundary spec does not match mesh");

  const auto start = Clock::now();
  const ElementQuadrature quad(mesh, rule);
  InfluenceMatrices hg = allocate_influence(mesh);
  LinearSystem sys = prepare_system(hg, bc);
  const std::vector<RowRange> ranges = partition_rows(mesh.size(), workers);

  std::vector<Clock::time_point> arrived(workers);
  std::vector<std::exception_ptr> errors(workers);
  // Each worker builds the H, G, A and b rows it owns.
  auto work = [&](std::size_t w) {
    try {
      const RowRange r = ranges[w];
      assemble_rows(mesh, mat, quad, rule, strategy, r.begin, r.end, hg);
      apply_boundary_conditions_rows(hg, bc, 3 * r.begin, 3 * r.end, sys);
    } catch (...) {
      errors[w] = std::current_exception();
    }
    arrived[w] = Clock::now();
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }  // joining the pool is the barrier
  const auto released = Clock::now();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  const auto first = std::min_element(arrived.begin(), arrived.end());
  const std::vector<double> x = distributed_solve(sys.A, sys.b, make_grid(workers), block_size);
  DistributedResult out;
  out.solution = scatter_solution(x, bc);
  out.warnings = std::move(sys.warnings);
  const auto done = Clock::now();

  auto secs = [](auto a, auto b) { return std::chrono::duration<double>(b - a).count(); };
  out.timings.assembly = secs(start, *first);
  out.timings.barrier = secs(*first, released);
  out.timings.solve = secs(released, done);
  out.timings.total = secs(start, done);
  return out;
}

}  // namespace bemrt
