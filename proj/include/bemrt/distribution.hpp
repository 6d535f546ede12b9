#pragma once

#include <cstddef>
#include <vector>

#include "bemrt/assembly.hpp"
#include "bemrt/dense.hpp"
#include "bemrt/solver.hpp"

namespace bemrt {

/// R x C arrangement of processes; process (pr, pc) has rank pr * C + pc.
struct ProcessGrid {
  std::size_t rows = 1;
  std::size_t cols = 1;
  std::size_t size() const noexcept { return rows * cols; }
};

/// Most square factorization of `processes` with rows <= cols.
ProcessGrid make_grid(std::size_t processes);

/// Block distribution of M items over P processes, L = ceil(M / P).
struct BlockMapParams {
  std::size_t M = 0;
  std::size_t P = 1;
  std::size_t L = 0;
};
BlockMapParams make_block_map(std::size_t M, std::size_t P);

struct BlockIndex {
  std::size_t p = 0;  // process
  std::size_t i = 0;  // local index
  friend bool operator==(const BlockIndex&, const BlockIndex&) = default;
};

/// m -> (floor(m / L), m mod L)
BlockIndex block_map(std::size_t m, const BlockMapParams& params);

/// Blocks of r consecutive items dealt cyclically over P processes, T = r P.
struct BlockCyclicParams {
  std::size_t M = 0;
  std::size_t P = 1;
  std::size_t r = 1;
  std::size_t T = 1;
};
BlockCyclicParams make_block_cyclic(std::size_t M, std::size_t P, std::size_t r);

struct BlockCyclicIndex {
  std::size_t p = 0;  // process
  std::size_t b = 0;  // block number within the process
  std::size_t i = 0;  // offset within the block
  friend bool operator==(const BlockCyclicIndex&, const BlockCyclicIndex&) = default;
};

/// m -> (floor((m mod T) / r), floor(m / T), m mod r)
BlockCyclicIndex block_cyclic_map(std::size_t m, const BlockCyclicParams& params);

/// Inverse of block_cyclic_map: m = b T + p r + i.
std::size_t block_cyclic_global(const BlockCyclicIndex& idx, const BlockCyclicParams& params);

/// Number of the M items that land on process p.
std::size_t block_cyclic_local_count(std::size_t p, const BlockCyclicParams& params);

struct EntryOwner {
  std::size_t p_row = 0;
  std::size_t p_col = 0;
  friend bool operator==(const EntryOwner&, const EntryOwner&) = default;
};

/// Rows and columns are mapped independently: rows over grid.rows with
/// row_block, columns over grid.cols with col_block.
EntryOwner owner_of_entry(std::size_t row, std::size_t col, std::size_t n_rows, std::size_t n_cols,
                          const ProcessGrid& grid, std::size_t row_block, std::size_t col_block);

struct RowRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const noexcept { return end - begin; }
  friend bool operator==(const RowRange&, const RowRange&) = default;
};

/// One contiguous range per worker, following block_map with
/// L = ceil(n_rows / workers); trailing workers may get short or empty ranges.
std::vector<RowRange> partition_rows(std::size_t n_rows, std::size_t workers);

/// Square matrix stored block-cyclically over a process grid. Each process
/// holds its local rows x local cols in row-major order.
class BlockCyclicMatrix {
 public:
  BlockCyclicMatrix(const DenseMatrix& global, const ProcessGrid& grid, std::size_t block);

  std::size_t n() const noexcept { return n_; }
  const ProcessGrid& grid() const noexcept { return grid_; }
  std::size_t block() const noexcept { return block_; }

  EntryOwner owner(std::size_t i, std::size_t j) const;
  double& at(std::size_t i, std::size_t j);
  double at(std::size_t i, std::size_t j) const;

  /// Entries held by process (pr, pc).
  std::size_t local_size(std::size_t pr, std::size_t pc) const;

  DenseMatrix gather() const;

  /// In-place LU with partial pivoting, one thread per grid process working in
  /// lockstep. Per entry it performs exactly the operations of lu_factorize, so
  /// the factors are bit-identical for every grid and block size. Returns the
  /// pivot sequence; throws SingularSystem like lu_factorize.
  std::vector<std::size_t> factorize();

 private:
  struct Local {
    std::vector<std::size_t> rows;  // global indices, ascending
    std::vector<std::size_t> cols;
    std::vector<double> data;
  };

  Local& local(std::size_t pr, std::size_t pc) { return locals_[pr * grid_.cols + pc]; }
  const Local& local(std::size_t pr, std::size_t pc) const { return locals_[pr * grid_.cols + pc]; }
  std::size_t local_row(std::size_t i) const;
  std::size_t local_col(std::size_t j) const;

  std::size_t n_;
  ProcessGrid grid_;
  std::size_t block_;
  BlockCyclicParams row_params_;
  BlockCyclicParams col_params_;
  std::vector<Local> locals_;
};

/// Solves A x = b through the block-cyclic layout. Same result bits as
/// solve_direct.
std::vector<double> distributed_solve(const DenseMatrix& a, std::span<const double> b,
                                      const ProcessGrid& grid, std::size_t block);

/// Wall-clock seconds per phase. assembly runs until the first worker reaches
/// the barrier, barrier until the last one does, solve from there to the end.
struct PhaseTimings {
  double assembly = 0.0;
  double barrier = 0.0;
  double solve = 0.0;
  double total = 0.0;
};

struct DistributedResult {
  Solution solution;
  PhaseTimings timings;
  std::vector<std::string> warnings;
};

/// Row-partitioned assembly of H, G, A and b on `workers` threads, a full
/// barrier, then a block-cyclic solve on make_grid(workers).
DistributedResult distributed_assemble_solve(const SurfaceMesh& mesh, const Material& mat,
                                             const BoundarySpec& bc, std::size_t workers,
                                             std::size_t block_size, const QuadratureRule& rule,
                                             SelfStrategy strategy = SelfStrategy::Subdivide);

}  // namespace bemrt
