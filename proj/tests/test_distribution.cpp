#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "bemrt/distribution.hpp"
#include "bemrt/error.hpp"
#include "bemrt/solver.hpp"
#include "oracles.hpp"

using namespace bemrt;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("block map examples") {
  const BlockMapParams p = make_block_map(288, 4);
  CHECK(p.L == 72);
  CHECK(block_map(100, p) == BlockIndex{1, 28});
  CHECK(block_map(0, p) == BlockIndex{0, 0});
  CHECK(block_map(287, p) == BlockIndex{3, 71});
  CHECK(code_of([&] { block_map(288, p); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { make_block_map(10, 0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("block-cyclic map examples") {
  const BlockCyclicParams p = make_block_cyclic(1000, 4, 32);
  CHECK(p.T == 128);
  CHECK(block_cyclic_map(200, p) == BlockCyclicIndex{2, 1, 8});
  CHECK(block_cyclic_map(0, p) == BlockCyclicIndex{0, 0, 0});
  CHECK(block_cyclic_map(7, make_block_cyclic(8, 4, 1)) == BlockCyclicIndex{3, 1, 0});
  CHECK(code_of([&] { block_cyclic_map(1000, p); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { make_block_cyclic(10, 4, 0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("block-cyclic map is a bijection with the stated inverse") {
  for (std::size_t M : {1u, 7u, 100u, 288u, 1000u, 2047u})
    for (std::size_t P : {1u, 2u, 3u, 4u, 16u})
      for (std::size_t r : {1u, 5u, 16u, 32u, 144u}) {
        const BlockCyclicParams p = make_block_cyclic(M, P, r);
        std::set<std::tuple<std::size_t, std::size_t, std::size_t>> seen;
        std::vector<std::size_t> count(P, 0);
        bool ok = true;
        for (std::size_t m = 0; m < M; ++m) {
          const BlockCyclicIndex idx = block_cyclic_map(m, p);
          ok = ok && idx.p < P && idx.i < r && block_cyclic_global(idx, p) == m;
          ok = ok && seen.emplace(idx.p, idx.b, idx.i).second;
          ++count[idx.p];
        }
        CHECK(ok);
        for (std::size_t q = 0; q < P; ++q) CHECK(count[q] == block_cyclic_local_count(q, p));
        if (r == 1) {
          const auto [lo, hi] = std::minmax_element(count.begin(), count.end());
          CHECK(*hi - *lo <= 1);
        }
      }
}

TEST_CASE("block map covers every index once") {
  for (std::size_t M : {1u, 10u, 96u, 288u, 1001u})
    for (std::size_t P : {1u, 2u, 4u, 7u, 16u}) {
      const BlockMapParams p = make_block_map(M, P);
      CHECK(p.L * P >= M);
      std::set<std::pair<std::size_t, std::size_t>> seen;
      for (std::size_t m = 0; m < M; ++m) {
        const BlockIndex b = block_map(m, p);
        CHECK(b.p < P);
        CHECK(b.p * p.L + b.i == m);
        seen.emplace(b.p, b.i);
      }
      CHECK(seen.size() == M);
    }
}

TEST_CASE("process grids") {
  CHECK(make_grid(1).size() == 1);
  for (auto [p, r, c] : {std::tuple{4u, 2u, 2u}, {16u, 4u, 4u}, {64u, 8u, 8u}, {256u, 16u, 16u}, {2u, 1u, 2u},
                         {6u, 2u, 3u}, {7u, 1u, 7u}}) {
    const ProcessGrid g = make_grid(p);
    CHECK(g.rows == r);
    CHECK(g.cols == c);
  }
  CHECK(code_of([] { make_grid(0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("entry ownership") {
  const ProcessGrid g22{2, 2};
  CHECK(owner_of_entry(150, 10, 288, 288, g22, 144, 144) == EntryOwner{1, 0});
  CHECK(owner_of_entry(0, 0, 288, 288, g22, 144, 144) == EntryOwner{0, 0});
  CHECK(owner_of_entry(0, 0, 5, 5, ProcessGrid{3, 4}, 1, 2) == EntryOwner{0, 0});
  CHECK(code_of([&] { owner_of_entry(288, 0, 288, 288, g22, 144, 144); }) == ErrorCode::InvalidArgument);

  // 12 x 12 on a 2 x 2 grid with blocks of 3: every process owns 36 entries.
  std::map<std::pair<std::size_t, std::size_t>, int> owned;
  for (std::size_t i = 0; i < 12; ++i)
    for (std::size_t j = 0; j < 12; ++j) {
      const EntryOwner o = owner_of_entry(i, j, 12, 12, g22, 3, 3);
      ++owned[{o.p_row, o.p_col}];
    }
  CHECK(owned.size() == 4);
  for (const auto& [who, n] : owned) CHECK(n == 36);

  // Row owner depends only on the row, column owner only on the column.
  const ProcessGrid g{3, 5};
  for (std::size_t i = 0; i < 40; ++i)
    for (std::size_t j = 0; j < 40; ++j) {
      const EntryOwner o = owner_of_entry(i, j, 40, 40, g, 4, 3);
      CHECK(o.p_row == owner_of_entry(i, 0, 40, 40, g, 4, 3).p_row);
      CHECK(o.p_col == owner_of_entry(0, j, 40, 40, g, 4, 3).p_col);
      CHECK(o.p_row == block_cyclic_map(i, make_block_cyclic(40, 3, 4)).p);
      CHECK(o.p_col == block_cyclic_map(j, make_block_cyclic(40, 5, 3)).p);
    }
}

TEST_CASE("row partitions") {
  auto sizes = [](std::size_t n, std::size_t w) {
    std::vector<std::size_t> out;
    for (const RowRange& r : partition_rows(n, w)) out.push_back(r.size());
    return out;
  };
  CHECK(sizes(96, 4) == std::vector<std::size_t>{24, 24, 24, 24});
  CHECK(sizes(96, 1) == std::vector<std::size_t>{96});
  CHECK(sizes(10, 4) == std::vector<std::size_t>{3, 3, 3, 1});
  // Literal ceiling rule can leave trailing workers idle.
  CHECK(sizes(9, 4) == std::vector<std::size_t>{3, 3, 3, 0});

  for (std::size_t n : {0u, 1u, 5u, 96u, 97u})
    for (std::size_t w : {1u, 2u, 3u, 16u}) {
      const auto ranges = partition_rows(n, w);
      CHECK(ranges.size() == w);
      std::size_t next = 0;
      for (const RowRange& r : ranges) {
        CHECK(r.begin == next);
        CHECK(r.end >= r.begin);
        next = r.end;
      }
      CHECK(next == n);
    }
}

TEST_CASE("block-cyclic matrix layout") {
  oracle::Rng rng(12);
  const DenseMatrix a = oracle::random_matrix(rng, 37, 0.0);
  for (ProcessGrid g : {ProcessGrid{1, 1}, ProcessGrid{2, 2}, ProcessGrid{2, 3}, ProcessGrid{4, 4}})
    for (std::size_t block : {1u, 4u, 16u, 64u}) {
      const BlockCyclicMatrix m(a, g, block);
      CHECK(m.gather() == a);
      std::size_t total = 0;
      for (std::size_t pr = 0; pr < g.rows; ++pr)
        for (std::size_t pc = 0; pc < g.cols; ++pc) total += m.local_size(pr, pc);
      CHECK(total == 37 * 37);
      CHECK(m.at(5, 30) == a(5, 30));
      CHECK(m.owner(5, 30) == owner_of_entry(5, 30, 37, 37, g, block, block));
    }
}

TEST_CASE("distributed factorization is bit-identical to the serial one") {
  oracle::Rng rng(13);
  const DenseMatrix a = oracle::random_matrix(rng, 45, 0.5);
  const LuFactors ref = lu_factorize(a);
  for (ProcessGrid g : {ProcessGrid{1, 1}, ProcessGrid{1, 2}, ProcessGrid{2, 2}, ProcessGrid{3, 2}, ProcessGrid{4, 4}})
    for (std::size_t block : {1u, 3u, 8u, 45u, 100u}) {
      BlockCyclicMatrix m(a, g, block);
      const std::vector<std::size_t> piv = m.factorize();
      CHECK(piv == ref.pivots);
      CHECK(m.gather() == ref.lu);
    }

  DenseMatrix sing = DenseMatrix::identity(6);
  sing(3, 3) = 0.0;
  BlockCyclicMatrix ms(sing, ProcessGrid{2, 2}, 2);
  try {
    ms.factorize();
    FAIL("expected singular system");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularSystem);
    CHECK(e.detail() == 3);
  }
}

TEST_CASE("distributed solve agrees bit for bit") {
  oracle::Rng rng(14);
  const DenseMatrix a = oracle::random_matrix(rng, 60, 1.0);
  const std::vector<double> b = oracle::random_vector(rng, 60);
  const std::vector<double> ref = solve_direct(a, b);
  for (std::size_t p : {1u, 4u, 16u})
    for (std::size_t block : {1u, 32u, 64u}) CHECK(distributed_solve(a, b, make_grid(p), block) == ref);
}

TEST_CASE("assemble-and-solve is invariant under workers and block sizes") {
  const SurfaceMesh mesh = generate_cube(4.0, 2);
  const Material mat = make_material(200000.0, 0.33);
  const BoundarySpec bc = cube_sample_bc(mesh, 4.0, 4.0);
  const QuadratureRule rule = gauss_rule(16);

  const DistributedResult base = distributed_assemble_solve(mesh, mat, bc, 1, 288, rule);
  const Solution serial =
      scatter_solution(solve_direct(apply_boundary_conditions(assemble(mesh, mat, rule), bc)), bc);
  CHECK(base.solution == serial);

  for (std::size_t w : {1u, 4u, 16u})
    for (std::size_t block : {144u, 128u, 64u, 32u, 1u}) {
      const DistributedResult r = distributed_assemble_solve(mesh, mat, bc, w, block, rule);
      CHECK(r.solution == base.solution);
      CHECK(r.timings.assembly >= 0.0);
      CHECK(r.timings.barrier >= 0.0);
      CHECK(r.timings.solve >= 0.0);
      CHECK(r.timings.total + 1e-6 >= r.timings.assembly + r.timings.barrier + r.timings.solve);
    }

  CHECK(code_of([&] { distributed_assemble_solve(mesh, mat, bc, 0, 32, rule); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { distributed_assemble_solve(mesh, mat, bc, 4, 0, rule); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { distributed_assemble_solve(mesh, mat, BoundarySpec(12), 4, 32, rule); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("more workers than rows still works") {
  const SurfaceMesh mesh = generate_cube(1.0, 1);
  const Material mat = make_material(1000.0, 0.25);
  const BoundarySpec bc = cube_sample_bc(mesh, 1.0, 1.0);
  const DistributedResult a = distributed_assemble_solve(mesh, mat, bc, 1, 4, gauss_rule(4));
  const DistributedResult b = distributed_assemble_solve(mesh, mat, bc, 40, 4, gauss_rule(4));
  CHECK(a.solution == b.solution);
}
