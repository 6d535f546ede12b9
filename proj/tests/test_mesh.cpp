#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>

#include "bemrt/error.hpp"
#include "bemrt/mesh.hpp"
#include "bemrt/stl.hpp"
#include "oracles.hpp"

using namespace bemrt;

namespace {

std::span<const std::byte> bytes_of(const std::string& s) {
  return {reinterpret_cast<const std::byte*>(s.data()), s.size()};
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

void check_close(const Vec3& a, const Vec3& b, double tol) {
  CHECK(std::fabs(a.x - b.x) <= tol);
  CHECK(std::fabs(a.y - b.y) <= tol);
  CHECK(std::fabs(a.z - b.z) <= tol);
}

}  // namespace

TEST_CASE("element geometry of simple triangles") {
  const ElementGeometry g = element_geometry({Vec3{0, 0, 0}, Vec3{1, 0, 0}, Vec3{0, 1, 0}});
  check_close(g.centroid, {1.0 / 3, 1.0 / 3, 0}, 1e-15);
  CHECK(g.area == doctest::Approx(0.5).epsilon(1e-15));
  check_close(g.normal, {0, 0, 1}, 1e-15);

  check_close(element_geometry({Vec3{0, 0, 0}, Vec3{0, 0, 1}, Vec3{0, 1, 0}}).normal, {-1, 0, 0}, 1e-15);

  CHECK(code_of([] { element_geometry({Vec3{0, 0, 0}, Vec3{2, 0, 0}, Vec3{4, 0, 0}}); }) ==
        ErrorCode::DegenerateElement);
  CHECK(code_of([] { element_geometry({Vec3{0, 0, 0}, Vec3{NAN, 0, 0}, Vec3{0, 1, 0}}); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("element geometry invariants on random triangles") {
  oracle::Rng rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const auto t = oracle::random_triangle(rng, 1.0);
    const ElementGeometry g = element_geometry(t);
    CHECK(std::fabs(norm(g.normal) - 1.0) <= 1e-12);
    check_close(g.centroid, (t[0] + t[1] + t[2]) * (1.0 / 3.0), 1e-12 * (1.0 + norm(g.centroid)));
    const Vec3 e1 = t[1] - t[0], e2 = t[2] - t[0];
    CHECK(std::fabs(dot(g.normal, e1)) <= 1e-10 * norm(e1));
    CHECK(std::fabs(dot(g.normal, e2)) <= 1e-10 * norm(e2));

    // Cyclic vertex permutation leaves the geometry unchanged.
    const ElementGeometry p = element_geometry({t[1], t[2], t[0]});
    check_close(p.normal, g.normal, 1e-12);
    check_close(p.centroid, g.centroid, 1e-12 * (1.0 + norm(g.centroid)));
    CHECK(p.area == doctest::Approx(g.area).epsilon(1e-12));
  }
}

TEST_CASE("generated cube matches the sample problem shape") {
  const SurfaceMesh m = generate_cube(4.0, 2);
  REQUIRE(m.size() == 96);
  CHECK(m.dof_count() == 288);
  double total = 0.0;
  for (const Element& e : m.elements()) {
    CHECK(e.area == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_FALSE(e.degenerate);
    total += e.area;
    if (std::fabs(e.centroid.y - 4.0) < 1e-12) check_close(e.normal, {0, 1, 0}, 1e-15);
  }
  CHECK(total == doctest::Approx(96.0).epsilon(1e-14));
  // 16 elements on each face.
  for (int axis = 0; axis < 3; ++axis)
    for (double c : {0.0, 4.0}) {
      int count = 0;
      for (const Element& e : m.elements()) count += std::fabs(e.centroid[axis] - c) < 1e-12;
      CHECK(count == 16);
    }
}

TEST_CASE("generated cube properties for random sizes") {
  oracle::Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const double side = std::pow(10.0, rng.uniform(-2.0, 2.0));
    const int k = rng.integer(1, 5);
    const SurfaceMesh m = generate_cube(side, k);
    REQUIRE(m.size() == static_cast<std::size_t>(24 * k * k));
    const Vec3 centre{side / 2, side / 2, side / 2};
    for (const Element& e : m.elements()) {
      CHECK(e.area == doctest::Approx(side * side / (4.0 * k * k)).epsilon(1e-12));
      CHECK(dot(e.normal, e.centroid - centre) > 0.0);
    }
    const ValidationReport r = validate(m);
    CHECK(r.closure_residual <= 1e-10 * r.total_area);
    CHECK(r.looks_closed());
  }
  CHECK(code_of([] { generate_cube(0.0, 2); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { generate_cube(4.0, 0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("generated box is closed and outward") {
  const SurfaceMesh m = generate_box({2.0, 3.0, 5.0}, {2, 3, 5});
  CHECK(m.size() == 4u * (2 * 2 * 3 + 2 * 3 * 5 + 2 * 2 * 5));
  const ValidationReport r = validate(m);
  CHECK(r.looks_closed());
  CHECK(r.total_area == doctest::Approx(2.0 * (6 + 15 + 10)).epsilon(1e-13));
}

TEST_CASE("validation reports") {
  const ValidationReport cube = validate(generate_cube(4.0, 2));
  CHECK(cube.closure_residual < 1e-12);
  CHECK(cube.degenerate.empty());
  CHECK(cube.min_area == doctest::Approx(1.0));
  CHECK(cube.max_area == doctest::Approx(1.0));

  const std::array<Vec3, 3> tri{Vec3{0, 0, 0}, Vec3{1, 0, 0}, Vec3{0, 1, 0}};
  const ValidationReport open = validate(SurfaceMesh(std::span(&tri, 1)));
  CHECK(open.closure_residual == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_FALSE(open.looks_closed());

  const std::array<std::array<Vec3, 3>, 2> with_sliver{
      tri, std::array<Vec3, 3>{Vec3{0, 0, 0}, Vec3{1, 1, 0}, Vec3{2, 2, 0}}};
  const SurfaceMesh bad(with_sliver);
  const ValidationReport r = validate(bad);
  REQUIRE(r.degenerate.size() == 1);
  CHECK(r.degenerate[0] == 1);
  CHECK(bad[1].degenerate);
  CHECK_FALSE(summary(r).empty());
  CHECK_FALSE(summary(bad).empty());
}

TEST_CASE("scaled mesh") {
  const SurfaceMesh m = generate_cube(4.0, 1).scaled(2.5);
  CHECK(m[0].area == doctest::Approx(25.0).epsilon(1e-14));
  CHECK(m.bbox_diagonal() == doctest::Approx(10.0 * std::sqrt(3.0)));
}

TEST_CASE("binary STL round trip") {
  const SurfaceMesh cube = generate_cube(4.0, 2);
  const std::vector<std::byte> bytes = write_stl(cube, StlFormat::Binary);
  CHECK(bytes.size() == 84 + 50 * 96);
  const SurfaceMesh back = load_stl(bytes);
  REQUIRE(back.size() == 96);
  for (std::size_t e = 0; e < back.size(); ++e) {
    CHECK(back[e].area == doctest::Approx(cube[e].area).epsilon(1e-6));
    check_close(back[e].normal, cube[e].normal, 1e-6);
    for (int v = 0; v < 3; ++v) check_close(back[e].vertices[v], cube[e].vertices[v], 1e-6);
  }
}

TEST_CASE("ASCII STL round trip and recomputed normals") {
  const SurfaceMesh cube = generate_cube(1.5, 3);
  const auto bytes = write_stl(cube, StlFormat::Ascii);
  const SurfaceMesh back = load_stl(bytes);
  REQUIRE(back.size() == cube.size());
  for (std::size_t e = 0; e < back.size(); ++e) check_close(back[e].normal, cube[e].normal, 1e-6);

  // The stored normal is junk and must be ignored.
  const std::string text =
      "solid t\n facet normal 0 0 -1\n  outer loop\n   vertex 0 0 0\n   vertex 1 0 0\n   vertex 0 1 0\n"
      "  endloop\n endfacet\nendsolid t\n";
  const SurfaceMesh one = load_stl(bytes_of(text));
  REQUIRE(one.size() == 1);
  check_close(one[0].normal, {0, 0, 1}, 1e-15);
  CHECK(one[0].area == doctest::Approx(0.5));
}

TEST_CASE("malformed STL input") {
  SUBCASE("truncated binary") {
    std::vector<std::byte> bytes = write_stl(generate_cube(4.0, 2));
    const std::uint32_t ten = 10;
    std::memcpy(bytes.data() + 80, &ten, 4);
    bytes.resize(84 + 3 * 50);
    try {
      load_stl(bytes);
      FAIL("expected parse error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Parse);
      CHECK(e.detail() == 84 + 3 * 50);
    }
  }
  SUBCASE("short header") {
    std::vector<std::byte> bytes(40, std::byte{0});
    CHECK(code_of([&] { load_stl(bytes); }) == ErrorCode::Parse);
  }
  SUBCASE("zero facets") {
    std::vector<std::byte> bytes(84, std::byte{0});
    CHECK(code_of([&] { load_stl(bytes); }) == ErrorCode::EmptyMesh);
    CHECK(code_of([] { load_stl(bytes_of("solid empty\nendsolid empty\n")); }) == ErrorCode::EmptyMesh);
  }
  SUBCASE("bad ASCII number") {
    const std::string text = "solid t\nfacet normal 0 0 1\nouter loop\nvertex 0 0 zero\n";
    CHECK(code_of([&] { load_stl(bytes_of(text)); }) == ErrorCode::Parse);
  }
  SUBCASE("missing file") {
    CHECK(code_of([] { load_stl_file("/nonexistent/dir/mesh.stl"); }) == ErrorCode::Io);
  }
}

TEST_CASE("STL file round trip") {
  const auto path = std::filesystem::temp_directory_path() / "bemrt_test_cube.stl";
  write_stl_file(generate_cube(4.0, 2), path);
  CHECK(load_stl_file(path).size() == 96);
  std::filesystem::remove(path);
}
