#pragma once

#include <filesystem>
#include <string_view>

#include "bemrt/assembly.hpp"
#include "bemrt/mesh.hpp"

namespace bemrt {

/// Text boundary-condition file. One rule per line, '#' starts a comment:
///
///   all                 t 0  t 0  t 0
///   plane y 0           u 0  u 0  u 0
///   plane y 4           t 0  t 4  t 0
///   elements 3 17 42    u 0  t 1.5  t 0
///
/// A selector (`all`, `plane <axis> <coordinate>` matched against element
/// centroids, or an explicit element id list) is followed by three
/// (kind, value) pairs for x, y, z; kind `u` prescribes displacement (mm),
/// `t` traction (N/mm^2). Later rules override earlier ones. Every DOF must be
/// covered by some rule. Errors throw Parse with the line number as detail.
BoundarySpec parse_boundary_file(std::string_view text, const SurfaceMesh& mesh);
BoundarySpec load_boundary_file(const std::filesystem::path& path, const SurfaceMesh& mesh);

}  // namespace bemrt
