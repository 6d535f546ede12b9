#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "bemrt/mesh.hpp"

namespace bemrt {

/// Parses ASCII or binary STL. One element per facet, vertex order kept;
/// facet normals in the file are ignored and recomputed from the winding.
/// Throws Parse (detail = byte offset) or EmptyMesh.
SurfaceMesh load_stl(std::span<const std::byte> bytes);
SurfaceMesh load_stl_file(const std::filesystem::path& path);

enum class StlFormat { Binary, Ascii };

std::vector<std::byte> write_stl(const SurfaceMesh& mesh, StlFormat format = StlFormat::Binary);
void write_stl_file(const SurfaceMesh& mesh, const std::filesystem::path& path,
                    StlFormat format = StlFormat::Binary);

}  // namespace bemrt
