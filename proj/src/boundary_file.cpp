#include "bemrt/boundary_file.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bemrt/error.hpp"

namespace bemrt {
namespace {

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::Parse, "boundary file line " + std::to_string(line) + ": " + what, line);
}

std::vector<std::string_view> split(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

double to_double(std::string_view tok, std::size_t line) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || p != tok.data() + tok.size() || !std::isfinite(v))
    fail(line, "bad number '" + std::string(tok) + "'");
  return v;
}

std::size_t to_index(std::string_view tok, std::size_t line) {
  std::size_t v = 0;
  const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || p != tok.data() + tok.size()) fail(line, "bad element id '" + std::string(tok) + "'");
  return v;
}

int to_axis(std::string_view tok, std::size_t line) {
  if (tok == "x") return 0;
  if (tok == "y") return 1;
  if (tok == "z") return 2;
  fail(line, "axis must be x, y or z");
}

}  // namespace

BoundarySpec parse_boundary_file(std::string_view text, const SurfaceMesh& mesh) {
  const std::size_t n = mesh.size();
  BoundarySpec bc(mesh.dof_count());
  std::vector<std::uint8_t> covered(mesh.dof_count(), 0);
  const double tol = 1e-6 * mesh.bbox_diagonal();

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto tok = split(line);
    if (tok.empty()) continue;
    if (tok.size() < 7) fail(line_no, "expected a selector followed by three kind/value pairs");

    // Trailing six tokens are the kind/value pairs.
    const std::size_t sel_end = tok.size() - 6;
    DofKind kinds[3];
    double values[3];
    for (int a = 0; a < 3; ++a) {
      const auto k = tok[sel_end + 2 * a];
      if (k == "u")
        kinds[a] = DofKind::DisplacementKnown;
      else if (k == "t")
        kinds[a] = DofKind::TractionKnown;
      else
        fail(line_no, "kind must be 'u' or 't', got '" + std::string(k) + "'");
      values[a] = to_double(tok[sel_end + 2 * a + 1], line_no);
    }

    std::vector<std::size_t> targets;
    if (tok[0] == "all") {
      if (sel_end != 1) fail(line_no, "'all' takes no arguments");
      for (std::size_t e = 0; e < n; ++e) targets.push_back(e);
    } else if (tok[0] == "plane") {
      if (sel_end != 3) fail(line_no, "'plane' takes an axis and a coordinate");
      const int axis = to_axis(tok[1], line_no);
      const double c = to_double(tok[2], line_no);
      for (std::size_t e = 0; e < n; ++e)
        if (std::fabs(mesh[e].centroid[axis] - c) <= tol) targets.push_back(e);
      if (targets.empty()) fail(line_no, "plane selects no elements");
    } else if (tok[0] == "elements") {
      if (sel_end < 2) fail(line_no, "'elements' needs at least one id");
      for (std::size_t i = 1; i < sel_end; ++i) {
        const std::size_t e = to_index(tok[i], line_no);
        if (e >= n) fail(line_no, "element id " + std::to_string(e) + " out of range");
        targets.push_back(e);
      }
    } else {
      fail(line_no, "unknown selector '" + std::string(tok[0]) + "'");
    }

    for (std::size_t e : targets)
      for (int a = 0; a < 3; ++a) {
        bc.set(e, a, kinds[a], values[a]);
        covered[dof_index(e, a)] = 1;
      }
  }

  for (std::size_t d = 0; d < covered.size(); ++d)
    if (!covered[d])
      throw Error(ErrorCode::InvalidArgument,
                  "boundary file leaves DOF " + std::to_string(d) + " (element " + std::to_string(d / 3) +
                      ") unspecified");
  return bc;
}

BoundarySpec load_boundary_file(const std::filesystem::path& path, const SurfaceMesh& mesh) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_boundary_file(ss.str(), mesh);
}

}  // namespace bemrt
