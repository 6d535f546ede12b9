#include "bemrt/stl.hpp"

#include <bit>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string_view>

#include "bemrt/error.hpp"

namespace bemrt {
namespace {

static_assert(std::endian::native == std::endian::little,
              "binary STL i/o assumes a little-endian host");

constexpr std::size_t kHeaderBytes = 80;
constexpr std::size_t kRecordBytes = 50;

[[noreturn]] void parse_error(const std::string& what, std::size_t offset) {
  throw Error(ErrorCode::Parse, what + " at byte " + std::to_string(offset), offset);
}

float read_f32(const std::byte* p) {
  float v;
  std::memcpy(&v, p, sizeof v);
  return v;
}

SurfaceMesh finish(const std::vector<std::array<Vec3, 3>>& tris) {
  if (tris.empty()) throw Error(ErrorCode::EmptyMesh, "STL contains no facets");
  return SurfaceMesh(tris);
}

SurfaceMesh parse_binary(std::span<const std::byte> bytes) {
  if (bytes.size() < kHeaderBytes + 4) parse_error("truncated binary STL header", bytes.size());
  std::uint32_t count;
  std::memcpy(&count, bytes.data() + kHeaderBytes, 4);
  const std::size_t body = kHeaderBytes + 4;
  std::vector<std::array<Vec3, 3>> tris;
  tris.reserve(count);
  for (std::uint32_t f = 0; f < count; ++f) {
    const std::size_t at = body + std::size_t{f} * kRecordBytes;
    if (at + kRecordBytes > bytes.size())
      parse_error("truncated facet record " + std::to_string(f) + " of " + std::to_string(count),
                  std::min(at, bytes.size()));
    const std::byte* p = bytes.data() + at + 12;  // skip stored normal
    std::array<Vec3, 3> tri;
    for (int v = 0; v < 3; ++v)
      tri[v] = {read_f32(p + 12 * v), read_f32(p + 12 * v + 4), read_f32(p + 12 * v + 8)};
    for (const auto& q : tri)
      if (!is_finite(q)) parse_error("non-finite vertex in facet " + std::to_string(f), at);
    tris.push_back(tri);
  }
  return finish(tris);
}

class AsciiTokens {
 public:
  explicit AsciiTokens(std::string_view text) : text_(text) {}

  bool next(std::string_view& tok) {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ >= text_.size()) return false;
    start_ = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    tok = text_.substr(start_, pos_ - start_);
    return true;
  }

  std::string_view expect_any() {
    std::string_view tok;
    if (!next(tok)) parse_error("unexpected end of ASCII STL", text_.size());
    return tok;
  }

  void expect(std::string_view word) {
    const std::string_view tok = expect_any();
    if (tok != word) parse_error("expected '" + std::string(word) + "'", start_);
  }

  double number() {
    const std::string_view tok = expect_any();
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size() || !std::isfinite(v))
      parse_error("malformed number '" + std::string(tok) + "'", start_);
    return v;
  }

  std::size_t token_offset() const { return start_; }

  void skip_line() {
    while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t start_ = 0;
};

SurfaceMesh parse_ascii(std::span<const std::byte> bytes) {
  const std::string_view text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  AsciiTokens tok(text);
  tok.expect("solid");
  tok.skip_line();  // solid name

  std::vector<std::array<Vec3, 3>> tris;
  std::string_view word;
  while (tok.next(word)) {
    if (word == "endsolid") return finish(tris);
    if (word != "facet") parse_error("expected 'facet' or 'endsolid'", tok.token_offset());
    tok.expect("normal");
    for (int i = 0; i < 3; ++i) tok.number();
    tok.expect("outer");
    tok.expect("loop");
    std::array<Vec3, 3> tri;
    for (auto& v : tri) {
      tok.expect("vertex");
      v.x = tok.number();
      v.y = tok.number();
      v.z = tok.number();
    }
    tok.expect("endloop");
    tok.expect("endfacet");
    tris.push_back(tri);
  }
  parse_error("missing 'endsolid'", text.size());
}

bool looks_ascii(std::span<const std::byte> bytes) {
  // Binary files may also start with "solid"; trust the facet count when it
  // matches the file size exactly.
  if (bytes.size() >= kHeaderBytes + 4) {
    std::uint32_t count;
    std::memcpy(&count, bytes.data() + kHeaderBytes, 4);
    if (kHeaderBytes + 4 + std::size_t{count} * kRecordBytes == bytes.size()) return false;
  }
  std::size_t i = 0;
  while (i < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[i]))) ++i;
  static constexpr std::string_view kSolid = "solid";
  if (bytes.size() - i < kSolid.size()) return false;
  if (std::memcmp(bytes.data() + i, kSolid.data(), kSolid.size()) != 0) return false;
  // A binary header that merely starts with "solid" will contain "facet" rarely.
  const std::string_view head(reinterpret_cast<const char*>(bytes.data()),
                              std::min<std::size_t>(bytes.size(), 1024));
  return head.find("facet") != std::string_view::npos || head.find("endsolid") != std::string_view::npos;
}

void put_f32(std::vector<std::byte>& out, double v) {
  const float f = static_cast<float>(v);
  std::byte b[4];
  std::memcpy(b, &f, 4);
  out.insert(out.end(), b, b + 4);
}

}  // namespace

SurfaceMesh load_stl(std::span<const std::byte> bytes) {
  if (bytes.empty()) parse_error("empty STL input", 0);
  return looks_ascii(bytes) ? parse_ascii(bytes) : parse_binary(bytes);
}

SurfaceMesh load_stl_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto* p = reinterpret_cast<const std::byte*>(raw.data());
  return load_stl(std::span<const std::byte>(p, raw.size()));
}

std::vector<std::byte> write_stl(const SurfaceMesh& mesh, StlFormat format) {
  std::vector<std::byte> out;
  if (format == StlFormat::Binary) {
    out.resize(kHeaderBytes, std::byte{0});
    static constexpr std::string_view kTag = "bemrt binary stl";
    std::memcpy(out.data(), kTag.data(), kTag.size());
    const auto count = static_cast<std::uint32_t>(mesh.size());
    std::byte c[4];
    std::memcpy(c, &count, 4);
    out.insert(out.end(), c, c + 4);
    out.reserve(out.size() + mesh.size() * kRecordBytes);
    for (const Element& e : mesh.elements()) {
      put_f32(out, e.normal.x);
      put_f32(out, e.normal.y);
      put_f32(out, e.normal.z);
      for (const auto& v : e.vertices) {
        put_f32(out, v.x);
        put_f32(out, v.y);
        put_f32(out, v.z);
      }
      out.push_back(std::byte{0});
      out.push_back(std::byte{0});
    }
    return out;
  }

  std::ostringstream os;
  os.precision(17);
  os << "solid bemrt\n";
  for (const Element& e : mesh.elements()) {
    os << "  facet normal " << e.normal.x << ' ' << e.normal.y << ' ' << e.normal.z << "\n"
       << "    outer loop\n";
    for (const auto& v : e.vertices) os << "      vertex " << v.x << ' ' << v.y << ' ' << v.z << "\n";
    os << "    endloop\n  endfacet\n";
  }
  os << "endsolid bemrt\n";
  const std::string s = os.str();
  const auto* p = reinterpret_cast<const std::byte*>(s.data());
  out.assign(p, p + s.size());
  return out;
}

void write_stl_file(const SurfaceMesh& mesh, const std::filesystem::path& path, StlFormat format) {
  const auto bytes = write_stl(mesh, format);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

}  // namespace bemrt
