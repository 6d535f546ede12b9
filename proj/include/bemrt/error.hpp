#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bemrt {

enum class ErrorCode {
  InvalidArgument,
  Parse,
  EmptyMesh,
  DegenerateElement,
  InvalidMaterial,
  SingularEvaluation,
  UnsupportedOrder,
  SingularSystem,
  StaleOperator,
  Io,
};

const char* to_string(ErrorCode code) noexcept;

/// Every failure raised by the library. `detail()` carries the byte offset for
/// parse errors, the pivot index for singular systems and the element index for
/// degenerate elements; it is zero otherwise.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::size_t detail = 0)
      : std::runtime_error(message), code_(code), detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  std::size_t detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::size_t detail_;
};

}  // namespace bemrt
