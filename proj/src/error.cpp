#include "bemrt/error.hpp"

namespace bemrt {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::Parse: return "parse error";
    case ErrorCode::EmptyMesh: return "empty mesh";
    case ErrorCode::DegenerateElement: return "degenerate element";
    case ErrorCode::InvalidMaterial: return "invalid material";
    case ErrorCode::SingularEvaluation: return "singular kernel evaluation";
    case ErrorCode::UnsupportedOrder: return "unsupported quadrature order";
    case ErrorCode::SingularSystem: return "singular system";
    case ErrorCode::StaleOperator: return "stale precomputed operator";
    case ErrorCode::Io: return "i/o error";
  }
  return "unknown error";
}

}  // namespace bemrt
