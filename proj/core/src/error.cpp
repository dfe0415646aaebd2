#include "fsnet/error.hpp"

namespace fsnet {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidGeometry: return "InvalidGeometry";
    case ErrorCode::InvalidRatio: return "InvalidRatio";
    case ErrorCode::DegenerateStride: return "DegenerateStride";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::UnsupportedGeometry: return "UnsupportedGeometry";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::FSTooShort: return "FSTooShort";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace fsnet
