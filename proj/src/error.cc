#include "pvq/error.h"

namespace pvq {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo: return "io";
    case ErrorCode::kFormat: return "format";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kTooShort: return "too_short";
    case ErrorCode::kUndefined: return "undefined";
    case ErrorCode::kInternal: return "internal";
  }
  return "unknown";
}

}  // namespace pvq
