#ifndef PVQ_ERROR_H_
#define PVQ_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace pvq {

enum class ErrorCode {
  kIo,               // file missing, unreadable, unwritable
  kFormat,           // malformed container or text format
  kInvalidArgument,  // precondition on a parameter violated
  kTooShort,         // signal shorter than one analysis window
  kUndefined,        // quantity undefined for the given input (e.g. WER with empty reference)
  kInternal,         // broken internal invariant
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pvq

#endif  // PVQ_ERROR_H_
