#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pixellink {

enum class ErrorCode {
  BadMagic = 1,
  UnsupportedVersion,
  TruncatedFile,
  DimOverflow,
  IoFailure,
  UnsupportedFormat,
  Degenerate,
  NonFinite,
  ShapeMismatch,
  OutOfRangeProbability,
  EmptyInput,
  ChannelMismatch,
  MissingPair,
  EmptyDataset,
  ParseError,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so
// the command-line front end can map it to a distinct exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pixellink
