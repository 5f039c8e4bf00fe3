#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gvmf {

enum class ErrorKind {
  InvalidArgs,
  NonConvergence,
  SingularEndpoint,
  DimensionMismatch,
  UnsupportedMomentKind,
  WrongAlphaForReduction,
  DegenerateDraw,
  EnvelopeError,
  DuplicatePoints,
  DegenerateMeanDirection,
  NoRootInBox,
  UnconvergedFit,
  ParseError,
  EmptyDataset,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so that
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// True for failures of a numerical procedure rather than of the input.
  bool is_numeric() const noexcept {
    return kind_ == ErrorKind::NonConvergence || kind_ == ErrorKind::NoRootInBox ||
           kind_ == ErrorKind::UnconvergedFit;
  }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgs: return "InvalidArgs";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::SingularEndpoint: return "SingularEndpoint";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::UnsupportedMomentKind: return "UnsupportedMomentKind";
    case ErrorKind::WrongAlphaForReduction: return "WrongAlphaForReduction";
    case ErrorKind::DegenerateDraw: return "DegenerateDraw";
    case ErrorKind::EnvelopeError: return "EnvelopeError";
    case ErrorKind::DuplicatePoints: return "DuplicatePoints";
    case ErrorKind::DegenerateMeanDirection: return "DegenerateMeanDirection";
    case ErrorKind::NoRootInBox: return "NoRootInBox";
    case ErrorKind::UnconvergedFit: return "UnconvergedFit";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::EmptyDataset: return "EmptyDataset";
  }
  return "Unknown";
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace gvmf
