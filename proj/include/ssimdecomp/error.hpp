#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ssimdecomp {

/// Failure categories raised by the library. Every throw site uses `Error`
/// with one of these codes so callers (notably the CLI) can map them to
/// exit statuses without parsing messages.
enum class Errc {
  InvalidArgument,
  InvalidBlock,
  DimensionMismatch,
  ZeroVariance,
  DegenerateInput,
  ZeroVarianceAtom,
  ZeroVarianceTarget,
  NearSingular,
  DegenerateCorrelation,
  IndexOutOfRange,
  NotEnoughUsableAtoms,
  CombinatorialBlowup,
  MalformedHeader,
  TruncatedData,
  UnsupportedMaxval,
  InvalidSample,
  ImageSmallerThanBlock,
  InconsistentGrid,
  TooManyConstantPatches,
  MalformedDictFile,
  MalformedCodesFile,
  ChecksumMismatch,
  Io,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace ssimdecomp
