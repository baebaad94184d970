#include "ssimdecomp/error.hpp"

namespace ssimdecomp {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::InvalidBlock: return "InvalidBlock";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::ZeroVariance: return "ZeroVariance";
    case Errc::DegenerateInput: return "DegenerateInput";
    case Errc::ZeroVarianceAtom: return "ZeroVarianceAtom";
    case Errc::ZeroVarianceTarget: return "ZeroVarianceTarget";
    case Errc::NearSingular: return "NearSingular";
    case Errc::DegenerateCorrelation: return "DegenerateCorrelation";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::NotEnoughUsableAtoms: return "NotEnoughUsableAtoms";
    case Errc::CombinatorialBlowup: return "CombinatorialBlowup";
    case Errc::MalformedHeader: return "MalformedHeader";
    case Errc::TruncatedData: return "TruncatedData";
    case Errc::UnsupportedMaxval: return "UnsupportedMaxval";
    case Errc::InvalidSample: return "InvalidSample";
    case Errc::ImageSmallerThanBlock: return "ImageSmallerThanBlock";
    case Errc::InconsistentGrid: return "InconsistentGrid";
    case Errc::TooManyConstantPatches: return "TooManyConstantPatches";
    case Errc::MalformedDictFile: return "MalformedDictFile";
    case Errc::MalformedCodesFile: return "MalformedCodesFile";
    case Errc::ChecksumMismatch: return "ChecksumMismatch";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace ssimdecomp
