#include "opc/error.hpp"

namespace opc {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::EmptySequence: return "EmptySequence";
    case Errc::MalformedName: return "MalformedName";
    case Errc::NoSamples: return "NoSamples";
    case Errc::ClassTooSmall: return "ClassTooSmall";
    case Errc::EmptyVocabulary: return "EmptyVocabulary";
    case Errc::TooFewRows: return "TooFewRows";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::SingleClass: return "SingleClass";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::LengthTooShort: return "LengthTooShort";
    case Errc::LabelOutOfRange: return "LabelOutOfRange";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::EmptyMatrix: return "EmptyMatrix";
    case Errc::NonFiniteLoss: return "NonFiniteLoss";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::IncompatibleArtifactVersion: return "IncompatibleArtifactVersion";
    case Errc::Config: return "Config";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

bool is_data_error(Errc code) noexcept {
  switch (code) {
    case Errc::IncompatibleArtifactVersion:
    case Errc::Config:
    case Errc::Io:
      return false;
    default:
      return true;
  }
}

}  // namespace opc
