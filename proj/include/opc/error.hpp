#pragma once

#include <stdexcept>
#include <string>

namespace opc {

enum class Errc {
  // data errors
  EmptySequence,
  MalformedName,
  NoSamples,
  ClassTooSmall,
  EmptyVocabulary,
  TooFewRows,
  DimensionMismatch,
  SingleClass,
  ShapeMismatch,
  LengthTooShort,
  LabelOutOfRange,
  LengthMismatch,
  EmptyMatrix,
  NonFiniteLoss,
  InvalidArgument,
  // environment / configuration errors
  IncompatibleArtifactVersion,
  Config,
  Io,
};

const char* errc_name(Errc code) noexcept;

/// True for failures caused by the input data rather than the environment.
bool is_data_error(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace opc
