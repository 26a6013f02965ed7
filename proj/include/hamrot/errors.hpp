#pragma once

#include <stdexcept>
#include <string>

namespace hamrot {

enum class ErrorKind {
  NotSymplectic,
  DegenerateKrein,
  ToleranceNotMet,
  InconsistentClassification,
  NearDegenerate,
  ResonantInput,
  LiftStepTooLarge,
  Undecidable,
  BracketNotFound,
  InsufficientSpectrum,
  GapUncertified,
  NoneWithinHorizon,
  BlowUp,
  TwistNotFound,
  NoOrbitFound,
  CertificateFailed,
  NotASolution,
  InvalidArgument,
};

const char* to_string(ErrorKind kind);

// Every failure raised by the library carries one of the kinds above, so
// callers (the CLI in particular) can map them onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace hamrot
