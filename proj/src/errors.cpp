#include "hamrot/errors.hpp"

namespace hamrot {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotSymplectic: return "NotSymplectic";
    case ErrorKind::DegenerateKrein: return "DegenerateKrein";
    case ErrorKind::ToleranceNotMet: return "ToleranceNotMet";
    case ErrorKind::InconsistentClassification: return "InconsistentClassification";
    case ErrorKind::NearDegenerate: return "NearDegenerate";
    case ErrorKind::ResonantInput: return "ResonantInput";
    case ErrorKind::LiftStepTooLarge: return "LiftStepTooLarge";
    case ErrorKind::Undecidable: return "Undecidable";
    case ErrorKind::BracketNotFound: return "BracketNotFound";
    case ErrorKind::InsufficientSpectrum: return "InsufficientSpectrum";
    case ErrorKind::GapUncertified: return "GapUncertified";
    case ErrorKind::NoneWithinHorizon: return "NoneWithinHorizon";
    case ErrorKind::BlowUp: return "BlowUp";
    case ErrorKind::TwistNotFound: return "TwistNotFound";
    case ErrorKind::NoOrbitFound: return "NoOrbitFound";
    case ErrorKind::CertificateFailed: return "CertificateFailed";
    case ErrorKind::NotASolution: return "NotASolution";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace hamrot
