#include "chronos/error.hpp"

namespace chronos {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::PointNotInScale: return "PointNotInScale";
    case ErrorKind::EmptyWindow: return "EmptyWindow";
    case ErrorKind::InvalidTimeScale: return "InvalidTimeScale";
    case ErrorKind::InvalidDeltaSet: return "InvalidDeltaSet";
    case ErrorKind::NotSquare: return "NotSquare";
    case ErrorKind::NegativeHorizon: return "NegativeHorizon";
    case ErrorKind::BackwardWindow: return "BackwardWindow";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DomainMismatch: return "DomainMismatch";
    case ErrorKind::NonFiniteState: return "NonFiniteState";
    case ErrorKind::NotPositiveSystem: return "NotPositiveSystem";
    case ErrorKind::WindowTooSmall: return "WindowTooSmall";
    case ErrorKind::SpecOutsideWindow: return "SpecOutsideWindow";
    case ErrorKind::EmptyM: return "EmptyM";
    case ErrorKind::NotMonomialGram: return "NotMonomialGram";
    case ErrorKind::NegativeTarget: return "NegativeTarget";
    case ErrorKind::CertificateCheckFailed: return "CertificateCheckFailed";
    case ErrorKind::WrongScaleTag: return "WrongScaleTag";
    case ErrorKind::DenseWindow: return "DenseWindow";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace chronos
