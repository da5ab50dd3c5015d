#include "latentdist/errors.hpp"

namespace latentdist {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NonPositiveVariance: return "NonPositiveVariance";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::TooFewUnits: return "TooFewUnits";
    case ErrorCode::BadM: return "BadM";
    case ErrorCode::BadTau: return "BadTau";
    case ErrorCode::BadBandwidth: return "BadBandwidth";
    case ErrorCode::BadLambda: return "BadLambda";
    case ErrorCode::BadSplit: return "BadSplit";
    case ErrorCode::BadLevel: return "BadLevel";
    case ErrorCode::BadParams: return "BadParams";
    case ErrorCode::BadSpec: return "BadSpec";
    case ErrorCode::BadGrid: return "BadGrid";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::NoInteriorMinimum: return "NoInteriorMinimum";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::NonFiniteTransform: return "NonFiniteTransform";
  }
  return "Unknown";
}

}  // namespace latentdist
