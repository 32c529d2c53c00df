#include "sflow/error.hpp"

namespace sflow {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotPrimitive: return "NotPrimitive";
    case ErrorKind::ZeroRow: return "ZeroRow";
    case ErrorKind::LengthOverflow: return "LengthOverflow";
    case ErrorKind::WindowOverrun: return "WindowOverrun";
    case ErrorKind::InadmissibleWord: return "InadmissibleWord";
    case ErrorKind::MissingEntry: return "MissingEntry";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::DimensionCap: return "DimensionCap";
    case ErrorKind::RootBracketFailure: return "RootBracketFailure";
    case ErrorKind::EnumerationCap: return "EnumerationCap";
    case ErrorKind::DegenerateVariance: return "DegenerateVariance";
    case ErrorKind::OutsideGammaG: return "OutsideGammaG";
    case ErrorKind::NotReducible: return "NotReducible";
    case ErrorKind::NearPole: return "NearPole";
    case ErrorKind::NewtonDivergence: return "NewtonDivergence";
    case ErrorKind::CalibrationAmbiguous: return "CalibrationAmbiguous";
    case ErrorKind::ZeroHits: return "ZeroHits";
    case ErrorKind::TailDominates: return "TailDominates";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::FamilyContractViolated: return "FamilyContractViolated";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace sflow
