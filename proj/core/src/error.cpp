#include "frechet/error.hpp"

namespace frechet {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::CovarianceSingular: return "CovarianceSingular";
    case ErrorCode::BandwidthTooSmall: return "BandwidthTooSmall";
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::ParameterDomain: return "ParameterDomain";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::AntipodalPoint: return "AntipodalPoint";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::DegenerateResponse: return "DegenerateResponse";
    case ErrorCode::DataFormat: return "DataFormat";
  }
  return "Unknown";
}

}  // namespace frechet
