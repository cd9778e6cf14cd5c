#include "frechet/kernel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "frechet/error.hpp"

namespace frechet {

double Kernel::operator()(double u) const noexcept {
  switch (shape_) {
    case KernelShape::Epanechnikov:
      return std::abs(u) <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
    case KernelShape::Gaussian:
      return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
    case KernelShape::Uniform:
      return std::abs(u) <= 1.0 ? 0.5 : 0.0;
  }
  return 0.0;
}

std::string_view to_string(KernelShape shape) noexcept {
  switch (shape) {
    case KernelShape::Epanechnikov: return "epanechnikov";
    case KernelShape::Gaussian: return "gaussian";
    case KernelShape::Uniform: return "uniform";
  }
  return "unknown";
}

KernelShape parse_kernel_shape(std::string_view name) {
  if (name == "epanechnikov" || name == "epan") return KernelShape::Epanechnikov;
  if (name == "gaussian" || name == "gauss") return KernelShape::Gaussian;
  if (name == "uniform" || name == "box") return KernelShape::Uniform;
  throw Error(ErrorCode::ParameterDomain, "unknown kernel '" + std::string(name) + "'");
}

}  // namespace frechet
