#ifndef FRECHET_KERNEL_HPP
#define FRECHET_KERNEL_HPP

#include <string_view>

namespace frechet {

enum class KernelShape { Epanechnikov, Gaussian, Uniform };

/// Symmetric probability density used for local smoothing.
class Kernel {
 public:
  constexpr Kernel() = default;
  constexpr explicit Kernel(KernelShape shape) : shape_(shape) {}

  KernelShape shape() const noexcept { return shape_; }

  /// K(u).
  double operator()(double u) const noexcept;

  /// K_h(u) = K(u / h) / h.
  double scaled(double u, double h) const noexcept { return (*this)(u / h) / h; }

  /// True when K vanishes outside [-1, 1].
  bool compact() const noexcept { return shape_ != KernelShape::Gaussian; }

 private:
  KernelShape shape_ = KernelShape::Epanechnikov;
};

std::string_view to_string(KernelShape shape) noexcept;
KernelShape parse_kernel_shape(std::string_view name);

}  // namespace frechet

#endif  // FRECHET_KERNEL_HPP
