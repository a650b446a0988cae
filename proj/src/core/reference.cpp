#include "core/reference.hpp"

#include <cmath>

#include "core/error.hpp"
#include "core/hermite.hpp"
#include "core/multi_index.hpp"

namespace dfgt {

double exact_gauss_transform(std::span<const double> points_flat, std::span<const double> charges,
                             std::span<const double> target, double delta) {
  const std::size_t d = target.size();
  if (d == 0 || points_flat.size() != charges.size() * d) {
    throw Error(ErrorCode::invalid_argument, "exact_gauss_transform: size mismatch");
  }
  if (!(delta > 0.0)) throw Error(ErrorCode::invalid_argument, "exact_gauss_transform: delta must be positive");
  double sum = 0.0;
  for (std::size_t j = 0; j < charges.size(); ++j) {
    double dist2 = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double diff = target[i] - points_flat[j * d + i];
      dist2 += diff * diff;
    }
    sum += charges[j] * std::exp(-dist2 / delta);
  }
  return sum;
}

std::vector<double> exact_matvec(std::span<const double> points_flat,
                                 std::span<const double> charges, int dim, double delta) {
  const std::size_t d = static_cast<std::size_t>(dim);
  if (dim < 1 || points_flat.size() != charges.size() * d) {
    throw Error(ErrorCode::invalid_argument, "exact_matvec: size mismatch");
  }
  std::vector<double> out(charges.size());
  for (std::size_t i = 0; i < charges.size(); ++i) {
    out[i] = exact_gauss_transform(points_flat, charges, points_flat.subspan(i * d, d), delta);
  }
  return out;
}

std::vector<double> direct_taylor_coeffs(std::span<const double> point, double charge,
                                         std::span<const double> target_center,
                                         const GridParams& params) {
  const std::size_t d = static_cast<std::size_t>(params.dim);
  if (point.size() != d || target_center.size() != d) {
    throw Error(ErrorCode::invalid_argument, "direct_taylor_coeffs: dimension mismatch");
  }
  const double inv_sqrt_delta = 1.0 / std::sqrt(params.delta);
  std::vector<double> v(d);
  for (std::size_t i = 0; i < d; ++i) v[i] = (point[i] - target_center[i]) * inv_sqrt_delta;

  std::vector<double> out;
  out.reserve(checked_pow(params.order, params.dim, kMaxIndexCount));
  for (const MultiIndex& beta : enumerate_truncated(params.dim, params.order)) {
    out.push_back(charge * factorial_reciprocal(beta) * multi_hermite(beta, v));
  }
  return out;
}

}  // namespace dfgt
