#include "core/truncation_bounds.hpp"

#include <cmath>

#include "core/error.hpp"

namespace dfgt {

namespace {

void validate(const BoundInputs& in) {
  if (in.order < 1) throw Error(ErrorCode::invalid_argument, "truncation bound: order must be >= 1");
  if (!(in.r > 0.0) || in.r > 0.5) {
    throw Error(ErrorCode::invalid_argument, "truncation bound: r must be in (0, 1/2]");
  }
  if (in.dim < 1) throw Error(ErrorCode::invalid_argument, "truncation bound: dim must be >= 1");
  if (!(in.charge >= 0.0) || !std::isfinite(in.charge)) {
    throw Error(ErrorCode::invalid_argument, "truncation bound: charge must be >= 0");
  }
}

double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * static_cast<double>(n - k + i) / static_cast<double>(i);
  return b;
}

}  // namespace

double hermite_truncation_bound(const BoundInputs& in) {
  validate(in);
  const double p = static_cast<double>(in.order);
  // log(r^p / sqrt(p!)) in log space: p! overflows double past p = 170
  const double log_tail = p * std::log(in.r) - 0.5 * std::lgamma(p + 1.0);
  const double head = 1.0 - std::pow(in.r, p);
  double sum = 0.0;
  for (int k = 0; k < in.dim; ++k) {
    sum += binomial(in.dim, k) * std::pow(head, k) *
           std::exp(static_cast<double>(in.dim - k) * log_tail);
  }
  return in.charge / std::pow(1.0 - in.r, in.dim) * sum;
}

double taylor_truncation_bound(const BoundInputs& in) {
  return hermite_truncation_bound(in);
}

double combined_truncation_bound(const BoundInputs& in) {
  return 2.0 * hermite_truncation_bound(in);
}

double far_field_bound(int radius, double r, double charge) {
  if (radius < 0) throw Error(ErrorCode::invalid_argument, "far_field_bound: radius must be >= 0");
  if (!(r > 0.0) || r > 0.5) {
    throw Error(ErrorCode::invalid_argument, "far_field_bound: r must be in (0, 1/2]");
  }
  if (!(charge >= 0.0) || !std::isfinite(charge)) {
    throw Error(ErrorCode::invalid_argument, "far_field_bound: charge must be >= 0");
  }
  const double k = static_cast<double>(radius);
  return charge * std::exp(-2.0 * r * r * k * k);
}

}  // namespace dfgt
