#include "core/hermite.hpp"

#include <cmath>

#include "core/error.hpp"

namespace dfgt {

namespace {

void check_args(double t, int n_max) {
  if (!std::isfinite(t)) throw Error(ErrorCode::invalid_data, "hermite: non-finite argument");
  if (n_max < 0) throw Error(ErrorCode::invalid_argument, "hermite: negative degree");
}

// Shared recurrence: out[0], out[1] are already seeded.
void run_recurrence(double t, int count, double* out) {
  for (int n = 1; n + 1 < count; ++n) {
    out[n + 1] = 2.0 * t * out[n] - 2.0 * static_cast<double>(n) * out[n - 1];
  }
}

}  // namespace

HermiteRow hermite_polynomial_row(double t, int n_max) {
  check_args(t, n_max);
  HermiteRow row{HermiteVariant::polynomial, t, std::vector<double>(static_cast<std::size_t>(n_max) + 1)};
  row.values[0] = 1.0;
  if (n_max >= 1) row.values[1] = 2.0 * t;
  run_recurrence(t, n_max + 1, row.values.data());
  return row;
}

void fill_hermite_function_row(double t, int count, double* out) {
  const double damp = std::exp(-t * t);
  out[0] = damp;
  if (count >= 2) out[1] = 2.0 * t * damp;
  run_recurrence(t, count, out);
}

HermiteRow hermite_function_row(double t, int n_max) {
  check_args(t, n_max);
  HermiteRow row{HermiteVariant::function, t, std::vector<double>(static_cast<std::size_t>(n_max) + 1)};
  fill_hermite_function_row(t, n_max + 1, row.values.data());
  return row;
}

double multi_hermite(const MultiIndex& alpha, std::span<const double> t) {
  if (static_cast<int>(t.size()) != alpha.dim()) {
    throw Error(ErrorCode::invalid_argument, "multi_hermite: dimension mismatch");
  }
  double result = 1.0;
  for (int i = 0; i < alpha.dim(); ++i) {
    HermiteRow row = hermite_function_row(t[static_cast<std::size_t>(i)], alpha[i]);
    result *= row.values[static_cast<std::size_t>(alpha[i])];
  }
  return result;
}

double cramer_bound(int n, double t) {
  check_args(t, n);
  const double log_part = 0.5 * static_cast<double>(n) * std::log(2.0) +
                          0.5 * std::lgamma(static_cast<double>(n) + 1.0) - 0.5 * t * t;
  return 1.09 * std::exp(log_part);
}

}  // namespace dfgt
