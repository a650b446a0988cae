#pragma once

#include <span>
#include <vector>

#include "core/multi_index.hpp"

namespace dfgt {

enum class HermiteVariant { polynomial, function };

// Values of one Hermite family at a single argument, degrees 0..n.
struct HermiteRow {
  HermiteVariant variant;
  double argument;
  std::vector<double> values;
};

// Physicists' Hermite polynomials via the three-term recurrence
//   H_0 = 1,  H_1 = 2t,  H_{n+1} = 2t H_n - 2n H_{n-1}
// so H_2 = 4t^2 - 2, H_3 = 8t^3 - 12t, ...
HermiteRow hermite_polynomial_row(double t, int n_max);

// Hermite functions h_n(t) = exp(-t^2) H_n(t). The recurrence is run directly
// on the damped values (seeds exp(-t^2), 2t exp(-t^2)); forming H_n first and
// multiplying would overflow long before the damped value does.
HermiteRow hermite_function_row(double t, int n_max);

// Allocation-free variant filling out[0..count). Used by the hot paths.
void fill_hermite_function_row(double t, int count, double* out);

// prod_i h_{alpha_i}(t_i). t must have alpha.dim() entries.
double multi_hermite(const MultiIndex& alpha, std::span<const double> t);

// Upper bound 1.09 * 2^{n/2} * sqrt(n!) * exp(-t^2/2) >= |h_n(t)|,
// evaluated in log space so it stays finite for all n <= 170.
double cramer_bound(int n, double t);

}  // namespace dfgt
