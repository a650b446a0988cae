#pragma once

#include <span>
#include <vector>

#include "core/grid.hpp"

namespace dfgt {

// Brute-force evaluators used to validate the fast structure. O(N) per query,
// O(N^2) for the full matrix product; no truncation anywhere.

// sum_j q_j * exp(-||target - s_j||^2 / delta)
double exact_gauss_transform(std::span<const double> points_flat, std::span<const double> charges,
                             std::span<const double> target, double delta);

// The full transform evaluated at every source point: out[i] = G(s_i).
std::vector<double> exact_matvec(std::span<const double> points_flat,
                                 std::span<const double> charges, int dim, double delta);

// Taylor coefficients of one source's kernel about a target-box center,
// truncated to the {0..p-1}^d set in lexicographic order. The generating
// identity exp(-(w-v)^2) = sum_n h_n(v) w^n / n! gives, per axis,
//   B_beta = (q / beta!) * prod_i h_{beta_i}((s_i - center_i)/sqrt(delta))
// Independent of the translation pipeline; used to cross-check target
// expansions coefficient by coefficient.
std::vector<double> direct_taylor_coeffs(std::span<const double> point, double charge,
                                         std::span<const double> target_center,
                                         const GridParams& params);

}  // namespace dfgt
