#include "core/expansion.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "core/error.hpp"
#include "core/hermite.hpp"

namespace dfgt {

Expansion::Expansion(const GridParams& params) : params_(params) {
  count_ = checked_pow(params_.order, params_.dim, kMaxIndexCount);
  signed_recip_.reserve(count_);
  recip_.reserve(count_);
  for (const MultiIndex& alpha : enumerate_truncated(params_.dim, params_.order)) {
    recip_.push_back(factorial_reciprocal(alpha));
    signed_recip_.push_back(static_cast<double>(sign(alpha)) * recip_.back());
  }
  stride_.assign(static_cast<std::size_t>(params_.dim), 1);
  for (int axis = params_.dim - 2; axis >= 0; --axis) {
    stride_[static_cast<std::size_t>(axis)] =
        stride_[static_cast<std::size_t>(axis) + 1] * static_cast<std::size_t>(params_.order);
  }
  inv_sqrt_delta_ = 1.0 / std::sqrt(params_.delta);
}

void Expansion::check_center(std::span<const double> center) const {
  if (static_cast<int>(center.size()) != params_.dim) {
    throw Error(ErrorCode::invalid_argument, "expansion: center dimension mismatch");
  }
}

void Expansion::check_in_box(std::span<const double> point, std::span<const double> center,
                             const char* what) const {
  if (static_cast<int>(point.size()) != params_.dim) {
    throw Error(ErrorCode::invalid_argument, "expansion: point dimension mismatch");
  }
  if (!(box_of(point, params_.side) == box_of(center, params_.side))) {
    throw Error(ErrorCode::invalid_argument,
                std::string("expansion: ") + what + " lies outside the box of the given center");
  }
}

void Expansion::accumulate_moments(std::span<const double> nu, double charge, double* acc) const {
  const int d = params_.dim;
  const int p = params_.order;
  // Depth-first odometer walk over {0..p-1}^d in flat order; prefix carries
  // charge * nu[0]^a0 * ... * nu[axis-1]^a_{axis-1}.
  double* cursor = acc;
  auto walk = [&](auto&& self, int axis, double prefix) -> void {
    if (axis == d - 1) {
      double cur = prefix;
      for (int a = 0; a < p; ++a) {
        *cursor++ += cur;
        cur *= nu[static_cast<std::size_t>(axis)];
      }
      return;
    }
    double cur = prefix;
    for (int a = 0; a < p; ++a) {
      self(self, axis + 1, cur);
      cur *= nu[static_cast<std::size_t>(axis)];
    }
  };
  walk(walk, 0, charge);
}

std::vector<double> Expansion::source_coeffs(std::span<const double> points_flat,
                                             std::span<const double> charges,
                                             std::span<const double> center) const {
  check_center(center);
  const std::size_t d = static_cast<std::size_t>(params_.dim);
  if (points_flat.size() != charges.size() * d) {
    throw Error(ErrorCode::invalid_argument, "source_coeffs: points/charges size mismatch");
  }
  std::vector<double> out(count_, 0.0);
  std::array<double, kMaxDim> nu;
  for (std::size_t j = 0; j < charges.size(); ++j) {
    std::span<const double> point = points_flat.subspan(j * d, d);
    check_in_box(point, center, "resident");
    if (!std::isfinite(charges[j])) {
      throw Error(ErrorCode::invalid_data, "source_coeffs: non-finite charge");
    }
    for (std::size_t i = 0; i < d; ++i) nu[i] = (point[i] - center[i]) * inv_sqrt_delta_;
    accumulate_moments(std::span<const double>(nu.data(), d), charges[j], out.data());
  }
  for (std::size_t i = 0; i < count_; ++i) out[i] *= signed_recip_[i];
  return out;
}

void Expansion::point_coeffs(std::span<const double> point, double charge,
                             std::span<const double> center, std::span<double> out) const {
  check_center(center);
  check_in_box(point, center, "resident");
  if (!std::isfinite(charge)) throw Error(ErrorCode::invalid_data, "point_coeffs: non-finite charge");
  if (out.size() != count_) throw Error(ErrorCode::invalid_argument, "point_coeffs: bad output size");
  const std::size_t d = static_cast<std::size_t>(params_.dim);
  std::array<double, kMaxDim> nu;
  for (std::size_t i = 0; i < d; ++i) nu[i] = (point[i] - center[i]) * inv_sqrt_delta_;
  std::fill(out.begin(), out.end(), 0.0);
  accumulate_moments(std::span<const double>(nu.data(), d), charge, out.data());
  for (std::size_t i = 0; i < count_; ++i) out[i] *= signed_recip_[i];
}

void Expansion::translate_accumulate(std::span<const double> source_coeffs,
                                     std::span<const double> source_center,
                                     std::span<const double> target_center,
                                     std::span<double> target_coeffs) const {
  check_center(source_center);
  check_center(target_center);
  if (source_coeffs.size() != count_ || target_coeffs.size() != count_) {
    throw Error(ErrorCode::invalid_argument, "translate_accumulate: bad coefficient size");
  }
  const int d = params_.dim;
  const int p = params_.order;
  const int row_len = 2 * p - 1;

  thread_local std::vector<double> rows, buf_a, buf_b;
  rows.resize(static_cast<std::size_t>(d) * static_cast<std::size_t>(row_len));
  for (int i = 0; i < d; ++i) {
    const double v = (source_center[static_cast<std::size_t>(i)] -
                      target_center[static_cast<std::size_t>(i)]) * inv_sqrt_delta_;
    fill_hermite_function_row(v, row_len, rows.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(row_len));
  }

  buf_a.assign(source_coeffs.begin(), source_coeffs.end());
  buf_b.assign(count_, 0.0);
  double* in = buf_a.data();
  double* out = buf_b.data();

  // d mode products: contract each alpha axis against the Hankel matrix
  // M[b][a] = h_{a+b}(v_axis). Axis 0 is outermost in the flat layout, so
  // contracting in axis order keeps (beta_0..beta_{j-1}, alpha_j..alpha_{d-1})
  // layouts consistent. O(d * p^{d+1}) per source box.
  std::size_t inner = count_ / static_cast<std::size_t>(p);
  std::size_t outer = 1;
  for (int axis = 0; axis < d; ++axis) {
    const double* row = rows.data() + static_cast<std::size_t>(axis) * static_cast<std::size_t>(row_len);
    std::fill(out, out + count_, 0.0);
    for (std::size_t o = 0; o < outer; ++o) {
      const std::size_t base = o * static_cast<std::size_t>(p) * inner;
      for (int b = 0; b < p; ++b) {
        double* dst = out + base + static_cast<std::size_t>(b) * inner;
        for (int a = 0; a < p; ++a) {
          const double w = row[a + b];
          if (w == 0.0) continue;
          const double* src = in + base + static_cast<std::size_t>(a) * inner;
          for (std::size_t x = 0; x < inner; ++x) dst[x] += w * src[x];
        }
      }
    }
    std::swap(in, out);
    outer *= static_cast<std::size_t>(p);
    inner /= static_cast<std::size_t>(p);
  }

  for (std::size_t i = 0; i < count_; ++i) target_coeffs[i] += recip_[i] * in[i];
}

void Expansion::target_coeffs(std::span<const double> target_center,
                              std::span<const SourceView> sources, std::span<double> out) const {
  check_center(target_center);
  if (out.size() != count_) throw Error(ErrorCode::invalid_argument, "target_coeffs: bad output size");
  std::fill(out.begin(), out.end(), 0.0);
  for (const SourceView& src : sources) {
    translate_accumulate(src.coeffs, src.center, target_center, out);
  }
}

double Expansion::eval_block(const double* coeffs, const double* w, int axis) const {
  if (axis == params_.dim) return coeffs[0];
  const std::size_t stride = stride_[static_cast<std::size_t>(axis)];
  const int p = params_.order;
  double acc = eval_block(coeffs + static_cast<std::size_t>(p - 1) * stride, w, axis + 1);
  for (int a = p - 2; a >= 0; --a) {
    acc = acc * w[axis] + eval_block(coeffs + static_cast<std::size_t>(a) * stride, w, axis + 1);
  }
  return acc;
}

double Expansion::evaluate(std::span<const double> coeffs, std::span<const double> point,
                           std::span<const double> center) const {
  check_center(center);
  check_in_box(point, center, "query point");
  if (coeffs.size() != count_) throw Error(ErrorCode::invalid_argument, "evaluate: bad coefficient size");
  std::array<double, kMaxDim> w;
  for (int i = 0; i < params_.dim; ++i) {
    w[static_cast<std::size_t>(i)] =
        (point[static_cast<std::size_t>(i)] - center[static_cast<std::size_t>(i)]) * inv_sqrt_delta_;
  }
  return eval_block(coeffs.data(), w.data(), 0);
}

}  // namespace dfgt
