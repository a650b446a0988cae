#pragma once

namespace dfgt {

// Inputs to the a-priori truncation error bounds: expansion order (terms 0..order-1
// per axis), box-scale ratio r in (0, 1/2], dimension, and total absolute charge.
struct BoundInputs {
  int order;      // p >= 1
  double r;       // 0 < r <= 1/2
  int dim;        // d >= 1
  double charge;  // Q >= 0
};

// Worst-case error of a Hermite expansion truncated to the order^dim index set,
// for sources within a box of side r*sqrt(2*delta) around the expansion center:
//   Q/(1-r)^d * sum_{k=0}^{d-1} C(d,k) (1-r^p)^k (r^p/sqrt(p!))^{d-k}
double hermite_truncation_bound(const BoundInputs& in);

// Same closed form bounds the Taylor-side truncation for targets within a box
// of the expansion center.
double taylor_truncation_bound(const BoundInputs& in);

// Bound for the full Hermite-to-Taylor pipeline: one truncation on each side,
// each contributing at most the single-sided bound.
double combined_truncation_bound(const BoundInputs& in);

// Total contribution of all sources farther than radius boxes from the target:
// Q * exp(-2 r^2 radius^2). Boxes at box-distance > radius keep every point at
// least radius * r*sqrt(2*delta) away, so each unit of charge contributes at
// most exp(-2 r^2 radius^2).
double far_field_bound(int radius, double r, double charge);

}  // namespace dfgt
