#include "core/grid.hpp"

#include <cmath>

#include "core/error.hpp"
#include "core/multi_index.hpp"
#include "core/truncation_bounds.hpp"

namespace dfgt {

namespace {

// floor(x/side) must fit an int64; beyond this the grid index is meaningless.
constexpr double kMaxBoxCoord = 9.0e18;

void check_dim(int dim) {
  if (dim < 1 || dim > kMaxDim) {
    throw Error(ErrorCode::invalid_argument, "dimension must be in [1, 8]");
  }
}

}  // namespace

BoxId::BoxId(std::span<const std::int64_t> coords) : dim_(static_cast<int>(coords.size())) {
  check_dim(dim_);
  coords_.fill(0);
  for (int i = 0; i < dim_; ++i) coords_[static_cast<std::size_t>(i)] = coords[static_cast<std::size_t>(i)];
}

BoxId BoxId::with_dim(int dim) {
  check_dim(dim);
  BoxId id;
  id.dim_ = dim;
  return id;
}

bool BoxId::operator<(const BoxId& other) const {
  if (dim_ != other.dim_) return dim_ < other.dim_;
  for (int i = 0; i < dim_; ++i) {
    const auto a = coords_[static_cast<std::size_t>(i)];
    const auto b = other.coords_[static_cast<std::size_t>(i)];
    if (a != b) return a < b;
  }
  return false;
}

BoxId box_of(std::span<const double> point, double side) {
  check_dim(static_cast<int>(point.size()));
  if (!(side > 0.0) || !std::isfinite(side)) {
    throw Error(ErrorCode::invalid_argument, "box_of: side must be positive and finite");
  }
  BoxId id = BoxId::with_dim(static_cast<int>(point.size()));
  for (int i = 0; i < id.dim(); ++i) {
    const double x = point[static_cast<std::size_t>(i)];
    if (!std::isfinite(x)) throw Error(ErrorCode::invalid_data, "box_of: non-finite coordinate");
    const double c = std::floor(x / side);
    if (c < -kMaxBoxCoord || c > kMaxBoxCoord) {
      throw Error(ErrorCode::invalid_data, "box_of: coordinate out of indexable range");
    }
    id[i] = static_cast<std::int64_t>(c);
  }
  return id;
}

void box_center(const BoxId& id, double side, std::span<double> out) {
  if (static_cast<int>(out.size()) != id.dim()) {
    throw Error(ErrorCode::invalid_argument, "box_center: dimension mismatch");
  }
  for (int i = 0; i < id.dim(); ++i) {
    out[static_cast<std::size_t>(i)] = (static_cast<double>(id[i]) + 0.5) * side;
  }
}

void for_each_neighbor(const BoxId& id, int radius, const std::function<void(const BoxId&)>& fn) {
  if (radius < 0) throw Error(ErrorCode::invalid_argument, "neighbors: radius must be >= 0");
  const int d = id.dim();
  check_dim(d);
  const std::size_t count = checked_pow(2 * radius + 1, d, kMaxIndexCount);

  std::array<int, kMaxDim> offset;
  offset.fill(-radius);
  BoxId cur = id;
  for (int i = 0; i < d; ++i) cur[i] = id[i] - radius;
  for (std::size_t n = 0; n < count; ++n) {
    fn(cur);
    for (int axis = d - 1; axis >= 0; --axis) {
      auto& o = offset[static_cast<std::size_t>(axis)];
      if (++o <= radius) {
        cur[axis] = id[axis] + o;
        break;
      }
      o = -radius;
      cur[axis] = id[axis] + o;
    }
  }
}

std::vector<BoxId> neighbors(const BoxId& id, int radius) {
  std::vector<BoxId> out;
  out.reserve(checked_pow(2 * radius + 1, id.dim(), kMaxIndexCount));
  for_each_neighbor(id, radius, [&out](const BoxId& b) { out.push_back(b); });
  return out;
}

ParamChoice choose_params(double charge, double eps, double r, int dim) {
  check_dim(dim);
  if (!(charge >= 1.0) || !std::isfinite(charge)) {
    throw Error(ErrorCode::invalid_argument, "choose_params: charge budget must be >= 1");
  }
  if (!(eps > 0.0) || !(eps < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "choose_params: eps must be in (0, 1)");
  }
  if (!(r > 0.0) || r > 0.5) {
    throw Error(ErrorCode::invalid_argument, "choose_params: r must be in (0, 1/2]");
  }

  // eps/3 to the dropped far field, 2*eps/3 to the two expansion truncations.
  ParamChoice choice{-1, -1};
  for (int k = 0; k <= kMaxRadius; ++k) {
    if (far_field_bound(k, r, charge) <= eps / 3.0) {
      choice.radius = k;
      break;
    }
  }
  if (choice.radius < 0) {
    throw Error(ErrorCode::accuracy_unreachable, "requested accuracy needs neighbor radius beyond cap");
  }
  for (int p = 1; p <= kMaxOrder; ++p) {
    if (combined_truncation_bound({p, r, dim, charge}) <= 2.0 * eps / 3.0) {
      choice.order = p;
      break;
    }
  }
  if (choice.order < 0) {
    throw Error(ErrorCode::accuracy_unreachable, "requested accuracy needs expansion order beyond cap");
  }
  return choice;
}

GridParams make_grid_params(int dim, double delta, double eps, double r, double charge_budget) {
  check_dim(dim);
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw Error(ErrorCode::invalid_argument, "delta must be positive and finite");
  }
  const ParamChoice choice = choose_params(charge_budget, eps, r, dim);
  // Enforce the resource caps up front so every later enumeration is safe.
  try {
    checked_pow(choice.order, dim, kMaxIndexCount);
    checked_pow(2 * choice.radius + 1, dim, kMaxIndexCount);
  } catch (const Error&) {
    throw Error(ErrorCode::accuracy_unreachable,
                "requested accuracy needs index sets beyond the resource cap");
  }

  GridParams params;
  params.dim = dim;
  params.delta = delta;
  params.eps = eps;
  params.r = r;
  params.side = r * std::sqrt(2.0 * delta);
  params.order = choice.order;
  params.radius = choice.radius;
  params.charge_budget = charge_budget;
  return params;
}

}  // namespace dfgt
