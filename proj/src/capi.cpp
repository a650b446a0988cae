#include "dfgt/dfgt.h"

#include <exception>
#include <limits>
#include <new>
#include <span>
#include <string>
#include <vector>

#include "core/dynamic_fgt.hpp"
#include "core/error.hpp"
#include "core/reference.hpp"
#include "core/state_io.hpp"

struct dfgt_handle {
  dfgt::DynamicFgt impl;
  std::string last_error;

  explicit dfgt_handle(dfgt::DynamicFgt&& fgt) : impl(std::move(fgt)) {}
};

namespace {

thread_local std::string g_last_error;

dfgt_status map_code(dfgt::ErrorCode code) {
  switch (code) {
    case dfgt::ErrorCode::invalid_argument: return DFGT_ERROR_INVALID_ARGUMENT;
    case dfgt::ErrorCode::invalid_data: return DFGT_ERROR_INVALID_DATA;
    case dfgt::ErrorCode::not_found: return DFGT_ERROR_NOT_FOUND;
    case dfgt::ErrorCode::accuracy_unreachable: return DFGT_ERROR_ACCURACY;
    case dfgt::ErrorCode::state: return DFGT_ERROR_STATE;
    case dfgt::ErrorCode::io: return DFGT_ERROR_IO;
    case dfgt::ErrorCode::internal: return DFGT_ERROR_INTERNAL;
  }
  return DFGT_ERROR_INTERNAL;
}

// Runs `fn`, routing failures into `sink` (handle-local or thread-local).
template <typename Fn>
dfgt_status guarded(std::string& sink, Fn&& fn) {
  try {
    fn();
    return DFGT_OK;
  } catch (const dfgt::Error& e) {
    sink = e.what();
    return map_code(e.code());
  } catch (const std::bad_alloc&) {
    sink = "out of memory";
    return DFGT_ERROR_INTERNAL;
  } catch (const std::exception& e) {
    sink = e.what();
    return DFGT_ERROR_INTERNAL;
  }
}

template <typename Fn>
dfgt_status guarded(dfgt_handle* handle, Fn&& fn) {
  if (handle == nullptr) return DFGT_ERROR_INVALID_ARGUMENT;
  return guarded(handle->last_error, std::forward<Fn>(fn));
}

template <typename Fn>
dfgt_status guarded(const dfgt_handle* handle, Fn&& fn) {
  return guarded(const_cast<dfgt_handle*>(handle), std::forward<Fn>(fn));
}

std::span<const double> point_arg(const dfgt_handle* handle, const double* point) {
  if (point == nullptr) {
    throw dfgt::Error(dfgt::ErrorCode::invalid_argument, "null point pointer");
  }
  return {point, static_cast<std::size_t>(handle->impl.dim())};
}

}  // namespace

extern "C" {

dfgt_status dfgt_create(size_t dim, double delta, double eps, double r, double capacity,
                        const double* points, const double* charges, size_t count,
                        dfgt_handle** out) {
  if (out == nullptr) return DFGT_ERROR_INVALID_ARGUMENT;
  *out = nullptr;
  return guarded(g_last_error, [&] {
    if (count > 0 && (points == nullptr || charges == nullptr)) {
      throw dfgt::Error(dfgt::ErrorCode::invalid_argument, "null data pointer with count > 0");
    }
    if (dim < 1 || dim > static_cast<size_t>(dfgt::kMaxDim)) {
      throw dfgt::Error(dfgt::ErrorCode::invalid_argument, "dim must be in [1, 8]");
    }
    if (count > std::numeric_limits<size_t>::max() / dim) {
      throw dfgt::Error(dfgt::ErrorCode::invalid_argument, "count too large");
    }
    dfgt::DynamicFgt fgt(static_cast<int>(dim), delta, eps, r, capacity,
                         {points, count * dim}, {charges, count});
    *out = new dfgt_handle(std::move(fgt));
  });
}

void dfgt_destroy(dfgt_handle* handle) { delete handle; }

dfgt_status dfgt_insert(dfgt_handle* handle, const double* point, double charge) {
  return guarded(handle, [&] { handle->impl.insert(point_arg(handle, point), charge); });
}

dfgt_status dfgt_delete(dfgt_handle* handle, const double* point) {
  return guarded(handle, [&] { handle->impl.erase(point_arg(handle, point)); });
}

dfgt_status dfgt_kde_query(dfgt_handle* handle, const double* target, double* out_value) {
  return guarded(handle, [&] {
    if (out_value == nullptr) {
      throw dfgt::Error(dfgt::ErrorCode::invalid_argument, "null output pointer");
    }
    *out_value = handle->impl.kde_query(point_arg(handle, target));
  });
}

dfgt_status dfgt_matvec(dfgt_handle* handle, const double* charges, size_t count,
                        double* out_values) {
  return guarded(handle, [&] {
    if (count > 0 && (charges == nullptr || out_values == nullptr)) {
      throw dfgt::Error(dfgt::ErrorCode::invalid_argument, "null data pointer with count > 0");
    }
    const std::vector<double> values = handle->impl.matvec({charges, count});
    for (size_t i = 0; i < values.size(); ++i) out_values[i] = values[i];
  });
}

dfgt_status dfgt_matvec_delta(dfgt_handle* handle, const size_t* indices,
                              const double* new_charges, size_t n_changes,
                              size_t* out_indices, double* out_values, size_t capacity,
                              size_t* out_count) {
  return guarded(handle, [&] {
    if (out_count == nullptr) {
      throw dfgt::Error(dfgt::ErrorCode::invalid_argument, "null out_count pointer");
    }
    *out_count = 0;
    if (n_changes > 0 && (indices == nullptr || new_charges == nullptr)) {
      throw dfgt::Error(dfgt::ErrorCode::invalid_argument, "null data pointer with n_changes > 0");
    }
    std::vector<dfgt::DynamicFgt::DeltaUpdate> changes(n_changes);
    for (size_t i = 0; i < n_changes; ++i) changes[i] = {indices[i], new_charges[i]};
    const auto result = handle->impl.matvec_delta(changes);
    *out_count = result.indices.size();
    if (result.indices.size() > capacity) {
      throw dfgt::Error(dfgt::ErrorCode::invalid_argument,
                        "output capacity " + std::to_string(capacity) + " too small; need " +
                            std::to_string(result.indices.size()));
    }
    if (result.indices.size() > 0 && (out_indices == nullptr || out_values == nullptr)) {
      throw dfgt::Error(dfgt::ErrorCode::invalid_argument, "null output pointer");
    }
    for (size_t i = 0; i < result.indices.size(); ++i) {
      out_indices[i] = result.indices[i];
      out_values[i] = result.values[i];
    }
  });
}

dfgt_status dfgt_rebuild(dfgt_handle* handle) {
  return guarded(handle, [&] { handle->impl.rebuild(); });
}

dfgt_status dfgt_size(const dfgt_handle* handle, size_t* out_count) {
  return guarded(handle, [&] {
    if (out_count == nullptr) {
      throw dfgt::Error(dfgt::ErrorCode::invalid_argument, "null output pointer");
    }
    *out_count = handle->impl.size();
  });
}

dfgt_status dfgt_get_info(const dfgt_handle* handle, dfgt_info* out_info) {
  return guarded(handle, [&] {
    if (out_info == nullptr) {
      throw dfgt::Error(dfgt::ErrorCode::invalid_argument, "null output pointer");
    }
    const dfgt::GridParams& p = handle->impl.params();
    out_info->dim = static_cast<size_t>(p.dim);
    out_info->delta = p.delta;
    out_info->eps = p.eps;
    out_info->r = p.r;
    out_info->side = p.side;
    out_info->order = p.order;
    out_info->radius = p.radius;
    out_info->charge_budget = p.charge_budget;
    out_info->count = handle->impl.size();
    out_info->abs_charge = handle->impl.current_abs_charge();
  });
}

dfgt_status dfgt_exact_kde(const dfgt_handle* handle, const double* target, double* out_value) {
  return guarded(handle, [&] {
    if (out_value == nullptr) {
      throw dfgt::Error(dfgt::ErrorCode::invalid_argument, "null output pointer");
    }
    const std::vector<double> pts = handle->impl.points();
    const std::vector<double> qs = handle->impl.charges();
    *out_value = dfgt::exact_gauss_transform(pts, qs, point_arg(handle, target),
                                             handle->impl.params().delta);
  });
}

dfgt_status dfgt_save(const dfgt_handle* handle, const char* path) {
  return guarded(handle, [&] {
    if (path == nullptr) throw dfgt::Error(dfgt::ErrorCode::invalid_argument, "null path");
    dfgt::save_state(handle->impl, path);
  });
}

dfgt_status dfgt_load(const char* path, dfgt_handle** out) {
  if (out == nullptr) return DFGT_ERROR_INVALID_ARGUMENT;
  *out = nullptr;
  return guarded(g_last_error, [&] {
    if (path == nullptr) throw dfgt::Error(dfgt::ErrorCode::invalid_argument, "null path");
    *out = new dfgt_handle(dfgt::load_state(path));
  });
}

const char* dfgt_status_name(dfgt_status status) {
  switch (status) {
    case DFGT_OK: return "DFGT_OK";
    case DFGT_ERROR_INVALID_ARGUMENT: return "DFGT_ERROR_INVALID_ARGUMENT";
    case DFGT_ERROR_INVALID_DATA: return "DFGT_ERROR_INVALID_DATA";
    case DFGT_ERROR_NOT_FOUND: return "DFGT_ERROR_NOT_FOUND";
    case DFGT_ERROR_ACCURACY: return "DFGT_ERROR_ACCURACY";
    case DFGT_ERROR_STATE: return "DFGT_ERROR_STATE";
    case DFGT_ERROR_IO: return "DFGT_ERROR_IO";
    case DFGT_ERROR_INTERNAL: return "DFGT_ERROR_INTERNAL";
  }
  return "DFGT_ERROR_UNKNOWN";
}

const char* dfgt_last_error(const dfgt_handle* handle) {
  if (handle == nullptr) return g_last_error.c_str();
  return handle->last_error.c_str();
}

}  // extern "C"
