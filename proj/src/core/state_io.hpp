#pragma once

#include <string>

#include "core/dynamic_fgt.hpp"

namespace dfgt {

// Versioned text format: construction parameters plus the registry, with
// every value printed to 17 significant digits so a save/load round trip
// reproduces the structure bit for bit. Coefficient arrays are not stored;
// load rebuilds them from the registry.
//
//   dfgt-state v1
//   dim=2
//   delta=<...>
//   eps=<...>
//   r=<...>
//   budget=<...>      (charge budget, reloaded as the capacity)
//   count=<n>
//   x_1,...,x_d,q     (n rows)
void save_state(const DynamicFgt& fgt, const std::string& path);

DynamicFgt load_state(const std::string& path);

}  // namespace dfgt
