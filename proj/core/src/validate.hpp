#pragma once

#include <string>

#include <Eigen/Core>

#include "essdyn/errors.hpp"

namespace essdyn::detail {

template <typename Derived>
void require_finite(const Eigen::DenseBase<Derived>& x, const char* name) {
  if (!x.derived().allFinite()) {
    throw InvariantError(std::string(name) + " contains a non-finite value");
  }
}

template <typename Derived>
void require_nonnegative(const Eigen::DenseBase<Derived>& x, const char* name) {
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      if (!(x.derived()(r, c) >= 0.0)) {
        // entries are reported 1-based, like species indices everywhere else
        throw InvariantError(std::string(name) + "(" + std::to_string(r + 1) + "," +
                             std::to_string(c + 1) + ") must be >= 0");
      }
    }
  }
}

template <typename Derived>
void require_size(const Eigen::DenseBase<Derived>& x, Eigen::Index n, const char* name) {
  if (x.size() != n) {
    throw DimensionError(std::string(name) + " has length " + std::to_string(x.size()) +
                         ", expected " + std::to_string(n));
  }
}

}  // namespace essdyn::detail
