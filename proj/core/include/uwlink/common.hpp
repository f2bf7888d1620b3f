// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace uwlink {

using cd = std::complex<double>;
using cvec = std::vector<cd>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// Throws std::invalid_argument when a configuration/precondition check fails.
inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace uwlink
