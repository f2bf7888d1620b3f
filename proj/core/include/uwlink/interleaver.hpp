// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "uwlink/common.hpp"

namespace uwlink {

/// Seeded pseudo-random bit interleaver (Fisher-Yates over positions).
/// perm[i] is the input position transmitted at output position i.
class Interleaver {
 public:
  Interleaver(int length, std::uint64_t seed);

  int length() const { return static_cast<int>(perm_.size()); }
  const std::vector<int>& permutation() const { return perm_; }

  template <typename T>
  std::vector<T> interleave(const std::vector<T>& in) const {
    require(in.size() == perm_.size(), "interleaver length mismatch");
    std::vector<T> out(in.size());
    for (size_t i = 0; i < perm_.size(); ++i) out[i] = in[static_cast<size_t>(perm_[i])];
    return out;
  }

  template <typename T>
  std::vector<T> deinterleave(const std::vector<T>& in) const {
    require(in.size() == perm_.size(), "interleaver length mismatch");
    std::vector<T> out(in.size());
    for (size_t i = 0; i < perm_.size(); ++i) out[static_cast<size_t>(perm_[i])] = in[i];
    return out;
  }

 private:
  std::vector<int> perm_;
};

}  // namespace uwlink
