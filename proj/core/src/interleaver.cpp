// SPDX-License-Identifier: Apache-2.0
#include "uwlink/interleaver.hpp"

#include <numeric>

#include "uwlink/rng.hpp"

namespace uwlink {

Interleaver::Interleaver(int length, std::uint64_t seed) {
  require(length > 0, "interleaver length must be positive");
  perm_.resize(static_cast<size_t>(length));
  std::iota(perm_.begin(), perm_.end(), 0);
  Rng rng(derive_seed(seed, 0x1'EA7ULL));
  for (int i = length - 1; i > 0; --i) {
    const auto j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(i) + 1));
    std::swap(perm_[static_cast<size_t>(i)], perm_[static_cast<size_t>(j)]);
  }
}

}  // namespace uwlink
