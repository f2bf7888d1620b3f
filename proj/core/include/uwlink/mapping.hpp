// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "uwlink/common.hpp"

namespace uwlink {

// Gray-labelled square constellations with unit average symbol energy.
//
// A symbol carries 2*Bh bits [b_0 .. b_{2Bh-1}]: the first Bh bits select the
// in-phase level, the last Bh the quadrature level. Per-axis labels follow the
// reflected Gray sequence mapped to descending levels, so the axis MSB selects
// the positive half-plane when 0:
//   1 bit : 0 -> +1, 1 -> -1                                   (scale 1/sqrt(2))
//   2 bits: 00 -> +3, 01 -> +1, 11 -> -1, 10 -> -3             (scale 1/sqrt(10))
//   3 bits: 000 +7, 001 +5, 011 +3, 010 +1, 110 -1, 111 -3,
//           101 -5, 100 -7                                     (scale 1/sqrt(42))
// QPSK bits 00 therefore map to (+1+j)/sqrt(2).

enum class Constellation { kQpsk, k16Qam, k64Qam };

int bits_per_symbol(Constellation c);

/// Unscaled per-axis Gray levels indexed by the axis bit pattern (MSB first).
const std::vector<double>& gray_axis_levels(Constellation c);

/// Axis normalization so that E|symbol|^2 = 1.
double axis_scale(Constellation c);

/// Maps a bit stream (length divisible by bits_per_symbol) to symbols.
cvec map_symbols(const std::vector<std::uint8_t>& bits, Constellation c);

/// Max-log demapper for y = d + CN(0, noise_var) observations.
/// `prior_llr` (optional, may be empty) holds per-bit priors log P(0)/P(1);
/// the returned LLRs are extrinsic (prior contribution subtracted) and
/// clamped to +-50. noise_var is per complex symbol.
std::vector<double> demap_llrs(const cvec& symbols, const std::vector<double>& noise_var,
                               Constellation c, const std::vector<double>& prior_llr = {});

/// Posterior symbol statistics from per-bit LLRs (exact per-axis expectation).
struct SoftSymbols {
  cvec mean;
  std::vector<double> var;
};
SoftSymbols soft_symbols(const std::vector<double>& llrs, Constellation c);

}  // namespace uwlink
