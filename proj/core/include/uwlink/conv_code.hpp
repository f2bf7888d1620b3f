// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "uwlink/common.hpp"

namespace uwlink {

// Rate-1/2 recursive systematic convolutional code, generators {133,171} octal
// (feedback 133, parity 171), constraint length 7 / 64 states. Rate 3/4 is
// obtained by periodic parity puncturing that keeps one parity bit out of
// every three trellis steps; systematic bits always survive.
//
// Frames are zero-tail terminated: six flush input bits (computed from the
// feedback polynomial) drive the register to zero and their coded pairs are
// part of the output. With T trellis steps the transmitted length is 2T at
// rate 1/2 and 4T/3 at rate 3/4; the information payload is T - 6 bits.

enum class CodeRate { kHalf, kThreeQuarter };

inline constexpr int kCodeMemory = 6;
inline constexpr int kCodeStates = 64;
inline constexpr double kLlrClamp = 50.0;

/// Rate as a fraction (nominal; termination overhead excluded).
double code_rate_value(CodeRate r);

/// Trellis steps that fill a transmitted budget of n_coded bits. Throws if the
/// budget is not commensurate with the puncturing period.
int trellis_steps_for_coded(int n_coded, CodeRate r);

/// Transmitted bits produced by a trellis of T steps.
int coded_bits_for_steps(int steps, CodeRate r);

/// Information payload for a transmitted budget (trellis steps minus tail).
int info_bits_for_coded(int n_coded, CodeRate r);

/// True when the parity bit of trellis step t is transmitted.
bool parity_kept(int step, CodeRate r);

/// Encodes info bits (appending the 6-bit zero tail) and returns the
/// punctured serialized stream: per step the systematic bit, then the parity
/// bit when kept.
std::vector<std::uint8_t> conv_encode(const std::vector<std::uint8_t>& info, CodeRate r);

/// Keeps one parity bit of every three (pattern offset 0). Rate 1/2 keeps all.
std::vector<std::uint8_t> puncture_parity(const std::vector<std::uint8_t>& parity, CodeRate r);

/// Re-inserts zeros (erasure LLRs) at punctured parity positions.
std::vector<double> depuncture_parity(const std::vector<double>& parity_llr, CodeRate r, int steps);

/// Splits a serialized coded-bit LLR stream into per-step systematic/parity
/// LLR lanes, zero-filling punctured parity positions.
void split_coded_llrs(const std::vector<double>& coded_llr, CodeRate r, int steps,
                      std::vector<double>& sys_llr, std::vector<double>& par_llr);

/// Inverse of split_coded_llrs on per-step lanes (drops punctured positions).
std::vector<double> merge_coded_llrs(const std::vector<double>& sys_llr,
                                     const std::vector<double>& par_llr, CodeRate r);

struct SisoResult {
  std::vector<std::uint8_t> info_hard;  ///< payload decisions (tail excluded)
  std::vector<double> ext_sys;          ///< extrinsic LLRs, systematic lane
  std::vector<double> ext_par;          ///< extrinsic LLRs, parity lane
};

/// Max-log BCJR over the terminated trellis. LLR convention log P(0)/P(1),
/// inputs clamped to +-50. Lane lengths define the trellis length.
SisoResult conv_decode_siso(const std::vector<double>& sys_llr, const std::vector<double>& par_llr);

/// Convenience hard decode from a serialized coded LLR stream.
std::vector<std::uint8_t> conv_decode(const std::vector<double>& coded_llr, CodeRate r);

}  // namespace uwlink
