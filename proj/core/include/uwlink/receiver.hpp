// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "uwlink/conv_code.hpp"
#include "uwlink/estimation.hpp"
#include "uwlink/interleaver.hpp"
#include "uwlink/mapping.hpp"
#include "uwlink/waveform.hpp"

namespace uwlink {

// Maximum-ratio combining of the per-antenna block spectra against the
// estimated responses, followed by soft parallel-interference-cancellation
// equalization and BICM decoding. After MRC the link behaves as a single
// channel y_eq[k] = lambda_eq[k] X[k] + w with per-block effective noise
// sigma2 + sigma2_ce[m] + sigma2_d (thermal, estimation, residual Doppler).

struct CombinedBlocks {
  int k = 0;
  std::vector<cvec> y_eq;                   ///< [m][bin]
  std::vector<std::vector<double>> lambda;  ///< [m][bin], >= 0; 0 marks an erased bin
  std::vector<double> sigma2_eff;           ///< [m]
};

/// block_fd[m][nr] are the unitary DFTs of the received block payloads.
CombinedBlocks mrc_combine(const std::vector<std::vector<cvec>>& block_fd,
                           const ChannelEstimate& est);

struct BicmScheme {
  CodeRate rate = CodeRate::kHalf;
  Constellation constellation = Constellation::kQpsk;
  std::uint64_t interleaver_seed = 0;
};

struct DetectionResult {
  std::vector<std::uint8_t> info_bits;                ///< final decision
  std::vector<std::vector<std::uint8_t>> iter_info;   ///< per-iteration decisions
  std::vector<double> iter_mi;                        ///< decoder-extrinsic info proxy
  int decoder_invocations = 0;
};

/// Runs `n_iterations` rounds of MMSE-PIC equalization, max-log demapping and
/// max-log BCJR decoding (one round = conventional non-iterative detection).
DetectionResult detect_frame(const CombinedBlocks& comb, Waveform w, const FrameGeometry& g,
                             const BicmScheme& scheme, int n_iterations);

}  // namespace uwlink
