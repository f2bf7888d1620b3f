// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <vector>

#include "uwlink/channel.hpp"
#include "uwlink/common.hpp"
#include "uwlink/waveform.hpp"

namespace uwlink {

// Unique-word channel estimation.
//
// Per frame the receiver forms least-squares estimates on both unique words
// (division by the flat Zadoff-Chu spectrum), gates the time-domain result
// into per-antenna segments, and Wiener-interpolates the two per-antenna
// snapshots onto each data block. The interpolation coefficients depend only
// on second-order statistics (Jakes correlation, tap powers, noise level), so
// they are computed once per operating point and reused for every frame.

/// Average of the Jakes correlation between two sample windows:
///   (1/(len_a len_b)) sum_{n,n'} J0(2 pi f_norm (n + off_a - n' - off_b)).
double block_avg_correlation(int off_a, int len_a, int off_b, int len_b, double f_norm);

/// Residual Doppler (ICI) variance of a length-k block under block-constant
/// equalization: 1 - block_avg_correlation(0,k,0,k).
double doppler_error_variance(int k, double f_norm);

struct WienerTable {
  std::vector<std::array<cd, 2>> coeff;  ///< per block m, weights of UW 0/1
  std::vector<double> sigma2_ce;         ///< per block m, composite estimation error per bin
  double sigma2_d = 0.0;                 ///< per-bin ICI error of a data block
  double sigma2 = 0.0;                   ///< operating noise variance
};

/// Second-order statistics of the gated UW estimates and the induced MMSE
/// interpolator. The pilot covariance combines the block-averaged channel
/// correlation, the intra-UW Doppler leakage of the Zadoff-Chu LS step, and
/// the thermal noise passed through LS + gating; the model was validated
/// against Monte-Carlo estimation error. All quantities are the
/// antenna-count-invariant composite forms (per-antenna values are 1/n_tx of
/// them).
WienerTable compute_wiener_table(const FrameGeometry& g, const ChannelProfile& profile,
                                 double f_norm, double sigma2);

struct ChannelEstimate {
  int k = 0;
  int n_rx = 0;
  /// Frequency response per (block m, receive antenna): fd[m*n_rx + nr][bin].
  std::vector<cvec> fd;
  std::vector<double> sigma2_ce;  ///< copied from the table
  double sigma2_d = 0.0;
  double sigma2 = 0.0;

  const cvec& at(int m, int nr) const { return fd[static_cast<size_t>(m * n_rx + nr)]; }
};

/// Runs the full per-frame chain on the received UW payloads
/// (uw_rx[u][nr], each length N_UW) and returns composite per-(block, rx)
/// frequency responses on K bins.
ChannelEstimate estimate_channel(const std::vector<std::vector<cvec>>& uw_rx,
                                 const FrameGeometry& g, const WienerTable& table);

/// Frame-design trade-off: candidate block counts are scored by the sum of
/// the mean interpolation error and the Doppler error at the operating noise
/// level; more blocks shorten them (less ICI) but stretch the frame (worse
/// interpolation).
struct FrameOptimization {
  struct Row {
    int m_blocks;
    double sigma2_ce;  ///< mean over blocks
    double sigma2_d;
    double total;
  };
  std::vector<Row> rows;
  int best_m = 0;
};

FrameOptimization optimize_frame(const FrameGeometry& base, const ChannelProfile& profile,
                                 double f_norm, double sigma2,
                                 const std::vector<int>& candidates = {1, 2, 4, 6, 8});

}  // namespace uwlink
