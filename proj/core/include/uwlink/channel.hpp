// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "uwlink/common.hpp"
#include "uwlink/rng.hpp"
#include "uwlink/waveform.hpp"

namespace uwlink {

/// Tapped-delay-line power profile on the sample grid (delays strictly
/// increasing, delay 0 present, powers normalized to unit sum).
struct ChannelProfile {
  std::vector<int> delays;
  std::vector<double> powers;

  int length() const { return delays.empty() ? 0 : delays.back() + 1; }
  int n_taps() const { return static_cast<int>(delays.size()); }
  void validate() const;

  /// 3GPP Extended Vehicular A, binned to the nearest sample at rate
  /// `bandwidth_hz` (powers of co-binned rays add, then normalize).
  static ChannelProfile eva(double bandwidth_hz);
};

/// Jakes autocorrelation J0(2 pi f_doppler dn / bandwidth) as a function of
/// the lag in samples, for normalized Doppler f_norm = f_doppler/bandwidth.
double jakes_autocorrelation(double lag_samples, double f_norm);

/// Doubly selective Rayleigh realization: per (tx, rx, tap) a complex gain
/// series over n = 0 .. n_samples-1 (time origin = first frame sample).
struct ChannelRealization {
  ChannelProfile profile;
  int n_tx = 1;
  int n_rx = 1;
  int n_samples = 0;
  /// gains[(nr*n_tx + nt)*n_taps + tap][n]
  std::vector<cvec> gains;

  const cvec& gain(int nt, int nr, int tap) const {
    return gains[static_cast<size_t>((nr * n_tx + nt) * profile.n_taps() + tap)];
  }
};

/// Sum-of-sinusoids generator: >= 64 Jakes-spectrum oscillators per tap with
/// stratified arrival angles (random rotation per tap) and iid CN(0,1)
/// oscillator gains per antenna pair. Ensemble autocorrelation is exactly
/// powers[tap] * J0(2 pi f_norm dn); taps are Rayleigh and independent across
/// (tap, tx, rx).
ChannelRealization generate_channel(const ChannelProfile& profile, int n_tx, int n_rx,
                                    int n_samples, double f_norm, Rng& rng, int n_osc = 64);

/// Linear time-varying convolution of per-antenna frames with the channel,
/// plus CN(0, sigma2) noise per receive antenna. Output length is
/// frame_len + L - 1 (smearing tail kept).
std::vector<cvec> propagate(const std::vector<cvec>& tx_frames, const ChannelRealization& chan,
                            double sigma2, Rng& rng);

/// Equivalent single-antenna channel over one circular block: the left-rotation
/// applied to antenna nt's block moves its taps to (delay - nt*P/n_tx) mod P,
/// and the 1/sqrt(n_tx) power scale is absorbed, so the block obeys
///   y[n] = sum_l h_eq[n][l] x[(n - l) mod P]      (x unshifted, unscaled).
struct EquivalentChannel {
  int p = 0;                      ///< circular block length (K or N_UW)
  std::vector<int> tap_pos;       ///< composite tap positions in [0, P)
  std::vector<cvec> tap_gain;     ///< per position, gain over n = 0..P-1
};

/// Data block m as seen by receive antenna nr (window starts at block_offset).
EquivalentChannel equivalent_block_channel(const ChannelRealization& chan, const FrameGeometry& g,
                                           int m, int nr);
/// Unique word u as seen by receive antenna nr (shift uses N_UW/n_tx).
EquivalentChannel equivalent_uw_channel(const ChannelRealization& chan, const FrameGeometry& g,
                                        int u, int nr);

/// Time-average of the equivalent block channel over its window, as frequency
/// response on K bins (unnormalized DFT of the averaged taps). This is the
/// reference the unique-word estimator tries to reach.
cvec block_average_fd(const ChannelRealization& chan, const FrameGeometry& g, int m, int nr);

}  // namespace uwlink
