// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "uwlink/common.hpp"

namespace uwlink {

enum class Waveform { kOtfs, kOfdm };

// Frame layout per transmit antenna, all blocks carrying a cyclic prefix:
//   [UW+CP | block_0+CP | ... | block_{M-1}+CP | UW+CP]
// Unique words bracket the data section; time origin n = 0 is the first
// sample of the leading UW's cyclic prefix.
struct FrameGeometry {
  int n_data = 288;  ///< N, data samples per frame (M*K)
  int m_blocks = 4;  ///< M, data blocks
  int n_cp = 16;     ///< N_CP
  int n_uw = 32;     ///< N_UW (even)
  int n_tx = 1;
  int n_rx = 1;

  int k() const { return n_data / m_blocks; }
  int frame_len() const { return 2 * (n_uw + n_cp) + m_blocks * (k() + n_cp); }
  /// First payload sample of data block m.
  int block_offset(int m) const { return 2 * n_cp + n_uw + m * (n_cp + k()); }
  /// First payload sample of unique word u (0 leading, 1 trailing).
  int uw_offset(int u) const { return n_cp + u * (n_uw + n_cp + m_blocks * (k() + n_cp)); }
  /// Cyclic-delay shift of antenna nt for length-P blocks (P = K or N_UW).
  int cdd_shift(int nt, int p) const { return nt * (p / n_tx); }

  void validate() const;
};

/// Zadoff-Chu unique word x[n] = exp(j pi n^2 / N), even N only. The DFT has
/// flat magnitude sqrt(N), so LS division never amplifies noise.
cvec zadoff_chu(int n_uw);

/// Circular left rotation by `shift` samples (CDD convention).
cvec rotate_left(const cvec& v, int shift);

/// Linear modulation x = A d and its inverse. OFDM: A = I_M kron F_K^H
/// (per-block IDFT). OTFS: A = F_M kron I_K, chosen so the frequency-domain
/// spreading matrix (I_M kron F_K) A = F_M kron F_K has unit-modulus entries:
/// every symbol is spread uniformly over all M*K frequency bins of the frame.
/// Both maps are unitary.
cvec modulate(const cvec& data, Waveform w, int m_blocks, int k);
cvec demodulate(const cvec& time, Waveform w, int m_blocks, int k);

/// Per-antenna time-domain frames: CDD-shifted UWs and data blocks scaled by
/// 1/sqrt(n_tx), each prefixed with its cyclic prefix.
std::vector<cvec> assemble_frame(const cvec& time_data, const FrameGeometry& g);

/// Payload views of a received frame (CP stripped).
struct FramePayloads {
  std::vector<cvec> uw;      ///< [2] x N_UW
  std::vector<cvec> blocks;  ///< [M] x K
};
FramePayloads demux_frame(const cvec& rx_frame, const FrameGeometry& g);

}  // namespace uwlink
