// SPDX-License-Identifier: Apache-2.0
#include "uwlink/waveform.hpp"

#include <cmath>

#include "uwlink/fft.hpp"

namespace uwlink {

void FrameGeometry::validate() const {
  require(n_data > 0 && m_blocks > 0 && n_cp >= 0 && n_uw > 0, "frame sizes must be positive");
  require(n_tx >= 1 && n_rx >= 1, "antenna counts must be positive");
  require(n_data % m_blocks == 0, "N must be divisible by M");
  require(n_uw % 2 == 0, "unique word length must be even");
  require(k() % n_tx == 0, "K must be divisible by the transmit antenna count");
  require(n_uw % n_tx == 0, "N_UW must be divisible by the transmit antenna count");
}

cvec zadoff_chu(int n_uw) {
  require(n_uw > 0 && n_uw % 2 == 0, "Zadoff-Chu unique word length must be even");
  cvec x(static_cast<size_t>(n_uw));
  for (int n = 0; n < n_uw; ++n) {
    // n^2 mod 2N keeps the argument exact for large N.
    const long long q = (static_cast<long long>(n) * n) % (2LL * n_uw);
    const double phase = kPi * static_cast<double>(q) / static_cast<double>(n_uw);
    x[static_cast<size_t>(n)] = {std::cos(phase), std::sin(phase)};
  }
  return x;
}

cvec rotate_left(const cvec& v, int shift) {
  const int n = static_cast<int>(v.size());
  require(n > 0, "empty vector");
  const int s = ((shift % n) + n) % n;
  cvec out(v.size());
  for (int i = 0; i < n; ++i) out[static_cast<size_t>(i)] = v[static_cast<size_t>((i + s) % n)];
  return out;
}

namespace {

// Applies the M-point unitary DFT across blocks for every within-block
// position (the F_M factor of the OTFS map).
void across_block_dft(cvec& x, int m_blocks, int k, bool inverse) {
  if (m_blocks == 1) return;
  const double scale = 1.0 / std::sqrt(static_cast<double>(m_blocks));
  const double sign = inverse ? 1.0 : -1.0;
  cvec tw(static_cast<size_t>(m_blocks) * static_cast<size_t>(m_blocks));
  for (int a = 0; a < m_blocks; ++a)
    for (int b = 0; b < m_blocks; ++b) {
      const double ph = sign * 2.0 * kPi * static_cast<double>((a * b) % m_blocks) / m_blocks;
      tw[static_cast<size_t>(a * m_blocks + b)] = {std::cos(ph), std::sin(ph)};
    }
  cvec col(static_cast<size_t>(m_blocks));
  for (int pos = 0; pos < k; ++pos) {
    for (int m = 0; m < m_blocks; ++m) col[static_cast<size_t>(m)] = x[static_cast<size_t>(m * k + pos)];
    for (int m = 0; m < m_blocks; ++m) {
      cd acc = 0.0;
      for (int b = 0; b < m_blocks; ++b) acc += tw[static_cast<size_t>(m * m_blocks + b)] * col[static_cast<size_t>(b)];
      x[static_cast<size_t>(m * k + pos)] = acc * scale;
    }
  }
}

}  // namespace

cvec modulate(const cvec& data, Waveform w, int m_blocks, int k) {
  require(static_cast<int>(data.size()) == m_blocks * k, "data length must equal M*K");
  cvec x = data;
  if (w == Waveform::kOfdm) {
    for (int m = 0; m < m_blocks; ++m)
      fft::inverse_unitary({x.data() + static_cast<size_t>(m) * static_cast<size_t>(k), static_cast<size_t>(k)});
    return x;
  }
  across_block_dft(x, m_blocks, k, /*inverse=*/false);
  return x;
}

cvec demodulate(const cvec& time, Waveform w, int m_blocks, int k) {
  require(static_cast<int>(time.size()) == m_blocks * k, "time length must equal M*K");
  cvec d = time;
  if (w == Waveform::kOfdm) {
    for (int m = 0; m < m_blocks; ++m)
      fft::forward_unitary({d.data() + static_cast<size_t>(m) * static_cast<size_t>(k), static_cast<size_t>(k)});
    return d;
  }
  across_block_dft(d, m_blocks, k, /*inverse=*/true);
  return d;
}

namespace {

void append_with_cp(cvec& frame, const cvec& payload, int n_cp) {
  const size_t n = payload.size();
  for (int i = 0; i < n_cp; ++i) frame.push_back(payload[n - static_cast<size_t>(n_cp) + static_cast<size_t>(i)]);
  frame.insert(frame.end(), payload.begin(), payload.end());
}

}  // namespace

std::vector<cvec> assemble_frame(const cvec& time_data, const FrameGeometry& g) {
  g.validate();
  require(static_cast<int>(time_data.size()) == g.n_data, "data length must equal N");
  const cvec uw = zadoff_chu(g.n_uw);
  const double scale = 1.0 / std::sqrt(static_cast<double>(g.n_tx));
  const int k = g.k();

  std::vector<cvec> frames(static_cast<size_t>(g.n_tx));
  for (int nt = 0; nt < g.n_tx; ++nt) {
    cvec uw_nt = rotate_left(uw, g.cdd_shift(nt, g.n_uw));
    for (auto& v : uw_nt) v *= scale;
    cvec& f = frames[static_cast<size_t>(nt)];
    f.reserve(static_cast<size_t>(g.frame_len()));
    append_with_cp(f, uw_nt, g.n_cp);
    for (int m = 0; m < g.m_blocks; ++m) {
      cvec blk(time_data.begin() + static_cast<size_t>(m) * static_cast<size_t>(k),
               time_data.begin() + static_cast<size_t>(m + 1) * static_cast<size_t>(k));
      blk = rotate_left(blk, g.cdd_shift(nt, k));
      for (auto& v : blk) v *= scale;
      append_with_cp(f, blk, g.n_cp);
    }
    append_with_cp(f, uw_nt, g.n_cp);
  }
  return frames;
}

FramePayloads demux_frame(const cvec& rx_frame, const FrameGeometry& g) {
  g.validate();
  require(static_cast<int>(rx_frame.size()) >= g.frame_len(), "received frame too short");
  FramePayloads p;
  p.uw.resize(2);
  for (int u = 0; u < 2; ++u) {
    const int o = g.uw_offset(u);
    p.uw[static_cast<size_t>(u)].assign(rx_frame.begin() + o, rx_frame.begin() + o + g.n_uw);
  }
  p.blocks.resize(static_cast<size_t>(g.m_blocks));
  for (int m = 0; m < g.m_blocks; ++m) {
    const int o = g.block_offset(m);
    p.blocks[static_cast<size_t>(m)].assign(rx_frame.begin() + o, rx_frame.begin() + o + g.k());
  }
  return p;
}

}  // namespace uwlink
