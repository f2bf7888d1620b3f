// SPDX-License-Identifier: Apache-2.0
#include "uwlink/channel.hpp"

#include <Eigen/Dense>

#include <cmath>

#include "uwlink/fft.hpp"

namespace uwlink {

void ChannelProfile::validate() const {
  require(!delays.empty(), "profile must contain at least one tap");
  require(delays.front() == 0, "profile must contain delay 0");
  for (size_t i = 1; i < delays.size(); ++i)
    require(delays[i] > delays[i - 1], "tap delays must be strictly increasing");
  require(powers.size() == delays.size(), "one power per tap required");
  double sum = 0.0;
  for (double p : powers) {
    require(p > 0.0, "tap powers must be positive");
    sum += p;
  }
  require(std::abs(sum - 1.0) < 1e-9, "tap powers must sum to one");
}

ChannelProfile ChannelProfile::eva(double bandwidth_hz) {
  require(bandwidth_hz > 0.0, "bandwidth must be positive");
  static constexpr double kDelayNs[] = {0, 30, 150, 310, 370, 710, 1090, 1730, 2510};
  static constexpr double kPowerDb[] = {0.0, -1.5, -1.4, -3.6, -0.6, -9.1, -7.0, -12.0, -16.9};
  std::vector<int> bins;
  std::vector<double> pow_lin;
  for (size_t i = 0; i < std::size(kDelayNs); ++i) {
    const int b = static_cast<int>(std::lround(kDelayNs[i] * 1e-9 * bandwidth_hz));
    const double p = std::pow(10.0, kPowerDb[i] / 10.0);
    bool merged = false;
    for (size_t j = 0; j < bins.size(); ++j)
      if (bins[j] == b) {
        pow_lin[j] += p;
        merged = true;
        break;
      }
    if (!merged) {
      bins.push_back(b);
      pow_lin.push_back(p);
    }
  }
  double sum = 0.0;
  for (double p : pow_lin) sum += p;
  for (double& p : pow_lin) p /= sum;
  ChannelProfile profile{bins, pow_lin};
  profile.validate();
  return profile;
}

double jakes_autocorrelation(double lag_samples, double f_norm) {
  return std::cyl_bessel_j(0.0, 2.0 * kPi * f_norm * std::abs(lag_samples));
}

ChannelRealization generate_channel(const ChannelProfile& profile, int n_tx, int n_rx,
                                    int n_samples, double f_norm, Rng& rng, int n_osc) {
  profile.validate();
  require(n_tx >= 1 && n_rx >= 1, "antenna counts must be positive");
  require(n_samples > 0, "sample count must be positive");
  require(n_osc >= 64, "at least 64 oscillators per tap required");
  require(f_norm >= 0.0, "normalized Doppler must be non-negative");

  ChannelRealization out;
  out.profile = profile;
  out.n_tx = n_tx;
  out.n_rx = n_rx;
  out.n_samples = n_samples;
  const int n_pairs = n_tx * n_rx;
  const int n_taps = profile.n_taps();
  out.gains.assign(static_cast<size_t>(n_pairs * n_taps), cvec(static_cast<size_t>(n_samples)));

  Eigen::MatrixXcd table(n_osc, n_samples);
  Eigen::MatrixXcd coeff(n_pairs, n_osc);
  Eigen::MatrixXcd series(n_pairs, n_samples);
  for (int tap = 0; tap < n_taps; ++tap) {
    // Stratified Jakes arrival angles, fresh rotation per tap and realization.
    const double rot = rng.next_double();
    for (int i = 0; i < n_osc; ++i) {
      const double alpha = 2.0 * kPi * (static_cast<double>(i) + rot) / n_osc;
      const double omega = 2.0 * kPi * f_norm * std::cos(alpha);
      const cd step{std::cos(omega), std::sin(omega)};
      cd phase{1.0, 0.0};
      for (int n = 0; n < n_samples; ++n) {
        table(i, n) = phase;
        phase *= step;
      }
    }
    const double scale = std::sqrt(profile.powers[static_cast<size_t>(tap)] / n_osc);
    for (int p = 0; p < n_pairs; ++p)
      for (int i = 0; i < n_osc; ++i) coeff(p, i) = rng.next_cnormal() * scale;
    series.noalias() = coeff * table;
    for (int p = 0; p < n_pairs; ++p) {
      cvec& g = out.gains[static_cast<size_t>(p * n_taps + tap)];
      for (int n = 0; n < n_samples; ++n) g[static_cast<size_t>(n)] = series(p, n);
    }
  }
  return out;
}

std::vector<cvec> propagate(const std::vector<cvec>& tx_frames, const ChannelRealization& chan,
                            double sigma2, Rng& rng) {
  require(static_cast<int>(tx_frames.size()) == chan.n_tx, "one frame per transmit antenna");
  require(sigma2 >= 0.0, "noise variance must be non-negative");
  const int frame_len = static_cast<int>(tx_frames.front().size());
  for (const auto& f : tx_frames) require(static_cast<int>(f.size()) == frame_len, "frame length mismatch");
  const int out_len = frame_len + chan.profile.length() - 1;
  require(chan.n_samples >= out_len, "channel realization shorter than frame plus smear");

  std::vector<cvec> rx(static_cast<size_t>(chan.n_rx), cvec(static_cast<size_t>(out_len)));
  const double noise_scale = std::sqrt(sigma2);
  for (int nr = 0; nr < chan.n_rx; ++nr) {
    cvec& y = rx[static_cast<size_t>(nr)];
    for (int nt = 0; nt < chan.n_tx; ++nt) {
      const cvec& x = tx_frames[static_cast<size_t>(nt)];
      for (int t = 0; t < chan.profile.n_taps(); ++t) {
        const int d = chan.profile.delays[static_cast<size_t>(t)];
        const cvec& g = chan.gain(nt, nr, t);
        for (int n = 0; n < frame_len; ++n) y[static_cast<size_t>(n + d)] += g[static_cast<size_t>(n + d)] * x[static_cast<size_t>(n)];
      }
    }
    if (sigma2 > 0.0)
      for (auto& v : y) v += rng.next_cnormal() * noise_scale;
  }
  return rx;
}

namespace {

EquivalentChannel equivalent_window(const ChannelRealization& chan, const FrameGeometry& g,
                                    int nr, int p, int shift_unit, int offset) {
  require(nr >= 0 && nr < chan.n_rx, "receive antenna out of range");
  require(chan.n_tx == g.n_tx, "geometry/channel antenna mismatch");
  require(offset + p <= chan.n_samples, "window exceeds realization");
  EquivalentChannel eq;
  eq.p = p;
  const double scale = 1.0 / std::sqrt(static_cast<double>(g.n_tx));
  for (int nt = 0; nt < g.n_tx; ++nt) {
    for (int t = 0; t < chan.profile.n_taps(); ++t) {
      // Left-rotating antenna nt's transmit block by s advances the signal, so
      // its taps land at (delay - s) mod P in the composite response.
      const int pos = ((chan.profile.delays[static_cast<size_t>(t)] - nt * shift_unit) % p + p) % p;
      const cvec& src = chan.gain(nt, nr, t);
      // Merge taps that alias onto the same composite position.
      int idx = -1;
      for (size_t i = 0; i < eq.tap_pos.size(); ++i)
        if (eq.tap_pos[i] == pos) {
          idx = static_cast<int>(i);
          break;
        }
      if (idx < 0) {
        eq.tap_pos.push_back(pos);
        eq.tap_gain.emplace_back(static_cast<size_t>(p), cd{0.0, 0.0});
        idx = static_cast<int>(eq.tap_pos.size()) - 1;
      }
      cvec& dst = eq.tap_gain[static_cast<size_t>(idx)];
      for (int n = 0; n < p; ++n) dst[static_cast<size_t>(n)] += src[static_cast<size_t>(offset + n)] * scale;
    }
  }
  return eq;
}

}  // namespace

EquivalentChannel equivalent_block_channel(const ChannelRealization& chan, const FrameGeometry& g,
                                           int m, int nr) {
  require(m >= 0 && m < g.m_blocks, "block index out of range");
  return equivalent_window(chan, g, nr, g.k(), g.k() / g.n_tx, g.block_offset(m));
}

EquivalentChannel equivalent_uw_channel(const ChannelRealization& chan, const FrameGeometry& g,
                                        int u, int nr) {
  require(u == 0 || u == 1, "unique word index out of range");
  return equivalent_window(chan, g, nr, g.n_uw, g.n_uw / g.n_tx, g.uw_offset(u));
}

cvec block_average_fd(const ChannelRealization& chan, const FrameGeometry& g, int m, int nr) {
  const EquivalentChannel eq = equivalent_block_channel(chan, g, m, nr);
  cvec taps(static_cast<size_t>(g.k()), cd{0.0, 0.0});
  for (size_t i = 0; i < eq.tap_pos.size(); ++i) {
    cd acc = 0.0;
    for (const cd& v : eq.tap_gain[i]) acc += v;
    taps[static_cast<size_t>(eq.tap_pos[i])] = acc / static_cast<double>(g.k());
  }
  fft::forward_raw(taps);
  return taps;
}

}  // namespace uwlink
