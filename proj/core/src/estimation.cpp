// SPDX-License-Identifier: Apache-2.0
#include "uwlink/estimation.hpp"

#include <Eigen/Dense>

#include <cmath>

#include "uwlink/fft.hpp"

namespace uwlink {

double block_avg_correlation(int off_a, int len_a, int off_b, int len_b, double f_norm) {
  require(len_a > 0 && len_b > 0, "window lengths must be positive");
  // Collapse the double sum over the lag difference with triangular counts.
  double acc = 0.0;
  for (int d = -(len_b - 1); d <= len_a - 1; ++d) {
    const int w = std::min(std::min(len_a, len_b), std::min(len_a - d, len_b + d));
    acc += w * jakes_autocorrelation(static_cast<double>(d + off_a - off_b), f_norm);
  }
  return acc / (static_cast<double>(len_a) * static_cast<double>(len_b));
}

double doppler_error_variance(int k, double f_norm) {
  return 1.0 - block_avg_correlation(0, k, 0, k, f_norm);
}

namespace {

void validate_with_profile(const FrameGeometry& g, const ChannelProfile& profile) {
  g.validate();
  profile.validate();
  require(g.n_uw / g.n_tx >= profile.length(),
          "per-antenna UW segment must cover the channel length");
  require(g.n_cp >= profile.length() - 1, "cyclic prefix must absorb the channel smear");
  require(g.n_uw <= g.k(), "UW tap budget must fit into a data block");
}

/// Covariance of the nu-th intra-window Doppler coefficients of one tap for
/// two windows of length n offset by `off` samples:
///   Psi(nu) = (1/n^2) sum_{m,m'} J0-corr(m - m' + off) e^{j 2 pi (m-m') nu / n}.
cvec doppler_leak_spectrum(int n, int off, double f_norm) {
  cvec psi(static_cast<size_t>(n), cd{0.0, 0.0});
  for (int d = -(n - 1); d <= n - 1; ++d) {
    const double w = static_cast<double>(n - std::abs(d));
    const double r = jakes_autocorrelation(static_cast<double>(d + off), f_norm);
    for (int nu = 0; nu < n; ++nu) {
      const double ph = 2.0 * kPi * static_cast<double>(d) * nu / n;
      psi[static_cast<size_t>(nu)] += w * r * cd{std::cos(ph), std::sin(ph)};
    }
  }
  const double inv = 1.0 / (static_cast<double>(n) * static_cast<double>(n));
  for (auto& v : psi) v *= inv;
  return psi;
}

}  // namespace

WienerTable compute_wiener_table(const FrameGeometry& g, const ChannelProfile& profile,
                                 double f_norm, double sigma2) {
  validate_with_profile(g, profile);
  require(sigma2 >= 0.0, "noise variance must be non-negative");
  const int n = g.n_uw;
  const int gate = n / g.n_tx;

  // Composite tap support: antenna nt's taps sit at delay + nt*N_UW/n_tx.
  std::vector<int> pos;
  std::vector<double> pw;
  for (int nt = 0; nt < g.n_tx; ++nt)
    for (int t = 0; t < profile.n_taps(); ++t) {
      pos.push_back((profile.delays[static_cast<size_t>(t)] + nt * gate) % n);
      pw.push_back(profile.powers[static_cast<size_t>(t)]);
    }

  // Pilot covariance (antenna-invariant composite form): channel +
  // Doppler-leak parts from the leak spectrum, thermal noise on the diagonal.
  Eigen::Matrix2cd r_pp;
  for (int u = 0; u < 2; ++u)
    for (int v = 0; v < 2; ++v) {
      const cvec psi = doppler_leak_spectrum(n, g.uw_offset(u) - g.uw_offset(v), f_norm);
      cd acc{0.0, 0.0};
      for (int tau = 0; tau < gate; ++tau)
        for (size_t i = 0; i < pos.size(); ++i) {
          const int nu = ((tau - pos[i]) % n + n) % n;
          acc += pw[i] * psi[static_cast<size_t>(nu)];
        }
      r_pp(u, v) = acc + (u == v ? cd{sigma2, 0.0} : cd{0.0, 0.0});
    }
  const Eigen::Matrix2cd r_reg =
      r_pp + 1e-12 * 0.5 * r_pp.trace().real() * Eigen::Matrix2cd::Identity();

  WienerTable table;
  table.sigma2 = sigma2;
  table.sigma2_d = doppler_error_variance(g.k(), f_norm);
  table.coeff.resize(static_cast<size_t>(g.m_blocks));
  table.sigma2_ce.resize(static_cast<size_t>(g.m_blocks));
  for (int m = 0; m < g.m_blocks; ++m) {
    Eigen::Vector2cd r_pt;
    for (int u = 0; u < 2; ++u)
      r_pt(u) = block_avg_correlation(g.uw_offset(u), n, g.block_offset(m), g.k(), f_norm);
    const Eigen::Vector2cd c = r_reg.colPivHouseholderQr().solve(r_pt);
    table.coeff[static_cast<size_t>(m)] = {c(0), c(1)};
    const double target = block_avg_correlation(g.block_offset(m), g.k(), g.block_offset(m), g.k(), f_norm);
    // Achieved MSE of the (regularized) coefficients under the exact model.
    const double mse = target - 2.0 * (c.adjoint() * r_pt)(0).real() + (c.adjoint() * r_pp * c)(0).real();
    table.sigma2_ce[static_cast<size_t>(m)] = std::max(mse, 0.0);
  }
  return table;
}

ChannelEstimate estimate_channel(const std::vector<std::vector<cvec>>& uw_rx,
                                 const FrameGeometry& g, const WienerTable& table) {
  g.validate();
  require(uw_rx.size() == 2, "two unique words per frame expected");
  require(static_cast<int>(uw_rx[0].size()) == g.n_rx && static_cast<int>(uw_rx[1].size()) == g.n_rx,
          "one UW payload per receive antenna expected");
  require(static_cast<int>(table.coeff.size()) == g.m_blocks, "table/geometry mismatch");
  const int n = g.n_uw;
  const int k = g.k();
  const int gate = n / g.n_tx;

  cvec uw_fd = zadoff_chu(n);
  fft::forward_raw(uw_fd);

  // Per (u, nr, nt): gated LS estimate as frequency response on k bins.
  std::vector<cvec> pilot(static_cast<size_t>(2 * g.n_rx * g.n_tx));
  for (int u = 0; u < 2; ++u)
    for (int nr = 0; nr < g.n_rx; ++nr) {
      const cvec& y = uw_rx[static_cast<size_t>(u)][static_cast<size_t>(nr)];
      require(static_cast<int>(y.size()) == n, "UW payload length mismatch");
      cvec ls = y;
      fft::forward_raw(ls);
      for (int i = 0; i < n; ++i) ls[static_cast<size_t>(i)] /= uw_fd[static_cast<size_t>(i)];
      fft::inverse_raw(ls);
      for (int nt = 0; nt < g.n_tx; ++nt) {
        cvec seg(static_cast<size_t>(k), cd{0.0, 0.0});
        for (int i = 0; i < gate; ++i) seg[static_cast<size_t>(i)] = ls[static_cast<size_t>(nt * gate + i)];
        fft::forward_raw(seg);
        pilot[static_cast<size_t>((u * g.n_rx + nr) * g.n_tx + nt)] = std::move(seg);
      }
    }

  ChannelEstimate est;
  est.k = k;
  est.n_rx = g.n_rx;
  est.sigma2_ce = table.sigma2_ce;
  est.sigma2_d = table.sigma2_d;
  est.sigma2 = table.sigma2;
  est.fd.resize(static_cast<size_t>(g.m_blocks * g.n_rx));
  cvec interp(static_cast<size_t>(k));
  for (int m = 0; m < g.m_blocks; ++m) {
    const auto& c = table.coeff[static_cast<size_t>(m)];
    for (int nr = 0; nr < g.n_rx; ++nr) {
      // Interpolate each gated segment, then rebuild the composite response by
      // re-spacing the segments at the block's tap spacing K/n_tx (segment j
      // holds the antenna whose rotation puts its taps at offset j*N_UW/n_tx).
      cvec comp(static_cast<size_t>(k), cd{0.0, 0.0});
      for (int nt = 0; nt < g.n_tx; ++nt) {
        const cvec& p0 = pilot[static_cast<size_t>((0 * g.n_rx + nr) * g.n_tx + nt)];
        const cvec& p1 = pilot[static_cast<size_t>((1 * g.n_rx + nr) * g.n_tx + nt)];
        for (int i = 0; i < k; ++i)
          interp[static_cast<size_t>(i)] = c[0] * p0[static_cast<size_t>(i)] + c[1] * p1[static_cast<size_t>(i)];
        fft::inverse_raw(interp);
        const int base = nt * (k / g.n_tx);
        for (int i = 0; i < gate; ++i)
          comp[static_cast<size_t>((base + i) % k)] += interp[static_cast<size_t>(i)];
      }
      fft::forward_raw(comp);
      est.fd[static_cast<size_t>(m * g.n_rx + nr)] = comp;
    }
  }
  return est;
}

FrameOptimization optimize_frame(const FrameGeometry& base, const ChannelProfile& profile,
                                 double f_norm, double sigma2, const std::vector<int>& candidates) {
  require(!candidates.empty(), "candidate list must not be empty");
  FrameOptimization opt;
  double best = 0.0;
  for (int m : candidates) {
    FrameGeometry g = base;
    g.m_blocks = m;
    const WienerTable t = compute_wiener_table(g, profile, f_norm, sigma2);
    double ce = 0.0;
    for (double v : t.sigma2_ce) ce += v;
    ce /= static_cast<double>(m);
    const double total = ce + t.sigma2_d;
    opt.rows.push_back({m, ce, t.sigma2_d, total});
    if (opt.best_m == 0 || total < best) {
      best = total;
      opt.best_m = m;
    }
  }
  return opt;
}

}  // namespace uwlink
