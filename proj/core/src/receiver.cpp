// SPDX-License-Identifier: Apache-2.0
#include "uwlink/receiver.hpp"

#include <algorithm>
#include <cmath>

#include "uwlink/fft.hpp"

namespace uwlink {

CombinedBlocks mrc_combine(const std::vector<std::vector<cvec>>& block_fd,
                           const ChannelEstimate& est) {
  const int m_blocks = static_cast<int>(block_fd.size());
  require(m_blocks > 0, "no blocks to combine");
  require(static_cast<int>(est.sigma2_ce.size()) == m_blocks, "estimate/block count mismatch");
  CombinedBlocks out;
  out.k = est.k;
  out.y_eq.resize(static_cast<size_t>(m_blocks));
  out.lambda.resize(static_cast<size_t>(m_blocks));
  out.sigma2_eff.resize(static_cast<size_t>(m_blocks));
  for (int m = 0; m < m_blocks; ++m) {
    require(static_cast<int>(block_fd[static_cast<size_t>(m)].size()) == est.n_rx,
            "one spectrum per receive antenna expected");
    cvec y(static_cast<size_t>(est.k), cd{0.0, 0.0});
    std::vector<double> lam(static_cast<size_t>(est.k), 0.0);
    for (int bin = 0; bin < est.k; ++bin) {
      double p = 0.0;
      cd acc{0.0, 0.0};
      for (int nr = 0; nr < est.n_rx; ++nr) {
        const cd h = est.at(m, nr)[static_cast<size_t>(bin)];
        p += std::norm(h);
        acc += std::conj(h) * block_fd[static_cast<size_t>(m)][static_cast<size_t>(nr)][static_cast<size_t>(bin)];
      }
      const double mag = std::sqrt(p);
      lam[static_cast<size_t>(bin)] = mag;
      y[static_cast<size_t>(bin)] = mag > 0.0 ? acc / mag : cd{0.0, 0.0};
    }
    out.y_eq[static_cast<size_t>(m)] = std::move(y);
    out.lambda[static_cast<size_t>(m)] = std::move(lam);
    out.sigma2_eff[static_cast<size_t>(m)] = est.sigma2 + est.sigma2_ce[static_cast<size_t>(m)] + est.sigma2_d;
  }
  return out;
}

namespace {

constexpr double kVarFloor = 1e-12;

/// X = per-block unitary DFT of the modulated signal; the symbol->bin map is
/// therefore identity for OFDM and (F_M kron reversal) for OTFS.
cvec spread(const cvec& d, Waveform w, int m_blocks, int k) {
  cvec x = modulate(d, w, m_blocks, k);
  for (int m = 0; m < m_blocks; ++m)
    fft::forward_unitary({x.data() + static_cast<size_t>(m) * static_cast<size_t>(k), static_cast<size_t>(k)});
  return x;
}

cvec despread(const cvec& bins, Waveform w, int m_blocks, int k) {
  cvec x = bins;
  for (int m = 0; m < m_blocks; ++m)
    fft::inverse_unitary({x.data() + static_cast<size_t>(m) * static_cast<size_t>(k), static_cast<size_t>(k)});
  return demodulate(x, w, m_blocks, k);
}

double mi_proxy(const std::vector<double>& llrs) {
  // Average information content of the extrinsic LLRs (Gaussian-free proxy).
  double acc = 0.0;
  for (double l : llrs) acc += 1.0 - std::log2(1.0 + std::exp(-std::abs(l)));
  return llrs.empty() ? 0.0 : acc / static_cast<double>(llrs.size());
}

}  // namespace

DetectionResult detect_frame(const CombinedBlocks& comb, Waveform w, const FrameGeometry& g,
                             const BicmScheme& scheme, int n_iterations) {
  g.validate();
  require(n_iterations >= 1, "at least one detection iteration required");
  // Without spreading there is no inter-symbol interference to cancel, so
  // the non-spread waveform runs a single equalize->demap->decode pass.
  if (w == Waveform::kOfdm) n_iterations = 1;
  const int k = comb.k;
  const int m_blocks = static_cast<int>(comb.y_eq.size());
  require(m_blocks == g.m_blocks && k == g.k(), "combined blocks do not match geometry");
  const int n_bins = m_blocks * k;
  const int bps = bits_per_symbol(scheme.constellation);
  const int n_coded = n_bins * bps;
  const int steps = trellis_steps_for_coded(n_coded, scheme.rate);
  const Interleaver il(n_coded, scheme.interleaver_seed);

  cvec y(static_cast<size_t>(n_bins));
  std::vector<double> lam(static_cast<size_t>(n_bins));
  std::vector<double> s2(static_cast<size_t>(n_bins));
  for (int m = 0; m < m_blocks; ++m)
    for (int i = 0; i < k; ++i) {
      y[static_cast<size_t>(m * k + i)] = comb.y_eq[static_cast<size_t>(m)][static_cast<size_t>(i)];
      lam[static_cast<size_t>(m * k + i)] = comb.lambda[static_cast<size_t>(m)][static_cast<size_t>(i)];
      s2[static_cast<size_t>(m * k + i)] = std::max(comb.sigma2_eff[static_cast<size_t>(m)], kVarFloor);
    }

  DetectionResult res;
  cvec d_bar(static_cast<size_t>(n_bins), cd{0.0, 0.0});
  std::vector<double> d_var(static_cast<size_t>(n_bins), 1.0);
  std::vector<double> prior(static_cast<size_t>(n_coded), 0.0);

  cvec x_bar, x_hat;
  std::vector<double> alpha(static_cast<size_t>(n_bins));
  std::vector<double> mu(static_cast<size_t>(n_bins));
  std::vector<double> nu(static_cast<size_t>(n_bins));
  for (int it = 0; it < n_iterations; ++it) {
    double v_bar = 0.0;
    for (double v : d_var) v_bar += v;
    v_bar = std::max(v_bar / static_cast<double>(n_bins), kVarFloor);

    x_bar = spread(d_bar, w, m_blocks, k);
    x_hat = x_bar;
    for (int i = 0; i < n_bins; ++i) {
      const double l = lam[static_cast<size_t>(i)];
      const double den = v_bar * l * l + s2[static_cast<size_t>(i)];
      alpha[static_cast<size_t>(i)] = v_bar * l * l / den;
      x_hat[static_cast<size_t>(i)] += (v_bar * l / den) * (y[static_cast<size_t>(i)] - l * x_bar[static_cast<size_t>(i)]);
    }
    const cvec d_hat = despread(x_hat, w, m_blocks, k);

    // Scalar bias of the PIC output: trace average of the filtered-channel
    // diagonal, one value for the whole frame. A single scalarization serves
    // every waveform (for spread symbols the per-symbol bias is exactly this
    // average; without spreading the average is the standard one-tap MMSE
    // approximation with a frame-level Gaussian noise model).
    double a_bar = 0.0;
    for (double a : alpha) a_bar += a;
    a_bar /= static_cast<double>(n_bins);
    std::fill(mu.begin(), mu.end(), a_bar);
    cvec z(static_cast<size_t>(n_bins));
    for (int i = 0; i < n_bins; ++i) {
      const double m_i = std::clamp(mu[static_cast<size_t>(i)], kVarFloor, 1.0 - kVarFloor);
      z[static_cast<size_t>(i)] = d_bar[static_cast<size_t>(i)] +
                                  (d_hat[static_cast<size_t>(i)] - d_bar[static_cast<size_t>(i)]) / m_i;
      nu[static_cast<size_t>(i)] = std::max(v_bar * (1.0 - m_i) / m_i, kVarFloor);
    }

    const std::vector<double> dem = demap_llrs(z, nu, scheme.constellation, it == 0 ? std::vector<double>{} : prior);
    const std::vector<double> coded_llr = il.deinterleave(dem);
    std::vector<double> sys_llr, par_llr;
    split_coded_llrs(coded_llr, scheme.rate, steps, sys_llr, par_llr);
    const SisoResult dec = conv_decode_siso(sys_llr, par_llr);
    ++res.decoder_invocations;
    res.iter_info.push_back(dec.info_hard);

    const std::vector<double> ext = merge_coded_llrs(dec.ext_sys, dec.ext_par, scheme.rate);
    prior = il.interleave(ext);
    res.iter_mi.push_back(mi_proxy(prior));
    if (it + 1 < n_iterations) {
      const SoftSymbols soft = soft_symbols(prior, scheme.constellation);
      d_bar = soft.mean;
      d_var = soft.var;
    }
  }
  res.info_bits = res.iter_info.back();
  return res;
}

}  // namespace uwlink
