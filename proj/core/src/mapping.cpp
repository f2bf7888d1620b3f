// SPDX-License-Identifier: Apache-2.0
#include "uwlink/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace uwlink {
namespace {

constexpr double kDemapClamp = 50.0;

int axis_bits(Constellation c) {
  switch (c) {
    case Constellation::kQpsk: return 1;
    case Constellation::k16Qam: return 2;
    case Constellation::k64Qam: return 3;
  }
  throw std::invalid_argument("unknown constellation");
}

std::vector<double> build_axis(int bits) {
  // Reflected Gray sequence of `bits` bits mapped to descending odd levels.
  const int n = 1 << bits;
  std::vector<double> levels(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int gray = i ^ (i >> 1);
    levels[static_cast<size_t>(gray)] = static_cast<double>(n - 1 - 2 * i);
  }
  return levels;
}

double clamp(double v) { return std::clamp(v, -kDemapClamp, kDemapClamp); }

}  // namespace

int bits_per_symbol(Constellation c) { return 2 * axis_bits(c); }

const std::vector<double>& gray_axis_levels(Constellation c) {
  static const std::vector<double> q = build_axis(1);
  static const std::vector<double> q16 = build_axis(2);
  static const std::vector<double> q64 = build_axis(3);
  switch (c) {
    case Constellation::kQpsk: return q;
    case Constellation::k16Qam: return q16;
    case Constellation::k64Qam: return q64;
  }
  throw std::invalid_argument("unknown constellation");
}

double axis_scale(Constellation c) {
  // E[level^2] per axis = (4^Bh - 1)/3; two axes give unit symbol energy.
  const int n = 1 << axis_bits(c);
  return 1.0 / std::sqrt(2.0 * (static_cast<double>(n) * n - 1.0) / 3.0);
}

cvec map_symbols(const std::vector<std::uint8_t>& bits, Constellation c) {
  const int bh = axis_bits(c);
  const int bps = 2 * bh;
  require(bits.size() % static_cast<size_t>(bps) == 0,
          "bit stream length not divisible by bits per symbol");
  const auto& levels = gray_axis_levels(c);
  const double s = axis_scale(c);
  cvec out(bits.size() / static_cast<size_t>(bps));
  for (size_t i = 0; i < out.size(); ++i) {
    const std::uint8_t* b = bits.data() + i * static_cast<size_t>(bps);
    int li = 0, lq = 0;
    for (int j = 0; j < bh; ++j) {
      li = (li << 1) | (b[j] & 1);
      lq = (lq << 1) | (b[bh + j] & 1);
    }
    out[i] = {levels[static_cast<size_t>(li)] * s, levels[static_cast<size_t>(lq)] * s};
  }
  return out;
}

std::vector<double> demap_llrs(const cvec& symbols, const std::vector<double>& noise_var,
                               Constellation c, const std::vector<double>& prior_llr) {
  const int bh = axis_bits(c);
  const int bps = 2 * bh;
  const int n_levels = 1 << bh;
  require(noise_var.size() == symbols.size(), "noise variance per symbol required");
  const bool with_priors = !prior_llr.empty();
  if (with_priors)
    require(prior_llr.size() == symbols.size() * static_cast<size_t>(bps),
            "prior LLR length mismatch");
  const auto& levels = gray_axis_levels(c);
  const double s = axis_scale(c);

  std::vector<double> out(symbols.size() * static_cast<size_t>(bps));
  std::vector<double> metric(static_cast<size_t>(n_levels));
  for (size_t i = 0; i < symbols.size(); ++i) {
    const double inv_nv = 1.0 / std::max(noise_var[i], 1e-300);
    // The squared-distance metric separates per axis, so each axis is an
    // independent max-log demap over its own levels and priors.
    for (int axis = 0; axis < 2; ++axis) {
      const double z = axis == 0 ? symbols[i].real() : symbols[i].imag();
      const size_t bit0 = i * static_cast<size_t>(bps) + static_cast<size_t>(axis * bh);
      for (int l = 0; l < n_levels; ++l) {
        const double d = z - levels[static_cast<size_t>(l)] * s;
        double m = d * d * inv_nv;
        if (with_priors)
          for (int j = 0; j < bh; ++j)
            if ((l >> (bh - 1 - j)) & 1) m += clamp(prior_llr[bit0 + static_cast<size_t>(j)]);
        metric[static_cast<size_t>(l)] = m;
      }
      for (int j = 0; j < bh; ++j) {
        double m0 = std::numeric_limits<double>::infinity();
        double m1 = m0;
        for (int l = 0; l < n_levels; ++l) {
          const bool one = (l >> (bh - 1 - j)) & 1;
          (one ? m1 : m0) = std::min(one ? m1 : m0, metric[static_cast<size_t>(l)]);
        }
        double app = m1 - m0;  // log P(0)/P(1)
        if (with_priors) app -= clamp(prior_llr[bit0 + static_cast<size_t>(j)]);
        out[bit0 + static_cast<size_t>(j)] = clamp(app);
      }
    }
  }
  return out;
}

SoftSymbols soft_symbols(const std::vector<double>& llrs, Constellation c) {
  const int bh = axis_bits(c);
  const int bps = 2 * bh;
  const int n_levels = 1 << bh;
  require(llrs.size() % static_cast<size_t>(bps) == 0, "LLR length not divisible by symbol bits");
  const auto& levels = gray_axis_levels(c);
  const double s = axis_scale(c);

  SoftSymbols out;
  out.mean.resize(llrs.size() / static_cast<size_t>(bps));
  out.var.resize(out.mean.size());
  for (size_t i = 0; i < out.mean.size(); ++i) {
    double m[2], e2[2];
    for (int axis = 0; axis < 2; ++axis) {
      const size_t bit0 = i * static_cast<size_t>(bps) + static_cast<size_t>(axis * bh);
      // P(bit=1) from the LLR convention log P(0)/P(1).
      double p1[3];
      for (int j = 0; j < bh; ++j) p1[j] = 1.0 / (1.0 + std::exp(clamp(llrs[bit0 + static_cast<size_t>(j)])));
      double mean = 0.0, pow2 = 0.0;
      for (int l = 0; l < n_levels; ++l) {
        double p = 1.0;
        for (int j = 0; j < bh; ++j) {
          const bool one = (l >> (bh - 1 - j)) & 1;
          p *= one ? p1[j] : 1.0 - p1[j];
        }
        const double lv = levels[static_cast<size_t>(l)] * s;
        mean += p * lv;
        pow2 += p * lv * lv;
      }
      m[axis] = mean;
      e2[axis] = pow2;
    }
    out.mean[i] = {m[0], m[1]};
    out.var[i] = std::max(e2[0] - m[0] * m[0] + e2[1] - m[1] * m[1], 0.0);
  }
  return out;
}

}  // namespace uwlink
