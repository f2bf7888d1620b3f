// SPDX-License-Identifier: Apache-2.0
#include "uwlink/conv_code.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace uwlink {
namespace {

constexpr std::uint32_t kFeedback = 0133;  // 1011011: input + s2+s3+s5+s6
constexpr std::uint32_t kParity = 0171;    // 1111001: fb + s1+s2+s3+s6
constexpr int kTail = kCodeMemory;

// State layout: bit (5-i) holds shift-register cell s_{i+1}, s1 newest.
struct Transition {
  std::uint8_t next;
  std::uint8_t parity;
};

struct Trellis {
  // [state][input] -> next state / parity; systematic output equals input.
  std::array<std::array<Transition, 2>, kCodeStates> fwd{};
  std::array<std::uint8_t, kCodeStates> flush{};  // input that zeroes the feedback

  Trellis() {
    for (int s = 0; s < kCodeStates; ++s) {
      const auto taps = [&](std::uint32_t poly, int fb) {
        int acc = fb & (poly >> kCodeMemory) & 1;
        for (int i = 0; i < kCodeMemory; ++i)
          acc ^= ((s >> (kCodeMemory - 1 - i)) & 1) & (poly >> (kCodeMemory - 1 - i));
        return acc & 1;
      };
      const int fb_state = taps(kFeedback & ~(1u << kCodeMemory), 1);
      for (int x = 0; x < 2; ++x) {
        const int fb = x ^ fb_state;
        const int p = taps(kParity, fb);
        fwd[s][x] = {static_cast<std::uint8_t>(((fb << (kCodeMemory - 1)) | (s >> 1)) & (kCodeStates - 1)),
                     static_cast<std::uint8_t>(p)};
      }
      flush[s] = static_cast<std::uint8_t>(fb_state);
    }
  }
};

const Trellis& trellis() {
  static const Trellis t;
  return t;
}

double clamp_llr(double v) { return std::clamp(v, -kLlrClamp, kLlrClamp); }

}  // namespace

double code_rate_value(CodeRate r) { return r == CodeRate::kHalf ? 0.5 : 0.75; }

bool parity_kept(int step, CodeRate r) {
  return r == CodeRate::kHalf ? true : (step % 3 == 0);
}

int coded_bits_for_steps(int steps, CodeRate r) {
  if (r == CodeRate::kHalf) return 2 * steps;
  require(steps % 3 == 0, "rate-3/4 trellis length must be a multiple of 3");
  return steps + steps / 3;
}

int trellis_steps_for_coded(int n_coded, CodeRate r) {
  require(n_coded > 0, "coded length must be positive");
  if (r == CodeRate::kHalf) {
    require(n_coded % 2 == 0, "rate-1/2 coded length must be even");
    return n_coded / 2;
  }
  require(n_coded % 4 == 0, "rate-3/4 coded length must be a multiple of 4");
  return 3 * (n_coded / 4);
}

int info_bits_for_coded(int n_coded, CodeRate r) {
  const int steps = trellis_steps_for_coded(n_coded, r);
  require(steps > kTail, "coded budget too small for the zero tail");
  return steps - kTail;
}

std::vector<std::uint8_t> conv_encode(const std::vector<std::uint8_t>& info, CodeRate r) {
  const auto& t = trellis();
  const int steps = static_cast<int>(info.size()) + kTail;
  if (r == CodeRate::kThreeQuarter)
    require(steps % 3 == 0, "rate-3/4 frame: info length + 6 must be a multiple of 3");
  std::vector<std::uint8_t> out;
  out.reserve(static_cast<size_t>(coded_bits_for_steps(steps, r)));
  int state = 0;
  for (int i = 0; i < steps; ++i) {
    const int x = i < static_cast<int>(info.size()) ? (info[i] & 1) : t.flush[state];
    const auto tr = t.fwd[state][x];
    out.push_back(static_cast<std::uint8_t>(x));
    if (parity_kept(i, r)) out.push_back(tr.parity);
    state = tr.next;
  }
  return out;
}

std::vector<std::uint8_t> puncture_parity(const std::vector<std::uint8_t>& parity, CodeRate r) {
  std::vector<std::uint8_t> out;
  out.reserve(parity.size());
  for (size_t i = 0; i < parity.size(); ++i)
    if (parity_kept(static_cast<int>(i), r)) out.push_back(parity[i]);
  return out;
}

std::vector<double> depuncture_parity(const std::vector<double>& parity_llr, CodeRate r, int steps) {
  std::vector<double> out(static_cast<size_t>(steps), 0.0);
  size_t j = 0;
  for (int i = 0; i < steps; ++i) {
    if (!parity_kept(i, r)) continue;
    require(j < parity_llr.size(), "punctured parity stream shorter than trellis");
    out[static_cast<size_t>(i)] = parity_llr[j++];
  }
  require(j == parity_llr.size(), "punctured parity stream longer than trellis");
  return out;
}

void split_coded_llrs(const std::vector<double>& coded_llr, CodeRate r, int steps,
                      std::vector<double>& sys_llr, std::vector<double>& par_llr) {
  require(static_cast<int>(coded_llr.size()) == coded_bits_for_steps(steps, r),
          "coded LLR stream length does not match trellis");
  sys_llr.assign(static_cast<size_t>(steps), 0.0);
  par_llr.assign(static_cast<size_t>(steps), 0.0);
  size_t j = 0;
  for (int i = 0; i < steps; ++i) {
    sys_llr[static_cast<size_t>(i)] = coded_llr[j++];
    if (parity_kept(i, r)) par_llr[static_cast<size_t>(i)] = coded_llr[j++];
  }
}

std::vector<double> merge_coded_llrs(const std::vector<double>& sys_llr,
                                     const std::vector<double>& par_llr, CodeRate r) {
  require(sys_llr.size() == par_llr.size(), "lane length mismatch");
  std::vector<double> out;
  out.reserve(sys_llr.size() * 2);
  for (size_t i = 0; i < sys_llr.size(); ++i) {
    out.push_back(sys_llr[i]);
    if (parity_kept(static_cast<int>(i), r)) out.push_back(par_llr[i]);
  }
  return out;
}

SisoResult conv_decode_siso(const std::vector<double>& sys_llr, const std::vector<double>& par_llr) {
  require(sys_llr.size() == par_llr.size(), "lane length mismatch");
  const int steps = static_cast<int>(sys_llr.size());
  require(steps > kTail, "trellis too short");
  const auto& t = trellis();
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();

  // Bit metric: +L/2 for bit 0, -L/2 for bit 1 (max-log).
  std::vector<double> ms(sys_llr.size()), mp(par_llr.size());
  for (int i = 0; i < steps; ++i) {
    ms[i] = 0.5 * clamp_llr(sys_llr[i]);
    mp[i] = 0.5 * clamp_llr(par_llr[i]);
  }

  std::vector<std::array<double, kCodeStates>> alpha(static_cast<size_t>(steps) + 1);
  alpha[0].fill(kNegInf);
  alpha[0][0] = 0.0;
  for (int i = 0; i < steps; ++i) {
    auto& a1 = alpha[i + 1];
    a1.fill(kNegInf);
    double peak = kNegInf;
    for (int s = 0; s < kCodeStates; ++s) {
      const double a = alpha[i][s];
      if (a == kNegInf) continue;
      for (int x = 0; x < 2; ++x) {
        const auto tr = t.fwd[s][x];
        const double g = (x ? -ms[i] : ms[i]) + (tr.parity ? -mp[i] : mp[i]);
        const double cand = a + g;
        if (cand > a1[tr.next]) a1[tr.next] = cand;
      }
    }
    for (double v : a1) peak = std::max(peak, v);
    for (double& v : a1)
      if (v != kNegInf) v -= peak;
  }

  std::vector<std::array<double, kCodeStates>> beta(static_cast<size_t>(steps) + 1);
  beta[steps].fill(kNegInf);
  beta[steps][0] = 0.0;  // zero-tail boundary
  for (int i = steps - 1; i >= 0; --i) {
    auto& b0 = beta[i];
    b0.fill(kNegInf);
    double peak = kNegInf;
    for (int s = 0; s < kCodeStates; ++s) {
      for (int x = 0; x < 2; ++x) {
        const auto tr = t.fwd[s][x];
        const double b = beta[i + 1][tr.next];
        if (b == kNegInf) continue;
        const double g = (x ? -ms[i] : ms[i]) + (tr.parity ? -mp[i] : mp[i]);
        const double cand = b + g;
        if (cand > b0[s]) b0[s] = cand;
      }
    }
    for (double v : b0) peak = std::max(peak, v);
    for (double& v : b0)
      if (v != kNegInf) v -= peak;
  }

  SisoResult res;
  res.ext_sys.resize(static_cast<size_t>(steps));
  res.ext_par.resize(static_cast<size_t>(steps));
  res.info_hard.resize(static_cast<size_t>(steps - kTail));
  for (int i = 0; i < steps; ++i) {
    double best_s0 = kNegInf, best_s1 = kNegInf;  // by systematic bit
    double best_p0 = kNegInf, best_p1 = kNegInf;  // by parity bit
    for (int s = 0; s < kCodeStates; ++s) {
      const double a = alpha[i][s];
      if (a == kNegInf) continue;
      for (int x = 0; x < 2; ++x) {
        const auto tr = t.fwd[s][x];
        const double b = beta[i + 1][tr.next];
        if (b == kNegInf) continue;
        const double g = (x ? -ms[i] : ms[i]) + (tr.parity ? -mp[i] : mp[i]);
        const double m = a + g + b;
        if (x == 0) best_s0 = std::max(best_s0, m);
        else best_s1 = std::max(best_s1, m);
        if (tr.parity == 0) best_p0 = std::max(best_p0, m);
        else best_p1 = std::max(best_p1, m);
      }
    }
    // Subtract the input from the UNCLAMPED posterior difference: clamping the
    // posterior first would erase the code evidence whenever the input is
    // itself near the clamp, collapsing the extrinsic exactly when the inputs
    // are strongest. Only the final extrinsic is range-limited.
    const double app_s = best_s0 - best_s1;
    const double app_p = (best_p0 == kNegInf)   ? -(2.0 * kLlrClamp) + 2.0 * mp[i]
                         : (best_p1 == kNegInf) ? 2.0 * kLlrClamp + 2.0 * mp[i]
                                                : best_p0 - best_p1;
    res.ext_sys[i] = clamp_llr(app_s - 2.0 * ms[i]);
    res.ext_par[i] = clamp_llr(app_p - 2.0 * mp[i]);
    if (i < steps - kTail) res.info_hard[i] = app_s < 0.0 ? 1 : 0;
  }
  return res;
}

std::vector<std::uint8_t> conv_decode(const std::vector<double>& coded_llr, CodeRate r) {
  const int steps = trellis_steps_for_coded(static_cast<int>(coded_llr.size()), r);
  std::vector<double> sys, par;
  split_coded_llrs(coded_llr, r, steps, sys, par);
  return conv_decode_siso(sys, par).info_hard;
}

}  // namespace uwlink
