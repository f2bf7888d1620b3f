// SPDX-License-Identifier: Apache-2.0
//
// Hot-path microbenchmarks: channel synthesis, modulation, estimation, soft
// decoding and the complete per-frame receive chain.
#include <benchmark/benchmark.h>

#include <span>
#include <vector>

#include "uwlink/channel.hpp"
#include "uwlink/conv_code.hpp"
#include "uwlink/estimation.hpp"
#include "uwlink/fft.hpp"
#include "uwlink/harness.hpp"
#include "uwlink/interleaver.hpp"
#include "uwlink/mapping.hpp"
#include "uwlink/receiver.hpp"
#include "uwlink/rng.hpp"
#include "uwlink/waveform.hpp"

using namespace uwlink;

namespace {

const ChannelProfile& eva() {
  static const ChannelProfile p = ChannelProfile::eva(4.32e6);
  return p;
}
constexpr double kFNorm = 1920.0 / 4.32e6;

void BM_GenerateChannel(benchmark::State& state) {
  const int nt = static_cast<int>(state.range(0));
  FrameGeometry g;
  g.n_tx = g.n_rx = nt;
  g.n_uw = nt == 4 ? 64 : 32;
  Rng rng(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        generate_channel(eva(), nt, nt, g.frame_len() + eva().length(), kFNorm, rng));
  }
}
BENCHMARK(BM_GenerateChannel)->Arg(1)->Arg(2)->Arg(4);

void BM_Modulate(benchmark::State& state) {
  const Waveform w = state.range(0) ? Waveform::kOtfs : Waveform::kOfdm;
  Rng rng(2);
  cvec d(288);
  for (auto& x : d) x = rng.next_cnormal();
  for (auto _ : state) benchmark::DoNotOptimize(modulate(d, w, 4, 72));
}
BENCHMARK(BM_Modulate)->Arg(0)->Arg(1);

void BM_SisoDecode(benchmark::State& state) {
  Rng rng(3);
  const int n_coded = 1152;
  const CodeRate r = CodeRate::kThreeQuarter;
  std::vector<std::uint8_t> info(static_cast<size_t>(info_bits_for_coded(n_coded, r)));
  for (auto& b : info) b = static_cast<std::uint8_t>(rng.next_bit());
  const auto coded = conv_encode(info, r);
  std::vector<double> llr(coded.size());
  for (size_t i = 0; i < llr.size(); ++i)
    llr[i] = (coded[i] ? -2.0 : 2.0) + 0.7 * rng.next_normal();
  std::vector<double> sys, par;
  split_coded_llrs(llr, r, trellis_steps_for_coded(n_coded, r), sys, par);
  for (auto _ : state) benchmark::DoNotOptimize(conv_decode_siso(sys, par));
}
BENCHMARK(BM_SisoDecode);

void BM_Demap16Qam(benchmark::State& state) {
  Rng rng(4);
  cvec sym(288);
  for (auto& s : sym) s = rng.next_cnormal();
  const std::vector<double> nv(288, 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(demap_llrs(sym, nv, Constellation::k16Qam));
}
BENCHMARK(BM_Demap16Qam);

void BM_EstimateChannel(benchmark::State& state) {
  FrameGeometry g;
  g.n_tx = g.n_rx = 2;
  Rng rng(5);
  const WienerTable table = compute_wiener_table(g, eva(), kFNorm, 1e-2);
  const ChannelRealization chan =
      generate_channel(eva(), 2, 2, g.frame_len() + eva().length(), kFNorm, rng);
  const auto rx =
      propagate(assemble_frame(cvec(static_cast<size_t>(g.n_data), cd(0.0)), g), chan, 1e-2, rng);
  std::vector<std::vector<cvec>> uw(2, std::vector<cvec>(2));
  for (int nr = 0; nr < 2; ++nr) {
    const FramePayloads pay = demux_frame(rx[static_cast<size_t>(nr)], g);
    for (int u = 0; u < 2; ++u) uw[static_cast<size_t>(u)][static_cast<size_t>(nr)] = pay.uw[static_cast<size_t>(u)];
  }
  for (auto _ : state) benchmark::DoNotOptimize(estimate_channel(uw, g, table));
}
BENCHMARK(BM_EstimateChannel);

void BM_DetectFrame(benchmark::State& state) {
  const Waveform w = state.range(0) ? Waveform::kOtfs : Waveform::kOfdm;
  const FrameGeometry g;
  const BicmScheme scheme{CodeRate::kThreeQuarter, Constellation::k16Qam, 9};
  Rng rng(6);
  const int n_coded = g.n_data * bits_per_symbol(scheme.constellation);
  std::vector<std::uint8_t> info(static_cast<size_t>(info_bits_for_coded(n_coded, scheme.rate)));
  for (auto& b : info) b = static_cast<std::uint8_t>(rng.next_bit());
  const Interleaver il(n_coded, scheme.interleaver_seed);
  cvec x = modulate(map_symbols(il.interleave(conv_encode(info, scheme.rate)), scheme.constellation),
                    w, g.m_blocks, g.k());
  for (int m = 0; m < g.m_blocks; ++m)
    fft::forward_unitary(std::span<cd>(x.data() + static_cast<size_t>(m) * g.k(), static_cast<size_t>(g.k())));

  CombinedBlocks comb;
  comb.k = g.k();
  comb.lambda.assign(4, std::vector<double>(72, 1.0));
  comb.sigma2_eff.assign(4, 0.05);
  for (int m = 0; m < 4; ++m) {
    comb.y_eq.emplace_back(x.begin() + m * 72, x.begin() + (m + 1) * 72);
    for (auto& y : comb.y_eq.back()) y += std::sqrt(0.05 / 2) * rng.next_cnormal();
  }
  for (auto _ : state)
    benchmark::DoNotOptimize(detect_frame(comb, w, g, scheme, w == Waveform::kOtfs ? 3 : 1));
}
BENCHMARK(BM_DetectFrame)->Arg(0)->Arg(1);

void BM_FullTrial(benchmark::State& state) {
  // One complete Monte-Carlo point at a fixed frame budget: transmit,
  // propagate, estimate, detect. Mirrors the campaign hot loop.
  SimConfig cfg;
  cfg.waveform = state.range(0) ? Waveform::kOtfs : Waveform::kOfdm;
  cfg.n_tx = cfg.n_rx = 2;
  cfg.code_rate = CodeRate::kThreeQuarter;
  cfg.constellation = Constellation::k16Qam;
  cfg.min_frame_errors = 1000000;
  cfg.max_frames = 20;
  for (auto _ : state) benchmark::DoNotOptimize(run_point(cfg, 12.0));
}
BENCHMARK(BM_FullTrial)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
