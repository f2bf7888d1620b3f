// SPDX-License-Identifier: Apache-2.0
//
// Command line front end: scenario simulation, frame design tables, and a
// quick self test. Exit codes: 0 success, 1 configuration error, 2 runtime
// error.
#include <cmath>
#include <complex>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
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

namespace {

struct CommonOpts {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out;
};

void add_common(CLI::App* cmd, CommonOpts* opts) {
  cmd->add_option("--config", opts->config_path, "scenario file (flat key=value)");
  cmd->add_option("--set", opts->overrides, "override a config key (key=value, repeatable)");
  cmd->add_option("--out", opts->out, "write CSV here instead of stdout");
}

uwlink::SimConfig build_config(const CommonOpts& opts) {
  uwlink::SimConfig cfg;
  if (!opts.config_path.empty()) cfg = uwlink::load_config(opts.config_path);
  for (const std::string& a : opts.overrides) uwlink::apply_override(cfg, a);
  cfg.validate();
  return cfg;
}

void emit(const CommonOpts& opts, const std::string& csv) {
  if (opts.out.empty())
    std::cout << csv;
  else
    uwlink::write_file_atomic(opts.out, csv);
}

int run_simulate(const CommonOpts& opts, bool full) {
  uwlink::SimConfig cfg = build_config(opts);
  if (full) cfg.max_frames = std::max(cfg.max_frames, 2000000L);
  const auto progress = [](const uwlink::FerRecord& r) {
    std::fprintf(stderr, "snr=%6.2f dB  frames=%ld  errors=%ld  fer=%.3e  ber=%.3e  (%.1f s)\n",
                 r.snr_db, r.frames, r.frame_errors, r.fer, r.ber, r.wallclock_s);
  };
  const std::vector<uwlink::FerRecord> records = uwlink::run_campaign(cfg, progress);
  emit(opts, uwlink::emit_fer_csv(records));
  return 0;
}

double operating_sigma2(const uwlink::SimConfig& cfg, double op_snr_db, double sigma2) {
  return sigma2 > 0.0 ? sigma2 : cfg.snr_to_sigma2(op_snr_db);
}

int run_optimize(const CommonOpts& opts, double op_snr_db, double sigma2) {
  const uwlink::SimConfig cfg = build_config(opts);
  const double s2 = operating_sigma2(cfg, op_snr_db, sigma2);
  const uwlink::FrameOptimization fo =
      uwlink::optimize_frame(cfg.geometry(), cfg.profile(), cfg.f_norm(), s2);
  std::printf("# sigma2=%.6e f_doppler=%.1f Hz\n", s2, cfg.doppler());
  std::printf("%4s %14s %14s %14s\n", "M", "sigma2_ce", "sigma2_d", "total");
  for (const auto& row : fo.rows)
    std::printf("%4d %14.6e %14.6e %14.6e\n", row.m_blocks, row.sigma2_ce, row.sigma2_d,
                row.total);
  std::printf("M*=%d\n", fo.best_m);
  if (!opts.out.empty()) uwlink::write_file_atomic(opts.out, uwlink::emit_error_stats_csv(fo));
  return 0;
}

int run_error_stats(const CommonOpts& opts, double op_snr_db, double sigma2) {
  const uwlink::SimConfig cfg = build_config(opts);
  const double s2 = operating_sigma2(cfg, op_snr_db, sigma2);
  const uwlink::FrameOptimization fo =
      uwlink::optimize_frame(cfg.geometry(), cfg.profile(), cfg.f_norm(), s2, {cfg.m_blocks});
  emit(opts, uwlink::emit_error_stats_csv(fo));
  return 0;
}

bool check(bool ok, const char* name, int& failures) {
  std::printf("%s %s\n", ok ? "ok  " : "FAIL", name);
  if (!ok) ++failures;
  return ok;
}

int run_selftest() {
  using namespace uwlink;
  int failures = 0;

  {
    const cvec zc = zadoff_chu(32);
    cvec fd = zc;
    fft::forward_raw({fd.data(), fd.size()});
    double dev = 0.0;
    for (const cd& v : fd) dev = std::max(dev, std::abs(std::abs(v) - std::sqrt(32.0)));
    check(dev < 1e-9, "unique word has a flat spectrum", failures);
  }
  {
    Rng rng(7);
    cvec d(288);
    for (auto& v : d) v = rng.next_cnormal();
    double worst = 0.0;
    for (Waveform w : {Waveform::kOtfs, Waveform::kOfdm}) {
      const cvec t = modulate(d, w, 4, 72);
      const cvec back = demodulate(t, w, 4, 72);
      for (size_t i = 0; i < d.size(); ++i) worst = std::max(worst, std::abs(back[i] - d[i]));
    }
    check(worst < 1e-12, "modulation round trip", failures);
  }
  {
    std::vector<std::uint8_t> info(250);
    Rng rng(9);
    for (auto& b : info) b = static_cast<std::uint8_t>(rng.next_bit());
    const auto coded = conv_encode(info, CodeRate::kHalf);
    std::vector<double> llr(coded.size());
    for (size_t i = 0; i < coded.size(); ++i) llr[i] = coded[i] ? -8.0 : 8.0;
    check(conv_decode(llr, CodeRate::kHalf) == info, "convolutional code round trip", failures);
  }
  {
    // Static noiseless frame must decode error free end to end.
    SimConfig cfg;
    cfg.waveform = Waveform::kOtfs;
    cfg.n_tx = cfg.n_rx = 2;
    cfg.code_rate = CodeRate::kThreeQuarter;
    cfg.constellation = Constellation::k16Qam;
    cfg.speed_kmh = 0.0;
    cfg.doppler_hz = 0.0;
    cfg.min_frame_errors = 1;
    cfg.max_frames = 8;
    const FerRecord rec = run_point_with_sigma2(cfg, 99.0, 0.0);
    check(rec.frame_errors == 0, "noiseless static frames decode cleanly", failures);
  }
  return failures == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"unique-word channel estimation link simulator (MIMO OTFS/OFDM)"};
  app.require_subcommand(1);

  CommonOpts sim_opts;
  bool full = false;
  CLI::App* simulate = app.add_subcommand("simulate", "run a frame error rate campaign");
  add_common(simulate, &sim_opts);
  simulate->add_flag("--full", full, "long-running preset (frame cap raised to 2e6)");

  CommonOpts optf_opts;
  double optf_snr = 12.0, optf_sigma2 = 0.0;
  CLI::App* optimize = app.add_subcommand("optimize-frame", "sub-block count trade-off table");
  add_common(optimize, &optf_opts);
  optimize->add_option("--op-snr-db", optf_snr, "operating E_b/sigma^2 in dB (default 12)");
  optimize->add_option("--sigma2", optf_sigma2, "operating noise variance (overrides --op-snr-db)");

  CommonOpts stats_opts;
  double stats_snr = 12.0, stats_sigma2 = 0.0;
  CLI::App* stats = app.add_subcommand("error-stats", "error decomposition for the configured M");
  add_common(stats, &stats_opts);
  stats->add_option("--op-snr-db", stats_snr, "operating E_b/sigma^2 in dB (default 12)");
  stats->add_option("--sigma2", stats_sigma2, "operating noise variance (overrides --op-snr-db)");

  CLI::App* selftest = app.add_subcommand("selftest", "quick built-in sanity checks");
  (void)selftest;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (simulate->parsed()) return run_simulate(sim_opts, full);
    if (optimize->parsed()) return run_optimize(optf_opts, optf_snr, optf_sigma2);
    if (stats->parsed()) return run_error_stats(stats_opts, stats_snr, stats_sigma2);
    if (selftest->parsed()) return run_selftest();
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
