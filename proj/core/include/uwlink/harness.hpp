// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "uwlink/channel.hpp"
#include "uwlink/common.hpp"
#include "uwlink/conv_code.hpp"
#include "uwlink/estimation.hpp"
#include "uwlink/mapping.hpp"
#include "uwlink/receiver.hpp"
#include "uwlink/waveform.hpp"

namespace uwlink {

// Monte-Carlo campaign engine: scenario configuration, the per-trial
// TX -> channel -> estimation -> RX pipeline, deterministic parallel frame
// counting, and CSV emission.

/// Full simulation scenario. Defaults are the reference vehicular setup
/// (288 data symbols in 4 blocks, EVA at 4.32 MHz, 1.92 kHz Doppler).
struct SimConfig {
  Waveform waveform = Waveform::kOtfs;
  int n_data = 288;
  int m_blocks = 4;
  int n_cp = 16;
  int n_uw = 32;
  int n_tx = 1;
  int n_rx = 1;
  CodeRate code_rate = CodeRate::kHalf;
  Constellation constellation = Constellation::kQpsk;
  int n_iterations = 0;  ///< 0 = waveform default (1 for OFDM, 3 for OTFS)
  double bandwidth_hz = 4.32e6;
  double carrier_hz = 5.9e9;
  double speed_kmh = 350.0;
  double doppler_hz = 1920.0;  ///< <= 0: derive from carrier_hz and speed_kmh
  double snr_start_db = 0.0;
  double snr_stop_db = 20.0;
  double snr_step_db = 2.0;
  long min_frame_errors = 200;
  long max_frames = 200000;
  std::uint64_t seed = 1;
  bool charge_overhead = false;  ///< charge UW/CP samples to E_b
  int n_osc = 64;

  FrameGeometry geometry() const;
  ChannelProfile profile() const;
  double doppler() const;  ///< Hz, after the <=0 derivation rule
  double f_norm() const;   ///< doppler()/bandwidth_hz
  int iterations() const;  ///< resolved n_iterations
  /// Per-receive-antenna noise variance for E_b/sigma^2 = snr_db, with
  /// E_b = E_s/(R log2 J), E_s = 1 per data symbol.
  double snr_to_sigma2(double snr_db) const;
  void validate() const;
};

/// Parses flat key=value text ('#' comments). Unknown keys and malformed
/// values raise std::invalid_argument naming the offender.
SimConfig parse_config(const std::string& text);
SimConfig load_config(const std::string& path);
/// Applies one key=value override on top of an existing config.
void apply_override(SimConfig& cfg, const std::string& assignment);

struct FerRecord {
  double snr_db = 0.0;
  long frames = 0;
  long frame_errors = 0;
  long bit_errors = 0;
  double fer = 0.0;
  double ber = 0.0;
  double wallclock_s = 0.0;
  std::uint64_t seed = 0;
  /// Frame errors had the receiver stopped after iteration i+1 (same trials).
  std::vector<long> iter_frame_errors;
};

/// Runs one SNR point until min_frame_errors or max_frames (checked at batch
/// boundaries so the result is independent of the worker count).
FerRecord run_point(const SimConfig& cfg, double snr_db);
FerRecord run_point_with_sigma2(const SimConfig& cfg, double snr_db, double sigma2);

/// Sweeps the configured SNR grid; `on_point` (optional) sees each finished
/// record, e.g. for progress output.
std::vector<FerRecord> run_campaign(const SimConfig& cfg,
                                    const std::function<void(const FerRecord&)>& on_point = {});

/// CSV with header `snr_db,frames,frame_errors,bit_errors,fer,ber,seed`.
std::string emit_fer_csv(const std::vector<FerRecord>& records);
std::vector<FerRecord> parse_fer_csv(const std::string& text);

/// CSV with header `M,sigma2_ce,sigma2_d,sigma2_total`.
std::string emit_error_stats_csv(const FrameOptimization& opt);

/// Write-then-rename so readers never observe a partial file.
void write_file_atomic(const std::string& path, const std::string& content);

/// Worker count: SIM_THREADS env var if set, else hardware concurrency.
int resolved_worker_count();

}  // namespace uwlink
