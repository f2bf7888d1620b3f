// SPDX-License-Identifier: Apache-2.0
#include "uwlink/harness.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "uwlink/fft.hpp"
#include "uwlink/interleaver.hpp"
#include "uwlink/rng.hpp"

namespace uwlink {

namespace {

// The interleaver is part of the transmission scheme, not of the experiment
// randomness: it must not change with the master seed.
constexpr std::uint64_t kInterleaverSeed = 0x7e57ab1e5eedULL;

// Stopping decisions happen at batch boundaries on fully ordered batches, so
// results do not depend on how many workers split a batch.
constexpr long kBatch = 256;

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

long parse_long(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const long x = std::stol(v, &pos);
    require(pos == v.size(), "trailing characters");
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': bad integer '" + v + "'");
  }
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    require(pos == v.size(), "trailing characters");
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': bad number '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw std::invalid_argument("config key '" + key + "': bad boolean '" + v + "'");
}

void set_key(SimConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "waveform") {
    if (value == "otfs")
      cfg.waveform = Waveform::kOtfs;
    else if (value == "ofdm")
      cfg.waveform = Waveform::kOfdm;
    else
      throw std::invalid_argument("config key 'waveform': expected otfs|ofdm, got '" + value + "'");
  } else if (key == "n_data") {
    cfg.n_data = static_cast<int>(parse_long(key, value));
  } else if (key == "m_blocks") {
    cfg.m_blocks = static_cast<int>(parse_long(key, value));
  } else if (key == "n_cp") {
    cfg.n_cp = static_cast<int>(parse_long(key, value));
  } else if (key == "n_uw") {
    cfg.n_uw = static_cast<int>(parse_long(key, value));
  } else if (key == "n_tx") {
    cfg.n_tx = static_cast<int>(parse_long(key, value));
  } else if (key == "n_rx") {
    cfg.n_rx = static_cast<int>(parse_long(key, value));
  } else if (key == "code_rate") {
    if (value == "1/2")
      cfg.code_rate = CodeRate::kHalf;
    else if (value == "3/4")
      cfg.code_rate = CodeRate::kThreeQuarter;
    else
      throw std::invalid_argument("config key 'code_rate': expected 1/2|3/4, got '" + value + "'");
  } else if (key == "constellation") {
    if (value == "qpsk")
      cfg.constellation = Constellation::kQpsk;
    else if (value == "16qam")
      cfg.constellation = Constellation::k16Qam;
    else if (value == "64qam")
      cfg.constellation = Constellation::k64Qam;
    else
      throw std::invalid_argument("config key 'constellation': expected qpsk|16qam|64qam, got '" +
                                  value + "'");
  } else if (key == "n_iterations") {
    cfg.n_iterations = static_cast<int>(parse_long(key, value));
  } else if (key == "bandwidth_hz") {
    cfg.bandwidth_hz = parse_double(key, value);
  } else if (key == "carrier_hz") {
    cfg.carrier_hz = parse_double(key, value);
  } else if (key == "speed_kmh") {
    cfg.speed_kmh = parse_double(key, value);
  } else if (key == "doppler_hz") {
    cfg.doppler_hz = parse_double(key, value);
  } else if (key == "snr_start_db") {
    cfg.snr_start_db = parse_double(key, value);
  } else if (key == "snr_stop_db") {
    cfg.snr_stop_db = parse_double(key, value);
  } else if (key == "snr_step_db") {
    cfg.snr_step_db = parse_double(key, value);
  } else if (key == "min_frame_errors") {
    cfg.min_frame_errors = parse_long(key, value);
  } else if (key == "max_frames") {
    cfg.max_frames = parse_long(key, value);
  } else if (key == "seed") {
    try {
      cfg.seed = std::stoull(value);
    } catch (const std::exception&) {
      throw std::invalid_argument("config key 'seed': bad integer '" + value + "'");
    }
  } else if (key == "charge_overhead") {
    cfg.charge_overhead = parse_bool(key, value);
  } else if (key == "n_osc") {
    cfg.n_osc = static_cast<int>(parse_long(key, value));
  } else {
    throw std::invalid_argument("unknown config key '" + key + "'");
  }
}

}  // namespace

FrameGeometry SimConfig::geometry() const {
  FrameGeometry g;
  g.n_data = n_data;
  g.m_blocks = m_blocks;
  g.n_cp = n_cp;
  g.n_uw = n_uw;
  g.n_tx = n_tx;
  g.n_rx = n_rx;
  return g;
}

ChannelProfile SimConfig::profile() const { return ChannelProfile::eva(bandwidth_hz); }

double SimConfig::doppler() const {
  if (doppler_hz > 0.0) return doppler_hz;
  constexpr double kLightSpeed = 299792458.0;
  return carrier_hz * (speed_kmh / 3.6) / kLightSpeed;
}

double SimConfig::f_norm() const { return doppler() / bandwidth_hz; }

int SimConfig::iterations() const {
  if (n_iterations > 0) return n_iterations;
  return waveform == Waveform::kOtfs ? 3 : 1;
}

double SimConfig::snr_to_sigma2(double snr_db) const {
  double eb = 1.0 / (code_rate_value(code_rate) * bits_per_symbol(constellation));
  if (charge_overhead) eb *= static_cast<double>(geometry().frame_len()) / n_data;
  return eb / std::pow(10.0, snr_db / 10.0);
}

void SimConfig::validate() const {
  geometry().validate();
  require(n_tx == n_rx && (n_tx == 1 || n_tx == 2 || n_tx == 4),
          "antenna setup must be 1x1, 2x2 or 4x4");
  require(n_uw == 32 || n_uw == 64, "n_uw must be 32 or 64");
  const bool mcs_ok = (code_rate == CodeRate::kHalf && constellation != Constellation::k64Qam) ||
                      (code_rate == CodeRate::kThreeQuarter && constellation != Constellation::kQpsk);
  require(mcs_ok, "unsupported rate/constellation combination");
  require(bandwidth_hz > 0.0 && carrier_hz > 0.0 && speed_kmh >= 0.0, "bad channel parameters");
  require(doppler() >= 0.0 && f_norm() < 0.5, "Doppler out of range");
  require(n_iterations >= 0, "n_iterations must be >= 0");
  require(snr_step_db > 0.0, "snr_step_db must be positive");
  require(snr_stop_db >= snr_start_db - 1e-9, "empty SNR sweep");
  require(min_frame_errors > 0 && max_frames > 0, "bad stopping rule");
  require(n_osc >= 64, "n_osc must be >= 64");
  const ChannelProfile p = profile();
  require(n_tx <= n_uw / p.length(), "n_tx exceeds floor(n_uw / channel length)");
  require(n_cp >= p.length() - 1, "cyclic prefix shorter than channel memory");
}

SimConfig parse_config(const std::string& text) {
  SimConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key=value");
    set_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void apply_override(SimConfig& cfg, const std::string& assignment) {
  const size_t eq = assignment.find('=');
  if (eq == std::string::npos)
    throw std::invalid_argument("override '" + assignment + "': expected key=value");
  set_key(cfg, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

namespace {

/// Everything a trial needs, derived once per SNR point and shared read-only.
struct PointContext {
  const SimConfig* cfg;
  FrameGeometry g;
  ChannelProfile profile;
  double f_norm;
  double sigma2;
  WienerTable table;
  BicmScheme scheme;
  Interleaver il;
  int n_iter;
  int n_info;
  int chan_len;
  std::uint64_t point_seed;

  PointContext(const SimConfig& c, double sigma2_in)
      : cfg(&c),
        g(c.geometry()),
        profile(c.profile()),
        f_norm(c.f_norm()),
        sigma2(sigma2_in),
        table(compute_wiener_table(g, profile, f_norm, sigma2_in)),
        scheme{c.code_rate, c.constellation, kInterleaverSeed},
        il(c.n_data * bits_per_symbol(c.constellation), kInterleaverSeed),
        n_iter(c.iterations()),
        n_info(info_bits_for_coded(c.n_data * bits_per_symbol(c.constellation), c.code_rate)),
        chan_len(g.frame_len() + profile.length() - 1),
        point_seed(derive_seed(c.seed, std::bit_cast<std::uint64_t>(sigma2_in))) {}
};

struct Tally {
  long frames = 0;
  long frame_errors = 0;
  long bit_errors = 0;
  std::vector<long> iter_fe;
};

void run_trial(const PointContext& ctx, long trial, Tally& tally) {
  Rng bits_rng(derive_seed(ctx.point_seed, static_cast<std::uint64_t>(trial), 1));
  Rng chan_rng(derive_seed(ctx.point_seed, static_cast<std::uint64_t>(trial), 2));
  Rng noise_rng(derive_seed(ctx.point_seed, static_cast<std::uint64_t>(trial), 3));

  std::vector<std::uint8_t> info(static_cast<size_t>(ctx.n_info));
  for (auto& b : info) b = static_cast<std::uint8_t>(bits_rng.next_bit());

  const std::vector<std::uint8_t> coded = conv_encode(info, ctx.scheme.rate);
  const std::vector<std::uint8_t> mapped_bits = ctx.il.interleave(coded);
  const cvec d = map_symbols(mapped_bits, ctx.scheme.constellation);
  const cvec x = modulate(d, ctx.cfg->waveform, ctx.g.m_blocks, ctx.g.k());
  const std::vector<cvec> tx = assemble_frame(x, ctx.g);

  const ChannelRealization chan =
      generate_channel(ctx.profile, ctx.g.n_tx, ctx.g.n_rx, ctx.chan_len, ctx.f_norm, chan_rng,
                       ctx.cfg->n_osc);
  const std::vector<cvec> rx = propagate(tx, chan, ctx.sigma2, noise_rng);

  std::vector<std::vector<cvec>> uw_rx(2, std::vector<cvec>(static_cast<size_t>(ctx.g.n_rx)));
  std::vector<std::vector<cvec>> block_fd(static_cast<size_t>(ctx.g.m_blocks),
                                          std::vector<cvec>(static_cast<size_t>(ctx.g.n_rx)));
  for (int nr = 0; nr < ctx.g.n_rx; ++nr) {
    FramePayloads p = demux_frame(rx[static_cast<size_t>(nr)], ctx.g);
    uw_rx[0][static_cast<size_t>(nr)] = std::move(p.uw[0]);
    uw_rx[1][static_cast<size_t>(nr)] = std::move(p.uw[1]);
    for (int m = 0; m < ctx.g.m_blocks; ++m) {
      fft::forward_unitary({p.blocks[static_cast<size_t>(m)].data(),
                            p.blocks[static_cast<size_t>(m)].size()});
      block_fd[static_cast<size_t>(m)][static_cast<size_t>(nr)] =
          std::move(p.blocks[static_cast<size_t>(m)]);
    }
  }

  const ChannelEstimate est = estimate_channel(uw_rx, ctx.g, ctx.table);
  const CombinedBlocks comb = mrc_combine(block_fd, est);
  const DetectionResult det = detect_frame(comb, ctx.cfg->waveform, ctx.g, ctx.scheme, ctx.n_iter);

  ++tally.frames;
  const size_t n_passes = det.iter_info.size();  // single pass without spreading
  if (tally.iter_fe.empty()) tally.iter_fe.assign(n_passes, 0);
  long final_errors = 0;
  for (size_t it = 0; it < n_passes; ++it) {
    long errors = 0;
    const auto& hard = det.iter_info[it];
    for (size_t i = 0; i < info.size(); ++i) errors += hard[i] != info[i];
    if (errors > 0) ++tally.iter_fe[it];
    if (it + 1 == n_passes) final_errors = errors;
  }
  tally.bit_errors += final_errors;
  if (final_errors > 0) ++tally.frame_errors;
}

}  // namespace

int resolved_worker_count() {
  if (const char* env = std::getenv("SIM_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
    return 1;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

FerRecord run_point_with_sigma2(const SimConfig& cfg, double snr_db, double sigma2) {
  cfg.validate();
  require(sigma2 >= 0.0, "sigma2 must be >= 0");
  const auto t0 = std::chrono::steady_clock::now();
  const PointContext ctx(cfg, sigma2);

  Tally total;
  total.iter_fe.assign(static_cast<size_t>(ctx.n_iter), 0);
  long done = 0;
  while (true) {
    const long batch = std::min<long>(kBatch, cfg.max_frames - done);
    const int workers = static_cast<int>(std::min<long>(resolved_worker_count(), batch));
    std::vector<Tally> parts(static_cast<size_t>(workers));
    std::exception_ptr failure;
    std::mutex failure_mu;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w]() {
        try {
          for (long t = done + w; t < done + batch; t += workers)
            run_trial(ctx, t, parts[static_cast<size_t>(w)]);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(failure_mu);
          if (!failure) failure = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
    for (const Tally& p : parts) {
      total.frames += p.frames;
      total.frame_errors += p.frame_errors;
      total.bit_errors += p.bit_errors;
      for (size_t i = 0; i < p.iter_fe.size(); ++i) total.iter_fe[i] += p.iter_fe[i];
    }
    done += batch;
    if (total.frame_errors >= cfg.min_frame_errors || done >= cfg.max_frames) break;
  }

  FerRecord rec;
  rec.snr_db = snr_db;
  rec.frames = total.frames;
  rec.frame_errors = total.frame_errors;
  rec.bit_errors = total.bit_errors;
  rec.fer = static_cast<double>(total.frame_errors) / static_cast<double>(total.frames);
  rec.ber = static_cast<double>(total.bit_errors) /
            (static_cast<double>(total.frames) * static_cast<double>(ctx.n_info));
  rec.wallclock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rec.seed = cfg.seed;
  rec.iter_frame_errors = total.iter_fe;
  return rec;
}

FerRecord run_point(const SimConfig& cfg, double snr_db) {
  return run_point_with_sigma2(cfg, snr_db, cfg.snr_to_sigma2(snr_db));
}

std::vector<FerRecord> run_campaign(const SimConfig& cfg,
                                    const std::function<void(const FerRecord&)>& on_point) {
  cfg.validate();
  std::vector<FerRecord> records;
  for (int i = 0;; ++i) {
    const double snr = cfg.snr_start_db + i * cfg.snr_step_db;
    if (snr > cfg.snr_stop_db + 1e-9) break;
    records.push_back(run_point(cfg, snr));
    if (on_point) on_point(records.back());
  }
  return records;
}

std::string emit_fer_csv(const std::vector<FerRecord>& records) {
  std::ostringstream out;
  out << "snr_db,frames,frame_errors,bit_errors,fer,ber,seed\n";
  out << std::setprecision(17);
  for (const FerRecord& r : records)
    out << r.snr_db << ',' << r.frames << ',' << r.frame_errors << ',' << r.bit_errors << ','
        << r.fer << ',' << r.ber << ',' << r.seed << '\n';
  return out.str();
}

std::vector<FerRecord> parse_fer_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "empty CSV");
  require(trim(line) == "snr_db,frames,frame_errors,bit_errors,fer,ber,seed",
          "unexpected CSV header");
  std::vector<FerRecord> records;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(row, field, ',')) fields.push_back(field);
    require(fields.size() == 7, "CSV row must have 7 fields");
    FerRecord r;
    r.snr_db = parse_double("snr_db", fields[0]);
    r.frames = parse_long("frames", fields[1]);
    r.frame_errors = parse_long("frame_errors", fields[2]);
    r.bit_errors = parse_long("bit_errors", fields[3]);
    r.fer = parse_double("fer", fields[4]);
    r.ber = parse_double("ber", fields[5]);
    try {
      r.seed = std::stoull(fields[6]);
    } catch (const std::exception&) {
      throw std::invalid_argument("CSV field 'seed': bad integer '" + fields[6] + "'");
    }
    records.push_back(r);
  }
  return records;
}

std::string emit_error_stats_csv(const FrameOptimization& opt) {
  std::ostringstream out;
  out << "M,sigma2_ce,sigma2_d,sigma2_total\n";
  out << std::setprecision(10);
  for (const auto& row : opt.rows)
    out << row.m_blocks << ',' << row.sigma2_ce << ',' << row.sigma2_d << ',' << row.total << '\n';
  return out.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp + "' for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("cannot rename '" + tmp + "' to '" + path + "'");
  }
}

}  // namespace uwlink
