#include "cli/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "cli/config.hpp"
#include "cli/csv.hpp"
#include "jampa/constants.hpp"
#include "jampa/error.hpp"
#include "jampa/kerr.hpp"
#include "jampa/noisecal.hpp"
#include "jampa/parallel.hpp"
#include "jampa/planner.hpp"

namespace jampa::cli {

namespace {

using constants::two_pi;

double parse_number(std::string_view s, const std::string& flag) {
  double v = 0.0;
  if (s == "inf") return std::numeric_limits<double>::infinity();
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || s.empty()) {
    throw Error(ErrorKind::InvalidInput, flag + ": not a number: \"" + std::string(s) + "\"");
  }
  return v;
}

std::vector<std::string_view> split_colon(std::string_view s) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto c = s.find(':', start);
    parts.push_back(s.substr(start, c == s.npos ? s.npos : c - start));
    if (c == s.npos) break;
    start = c + 1;
  }
  return parts;
}

Interval parse_band(const std::string& s) {
  const auto parts = split_colon(s);
  if (parts.size() != 2) throw Error(ErrorKind::InvalidInput, "--band: expected lo:hi in Hz, got \"" + s + "\"");
  const Interval band{parse_number(parts[0], "--band"), parse_number(parts[1], "--band")};
  if (!(band.lo >= 0.0 && band.hi >= band.lo && std::isfinite(band.hi))) {
    throw Error(ErrorKind::InvalidInput, "--band: need 0 <= lo <= hi < inf");
  }
  return band;
}

// Log-spaced integers, rounded and deduplicated, ascending.
std::vector<int> parse_m_range(const std::string& s) {
  const auto parts = split_colon(s);
  if (parts.size() != 3) {
    throw Error(ErrorKind::InvalidInput, "--m-range: expected lo:hi:count, got \"" + s + "\"");
  }
  const double lo = parse_number(parts[0], "--m-range");
  const double hi = parse_number(parts[1], "--m-range");
  const double count = parse_number(parts[2], "--m-range");
  if (!(lo >= 1.0 && hi >= lo && hi <= 1e6 && count >= 1.0 && count == std::floor(count) && count <= 1e5)) {
    throw Error(ErrorKind::InvalidInput, "--m-range: need 1 <= lo <= hi <= 1e6 and an integer count >= 1");
  }
  std::vector<int> Ms;
  const int n = static_cast<int>(count);
  for (int i = 0; i < n; ++i) {
    const double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
    const int M = static_cast<int>(std::lround(lo * std::pow(hi / lo, t)));
    if (Ms.empty() || Ms.back() != M) Ms.push_back(M);
  }
  return Ms;
}

unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

void report_assumptions(const DeviceConfig& cfg, std::ostream& err) {
  for (const auto& a : cfg.assumptions) err << "note: " << a << '\n';
}

// Output goes through a buffer so a failing command leaves no partial file.
void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::InvalidInput, "cannot write " + path);
  f << text;
  if (!f) throw Error(ErrorKind::InvalidInput, "write failed: " + path);
}

struct ModeRow {
  int n = 0;
  Parity parity = Parity::Odd;
  double omega = 0.0;
  double epr = 0.0;
  double K = 0.0;
};

std::vector<ModeRow> solve_modes(const DeviceModel& device, Interval band) {
  std::vector<ModeRow> rows;
  if (band.hi <= 0.0) return rows;
  for (const auto& root : mode_frequencies(device, two_pi * band.lo, two_pi * band.hi)) {
    const ModeSolution mode = mode_profile(device, root);
    const KerrReport kerr = self_kerr_numeric(device, mode);
    rows.push_back({root.n, root.parity, root.omega, mode.epr, kerr.K});
  }
  return rows;
}

DeviceModel with_flux(DeviceModel device, const std::optional<double>& flux) {
  if (flux) {
    device.array.flux_frac = *flux;
    device.validate();
  }
  return device;
}

// ---- sweep-m ---------------------------------------------------------------

struct SweepOptions {
  std::string config, out, band = "0:20e9", m_range = "2:2000:40";
  std::optional<double> op_freq, flux;
  unsigned threads = default_threads();
};

int cmd_sweep_m(const SweepOptions& o, std::ostream& out, std::ostream& err) {
  const DeviceConfig cfg = load_config(o.config);
  report_assumptions(cfg, err);
  const DeviceModel base = with_flux(cfg.device, o.flux);
  const Interval band = parse_band(o.band);
  const std::vector<int> Ms = parse_m_range(o.m_range);

  double omega_op = 0.0;
  if (o.op_freq) {
    if (!(*o.op_freq > 0.0)) throw Error(ErrorKind::InvalidInput, "--op-freq must be positive");
    omega_op = two_pi * *o.op_freq;
  } else if (cfg.fundamental_Hz) {
    omega_op = two_pi * *cfg.fundamental_Hz;
  } else {
    omega_op = branch_frequency(base, Parity::Odd, 0);
  }

  auto device_for = [&](int M) {
    DeviceModel d = base;
    d.array.M = M;
    try {
      d.resonator.d_r = resonator_length_for(omega_op, d.array, d.resonator.Z_c, d.resonator.v_r);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoPositiveLength) throw;
      d.resonator.d_r = 0.0;
    }
    return d;
  };

  // Per-cell participation of the single-cell device sets the region scale.
  const DeviceModel single = device_for(1);
  const double p_J =
      mode_profile(single, branch_frequency(single, Parity::Odd, 0), Parity::Odd).epr;

  struct Point {
    DeviceModel device;
    Region region = Region::I;
    std::vector<ModeRow> modes;
  };
  std::vector<Point> points(Ms.size());
  parallel_for(Ms.size(), o.threads, [&](std::size_t i) {
    Point& p = points[i];
    p.device = device_for(Ms[i]);
    const ModeSolution fundamental =
        mode_profile(p.device, branch_frequency(p.device, Parity::Odd, 0), Parity::Odd);
    p.region = classify_region(fundamental.epr / Ms[i], p_J, Ms[i], p.device.resonator.d_r == 0.0);
    p.modes = solve_modes(p.device, band);
  });

  std::ostringstream buf;
  CsvWriter csv(buf, {"M", "d_r_m", "mode_n", "freq_Hz", "kerr_Hz", "epr", "epr_per_cell", "region_label"});
  for (std::size_t i = 0; i < Ms.size(); ++i) {
    for (const auto& m : points[i].modes) {
      csv.field(Ms[i])
          .field(points[i].device.resonator.d_r)
          .field(m.n)
          .field(m.omega / two_pi)
          .field(m.K / two_pi)
          .field(m.epr)
          .field(m.epr / Ms[i])
          .field(to_string(points[i].region));
      csv.end_row();
    }
  }
  emit(buf.str(), o.out, out);
  return kOk;
}

// ---- modes -----------------------------------------------------------------

struct ModesOptions {
  std::string config, out, band = "0:20e9";
  std::optional<double> flux;
};

int cmd_modes(const ModesOptions& o, std::ostream& out, std::ostream& err) {
  const DeviceConfig cfg = load_config(o.config);
  report_assumptions(cfg, err);
  const DeviceModel device = with_flux(cfg.device, o.flux);
  const auto rows = solve_modes(device, parse_band(o.band));

  std::ostringstream buf;
  CsvWriter csv(buf, {"n", "parity", "freq_Hz", "epr", "kerr_Hz"});
  for (const auto& m : rows) {
    csv.field(m.n).field(to_string(m.parity)).field(m.omega / two_pi).field(m.epr).field(m.K / two_pi);
    csv.end_row();
  }
  emit(buf.str(), o.out, out);
  return kOk;
}

// ---- flux-map --------------------------------------------------------------

struct FluxMapOptions {
  std::string config, out, summary, band = "4e9:12e9";
  double step = 10e6;
  std::string tolerance = "10e6";
  unsigned threads = default_threads();
};

std::string gap_summary(const CoverageMap& map) {
  auto intervals = [](const std::vector<Interval>& v) {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (const auto& iv : v) a.push_back({iv.lo / two_pi, iv.hi / two_pi});
    return a;
  };
  nlohmann::ordered_json j;
  j["band_Hz"] = {map.band.lo / two_pi, map.band.hi / two_pi};
  j["step_Hz"] = map.step / two_pi;
  j["tolerance_Hz"] = std::isfinite(map.tolerance) ? nlohmann::ordered_json(map.tolerance / two_pi)
                                                   : nlohmann::ordered_json("inf");
  j["coverage_fraction"] = map.coverage_fraction();
  j["covered_width_Hz"] = map.covered_width() / two_pi;
  j["gap_width_Hz"] = map.gap_width() / two_pi;
  j["gap_count"] = map.gaps.size();
  j["gaps_Hz"] = intervals(map.gaps);
  return j.dump(2) + "\n";
}

int cmd_flux_map(const FluxMapOptions& o, std::ostream& out, std::ostream& err) {
  const DeviceConfig cfg = load_config(o.config);
  report_assumptions(cfg, err);
  const Interval band_Hz = parse_band(o.band);
  if (!(band_Hz.hi > band_Hz.lo)) throw Error(ErrorKind::InvalidInput, "--band must have positive width");
  if (!(o.step > 0.0)) throw Error(ErrorKind::InvalidInput, "--step must be positive");
  const double tol = parse_number(o.tolerance, "--tolerance");
  if (!(tol >= 0.0)) throw Error(ErrorKind::InvalidInput, "--tolerance must be non-negative");

  const CoverageMap map = coverage_map(cfg.device, {two_pi * band_Hz.lo, two_pi * band_Hz.hi}, two_pi * o.step,
                                       two_pi * tol, o.threads);

  std::ostringstream buf;
  CsvWriter csv(buf, {"target_Hz", "covered", "flux_frac", "parity", "level", "freq_Hz", "miss_Hz"});
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& e : map.entries) {
    csv.field(e.target / two_pi);
    if (e.match) {
      csv.field(1).field(e.match->flux_frac).field(to_string(e.match->branch.parity)).field(e.match->branch.level);
      csv.field(e.match->omega / two_pi).field(std::abs(e.match->omega - e.target) / two_pi);
    } else {
      csv.field(0).field(nan).field("").field(-1).field(nan).field(nan);
    }
    csv.end_row();
  }
  emit(buf.str(), o.out, out);

  std::string summary_path = o.summary;
  if (summary_path.empty() && !o.out.empty()) summary_path = o.out + ".gaps.json";
  if (!summary_path.empty()) emit(gap_summary(map), summary_path, out);
  return kOk;
}

// ---- noise-fit -------------------------------------------------------------

struct NoiseOptions {
  std::string input, nvr, out;
  double temperature = 0.0, bandwidth = 0.0;
  std::optional<double> eta, v_threshold;
  double max_residual = 1e-2;
  unsigned threads = default_threads();
};

int cmd_noise_fit(const NoiseOptions& o, std::ostream& out, std::ostream& err) {
  const CsvTable table = read_csv_file(o.input, {"freq_Hz", "bias_V", "power_W"});
  if (o.eta && !(*o.eta > 0.0 && *o.eta <= 1.0)) throw Error(ErrorKind::InvalidInput, "--eta must lie in (0, 1]");

  // Group by exact frequency value, ascending.
  std::map<double, std::vector<BiasSample>> groups;
  for (const auto& row : table.rows) {
    if (!(row[0] > 0.0)) throw Error(ErrorKind::InvalidInput, o.input + ": freq_Hz must be positive");
    groups[row[0]].push_back({row[1], row[2]});
  }

  // Amplifier on/off ratio with the amplifier gain, per frequency.
  std::map<double, std::pair<double, double>> nvr;
  if (!o.nvr.empty()) {
    const CsvTable t = read_csv_file(o.nvr, {"freq_Hz", "nvr", "gain_dB"});
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      if (!nvr.emplace(t.rows[i][0], std::make_pair(t.rows[i][1], std::pow(10.0, t.rows[i][2] / 10.0))).second) {
        throw Error(ErrorKind::InvalidInput,
                    o.nvr + ":" + std::to_string(t.lines[i]) + ": duplicate freq_Hz " + format_number(t.rows[i][0]));
      }
    }
  }

  std::vector<FrequencySamples> data;
  for (auto& [f, samples] : groups) data.push_back({two_pi * f, std::move(samples)});

  struct Result {
    std::optional<NoiseRecord> rec;
    std::string rejected;
  };
  std::vector<Result> results(data.size());
  parallel_for(data.size(), o.threads, [&](std::size_t i) {
    try {
      NoiseRecord rec = fit_system_noise(data[i].samples, o.temperature, o.bandwidth, data[i].omega, o.v_threshold);
      if (rec.residual > o.max_residual) {
        results[i].rejected = "residual " + format_number(rec.residual) + " above --max-residual";
      } else {
        results[i].rec = rec;
      }
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::InvalidInput) throw;
      results[i].rejected = e.what();
    }
  });

  std::ostringstream buf;
  CsvWriter csv(buf, {"freq_Hz", "G_sys_dB", "T_sys_K", "T_N_K", "residual"});
  std::size_t written = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double f = data[i].omega / two_pi;
    if (!results[i].rec) {
      err << "warning: " << format_number(f) << " Hz rejected: " << results[i].rejected << '\n';
      continue;
    }
    NoiseRecord rec = *results[i].rec;
    if (o.eta) {
      const SystemNoise c = bias_tee_correction(rec.G_sys, rec.T_sys, *o.eta, rec.omega);
      rec.G_sys = c.G_sys;
      rec.T_sys = c.T_sys;
    }
    double T_N = std::numeric_limits<double>::quiet_NaN();
    if (auto it = nvr.find(f); it != nvr.end()) {
      try {
        T_N = nvr_to_noise_temp(it->second.first, it->second.second, rec.T_sys, rec.omega);
      } catch (const Error& e) {
        err << "warning: " << format_number(f) << " Hz: " << e.what() << '\n';
      }
    }
    csv.field(f).field(10.0 * std::log10(rec.G_sys)).field(rec.T_sys).field(T_N).field(rec.residual);
    csv.end_row();
    ++written;
  }
  if (written == 0 && !data.empty()) throw Error(ErrorKind::SolverFailure, "no frequency produced a valid fit");
  emit(buf.str(), o.out, out);
  return kOk;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput:
    case ErrorKind::FrequencyAbovePlasma:
    case ErrorKind::NoMinimum:
      return kInputError;
    default:
      return kSolverFailure;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mode, Kerr and coverage calculations for SNAIL-array resonators"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "jampa 0.1.0");

  auto threads_check = CLI::Range(1u, 1024u);

  SweepOptions sweep;
  auto* s = app.add_subcommand("sweep-m", "Fixed-fundamental sweep over array size");
  s->add_option("--config", sweep.config, "device config (JSON)")->required();
  s->add_option("--m-range", sweep.m_range, "lo:hi:count, log-spaced integers")->capture_default_str();
  s->add_option("--op-freq", sweep.op_freq, "fundamental held fixed, Hz (default: from config)");
  s->add_option("--band", sweep.band, "lo:hi, Hz; modes reported per M")->capture_default_str();
  s->add_option("--flux", sweep.flux, "flux bias Phi/Phi0 (default: from config)");
  s->add_option("--threads", sweep.threads, "worker threads")->check(threads_check);
  s->add_option("--out", sweep.out, "output CSV (default: stdout)");

  ModesOptions modes;
  auto* m = app.add_subcommand("modes", "Eigenmodes of one device in a band");
  m->add_option("--config", modes.config, "device config (JSON)")->required();
  m->add_option("--band", modes.band, "lo:hi, Hz")->capture_default_str();
  m->add_option("--flux", modes.flux, "flux bias Phi/Phi0 (default: from config)");
  m->add_option("--out", modes.out, "output CSV (default: stdout)");

  FluxMapOptions fmap;
  auto* f = app.add_subcommand("flux-map", "Flux-tuning coverage of a band");
  f->add_option("--config", fmap.config, "device config (JSON)")->required();
  f->add_option("--band", fmap.band, "lo:hi, Hz")->capture_default_str();
  f->add_option("--step", fmap.step, "target spacing, Hz")->capture_default_str();
  f->add_option("--tolerance", fmap.tolerance, "allowed miss, Hz, or inf")->capture_default_str();
  f->add_option("--threads", fmap.threads, "worker threads")->check(threads_check);
  f->add_option("--out", fmap.out, "output CSV (default: stdout)");
  f->add_option("--summary", fmap.summary, "gap summary JSON (default: <out>.gaps.json when --out is set)");

  NoiseOptions noise;
  auto* n = app.add_subcommand("noise-fit", "System gain and noise from a shot-noise junction sweep");
  n->add_option("--input", noise.input, "CSV with freq_Hz,bias_V,power_W")->required();
  n->add_option("--temperature", noise.temperature, "junction temperature, K")->required();
  n->add_option("--bandwidth", noise.bandwidth, "resolution bandwidth, Hz")->required();
  n->add_option("--eta", noise.eta, "bias-tee transmission in (0, 1]");
  n->add_option("--v-threshold", noise.v_threshold, "minimum |V| used in the fit, V");
  n->add_option("--max-residual", noise.max_residual, "reject fits above this relative rms residual")
      ->capture_default_str();
  n->add_option("--nvr", noise.nvr, "CSV with freq_Hz,nvr,gain_dB for T_N");
  n->add_option("--threads", noise.threads, "worker threads")->check(threads_check);
  n->add_option("--out", noise.out, "output CSV (default: stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*s) return cmd_sweep_m(sweep, out, err);
    if (*m) return cmd_modes(modes, out, err);
    if (*f) return cmd_flux_map(fmap, out, err);
    return cmd_noise_fit(noise, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kSolverFailure;
  }
}

}  // namespace jampa::cli
