// clipnoise — DCO-OFDM clipping-noise statistics CLI.
//
// Subcommands: kurtosis, hellinger, kl, pdf, beta. Each run writes a CSV
// whose leading `#` comments record the tool version, timestamp and the
// effective configuration, so any output file can be reproduced from its
// own header. Exit status: 0 success, 1 computation error, 2 usage/config/
// I/O error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "clipnoise/csv.hpp"
#include "clipnoise/experiments.hpp"
#include "clipnoise/version.hpp"

namespace {

using nlohmann::ordered_json;

struct Options {
  std::string alpha_grid;
  std::string alpha2_grid;
  double alpha1 = 1.0;
  double alpha2 = 1.0;
  std::size_t n = 1024;
  std::size_t frames = 0;
  std::size_t samples = 0;
  int qam = 16;
  std::uint64_t seed = 1;
  std::size_t bins = 200;
  std::string config_path;
  std::string out;
};

/// Grid syntax: a single value, or "start:stop:step" inclusive of both
/// endpoints within half a step.
std::vector<double> parse_grid(const std::string& text) {
  std::vector<std::string> fields;
  std::string::size_type pos = 0;
  while (true) {
    const auto next = text.find(':', pos);
    fields.push_back(text.substr(pos, next - pos));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  const auto to_double = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("grid '" + text + "': '" + s + "' is not a number");
    }
    if (used != s.size()) {
      throw std::invalid_argument("grid '" + text + "': '" + s + "' is not a number");
    }
    return v;
  };
  if (fields.size() == 1) {
    return {to_double(fields[0])};
  }
  if (fields.size() != 3) {
    throw std::invalid_argument("grid '" + text + "': expected VALUE or START:STOP:STEP");
  }
  const double start = to_double(fields[0]);
  const double stop = to_double(fields[1]);
  const double step = to_double(fields[2]);
  if (!(step > 0.0)) {
    throw std::invalid_argument("grid '" + text + "': step must be positive");
  }
  if (stop < start - 0.5 * step) {
    throw std::invalid_argument("grid '" + text + "': stop is below start");
  }
  std::vector<double> grid;
  for (std::size_t k = 0;; ++k) {
    const double v = start + static_cast<double>(k) * step;
    if (v > stop + 0.5 * step) break;
    grid.push_back(v);
  }
  return grid;
}

struct OptionRefs {
  CLI::Option* alpha_grid = nullptr;
  CLI::Option* alpha2_grid = nullptr;
  CLI::Option* alpha1 = nullptr;
  CLI::Option* alpha2 = nullptr;
  CLI::Option* n = nullptr;
  CLI::Option* frames = nullptr;
  CLI::Option* samples = nullptr;
  CLI::Option* qam = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* bins = nullptr;
  CLI::Option* out = nullptr;
};

OptionRefs add_common_options(CLI::App& sub, Options& opt) {
  OptionRefs refs;
  refs.alpha_grid =
      sub.add_option("--alpha-grid", opt.alpha_grid, "alpha1 grid (VALUE or START:STOP:STEP)");
  refs.alpha2_grid =
      sub.add_option("--alpha2-grid", opt.alpha2_grid, "alpha2 grid (VALUE or START:STOP:STEP)");
  refs.alpha1 = sub.add_option("--alpha1", opt.alpha1, "lower clipping bound / sigma");
  refs.alpha2 = sub.add_option("--alpha2", opt.alpha2, "upper clipping bound / sigma");
  refs.n = sub.add_option("--n", opt.n, "IFFT size (power of two >= 64)");
  refs.frames = sub.add_option("--frames", opt.frames, "OFDM frames per grid point");
  refs.samples =
      sub.add_option("--samples", opt.samples, "time-domain samples per grid point (ceil to frames)");
  refs.qam = sub.add_option("--qam", opt.qam, "QAM order (4, 16, 64, 256)");
  refs.seed = sub.add_option("--seed", opt.seed, "64-bit RNG seed");
  refs.bins = sub.add_option("--bins", opt.bins, "histogram bins");
  sub.add_option("--config", opt.config_path, "JSON config file (flags win over file values)");
  refs.out = sub.add_option("--out", opt.out, "output CSV path");
  return refs;
}

bool provided(const CLI::Option* opt) { return opt != nullptr && opt->count() > 0; }

/// Tracks, per option, whether the effective value came from a flag or the
/// config file. Flags win over config values; config values win over
/// defaults.
struct Provenance {
  bool alpha2 = false;
  bool alpha2_grid = false;
  bool frames = false;
  bool samples = false;
};

/// Applies config-file values to options the command line left untouched.
/// Keys are the snake_case forms of the flag names.
void merge_config_file(const std::string& path, Options& opt, const OptionRefs& refs,
                       Provenance& from) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("config file '" + path + "' cannot be opened");
  }
  ordered_json doc;
  try {
    doc = ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("config file '" + path + "': " + e.what());
  }
  if (!doc.is_object()) {
    throw std::invalid_argument("config file '" + path + "': top level must be an object");
  }
  const auto unset = [](const CLI::Option* o) { return o == nullptr || o->count() == 0; };
  const auto grid_text = [&](const ordered_json& v, const std::string& key) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number()) return v.dump();
    throw std::invalid_argument("config key '" + key + "' must be a string or number");
  };
  for (const auto& [key, value] : doc.items()) {
    try {
      if (key == "alpha_grid") {
        if (unset(refs.alpha_grid)) opt.alpha_grid = grid_text(value, key);
      } else if (key == "alpha2_grid") {
        if (unset(refs.alpha2_grid)) {
          opt.alpha2_grid = grid_text(value, key);
          from.alpha2_grid = true;
        }
      } else if (key == "alpha1") {
        if (unset(refs.alpha1)) opt.alpha1 = value.get<double>();
      } else if (key == "alpha2") {
        if (unset(refs.alpha2)) {
          opt.alpha2 = value.get<double>();
          from.alpha2 = true;
        }
      } else if (key == "n") {
        if (unset(refs.n)) opt.n = value.get<std::size_t>();
      } else if (key == "frames") {
        if (unset(refs.frames)) {
          opt.frames = value.get<std::size_t>();
          from.frames = true;
        }
      } else if (key == "samples") {
        if (unset(refs.samples)) {
          opt.samples = value.get<std::size_t>();
          from.samples = true;
        }
      } else if (key == "qam") {
        if (unset(refs.qam)) opt.qam = value.get<int>();
      } else if (key == "seed") {
        if (unset(refs.seed)) opt.seed = value.get<std::uint64_t>();
      } else if (key == "bins") {
        if (unset(refs.bins)) opt.bins = value.get<std::size_t>();
      } else if (key == "out") {
        if (unset(refs.out)) opt.out = value.get<std::string>();
      } else {
        throw std::invalid_argument("config file '" + path + "': unknown key '" + key + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument("config key '" + key + "': " + e.what());
    }
  }
}

std::size_t resolve_frames(const Options& opt, const OptionRefs& refs, const Provenance& from) {
  const bool frames_flag = provided(refs.frames);
  const bool samples_flag = provided(refs.samples);
  if (frames_flag && samples_flag) {
    throw std::invalid_argument("specify either --frames or --samples, not both");
  }
  // A flag silences the other key's config value; two config values clash.
  bool use_frames = frames_flag;
  bool use_samples = samples_flag;
  if (!frames_flag && !samples_flag) {
    if (from.frames && from.samples) {
      throw std::invalid_argument("config file sets both 'frames' and 'samples'");
    }
    use_frames = from.frames;
    use_samples = from.samples;
  }
  if (use_frames) {
    if (opt.frames < 1) throw std::invalid_argument("--frames must be >= 1");
    return opt.frames;
  }
  const std::size_t samples = use_samples ? opt.samples : 1000000;
  if (samples < 1) throw std::invalid_argument("--samples must be >= 1");
  return (samples + opt.n - 1) / opt.n;  // ceil
}

ordered_json spec_json(const clipnoise::SweepSpec& spec, const std::string& command) {
  ordered_json j;
  j["command"] = command;
  j["alpha1_grid"] = spec.alpha1_grid;
  if (spec.alpha2_grid.empty()) {
    j["alpha2_grid"] = "diagonal";
  } else {
    j["alpha2_grid"] = spec.alpha2_grid;
  }
  j["n"] = spec.n;
  j["frames"] = spec.frames;
  j["samples_per_point"] = spec.samples_per_point();
  j["qam"] = spec.qam_order;
  j["seed"] = spec.seed;
  j["bins"] = spec.bins;
  return j;
}

std::vector<std::string> csv_comments(const ordered_json& config, std::uint64_t seed) {
  using clipnoise::kToolName;
  using clipnoise::kToolVersion;
  return {
      std::string(kToolName) + " " + std::string(kToolVersion),
      "generated: " + clipnoise::utc_timestamp(),
      "config: " + config.dump(),
      "seed: " + std::to_string(seed),
  };
}

void write_sweep_csv(const std::string& out, const clipnoise::SweepResult& result,
                     const ordered_json& config) {
  clipnoise::CsvDocument doc;
  doc.comments = csv_comments(config, result.meta.seed);
  doc.columns = {"alpha1", "alpha2"};
  doc.columns.insert(doc.columns.end(), result.columns.begin(), result.columns.end());
  std::size_t flagged = 0;
  for (const auto& row : result.rows) {
    std::vector<double> r = {row.alpha1, row.alpha2};
    r.insert(r.end(), row.values.begin(), row.values.end());
    doc.rows.push_back(std::move(r));
    if (row.flagged) ++flagged;
  }
  clipnoise::write_csv(out, doc);
  if (flagged > 0) {
    std::cerr << "warning: " << flagged
              << " grid point(s) had an undefined divergence; rows kept with nan values\n";
  }
}

int run_cli(int argc, char** argv) {
  CLI::App app{"DCO-OFDM clipping-noise statistics: transmitter-chain simulation, "
               "closed-form noise model, and model-vs-simulation distance sweeps. "
               "CLIPNOISE_THREADS caps sweep parallelism (0 or unset = auto)."};
  app.require_subcommand(1);

  Options opt;

  auto* kurtosis_cmd =
      app.add_subcommand("kurtosis", "kurtosis of the clipped signal over an alpha grid");
  auto kurtosis_refs = add_common_options(*kurtosis_cmd, opt);

  auto* hellinger_cmd = app.add_subcommand(
      "hellinger", "Hellinger distance of empirical noise pdf vs analytic pdf and Gaussian fit");
  auto hellinger_refs = add_common_options(*hellinger_cmd, opt);

  auto* kl_cmd = app.add_subcommand(
      "kl", "KL divergence of empirical noise pdf vs analytic pdf and Gaussian fit");
  auto kl_refs = add_common_options(*kl_cmd, opt);

  auto* pdf_cmd =
      app.add_subcommand("pdf", "per-bin overlay of empirical, analytic and Gaussian-fit pdfs");
  auto pdf_refs = add_common_options(*pdf_cmd, opt);

  auto* beta_cmd = app.add_subcommand("beta", "analytic vs empirical attenuation factor");
  auto beta_refs = add_common_options(*beta_cmd, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  CLI::App* active = app.get_subcommands().front();
  const std::string command = active->get_name();
  const OptionRefs& refs = command == "kurtosis"    ? kurtosis_refs
                           : command == "hellinger" ? hellinger_refs
                           : command == "kl"        ? kl_refs
                           : command == "pdf"       ? pdf_refs
                                                    : beta_refs;

  Provenance from;
  if (!opt.config_path.empty()) {
    merge_config_file(opt.config_path, opt, refs, from);
  }

  using namespace clipnoise;

  SweepSpec spec;
  spec.n = opt.n;
  spec.qam_order = opt.qam;
  spec.seed = opt.seed;
  spec.bins = opt.bins;
  spec.frames = resolve_frames(opt, refs, from);

  if (opt.out.empty() && command != "beta") {
    std::cerr << "error: --out is required for '" << command << "'\n";
    return 2;
  }

  if (command == "kurtosis") {
    spec.alpha1_grid = parse_grid(opt.alpha_grid.empty() ? "0.5:5:0.5" : opt.alpha_grid);
    if (!opt.alpha2_grid.empty()) spec.alpha2_grid = parse_grid(opt.alpha2_grid);
    const auto result = kurtosis_sweep(spec);
    write_sweep_csv(opt.out, result, spec_json(spec, command));
    return 0;
  }

  if (command == "hellinger" || command == "kl") {
    spec.alpha1_grid = parse_grid(opt.alpha_grid.empty() ? "0.5:5:0.5" : opt.alpha_grid);
    const bool alpha2_grid_flag = provided(refs.alpha2_grid);
    const bool alpha2_flag = provided(refs.alpha2);
    if (alpha2_grid_flag && alpha2_flag) {
      throw std::invalid_argument("specify either --alpha2 or --alpha2-grid, not both");
    }
    if (!alpha2_grid_flag && !alpha2_flag && from.alpha2_grid && from.alpha2) {
      throw std::invalid_argument("config file sets both 'alpha2' and 'alpha2_grid'");
    }
    if (alpha2_grid_flag || (!alpha2_flag && from.alpha2_grid)) {
      spec.alpha2_grid = parse_grid(opt.alpha2_grid);
    } else if (alpha2_flag || from.alpha2) {
      spec.alpha2_grid = {opt.alpha2};
    } else {
      spec.alpha2_grid = {2.0, 3.0};
    }
    const auto metric =
        command == "hellinger" ? DistanceMetric::hellinger : DistanceMetric::kl;
    const auto result = distance_sweep(spec, metric);
    write_sweep_csv(opt.out, result, spec_json(spec, command));
    return 0;
  }

  if (command == "pdf") {
    spec.alpha1_grid = {opt.alpha1};
    spec.alpha2_grid = {opt.alpha2};
    const auto table = pdf_overlay(opt.alpha1, opt.alpha2, spec);
    ordered_json config = spec_json(spec, command);
    config["alpha1"] = opt.alpha1;
    config["alpha2"] = opt.alpha2;
    CsvDocument doc;
    doc.comments = csv_comments(config, spec.seed);
    doc.columns = {"z", "q_empirical", "g1_analytic", "g2_gaussfit"};
    for (std::size_t i = 0; i < table.z.size(); ++i) {
      doc.rows.push_back(
          {table.z[i], table.q_empirical[i], table.g1_analytic[i], table.g2_gaussfit[i]});
    }
    write_csv(opt.out, doc);
    return 0;
  }

  // beta
  {
    spec.alpha1_grid = {opt.alpha1};
    spec.alpha2_grid = {opt.alpha2};
    spec.validate(false);
    const double sigma_x =
        std::sqrt(static_cast<double>(spec.n - 2) / static_cast<double>(spec.n));
    const auto cfg = ClipConfig::make(opt.alpha1, opt.alpha2, sigma_x);
    const double analytic = beta_analytic(cfg);
    FrameGenerator generator(spec.n, QamConstellation::make(spec.qam_order),
                             detail::point_seed(spec.seed, opt.alpha1, opt.alpha2));
    std::vector<double> x;
    std::vector<double> xc;
    x.reserve(spec.samples_per_point());
    xc.reserve(spec.samples_per_point());
    for (std::size_t i = 0; i < spec.frames; ++i) {
      const TimeFrame frame = generator.frame(i);
      const ClippedFrame clipped = clip_frame(frame, cfg);
      x.insert(x.end(), frame.samples.begin(), frame.samples.end());
      xc.insert(xc.end(), clipped.samples.begin(), clipped.samples.end());
    }
    const double empirical = beta_empirical(x, xc);
    std::printf("alpha1=%s alpha2=%s beta_analytic=%.12f beta_empirical=%.12f\n",
                format_double(opt.alpha1).c_str(), format_double(opt.alpha2).c_str(), analytic,
                empirical);
    if (!opt.out.empty()) {
      CsvDocument doc;
      doc.comments = csv_comments(spec_json(spec, command), spec.seed);
      doc.columns = {"alpha1", "alpha2", "beta_analytic", "beta_empirical"};
      doc.rows.push_back({opt.alpha1, opt.alpha2, analytic, empirical});
      write_csv(opt.out, doc);
    }
    return 0;
  }
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
