#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fmdiag/aha.hpp"
#include "fmdiag/dsp.hpp"
#include "fmdiag/error.hpp"
#include "fmdiag/fmd.hpp"
#include "fmdiag/indicators.hpp"
#include "fmdiag/model_io.hpp"
#include "fmdiag/pipeline.hpp"
#include "fmdiag/sigsim.hpp"
#include "signal_io.hpp"

namespace fmdiag::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

struct Failure {
  int code;
  std::string message;
};

[[noreturn]] void fail(int code, const std::string& message) { throw Failure{code, message}; }

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::InvalidConfig:
    case ErrorKind::IoError:
      return kExitUsage;
    case ErrorKind::ParseError:
    case ErrorKind::VersionError:
      return kExitModel;
    default:
      return kExitData;
  }
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("FMDIAG_SEED")) {
    try {
      return std::stoull(env);
    } catch (...) {
    }
  }
  return 1;
}

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(kExitUsage, "cannot open " + path.string() + " for writing");
  out << text;
}

// Run report: printed to stdout and optionally written to --report. Timings
// live only here so that data outputs stay byte-identical across runs.
void emit_report(std::ostream& out, const std::string& report_path, json report) {
  const std::string text = report.dump(2) + "\n";
  out << text;
  if (!report_path.empty()) write_text(report_path, text);
}

Signal load_signal(const fs::path& path) {
  if (!fs::exists(path)) fail(kExitUsage, "missing signal file " + path.string());
  try {
    return io::read_signal_csv(path);
  } catch (const Error& e) {
    fail(kExitData, e.what());
  }
}

DiagnosisModel load_model_file(const fs::path& path) {
  if (!fs::exists(path)) fail(kExitUsage, "missing model file " + path.string());
  try {
    return load_model(path);
  } catch (const Error& e) {
    fail(e.kind() == ErrorKind::IoError ? kExitUsage : kExitModel, e.what());
  }
}

// Manifest: {"label": ["a.csv", "b.csv"], ...}; paths relative to the manifest.
std::vector<std::pair<std::string, std::vector<fs::path>>> load_manifest(const fs::path& path) {
  if (!fs::exists(path)) fail(kExitUsage, "missing manifest " + path.string());
  std::ifstream in(path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    fail(kExitUsage, "manifest is not valid JSON: " + std::string(e.what()));
  }
  if (!doc.is_object() || doc.empty()) fail(kExitUsage, "manifest must be a non-empty object of label -> files");
  std::vector<std::pair<std::string, std::vector<fs::path>>> out;
  const fs::path base = path.parent_path();
  for (const auto& [label, files] : doc.items()) {
    if (!files.is_array()) fail(kExitUsage, "manifest entry '" + label + "' must be an array");
    std::vector<fs::path> paths;
    for (const auto& f : files) {
      if (!f.is_string()) fail(kExitUsage, "manifest entry '" + label + "' lists a non-string path");
      fs::path p = f.get<std::string>();
      if (p.is_relative()) p = base / p;
      if (!fs::exists(p)) fail(kExitUsage, "missing signal file " + p.string());
      paths.push_back(p);
    }
    if (paths.empty()) fail(kExitUsage, "manifest entry '" + label + "' lists no files");
    out.emplace_back(label, std::move(paths));
  }
  return out;
}

json aha_json(const AhaConfig& a) {
  return {{"pop_size", a.pop_size}, {"max_iter", a.max_iter}, {"seed", a.seed}};
}

json opt_json(const OptResult& r) {
  return {{"best_position", r.best_position},
          {"best_fitness", r.best_fitness},
          {"history", r.history},
          {"evaluations", r.evaluations}};
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  BearingSimConfig bearing;
  std::optional<double> snr_db;
  std::optional<double> noise_std;
  bool healthy = false;
  std::optional<double> fgn_hurst;
  double fgn_sigma = 1.0;
  std::string out_path;
  std::string report_path;
};

void add_simulate(CLI::App& app, SimulateArgs& a) {
  auto* sub = app.add_subcommand("simulate", "Generate a synthetic bearing or FGN signal as CSV");
  sub->add_option("--fs", a.bearing.sample_rate, "Sample rate [Hz]")->capture_default_str();
  sub->add_option("--duration", a.bearing.duration, "Duration [s]")->capture_default_str();
  sub->add_option("--fault-freq", a.bearing.fault_freq, "Impulse repetition frequency [Hz]")->capture_default_str();
  sub->add_option("--resonance", a.bearing.resonance_freq, "Resonance ring frequency [Hz]")->capture_default_str();
  sub->add_option("--damping", a.bearing.damping, "Impulse decay rate [1/s]")->capture_default_str();
  sub->add_option("--jitter", a.bearing.slip_jitter, "Relative slip jitter of impulse gaps")->capture_default_str();
  sub->add_option("--amplitude", a.bearing.impulse_amplitude, "Impulse amplitude")->capture_default_str();
  sub->add_option("--shaft-freq", a.bearing.shaft_freq, "Shaft tone frequency [Hz]")->capture_default_str();
  sub->add_option("--shaft-amp", a.bearing.shaft_amplitude, "Shaft tone amplitude")->capture_default_str();
  sub->add_option("--snr", a.snr_db, "Impulse-to-noise ratio [dB]");
  sub->add_option("--noise-std", a.noise_std, "Additive noise standard deviation");
  sub->add_flag("--healthy", a.healthy, "Drop the impulses (noise level still follows --snr)");
  sub->add_option("--fgn-hurst", a.fgn_hurst, "Emit fractional Gaussian noise with this Hurst exponent");
  sub->add_option("--fgn-sigma", a.fgn_sigma, "FGN standard deviation")->capture_default_str();
  sub->add_option("--seed", a.bearing.seed, "Random seed");
  sub->add_option("--out", a.out_path, "Output CSV")->required();
  sub->add_option("--report", a.report_path, "Also write the run report here");
}

int cmd_simulate(SimulateArgs& a, std::ostream& out) {
  const auto start = Clock::now();
  if (a.snr_db && a.noise_std) fail(kExitUsage, "--snr and --noise-std are mutually exclusive");
  json report = {{"command", "simulate"}, {"seed", a.bearing.seed}};

  if (a.fgn_hurst) {
    if (!(a.bearing.sample_rate > 0.0) || !(a.bearing.duration > 0.0)) fail(kExitUsage, "--fs and --duration must be positive");
    const auto n = a.bearing.sample_count();
    if (n < 2) fail(kExitUsage, "FGN needs at least two samples");
    const Signal s = simulate_fgn(n, *a.fgn_hurst, a.fgn_sigma, a.bearing.seed, a.bearing.sample_rate);
    io::write_signal_csv(s, a.out_path);
    json stats;
    if (a.fgn_sigma > 0.0) {
      // Zero-mean by construction: lag-1 autocorrelation without mean removal.
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < s.size(); ++i) {
        den += s[i] * s[i];
        if (i + 1 < s.size()) num += s[i] * s[i + 1];
      }
      stats = {{"lag1_autocorrelation", num / den},
               {"lag1_theory", std::pow(2.0, 2.0 * *a.fgn_hurst - 1.0) - 1.0},
               {"variance", den / static_cast<double>(s.size())},
               {"variance_theory", a.fgn_sigma * a.fgn_sigma}};
    }
    report["config"] = {{"mode", "fgn"},
                        {"samples", n},
                        {"sample_rate", a.bearing.sample_rate},
                        {"hurst", *a.fgn_hurst},
                        {"sigma", a.fgn_sigma}};
    report["outputs"] = {{"signal", a.out_path}, {"fgn_statistics", stats}};
  } else {
    BearingSimConfig cfg = a.bearing;
    cfg.validate();
    if (a.noise_std) cfg.noise_std = *a.noise_std;
    if (a.snr_db) cfg.noise_std = noise_std_for_snr(cfg, *a.snr_db);
    if (a.healthy) cfg.impulse_amplitude = 0.0;
    const Signal s = simulate_bearing(cfg);
    io::write_signal_csv(s, a.out_path);
    report["config"] = {{"mode", a.healthy ? "healthy" : "faulty"},
                        {"sample_rate", cfg.sample_rate},
                        {"duration", cfg.duration},
                        {"fault_freq", cfg.fault_freq},
                        {"resonance_freq", cfg.resonance_freq},
                        {"damping", cfg.damping},
                        {"slip_jitter", cfg.slip_jitter},
                        {"impulse_amplitude", cfg.impulse_amplitude},
                        {"shaft_freq", cfg.shaft_freq},
                        {"shaft_amplitude", cfg.shaft_amplitude},
                        {"noise_std", cfg.noise_std},
                        {"snr_db", a.snr_db ? json(*a.snr_db) : json(nullptr)}};
    report["outputs"] = {{"signal", a.out_path}, {"samples", s.size()}};
  }
  report["timings_ms"] = {{"total", elapsed_ms(start)}};
  emit_report(out, a.report_path, report);
  return kExitOk;
}

// ---------------------------------------------------------------- decompose

struct DecomposeArgs {
  std::string input;
  int k = 3;
  int l = 30;
  bool optimize = false;
  bool unsafe = false;
  std::string out_dir;
  int fmd_iters = 20;
  std::optional<int> bank;
  std::size_t pop = 30;
  std::size_t iters = 20;
  std::uint64_t seed = 1;
  std::string report_path;
};

void add_decompose(CLI::App& app, DecomposeArgs& a) {
  auto* sub = app.add_subcommand("decompose", "Decompose a signal into modes");
  sub->add_option("input", a.input, "Signal CSV")->required();
  sub->add_option("--K", a.k, "Mode count")->capture_default_str();
  sub->add_option("--L", a.l, "Filter length")->capture_default_str();
  sub->add_flag("--optimize", a.optimize, "Choose (K, L) with the hummingbird optimizer first");
  sub->add_flag("--unsafe", a.unsafe, "Allow K and L outside [3, 8] x [20, 50]");
  sub->add_option("--out-dir", a.out_dir, "Directory for mode CSVs and summary.json")->required();
  sub->add_option("--fmd-iters", a.fmd_iters, "Filter update sweeps per reduction cycle")->capture_default_str();
  sub->add_option("--bank", a.bank, "Initial filter count M");
  sub->add_option("--pop", a.pop, "Optimizer population")->capture_default_str();
  sub->add_option("--iters", a.iters, "Optimizer iterations")->capture_default_str();
  sub->add_option("--seed", a.seed, "Optimizer seed");
  sub->add_option("--report", a.report_path, "Also write the run report here");
}

int cmd_decompose(DecomposeArgs& a, std::ostream& out) {
  const auto start = Clock::now();
  if (!a.unsafe && (a.k < 3 || a.k > 8 || a.l < 20 || a.l > 50))
    fail(kExitUsage, "K must lie in [3, 8] and L in [20, 50] (use --unsafe to override)");
  const Signal x = load_signal(a.input);
  if (x.size() < 1000) fail(kExitData, "signal has fewer than 1000 samples");

  FeatureSettings settings;
  settings.fmd.max_iter = a.fmd_iters;
  settings.fmd.bank_size = a.bank;
  json summary = {{"input", fs::path(a.input).filename().string()}, {"seed", a.seed}};

  int k = a.k;
  int l = a.l;
  if (a.optimize) {
    TrainConfig tc;
    tc.aha = {a.pop, a.iters, a.seed};
    tc.features = settings;
    tc.k_bounds = {3, 8};
    tc.features.selected_modes = 1;
    tc.weights = {1.0};
    const auto choice = optimize_fmd_params(x, tc);
    k = choice.mode_count;
    l = choice.filter_len;
    summary["optimization"] = {{"aha", aha_json(tc.aha)},
                               {"k_bounds", {tc.k_bounds.lo, tc.k_bounds.hi}},
                               {"l_bounds", {tc.l_bounds.lo, tc.l_bounds.hi}},
                               {"result", opt_json(choice.search)},
                               {"skipped", choice.skipped}};
  }
  if (x.size() < 4 * static_cast<std::size_t>(std::max(l, 1))) fail(kExitData, "signal shorter than 4 L samples");

  FmdConfig cfg = settings.fmd.config(k, l);
  cfg.unchecked_domain = a.unsafe;
  const auto result = fmd_decompose(x, cfg);

  fs::create_directories(a.out_dir);
  json modes = json::array();
  for (std::size_t i = 0; i < result.modes.size(); ++i) {
    const auto& m = result.modes[i];
    const std::string name = "mode_" + std::to_string(i + 1) + ".csv";
    io::write_signal_csv(m.samples, fs::path(a.out_dir) / name);
    json band = nullptr;
    if (m.filter.band()) band = {m.filter.band()->low_hz, m.filter.band()->high_hz};
    modes.push_back({{"file", name},
                     {"period", m.period},
                     {"ck", m.ck},
                     {"simi", simi(m.samples)},
                     {"energy", mode_energy(m.samples)},
                     {"initial_band_hz", band},
                     {"filter", std::vector<double>(m.filter.taps().begin(), m.filter.taps().end())}});
  }
  summary["K"] = k;
  summary["L"] = l;
  summary["config"] = {{"bank_size", cfg.effective_bank_size()},
                       {"max_iter", cfg.max_iter},
                       {"ridge", cfg.ridge},
                       {"min_period_lag", cfg.effective_min_lag()},
                       {"unsafe", a.unsafe}};
  summary["modes"] = modes;
  const fs::path summary_path = fs::path(a.out_dir) / "summary.json";
  write_text(summary_path, summary.dump(2) + "\n");

  json report = {{"command", "decompose"}, {"seed", a.seed}, {"config", summary["config"]}, {"K", k}, {"L", l}};
  report["outputs"] = {{"summary", summary_path.string()}, {"modes", result.modes.size()}};
  report["timings_ms"] = {{"total", elapsed_ms(start)}};
  emit_report(out, a.report_path, report);
  return kExitOk;
}

// ---------------------------------------------------------------- train / diagnose / eval

struct TrainArgs {
  std::string manifest;
  std::string model_out;
  std::size_t pop = 30;
  std::size_t iters = 20;
  std::uint64_t seed = 1;
  int fmd_iters = 20;
  int selected = 4;
  std::vector<double> weights;
  bool concat = false;
  std::string report_path;
};

void add_train(CLI::App& app, TrainArgs& a) {
  auto* sub = app.add_subcommand("train", "Train a diagnosis model from a labeled manifest");
  sub->add_option("--manifest", a.manifest, "JSON manifest: label -> signal files")->required();
  sub->add_option("--out", a.model_out, "Model file to write")->required();
  sub->add_option("--pop", a.pop, "Optimizer population")->capture_default_str();
  sub->add_option("--iters", a.iters, "Optimizer iterations")->capture_default_str();
  sub->add_option("--seed", a.seed, "Master seed");
  sub->add_option("--fmd-iters", a.fmd_iters, "Filter update sweeps per reduction cycle")->capture_default_str();
  sub->add_option("--selected", a.selected, "Modes kept per signal")->capture_default_str();
  sub->add_option("--weights", a.weights, "Per-feature weights (default uniform 1/n)")->delimiter(',');
  sub->add_flag("--concat", a.concat, "Optimize (K, L) on each condition's signals joined together");
  sub->add_option("--report", a.report_path, "Also write the run report here");
}

int cmd_train(TrainArgs& a, std::ostream& out) {
  const auto start = Clock::now();
  const auto manifest = load_manifest(a.manifest);
  std::vector<LabeledSignals> dataset;
  for (const auto& [label, files] : manifest) {
    LabeledSignals ls{label, {}};
    for (const auto& f : files) {
      Signal s = load_signal(f);
      if (s.size() < 1000) fail(kExitData, f.string() + " has fewer than 1000 samples");
      ls.signals.push_back(std::move(s));
    }
    dataset.push_back(std::move(ls));
  }

  TrainConfig cfg;
  cfg.aha = {a.pop, a.iters, a.seed};
  cfg.features.fmd.max_iter = a.fmd_iters;
  cfg.features.selected_modes = a.selected;
  cfg.k_bounds.lo = std::clamp(a.selected, 3, 8);
  cfg.weights = a.weights.empty() ? std::vector<double>(static_cast<std::size_t>(std::max(a.selected, 1)),
                                                        1.0 / std::max(a.selected, 1))
                                  : a.weights;
  cfg.optimize_on_concatenation = a.concat;
  const DiagnosisModel model = train(dataset, cfg);
  save_model(model, fs::path(a.model_out));

  json conds = json::array();
  for (const auto& c : model.conditions)
    conds.push_back({{"label", c.label}, {"K", c.mode_count}, {"L", c.filter_len}, {"simi", c.simi}});
  json report = {{"command", "train"},
                 {"seed", a.seed},
                 {"config",
                  {{"aha", aha_json(cfg.aha)},
                   {"fmd_iters", a.fmd_iters},
                   {"selected_modes", a.selected},
                   {"weights", cfg.weights},
                   {"optimize_on_concatenation", a.concat}}},
                 {"outputs", {{"model", a.model_out}, {"conditions", conds}}},
                 {"timings_ms", {{"total", elapsed_ms(start)}}}};
  emit_report(out, a.report_path, report);
  return kExitOk;
}

struct DiagnoseArgs {
  std::string model;
  std::string input;
};

void add_diagnose(CLI::App& app, DiagnoseArgs& a) {
  auto* sub = app.add_subcommand("diagnose", "Label one signal with a trained model");
  sub->add_option("--model", a.model, "Model file")->required();
  sub->add_option("input", a.input, "Signal CSV")->required();
}

int cmd_diagnose(DiagnoseArgs& a, std::ostream& out) {
  const DiagnosisModel model = load_model_file(a.model);
  const Signal x = load_signal(a.input);
  const Diagnosis d = diagnose(x, model);
  json scores = json::object();
  for (std::size_t i = 0; i < model.conditions.size(); ++i) scores[model.conditions[i].label] = d.scores[i];
  json report = {{"command", "diagnose"}, {"input", a.input}, {"label", d.label}, {"scores", scores}, {"tie", d.tie}};
  out << report.dump(2) << "\n";
  return kExitOk;
}

struct EvalArgs {
  std::string model;
  std::string manifest;
  std::string json_out;
};

void add_eval(CLI::App& app, EvalArgs& a) {
  auto* sub = app.add_subcommand("eval", "Diagnose every manifest entry and print a confusion matrix");
  sub->add_option("--model", a.model, "Model file")->required();
  sub->add_option("--manifest", a.manifest, "JSON manifest: true label -> signal files")->required();
  sub->add_option("--json", a.json_out, "Also write the results as JSON");
}

int cmd_eval(EvalArgs& a, std::ostream& out) {
  const DiagnosisModel model = load_model_file(a.model);
  const auto manifest = load_manifest(a.manifest);

  std::vector<std::string> labels;
  for (const auto& c : model.conditions) labels.push_back(c.label);
  for (const auto& [label, files] : manifest)
    if (std::find(labels.begin(), labels.end(), label) == labels.end()) labels.push_back(label);
  const std::size_t n = labels.size();
  auto index_of = [&](const std::string& l) {
    return static_cast<std::size_t>(std::find(labels.begin(), labels.end(), l) - labels.begin());
  };

  std::vector<std::vector<std::size_t>> confusion(n, std::vector<std::size_t>(n, 0));
  json cases = json::array();
  std::size_t correct = 0;
  std::size_t total = 0;
  for (const auto& [label, files] : manifest) {
    for (const auto& f : files) {
      const Diagnosis d = diagnose(load_signal(f), model);
      ++confusion[index_of(label)][index_of(d.label)];
      correct += d.label == label;
      ++total;
      cases.push_back({{"file", f.filename().string()}, {"truth", label}, {"predicted", d.label}, {"scores", d.scores}});
    }
  }

  std::ostringstream table;
  table.imbue(std::locale::classic());
  table << std::fixed << std::setprecision(1);
  const int w = 14;
  table << std::left << std::setw(w) << "" << "Accuracy (%)\n";
  table << std::setw(w) << "True \\ Pred";
  for (const auto& l : labels) table << std::setw(w) << l;
  table << "Overall accuracy (%)\n";
  json per_class = json::object();
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t row_total = 0;
    for (auto c : confusion[i]) row_total += c;
    table << std::setw(w) << labels[i];
    for (std::size_t j = 0; j < n; ++j) {
      const double pct = row_total ? 100.0 * static_cast<double>(confusion[i][j]) / static_cast<double>(row_total) : 0.0;
      table << std::setw(w) << pct;
    }
    if (i == 0) table << 100.0 * static_cast<double>(correct) / static_cast<double>(std::max<std::size_t>(total, 1));
    table << "\n";
    if (row_total)
      per_class[labels[i]] = 100.0 * static_cast<double>(confusion[i][i]) / static_cast<double>(row_total);
  }
  out << table.str();

  const double overall = 100.0 * static_cast<double>(correct) / static_cast<double>(std::max<std::size_t>(total, 1));
  if (!a.json_out.empty()) {
    json doc = {{"labels", labels},
                {"confusion", confusion},
                {"per_class_accuracy", per_class},
                {"overall_accuracy", overall},
                {"cases", cases}};
    write_text(a.json_out, doc.dump(2) + "\n");
  }
  return kExitOk;
}

// ---------------------------------------------------------------- bench-aha

struct BenchArgs {
  std::string function = "sphere";
  int dims = 5;
  std::size_t iters = 500;
  std::size_t pop = 30;
  int seeds = 10;
  std::uint64_t seed = 1;
  std::string out_path;
};

void add_bench(CLI::App& app, BenchArgs& a) {
  auto* sub = app.add_subcommand("bench-aha", "Convergence traces of the hummingbird optimizer on test functions");
  sub->add_option("--function", a.function, "sphere | rastrigin")->capture_default_str();
  sub->add_option("--dims", a.dims, "Dimension count")->capture_default_str();
  sub->add_option("--iters", a.iters, "Iterations")->capture_default_str();
  sub->add_option("--pop", a.pop, "Population")->capture_default_str();
  sub->add_option("--seeds", a.seeds, "Number of seeds (seed, seed+1, ...)")->capture_default_str();
  sub->add_option("--seed", a.seed, "First seed");
  sub->add_option("--out", a.out_path, "CSV path (default stdout)");
}

int cmd_bench(BenchArgs& a, std::ostream& out) {
  if (a.dims < 1) fail(kExitUsage, "--dims must be at least 1");
  if (a.seeds < 1) fail(kExitUsage, "--seeds must be at least 1");
  Objective f;
  double bound = 5.0;
  if (a.function == "sphere") {
    f = [](std::span<const double> x) {
      double s = 0.0;
      for (double v : x) s += v * v;
      return s;
    };
  } else if (a.function == "rastrigin") {
    bound = 5.12;
    f = [](std::span<const double> x) {
      double s = 10.0 * static_cast<double>(x.size());
      for (double v : x) s += v * v - 10.0 * std::cos(2.0 * 3.141592653589793 * v);
      return s;
    };
  } else {
    fail(kExitUsage, "unknown function '" + a.function + "' (expected sphere or rastrigin)");
  }

  const SearchSpace space(std::vector<DimBounds>(static_cast<std::size_t>(a.dims), {-bound, bound, false}));
  std::ostringstream csv;
  csv << "# function=" << a.function << " dims=" << a.dims << " pop=" << a.pop << " iters=" << a.iters
      << " seeds=" << a.seed << ".." << a.seed + static_cast<std::uint64_t>(a.seeds) - 1 << "\n";
  csv << "seed,iteration,best_fitness\n";
  std::vector<double> finals;
  for (int s = 0; s < a.seeds; ++s) {
    const AhaConfig cfg{a.pop, a.iters, a.seed + static_cast<std::uint64_t>(s)};
    const auto r = aha_minimize(f, space, cfg);
    for (std::size_t it = 0; it < r.history.size(); ++it)
      csv << cfg.seed << ',' << it + 1 << ',' << io::format_double(r.history[it]) << '\n';
    finals.push_back(r.best_fitness);
  }
  std::sort(finals.begin(), finals.end());
  const std::size_t k = finals.size();
  const double median = k % 2 ? finals[k / 2] : 0.5 * (finals[k / 2 - 1] + finals[k / 2]);
  csv << "summary,median_final," << io::format_double(median) << '\n';

  if (a.out_path.empty()) out << csv.str();
  else write_text(a.out_path, csv.str());
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bearing fault diagnosis by adaptive feature mode decomposition"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "fmdiag 1.0");

  const std::uint64_t seed = default_seed();
  SimulateArgs sim;
  sim.bearing.seed = seed;
  DecomposeArgs dec;
  dec.seed = seed;
  TrainArgs tr;
  tr.seed = seed;
  DiagnoseArgs dia;
  EvalArgs ev;
  BenchArgs bench;
  bench.seed = seed;
  add_simulate(app, sim);
  add_decompose(app, dec);
  add_train(app, tr);
  add_diagnose(app, dia);
  add_eval(app, ev);
  add_bench(app, bench);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << app.version() << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "simulate") return cmd_simulate(sim, out);
    if (name == "decompose") return cmd_decompose(dec, out);
    if (name == "train") return cmd_train(tr, out);
    if (name == "diagnose") return cmd_diagnose(dia, out);
    if (name == "eval") return cmd_eval(ev, out);
    if (name == "bench-aha") return cmd_bench(bench, out);
  } catch (const Failure& f) {
    err << "error: " << f.message << "\n";
    return f.code;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace fmdiag::cli
