#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <clocale>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include "cli.hpp"
#include "fmdiag/error.hpp"
#include "signal_io.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome fmdiag_run(std::vector<std::string> args) {
  args.insert(args.begin(), "fmdiag");
  std::ostringstream out, err;
  const int code = fmdiag::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

const fs::path kScratchRoot = fs::temp_directory_path() / ("fmdiag_cli_test_" + std::to_string(::getpid()));
struct ScratchCleanup {
  ~ScratchCleanup() { fs::remove_all(kScratchRoot); }
} cleanup;

fs::path scratch(const std::string& name) {
  const fs::path dir = kScratchRoot / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

// Two-class training set of half-second signals.
fs::path make_dataset(const fs::path& dir) {
  json manifest = json::object();
  for (int i = 0; i < 4; ++i) {
    const std::string h = "healthy_" + std::to_string(i) + ".csv";
    const std::string f = "faulty_" + std::to_string(i) + ".csv";
    REQUIRE(fmdiag_run({"simulate", "--duration", "0.5", "--snr", "0", "--healthy", "--seed",
                        std::to_string(10 + i), "--out", (dir / h).string()})
                .code == 0);
    REQUIRE(fmdiag_run({"simulate", "--duration", "0.5", "--snr", "0", "--seed", std::to_string(20 + i), "--out",
                        (dir / f).string()})
                .code == 0);
    manifest["healthy"].push_back(h);
    manifest["faulty"].push_back(f);
  }
  write(dir / "manifest.json", manifest.dump());
  return dir / "manifest.json";
}

const std::vector<std::string> kQuickTrain{"--pop", "4", "--iters", "2", "--fmd-iters", "5"};

std::vector<std::string> train_args(const fs::path& manifest, const fs::path& model) {
  std::vector<std::string> a{"train", "--manifest", manifest.string(), "--out", model.string()};
  a.insert(a.end(), kQuickTrain.begin(), kQuickTrain.end());
  return a;
}

}  // namespace

TEST_CASE("usage") {
  CHECK(fmdiag_run({}).code == 2);
  CHECK(fmdiag_run({"frobnicate"}).code == 2);
  const auto help = fmdiag_run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("decompose") != std::string::npos);
  CHECK(fmdiag_run({"--version"}).code == 0);
  CHECK(fmdiag_run({"simulate"}).code == 2);
}

TEST_CASE("installed binary") {
  const fs::path dir = scratch("binary");
  const std::string bin = FMDIAG_BINARY;
  const auto sh = [&](const std::string& args) {
    const int status = std::system((bin + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  CHECK(sh("--version") == 0);
  CHECK(sh("simulate --duration 0 --out " + (dir / "x.csv").string()) == 2);
  CHECK(sh("simulate --duration 0.1 --seed 3 --out " + (dir / "x.csv").string()) == 0);
  CHECK(fs::exists(dir / "x.csv"));
}

TEST_CASE("simulate") {
  const fs::path dir = scratch("simulate");
  const auto a = fmdiag_run({"simulate", "--seed", "7", "--out", (dir / "a.csv").string()});
  REQUIRE(a.code == 0);
  const auto sig = fmdiag::io::read_signal_csv(dir / "a.csv");
  CHECK(sig.size() == 48000);
  CHECK(sig.sample_rate() == 19200.0);
  CHECK(json::parse(a.out)["command"] == "simulate");

  REQUIRE(fmdiag_run({"simulate", "--seed", "7", "--out", (dir / "b.csv").string()}).code == 0);
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
  REQUIRE(fmdiag_run({"simulate", "--seed", "8", "--out", (dir / "c.csv").string()}).code == 0);
  CHECK(slurp(dir / "a.csv") != slurp(dir / "c.csv"));

  CHECK(fmdiag_run({"simulate", "--duration", "0", "--out", (dir / "d.csv").string()}).code == 2);
  CHECK(fmdiag_run({"simulate", "--snr", "0", "--noise-std", "1", "--out", (dir / "d.csv").string()}).code == 2);
  CHECK(fmdiag_run({"simulate", "--fgn-hurst", "1.5", "--out", (dir / "d.csv").string()}).code == 2);
  CHECK_FALSE(fs::exists(dir / "d.csv"));

  const auto fgn = fmdiag_run({"simulate", "--fgn-hurst", "0.9", "--duration", "0.1", "--seed", "1", "--report",
                               (dir / "fgn.json").string(), "--out", (dir / "fgn.csv").string()});
  REQUIRE(fgn.code == 0);
  CHECK(fmdiag::io::read_signal_csv(dir / "fgn.csv").size() == 1920);
  CHECK(slurp(dir / "fgn.json") == fgn.out);
}

TEST_CASE("decompose") {
  const fs::path dir = scratch("decompose");
  REQUIRE(fmdiag_run({"simulate", "--duration", "0.5", "--seed", "2", "--out", (dir / "x.csv").string()}).code == 0);
  const std::string x = (dir / "x.csv").string();

  CHECK(fmdiag_run({"decompose", x, "--K", "9", "--out-dir", (dir / "bad").string()}).code == 2);
  CHECK(fmdiag_run({"decompose", x, "--L", "19", "--out-dir", (dir / "bad").string()}).code == 2);
  CHECK(fmdiag_run({"decompose", (dir / "nope.csv").string(), "--out-dir", (dir / "bad").string()}).code == 2);
  CHECK_FALSE(fs::exists(dir / "bad"));

  const auto run_fixed = [&](const std::string& out) {
    return fmdiag_run({"decompose", x, "--K", "3", "--L", "30", "--fmd-iters", "5", "--out-dir", (dir / out).string()});
  };
  REQUIRE(run_fixed("a").code == 0);
  REQUIRE(run_fixed("b").code == 0);
  CHECK(slurp(dir / "a/summary.json") == slurp(dir / "b/summary.json"));
  for (int i = 1; i <= 3; ++i) {
    const std::string m = "mode_" + std::to_string(i) + ".csv";
    CHECK(fs::exists(dir / "a" / m));
    CHECK(slurp(dir / "a" / m) == slurp(dir / "b" / m));
    CHECK(fmdiag::io::read_signal_csv(dir / "a" / m).size() == 9600 - 29);
  }
  const auto summary = json::parse(slurp(dir / "a/summary.json"));
  CHECK(summary["K"] == 3);
  CHECK(summary["L"] == 30);
  CHECK(summary["modes"].size() == 3);
  CHECK(summary["modes"][0]["filter"].size() == 30);

  const auto opt = fmdiag_run({"decompose", x, "--optimize", "--pop", "4", "--iters", "2", "--fmd-iters", "5",
                               "--out-dir", (dir / "opt").string()});
  REQUIRE(opt.code == 0);
  const auto os = json::parse(slurp(dir / "opt/summary.json"));
  CHECK(os["K"] >= 3);
  CHECK(os["K"] <= 8);
  CHECK(os["L"] >= 20);
  CHECK(os["L"] <= 50);
  CHECK(os["modes"].size() == os["K"]);

  // Unsafe mode lifts the box check.
  CHECK(fmdiag_run({"decompose", x, "--K", "2", "--L", "16", "--unsafe", "--fmd-iters", "3", "--out-dir",
                    (dir / "unsafe").string()})
            .code == 0);

  std::string short_csv = "sample_rate=19200\n";
  for (int i = 0; i < 999; ++i) short_csv += std::to_string(i % 7) + "\n";
  write(dir / "short.csv", short_csv);
  CHECK(fmdiag_run({"decompose", (dir / "short.csv").string(), "--out-dir", (dir / "s").string()}).code == 3);
  write(dir / "garbage.csv", "sample_rate=100\n1\nabc\n");
  CHECK(fmdiag_run({"decompose", (dir / "garbage.csv").string(), "--out-dir", (dir / "g").string()}).code == 3);
}

TEST_CASE("train, diagnose and eval") {
  static const fs::path dir = scratch("train");
  static const fs::path manifest = make_dataset(dir);
  const fs::path model = dir / "model.json";

  static const bool trained = [&] {
    const bool ok = fmdiag_run(train_args(manifest, model)).code == 0 &&
                    fmdiag_run(train_args(manifest, dir / "model2.json")).code == 0;
    return ok;
  }();
  REQUIRE(trained);
  REQUIRE(fs::exists(model));
  CHECK(slurp(model) == slurp(dir / "model2.json"));

  const auto d = fmdiag_run({"diagnose", "--model", model.string(), (dir / "faulty_0.csv").string()});
  REQUIRE(d.code == 0);
  const auto dj = json::parse(d.out);
  CHECK(dj["label"] == "faulty");
  CHECK(dj["scores"].size() == 2);
  CHECK(fmdiag_run({"diagnose", "--model", model.string(), (dir / "healthy_1.csv").string()}).out.find(
            "\"label\": \"healthy\"") != std::string::npos);

  const auto e = fmdiag_run({"eval", "--model", model.string(), "--manifest", manifest.string(), "--json",
                             (dir / "eval.json").string()});
  REQUIRE(e.code == 0);
  CHECK(e.out.find("True \\ Pred") != std::string::npos);
  const auto ej = json::parse(slurp(dir / "eval.json"));
  // Percentages. Four short signals per class do not guarantee a clean resubstitution.
  CHECK(ej["overall_accuracy"] >= 75.0);
  CHECK(ej["cases"].size() == 8);

  SUBCASE("manifest errors") {
    write(dir / "empty.json", "{}");
    CHECK(fmdiag_run(train_args(dir / "empty.json", dir / "m.json")).code == 2);
    write(dir / "missing.json", R"({"a": ["nope.csv"], "b": ["faulty_0.csv"]})");
    CHECK(fmdiag_run(train_args(dir / "missing.json", dir / "m.json")).code == 2);
    write(dir / "one.json", R"({"a": ["faulty_0.csv"]})");
    CHECK(fmdiag_run(train_args(dir / "one.json", dir / "m.json")).code == 2);
    CHECK(fmdiag_run(train_args(dir / "absent.json", dir / "m.json")).code == 2);
    CHECK_FALSE(fs::exists(dir / "m.json"));
  }
  SUBCASE("model errors") {
    const std::string text = slurp(model);
    write(dir / "truncated.json", text.substr(0, text.size() / 3));
    CHECK(fmdiag_run({"diagnose", "--model", (dir / "truncated.json").string(), (dir / "faulty_0.csv").string()})
              .code == 4);
    std::string bumped = text;
    bumped.replace(bumped.find("\"version\": 1"), 12, "\"version\": 9");
    write(dir / "bumped.json", bumped);
    CHECK(fmdiag_run({"diagnose", "--model", (dir / "bumped.json").string(), (dir / "faulty_0.csv").string()})
              .code == 4);
    CHECK(fmdiag_run({"diagnose", "--model", (dir / "none.json").string(), (dir / "faulty_0.csv").string()})
              .code == 2);
    CHECK(fmdiag_run({"eval", "--model", (dir / "bumped.json").string(), "--manifest", manifest.string()}).code ==
          4);
  }
  SUBCASE("degenerate signal") {
    std::string zeros = "sample_rate=48000\n";
    for (int i = 0; i < 24000; ++i) zeros += "0\n";
    write(dir / "zeros.csv", zeros);
    CHECK(fmdiag_run({"diagnose", "--model", model.string(), (dir / "zeros.csv").string()}).code == 3);
  }
}

TEST_CASE("bench-aha") {
  const fs::path dir = scratch("bench");
  const auto a = fmdiag_run({"bench-aha", "--function", "sphere", "--dims", "5", "--out", (dir / "a.csv").string()});
  REQUIRE(a.code == 0);
  REQUIRE(fmdiag_run({"bench-aha", "--function", "sphere", "--dims", "5", "--out", (dir / "b.csv").string()}).code ==
          0);
  const std::string csv = slurp(dir / "a.csv");
  CHECK(csv == slurp(dir / "b.csv"));
  CHECK(csv.find("seed,iteration,best_fitness\n") != std::string::npos);
  const auto pos = csv.rfind("summary,median_final,");
  REQUIRE(pos != std::string::npos);
  CHECK(std::stod(csv.substr(pos + 21)) < 1e-3);
  std::size_t rows = 0;
  for (char c : csv) rows += c == '\n';
  CHECK(rows == 1 + 1 + 10 * 500 + 1);

  const auto r = fmdiag_run({"bench-aha", "--function", "rastrigin", "--dims", "2", "--iters", "50", "--seeds", "2"});
  CHECK(r.code == 0);
  CHECK(r.out.find("summary,median_final,") != std::string::npos);

  CHECK(fmdiag_run({"bench-aha", "--dims", "0"}).code == 2);
  CHECK(fmdiag_run({"bench-aha", "--function", "ackley"}).code == 2);
  CHECK(fmdiag_run({"bench-aha", "--seeds", "0"}).code == 2);
}

TEST_CASE("signal files") {
  const fs::path dir = scratch("io");
  write(dir / "rate.csv", "sample_rate=1000\n1.5\n-2\n\n3e-1\n");
  const auto a = fmdiag::io::read_signal_csv(dir / "rate.csv");
  CHECK(a.sample_rate() == 1000.0);
  CHECK(std::vector<double>(a.samples().begin(), a.samples().end()) == std::vector<double>{1.5, -2.0, 0.3});

  write(dir / "time.csv", "time,amplitude\n0,1\n0.001,2\n0.002,3\n0.003,4\n");
  const auto b = fmdiag::io::read_signal_csv(dir / "time.csv");
  CHECK(b.sample_rate() == doctest::Approx(1000.0));
  CHECK(b.size() == 4);
  write(dir / "bare.csv", "0,1\r\n0.5,2\r\n");
  CHECK(fmdiag::io::read_signal_csv(dir / "bare.csv").sample_rate() == 2.0);

  const auto kind = [&](const std::string& text) -> std::optional<fmdiag::ErrorKind> {
    write(dir / "bad.csv", text);
    try {
      fmdiag::io::read_signal_csv(dir / "bad.csv");
    } catch (const fmdiag::Error& e) {
      return e.kind();
    }
    return std::nullopt;
  };
  CHECK(kind("1\n2\n") == fmdiag::ErrorKind::ParseError);
  CHECK(kind("sample_rate=-1\n1\n") == fmdiag::ErrorKind::ParseError);
  CHECK(kind("sample_rate=10\n1,2\n") == fmdiag::ErrorKind::ParseError);
  CHECK(kind("sample_rate=10\n1\nnan\n") == fmdiag::ErrorKind::ParseError);
  CHECK(kind("sample_rate=10\n") == fmdiag::ErrorKind::ParseError);
  CHECK(kind("time,amplitude\n0,1\n0,2\n") == fmdiag::ErrorKind::ParseError);
  CHECK(kind("sample_rate=10\n1,5\n") == fmdiag::ErrorKind::ParseError);

  // Round trip is exact and unaffected by the C locale.
  const fmdiag::Signal s({0.1, -1e-300, 12345.678901234567, 1.0 / 3.0}, 48000.0);
  std::setlocale(LC_ALL, "C.utf8");
  fmdiag::io::write_signal_csv(s, dir / "rt.csv");
  std::setlocale(LC_ALL, "C");
  const auto back = fmdiag::io::read_signal_csv(dir / "rt.csv");
  CHECK(back == s);
  CHECK(slurp(dir / "rt.csv").find(',') == std::string::npos);
}
