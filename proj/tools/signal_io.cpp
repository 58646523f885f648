#include "signal_io.hpp"

#include <charconv>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "fmdiag/error.hpp"

namespace fmdiag::io {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

[[noreturn]] void bad_line(const std::filesystem::path& path, std::size_t line, const std::string& what) {
  throw Error(ErrorKind::ParseError, path.string() + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

Signal read_signal_csv(const std::filesystem::path& path, std::optional<double> fallback_rate) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open signal file " + path.string());

  std::optional<double> rate;
  std::vector<double> times;
  std::vector<double> values;
  bool two_column = false;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (values.empty() && times.empty()) {
      if (line.starts_with("sample_rate=")) {
        rate = parse_double(line.substr(12));
        if (!rate || !(*rate > 0.0)) bad_line(path, line_no, "invalid sample_rate header");
        continue;
      }
      if (line == "time,amplitude") {
        two_column = true;
        continue;
      }
    }
    const auto comma = line.find(',');
    if (comma != std::string_view::npos) {
      if (rate || (!two_column && !values.empty())) bad_line(path, line_no, "unexpected second column");
      two_column = true;
      const auto t = parse_double(line.substr(0, comma));
      const auto v = parse_double(line.substr(comma + 1));
      if (!t || !v) bad_line(path, line_no, "expected time,amplitude");
      times.push_back(*t);
      values.push_back(*v);
    } else {
      if (two_column) bad_line(path, line_no, "missing amplitude column");
      const auto v = parse_double(line);
      if (!v) bad_line(path, line_no, "expected a number");
      values.push_back(*v);
    }
  }
  if (values.empty()) throw Error(ErrorKind::ParseError, path.string() + ": no samples");
  if (two_column) {
    if (times.size() < 2) throw Error(ErrorKind::ParseError, path.string() + ": cannot infer rate from one sample");
    const double span = times.back() - times.front();
    if (!(span > 0.0)) throw Error(ErrorKind::ParseError, path.string() + ": time column is not increasing");
    rate = static_cast<double>(times.size() - 1) / span;
  }
  if (!rate) rate = fallback_rate;
  if (!rate) throw Error(ErrorKind::ParseError, path.string() + ": no sample_rate header");
  try {
    return Signal(std::move(values), *rate);
  } catch (const Error& e) {
    throw Error(ErrorKind::ParseError, path.string() + ": " + e.what());
  }
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw Error(ErrorKind::IoError, "number formatting failed");
  return std::string(buf, ptr);
}

void write_signal_csv(const Signal& s, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
  out << "sample_rate=" << format_double(s.sample_rate()) << '\n';
  for (double v : s.samples()) out << format_double(v) << '\n';
  if (!out) throw Error(ErrorKind::IoError, "failed writing " + path.string());
}

}  // namespace fmdiag::io
