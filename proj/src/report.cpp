#include "vecproc/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace vecproc {

bool TailReport::all_ok() const {
  for (bool b : ok) {
    if (!b) return false;
  }
  return true;
}

TailReport make_tail_report(std::string statistic, std::string parameter, std::vector<double> parameters,
                            std::vector<double> thresholds, const std::vector<double>& stats,
                            std::vector<double> bounds, std::uint64_t seed) {
  if (parameters.size() != thresholds.size() || parameters.size() != bounds.size()) {
    throw std::invalid_argument("make_tail_report: grid sizes differ");
  }
  TailReport r;
  r.statistic = std::move(statistic);
  r.parameter = std::move(parameter);
  r.parameters = std::move(parameters);
  r.thresholds = std::move(thresholds);
  r.bounds = std::move(bounds);
  r.reps = stats.size();
  r.seed = seed;
  const double reps = static_cast<double>(std::max<std::size_t>(1, r.reps));
  for (std::size_t k = 0; k < r.thresholds.size(); ++k) {
    std::size_t hits = 0;
    for (double s : stats) hits += s >= r.thresholds[k] ? 1 : 0;
    const double f = static_cast<double>(hits) / reps;
    const double se = std::sqrt(f * (1.0 - f) / reps);
    r.freqs.push_back(f);
    r.standard_errors.push_back(se);
    r.ok.push_back(r.bounds[k] >= 1.0 || f <= r.bounds[k] + 3.0 * se);
  }
  return r;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string render(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::string>) {
          return quote(v);
        } else if constexpr (std::is_same_v<T, double>) {
          return format_double(v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else {
          return std::to_string(v);
        }
      },
      c);
}

}  // namespace

Csv::Csv(std::vector<std::string> header) : columns_(header.size()) {
  for (std::size_t k = 0; k < header.size(); ++k) out_ += (k ? "," : "") + quote(header[k]);
  out_ += "\n";
}

void Csv::row(const std::vector<Cell>& cells) {
  if (cells.size() != columns_) throw std::logic_error("Csv::row: wrong number of cells");
  for (std::size_t k = 0; k < cells.size(); ++k) out_ += (k ? "," : "") + render(cells[k]);
  out_ += "\n";
  ++rows_;
}

Csv tail_csv(const TailReport& r) {
  Csv csv({r.parameter, "threshold", "freq", "se", "bound", "ok"});
  for (std::size_t k = 0; k < r.parameters.size(); ++k) {
    csv.row({r.parameters[k], r.thresholds[k], r.freqs[k], r.standard_errors[k], r.bounds[k],
             static_cast<bool>(r.ok[k])});
  }
  return csv;
}

nlohmann::json tail_json(const TailReport& r) {
  return {{"statistic", r.statistic}, {"all_ok", r.all_ok()}, {"reps", r.reps}, {"seed", r.seed},
          {"parameter", r.parameter}, {"parameters", r.parameters}, {"freqs", r.freqs}, {"bounds", r.bounds}};
}

void write_text(const std::string& path, const std::string& text) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunRecorder::RunRecorder(std::string command, std::string out_dir, std::uint64_t seed, nlohmann::json parameters)
    : command_(std::move(command)), out_dir_(std::move(out_dir)), seed_(seed), parameters_(std::move(parameters)),
      started_(utc_timestamp()) {
  std::filesystem::create_directories(out_dir_);
}

void RunRecorder::emit(const std::string& name, const std::string& text) {
  const std::string path = (std::filesystem::path(out_dir_) / name).string();
  write_text(path, text);
  outputs_.push_back(path);
}

void RunRecorder::check(const std::string& name, bool ok) {
  checks_[name] = ok;
  all_ok_ = all_ok_ && ok;
}

void RunRecorder::finish() {
  nlohmann::json m;
  m["command"] = command_;
  m["parameters"] = parameters_;
  m["seed"] = seed_;
  m["tool_version"] = kVersion;
  m["started"] = started_;
  m["finished"] = utc_timestamp();
  m["outputs"] = outputs_;
  m["checks"] = checks_;
  m["all_ok"] = all_ok_;
  write_text((std::filesystem::path(out_dir_) / "manifest.json").string(), m.dump(2) + "\n");
}

}  // namespace vecproc
