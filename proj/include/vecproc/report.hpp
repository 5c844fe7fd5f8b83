#pragma once

// Tail reports, CSV/JSON writers and run manifests.

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace vecproc {

inline constexpr const char* kVersion = "0.1.0";

/// Empirical exceedance frequencies against theoretical tail bounds.
struct TailReport {
  std::string statistic;
  /// name of the swept parameter (t, a, ...)
  std::string parameter;
  std::vector<double> parameters;
  /// level the statistic is compared against for each parameter
  std::vector<double> thresholds;
  std::vector<double> freqs;
  std::vector<double> standard_errors;
  std::vector<double> bounds;
  std::vector<bool> ok;
  std::size_t reps = 0;
  std::uint64_t seed = 0;

  bool all_ok() const;
};

/// freq = #{stat >= threshold} / reps, SE = sqrt(f (1 - f) / reps),
/// ok = freq <= bound + 3 SE (always true once the bound reaches 1).
TailReport make_tail_report(std::string statistic, std::string parameter, std::vector<double> parameters,
                            std::vector<double> thresholds, const std::vector<double>& stats,
                            std::vector<double> bounds, std::uint64_t seed);

using Cell = std::variant<std::string, double, long long, bool>;

/// RFC 4180 writer: header row, LF endings, doubles with 17 significant digits.
class Csv {
 public:
  explicit Csv(std::vector<std::string> header);
  void row(const std::vector<Cell>& cells);
  std::string str() const { return out_; }
  std::size_t rows() const noexcept { return rows_; }

 private:
  std::size_t columns_;
  std::size_t rows_ = 0;
  std::string out_;
};

std::string format_double(double v);

Csv tail_csv(const TailReport& r);
nlohmann::json tail_json(const TailReport& r);

void write_text(const std::string& path, const std::string& text);

/// Output directory plus the manifest describing one CLI run.
class RunRecorder {
 public:
  RunRecorder(std::string command, std::string out_dir, std::uint64_t seed, nlohmann::json parameters);

  const std::string& out_dir() const noexcept { return out_dir_; }
  /// Writes a file under the output directory and records it.
  void emit(const std::string& name, const std::string& text);
  void emit_csv(const std::string& name, const Csv& csv) { emit(name, csv.str()); }
  void emit_json(const std::string& name, const nlohmann::json& j) { emit(name, j.dump(2) + "\n"); }
  /// Adds one named pass/fail flag to the manifest.
  void check(const std::string& name, bool ok);
  bool all_ok() const noexcept { return all_ok_; }
  /// Writes manifest.json.
  void finish();

 private:
  std::string command_;
  std::string out_dir_;
  std::uint64_t seed_;
  nlohmann::json parameters_;
  std::string started_;
  std::vector<std::string> outputs_;
  nlohmann::json checks_ = nlohmann::json::object();
  bool all_ok_ = true;
};

std::string utc_timestamp();

}  // namespace vecproc
