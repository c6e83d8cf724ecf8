#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "otlab/core_model.hpp"

namespace otlab::io {

inline constexpr int kInstanceVersion = 1;
inline constexpr int kReportVersion = 1;

/// Machine output: 17 significant digits (round-trips a double exactly).
std::string format_machine(double value);
/// Human output: 6 significant digits.
std::string format_pretty(double value);

/// A metric space (coordinates or distances, never both) plus named probability vectors.
struct Instance {
  std::string kind = "custom";
  std::optional<std::uint64_t> seed;
  std::optional<Matrix> coords;
  std::optional<Matrix> dist;
  std::vector<std::pair<std::string, Vector>> measures;

  /// Builds (and validates) the metric space.
  SpacePtr space() const;
  /// Throws FormatError for an unknown name.
  DiscreteMeasure measure(const std::string& name, const SpacePtr& space) const;
  std::vector<std::string> measure_names() const;
};

void write_instance(const Instance& instance, std::ostream& out);
/// Throws FormatError on any syntax or invariant problem.
Instance read_instance(std::istream& in);

std::string serialize_instance(const Instance& instance);
Instance load_instance(const std::filesystem::path& path);
void save_instance(const Instance& instance, const std::filesystem::path& path);

/// 64-bit FNV-1a of the bytes, as "fnv1a64:<16 hex digits>".
std::string digest(std::string_view bytes);

/// Ordered key/value record. Values are whitespace-separated tokens.
class Report {
 public:
  explicit Report(std::string command) : command_(std::move(command)) {}

  void add(const std::string& key, double value);
  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, const char* value) { add(key, std::string(value)); }
  void add(const std::string& key, bool value);
  void add(const std::string& key, long long value);
  void add(const std::string& key, std::size_t value) { add(key, static_cast<long long>(value)); }
  void add(const std::string& key, int value) { add(key, static_cast<long long>(value)); }
  void add(const std::string& key, const Vector& values);

  const std::string& command() const { return command_; }
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  bool has(const std::string& key) const;
  /// Throws FormatError when the key is missing.
  const std::string& get(const std::string& key) const;
  double get_double(const std::string& key) const;
  bool get_bool(const std::string& key) const;

 private:
  std::string command_;
  std::vector<std::pair<std::string, std::string>> entries_;
};

void write_report(const Report& report, std::ostream& out);
Report read_report(std::istream& in);

/// Checks the header and the keys required for the report's command.
/// Throws FormatError naming the first problem.
void validate_report(const Report& report);

/// Required keys per command (see docs/formats.md).
const std::vector<std::string>& required_report_keys(const std::string& command);

}  // namespace otlab::io
