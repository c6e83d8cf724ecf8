#include "otlab/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace otlab::io {

std::string format_machine(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string format_pretty(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

namespace {

double parse_double(const std::string& token) {
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (token.empty() || end != token.c_str() + token.size())
    throw FormatError("not a number: '" + token + "'");
  return v;
}

long long parse_integer(const std::string& token) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size())
    throw FormatError("not an integer: '" + token + "'");
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  for (std::string tok; ss >> tok;) out.push_back(tok);
  return out;
}

// Next non-empty, non-comment line, split into tokens; empty at EOF.
std::vector<std::string> next_tokens(std::istream& in) {
  for (std::string line; std::getline(in, line);) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    auto tokens = split(line);
    if (!tokens.empty()) return tokens;
  }
  return {};
}

Matrix read_matrix(std::istream& in, Index rows, Index cols) {
  if (rows <= 0 || cols <= 0) throw FormatError("matrix dimensions must be positive");
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const auto tokens = next_tokens(in);
    if (static_cast<Index>(tokens.size()) != cols) throw FormatError("matrix row has the wrong length");
    for (Index j = 0; j < cols; ++j) m(i, j) = parse_double(tokens[static_cast<std::size_t>(j)]);
  }
  return m;
}

void write_row(std::ostream& out, const auto& row) {
  for (Index j = 0; j < row.size(); ++j) out << (j ? " " : "") << format_machine(row(j));
  out << '\n';
}

}  // namespace

SpacePtr Instance::space() const {
  if (coords.has_value() == dist.has_value())
    throw FormatError("instance needs exactly one of coords or dist");
  return coords ? euclidean_space(*coords) : FiniteMetricSpace::from_distances(*dist);
}

DiscreteMeasure Instance::measure(const std::string& name, const SpacePtr& space) const {
  for (const auto& [key, w] : measures)
    if (key == name) return {space, w};
  throw FormatError("instance has no measure named '" + name + "'");
}

std::vector<std::string> Instance::measure_names() const {
  std::vector<std::string> out;
  for (const auto& m : measures) out.push_back(m.first);
  return out;
}

void write_instance(const Instance& instance, std::ostream& out) {
  out << "format otlab-instance " << kInstanceVersion << '\n';
  out << "kind " << instance.kind << '\n';
  if (instance.seed) out << "seed " << *instance.seed << '\n';
  const Matrix& m = instance.coords ? *instance.coords : *instance.dist;
  out << (instance.coords ? "coords " : "dist ") << m.rows() << ' ' << m.cols() << '\n';
  for (Index i = 0; i < m.rows(); ++i) write_row(out, m.row(i));
  for (const auto& [name, w] : instance.measures) {
    out << "measure " << name << ' ' << w.size() << '\n';
    write_row(out, w);
  }
  out << "end\n";
}

Instance read_instance(std::istream& in) {
  auto header = next_tokens(in);
  if (header.size() != 3 || header[0] != "format" || header[1] != "otlab-instance")
    throw FormatError("missing 'format otlab-instance' header");
  if (parse_integer(header[2]) != kInstanceVersion) throw FormatError("unsupported instance version");

  Instance inst;
  bool ended = false;
  while (!ended) {
    const auto tokens = next_tokens(in);
    if (tokens.empty()) throw FormatError("instance ended without 'end'");
    const std::string& key = tokens[0];
    if (key == "end") {
      ended = true;
    } else if (key == "kind" && tokens.size() == 2) {
      inst.kind = tokens[1];
    } else if (key == "seed" && tokens.size() == 2) {
      inst.seed = static_cast<std::uint64_t>(parse_integer(tokens[1]));
    } else if ((key == "coords" || key == "dist") && tokens.size() == 3) {
      if (inst.coords || inst.dist) throw FormatError("instance has more than one geometry block");
      Matrix m = read_matrix(in, parse_integer(tokens[1]), parse_integer(tokens[2]));
      (key == "coords" ? inst.coords : inst.dist) = std::move(m);
    } else if (key == "measure" && tokens.size() == 3) {
      Matrix w = read_matrix(in, 1, parse_integer(tokens[2]));
      for (const auto& existing : inst.measures)
        if (existing.first == tokens[1]) throw FormatError("duplicate measure '" + tokens[1] + "'");
      inst.measures.emplace_back(tokens[1], w.row(0).transpose());
    } else {
      throw FormatError("unexpected line starting with '" + key + "'");
    }
  }
  if (inst.coords.has_value() == inst.dist.has_value())
    throw FormatError("instance needs exactly one of coords or dist");
  const Index n = inst.coords ? inst.coords->rows() : inst.dist->rows();
  for (const auto& [name, w] : inst.measures) {
    if (w.size() != n) throw FormatError("measure '" + name + "' has the wrong length");
    if ((w.array() < 0.0).any() || std::abs(w.sum() - 1.0) > kWeightTol)
      throw FormatError("measure '" + name + "' is not a probability vector");
  }
  return inst;
}

std::string serialize_instance(const Instance& instance) {
  std::ostringstream out;
  write_instance(instance, out);
  return out.str();
}

Instance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open instance file " + path.string());
  return read_instance(in);
}

void save_instance(const Instance& instance, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write instance file " + path.string());
  write_instance(instance, out);
  if (!out) throw FormatError("write failed for " + path.string());
}

std::string digest(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------

void Report::add(const std::string& key, double value) { entries_.emplace_back(key, format_machine(value)); }
void Report::add(const std::string& key, const std::string& value) { entries_.emplace_back(key, value); }
void Report::add(const std::string& key, bool value) { entries_.emplace_back(key, value ? "true" : "false"); }
void Report::add(const std::string& key, long long value) { entries_.emplace_back(key, std::to_string(value)); }

void Report::add(const std::string& key, const Vector& values) {
  std::string joined;
  for (Index i = 0; i < values.size(); ++i) joined += (i ? " " : "") + format_machine(values(i));
  entries_.emplace_back(key, joined);
}

bool Report::has(const std::string& key) const {
  for (const auto& e : entries_)
    if (e.first == key) return true;
  return false;
}

const std::string& Report::get(const std::string& key) const {
  for (const auto& e : entries_)
    if (e.first == key) return e.second;
  throw FormatError("report has no key '" + key + "'");
}

double Report::get_double(const std::string& key) const { return parse_double(get(key)); }

bool Report::get_bool(const std::string& key) const {
  const std::string& v = get(key);
  if (v == "true") return true;
  if (v == "false") return false;
  throw FormatError("key '" + key + "' is not a boolean");
}

void write_report(const Report& report, std::ostream& out) {
  out << "format otlab-report " << kReportVersion << '\n';
  out << "command " << report.command() << '\n';
  for (const auto& [key, value] : report.entries()) out << key << ' ' << value << '\n';
  out << "end\n";
}

Report read_report(std::istream& in) {
  auto header = next_tokens(in);
  if (header.size() != 3 || header[0] != "format" || header[1] != "otlab-report")
    throw FormatError("missing 'format otlab-report' header");
  if (parse_integer(header[2]) != kReportVersion) throw FormatError("unsupported report version");
  const auto command = next_tokens(in);
  if (command.size() != 2 || command[0] != "command") throw FormatError("missing 'command' line");
  Report report(command[1]);
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    const auto space = line.find(' ');
    const std::string key = line.substr(0, space);
    if (key == "end") return report;
    report.add(key, space == std::string::npos ? std::string() : line.substr(space + 1));
  }
  throw FormatError("report ended without 'end'");
}

const std::vector<std::string>& required_report_keys(const std::string& command) {
  static const std::map<std::string, std::vector<std::string>> keys = {
      {"gen", {"argv", "instance_digest", "kind", "n", "seed", "out"}},
      {"solve",
       {"argv", "instance_digest", "p", "first", "second", "value", "wasserstein", "gap",
        "gap_tolerance", "complementary_slackness", "iterations", "dual_a", "dual_b", "certified",
        "timing_ms"}},
      {"certify",
       {"argv", "instance_digest", "p", "route", "lambda", "mu", "nu", "w_lambda_mu", "w_mu_nu",
        "w_lambda_nu", "certified", "timing_ms"}},
      {"scalar", {"argv", "sub", "p", "columns", "rows", "certified"}},
  };
  static const std::vector<std::string> none;
  const auto it = keys.find(command);
  return it == keys.end() ? none : it->second;
}

void validate_report(const Report& report) {
  const auto& required = required_report_keys(report.command());
  if (required.empty()) throw FormatError("unknown report command '" + report.command() + "'");
  for (const auto& key : required)
    if (!report.has(key)) throw FormatError("report is missing '" + key + "'");
  if (report.has("certified")) (void)report.get_bool("certified");
  if (report.command() == "certify") {
    const std::string& route = report.get("route");
    if (route != "duality" && route != "glueing" && route != "both")
      throw FormatError("certify report has an invalid route");
    if ((route == "duality" || route == "both") &&
        (!report.has("duality_certified") || !report.has("branch")))
      throw FormatError("certify report lacks the duality section");
    if ((route == "glueing" || route == "both") &&
        (!report.has("glueing_certified") || !report.has("glueing_bound")))
      throw FormatError("certify report lacks the glueing section");
  }
}

}  // namespace otlab::io
