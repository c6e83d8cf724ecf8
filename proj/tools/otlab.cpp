// otlab: command-line front end for the discrete optimal-transport laboratory.
//
//   otlab gen      --kind euclidean|random-metric|dirac-triple --n N --seed S --out PATH
//   otlab solve    --instance PATH --p P [--measures a,b] [--oracle] [--out PATH]
//   otlab certify  --instance PATH --p P [--measures l,m,n] [--route duality|glueing|both]
//   otlab scalar   f-eta|check-lemma2|collapse --p P [--eta E] [--Z Z] [--grid N]
//   otlab bench    --suite solve|certify --sizes 10,50 --seeds 1..5 [--out PATH]
//
// Exit codes: 0 success/certified, 1 certificate failure, 2 input error.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "otlab/conjugacy.hpp"
#include "otlab/io.hpp"
#include "otlab/lemma.hpp"
#include "otlab/transport.hpp"
#include "otlab/triangle_chain.hpp"

namespace {

using namespace otlab;

constexpr int kExitOk = 0;
constexpr int kExitCertificateFailure = 1;
constexpr int kExitInputError = 2;

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::uint64_t default_seed() {
  if (const char* env = std::getenv("OTLAB_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && end != env) return v;
    throw InputError("OTLAB_SEED must be a non-negative integer");
  }
  return 1;
}

std::vector<std::string> split_list(const std::string& text, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, sep);)
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  for (const auto& tok : split_list(text)) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size()) throw InputError("not a number: " + tok);
    out.push_back(v);
  }
  return out;
}

// "1..5" or "1,4,9".
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    const auto lo = std::stoull(text.substr(0, dots));
    const auto hi = std::stoull(text.substr(dots + 2));
    if (hi < lo) throw InputError("empty seed range " + text);
    for (auto s = lo; s <= hi; ++s) out.push_back(s);
    return out;
  }
  for (const auto& tok : split_list(text)) out.push_back(std::stoull(tok));
  if (out.empty()) throw InputError("no seeds given");
  return out;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw InputError("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

// ---------------------------------------------------------------------------
// gen

struct GenArgs {
  std::string kind;
  Index n = 6;
  std::optional<std::uint64_t> seed;
  Index dim = 2;
  std::string coords = "0,1,3";
  int measures = 3;
  Index support = 0;
  bool uniform = false;
  std::string out;
};

std::string measure_name(int k) {
  static const char* names[] = {"lambda", "mu", "nu"};
  return k < 3 ? names[k] : "m" + std::to_string(k);
}

Vector random_weights(Index n, Index support, bool uniform, Rng& rng) {
  // Choose the support by a partial Fisher-Yates shuffle.
  std::vector<Index> idx(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (Index k = 0; k < support; ++k) {
    const auto pick = k + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n - k)));
    std::swap(idx[static_cast<std::size_t>(k)], idx[static_cast<std::size_t>(pick)]);
  }
  Vector w = Vector::Zero(n);
  for (Index k = 0; k < support; ++k)
    w(idx[static_cast<std::size_t>(k)]) = uniform ? 1.0 : rng.uniform(0.05, 1.0);
  return w / w.sum();
}

io::Instance generate(const GenArgs& args, std::uint64_t seed) {
  io::Instance inst;
  inst.kind = args.kind;
  Rng rng(seed);
  if (args.kind == "dirac-triple") {
    const std::vector<double> xs = parse_doubles(args.coords);
    if (xs.size() < 3) throw InputError("dirac-triple needs at least three coordinates");
    inst.coords = Matrix(static_cast<Index>(xs.size()), 1);
    for (std::size_t i = 0; i < xs.size(); ++i) (*inst.coords)(static_cast<Index>(i), 0) = xs[i];
    for (int k = 0; k < 3; ++k) {
      Vector w = Vector::Zero(static_cast<Index>(xs.size()));
      w(k) = 1.0;
      inst.measures.emplace_back(measure_name(k), w);
    }
    return inst;
  }
  if (args.n < 1) throw InputError("--n must be at least 1");
  inst.seed = seed;
  if (args.kind == "euclidean") {
    if (args.dim < 1) throw InputError("--dim must be at least 1");
    inst.coords = *random_euclidean_space(args.n, args.dim, rng)->coordinates();
  } else if (args.kind == "random-metric") {
    inst.dist = random_metric_space(args.n, rng)->distances();
  } else {
    throw InputError("unknown --kind '" + args.kind + "'");
  }
  const Index support = args.support > 0 ? std::min(args.support, args.n) : args.n;
  for (int k = 0; k < args.measures; ++k)
    inst.measures.emplace_back(measure_name(k), random_weights(args.n, support, args.uniform, rng));
  return inst;
}

int cmd_gen(const GenArgs& args, const std::string& argv_echo) {
  if (args.out.empty()) throw InputError("gen needs --out");
  const std::uint64_t seed = args.seed.value_or(default_seed());
  const io::Instance inst = generate(args, seed);
  inst.space();  // validates the metric before anything is written
  const std::string text = io::serialize_instance(inst);
  std::ofstream out(args.out);
  if (!out) throw InputError("cannot write " + args.out);
  out << text;
  if (!out) throw InputError("write failed for " + args.out);

  io::Report report("gen");
  report.add("argv", argv_echo);
  report.add("instance_digest", io::digest(text));
  report.add("kind", args.kind);
  report.add("n", static_cast<long long>(inst.coords ? inst.coords->rows() : inst.dist->rows()));
  report.add("seed", static_cast<long long>(seed));
  report.add("out", args.out);
  io::write_report(report, std::cout);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// instance helpers

struct LoadedInstance {
  io::Instance instance;
  std::string digest;
  SpacePtr space;
};

LoadedInstance load(const std::string& path) {
  if (path.empty()) throw InputError("--instance is required");
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  std::istringstream parse(text);
  LoadedInstance out{io::read_instance(parse), io::digest(text), nullptr};
  out.space = out.instance.space();
  return out;
}

std::vector<DiscreteMeasure> pick_measures(const LoadedInstance& inst, const std::string& list,
                                           std::size_t count) {
  std::vector<std::string> names = list.empty() ? inst.instance.measure_names() : split_list(list);
  if (names.size() < count)
    throw InputError("instance provides fewer than " + std::to_string(count) + " measures");
  if (!list.empty() && names.size() != count)
    throw InputError("--measures expects exactly " + std::to_string(count) + " names");
  names.resize(count);
  std::vector<DiscreteMeasure> out;
  for (const auto& n : names) out.push_back(inst.instance.measure(n, inst.space));
  return out;
}

std::vector<std::string> measure_names(const LoadedInstance& inst, const std::string& list,
                                       std::size_t count) {
  std::vector<std::string> names = list.empty() ? inst.instance.measure_names() : split_list(list);
  names.resize(count);
  return names;
}

void check_p(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw InputError("--p must be a finite real >= 1");
}

// ---------------------------------------------------------------------------
// solve

struct SolveArgs {
  std::string instance;
  double p = 2.0;
  std::string measures;
  bool oracle = false;
  double tol = 1e-7;
  std::string out;
};

int cmd_solve(const SolveArgs& args, const std::string& argv_echo) {
  check_p(args.p);
  const LoadedInstance inst = load(args.instance);
  const auto ms = pick_measures(inst, args.measures, 2);
  const auto names = measure_names(inst, args.measures, 2);

  const auto start = std::chrono::steady_clock::now();
  const TransportSolution sol = solve_transport(ms[0], ms[1], args.p);
  const double timing = elapsed_ms(start);

  const double gap_bound = args.tol * (1.0 + sol.value);
  const double slackness = complementary_slackness_violation(sol);
  const double feasibility = dual_feasibility_violation(sol.duals);
  bool ok = sol.gap >= -kFeasTol && sol.gap <= gap_bound && slackness <= 1e-7 &&
            feasibility <= kFeasTol && sol.coupling.marginal_error() <= kMarginalTol;

  io::Report report("solve");
  report.add("argv", argv_echo);
  report.add("instance_digest", inst.digest);
  report.add("p", args.p);
  report.add("first", names[0]);
  report.add("second", names[1]);
  report.add("value", sol.value);
  report.add("wasserstein", std::pow(std::max(sol.value, 0.0), 1.0 / args.p));
  report.add("gap", sol.gap);
  report.add("gap_tolerance", gap_bound);
  report.add("complementary_slackness", slackness);
  report.add("dual_feasibility", feasibility);
  report.add("marginal_error", sol.coupling.marginal_error());
  report.add("iterations", sol.iterations);
  report.add("dual_a", sol.duals.a);
  report.add("dual_b", sol.duals.b);
  if (args.oracle) {
    const double oracle = permutation_oracle(ms[0], ms[1], args.p);
    const double w = std::pow(std::max(sol.value, 0.0), 1.0 / args.p);
    const bool match = std::abs(oracle - w) <= 1e-9;
    report.add("oracle_wasserstein", oracle);
    report.add("oracle_match", match);
    ok = ok && match;
  }
  report.add("certified", ok);
  report.add("timing_ms", timing);

  Output out(args.out);
  io::write_report(report, out.stream());
  return ok ? kExitOk : kExitCertificateFailure;
}

// ---------------------------------------------------------------------------
// certify

struct CertifyArgs {
  std::string instance;
  double p = 2.0;
  std::string measures;
  std::string route = "both";
  double tol = 1e-8;
  std::string out;
};

void add_chain(io::Report& report, const ChainReport& chain) {
  report.add("branch", std::string(to_string(chain.branch)));
  report.add("eta", chain.eta);
  report.add("potential_objective", chain.potential_objective);
  report.add("potential_error", chain.potential_error);
  report.add("lemma_bound_max_violation", chain.lemma_bound_max_violation);
  if (chain.offending_pair)
    report.add("offending_pair", std::to_string(chain.offending_pair->first) + " " +
                                     std::to_string(chain.offending_pair->second));
  report.add("ineq_wlamu_slack", chain.ineq_wlamu_slack);
  report.add("ineq_wmunu_slack", chain.ineq_wmunu_slack);
  report.add("rhs_collapsed", chain.rhs_collapsed);
  report.add("collapse_residual", chain.collapse_residual);
  report.add("chain_slack", chain.chain_slack);
  report.add("triangle_slack", chain.triangle_slack);
  report.add("integrability_holds", chain.integrability_holds);
  report.add("beta_dp_concave", chain.beta_dp_concave);
  if (chain.branch == ChainBranch::KantorovichRubinstein) report.add("lipschitz", chain.lipschitz);
  report.add("duality_certified", chain.certified);
}

int cmd_certify(const CertifyArgs& args, const std::string& argv_echo) {
  check_p(args.p);
  if (args.route != "duality" && args.route != "glueing" && args.route != "both")
    throw InputError("--route must be duality, glueing or both");
  const LoadedInstance inst = load(args.instance);
  const auto ms = pick_measures(inst, args.measures, 3);
  const auto names = measure_names(inst, args.measures, 3);

  io::Report report("certify");
  report.add("argv", argv_echo);
  report.add("instance_digest", inst.digest);
  report.add("p", args.p);
  report.add("route", args.route);
  report.add("lambda", names[0]);
  report.add("mu", names[1]);
  report.add("nu", names[2]);

  const auto start = std::chrono::steady_clock::now();
  const bool want_duality = args.route != "glueing";
  const bool want_glueing = args.route != "duality";
  std::optional<ChainReport> chain;
  std::optional<GlueingCertificate> glue;
  CertifyOptions options;
  options.triangle_tol = args.tol;
  if (want_duality)
    chain = args.p == 1.0 ? certify_triangle_kr(ms[0], ms[1], ms[2], options)
                          : certify_triangle(ms[0], ms[1], ms[2], args.p, options);
  if (want_glueing) glue = triangle_via_glueing(ms[0], ms[1], ms[2], args.p, args.tol);
  const double timing = elapsed_ms(start);

  const double wlm = chain ? chain->w_lambda_mu : glue->w_lambda_mu;
  const double wmn = chain ? chain->w_mu_nu : glue->w_mu_nu;
  const double wln = chain ? chain->w_lambda_nu : glue->w_lambda_nu;
  report.add("w_lambda_mu", wlm);
  report.add("w_mu_nu", wmn);
  report.add("w_lambda_nu", wln);
  if (chain) add_chain(report, *chain);
  if (glue) {
    report.add("glueing_bound", glue->bound);
    report.add("glueing_rho13_marginal_error", glue->rho13_marginal_error);
    report.add("glueing_certified", glue->ok);
  }
  bool certified = (!chain || chain->certified) && (!glue || glue->ok);
  if (chain && glue) report.add("routes_agree", chain->certified == glue->ok);
  report.add("certified", certified);
  report.add("timing_ms", timing);

  Output out(args.out);
  io::write_report(report, out.stream());
  return certified ? kExitOk : kExitCertificateFailure;
}

// ---------------------------------------------------------------------------
// scalar

struct ScalarArgs {
  std::string sub;
  double p = 2.0;
  double eta = 1.0;
  std::optional<double> z;
  std::size_t grid = 1000;
  std::string format = "csv";
  std::string out;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

void print_table(const Table& table, const std::string& format, std::ostream& os) {
  if (format == "csv") {
    for (std::size_t c = 0; c < table.columns.size(); ++c) os << (c ? "," : "") << table.columns[c];
    os << '\n';
    for (const auto& row : table.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << io::format_machine(row[c]);
      os << '\n';
    }
    return;
  }
  constexpr int width = 14;
  for (const auto& c : table.columns) os << std::string(width - std::min<std::size_t>(c.size(), width - 1), ' ') << c;
  os << '\n';
  for (const auto& row : table.rows) {
    for (double v : row) {
      const std::string s = io::format_pretty(v);
      os << std::string(width - std::min<std::size_t>(s.size(), width - 1), ' ') << s;
    }
    os << '\n';
  }
}

int cmd_scalar(const ScalarArgs& args, const std::string& argv_echo) {
  if (!(args.p > 1.0))
    throw InputError("scalar commands need p > 1; for p = 1 use 'certify --p 1' (Kantorovich-Rubinstein path)");
  Table table;
  bool ok = true;
  if (args.sub == "f-eta") {
    BruteGrid grid;
    grid.points = std::max<std::size_t>(args.grid, 2);
    const double f = f_eta(args.p, args.eta);
    const double brute = f_eta_brute(args.p, args.eta, grid);
    const double rel = std::abs(f - brute) / (1.0 + std::abs(f));
    table.columns = {"p", "eta", "f_eta", "coefficient", "critical_z", "f_eta_brute", "relative_diff"};
    table.rows.push_back({args.p, args.eta, f, lemma_coefficient(args.p, args.eta),
                          critical_z(args.p, args.eta), brute, rel});
    ok = rel <= 1e-9;
  } else if (args.sub == "check-lemma2") {
    // By homogeneity, Y = 1 and X = Z^{1/p} over a geometric Z grid around the critical point.
    const double zc = critical_z(args.p, args.eta);
    std::vector<std::pair<double, double>> samples{{0.0, 1.0}, {1.0, 0.0}, {std::pow(zc, 1.0 / args.p), 1.0}};
    const std::size_t n = std::max<std::size_t>(args.grid, 2);
    for (std::size_t k = 0; k < n; ++k) {
      const double t = -6.0 + 12.0 * static_cast<double>(k) / static_cast<double>(n - 1);
      samples.emplace_back(std::pow(zc * std::pow(10.0, t), 1.0 / args.p), 1.0);
    }
    const auto all = lemma2_check<double>(args.p, args.eta, samples);
    const auto tight = lemma2_check<double>(args.p, args.eta, std::span(samples).subspan(2, 1));
    table.columns = {"p", "eta", "samples", "max_violation", "max_relative_violation", "critical_violation"};
    table.rows.push_back({args.p, args.eta, static_cast<double>(samples.size()), all.max_violation,
                          all.max_relative_violation, tight.max_relative_violation});
    ok = all.max_relative_violation <= 1e-9 && std::abs(tight.max_relative_violation) <= 1e-9;
  } else if (args.sub == "collapse") {
    std::vector<double> zs;
    if (args.z) {
      zs.push_back(*args.z);
    } else {
      const std::size_t n = std::max<std::size_t>(args.grid, 2);
      for (std::size_t k = 0; k < n; ++k)
        zs.push_back(std::pow(10.0, -3.0 + 6.0 * static_cast<double>(k) / static_cast<double>(n - 1)));
    }
    table.columns = {"p", "Z", "eta", "lhs", "rhs", "residual"};
    for (double z : zs) {
      const double root = std::pow(z, 1.0 / args.p);
      const double eta = std::expm1((args.p - 1.0) * std::log1p(1.0 / root));
      const double lhs = (1.0 + eta) * z + lemma_coefficient(args.p, eta);
      const double rhs = std::pow(1.0 + root, args.p);
      const double residual = collapse_identity_check(args.p, z);
      table.rows.push_back({args.p, z, eta, lhs, rhs, residual});
      ok = ok && residual <= 1e-10;
    }
  } else {
    throw InputError("scalar subcommand must be f-eta, check-lemma2 or collapse");
  }

  print_table(table, args.format, std::cout);
  if (!args.out.empty()) {
    io::Report report("scalar");
    report.add("argv", argv_echo);
    report.add("sub", args.sub);
    report.add("p", args.p);
    std::string cols;
    for (const auto& c : table.columns) cols += (cols.empty() ? "" : " ") + c;
    report.add("columns", cols);
    report.add("rows", table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r)
      report.add("row_" + std::to_string(r),
                 Vector(Eigen::Map<const Vector>(table.rows[r].data(), static_cast<Index>(table.rows[r].size()))));
    report.add("certified", ok);
    Output out(args.out);
    io::write_report(report, out.stream());
  }
  return ok ? kExitOk : kExitCertificateFailure;
}

// ---------------------------------------------------------------------------
// bench

struct BenchArgs {
  std::string suite = "solve";
  std::string sizes = "10,50,100";
  std::string seeds = "1..5";
  double p = 2.0;
  std::string out;
};

int cmd_bench(const BenchArgs& args) {
  check_p(args.p);
  if (args.suite != "solve" && args.suite != "certify") throw InputError("--suite must be solve or certify");
  std::vector<Index> sizes;
  for (double s : parse_doubles(args.sizes)) {
    if (s < 1) throw InputError("sizes must be positive");
    sizes.push_back(static_cast<Index>(s));
  }
  const auto seeds = parse_seeds(args.seeds);

  Output out(args.out);
  std::ostream& os = out.stream();
  bool all_ok = true;
  if (args.suite == "solve")
    os << "suite,n,seed,p,value,wasserstein,iterations,gap,certified,time_ms\n";
  else
    os << "suite,n,seed,p,w_lambda_mu,w_mu_nu,w_lambda_nu,eta,ineq_wlamu_slack,ineq_wmunu_slack,"
          "collapse_residual,certified,time_ms\n";

  for (Index n : sizes)
    for (std::uint64_t seed : seeds) {
      Rng rng(seed);
      const SpacePtr space = random_euclidean_space(n, 2, rng);
      const DiscreteMeasure lambda = DiscreteMeasure::random(space, rng);
      const DiscreteMeasure mu = DiscreteMeasure::random(space, rng);
      const DiscreteMeasure nu = DiscreteMeasure::random(space, rng);
      const auto start = std::chrono::steady_clock::now();
      if (args.suite == "solve") {
        const TransportSolution sol = solve_transport(lambda, nu, args.p);
        const double t = elapsed_ms(start);
        const bool ok = sol.gap >= -kFeasTol && sol.gap <= 1e-7 * (1.0 + sol.value);
        all_ok = all_ok && ok;
        os << "solve," << n << ',' << seed << ',' << io::format_machine(args.p) << ','
           << io::format_machine(sol.value) << ','
           << io::format_machine(std::pow(std::max(sol.value, 0.0), 1.0 / args.p)) << ','
           << sol.iterations << ',' << io::format_machine(sol.gap) << ',' << (ok ? "true" : "false")
           << ',' << io::format_pretty(t) << '\n';
      } else {
        const ChainReport chain = args.p == 1.0 ? certify_triangle_kr(lambda, mu, nu)
                                                : certify_triangle(lambda, mu, nu, args.p);
        const double t = elapsed_ms(start);
        all_ok = all_ok && chain.certified;
        os << "certify," << n << ',' << seed << ',' << io::format_machine(args.p) << ','
           << io::format_machine(chain.w_lambda_mu) << ',' << io::format_machine(chain.w_mu_nu) << ','
           << io::format_machine(chain.w_lambda_nu) << ',' << io::format_machine(chain.eta) << ','
           << io::format_machine(chain.ineq_wlamu_slack) << ','
           << io::format_machine(chain.ineq_wmunu_slack) << ','
           << io::format_machine(chain.collapse_residual) << ',' << (chain.certified ? "true" : "false")
           << ',' << io::format_pretty(t) << '\n';
      }
    }
  return all_ok ? kExitOk : kExitCertificateFailure;
}

}  // namespace

int main(int argc, char** argv) {
  std::string argv_echo;
  for (int i = 0; i < argc; ++i) argv_echo += (i ? " " : "") + std::string(argv[i]);

  CLI::App app{"otlab: Wasserstein distances with primal/dual certificates on finite metric spaces"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Write a deterministic instance file");
  gen_cmd->add_option("--kind", gen.kind, "euclidean, random-metric or dirac-triple")->required();
  gen_cmd->add_option("--n", gen.n, "Number of points");
  gen_cmd->add_option("--seed", gen.seed, "Generator seed (default: OTLAB_SEED or 1)");
  gen_cmd->add_option("--dim", gen.dim, "Coordinate dimension for euclidean instances");
  gen_cmd->add_option("--coords", gen.coords, "Comma-separated 1-D points for dirac-triple");
  gen_cmd->add_option("--measures", gen.measures, "Number of random measures");
  gen_cmd->add_option("--support", gen.support, "Support size of each random measure");
  gen_cmd->add_flag("--uniform", gen.uniform, "Uniform weights on each support");
  gen_cmd->add_option("--out", gen.out, "Instance path")->required();

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Solve one transport problem with certificate");
  solve_cmd->add_option("--instance", solve.instance)->required();
  solve_cmd->add_option("--p", solve.p, "Cost exponent (>= 1)");
  solve_cmd->add_option("--measures", solve.measures, "Two measure names, comma-separated");
  solve_cmd->add_flag("--oracle", solve.oracle, "Cross-check with the permutation oracle");
  solve_cmd->add_option("--tol", solve.tol, "Relative duality-gap tolerance");
  solve_cmd->add_option("--out", solve.out, "Report path (default stdout)");

  CertifyArgs certify;
  auto* certify_cmd = app.add_subcommand("certify", "Certify the triangle inequality for three measures");
  certify_cmd->add_option("--instance", certify.instance)->required();
  certify_cmd->add_option("--p", certify.p, "Cost exponent (>= 1)");
  certify_cmd->add_option("--measures", certify.measures, "Three measure names, comma-separated");
  certify_cmd->add_option("--route", certify.route, "duality, glueing or both");
  certify_cmd->add_option("--tol", certify.tol, "Triangle-inequality slack tolerance");
  certify_cmd->add_option("--out", certify.out, "Report path (default stdout)");

  ScalarArgs scalar;
  auto* scalar_cmd = app.add_subcommand("scalar", "Explore the scalar inequality behind the proof");
  scalar_cmd->add_option("sub", scalar.sub, "f-eta, check-lemma2 or collapse")->required();
  scalar_cmd->add_option("--p", scalar.p, "Exponent (> 1)");
  scalar_cmd->add_option("--eta", scalar.eta, "eta > 0");
  scalar_cmd->add_option("--Z,--z", scalar.z, "Ratio Z > 0 for collapse");
  scalar_cmd->add_option("--grid", scalar.grid, "Grid resolution");
  scalar_cmd->add_option("--format", scalar.format, "csv or pretty")->check(CLI::IsMember({"csv", "pretty"}));
  scalar_cmd->add_option("--out", scalar.out, "Also write a report file");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Timing and slack table as CSV");
  bench_cmd->add_option("--suite", bench.suite, "solve or certify");
  bench_cmd->add_option("--sizes", bench.sizes, "Comma-separated sizes");
  bench_cmd->add_option("--seeds", bench.seeds, "Seed range a..b or list");
  bench_cmd->add_option("--p", bench.p, "Cost exponent");
  bench_cmd->add_option("--out", bench.out, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (*gen_cmd) return cmd_gen(gen, argv_echo);
    if (*solve_cmd) return cmd_solve(solve, argv_echo);
    if (*certify_cmd) return cmd_certify(certify, argv_echo);
    if (*scalar_cmd) return cmd_scalar(scalar, argv_echo);
    if (*bench_cmd) return cmd_bench(bench);
  } catch (const InputError& e) {
    std::cerr << "otlab: " << e.what() << '\n';
    return kExitInputError;
  } catch (const otlab::Error& e) {
    std::cerr << "otlab: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "otlab: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitInputError;
}
