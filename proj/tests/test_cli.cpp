#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "otlab/io.hpp"
#include "otlab/transport.hpp"
#include "otlab/triangle_chain.hpp"

namespace otlab {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code;
  std::string out;
};

CliRun run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + std::string(OTLAB_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t got;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

io::Report parse_report(const std::string& text) {
  std::istringstream in(text);
  return io::read_report(in);
}

// Everything except wall-clock timing.
std::vector<std::pair<std::string, std::string>> stable(const io::Report& r) {
  auto e = r.entries();
  std::erase_if(e, [](const auto& kv) { return kv.first == "timing_ms" || kv.first == "argv"; });
  return e;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("otlab_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

TEST_F(Cli, GenIsDeterministic) {
  ASSERT_EQ(run("gen --kind euclidean --n 6 --seed 4 --out " + path("a.inst")).code, 0);
  ASSERT_EQ(run("gen --kind euclidean --n 6 --seed 4 --out " + path("b.inst")).code, 0);
  ASSERT_EQ(run("gen --kind euclidean --n 6 --seed 5 --out " + path("c.inst")).code, 0);
  EXPECT_EQ(slurp(path("a.inst")), slurp(path("b.inst")));
  EXPECT_NE(slurp(path("a.inst")), slurp(path("c.inst")));
}

TEST_F(Cli, SeedFromEnvironment) {
  ASSERT_EQ(run("gen --kind random-metric --n 5 --out " + path("env.inst"), "OTLAB_SEED=3").code, 0);
  ASSERT_EQ(run("gen --kind random-metric --n 5 --seed 3 --out " + path("flag.inst")).code, 0);
  EXPECT_EQ(slurp(path("env.inst")), slurp(path("flag.inst")));
  const io::Instance inst = io::load_instance(path("flag.inst"));
  EXPECT_TRUE(validate_metric(*inst.dist).empty());
}

TEST_F(Cli, GenReportValidates) {
  const CliRun r = run("gen --kind euclidean --n 4 --seed 1 --out " + path("g.inst"));
  ASSERT_EQ(r.code, 0);
  const io::Report rep = parse_report(r.out);
  EXPECT_NO_THROW(io::validate_report(rep));
  EXPECT_EQ(rep.get("instance_digest"), io::digest(slurp(path("g.inst"))));
}

TEST_F(Cli, DiracTripleCertifiesOnBothRoutes) {
  ASSERT_EQ(run("gen --kind dirac-triple --coords 0,1,3 --out " + path("d.inst")).code, 0);
  const CliRun r = run("certify --instance " + path("d.inst") + " --p 2 --route both");
  ASSERT_EQ(r.code, 0) << r.out;
  const io::Report rep = parse_report(r.out);
  EXPECT_NO_THROW(io::validate_report(rep));
  EXPECT_TRUE(rep.get_bool("certified"));
  EXPECT_TRUE(rep.get_bool("duality_certified"));
  EXPECT_TRUE(rep.get_bool("glueing_certified"));
  EXPECT_TRUE(rep.get_bool("routes_agree"));
  EXPECT_NEAR(rep.get_double("eta"), 2.0, 1e-12);
  EXPECT_LE(rep.get_double("collapse_residual"), 1e-10);
  EXPECT_NEAR(rep.get_double("w_lambda_nu"), 3.0, 1e-12);
}

TEST_F(Cli, SolveHandWrittenInstanceAgainstOracle) {
  std::ofstream(path("h.inst")) << "format otlab-instance 1\n"
                                   "coords 4 1\n0\n1\n2\n3\n"
                                   "measure lambda 4\n0.5 0.5 0 0\n"
                                   "measure nu 4\n0 0 0.5 0.5\n"
                                   "end\n";
  const CliRun r = run("solve --instance " + path("h.inst") + " --p 2 --measures lambda,nu --oracle");
  ASSERT_EQ(r.code, 0) << r.out;
  const io::Report rep = parse_report(r.out);
  EXPECT_NO_THROW(io::validate_report(rep));
  EXPECT_NEAR(rep.get_double("wasserstein"), 2.0, 1e-12);
  EXPECT_NEAR(rep.get_double("oracle_wasserstein"), 2.0, 1e-12);
  EXPECT_TRUE(rep.get_bool("oracle_match"));
}

TEST_F(Cli, EqualMeasuresReportTheTrivialBranch) {
  std::ofstream(path("t.inst")) << "format otlab-instance 1\n"
                                   "coords 3 1\n0\n1\n3\n"
                                   "measure lambda 3\n0.2 0.3 0.5\n"
                                   "measure mu 3\n0.2 0.3 0.5\n"
                                   "measure nu 3\n0 1 0\n"
                                   "end\n";
  const CliRun r = run("certify --instance " + path("t.inst") + " --p 3 --route duality");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(parse_report(r.out).get("branch"), "trivial");
}

TEST_F(Cli, ReportsAgreeWithTheLibrary) {
  ASSERT_EQ(run("gen --kind random-metric --n 7 --seed 9 --out " + path("r.inst")).code, 0);
  const io::Instance inst = io::load_instance(path("r.inst"));
  const SpacePtr s = inst.space();
  const auto l = inst.measure("lambda", s);
  const auto m = inst.measure("mu", s);
  const auto n = inst.measure("nu", s);
  for (double p : {1.0, 2.0, 3.0}) {
    const std::string ps = io::format_machine(p);
    const CliRun c = run("certify --instance " + path("r.inst") + " --p " + ps);
    const io::Report rep = parse_report(c.out);
    EXPECT_NO_THROW(io::validate_report(rep));
    const ChainReport lib = p == 1.0 ? certify_triangle_kr(l, m, n) : certify_triangle(l, m, n, p);
    EXPECT_EQ(rep.get_bool("duality_certified"), lib.certified);
    EXPECT_EQ(rep.get("w_lambda_nu"), io::format_machine(lib.w_lambda_nu));
    EXPECT_EQ(c.code, lib.certified ? 0 : 1);

    const CliRun sv = run("solve --instance " + path("r.inst") + " --p " + ps + " --measures lambda,mu");
    EXPECT_EQ(parse_report(sv.out).get("value"), io::format_machine(solve_transport(l, m, p).value));
  }
}

TEST_F(Cli, RerunsAreBitIdentical) {
  ASSERT_EQ(run("gen --kind euclidean --n 8 --seed 2 --out " + path("e.inst")).code, 0);
  for (const std::string cmd : {"solve --p 1.5", "certify --p 3 --route both"}) {
    const CliRun a = run(cmd + " --instance " + path("e.inst"));
    const CliRun b = run(cmd + " --instance " + path("e.inst"));
    EXPECT_EQ(stable(parse_report(a.out)), stable(parse_report(b.out)));
  }
}

TEST_F(Cli, OutFlagWritesTheReport) {
  ASSERT_EQ(run("gen --kind euclidean --n 3 --seed 2 --out " + path("o.inst")).code, 0);
  ASSERT_EQ(run("solve --instance " + path("o.inst") + " --out " + path("o.report")).code, 0);
  std::ifstream in(path("o.report"));
  EXPECT_NO_THROW(io::validate_report(io::read_report(in)));
}

TEST_F(Cli, ScalarCommands) {
  const CliRun f = run("scalar f-eta --p 2 --eta 0.25");
  ASSERT_EQ(f.code, 0);
  std::istringstream lines(f.out);
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  EXPECT_EQ(header.substr(0, 13), "p,eta,f_eta,c");
  EXPECT_NEAR(std::stod(row.substr(row.find(',', row.find(',') + 1) + 1)), 4.0, 1e-12);

  EXPECT_EQ(run("scalar collapse --p 3 --Z 1").code, 0);
  EXPECT_EQ(run("scalar collapse --p 2.5 --grid 200").code, 0);
  EXPECT_EQ(run("scalar check-lemma2 --p 1.5 --eta 0.7").code, 0);
  EXPECT_EQ(run("scalar f-eta --p 3 --eta 2 --format pretty").code, 0);
  ASSERT_EQ(run("scalar f-eta --p 3 --eta 2 --out " + path("s.report")).code, 0);
  std::ifstream in(path("s.report"));
  EXPECT_NO_THROW(io::validate_report(io::read_report(in)));
}

TEST_F(Cli, InputErrorsExitWithTwo) {
  EXPECT_EQ(run("scalar f-eta --p 1 --eta 1").code, 2);
  EXPECT_EQ(run("scalar f-eta --p 2 --eta -1").code, 2);
  EXPECT_EQ(run("scalar nonsense --p 2").code, 2);
  EXPECT_EQ(run("solve --instance " + path("missing.inst")).code, 2);
  std::ofstream(path("bad.inst")) << "format otlab-instance 1\ncoords 1 1\n0\n";
  EXPECT_EQ(run("solve --instance " + path("bad.inst")).code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("gen --kind euclidean --n 3 --seed 1 --out " + path("x.inst")).code, 0);
  EXPECT_EQ(run("solve --instance " + path("x.inst") + " --p 0.5").code, 2);
  EXPECT_EQ(run("certify --instance " + path("x.inst") + " --route sideways").code, 2);
  EXPECT_EQ(run("solve --instance " + path("x.inst") + " --measures lambda,zeta").code, 2);
}

TEST_F(Cli, BenchEmitsOneRowPerInstance) {
  const CliRun r = run("bench --suite solve --sizes 10,50,100 --seeds 1..5");
  ASSERT_EQ(r.code, 0);
  std::istringstream lines(r.out);
  std::string line;
  int rows = -1;  // header
  while (std::getline(lines, line))
    if (!line.empty()) ++rows;
  EXPECT_EQ(rows, 15);
  const CliRun c = run("bench --suite certify --sizes 6 --seeds 1,2 --p 2");
  EXPECT_EQ(c.code, 0);
  EXPECT_NE(c.out.find("certify,6,2,2,"), std::string::npos);
}

}  // namespace
}  // namespace otlab
