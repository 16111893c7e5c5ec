#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "pmod/io.hpp"

namespace fs = std::filesystem;
using namespace pmod;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("pmod_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  static std::string read(const std::string& file) {
    std::ifstream in(file, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  static void write(const std::string& file, const std::string& text) { std::ofstream(file, std::ios::binary) << text; }

  Outcome run(const std::string& args, const std::string& stdin_file = "") const {
    const std::string err = path("stderr.txt");
    std::string cmd = std::string("'") + PMOD_CLI_PATH + "' " + args + " 2>'" + err + "'";
    if (!stdin_file.empty()) cmd += " <'" + stdin_file + "'";
    Outcome r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed");
    char buf[4096];
    std::size_t n = 0;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    const int status = ::pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = read(err);
    return r;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, HelpForEverySubcommand) {
  EXPECT_EQ(run("--help").code, 0);
  for (const char* sub : {"domain", "dirichlet", "modulus", "verify", "theorem1", "sheaf", "render"}) {
    const auto r = run(std::string(sub) + " --help");
    EXPECT_EQ(r.code, 0) << sub;
    EXPECT_NE(r.out.find("Usage"), std::string::npos) << sub;
  }
}

TEST_F(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("modulus --no-such-flag").code, 2);
  EXPECT_EQ(run("modulus --p 1").code, 2);
  EXPECT_EQ(run("modulus --tol -1").code, 2);
  EXPECT_EQ(run("modulus --domain hexagon").code, 2);
  EXPECT_EQ(run("modulus --bf sin").code, 2);
  EXPECT_EQ(run("domain --format csv").code, 2);
  EXPECT_EQ(run("verify").code, 2);  // --cert is required
  const auto missing = run("modulus --graph '" + path("nope.json") + "'");
  EXPECT_EQ(missing.code, 2);
  EXPECT_NE(missing.err.find("cannot open"), std::string::npos);
  EXPECT_EQ(run("domain --grid-h 0.3").code, 2);
}

TEST_F(Cli, GraphRoundTripIsByteIdentical) {
  for (const char* spec : {"--domain rectangle --a 2 --b 1 --grid-h 0.25", "--domain comb --k 2 --grid-h 0.0625",
                           "--domain lshape --grid-h 0.25"}) {
    const auto first = run(std::string("domain ") + spec);
    ASSERT_EQ(first.code, 0) << spec;
    write(path("g.json"), first.out);
    const auto second = run("domain --graph '" + path("g.json") + "'");
    ASSERT_EQ(second.code, 0);
    EXPECT_EQ(first.out, second.out) << spec;
    const auto piped = run("domain --graph -", path("g.json"));
    EXPECT_EQ(first.out, piped.out);
  }
}

TEST_F(Cli, CertificateRoundTripHasNoDrift) {
  ASSERT_EQ(run("domain --domain rectangle --a 1 --b 1 --grid-h 0.125 --out '" + path("g.json") + "'").code, 0);
  const auto r = run("modulus --graph '" + path("g.json") + "' --bf x+y --p 3");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto g = io::graph_from_json(io::parse(read(path("g.json"))));
  const auto j = io::parse(r.out);
  const auto cert = io::certificate_from_json(g, j);
  const auto prob = io::problem_from_json(g, j["problem"]);
  EXPECT_EQ(io::dump(io::to_json(cert, &prob)), r.out);

  const auto again = io::certificate_from_json(g, io::parse(io::dump(io::to_json(cert))));
  for (std::size_t e = 0; e < cert.rho.size(); ++e) EXPECT_EQ(again.rho[e], cert.rho[e]);
  ASSERT_EQ(again.eta.size(), cert.eta.size());
  for (std::size_t k = 0; k < cert.eta.size(); ++k) {
    EXPECT_EQ(again.eta[k].mass, cert.eta[k].mass);
    EXPECT_EQ(again.eta[k].path.nodes(), cert.eta[k].path.nodes());
  }
}

TEST_F(Cli, VerifyAcceptsAndRejects) {
  const std::string g = path("g.json");
  const std::string c = path("c.json");
  ASSERT_EQ(run("domain --domain rectangle --a 2 --b 1 --grid-h 0.125 --out '" + g + "'").code, 0);
  ASSERT_EQ(run("modulus --graph '" + g + "' --out '" + c + "'").code, 0);
  const auto ok = run("verify --graph '" + g + "' --cert '" + c + "' --format text");
  EXPECT_EQ(ok.code, 0) << ok.err;
  EXPECT_EQ(ok.out.find("FAIL"), std::string::npos);

  auto j = io::parse(read(c));
  j["eta"][0]["mass"] = j["eta"][0]["mass"].get<double>() * 1.5;
  write(path("bad.json"), io::dump(j));
  const auto bad = run("verify --graph '" + g + "' --cert '" + path("bad.json") + "'");
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("check failed: strong_duality"), std::string::npos) << bad.err;
  EXPECT_FALSE(io::parse(bad.out)["strong_duality"]["pass"].get<bool>());

  auto k = io::parse(read(c));
  for (auto& [key, val] : k["rho"].items()) val = val.get<double>() * 0.5;
  write(path("low.json"), io::dump(k));
  const auto low = run("verify --graph '" + g + "' --cert '" + path("low.json") + "'");
  EXPECT_EQ(low.code, 1);
  EXPECT_NE(low.err.find("check failed: admissibility"), std::string::npos);
  EXPECT_TRUE(io::parse(low.out)["admissibility"].contains("witness"));
}

TEST_F(Cli, ModulusOnTheRectangle) {
  const auto r = run("modulus --domain rectangle --a 2 --b 1 --grid-h 0.03125 --format text");
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string label;
  double value = 0.0;
  in >> label >> value;
  EXPECT_EQ(label, "value");
  EXPECT_NEAR(value, 1.41421, 1e-4);

  const auto csv = run("modulus --domain rectangle --grid-h 0.5 --format csv");
  EXPECT_EQ(csv.out.rfind("edge,u,v,rho\n", 0), 0u);
  const auto constant = run("modulus --domain rectangle --grid-h 0.5 --const 1 --format text");
  EXPECT_EQ(constant.code, 0);
}

TEST_F(Cli, NonconvergenceExitsOne) {
  const auto r = run("modulus --domain rectangle --a 2 --b 1 --grid-h 0.0625 --max-iter 1");
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(io::parse(r.out)["converged"].get<bool>());
}

TEST_F(Cli, DirichletOutputs) {
  const auto csv = run("dirichlet --domain rectangle --grid-h 0.5 --format csv");
  ASSERT_EQ(csv.code, 0);
  EXPECT_EQ(csv.out.rfind("id,x,y,value\n", 0), 0u);
  EXPECT_NE(csv.out.find("\n4,0.5,0.5,0.5\n"), std::string::npos);

  write(path("f.json"), "{\"0\": 0, \"1\": 0, \"2\": 1, \"3\": 0, \"4\": 0.9, \"5\": 1, \"6\": 0, \"7\": 1, \"8\": 1}\n");
  const auto j = run("dirichlet --domain rectangle --grid-h 0.5 --p 3 --f '" + path("f.json") + "'");
  ASSERT_EQ(j.code, 0) << j.err;
  EXPECT_NEAR(io::parse(j.out)["4"].get<double>(), 0.5, 1e-9);
}

TEST_F(Cli, TheoremOnePipeline) {
  const auto r = run("theorem1 --domain rectangle --a 2 --b 1 --grid-h 0.125");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = io::parse(r.out);
  EXPECT_TRUE(j["pass"].get<bool>());
  EXPECT_NEAR(j["value"].get<double>(), std::sqrt(2.0), 1e-5);
}

TEST_F(Cli, SheafReport) {
  const auto r = run("sheaf --grid-h 0.0625 --eps 0.25");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = io::parse(r.out);
  EXPECT_DOUBLE_EQ(j["closed_form"].get<double>(), 2.9375);
  EXPECT_TRUE(j["sheaf_fails"].get<bool>());
  EXPECT_DOUBLE_EQ(j["regions"]["union"]["energy_u"].get<double>(), 3.0);
  EXPECT_EQ(run("sheaf --eps 0.5 --grid-h 0.25").code, 2);
}

TEST_F(Cli, RenderIsDeterministic) {
  const std::string g = path("g.json");
  const std::string c = path("c.json");
  ASSERT_EQ(run("domain --domain comb --k 1 --grid-h 0.125 --out '" + g + "'").code, 0);
  ASSERT_EQ(run("modulus --graph '" + g + "' --out '" + c + "'").code, 0);
  const auto a = run("render --graph '" + g + "' --cert '" + c + "' --width 400 --height 300");
  const auto b = run("render --graph '" + g + "' --cert '" + c + "' --width 400 --height 300");
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("<svg"), std::string::npos);
  EXPECT_NE(a.out.find("width=\"400\""), std::string::npos);
  const auto plain = run("render --graph '" + g + "' --colormap gray");
  EXPECT_EQ(plain.code, 0);
  EXPECT_NE(plain.out, a.out);
}
