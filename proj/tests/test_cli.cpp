#include "commands.hpp"

#include "soprc/distributions.hpp"
#include "soprc/metrics.hpp"

#include <json.hpp>

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using namespace soprc;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("soprc_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string blobs(std::size_t n = 400) {
    const auto p = path("blobs.csv");
    EXPECT_EQ(run({"make-blobs", "--n", std::to_string(n), "--seed", "3", "--out", p}).code, 0);
    return p;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, TrainWritesArtifacts) {
  const auto data = blobs();
  const auto r = run({"train", "--data", data, "--iters", "120", "--beta", "0.001", "--npos", "8",
                      "--nneg", "32", "--seed", "7", "--out-dir", path("run"), "--val", data});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(path("run/model.json")));
  EXPECT_TRUE(fs::exists(path("run/trace.csv")));
  const auto m = nlohmann::json::parse(slurp(path("run/manifest.json")));
  EXPECT_EQ(m["command"], "train");
  EXPECT_EQ(m["master_seed"], 7);
  EXPECT_EQ(m["config"]["iters"], 120);
  EXPECT_NE(r.out.find("val_auprc"), std::string::npos);
}

TEST_F(Cli, TrainIsDeterministic) {
  const auto data = blobs();
  for (const char* sub : {"a", "b"})
    ASSERT_EQ(run({"train", "--data", data, "--iters", "60", "--seed", "4", "--out-dir", path(sub)})
                  .code,
              0);
  EXPECT_EQ(slurp(path("a/trace.csv")), slurp(path("b/trace.csv")));
  EXPECT_EQ(slurp(path("a/model.json")), slurp(path("b/model.json")));
}

TEST_F(Cli, MissingDataIsUsageError) {
  const auto r = run({"train", "--iters", "10"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("--data"), std::string::npos);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"train", "--data", path("missing.csv")}).code, 2);
}

TEST_F(Cli, ConfigPrecedence) {
  const auto data = blobs();
  {
    std::ofstream c(path("cfg.json"));
    c << R"({"iters": 30, "seed": 5, "beta": 0.01})";
  }
  ASSERT_EQ(run({"train", "--data", data, "--config", path("cfg.json"), "--iters", "20",
                 "--out-dir", path("run")})
                .code,
            0);
  const auto m = nlohmann::json::parse(slurp(path("run/manifest.json")));
  EXPECT_EQ(m["config"]["iters"], 20);   // flag beats file
  EXPECT_EQ(m["config"]["seed"], 5);     // file beats default
  EXPECT_EQ(m["config"]["npos"], 8);     // default
  {
    std::ofstream c(path("bad.json"));
    c << R"({"itres": 30})";
  }
  EXPECT_EQ(run({"train", "--data", data, "--config", path("bad.json")}).code, 2);
}

TEST_F(Cli, DivergenceExitsWithThree) {
  const auto data = blobs();
  const auto r = run({"train", "--data", data, "--iters", "5", "--lr", "1e300", "--weight-decay",
                      "1e10", "--out-dir", path("run")});
  EXPECT_EQ(r.code, 3) << r.err;
}

TEST_F(Cli, EvalPerfectRanking) {
  {
    std::ofstream d(path("toy.csv"));
    d << "label,f1\n1,2\n1,3\n-1,-1\n-1,-2\n-1,0\n";
    std::ofstream m(path("model.json"));
    m << R"({"kind":"linear","input_dim":1,"hidden_dim":0,"output_bound":1,"weights":[1]})";
  }
  const auto r = run({"eval", "--data", path("toy.csv"), "--model", path("model.json"),
                      "--pr-curve", path("pr.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("empirical_auprc 1\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("surrogate_risk"), std::string::npos);
  EXPECT_NE(r.out.find("ap_loss"), std::string::npos);
  EXPECT_EQ(slurp(path("pr.csv")).substr(0, 17), "recall,precision\n");
}

TEST_F(Cli, EvalHeaderless) {
  {
    std::ofstream d(path("toy.csv"));
    d << "1,2\n1,3\n-1,-1\n-1,-2\n-1,0\n";
    std::ofstream m(path("model.json"));
    m << R"({"kind":"linear","input_dim":1,"hidden_dim":0,"output_bound":1,"weights":[1]})";
  }
  const auto r = run({"eval", "--data", path("toy.csv"), "--model", path("model.json"), "--header",
                      "false"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("empirical_auprc 1\n"), std::string::npos) << r.out;
}

TEST_F(Cli, EvalPrCurveAreaMatchesPrintedAuprc) {
  const auto data = blobs();
  ASSERT_EQ(run({"train", "--data", data, "--iters", "30", "--out-dir", path("run")}).code, 0);
  const auto r = run({"eval", "--data", data, "--model", path("run/model.json"), "--pr-curve",
                      path("pr.csv"), "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const double printed = nlohmann::json::parse(r.out)["empirical_auprc"];
  std::ifstream in(path("pr.csv"));
  std::string line;
  std::getline(in, line);
  double area = 0.0, prev = 0.0;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    const double recall = std::stod(line.substr(0, comma));
    const double precision = std::stod(line.substr(comma + 1));
    area += (recall - prev) * precision;
    prev = recall;
  }
  EXPECT_NEAR(area, printed, 1e-12);
}

TEST_F(Cli, EvalRejectsBadCheckpoints) {
  const auto data = blobs();
  {
    std::ofstream m(path("corrupt.json"));
    m << "{\"kind\": \"linear\", ";
    std::ofstream w(path("wrongdim.json"));
    w << R"({"kind":"linear","input_dim":3,"hidden_dim":0,"output_bound":1,"weights":[1,2,3]})";
  }
  EXPECT_EQ(run({"eval", "--data", data, "--model", path("corrupt.json")}).code, 2);
  EXPECT_EQ(run({"eval", "--data", data, "--model", path("wrongdim.json")}).code, 2);
  EXPECT_EQ(run({"eval", "--data", data}).code, 2);
}

TEST_F(Cli, SimulateBiasWritesCsvAndManifest) {
  const auto out = path("bias.csv");
  const auto r = run({"simulate", "bias", "--dist", "binormal", "--pi", "0.1", "--pi0", "0.2",
                      "--sizes", "64,128", "--repeats", "20", "--seed", "1", "--population",
                      "5000", "--out", out, "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = slurp(out);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "x,series,mean,std");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
  EXPECT_TRUE(fs::exists(path("bias.json")));
  const auto m = nlohmann::json::parse(slurp(path("bias.manifest.json")));
  EXPECT_EQ(m["command"], "simulate bias");
  EXPECT_EQ(m["config"]["sizes"], nlohmann::json({64, 128}));
  EXPECT_EQ(m["config"]["tau2"], 0.1);
}

TEST_F(Cli, SimulateOutputDoesNotDependOnThreads) {
  for (const char* t : {"1", "3"}) {
    ASSERT_EQ(run({"simulate", "interp", "--sizes", "8,16", "--repeats", "20", "--target-len",
                   "100", "--threads", t, "--out", path(std::string("interp") + t + ".csv")})
                  .code,
              0);
  }
  EXPECT_EQ(slurp(path("interp1.csv")), slurp(path("interp3.csv")));
}

TEST_F(Cli, SimulateErrors) {
  const auto r = run({"simulate", "bias", "--dist", "cauchy", "--out", path("x.csv")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("binormal, bibeta, offset_uniform"), std::string::npos);
  EXPECT_EQ(run({"simulate", "bias", "--sizes", "2", "--population", "100", "--out", path("x.csv")})
                .code,
            2);
  EXPECT_EQ(run({"simulate"}).code, 2);
  EXPECT_EQ(run({"simulate", "ema", "--betas", "0", "--out", path("x.csv")}).code, 2);
}

TEST_F(Cli, EnvVarSetsDefaultOutputDir) {
  ::setenv("SOPRC_OUT_DIR", path("envout").c_str(), 1);
  const auto r = run({"simulate", "interp", "--sizes", "8", "--repeats", "5", "--target-len", "50"});
  ::unsetenv("SOPRC_OUT_DIR");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(path("envout/interp.csv")));
  EXPECT_TRUE(fs::exists(path("envout/interp.manifest.json")));
}

TEST_F(Cli, HelpExitsZero) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("simulate"), std::string::npos);
}
