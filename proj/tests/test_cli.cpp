#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include <gtest/gtest.h>

#include "bif/io.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

fs::path work_dir() {
  static const fs::path p = [] {
    auto d = fs::temp_directory_path() / ("bif_test_cli_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return p;
}

Run run_bif(const std::string& args) {
  const auto dir = work_dir();
  const auto out = dir / "stdout.txt", err = dir / "stderr.txt";
  const std::string cmd =
      std::string("\"") + BIF_EXE + "\" " + args + " > \"" + out.string() + "\" 2> \"" + err.string() + "\"";
  const int st = std::system(cmd.c_str());
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, bif::read_file(out), bif::read_file(err)};
}

std::string config(const std::string& name, const std::string& json) {
  const auto p = work_dir() / name;
  bif::write_file_atomic(p, json);
  return p.string();
}

std::string out_dir(const std::string& name) { return (work_dir() / name).string(); }

}  // namespace

TEST(Cli, Chars) {
  const auto r = run_bif("chars --config " + config("ref.json", R"({"p":1,"q":1,"K":1,"L":5})"));
  EXPECT_EQ(r.code, 0) << r.err;
  const auto t = bif::parse_csv(r.out);
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_NEAR(t.rows[0][2], 0.75, 1e-12);
  EXPECT_NE(r.out.find("# config "), std::string::npos);
}

TEST(Cli, ConfigErrorsExitTwo) {
  auto r = run_bif("chars --config " + config("bad_p.json", R"({"p":1.5})"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("0 < p <= 1"), std::string::npos);
  r = run_bif("chars --config " + config("bad_key.json", R"({"pp":1})"));
  EXPECT_EQ(r.code, 2);
  r = run_bif("chars --config " + out_dir("does_not_exist.json"));
  EXPECT_EQ(r.code, 2);
  r = run_bif("nonsense");
  EXPECT_EQ(r.code, 2);
  r = run_bif("curve-s");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("--mu"), std::string::npos);
}

TEST(Cli, CurveSWritesFiles) {
  const auto dir = out_dir("curve_s");
  const auto r = run_bif("curve-s --mu 0.1 --n 50 --out " + dir);
  EXPECT_EQ(r.code, 0) << r.err;
  const auto t = bif::parse_csv(bif::read_file(fs::path(dir) / "s_mu.csv"));
  EXPECT_EQ(t.rows.size(), 50u);
  EXPECT_TRUE(fs::exists(fs::path(dir) / "s_mu.svg"));
}

TEST(Cli, CurveSigmaRegime) {
  const auto r = run_bif("curve-sigma --lambda 0.05 --out " + out_dir("sigma_none"));
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("curve does not exist"), std::string::npos);
  const auto ok = run_bif("curve-sigma --lambda 1 --n 40 --out " + out_dir("sigma"));
  EXPECT_EQ(ok.code, 0) << ok.err;
}

TEST(Cli, ClassifyPrintsJson) {
  const auto r = run_bif("classify --mu 0.1 --lambda 0.65");
  EXPECT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["region"], "M2");
  EXPECT_EQ(j["multiplicity"], 2);
  EXPECT_EQ(j["count_check"], 2);
  EXPECT_EQ(run_bif("classify --mu 0 --lambda 1").code, 2);
}

TEST(Cli, SolveAndBifset) {
  const auto dir = out_dir("solve");
  EXPECT_EQ(run_bif("solve --mu 0.1 --lambda 0.65 --n 20 --out " + dir).code, 0);
  EXPECT_EQ(bif::parse_csv(bif::read_file(fs::path(dir) / "profiles.csv")).rows.size(), 42u);
  const auto b = run_bif("bifset --mu-min 0.01 --mu-max 0.3 --n 6 --out " + dir);
  EXPECT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(bif::parse_csv(bif::read_file(fs::path(dir) / "bifset.csv")).rows.size(), 6u);
}

TEST(Cli, VerifyCorruptedToleranceFails) {
  const auto r = run_bif("verify --config " + config("coarse.json", R"({"tol":{"quad_rel":1}})") + " --out " +
                     out_dir("verify_coarse"));
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.out.find("FAIL  criterion 1"), std::string::npos) << r.out;
}

TEST(Cli, VerifyInfiniteSlopeConfigPasses) {
  const auto r = run_bif("verify --config " + config("half.json", R"({"p":0.5,"q":1,"K":1,"L":5})") + " --out " +
                     out_dir("verify_half"));
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("N/A   criterion 2"), std::string::npos);
  EXPECT_NE(r.out.find("PASS  criterion 10"), std::string::npos);
}
