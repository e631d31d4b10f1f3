#include "octa/io.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(OCTA_CLI) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  std::array<char, 4096> buf;
  for (std::size_t n; (n = fread(buf.data(), 1, buf.size(), p)) > 0;) out.append(buf.data(), n);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slope(const std::string& name) { return std::string("--slope ") + OCTA_SLOPES + "/" + name; }

std::string read(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

std::string temp_config(const std::string& name, const std::string& body) {
  const std::string path = ::testing::TempDir() + name;
  std::ofstream(path) << body;
  return "--slope " + path;
}

bool has_float(const octa::Json& j) {
  if (j.is_number_float()) return true;
  for (const auto& x : j) {
    if (j.is_object() || j.is_array())
      if (has_float(x)) return true;
  }
  return false;
}

}  // namespace

TEST(Cli, AnalyzeAmmannBeenkerIsNotDetermined) {
  auto r = run("analyze " + slope("ab.toml") + " --json");
  EXPECT_EQ(r.code, 10);
  auto j = octa::Json::parse(r.out);
  EXPECT_EQ(j["format"], 1);
  EXPECT_EQ(j["analysis"]["subperiods"].size(), 4u);
  EXPECT_EQ(j["analysis"]["verdict"]["status"], "OneParameterFamily");
}

TEST(Cli, AnalyzeFig4AndRational) {
  auto f4 = run("analyze " + slope("fig4.toml") + " --json");
  EXPECT_EQ(f4.code, 10);
  EXPECT_EQ(octa::Json::parse(f4.out)["analysis"]["verdict"]["status"], "FewerThanThreeTypes");
  auto rat = run("analyze " + slope("rational.toml") + " --json");
  EXPECT_EQ(rat.code, 0);
  EXPECT_EQ(octa::Json::parse(rat.out)["analysis"]["verdict"]["status"], "Determined");
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("analyze " + temp_config("deg.toml", "format = 1\nu = [1,0,1,0]\nv = [0,1,0,0]\n")).code, 3);
  EXPECT_EQ(run("analyze " + temp_config("bad.toml", "format = 7\n")).code, 2);
  EXPECT_EQ(run("analyze --slope /nonexistent.toml").code, 2);
  EXPECT_EQ(run("tile " + slope("ab.toml") + " --radius -3").code, 2);
  EXPECT_EQ(run("flips " + slope("ab.toml")).code, 2);
  EXPECT_EQ(run("flips " + slope("ab.toml") + " --shift 1/2,1/3").code, 2);
  EXPECT_EQ(run("flips " + slope("ab.toml") + " --radius 20 --shift 1/2,-1/3,1/5,1/7").code, 3);
  EXPECT_EQ(run("tile " + slope("rational.toml")).code, 3);
  EXPECT_EQ(run("").code, 2);
}

TEST(Cli, OutputsAreByteIdenticalAndFloatFree) {
  const std::string dir = ::testing::TempDir();
  for (const std::string cmd : {"tile --radius 15", "atlas --radius 15 --r 1", "freq --radius 15 --seed 3",
                                "coincidences --radius 1", "flips --radius 20 --shift 1/20,-3/140,1/30,1/100"}) {
    auto a = run(cmd + " " + slope("ab.toml") + " --json --svg " + dir + "a.svg");
    auto b = run(cmd + " " + slope("ab.toml") + " --json --svg " + dir + "b.svg");
    EXPECT_EQ(a.out, b.out) << cmd;
    EXPECT_FALSE(has_float(octa::Json::parse(a.out))) << cmd;
    if (cmd.rfind("tile", 0) == 0 || cmd.rfind("atlas", 0) == 0) {
      EXPECT_EQ(read(dir + "a.svg"), read(dir + "b.svg"));
      EXPECT_NE(read(dir + "a.svg").find("<polygon"), std::string::npos);
    }
  }
}

TEST(Cli, SeedChangesOffsetDeterministically) {
  auto a = octa::Json::parse(run("tile " + slope("ab.toml") + " --radius 10 --json --seed 5").out);
  auto b = octa::Json::parse(run("tile " + slope("ab.toml") + " --radius 10 --json --seed 6").out);
  EXPECT_NE(a["slope"]["offset"], b["slope"]["offset"]);
}

TEST(Cli, OutWritesReport) {
  const std::string path = ::testing::TempDir() + "report.json";
  auto r = run("analyze " + slope("fig4.toml") + " --json --out " + path);
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(octa::Json::parse(read(path))["analysis"]["types"], 2);
}
