// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include <gtest/gtest.h>

#include "c3b/io.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path root = fs::temp_directory_path() / "c3b_test_cli";

int run(const std::string& args) {
  const std::string cmd = std::string(C3B_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::size_t file_count(const fs::path& dir) {
  if (!fs::exists(dir)) return 0;
  std::size_t n = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) ++n;
  return n;
}

class Cli : public ::testing::Test {
protected:
  void SetUp() override {
    fs::remove_all(root);
    fs::create_directories(root);
  }
  void TearDown() override { fs::remove_all(root); }
};

}  // namespace

TEST_F(Cli, MissingSubcommand) { EXPECT_EQ(run(""), 2); }

TEST_F(Cli, UnknownFlagWritesNothing) {
  EXPECT_EQ(run("geometry --bogus --out " + (root / "g").string()), 2);
  EXPECT_EQ(file_count(root / "g"), 0u);
}

TEST_F(Cli, BadWindowWritesNothing) {
  EXPECT_EQ(run("spectrum --k 5:1 --out " + (root / "s").string()), 2);
  EXPECT_EQ(file_count(root / "s"), 0u);
}

TEST_F(Cli, UnknownConfigKey) {
  std::ofstream(root / "bad.json") << R"({"bogus": 1})";
  EXPECT_EQ(run("geometry --config " + (root / "bad.json").string() + " --out " + (root / "g").string()), 2);
  EXPECT_EQ(file_count(root / "g"), 0u);
}

TEST_F(Cli, OutOfRangeOption) {
  EXPECT_EQ(run("geometry --a 0.9 --out " + (root / "g").string()), 2);
  EXPECT_EQ(run("lyapunov --collisions 10 --out " + (root / "l").string()), 2);
  EXPECT_EQ(file_count(root / "g") + file_count(root / "l"), 0u);
}

TEST_F(Cli, FailedStageWritesNothing) {
  ASSERT_EQ(run("spectrum --m 0 --k 5:8 --workers 1 --out " + (root / "s").string()), 0);
  const auto input = root / "s" / "spectrum_a0.2_m0.csv";
  ASSERT_TRUE(fs::exists(input));
  // a handful of levels cannot be unfolded
  EXPECT_EQ(run("stats --nnls --input " + input.string() + " --out " + (root / "st").string()), 1);
  EXPECT_EQ(file_count(root / "st"), 0u);
}

TEST_F(Cli, GeometryArtifacts) {
  ASSERT_EQ(run("geometry --out " + (root / "g").string()), 0);
  const auto table = c3b::io::read_file(root / "g" / "geometry_a0.2.csv");
  EXPECT_NE(table.find("# end"), std::string::npos);
  EXPECT_TRUE(fs::exists(root / "g" / "boundary_a0.2.svg"));
}

TEST_F(Cli, SpectrumIsIndependentOfWorkers) {
  ASSERT_EQ(run("spectrum --m 0,2 --k 14:17 --workers 1 --out " + (root / "w1").string()), 0);
  ASSERT_EQ(run("spectrum --m 0,2 --k 14:17 --workers 2 --out " + (root / "w2").string()), 0);
  for (const char* f : {"spectrum_a0.2_m0.csv", "spectrum_a0.2_m2.csv"}) {
    const auto a = c3b::io::read_file(root / "w1" / f);
    const auto b = c3b::io::read_file(root / "w2" / f);
    EXPECT_EQ(a, b) << f;
    EXPECT_TRUE(c3b::io::spectrum_from_string(a).checksum_ok);
  }
}
