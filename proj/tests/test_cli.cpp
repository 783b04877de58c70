#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const std::string kCli = CMINHASH_CLI;
const fs::path kData = CMINHASH_DATA_DIR;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("cminhash_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  /// Runs the CLI with stdout to out.txt and stderr to err.txt; returns the exit code.
  int run(const std::string& args) {
    const std::string cmd = kCli + " " + args + " > " + (dir_ / "out.txt").string() + " 2> " +
                            (dir_ / "err.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::string out() const { return slurp(dir_ / "out.txt"); }
  std::string err() const { return slurp(dir_ / "err.txt"); }
  fs::path path(const std::string& name) const { return dir_ / name; }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  void write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name, std::ios::binary) << text;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, UsageErrorsExitOne) {
  EXPECT_EQ(run(""), 1);
  EXPECT_EQ(run("sketch --bogus"), 1);
  EXPECT_EQ(run("theory var --scheme csigmapi --dim 10 --f 5 --a 2 --k 11"), 1);
  EXPECT_NE(err().find("K must lie in [1, D]"), std::string::npos) << err();
  EXPECT_EQ(run("theory var --scheme c0pi --dim 100 --f 5 --a 2 --k 4 --exact-rational"), 1);
  EXPECT_EQ(run("oracle exact --scheme csigmapi --dim 7 --f 3 --a 1 --k 2"), 1);
  EXPECT_NE(err().find("enumeration bound exceeded"), std::string::npos);
  EXPECT_EQ(run("simulate mse --config /nonexistent.json"), 1);
}

TEST_F(CliTest, SketchThenEstimate) {
  write("v.tsv", "#dim=20\na\t0 1 2 3 4 5\nb\t3 4 5 6 7 8\nc\t10 11\n");
  ASSERT_EQ(run("sketch --input " + path("v.tsv").string() +
                " --scheme csigmapi --k 20 --seed 0x12 --out " + path("sig.tsv").string()),
            0)
      << err();
  const std::string sig = slurp(path("sig.tsv"));
  EXPECT_EQ(std::count(sig.begin(), sig.end(), '\n'), 3);
  EXPECT_NE(sig.find("a\tcsigmapi\t20\t20\t"), std::string::npos);

  ASSERT_EQ(run("estimate --signatures " + path("sig.tsv").string() + " --pairs 'a,a;a,c'"), 0) << err();
  EXPECT_EQ(out(), "id_a,id_b,estimate\na,a,1\na,c,0\n");
  ASSERT_EQ(run("estimate --signatures " + path("sig.tsv").string()), 0);
  const std::string all = out();
  EXPECT_EQ(std::count(all.begin(), all.end(), '\n'), 4);
  EXPECT_EQ(run("estimate --signatures " + path("sig.tsv").string() + " --pairs 'a,zz'"), 1);

  write("empty.tsv", "#dim=5\nx\t1\ny\t\n");
  EXPECT_EQ(run("sketch --input " + path("empty.tsv").string() + " --scheme minhash --k 3 --seed 1"), 1);
  EXPECT_NE(err().find("undefined hash of empty set"), std::string::npos);
}

TEST_F(CliTest, TheoryVarExactShowsRational) {
  ASSERT_EQ(run("theory var --scheme csigmapi --dim 6 --f 4 --a 2 --k 4 --exact-rational"), 0) << err();
  EXPECT_NE(out().find("# exact variance = 5/144"), std::string::npos) << out();
  ASSERT_EQ(run("oracle exact --scheme csigmapi --dim 6 --f 4 --a 2 --k 4"), 0);
  EXPECT_NE(out().find(",1/2,5/144"), std::string::npos) << out();
  ASSERT_EQ(run("theory var --scheme mh --dim 128 --f 4 --a 2 --k 2"), 0);
  EXPECT_EQ(out(), "scheme,D,f,a,K,variance,e_tilde,method\nminhash,128,4,2,2,0.125,NA,log-space\n");
}

TEST_F(CliTest, TheoryVarLocationFile) {
  write("loc.txt", "O x - O\n");
  ASSERT_EQ(run("theory var --scheme c0pi --dim 4 --f 3 --a 2 --k 2 --exact-rational --location " +
                path("loc.txt").string()),
            0)
      << err();
  // J/K + Theta(1)/2 - J^2 = 1/3 + 5/24 - 4/9 with Theta(1) = 5/12.
  EXPECT_NE(out().find("# exact variance = 7/72"), std::string::npos) << out();
  EXPECT_EQ(run("theory var --scheme c0pi --dim 4 --f 2 --a 2 --k 2 --location " +
                path("loc.txt").string()),
            1);
}

TEST_F(CliTest, RatioTable) {
  ASSERT_EQ(run("theory ratio --dim 64 --f 8,32 --k 1,16"), 0) << err();
  const std::string o = out();
  EXPECT_EQ(o.substr(0, o.find('\n')), "D,f,K,ratio,increasing_in_K,increasing_in_f");
  EXPECT_NE(o.find("64,8,1,1,NA,NA"), std::string::npos) << o;
}

TEST_F(CliTest, SimulateIsByteIdentical) {
  const std::string cfg = (kData / "small_mse.json").string();
  ASSERT_EQ(run("simulate mse --config " + cfg + " --out " + path("a.csv").string()), 0) << err();
  ASSERT_EQ(run("simulate mse --config " + cfg + " --out " + path("b.csv").string()), 0);
  const std::string a = slurp(path("a.csv"));
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(path("b.csv")));
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 1 + 2 * 3 * 3);
}

TEST_F(CliTest, BundledCorporaRegenerate) {
  ASSERT_EQ(run("corpus text --n 200 --dim 1024 --seed 0x7e47"), 0);
  EXPECT_EQ(out(), slurp(kData / "text_corpus.tsv"));
  ASSERT_EQ(run("corpus blocked --n 100 --dim 1024 --seed 0xb10c"), 0);
  EXPECT_EQ(out(), slurp(kData / "blocked_corpus.tsv"));
}

TEST_F(CliTest, PermDump) {
  ASSERT_EQ(run("perm --dim 5 --seed 0x2a"), 0);
  const std::string o = out();
  EXPECT_EQ(o.substr(0, o.find('\n')), "dim=5 seed=000000000000002a");
}
