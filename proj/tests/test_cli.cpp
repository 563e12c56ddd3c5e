#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("degwalk_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()) + "_" +
            std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  Result run(const std::string& args) const {
    const std::string out = path("stdout.txt");
    const std::string cmd = std::string(DEGWALK_CLI) + " " + args + " > " + out + " 2> " + path("stderr.txt");
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read(out)};
  }

  static std::string read(const std::string& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  static std::size_t lines(const std::string& p) {
    std::ifstream in(p);
    std::size_t n = 0;
    for (std::string l; std::getline(in, l);) ++n;
    return n;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, WalkCountsMatchSchedule) {
  auto r = run("walk --dataset karate --strategy degree --walks-per-degree 5 --walk-length 10 -o " + path("d.txt"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(lines(path("d.txt")), 780u);
  EXPECT_NE(r.out.find("\"total_walks\":780"), std::string::npos) << r.out;

  r = run("walk --dataset karate --strategy fixed --walks-per-node 40 --walk-length 10 -o " + path("f.txt"));
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(lines(path("f.txt")), 1360u);
}

TEST_F(Cli, WalkOutputIndependentOfThreads) {
  ASSERT_EQ(run("walk --walk-length 8 --threads 1 -o " + path("a.txt")).code, 0);
  ASSERT_EQ(run("walk --walk-length 8 --threads 4 -o " + path("b.txt")).code, 0);
  EXPECT_EQ(read(path("a.txt")), read(path("b.txt")));
}

TEST_F(Cli, WalkInputErrors) {
  EXPECT_EQ(run("walk --dataset /nonexistent/edges.txt -o " + path("x.txt")).code, 2);
  std::ofstream(path("bad.txt")) << "1 2\nthree\n";
  EXPECT_EQ(run("walk --dataset " + path("bad.txt") + " -o " + path("x.txt")).code, 2);
  EXPECT_EQ(run("walk --walk-length 0 -o " + path("x.txt")).code, 2);
  EXPECT_EQ(run("walk --p -1 -o " + path("x.txt")).code, 2);
  EXPECT_EQ(run("walk --strategy sideways").code, 2);
}

TEST_F(Cli, EmbedAndEvaluate) {
  ASSERT_EQ(run("walk --walks-per-degree 3 --walk-length 10 -o " + path("c.txt")).code, 0);
  auto r = run("embed --corpus " + path("c.txt") + " --dim 16 --epochs 2 -o " + path("e.txt"));
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(lines(path("e.txt")), 35u);
  EXPECT_EQ(read(path("e.txt")).substr(0, 6), "34 16\n");

  ASSERT_EQ(run("embed --corpus " + path("c.txt") + " --dim 16 --epochs 2 -o " + path("e2.txt")).code, 0);
  EXPECT_EQ(read(path("e.txt")), read(path("e2.txt")));

  EXPECT_EQ(run("embed --corpus " + path("c.txt") + " --dim 0 -o " + path("z.txt")).code, 2);
  EXPECT_EQ(run("embed --corpus /nonexistent -o " + path("z.txt")).code, 2);

  r = run("eval nc --embedding " + path("e.txt") + " --walks-per-degree 3 --walk-length 10 --json " +
          path("nc.json"));
  ASSERT_EQ(r.code, 0) << read(path("stderr.txt"));
  EXPECT_NE(r.out.find("strategy,nwpd_or_fixed,walk_length,total_walks"), std::string::npos);
  EXPECT_NE(r.out.find("degree,3,10,468,"), std::string::npos) << r.out;
  EXPECT_NE(read(path("nc.json")).find("\"task\": \"nc\""), std::string::npos);

  ASSERT_EQ(run("walk --link-split 0.2 --split-seed 7 --walk-length 10 -o " + path("lc.txt")).code, 0);
  ASSERT_EQ(run("embed --corpus " + path("lc.txt") + " --dim 16 --epochs 2 -o " + path("le.txt")).code, 0);
  r = run("eval lp --embedding " + path("le.txt") + " --link-split 0.2 --split-seed 7 --op l2 --json " +
          path("lp.json"));
  ASSERT_EQ(r.code, 0) << read(path("stderr.txt"));
  const std::string lp = read(path("lp.json"));
  EXPECT_NE(lp.find("\"operator\": \"l2\""), std::string::npos) << lp;
  EXPECT_NE(lp.find("\"auc\""), std::string::npos);
  EXPECT_EQ(run("eval lp --embedding " + path("le.txt") + " --op concat").code, 2);
}

TEST_F(Cli, Bench) {
  std::ofstream(path("empty.plan")) << "strategies = fixed:2\nwalk_lengths = 5\nseeds =\n";
  EXPECT_EQ(run("bench --plan " + path("empty.plan")).code, 2);
  std::ofstream(path("ok.plan")) << "strategies = fixed:2, degree:1\nwalk_lengths = 5\nseeds = 1\ntasks = cd\n"
                                 << "dim = 8\nepochs = 1\noutput = " << path("out") << "\n";
  auto r = run("bench --plan " + path("ok.plan"));
  ASSERT_EQ(r.code, 0) << read(path("stderr.txt"));
  EXPECT_NE(r.out.find("\"computed\":2"), std::string::npos) << r.out;
  EXPECT_TRUE(fs::exists(path("out/table_cd.csv")));
  r = run("bench --plan " + path("ok.plan"));
  EXPECT_NE(r.out.find("\"computed\":0"), std::string::npos) << r.out;
}

TEST_F(Cli, AnalyzeScaleFree) {
  auto r = run("analyze scalefree --gamma 3 --kmin 2 --n 1000000");
  ASSERT_EQ(r.code, 0);
  std::istringstream in(r.out);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  // Sixth column is the asymptotic mean degree.
  std::istringstream cells(row);
  std::string cell;
  for (int i = 0; i < 6; ++i) std::getline(cells, cell, ',');
  EXPECT_EQ(cell, "4");

  r = run("analyze scalefree --gamma 2 --kmin 1 --n 100");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.substr(r.out.size() - 2), "1\n");

  r = run("analyze scalefree --gamma 2.2,2.5,2.8 --kmin 1,2 --n 1000,1000000");
  EXPECT_EQ(lines(path("stdout.txt")), 13u);

  EXPECT_EQ(run("analyze scalefree --gamma 1 --kmin 1 --n 10").code, 2);
  EXPECT_EQ(run("analyze scalefree --gamma 0.5 --kmin 1 --n 10").code, 2);
}

TEST_F(Cli, MiscCommands) {
  auto r = run("fetch-instructions");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("cora.cites"), std::string::npos);
  r = run("info --dataset karate");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("\"edges\":78"), std::string::npos) << r.out;
  EXPECT_EQ(run("no-such-command").code, 2);
}
