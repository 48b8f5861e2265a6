#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = freezetree::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST(Cli, SimulateCsvIsDeterministic) {
  const auto a = run({"simulate", "--profile", "power:0.5", "--alpha", "0.5", "--n", "2000", "--seed", "7"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out.rfind("# freezetree tree v1 n=2000\nvertex_id,parent_id,vertex_label,edge_label,birth\n", 0), 0u);
  EXPECT_NE(a.err.find("height="), std::string::npos);
  const auto b = run({"simulate", "--profile", "power:0.5", "--alpha", "0.5", "--n", "2000", "--seed", "7"});
  EXPECT_EQ(a.out, b.out);
  const auto c = run({"simulate", "--profile", "power:0.5", "--alpha", "0.5", "--n", "2000", "--seed", "8"});
  EXPECT_NE(a.out, c.out);
}

TEST(Cli, ReplicatesIndependentOfThreadCount) {
  const std::vector<std::string> base{"simulate", "--n", "3000", "--alpha", "0.5", "--replicates", "12",
                                      "--k", "3", "--builder", "coalescent", "--distance", "dc"};
  auto one = base;
  one.insert(one.end(), {"--threads", "1"});
  auto three = base;
  three.insert(three.end(), {"--threads", "3"});
  const auto a = run(one);
  const auto b = run(three);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("replicate,vertices,height,stalled,d_0_1,d_0_2,d_1_2"), std::string::npos);
}

TEST(Cli, SimulateFormats) {
  const auto json = run({"simulate", "--steps", "+-++-", "--format", "json", "--k", "2", "--alpha", "0.5"});
  ASSERT_EQ(json.code, 0) << json.err;
  const auto j = nlohmann::json::parse(json.out);
  EXPECT_EQ(j["tree"]["vertices"].size(), 4u);
  EXPECT_EQ(j["sequence"]["n"], 5);
  EXPECT_EQ(j["distances"]["matrix"].size(), 2u);
  EXPECT_NE(run({"simulate", "--steps", "+-++-", "--format", "dot"}).out.find("digraph"), std::string::npos);
  EXPECT_NE(run({"simulate", "--steps", "+-++-", "--format", "newick"}).out.find(";"), std::string::npos);
}

TEST(Cli, EnumerateReportsZeroDistance) {
  const auto r = run({"enumerate", "--steps", "+-++-"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("tv=0"), std::string::npos);
  EXPECT_NE(r.out.find("\"2[1:a[3:5[],4:a[]]]\",1/12,1/12"), std::string::npos);
  const auto j = run({"enumerate", "--steps", "+++", "--format", "json"});
  EXPECT_EQ(nlohmann::json::parse(j.out)["outcomes"].size(), 6u);
}

TEST(Cli, VerifyExitCodes) {
  const auto ok = run({"verify", "--suite", "exact", "--max-steps", "4"});
  EXPECT_EQ(ok.code, 0) << ok.err;
  EXPECT_NE(ok.out.find("\"pass\":true"), std::string::npos);
  EXPECT_NE(ok.err.find("PASS"), std::string::npos);

  // A zero height tolerance cannot hold at finite n.
  const auto bad = run({"verify", "--suite", "regime", "--alpha", "0.3", "--n", "3000", "--replicates", "20",
                        "--height-tolerance", "1e-9"});
  EXPECT_EQ(bad.code, 1) << bad.err;

  const auto coal = run({"verify", "--suite", "coal", "--steps", "+++", "--replicates", "20000"});
  EXPECT_EQ(coal.code, 0) << coal.err;
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"simulate", "--bogus"}).code, 2);
  EXPECT_EQ(run({"simulate", "--alpha", "1.5"}).code, 2);
  EXPECT_EQ(run({"simulate", "--profile", "wiggly"}).code, 2);
  EXPECT_EQ(run({"simulate", "--replicates", "3", "--format", "dot"}).code, 2);
  EXPECT_EQ(run({"verify", "--suite", "birth"}).code, 2);
  EXPECT_EQ(run({"verify", "--suite", "coal", "--steps", "+++", "--u", "Q1"}).code, 2);
  EXPECT_EQ(run({"enumerate", "--steps", "+++++++++"}).code, 2);
  EXPECT_EQ(run({"continuum", "--profile", "iid"}).code, 2);
  const auto help = run({"simulate", "--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("--replicates"), std::string::npos);
}

TEST(Cli, EnvironmentOverridesDefaults) {
  const std::vector<std::string> args{"continuum", "--beta", "0.25", "--k", "3", "--replicates", "5"};
  ::setenv("FREEZETREE_SEED", "99", 1);
  const auto env = run(args);
  ::unsetenv("FREEZETREE_SEED");
  auto with_flag = args;
  with_flag.insert(with_flag.end(), {"--seed", "99"});
  const auto flag = run(with_flag);
  ASSERT_EQ(env.code, 0) << env.err;
  EXPECT_EQ(env.out, flag.out);
  EXPECT_NE(env.out, run(args).out);

  ::setenv("FREEZETREE_THREADS", "zero", 1);
  EXPECT_EQ(run(args).code, 2);
  ::unsetenv("FREEZETREE_THREADS");
}

TEST(Cli, ContinuumAndExport) {
  const auto c = run({"continuum", "--beta", "0.5", "--k", "4", "--replicates", "20", "--format", "json"});
  ASSERT_EQ(c.code, 0) << c.err;
  std::istringstream lines(c.out);
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_EQ(j["surviving_clusters"], 1);
    ++count;
  }
  EXPECT_EQ(count, 20);

  const auto dir = std::filesystem::temp_directory_path() / "freezetree_cli_test";
  std::filesystem::create_directories(dir);
  const auto seq_path = (dir / "seq.json").string();
  ASSERT_EQ(run({"export", "--profile", "excursion", "--n", "50", "-o", seq_path}).code, 0);
  std::ifstream in(seq_path);
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j["n"], 51);
  const auto sim = run({"simulate", "--sequence", seq_path, "--format", "json"});
  ASSERT_EQ(sim.code, 0) << sim.err;
  EXPECT_EQ(nlohmann::json::parse(sim.out)["tree"]["vertices"].size(), 26u);
  const auto csv = run({"export", "--steps", "+-+", "--format", "csv"});
  EXPECT_EQ(csv.out, "# freezetree sequence v1 n=3\nk,step,S\n0,,1\n1,1,2\n2,-1,1\n3,1,2\n");
  std::filesystem::remove_all(dir);
}
