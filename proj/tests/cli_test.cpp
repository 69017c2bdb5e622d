#include <gtest/gtest.h>

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

fs::path scratch() {
  static const fs::path dir = [] {
    auto p = fs::temp_directory_path() / ("nterm_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Run run(const std::string& args, const std::string& env = "") {
  const auto out = scratch() / "stdout.txt";
  const auto err = scratch() / "stderr.txt";
  const std::string cmd = env + " " + NTERM_CLI_PATH + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

nlohmann::json error_record(const Run& r) {
  const auto j = nlohmann::json::parse(r.err);
  EXPECT_TRUE(j.contains("error"));
  return j["error"];
}

} // namespace

TEST(Cli, Shells) {
  const auto r = run("shells --r inf --d 2 --m-max 3");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "m,nu,V\n0,1,1\n1,8,9\n2,16,25\n3,24,49\n");
}

TEST(Cli, HfuncConstant) {
  const auto r = run("hfunc --psi const --s 1 --n 10");
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream is(r.out);
  std::string header, row;
  std::getline(is, header);
  std::getline(is, row);
  EXPECT_EQ(header, "n,value,l_star,regime,certified,tail_error_bound");
  const double v = std::stod(row.substr(row.find(',') + 1));
  EXPECT_LE(v, 1.0);
  EXPECT_GE(v, 1.0 - 1e-3);
}

TEST(Cli, Greedy) {
  const auto f = scratch() / "f.json";
  std::ofstream(f) << R"({"d":1,"entries":[{"k":[0],"re":3,"im":0},{"k":[1],"re":2,"im":0},{"k":[-1],"re":1,"im":0}]})";
  const auto r = run("greedy --in " + f.string() + " --n 1 --p 1");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "n,p,sp_error\n1,1,3\n");
}

TEST(Cli, RatesCsvAndJson) {
  const auto js = scratch() / "rates.json";
  const auto csv = scratch() / "rates.csv";
  const auto r = run("rates --quantity class_sp --psi power:s=2 --q 1 --p 1 --n-grid 16,32,64 --threads 2 --out " +
                     csv.string() + " --json " + js.string());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto text = slurp(csv);
  EXPECT_EQ(text.substr(0, text.find('\n')), "n,computed,predicted,ratio");
  const auto j = nlohmann::json::parse(slurp(js));
  EXPECT_EQ(j["rows"].size(), 3u);
  EXPECT_EQ(j["metadata"]["command"], "rates");
  EXPECT_EQ(j["metadata"]["psi"], "power:s=2");
  EXPECT_EQ(j["metadata"]["n-grid"], "16,32,64");
  EXPECT_EQ(j["metadata"]["threads"], "2");
  EXPECT_EQ(j["metadata"]["table"]["theorem"], "assertion41");
  // 17 significant digits
  std::istringstream is(text);
  std::string line;
  std::getline(is, line);
  std::getline(is, line);
  const auto comma = line.find(',');
  const double computed = std::stod(line.substr(comma + 1));
  EXPECT_EQ(computed, j["rows"][0]["computed"].get<double>());
}

TEST(Cli, FlagsRoundTrip) {
  const auto js = scratch() / "en.json";
  const auto r1 = run("en-class --psi powerlog:s=1.5,eps=-0.5 --r 1 --d 2 --q 2 --p 1 --n-grid 8,16 --json " + js.string());
  ASSERT_EQ(r1.code, 0) << r1.err;
  const auto meta = nlohmann::json::parse(slurp(js))["metadata"];
  std::string args = meta["command"].get<std::string>();
  for (auto& [k, v] : meta.items()) {
    if (k == "command" || k == "json" || k == "out" || v.is_null()) continue;
    args += " --" + k + " " + v.get<std::string>();
  }
  const auto r2 = run(args);
  ASSERT_EQ(r2.code, 0) << r2.err << " for " << args;
  EXPECT_EQ(r1.out, r2.out);
}

TEST(Cli, Deterministic) {
  const auto a = run("lemma51 --p 2,4 --n-grid 8,16 --samples 5 --seed 3");
  const auto b = run("lemma51 --p 2,4 --n-grid 8,16 --samples 5 --seed 3 --threads 4");
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const auto c = run("rates --psi power:s=2 --n-grid 16,32,64,128");
  const auto d = run("rates --psi power:s=2 --n-grid 16,32,64,128 --threads 3");
  EXPECT_EQ(c.out, d.out);
}

TEST(Cli, CheckPsi) {
  const auto r = run("check-psi --psi exp:R=2");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("B.in_class,false"), std::string::npos);
  const auto q = run("check-psi --psi power:s=1 --s 2 --d 1");
  EXPECT_NE(q.out.find("B.in_class,true"), std::string::npos);
  EXPECT_NE(q.out.find("decay.passes,true"), std::string::npos);
}

TEST(Cli, ParseErrorsExitTwo) {
  for (const char* args : {"", "frobnicate", "shells --d x", "hfunc --psi cubic:s=1 --n 3", "hfunc --n 3 --n-grid 4,5",
                           "rates --n-grid 32,16", "rates --quantity nope", "shells --r -1", "greedy --n 1"}) {
    const auto r = run(args);
    EXPECT_EQ(r.code, 2) << args;
    const auto e = error_record(r);
    EXPECT_TRUE(e["kind"].is_string()) << args;
    EXPECT_EQ(e["exit_code"], 2);
  }
}

TEST(Cli, ComputeErrorsExitOne) {
  const auto r = run("shells --r 2 --d 3 --m-max 50", "NTERM_BUDGET_POINTS=1000");
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(error_record(r)["kind"], "budget");
  const auto b = run("shells --r 1.5 --d 3 --m-max 50 --budget 1000");
  EXPECT_EQ(b.code, 1);
  const auto c = run("en-class --psi power:s=0.3 --q 4 --p 1 --n 4");
  EXPECT_EQ(c.code, 1);
  EXPECT_EQ(error_record(c)["kind"], "convergence");
}
