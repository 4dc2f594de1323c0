#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int status = -1;
  std::string out;
};

Outcome run(const std::string& args) {
  const std::string cmd = std::string(TWOPARTY_EXE) + " " + args + " 2>&1";
  Outcome o;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return o;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) o.out.append(buf.data(), n);
  const int raw = pclose(pipe);
  o.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return o;
}

std::map<std::string, std::string> key_values(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("tpc-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const char* name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

}  // namespace

TEST_F(Cli, RunIsDeterministic) {
  const auto a = run("run rabin-ot --bits 64 --seed-a 1 --seed-b 2 -o " + path("a.log"));
  const auto b = run("run rabin-ot --bits 64 --seed-a 1 --seed-b 2 -o " + path("b.log"));
  ASSERT_EQ(a.status, 0) << a.out;
  ASSERT_EQ(b.status, 0) << b.out;
  EXPECT_EQ(slurp(path("a.log")), slurp(path("b.log")));
  EXPECT_FALSE(slurp(path("a.log")).empty());
}

TEST_F(Cli, LoopbackWritesTheSameLog) {
  ASSERT_EQ(run("run tscp --seed-a 5 --seed-b 6 -o " + path("a.log")).status, 0);
  ASSERT_EQ(run("run tscp --seed-a 5 --seed-b 6 --transport loopback -o " + path("b.log")).status, 0);
  EXPECT_EQ(slurp(path("a.log")), slurp(path("b.log")));
}

TEST_F(Cli, CoinFlipSmoke) {
  const auto r = run("run coin-flip-qrp --bits 16 --seed-a 3 --seed-b 4");
  ASSERT_EQ(r.status, 0) << r.out;
  const auto kv = key_values(r.out);
  EXPECT_EQ(kv.at("protocol"), "coin-flip-qrp");
  EXPECT_EQ(kv.at("status"), "completed");
}

TEST_F(Cli, StringVerificationRate) {
  const auto r = run("stats sv --n 8 --k 2 --secret-a 10101010 --secret-b 10101011 --trials 10000");
  ASSERT_EQ(r.status, 0) << r.out;
  const auto kv = key_values(r.out);
  EXPECT_EQ(kv.at("trials"), "10000");
  EXPECT_NEAR(std::stod(kv.at("equal_rate")), 0.25, 0.015);
  EXPECT_EQ(std::stod(kv.at("abort_rate")), 0.0);
  EXPECT_LE(std::stod(kv.at("equal_rate_ci95_low")), std::stod(kv.at("equal_rate")));
  EXPECT_GE(std::stod(kv.at("equal_rate_ci95_high")), std::stod(kv.at("equal_rate")));
}

TEST_F(Cli, StatsOutputIsKeyValue) {
  const auto r = run("stats rabin-ot --bits 32 --trials 200");
  ASSERT_EQ(r.status, 0) << r.out;
  std::istringstream in(r.out);
  std::string line;
  while (std::getline(in, line)) EXPECT_NE(line.find('='), std::string::npos) << line;
}

TEST_F(Cli, VerifyAcceptsHonestLog) {
  ASSERT_EQ(run("run zkp-graph --seed-a 1 --seed-b 9 -o " + path("z.log")).status, 0);
  const auto v = run("verify-transcript " + path("z.log"));
  EXPECT_EQ(v.status, 0) << v.out;
}

TEST_F(Cli, TamperedHexNamesTheStep) {
  ASSERT_EQ(run("run rabin-ot --bits 64 --seed-a 1 --seed-b 2 -o " + path("a.log")).status, 0);
  std::string log = slurp(path("a.log"));
  const auto at = log.find(" Response ");
  ASSERT_NE(at, std::string::npos);
  const auto last = log.find('\n', at) - 1;
  log[last] = log[last] == '0' ? '1' : '0';
  std::ofstream(path("b.log"), std::ios::binary) << log;
  const auto v = run("verify-transcript " + path("b.log"));
  EXPECT_EQ(v.status, 1) << v.out;
  EXPECT_NE(v.out.find("Response"), std::string::npos) << v.out;
}

TEST_F(Cli, TruncatedLogIsAFramingError) {
  ASSERT_EQ(run("run rabin-ot --bits 64 --seed-a 1 --seed-b 2 -o " + path("a.log")).status, 0);
  const std::string log = slurp(path("a.log"));
  std::ofstream(path("t.log"), std::ios::binary) << log.substr(0, log.size() / 2);
  EXPECT_EQ(run("verify-transcript " + path("t.log")).status, 3);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run("").status, 2);
  EXPECT_EQ(run("run no-such-protocol").status, 2);
  EXPECT_EQ(run("stats rabin-ot --trials 5").status, 2);
  EXPECT_EQ(run("run rabin-ot --bits banana").status, 2);
  EXPECT_EQ(run("verify-transcript " + path("missing.log")).status, 2);
}

TEST_F(Cli, CatalogListsEveryProtocol) {
  const auto r = run("catalog");
  ASSERT_EQ(r.status, 0);
  for (const char* id : {"rabin-ot", "graph-ot", "dlp-1of2-ot", "graph-1of2-ot", "secret-sale", "ot-from-two-1of2",
                         "coin-flip-qrp", "coin-flip-general", "secret-exchange-graph", "contract-sign", "tscp",
                         "byzantine-agreement", "sv", "millionaires", "bc-qrp", "bc-qrp-qnr", "bc-dlp", "bc-graph",
                         "zkp-qrp", "zkp-qrp-cheat", "zkp-graph", "zkp-graph-cheat"})
    EXPECT_NE(r.out.find(std::string(id) + "  ["), std::string::npos) << id;
}
