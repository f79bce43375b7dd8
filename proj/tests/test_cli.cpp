#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Result
{
  int code;
  std::string output;
};

Result run(const std::string& args, const std::string& env = "")
{
  const std::string cmd = env + " " + LEVYSHE_CLI_PATH + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe))
    out.append(buf, n);
  const int status = pclose(pipe);
  return { WIFEXITED(status) ? WEXITSTATUS(status) : -1, out };
}

fs::path fresh_dir(const std::string& name)
{
  auto p = fs::temp_directory_path() / ("levyshe_test_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p)
{
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

TEST_CASE("help and version")
{
  auto r = run("--help");
  CHECK(r.code == 0);
  CHECK(r.output.find("check-exponent") != std::string::npos);
  r = run("simulate --help");
  CHECK(r.code == 0);
  CHECK(r.output.find("--replicas") != std::string::npos);
  CHECK(r.output.find("1000") != std::string::npos);
}

TEST_CASE("check-exponent prints theta and admissibility")
{
  auto r = run("check-exponent --alpha 2 --beta 2");
  CHECK(r.code == 0);
  CHECK(r.output.find("theta=1") != std::string::npos);
  CHECK(r.output.find("admissible=true") != std::string::npos);

  r = run("check-exponent --alpha 1.2 --beta 2");
  CHECK(r.code == 0);
  CHECK(r.output.find("admissible=false") != std::string::npos);

  r = run("check-exponent --alpha 1.3333333333333333 --beta 2");
  CHECK(r.code == 0);
  CHECK(r.output.find("boundary=true") != std::string::npos);
  CHECK(r.output.find("admissible=true") != std::string::npos);

  r = run("check-exponent --alpha 2.5 --beta 2");
  CHECK(r.code == 1);
  CHECK(r.output.rfind("error:config:", 0) == 0);
}

TEST_CASE("configuration errors exit 1 and write nothing")
{
  const auto dir = fresh_dir("config");
  auto r = run("simulate --no-such-flag 3 --output " + dir.string());
  CHECK(r.code == 1);
  CHECK(fs::is_empty(dir));

  r = run("simulate --replicas 1 --output " + dir.string());
  CHECK(r.code == 1);
  CHECK(r.output.find("error:config:") != std::string::npos);
  CHECK(fs::is_empty(dir));

  const auto cfg = dir / "bad.conf";
  std::ofstream(cfg) << "replicas = 10\nbogus_key = 4\n";
  r = run("simulate --config " + cfg.string() + " --output " + (dir / "o").string());
  CHECK(r.code == 1);
  CHECK(r.output.find("bogus_key") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "o"));

  r = run("simulate --config " + (dir / "missing.conf").string());
  CHECK(r.code == 3);
  CHECK(r.output.find("error:io:") != std::string::npos);
}

TEST_CASE("unwritable output exits 3")
{
  const auto dir = fresh_dir("io");
  std::ofstream(dir / "file") << "x";
  const auto r = run("kernel --output " + (dir / "file" / "sub").string());
  CHECK(r.code == 3);
  CHECK(r.output.find("error:io:") != std::string::npos);
}

TEST_CASE("simulate writes rows and metadata; config file and flags combine")
{
  const auto dir = fresh_dir("simulate");
  const auto cfg = dir / "run.conf";
  std::ofstream(cfg) << "# small run\nreplicas = 50\nm_space = 16\nk_time = 8\nrun_id = small\n";
  const auto r = run("simulate --config " + cfg.string() + " --seed 11 --output " +
                     dir.string());
  REQUIRE(r.code == 0);
  const auto csv = slurp(dir / "small.csv");
  CHECK(csv.rfind("# levyshe-csv v1\nrun_id,seed,", 0) == 0);
  CHECK(csv.find("u_variance") != std::string::npos);
  const auto meta = nlohmann::json::parse(slurp(dir / "small.metadata.json"));
  CHECK(meta["seed"] == 11);
  CHECK(meta["seed_source"] == "flag");
  CHECK(meta["config"]["replicas"] == "50");
  CHECK(meta["config_sources"]["replicas"] == "file");
  CHECK(meta["config_sources"]["m_space"] == "file");
  CHECK(meta["config_sources"]["horizon"] == "default");
  CHECK_FALSE(meta["config"].contains("workers"));
  CHECK(meta.contains("rng"));
}

TEST_CASE("LEVYSHE_SEED overrides and is recorded")
{
  const auto dir = fresh_dir("seed");
  const auto r = run("simulate --replicas 20 --m-space 16 --k-time 4 --seed 3 --output " +
                       dir.string(),
                     "LEVYSHE_SEED=424242");
  REQUIRE(r.code == 0);
  const auto meta = nlohmann::json::parse(slurp(dir / "simulate.metadata.json"));
  CHECK(meta["seed"] == 424242);
  CHECK(meta["seed_source"] == "env:LEVYSHE_SEED");
  CHECK(slurp(dir / "simulate.csv").find(",424242,") != std::string::npos);
}

TEST_CASE("JSON output and worker-count independence")
{
  const auto dir = fresh_dir("workers");
  const std::string common = "picard --replicas 40 --m-space 16 --k-time 8 --format json";
  REQUIRE(run(common + " --workers 1 --output " + dir.string()).code == 0);
  const auto ja = slurp(dir / "picard.json");
  const auto ma = slurp(dir / "picard.metadata.json");
  fs::remove_all(dir);
  REQUIRE(run(common + " --workers 3 --output " + dir.string()).code == 0);
  CHECK(ja == slurp(dir / "picard.json"));
  CHECK(ma == slurp(dir / "picard.metadata.json"));
  const auto doc = nlohmann::json::parse(ja);
  CHECK(doc["schema"] == "levyshe-rows v1");
  CHECK(doc["rows"].size() > 0);
}
