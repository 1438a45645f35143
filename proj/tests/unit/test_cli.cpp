#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "buridan/csv_io.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "doctest.h"

using namespace buridan;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("buridan_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path operator/(const std::string& s) const { return path / s; }
};

int run(std::vector<std::string> args, std::string* err_out = nullptr) {
  args.insert(args.begin(), "buridan");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (err_out) *err_out = err.str();
  return code;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path write_config(const TempDir& dir, const std::string& name, const std::string& text) {
  const fs::path p = dir / name;
  std::ofstream(p) << text;
  return p;
}

const char* kLine = R"({"model":"line","params":{"01":0.05,"10":0.08},"v":0.1,"n_steps":400,"seeds":[7]})";
const char* kTriangle =
    R"({"model":"triangle","params":{"01":0.001,"02":0.006,"10":0.002,"12":0.003,"20":0.004,"21":0.005},
        "v":0.01,"n_steps":300,"noise_sigma":0.01,"seeds":[1],
        "estimator":{"method":"state_detection","denoise":{"method":"butterworth"}}})";

}  // namespace

TEST_CASE("config parsing fills defaults and rejects bad input") {
  const auto c = cli::parse_config(nlohmann::json::parse(kLine));
  CHECK(c.model == cli::Model::Line);
  CHECK(c.params(0, 1) == 0.05);
  CHECK(c.start()[0] == 0.5);
  CHECK(c.seeds == std::vector<std::uint64_t>{7});
  CHECK(cli::parse_config(cli::to_json(c)).params == c.params);

  const auto t = cli::parse_config(nlohmann::json::parse(kTriangle));
  CHECK(t.start().isApprox(Eigen::Vector2d(1.0 / 3, 1.0 / 3)));
  CHECK(t.estimator.denoise.method == Denoiser::Butterworth);

  auto kind = [](const std::string& text) {
    try {
      cli::parse_config(nlohmann::json::parse(text));
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Internal;
  };
  CHECK(kind(R"({"model":"line"})") == ErrorKind::Config);
  CHECK(kind(R"({"model":"cube","params":{"01":0.1}})") == ErrorKind::Config);
  CHECK(kind(R"({"model":"line","params":{"01":0.1,"10":0.1},"seeds":[]})") == ErrorKind::Config);
  CHECK(kind(R"({"model":"line","params":{"01":0.1,"10":0.1},"n_steps":1})") == ErrorKind::Config);
  CHECK(kind(R"({"model":"line","params":{"01":0.1,"10":0.1},"x0":1.0})") == ErrorKind::Config);
  CHECK(kind(R"({"model":"line","params":{"01":0.1,"10":0.1},"colour":1})") == ErrorKind::Config);
  CHECK(kind(R"({"model":"line","params":{"01":"a","10":0.1}})") == ErrorKind::Config);
  CHECK(kind(R"({"model":"poisson","params":{"01":1.0}})") == ErrorKind::Config);

  CHECK(cli::parse_seed_list("3,1,2") == std::vector<std::uint64_t>{3, 1, 2});
  CHECK_THROWS_AS(cli::parse_seed_list("1,,2"), Error);
  CHECK_THROWS_AS(cli::parse_seed_list("-1"), Error);
}

TEST_CASE("simulate writes one CSV per seed and a manifest") {
  TempDir dir;
  const auto cfg = write_config(dir, "line.json", kLine);
  const auto out = dir / "run";
  REQUIRE(run({"simulate", "--config", cfg.string(), "--out", out.string()}) == 0);
  const SeriesData d = read_series_csv((out / "traj_7.csv").string());
  CHECK(d.times.size() == 401);
  const auto m = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(m["command"] == "simulate");
  CHECK(m["files"][0]["path"] == "traj_7.csv");
  CHECK(m["files"][0]["seed"] == 7);
  CHECK(m["config"]["params"]["01"] == 0.05);
  CHECK(m.contains("version"));
}

TEST_CASE("repeated runs are byte-identical") {
  TempDir dir;
  const auto cfg = write_config(dir, "tri.json", kTriangle);
  const auto out = dir / "run";
  const std::vector<std::string> args{"simulate", "--config", cfg.string(), "--out", out.string(), "--seed", "4,2,9"};
  REQUIRE(run(args) == 0);
  std::map<std::string, std::string> first;
  for (const auto& e : fs::directory_iterator(out)) first[e.path().filename().string()] = slurp(e.path());
  CHECK(first.size() == 7);  // 3 trajectories, 3 noisy copies, manifest
  fs::remove_all(out);
  REQUIRE(run(args) == 0);
  for (const auto& [name, text] : first) CHECK(slurp(out / name) == text);
}

TEST_CASE("triangle with twenty seeds") {
  TempDir dir;
  const auto cfg = write_config(
      dir, "tri.json",
      R"({"model":"triangle","params":{"01":0.01,"02":0.01,"10":0.01,"12":0.01,"20":0.01,"21":0.01},"n_steps":50,
          "seeds":[1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,16,17,18,19,20]})");
  REQUIRE(run({"simulate", "--config", cfg.string(), "--out", (dir / "o").string()}) == 0);
  int csv = 0;
  for (const auto& e : fs::directory_iterator(dir / "o")) csv += e.path().extension() == ".csv";
  CHECK(csv == 20);
  CHECK(nlohmann::json::parse(slurp(dir / "o" / "manifest.json"))["files"].size() == 20);
}

TEST_CASE("estimate writes per-input reports and an aggregate") {
  TempDir dir;
  const auto cfg = write_config(dir, "line.json", kLine);
  REQUIRE(run({"simulate", "--config", cfg.string(), "--out", (dir / "sim").string(), "--seed", "1,2,3"}) == 0);
  const auto est = dir / "est";
  REQUIRE(run({"estimate", "--config", cfg.string(), "--out", est.string(), (dir / "sim" / "traj_1.csv").string(),
               (dir / "sim" / "traj_2.csv").string(), (dir / "sim" / "traj_3.csv").string()}) == 0);
  std::vector<double> t01;
  for (int s = 1; s <= 3; ++s) {
    const auto r = nlohmann::json::parse(slurp(est / ("report_traj_" + std::to_string(s) + ".json")));
    CHECK(r["method"] == "state_detection");
    CHECK(r["reference"]["10"] == 0.08);
    t01.push_back(r["estimates"]["01"].get<double>());
  }
  std::sort(t01.begin(), t01.end());
  const auto agg = nlohmann::json::parse(slurp(est / "aggregate.json"));
  CHECK(agg["n_reports"] == 3);
  CHECK(agg["parameters"]["01"]["median"].get<double>() == t01[1]);
  CHECK(agg["parameters"]["01"]["iqr"].get<double>() == doctest::Approx((t01[2] - t01[0]) / 2));

  // Without inputs the configured seeds are simulated in memory.
  const auto tri = write_config(dir, "tri.json", kTriangle);
  REQUIRE(run({"estimate", "--config", tri.string(), "--out", (dir / "tri").string()}) == 0);
  const auto r = nlohmann::json::parse(slurp(dir / "tri" / "report_seed_1.json"));
  CHECK(r["metadata"]["denoiser"] == "butterworth");
  CHECK(r["estimates"].size() == 6);
}

TEST_CASE("denoise writes smoothed series") {
  TempDir dir;
  const auto tri = write_config(dir, "tri.json", kTriangle);
  REQUIRE(run({"denoise", "--config", tri.string(), "--out", (dir / "d").string()}) == 0);
  const SeriesData d = read_series_csv((dir / "d" / "denoised_seed_1.csv").string());
  CHECK(d.positions.cols() == 2);
  CHECK(d.positions.rows() == 301);
}

TEST_CASE("reproduce t8 lists the monomial counts") {
  TempDir dir;
  REQUIRE(run({"reproduce", "t8", "--out", (dir / "t8").string()}) == 0);
  CHECK(slurp(dir / "t8" / "t8.csv") == "n,monomials\n2,1\n3,3\n4,16\n5,125\n");
  const auto m = nlohmann::json::parse(slurp(dir / "t8" / "manifest.json"));
  CHECK(m["config"]["id"] == "t8");
  CHECK(m["config"]["scale"] == "desk");
}

TEST_CASE("reproduce t1 has one row per parameter, length and seed") {
  TempDir dir;
  REQUIRE(run({"reproduce", "t1", "--out", (dir / "t1").string(), "--seed", "1,2"}) == 0);
  const std::string text = slurp(dir / "t1" / "t1.csv");
  CHECK(text.rfind("param,input,n_steps,seed,observed\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 2 * 2 * 2);
}

TEST_CASE("exit codes") {
  TempDir dir;
  const auto line = write_config(dir, "line.json", kLine);
  std::string err;
  CHECK(run({"reproduce", "t42"}, &err) == cli::kConfigError);
  CHECK(run({}) == cli::kConfigError);
  CHECK(run({"simulate"}) == cli::kConfigError);
  CHECK(run({"--help"}) == cli::kOk);
  CHECK(run({"simulate", "--config", (dir / "missing.json").string()}, &err) == cli::kIoError);
  CHECK(err.find("missing.json") != std::string::npos);

  const auto bad = write_config(dir, "bad.json", R"({"model":"line","params":{"01":2,"10":0.1}})");
  CHECK(run({"simulate", "--config", bad.string()}) == cli::kConfigError);
  const auto broken = write_config(dir, "broken.json", "{not json");
  CHECK(run({"simulate", "--config", broken.string()}) == cli::kConfigError);

  // An existing file where the output directory should go.
  CHECK(run({"simulate", "--config", line.string(), "--out", line.string()}, &err) == cli::kIoError);

  // Estimator and model disagree.
  const auto tri_mle = write_config(
      dir, "tri_mle.json",
      R"({"model":"triangle","params":{"01":0.01,"02":0.01,"10":0.01,"12":0.01,"20":0.01,"21":0.01},
          "n_steps":50,"estimator":{"method":"mle"}})");
  CHECK(run({"estimate", "--config", tri_mle.string(), "--out", (dir / "x").string()}) == cli::kConfigError);

  // A motionless series has zero variance, which no beta density produces.
  std::ofstream(dir / "flat.csv") << "t,x\n0,0.4\n1,0.4\n2,0.4\n3,0.4\n";
  const auto mv = write_config(dir, "mv.json",
                               R"({"model":"line","params":{"01":0.05,"10":0.08},"estimator":{"method":"mean_variance"}})");
  CHECK(run({"estimate", "--config", mv.string(), "--out", (dir / "mv").string(), (dir / "flat.csv").string()}) ==
        cli::kNumericalError);

  CHECK(cli::exit_code_for(ErrorKind::NonConvergence) == cli::kNumericalError);
  CHECK(cli::exit_code_for(ErrorKind::Io) == cli::kIoError);
  CHECK(cli::exit_code_for(ErrorKind::Domain) == cli::kConfigError);
}
