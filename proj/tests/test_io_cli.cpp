#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "switchvol/config.hpp"
#include "switchvol/error.hpp"
#include "switchvol/io.hpp"
#include "switchvol/pipeline.hpp"

using namespace switchvol;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("switchvol_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write(const fs::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
  return path;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SWITCHVOL_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

RunConfig small_config(const fs::path& data) {
  RunConfig cfg;
  cfg.resize_defaults(2);
  cfg.sampler.iterations = 300;
  cfg.sampler.burn_in = 100;
  cfg.sampler.seed = 17;
  cfg.data_path = data.string();
  return cfg;
}

}  // namespace

TEST_CASE("load_prices_csv") {
  const auto dir = scratch("load");
  const auto ok = load_prices_csv(write(dir / "ok.csv", "date,price\n2010-01-04,100\n2010-01-11,101.5\n"));
  CHECK(ok.size() == 2);
  CHECK(ok.dates[1] == "2010-01-11");
  CHECK(ok.values[1] == 101.5);

  const auto bad = error_of([&] { load_prices_csv(write(dir / "bad.csv", "date,price\n2010-01-04,100\n2010-01-11,abc\n")); });
  CHECK(bad.find(":3:") != std::string::npos);
  CHECK(bad.find("non-numeric") != std::string::npos);

  const auto dup = error_of([&] {
    load_prices_csv(write(dir / "dup.csv", "date,price\n2010-01-04,100\n2010-01-04,101\n2010-01-11,102\n"));
  });
  CHECK(dup.find("duplicated date") != std::string::npos);

  CHECK(error_of([&] { load_prices_csv(write(dir / "order.csv", "date,price\n2010-02-04,100\n2010-01-04,101\n")); })
            .find("not increasing") != std::string::npos);
  CHECK(error_of([&] { load_prices_csv(write(dir / "head.csv", "day,price\n2010-01-04,100\n")); }).find(":1:") !=
        std::string::npos);
  CHECK(error_of([&] { load_prices_csv(write(dir / "date.csv", "date,price\n2010-02-30,100\n2010-03-01,1\n")); })
            .find("invalid date") != std::string::npos);
  try {
    load_prices_csv(dir / "missing.csv");
    FAIL("expected an io error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::io);
  }
}

TEST_CASE("log_returns") {
  const DatedSeries p{{"2010-01-04", "2010-01-11", "2010-01-18", "2010-01-25"},
                      {100.0, 100.0, 100.0 * std::exp(1.0), 110.0 * std::exp(1.0)},
                      "test"};
  const auto r = log_returns(p);
  REQUIRE(r.size() == 3);
  CHECK(r.values[0] == 0.0);
  CHECK(r.values[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(r.values[2] == doctest::Approx(0.0953102).epsilon(1e-6));
  CHECK(r.values[2] == doctest::Approx(std::log(1.1)).epsilon(1e-14));
  CHECK(r.dates.front() == "2010-01-11");
  CHECK_THROWS_AS(log_returns(DatedSeries{{"2010-01-04", "2010-01-11"}, {100.0, 0.0}, ""}), Error);
  CHECK_THROWS_AS(log_returns(DatedSeries{{"2010-01-04"}, {100.0}, ""}), Error);
}

TEST_CASE("inner_join drops unmatched dates") {
  const DatedSeries a{{"2010-01-04", "2010-01-11", "2010-01-18"}, {1, 2, 3}, ""};
  const DatedSeries b{{"2010-01-05", "2010-01-11", "2010-01-18", "2010-01-25"}, {10, 20, 30, 40}, ""};
  const auto j = inner_join(a, b);
  CHECK(j.dates == std::vector<std::string>{"2010-01-11", "2010-01-18"});
  CHECK(j.right == std::vector<double>{20, 30});
  CHECK(j.dropped_left == 1);
  CHECK(j.dropped_right == 2);
}

TEST_CASE("configuration") {
  const auto cfg = parse_config(R"({"model": "stable", "states": 3, "seed": 5, "stable": {"alpha": 1.6}})");
  CHECK(cfg.model == ModelKind::stable);
  CHECK(cfg.states == 3);
  CHECK(cfg.alpha == 1.6);
  CHECK(cfg.jump.u.size() == 3);
  CHECK(cfg.seed() == 5);
  CHECK_THROWS_AS(parse_config(R"({"sedd": 5})"), Error);
  CHECK_THROWS_AS(parse_config(R"({"stable": {"alpha": 2.5}, "seed": 1})").validate(), Error);
  CHECK_THROWS_AS(parse_config(R"({"states": 2})").seed(), Error);

  const auto dir = scratch("config");
  ConfigOverrides o;
  o.seed = 99;
  o.iterations = 50;
  const auto merged = resolve_config(write(dir / "c.json", R"({"seed": 1, "iterations": 10, "burn_in": 5})"), o);
  CHECK(merged.seed() == 99);
  CHECK(merged.sampler.iterations == 50);
  CHECK(merged.sampler.burn_in == 5);
  // The serialized form parses back to the same document.
  CHECK(config_to_json(parse_config(config_to_json(merged))) == config_to_json(merged));
}

TEST_CASE("export_results") {
  const auto dir = scratch("export");
  const fs::path data = fs::path(SWITCHVOL_DATA_DIR) / "sp500_weekly_2007_2014.csv";
  for (ModelKind model : {ModelKind::jump, ModelKind::stable}) {
    auto cfg = small_config(data);
    cfg.model = model;
    const auto report = run_fit(cfg);
    const fs::path out = dir / model_name(model);
    export_results(report, out);
    for (const char* f : {"summary.json", "chain.csv", "indicator.csv", "filtered.csv"}) CHECK(fs::exists(out / f));

    const auto summary = nlohmann::json::parse(slurp(out / "summary.json"));
    for (const auto& row : summary.at("P_hat")) {
      double s = 0.0;
      for (const auto& v : row) s += v.get<double>();
      CHECK(std::abs(s - 1.0) < 1e-10);
    }
    CHECK(summary.at("durations").contains("of_mean_transition_matrix"));
    CHECK(summary.at("estimates").contains(model == ModelKind::jump ? "sigma_sq" : "gamma_sq"));

    const auto back = load_csv_column(out / "indicator.csv", "indicator");
    REQUIRE(back.size() == report.indicator.values.size());
    for (std::size_t t = 0; t < back.size(); ++t)
      CHECK(std::abs(back.values[t] - report.indicator.values[t]) <= 1e-12 * std::abs(report.indicator.values[t]));

    const std::string first = slurp(out / "summary.json") + slurp(out / "chain.csv");
    export_results(report, out);
    CHECK(slurp(out / "summary.json") + slurp(out / "chain.csv") == first);
  }
}

TEST_CASE("fit is deterministic given the seed") {
  const fs::path data = fs::path(SWITCHVOL_DATA_DIR) / "sp500_weekly_2007_2014.csv";
  const auto dir = scratch("determinism");
  const auto cfg = small_config(data);
  export_results(run_fit(cfg), dir / "a");
  export_results(run_fit(cfg), dir / "b");
  for (const char* f : {"summary.json", "chain.csv", "indicator.csv", "filtered.csv"})
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
}

TEST_CASE("command line") {
  const auto dir = scratch("cli");
  const std::string data = (fs::path(SWITCHVOL_DATA_DIR) / "sp500_weekly_2007_2014.csv").string();
  const std::string ref = (fs::path(SWITCHVOL_DATA_DIR) / "realized_vol_weekly_2007_2014.csv").string();

  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("no-such-verb") == 2);
  CHECK(run_cli("fit-jump --data " + data + " --iters 50 --burnin 10 --out " + (dir / "noseed").string()) == 2);
  write(dir / "bad.csv", "date,price\n2010-01-04,1\n2010-01-11,x\n");
  CHECK(run_cli("fit-jump --seed 1 --data " + (dir / "bad.csv").string() + " --out " + (dir / "bad").string()) == 2);

  const std::string common = " --seed 3 --states 2 --iters 200 --burnin 50";
  CHECK(run_cli("simulate --model jump --length 300" + common + " --out " + (dir / "sim").string()) == 0);
  CHECK(load_prices_csv(dir / "sim" / "simulated.csv").size() == 301);
  CHECK(run_cli("fit-stable --data " + (dir / "sim" / "simulated.csv").string() + common + " --out " +
                (dir / "fit_a").string()) == 0);
  CHECK(run_cli("fit-stable --data " + (dir / "sim" / "simulated.csv").string() + common + " --out " +
                (dir / "fit_b").string()) == 0);
  CHECK(slurp(dir / "fit_a" / "chain.csv") == slurp(dir / "fit_b" / "chain.csv"));

  CHECK(run_cli("compare --data " + data + " --reference " + ref + common + " --out " + (dir / "cmp").string()) == 0);
  const auto cmp = nlohmann::json::parse(slurp(dir / "cmp" / "compare.json"));
  CHECK(cmp.at("score_jump").get<double>() >= 0.0);
  CHECK(cmp.at("jump_lower").get<bool>() == (cmp.at("score_jump").get<double>() < cmp.at("score_stable").get<double>()));
  CHECK(run_cli("analyze --reference " + ref + " --out " + (dir / "cmp" / "jump").string()) == 0);
  CHECK(fs::exists(dir / "cmp" / "jump" / "analysis.json"));

  CHECK(run_cli("verify --check 6 --seed 4 --out " + (dir / "verify").string()) == 0);
}
