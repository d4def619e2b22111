#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tradenet/cli.hpp"
#include "tradenet/csvio.hpp"
#include "tradenet/panel.hpp"

using namespace tradenet;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("tradenet_cli_" + std::to_string(std::rand()) + std::to_string(std::rand()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run(const std::vector<std::string>& args, std::string* out_text = nullptr,
        std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream buf;
  buf << is.rdbuf();
  return buf.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream os(p);
  os << text;
}

}  // namespace

TEST_CASE("no command / unknown command / unknown flag fail validation") {
  std::string err;
  CHECK(run({}, nullptr, &err) == 1);
  CHECK(err.find("validation") != std::string::npos);
  CHECK(run({"transmogrify"}) == 1);
  CHECK(run({"simulate", "--frobnicate", "1"}) == 1);
  CHECK(run({"--help"}) == 0);
}

TEST_CASE("config rejects unknown keys and bad values") {
  TempDir tmp;
  const fs::path cfg = tmp.path / "cfg.json";
  write_file(cfg, R"({"overrides": {"params.bogus": 1}})");
  CHECK(run({"simulate", "--config", cfg.string()}) == 1);

  write_file(cfg, R"({"mystery_section": {}})");
  CHECK(run({"simulate", "--config", cfg.string()}) == 1);

  write_file(cfg, R"({"overrides": {"params.rho": 0.5}})");  // violates rho > 1
  CHECK(run({"simulate", "--config", cfg.string()}) == 1);

  write_file(cfg, "not json at all {");
  CHECK(run({"simulate", "--config", cfg.string()}) == 1);
}

TEST_CASE("simulate emits the per-firm panel and a moment set with metadata") {
  TempDir tmp;
  const fs::path cfg = tmp.path / "cfg.json";
  write_file(cfg, R"({"overrides": {"sim.n_firms": 120}})");
  const int code = run({"simulate", "--config", cfg.string(), "--seed", "5", "--out",
                        (tmp.path / "run").string(), "--threads", "2"});
  CHECK(code == 0);

  const std::string firms_csv = slurp(tmp.path / "run" / "firms.csv");
  CHECK(firms_csv.find("# tradenet-csv v1 schema=firm_panel seed=5") == 0);
  CHECK(firms_csv.find("id,z,k,top_share,exports,import_value,export_value") !=
        std::string::npos);

  const std::string moments = slurp(tmp.path / "run" / "moments.json");
  CHECK(moments.find("\"mean_k\"") != std::string::npos);
  CHECK(moments.find("\"seed\": 5") != std::string::npos);
  CHECK(moments.find("\"params\"") != std::string::npos);
}

TEST_CASE("identical config and seed give byte-identical outputs, serial vs parallel") {
  TempDir tmp;
  const fs::path cfg = tmp.path / "cfg.json";
  write_file(cfg, R"({"overrides": {"sim.n_firms": 150}})");
  CHECK(run({"simulate", "--config", cfg.string(), "--seed", "9", "--out",
             (tmp.path / "a").string(), "--threads", "1"}) == 0);
  CHECK(run({"simulate", "--config", cfg.string(), "--seed", "9", "--out",
             (tmp.path / "b").string(), "--threads", "2"}) == 0);
  CHECK(slurp(tmp.path / "a" / "firms.csv") == slurp(tmp.path / "b" / "firms.csv"));
  CHECK(slurp(tmp.path / "a" / "moments.json") == slurp(tmp.path / "b" / "moments.json"));

  // Idempotent rerun over the same output directory.
  CHECK(run({"simulate", "--config", cfg.string(), "--seed", "9", "--out",
             (tmp.path / "a").string(), "--threads", "2"}) == 0);
  CHECK(slurp(tmp.path / "a" / "firms.csv") == slurp(tmp.path / "b" / "firms.csv"));
}

TEST_CASE("synthgen -> shiftshare -> regress pipeline runs end to end") {
  TempDir tmp;
  const fs::path cfg = tmp.path / "cfg.json";
  write_file(cfg, R"({
    "overrides": {"sim.n_firms": 80, "synth.n_periods": 5, "synth.n_suppliers": 20,
                  "synth.noise_sd": 0.01}
  })");
  CHECK(run({"synthgen", "--config", cfg.string(), "--seed", "11", "--out",
             (tmp.path / "gen").string()}) == 0);
  const fs::path panel_path = tmp.path / "gen" / "panel.csv";
  CHECK(fs::exists(panel_path));
  CHECK(fs::exists(tmp.path / "gen" / "truth.json"));

  const fs::path ss_cfg = tmp.path / "ss.json";
  write_file(ss_cfg, "{\"inputs\": {\"panel\": \"" + panel_path.string() + "\"}}");
  CHECK(run({"shiftshare", "--config", ss_cfg.string(), "--out",
             (tmp.path / "ss").string()}) == 0);
  CHECK(fs::exists(tmp.path / "ss" / "shocks.csv"));
  CHECK(fs::exists(tmp.path / "ss" / "shock_stats.csv"));

  const fs::path reg_cfg = tmp.path / "reg.json";
  write_file(reg_cfg, "{\"inputs\": {\"panel\": \"" + panel_path.string() +
                          "\", \"shocks\": \"" + (tmp.path / "ss" / "shocks.csv").string() +
                          "\"}}");
  CHECK(run({"regress", "--config", reg_cfg.string(), "--out",
             (tmp.path / "reg").string()}) == 0);
  const std::string reg_json = slurp(tmp.path / "reg" / "regression.json");
  CHECK(reg_json.find("\"shock\"") != std::string::npos);

  // facts on the same panel.
  CHECK(run({"facts", "--config", ss_cfg.string(), "--out",
             (tmp.path / "facts").string()}) == 0);
  CHECK(fs::exists(tmp.path / "facts" / "facts.csv"));
  CHECK(fs::exists(tmp.path / "facts" / "survival.csv"));
  CHECK(fs::exists(tmp.path / "facts" / "persistence.csv"));
  CHECK(fs::exists(tmp.path / "facts" / "granular.json"));
}

TEST_CASE("shock and sensitivity commands emit plot-ready tables") {
  TempDir tmp;
  const fs::path cfg = tmp.path / "cfg.json";
  write_file(cfg, R"({"overrides": {"sim.n_firms": 100}})");
  CHECK(run({"shock", "--config", cfg.string(), "--out", (tmp.path / "shock").string()}) == 0);
  const std::string curves = slurp(tmp.path / "shock" / "curves.csv");
  CHECK(curves.find("import_change_t") != std::string::npos);
  CHECK(curves.find("drop_ratio_t") != std::string::npos);

  const fs::path sens_cfg = tmp.path / "sens.json";
  write_file(sens_cfg, R"({
    "overrides": {"sim.n_firms": 100},
    "sensitivity": {"axis": "f_s", "grid": [0.2, 0.4]}
  })");
  CHECK(run({"sensitivity", "--config", sens_cfg.string(), "--out",
             (tmp.path / "sens").string()}) == 0);
  const CsvTable table = read_csv(tmp.path / "sens" / "sensitivity.csv");
  CHECK(table.rows.size() == 2);
  CHECK(table.column("mean_import_impact") >= 0);
}

TEST_CASE("missing inputs leave a .failed marker and a machine-readable error") {
  TempDir tmp;
  std::string err;
  const int code = run({"facts", "--out", (tmp.path / "f").string()}, nullptr, &err);
  CHECK(code == 1);
  CHECK(err.find("\"error\"") != std::string::npos);
  CHECK(fs::exists(tmp.path / "f" / "facts.failed"));

  // A later successful run clears the marker.
  TempDir tmp2;
  const fs::path cfg = tmp2.path / "cfg.json";
  write_file(cfg, R"({"overrides": {"sim.n_firms": 30}})");
  CHECK(run({"simulate", "--config", cfg.string(), "--out", (tmp.path / "f").string()}) == 0);
  CHECK_FALSE(fs::exists(tmp.path / "f" / "simulate.failed"));
}

TEST_CASE("default output root comes from the environment variable") {
  TempDir tmp;
  setenv("TRADENET_OUT_ROOT", tmp.path.c_str(), 1);
  const fs::path cfg = tmp.path / "cfg.json";
  write_file(cfg, R"({"overrides": {"sim.n_firms": 25}})");
  std::string out;
  CHECK(run({"simulate", "--config", cfg.string(), "--seed", "2"}, &out) == 0);
  CHECK(fs::exists(tmp.path / "simulate" / "firms.csv"));
  unsetenv("TRADENET_OUT_ROOT");
}

TEST_CASE("calibrate command honors a custom small problem") {
  TempDir tmp;
  const fs::path cfg = tmp.path / "cal.json";
  write_file(cfg, R"({
    "calibration": {
      "free": [{"name": "sigma_z", "lower": 0.05, "upper": 0.45, "start": 0.2}],
      "targets": {"exporter_share": 0.10},
      "weights": {"mean_k": 0, "median_k": 0, "mean_top_share": 0, "exporter_share": 100,
                   "curve": 0},
      "n_firms": 300,
      "max_evaluations": 25
    }
  })");
  CHECK(run({"calibrate", "--config", cfg.string(), "--seed", "3", "--out",
             (tmp.path / "cal").string(), "--threads", "2"}) == 0);
  const std::string result = slurp(tmp.path / "cal" / "calibration.json");
  CHECK(result.find("\"sigma_z\"") != std::string::npos);
  CHECK(fs::exists(tmp.path / "cal" / "evaluations.csv"));
}

TEST_CASE("the installed binary reruns byte-identically (external process)") {
  TempDir tmp;
  const fs::path cfg = tmp.path / "cfg.json";
  write_file(cfg, R"({"overrides": {"sim.n_firms": 60}})");
  const std::string base = std::string(TRADENET_CLI_PATH) + " simulate --config " +
                           cfg.string() + " --seed 21 --threads 2 --out ";
  CHECK(std::system((base + (tmp.path / "x").string() + " > /dev/null").c_str()) == 0);
  CHECK(std::system((base + (tmp.path / "y").string() + " > /dev/null").c_str()) == 0);
  CHECK(slurp(tmp.path / "x" / "firms.csv") == slurp(tmp.path / "y" / "firms.csv"));
  CHECK(!slurp(tmp.path / "x" / "firms.csv").empty());
}
