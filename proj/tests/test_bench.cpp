#include <doctest.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dfpv/bench/cli.hpp"
#include "dfpv/bench/config.hpp"
#include "dfpv/bench/estimators.hpp"
#include "dfpv/bench/experiment.hpp"
#include "dfpv/bench/plot.hpp"
#include "dfpv/bench/report.hpp"
#include "dfpv/datagen/demand.hpp"
#include "dfpv/errors.hpp"
#include "support/oracles.hpp"

using namespace dfpv;
using namespace dfpv::bench;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "dfpv_test_bench" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

struct CliRun {
  int code;
  std::string out, err;
};

CliRun cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

std::size_t count_of(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

// Small enough to run in a couple of seconds.
nlohmann::json tiny_config(const fs::path& out) {
  return {{"dgp", "mastouri"},
          {"estimators", {"dfpv", "fixed_feature"}},
          {"sizes", {40, 60}},
          {"n_sims", 2},
          {"base_seed", 3},
          {"fixed_centers", 20},
          {"architecture", {{"widths", {8, 4}}}},
          {"train", {{"outer_iterations", 3}, {"stage1_inner_steps", 2}}},
          {"output_dir", out.string()}};
}

double read_value(const std::string& out, const std::string& key) {
  const auto p = out.find(key + " ");
  REQUIRE(p != std::string::npos);
  return std::stod(out.substr(p + key.size() + 1));
}

}  // namespace

TEST_CASE("percentile matches a sort-and-walk reference") {
  numkit::CounterRng rng(5);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> v(1 + rng.below(30));
    for (auto& x : v) x = rng.normal();
    const double q = t % 10 == 0 ? (t % 20 == 0 ? 0.0 : 1.0) : rng.uniform();
    CHECK(percentile(v, q) == doctest::Approx(oracle::brute_percentile(v, q)).epsilon(1e-14));
  }
  CHECK(percentile({1.0, 2.0, 3.0, 4.0}, 0.25) == doctest::Approx(1.75));
  CHECK(percentile({7.0}, 0.5) == 7.0);
  CHECK_THROWS_AS(percentile({}, 0.5), InvalidArgument);
  CHECK_THROWS_AS(percentile({1.0}, 1.5), InvalidArgument);
}

TEST_CASE("summary groups by estimator and size") {
  std::vector<RunResult> runs;
  const double a[] = {4.0, 1.0, 3.0, 2.0};
  for (int i = 0; i < 4; ++i) runs.push_back({"demand", "dfpv", 100, std::uint64_t(i), a[i]});
  runs.push_back({"demand", "fixed_feature", 100, 0, 9.0});
  runs.push_back({"demand", "dfpv", 200, 0, 0.5});
  const auto rows = summarize_runs(runs);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].estimator == "dfpv");
  CHECK(rows[0].size == 100);
  CHECK(rows[0].n_runs == 4);
  CHECK(rows[0].median == 2.5);
  CHECK(rows[0].p25 == doctest::Approx(1.75));
  CHECK(rows[0].p75 == doctest::Approx(3.25));
  CHECK(rows[0].metric == "oos_mse");
  bool saw_ff = false;
  for (const auto& r : rows)
    if (r.estimator == "fixed_feature") saw_ff = r.n_runs == 1 && r.median == 9.0;
  CHECK(saw_ff);

  std::vector<OpeResult> ope{{"demand", "dfpv", "cost", 100, 0, 1.0, 2.0, 1.0, 4.0},
                             {"demand", "dfpv", "cost", 100, 1, 1.0, 4.0, 9.0, 4.0}};
  const auto os = summarize_ope(ope);
  REQUIRE(os.size() == 1);
  CHECK(os[0].metric == "ope_sq_error:cost");
  CHECK(os[0].median == 5.0);
}

TEST_CASE("csv formats") {
  CHECK(format_g6(0.1234567) == "0.123457");
  CHECK(format_g6(1e-9) == "1e-09");
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  const auto csv = results_csv({{"demand", "dfpv", 1000, 4, 12.5, 0.0, 1.0, 2.0, 0.1, 0.1}});
  CHECK(csv ==
        "dgp,estimator,size,seed,oos_mse,wall_time_s,l1,l2,lambda1,lambda2\n"
        "demand,dfpv,1000,4,12.5,0,1,2,0.1,0.1\n");
  const auto sum = summary_csv({{"demand", "oos_mse", "dfpv", 1000, 20, 1.0, 0.5, 2.0}});
  CHECK(sum == "dgp,metric,estimator,size,n_runs,median,p25,p75\ndemand,oos_mse,dfpv,1000,20,1,0.5,2\n");
  const auto fail = failures_csv({{"demand", "dfpv", 10, 1, "numerical", "loss, nonfinite"}});
  CHECK(fail.find("\"loss, nonfinite\"") != std::string::npos);
}

TEST_CASE("plots are well-formed, deterministic and one per metric") {
  std::vector<SummaryRow> rows;
  for (std::size_t n : {100u, 200u, 400u}) {
    rows.push_back({"demand", "oos_mse", "dfpv", n, 5, 10.0 / n, 5.0 / n, 20.0 / n});
    rows.push_back({"demand", "oos_mse", "fixed_feature", n, 5, 12.0 / n, 6.0 / n, 30.0 / n});
    rows.push_back({"demand", "ope_sq_error:cost", "dfpv", n, 5, 1.0, 0.5, 2.0});
  }
  const auto plots = render_plots(rows);
  REQUIRE(plots.size() == 2);
  CHECK(plots[0].filename == "demand_oos_mse.svg");
  CHECK(plots[1].filename == "demand_ope_sq_error_cost.svg");
  for (const auto& p : plots) {
    CHECK(p.svg.rfind("<?xml", 0) == 0);
    CHECK(p.svg.find("</svg>") != std::string::npos);
    CHECK(count_of(p.svg, "<svg") == 1);
    CHECK(count_of(p.svg, "<g") == count_of(p.svg, "</g>"));
    CHECK(p.svg.find("nan") == std::string::npos);
    CHECK(p.svg.find("inf") == std::string::npos);
  }
  CHECK(count_of(plots[0].svg, "<polyline") == 2);
  CHECK(plots[0].svg.find("fixed_feature") != std::string::npos);
  CHECK(render_plots(rows)[0].svg == plots[0].svg);
  CHECK(render_plots({}).empty());
}

TEST_CASE("config parsing") {
  const auto base = tiny_config("out");
  const auto cfg = config_from_json(base);
  CHECK(cfg.dgp == datagen::DgpKind::mastouri);
  CHECK(cfg.estimators.size() == 2);
  CHECK(cfg.sizes == std::vector<std::size_t>{40, 60});
  CHECK(cfg.architecture.phi_z == std::vector<std::size_t>{8, 4});
  CHECK(cfg.train.outer_iterations == 3);
  CHECK(cfg.baseline);
  CHECK_NOTHROW(cfg.validate());

  SUBCASE("unknown keys are rejected") {
    auto j = base;
    j["n_sim"] = 3;
    CHECK_THROWS_AS(config_from_json(j), InvalidArgument);
  }
  SUBCASE("estimators must be present") {
    auto j = base;
    j["estimators"] = nlohmann::json::array();
    CHECK_THROWS_AS(config_from_json(j).validate(), InvalidArgument);
    j["estimators"] = {"direct_ridge"};
    CHECK_THROWS_AS(config_from_json(j).validate(), InvalidArgument);
    j["estimators"] = {"lasso"};
    CHECK_THROWS_AS(config_from_json(j), InvalidArgument);
  }
  SUBCASE("policies only for demand") {
    auto j = base;
    j["policies"] = {"cost"};
    CHECK_THROWS_AS(config_from_json(j).validate(), InvalidArgument);
    j["dgp"] = "demand";
    CHECK_NOTHROW(config_from_json(j).validate());
    j["policies"] = {"greedy"};
    CHECK_THROWS_AS(config_from_json(j).validate(), InvalidArgument);
  }
  SUBCASE("tune grid forms") {
    auto j = base;
    j["tune"] = {{0.1, 0.2}, {0.3, 0.4}};
    CHECK(config_from_json(j).tune->size() == 2);
    j["tune"] = {{"lambda1", {0.1, 1.0}}, {"lambda2", {0.1, 1.0, 10.0}}};
    CHECK(config_from_json(j).tune->size() == 6);
    j["tune"] = true;
    CHECK(config_from_json(j).tune.has_value());
    j["tune"] = false;
    CHECK(!config_from_json(j).tune.has_value());
    j["tune"] = {{0.1}};
    CHECK_THROWS_AS(config_from_json(j), InvalidArgument);
  }
  SUBCASE("json round trip") {
    nlohmann::json j = cfg;
    const auto back = config_from_json(j);
    CHECK(nlohmann::json(back) == j);
  }
}

TEST_CASE("toml and json configs load the same experiment") {
  const auto dir = scratch("toml");
  write(dir / "exp.toml",
        "dgp = \"demand\"\nestimators = [\"fixed_feature\"]\nsizes = [50]\nn_sims = 3\n"
        "policies = [\"cost\", \"price\"]\n[train]\nlambda1 = 0.5\n[architecture]\nwidths = [8, 4]\n");
  const auto t = load_config(((dir / "exp.toml").string()));
  CHECK(t.dgp == datagen::DgpKind::demand);
  CHECK(t.sizes == std::vector<std::size_t>{50});
  CHECK(t.train.lambda1 == 0.5);
  CHECK(t.policies.size() == 2);
  write(dir / "exp.json", nlohmann::json(t).dump());
  CHECK(nlohmann::json(load_config((dir / "exp.json").string())) == nlohmann::json(t));
  write(dir / "bad.toml", "dgp = \n");
  CHECK_THROWS_AS(load_config((dir / "bad.toml").string()), InvalidArgument);
  CHECK_THROWS_AS(load_config((dir / "absent.toml").string()), InvalidArgument);
}

TEST_CASE("shipped configs load and validate") {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(DFPV_CONFIG_DIR)) {
    if (e.path().extension() != ".toml") continue;
    CAPTURE(e.path().string());
    CHECK_NOTHROW(load_config(e.path().string()).validate());
    ++n;
  }
  CHECK(n >= 3);
}

TEST_CASE("parallel_for runs every job once") {
  std::vector<int> hits(97, 0);
  std::atomic<int> total{0};
  parallel_for(hits.size(), 3, [&](std::size_t i) {
    hits[i] += 1;
    total += 1;
  });
  CHECK(total == 97);
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  parallel_for(0, 2, [](std::size_t) { FAIL("no jobs expected"); });
}

TEST_CASE("structural experiment: ordering, baseline rows and thread invariance") {
  auto cfg = config_from_json(tiny_config(scratch("exp_mem")));
  const auto r1 = run_structural_experiment(cfg);
  CHECK(r1.failures.empty());
  REQUIRE(r1.runs.size() == 2 * 2 * 3);
  CHECK(r1.runs[0].size == 40);
  CHECK(r1.runs[0].seed == 3);
  CHECK(r1.runs[0].estimator == "dfpv");
  CHECK(r1.runs[1].estimator == "fixed_feature");
  CHECK(r1.runs[2].estimator == "direct_ridge");
  CHECK(r1.runs[2].lambda1 == 0.0);
  CHECK(r1.runs[3].seed == 4);
  CHECK(r1.runs.back().size == 60);
  for (const auto& r : r1.runs) {
    CHECK(std::isfinite(r.oos_mse));
    CHECK(r.wall_time_s == 0.0);
  }
  CHECK(r1.summary.size() == 6);
  CHECK(r1.model_json.size() == r1.runs.size());
  cfg.threads = 2;
  const auto r2 = run_structural_experiment(cfg);
  CHECK(results_csv(r2.runs) == results_csv(r1.runs));
  CHECK(r2.model_json == r1.model_json);
}

TEST_CASE("fit_cell reproduces the bench model") {
  const auto cfg = config_from_json(tiny_config(scratch("cell")));
  const auto report = run_structural_experiment(cfg);
  const auto fit = fit_cell(cfg, EstimatorKind::fixed_feature, 60, 4);
  const auto truth = datagen::ground_truth(cfg.dgp, cfg.dgp_options);
  const double mse = datagen::grid_mse(predict_structural(fit.model, truth.grid), truth);
  for (const auto& r : report.runs)
    if (r.estimator == "fixed_feature" && r.size == 60 && r.seed == 4) CHECK(format_g6(mse) == format_g6(r.oos_mse));
}

TEST_CASE("cli exit codes") {
  CHECK(cli({"--help"}).code == 0);
  CHECK(cli({}).code == 1);
  CHECK(cli({"frobnicate"}).code == 1);
  CHECK(cli({"bench", "--config", "/nonexistent/exp.toml"}).code == 1);
  CHECK(cli({"bench"}).code == 1);
  CHECK(cli({"train", "--dgp", "demand", "--size", "20"}).code == 1);  // no --estimator
  CHECK(cli({"train", "--dgp", "nope", "--size", "20", "--estimator", "dfpv"}).code == 1);
  CHECK(cli({"eval", "--model", "/nonexistent/model.json"}).code == 1);
  CHECK(cli({"ope", "--policy", "cost"}).code == 1);
}

TEST_CASE("cli gen writes both stages and a sidecar") {
  const auto dir = scratch("gen");
  const auto r = cli({"gen", "--dgp", "demand", "--size", "100", "--seed", "2", "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto csv = slurp(dir / "demand_n100_s2.csv");
  CHECK(count_lines(csv) == 201);
  CHECK(csv.rfind("stage,", 0) == 0);
  const auto side = nlohmann::json::parse(slurp(dir / "demand_n100_s2.json"));
  CHECK(side.at("n_stage1") == 100);
  CHECK(side.at("seed") == 2);
  const auto back = datagen::read_dataset_csv((dir / "demand_n100_s2.csv").string());
  CHECK(back.stage1.a == datagen::gen_demand(100, 100, 2).stage1.a);
  CHECK(cli({"gen", "--dgp", "mastouri", "--size", "10", "--n-ope", "5", "--out", dir.string()}).code == 1);
}

TEST_CASE("cli train then eval reproduces the score") {
  const auto dir = scratch("train");
  const auto t = cli({"train", "--dgp", "mastouri", "--size", "80", "--seed", "1", "--estimator", "fixed_feature",
                      "--out", dir.string()});
  REQUIRE(t.code == 0);
  const double trained = read_value(t.out, "oos_mse");
  const auto model = (dir / "mastouri_fixed_feature_n80_s1.json").string();
  const auto e1 = cli({"eval", "--model", model});
  REQUIRE(e1.code == 0);
  CHECK(std::abs(read_value(e1.out, "oos_mse") - trained) <= 1e-12 * trained);
  const auto e2 = cli({"eval", "--model", model, "--truth", (dir / "truth.csv").string()});
  CHECK(std::abs(read_value(e2.out, "oos_mse") - trained) <= 1e-12 * trained);
  CHECK(cli({"tune", "--dgp", "mastouri", "--size", "60", "--estimator", "fixed_feature"}).code == 0);
}

TEST_CASE("bench outputs are byte-identical across reruns and eval reproduces every row") {
  const auto root = scratch("bench");
  write(root / "exp.json", tiny_config(root / "unused").dump());
  const auto a = cli({"bench", "--config", (root / "exp.json").string(), "--out", (root / "a").string()});
  const auto b = cli({"bench", "--config", (root / "exp.json").string(), "--out", (root / "b").string()});
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  for (const auto* f : {"results.csv", "summary.csv", "failures.csv", "truth.csv", "mastouri_oos_mse.svg"}) {
    CHECK(fs::exists(root / "a" / f));
    CHECK(slurp(root / "a" / f) == slurp(root / "b" / f));
  }
  CHECK(count_lines(slurp(root / "a" / "results.csv")) == 13);
  CHECK(count_lines(slurp(root / "a" / "failures.csv")) == 1);
  std::size_t models = 0;
  for (const auto& entry : fs::directory_iterator(root / "a" / "models")) {
    const auto doc = nlohmann::json::parse(slurp(entry.path()));
    const double stored = doc.at("run").at("oos_mse").get<double>();
    const auto e = cli({"eval", "--model", entry.path().string()});
    REQUIRE(e.code == 0);
    CHECK(std::abs(read_value(e.out, "oos_mse") - stored) <= 1e-12 * std::max(1.0, stored));
    ++models;
  }
  CHECK(models == 12);
}

TEST_CASE("ope with a zero model scores v_true squared") {
  const auto dir = scratch("ope");
  REQUIRE(cli({"train", "--dgp", "demand", "--size", "100", "--seed", "3", "--estimator", "fixed_feature", "--out",
               dir.string()})
              .code == 0);
  const auto path = dir / "demand_fixed_feature_n100_s3.json";
  auto doc = nlohmann::json::parse(slurp(path));
  for (auto& u : doc.at("u")) u = 0.0;
  write(dir / "zero.json", doc.dump());
  const auto r = cli({"ope", "--model", (dir / "zero.json").string(), "--policy", "cost", "--policy", "constant:20"});
  REQUIRE(r.code == 0);
  CHECK(read_value(r.out, "v_hat") == 0.0);
  const double v_true = read_value(r.out, "v_true");
  CHECK(read_value(r.out, "sq_error") == doctest::Approx(v_true * v_true).epsilon(1e-12));
  CHECK(r.out.find("constant:20 v_hat") != std::string::npos);
  CHECK(cli({"ope", "--model", (dir / "zero.json").string(), "--policy", "greedy"}).code == 1);
}

TEST_CASE("ope experiment") {
  auto j = tiny_config(scratch("ope_exp"));
  j["dgp"] = "demand";
  j["sizes"] = {50};
  j["estimators"] = {"fixed_feature"};
  j["policies"] = {"cost", "price"};
  j["ope_truth_mc"] = 20000;
  const auto cfg = config_from_json(j);
  const auto rep = run_ope_experiment(cfg);
  CHECK(rep.failures.empty());
  // seeds x (fixed_feature, direct_ridge) x policies
  REQUIRE(rep.runs.size() == 2 * 2 * 2);
  for (const auto& r : rep.runs) {
    CHECK(r.sq_error == doctest::Approx((r.v_hat - r.v_true) * (r.v_hat - r.v_true)));
    CHECK(r.constant_sq_error ==
          doctest::Approx((rep.observational_mean - r.v_true) * (rep.observational_mean - r.v_true)));
  }
  CHECK(rep.runs[0].policy == "cost");
  CHECK(rep.runs[1].policy == "price");
  CHECK(rep.runs[2].estimator == "direct_ridge");
  write_ope_outputs(rep, cfg);
  CHECK(fs::exists(fs::path(cfg.output_dir) / "ope_results.csv"));
  CHECK(fs::exists(fs::path(cfg.output_dir) / "demand_ope_sq_error_cost.svg"));
  auto bad = j;
  bad["dgp"] = "mastouri";
  bad.erase("policies");
  CHECK_THROWS_AS(run_ope_experiment(config_from_json(bad)), InvalidArgument);
}

TEST_CASE("direct ridge baseline") {
  const auto data = datagen::gen_demand(200, 200, 1);
  const auto m = fit_direct_ridge(data, 100, 1);
  CHECK(m.weights.size() == m.dict.size());
  CHECK(m.lambda > 0.0);
  const auto again = fit_direct_ridge(data, 100, 1);
  CHECK(again.weights == m.weights);
  const FittedModel fm = m;
  const auto back = model_from_json(model_to_json(fm));
  const auto grid = datagen::demand_grid();
  CHECK(predict_structural(back, grid) == predict_structural(fm, grid));
  CHECK(estimator_from_string("direct_ridge") == EstimatorKind::direct_ridge);
  CHECK_THROWS_AS(estimator_from_string("kiv"), InvalidArgument);
}
