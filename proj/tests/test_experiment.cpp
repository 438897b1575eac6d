#include "advparam/dataset.hpp"
#include "advparam/errors.hpp"
#include "advparam/experiment.hpp"
#include "advparam/io.hpp"
#include "advparam/train.hpp"

#include "doctest.h"

#include <filesystem>
#include <fstream>

using namespace advparam;
namespace fs = std::filesystem;

namespace {

ExperimentPlan small_plan() {
  BlobSpec spec;
  spec.dim = 4;
  spec.classes = 3;
  spec.per_class = 15;
  spec.seed = 4;
  const auto data = gen_blobs(spec);
  TrainConfig tc;
  tc.epochs = 20;
  tc.batch_size = 16;
  tc.lr = 0.1;
  const std::vector<Index> dims{4, 10, 3};
  ExperimentPlan plan;
  plan.model = train_standard(ModelParams::random_init(dims, 2), data, tc).params;
  plan.attack_set = data;
  plan.eval_set = data;
  plan.gammas = {0.0, 0.05};
  plan.attack_cfg.pgd = PgdConfig::with_eps(0.05, 5);
  plan.attack_cfg.n1 = 2;
  plan.attack_cfg.n2 = 4;
  plan.eval_pgd = PgdConfig::with_eps(0.05, 5);
  return plan;
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("experiment rows re-parse and their rates follow from their own columns") {
  auto plan = small_plan();
  plan.out_dir = fs::temp_directory_path() / "advparam_test_experiment";
  fs::remove_all(plan.out_dir);
  fs::create_directories(plan.out_dir);
  const auto report = run_experiment(plan);
  REQUIRE(report.rows.size() == 4);
  CHECK(report.rows[1].control);
  CHECK(fs::exists(plan.out_dir / "summary.json"));
  const auto summary = read_json(plan.out_dir / "summary.json");
  CHECK(summary["attack"] == "linf");

  std::ifstream csv(plan.out_dir / "experiment.csv");
  std::string line;
  std::getline(csv, line);
  CHECK(line == experiment_csv_header());
  std::size_t i = 0;
  while (std::getline(csv, line)) {
    const auto row = parse_experiment_csv_row(line);
    CHECK(experiment_csv_row(row) == line);
    const auto& orig = report.rows.at(i++);
    CHECK(row.ac_att == orig.ac_att);
    const auto rate = adversarial_rate(RateInputs::of(row.ac_base, row.aa_base, row.ac_att, row.aa_att));
    CHECK(rate.rate == row.ar_aa);
    CHECK(rate.failed == row.failed);
  }
  CHECK(i == report.rows.size());
}

TEST_CASE("a zero budget leaves every metric and gives rate zero") {
  auto plan = small_plan();
  plan.gammas = {0.0};
  plan.random_control = false;
  const auto report = run_experiment(plan);
  REQUIRE(report.rows.size() == 1);
  const auto& r = report.rows[0];
  CHECK(r.ac_att == r.ac_base);
  CHECK(r.aa_att == r.aa_base);
  if (r.ar_aa) CHECK(*r.ar_aa == 0.0);
  CHECK_FALSE(report.any_failed());
}

TEST_CASE("experiment plan validation") {
  auto plan = small_plan();
  plan.gammas.clear();
  CHECK_THROWS_AS(run_experiment(plan), UsageError);
  plan = small_plan();
  plan.attack = "l0";
  CHECK_THROWS_AS(run_experiment(plan), UsageError);
  plan = small_plan();
  plan.attack = "label";
  plan.random_control = false;
  const auto report = run_experiment(plan);
  CHECK_FALSE(report.rows[0].error.empty());
  CHECK(report.any_failed());
  CHECK_THROWS_AS(parse_experiment_csv_row("a,b,c"), FormatError);
}

TEST_CASE("failed control rows do not fail the report") {
  ExperimentReport r;
  ExperimentRow ctrl;
  ctrl.control = true;
  ctrl.failed = true;
  r.rows.push_back(ctrl);
  CHECK_FALSE(r.any_failed());
  ExperimentRow att;
  att.failed = true;
  r.rows.push_back(att);
  CHECK(r.any_failed());
}

}  // TEST_SUITE
