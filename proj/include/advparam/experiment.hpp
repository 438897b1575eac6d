#pragma once

#include "advparam/attack.hpp"
#include "advparam/dataset.hpp"

#include "json.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace advparam {

struct ExperimentPlan {
  std::string attack = "linf";        // linf | l0 | label | direct
  ModelParams model;
  std::string model_path;             // informational
  LabeledDataset attack_set;          // T, the samples the attack optimizes on
  LabeledDataset eval_set;            // samples every metric is reported on
  std::vector<double> gammas;         // box budgets (linf, label, direct)
  std::vector<int> ks;                // matrix counts (l0)
  double pair_fraction = 0.01;
  int pair_floor = 1;
  std::optional<int> target;          // label and direct attacks
  AttackConfig attack_cfg;
  PgdConfig eval_pgd = PgdConfig::with_eps(8.0 / 255.0);
  bool random_control = true;
  std::filesystem::path out_dir;      // empty: nothing is written
};

struct ExperimentRow {
  std::string attack;
  std::string budget;
  double ac_base = 0.0, ac_att = 0.0;
  double aa_base = 0.0, aa_att = 0.0;
  double r4_base = 0.0, r4_att = 0.0;
  std::optional<double> ar_aa, ar_r4;
  bool failed = false;
  bool control = false;               // random-perturbation row
  std::optional<double> targeted;     // rate of the targeted definition, if any
  std::string error;
};

struct ExperimentReport {
  std::vector<ExperimentRow> rows;
  /// True if an attack row failed or any row hit an error. Control rows that
  /// lose accuracy are expected and do not count.
  bool any_failed() const;
};

/// Runs every sweep point and its random control. A stage that throws is
/// recorded on its row and the sweep continues. Writes experiment.csv,
/// summary.json and one trace CSV per attack into plan.out_dir.
ExperimentReport run_experiment(const ExperimentPlan& plan);

/// attack, budget, ac_base, ac_att, aa_base, aa_att, r4_base, r4_att, ar_aa, ar_r4, failed
std::string experiment_csv_header();
std::string experiment_csv_row(const ExperimentRow& row);
ExperimentRow parse_experiment_csv_row(const std::string& line);

nlohmann::json experiment_to_json(const ExperimentReport& report, const ExperimentPlan& plan);

}  // namespace advparam
