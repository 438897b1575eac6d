#include "advparam/experiment.hpp"

#include "advparam/errors.hpp"
#include "advparam/io.hpp"
#include "advparam/metrics.hpp"

#include <charconv>
#include <sstream>

namespace advparam {

using nlohmann::json;

namespace {

struct Snapshot {
  double acc = 0.0, aa = 0.0, r4 = 0.0;
};

Snapshot measure(const ModelParams& p, const ExperimentPlan& plan) {
  const auto data = plan.eval_set.view();
  return {accuracy(p, data), adversarial_accuracy(p, data, plan.eval_pgd),
          avg_approx_radius(p, data).mean};
}

void fill_rates(ExperimentRow& row, const Snapshot& base, const Snapshot& att, double gamma_low) {
  row.ac_base = base.acc;
  row.aa_base = base.aa;
  row.r4_base = base.r4;
  row.ac_att = att.acc;
  row.aa_att = att.aa;
  row.r4_att = att.r4;
  const RateResult by_aa = adversarial_rate(RateInputs::of(base.acc, base.aa, att.acc, att.aa), gamma_low);
  const RateResult by_r4 = adversarial_rate(RateInputs::of(base.acc, base.r4, att.acc, att.r4), gamma_low);
  row.ar_aa = by_aa.rate;
  row.ar_r4 = by_r4.rate;
  row.failed = by_aa.failed;
}

std::string budget_label(const PerturbBudget& b) {
  std::ostringstream os;
  if (b.kind == BudgetKind::linf_box)
    os << b.gamma;
  else
    os << b.matrices;
  return os.str();
}

std::string optional_number(const std::optional<double>& v) {
  return v ? format_double(*v) : "undefined";
}

double parse_number(const std::string& s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw FormatError("bad number '" + s + "' in experiment row", 0);
  return v;
}

AttackResult run_one(const ExperimentPlan& plan, const PerturbBudget& budget) {
  const auto train = plan.attack_set.view();
  if (plan.attack == "linf") return attack_linf(plan.model, train, budget, plan.attack_cfg);
  if (plan.attack == "l0") return attack_l0(plan.model, train, budget, plan.attack_cfg);
  if (!plan.target) throw UsageError("targeted attack needs a target label");
  if (plan.attack == "label")
    return attack_label(plan.model, train, *plan.target, budget, plan.attack_cfg);
  if (plan.attack == "direct")
    return attack_direct(plan.model, train, *plan.target, budget, plan.attack_cfg);
  throw UsageError("unknown attack '" + plan.attack + "'");
}

}  // namespace

bool ExperimentReport::any_failed() const {
  for (const auto& r : rows)
    if (!r.error.empty() || (r.failed && !r.control)) return true;
  return false;
}

ExperimentReport run_experiment(const ExperimentPlan& plan) {
  const bool l0 = plan.attack == "l0";
  if (!l0 && plan.attack != "linf" && plan.attack != "label" && plan.attack != "direct")
    throw UsageError("unknown attack '" + plan.attack + "'");
  if ((l0 && plan.ks.empty()) || (!l0 && plan.gammas.empty()))
    throw UsageError("empty sweep");
  if (plan.attack_set.empty() || plan.eval_set.empty()) throw UsageError("empty dataset in plan");

  std::vector<PerturbBudget> budgets;
  if (l0)
    for (int k : plan.ks) budgets.push_back(PerturbBudget::l0(k, plan.pair_fraction, plan.pair_floor));
  else
    for (double g : plan.gammas) budgets.push_back(budget_linf_gamma(plan.model, g));

  const Snapshot base = measure(plan.model, plan);
  const double gamma_low = plan.attack_cfg.gamma_low;
  ExperimentReport report;
  for (const auto& budget : budgets) {
    ExperimentRow row;
    row.attack = plan.attack;
    row.budget = budget_label(budget);
    try {
      const AttackResult res = run_one(plan, budget);
      fill_rates(row, base, measure(res.params, plan), gamma_low);
      if (plan.attack == "label" || plan.attack == "direct") {
        const RateInputs in =
            measure_rate_inputs(plan.model, res.params, plan.eval_set.view(), plan.eval_pgd, plan.target);
        row.targeted = targeted_rate(plan.attack == "label" ? TargetKind::label_robustness
                                                            : TargetKind::direct,
                                     in, gamma_low)
                           .rate;
      }
      if (!plan.out_dir.empty())
        write_trace_csv(res.trace, plan.out_dir / ("trace_" + row.attack + "_" + row.budget + ".csv"));
    } catch (const std::exception& e) {
      row.failed = true;
      row.error = e.what();
    }
    report.rows.push_back(row);

    if (!plan.random_control) continue;
    ExperimentRow ctrl;
    ctrl.attack = std::string("random-") + (l0 ? "l0" : "linf");
    ctrl.budget = row.budget;
    ctrl.control = true;
    try {
      const AttackResult res =
          random_perturbation(plan.model, plan.attack_set.view(), budget, plan.attack_cfg);
      fill_rates(ctrl, base, measure(res.params, plan), gamma_low);
    } catch (const std::exception& e) {
      ctrl.failed = true;
      ctrl.error = e.what();
    }
    report.rows.push_back(ctrl);
  }

  if (!plan.out_dir.empty()) {
    std::ostringstream csv;
    csv << experiment_csv_header() << '\n';
    for (const auto& r : report.rows) csv << experiment_csv_row(r) << '\n';
    write_text(plan.out_dir / "experiment.csv", csv.str());
    write_text(plan.out_dir / "summary.json", experiment_to_json(report, plan).dump(2) + "\n");
  }
  return report;
}

std::string experiment_csv_header() {
  return "attack,budget,ac_base,ac_att,aa_base,aa_att,r4_base,r4_att,ar_aa,ar_r4,failed";
}

std::string experiment_csv_row(const ExperimentRow& r) {
  std::ostringstream os;
  os << r.attack << ',' << r.budget << ',' << format_double(r.ac_base) << ','
     << format_double(r.ac_att) << ',' << format_double(r.aa_base) << ','
     << format_double(r.aa_att) << ',' << format_double(r.r4_base) << ','
     << format_double(r.r4_att) << ',' << optional_number(r.ar_aa) << ','
     << optional_number(r.ar_r4) << ',' << (r.failed ? "true" : "false");
  return os.str();
}

ExperimentRow parse_experiment_csv_row(const std::string& line) {
  std::vector<std::string> cells;
  std::istringstream in(line);
  std::string cell;
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (cells.size() != 11) throw FormatError("experiment row needs 11 columns", 0);
  ExperimentRow r;
  r.attack = cells[0];
  r.budget = cells[1];
  r.ac_base = parse_number(cells[2]);
  r.ac_att = parse_number(cells[3]);
  r.aa_base = parse_number(cells[4]);
  r.aa_att = parse_number(cells[5]);
  r.r4_base = parse_number(cells[6]);
  r.r4_att = parse_number(cells[7]);
  if (cells[8] != "undefined") r.ar_aa = parse_number(cells[8]);
  if (cells[9] != "undefined") r.ar_r4 = parse_number(cells[9]);
  r.failed = cells[10] == "true";
  r.control = r.attack.rfind("random-", 0) == 0;
  return r;
}

json experiment_to_json(const ExperimentReport& report, const ExperimentPlan& plan) {
  json doc;
  doc["attack"] = plan.attack;
  doc["model"] = plan.model_path;
  doc["attack_set"] = plan.attack_set.name;
  doc["eval_set"] = plan.eval_set.name;
  doc["eval_samples"] = plan.eval_set.size();
  doc["seed"] = plan.attack_cfg.seed;
  doc["eval_pgd"] = {{"eps", plan.eval_pgd.eps},
                     {"steps", plan.eval_pgd.steps},
                     {"step", plan.eval_pgd.step}};
  doc["attack_config"] = {{"eps", plan.attack_cfg.pgd.eps},
                          {"pgd_steps", plan.attack_cfg.pgd.steps},
                          {"pgd_step", plan.attack_cfg.pgd.step},
                          {"n1", plan.attack_cfg.n1},
                          {"n2", plan.attack_cfg.n2},
                          {"alpha", plan.attack_cfg.alpha},
                          {"gamma_low", plan.attack_cfg.gamma_low}};
  if (plan.target) doc["target_label"] = *plan.target;
  json rows = json::array();
  for (const auto& r : report.rows) {
    json j = {{"attack", r.attack},   {"budget", r.budget},   {"ac_base", r.ac_base},
              {"ac_att", r.ac_att},   {"aa_base", r.aa_base}, {"aa_att", r.aa_att},
              {"r4_base", r.r4_base}, {"r4_att", r.r4_att},   {"failed", r.failed},
              {"control", r.control}};
    j["ar_aa"] = r.ar_aa ? json(*r.ar_aa) : json(nullptr);
    j["ar_r4"] = r.ar_r4 ? json(*r.ar_r4) : json(nullptr);
    if (r.targeted) j["targeted_rate"] = *r.targeted;
    if (!r.error.empty()) j["error"] = r.error;
    rows.push_back(j);
  }
  doc["rows"] = rows;
  doc["any_failed"] = report.any_failed();
  return doc;
}

}  // namespace advparam
