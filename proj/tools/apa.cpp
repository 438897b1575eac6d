// apa: command-line front end for training, attacking and evaluating small
// ReLU networks and for the closed-form robustness bounds.
//
// Exit codes: 0 success, 1 some sweep row failed, 2 usage error,
// 3 any other error.

#include "advparam/attack.hpp"
#include "advparam/config.hpp"
#include "advparam/dataset.hpp"
#include "advparam/errors.hpp"
#include "advparam/experiment.hpp"
#include "advparam/io.hpp"
#include "advparam/metrics.hpp"
#include "advparam/theory.hpp"
#include "advparam/train.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace advparam;
using nlohmann::json;

namespace {

constexpr int kExitFailedRow = 1;
constexpr int kExitUsage = 2;
constexpr int kExitError = 3;

struct Globals {
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  std::string config;
};

std::vector<int> int_list(const std::string& text) {
  std::vector<int> out;
  for (double v : parse_double_list(text)) {
    if (v != std::floor(v)) throw UsageError("expected integers in '" + text + "'");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::vector<Index> dims_list(const std::string& text) {
  std::vector<Index> out;
  for (int v : int_list(text)) {
    if (v < 1) throw UsageError("layer widths must be >= 1");
    out.push_back(v);
  }
  return out;
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw UsageError(std::string(flag) + " is required");
}

PgdConfig pgd_from(double eps, int steps, double step) {
  PgdConfig cfg = PgdConfig::with_eps(eps, steps);
  if (step > 0.0) cfg.step = step;
  return cfg;
}

// Options that were not given on the command line take their value from the
// config file, looked up by long name without the leading dashes.
std::set<std::string> apply_config(CLI::App& app, const Config& cfg) {
  std::set<std::string> used;
  for (CLI::Option* opt : app.get_options()) {
    const std::string key = opt->get_lnames().empty() ? "" : opt->get_lnames().front();
    if (key.empty() || key == "help" || key == "config" || opt->count() > 0) continue;
    const auto value = cfg.get(key);
    if (!value) continue;
    opt->add_result(*value);
    opt->run_callback();
    used.insert(key);
  }
  return used;
}

// ---------------------------------------------------------------------------

struct GenDataArgs {
  std::string kind = "blobs";
  Index dim = 8;
  int classes = 3;
  int per_class = 100;
  double margin = 0.2, radius = 0.1, sigma = 0.05;
  int intrinsic_dim = 4;
  std::string images, labels, output;
  double split = 0.0;
};

int run_gen_data(const Globals& g, const GenDataArgs& a) {
  LabeledDataset data;
  if (a.kind == "blobs") {
    BlobSpec s;
    s.dim = a.dim;
    s.classes = a.classes;
    s.per_class = a.per_class;
    s.margin = a.margin;
    s.radius = a.radius;
    s.sigma = a.sigma;
    s.seed = g.seed;
    data = gen_blobs(s);
  } else if (a.kind == "subspace") {
    SubspaceSpec s;
    s.dim = a.dim;
    s.classes = a.classes;
    s.intrinsic_dim = a.intrinsic_dim;
    s.per_class = a.per_class;
    s.seed = g.seed;
    data = gen_subspace_task(s);
  } else if (a.kind == "idx") {
    if (a.images.empty() || a.labels.empty()) throw UsageError("idx needs --images and --labels");
    data = read_idx(a.images, a.labels);
  } else {
    throw UsageError("unknown data kind '" + a.kind + "'");
  }

  const fs::path out = a.output.empty() ? fs::path(g.out_dir) / "data.json" : fs::path(a.output);
  if (a.split > 0.0) {
    auto [first, rest] = split(data, a.split, g.seed);
    const fs::path stem = out.parent_path() / out.stem();
    save_dataset(first, stem.string() + "_train.json");
    save_dataset(rest, stem.string() + "_test.json");
    std::cout << "wrote " << first.size() << " + " << rest.size() << " samples to " << stem.string()
              << "_{train,test}.json\n";
  } else {
    save_dataset(data, out);
    std::cout << "wrote " << data.size() << " samples to " << out.string() << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string data, test, output;
  std::string hidden = "32,32";
  int epochs = 50;
  std::size_t batch = 32;
  double lr = 0.05, momentum = 0.9, lr_decay = 0.5;
  int decay_every = 0;
  bool adversarial = false;
  double eps = 8.0 / 255.0;
  int pgd_steps = 10;
  double pgd_step = 0.0;
};

int run_train(const Globals& g, const TrainArgs& a) {
  require(a.data, "--data");
  const LabeledDataset data = load_dataset(a.data);
  std::vector<Index> dims{data.dim};
  for (Index w : dims_list(a.hidden)) dims.push_back(w);
  dims.push_back(data.classes);

  TrainConfig cfg;
  cfg.epochs = a.epochs;
  cfg.batch_size = a.batch;
  cfg.lr = a.lr;
  cfg.momentum = a.momentum;
  cfg.lr_decay = a.lr_decay;
  cfg.decay_every = a.decay_every;
  cfg.seed = g.seed;
  cfg.pgd = pgd_from(a.eps, a.pgd_steps, a.pgd_step);

  const ModelParams init = ModelParams::random_init(dims, g.seed);
  const TrainResult res =
      a.adversarial ? train_adversarial(init, data, cfg) : train_standard(init, data, cfg);

  json meta = {{"dataset", data.name},   {"epochs", cfg.epochs}, {"lr", cfg.lr},
               {"batch", cfg.batch_size}, {"seed", cfg.seed},     {"adversarial", a.adversarial},
               {"eps", cfg.pgd.eps},      {"pgd_steps", cfg.pgd.steps}};
  const fs::path out = a.output.empty() ? fs::path(g.out_dir) / "model.json" : fs::path(a.output);
  save_model(res.params, out, meta);

  std::ostringstream trace;
  trace << "epoch,loss\n";
  for (std::size_t i = 0; i < res.loss_trace.size(); ++i)
    trace << i << ',' << format_double(res.loss_trace[i]) << '\n';
  write_text(out.parent_path() / "train_trace.csv", trace.str());

  std::cout << "train_accuracy=" << format_double(res.final_accuracy);
  if (!a.test.empty()) {
    const LabeledDataset test = load_dataset(a.test);
    std::cout << " test_accuracy=" << format_double(accuracy(res.params, test.view()))
              << " test_adv_accuracy="
              << format_double(adversarial_accuracy(res.params, test.view(), cfg.pgd));
  }
  std::cout << "\nwrote " << out.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct AttackArgs {
  std::string model, data, eval;
  std::string attack = "linf";
  std::string gammas = "0.02,0.04,0.06,0.08,0.1";
  std::string ks = "1";
  double pair_fraction = 0.01;
  int pair_floor = 1;
  std::optional<int> target;
  int sample = 0;
  double eps = 8.0 / 255.0;
  int pgd_steps = 10;
  double pgd_step = 0.0;
  int n1 = 10, n2 = 100;
  double alpha = 0.05, decay = 0.5;
  int decay_every = 0;
  std::size_t batch = 0;
  double gamma_low = kDefaultGammaLow;
  bool ascent = false;
  std::string step_rule = "sign";
  bool no_control = false;
};

AttackConfig attack_config(const Globals& g, const AttackArgs& a) {
  AttackConfig cfg;
  cfg.pgd = pgd_from(a.eps, a.pgd_steps, a.pgd_step);
  cfg.n1 = a.n1;
  cfg.n2 = a.n2;
  cfg.alpha = a.alpha;
  cfg.decay = a.decay;
  cfg.decay_every = a.decay_every;
  cfg.batch_size = a.batch;
  cfg.seed = g.seed;
  cfg.gamma_low = a.gamma_low;
  cfg.direction = a.ascent ? StepDirection::ascent : StepDirection::descent;
  if (a.step_rule == "sign")
    cfg.step_rule = StepRule::sign;
  else if (a.step_rule == "gradient")
    cfg.step_rule = StepRule::gradient;
  else
    throw UsageError("step-rule must be sign or gradient");
  return cfg;
}

int run_single(const Globals& g, const AttackArgs& a, const ModelParams& model,
               const LabeledDataset& data) {
  if (a.sample < 0 || static_cast<std::size_t>(a.sample) >= data.size())
    throw UsageError("--sample is out of range");
  const AttackConfig cfg = attack_config(g, a);
  const fs::path dir(g.out_dir);
  std::ostringstream csv;
  csv << "attack,budget,kept,success,rate,failed\n";
  bool any_failed = false;
  for (double gamma : parse_double_list(a.gammas)) {
    const AttackResult res =
        attack_single(model, data.samples[static_cast<std::size_t>(a.sample)],
                      budget_linf_gamma(model, gamma), cfg);
    const std::string row = "single," + format_double(gamma) + "," +
                            (res.failed ? "false" : "true") + "," +
                            (res.success ? "true" : "false") + "," +
                            (res.rate.rate ? format_double(*res.rate.rate) : "undefined") + "," +
                            (res.failed ? "true" : "false");
    std::cout << row << "\n";
    csv << row << "\n";
    any_failed = any_failed || res.failed;
  }
  write_text(dir / "single.csv", csv.str());
  return any_failed ? kExitFailedRow : 0;
}

int run_attack(const Globals& g, const AttackArgs& a) {
  require(a.model, "--model");
  require(a.data, "--data");
  const ModelParams model = load_model(a.model);
  const LabeledDataset data = load_dataset(a.data);
  if (a.attack == "single") return run_single(g, a, model, data);

  ExperimentPlan plan;
  plan.attack = a.attack;
  plan.model = model;
  plan.model_path = a.model;
  plan.attack_set = data;
  plan.eval_set = a.eval.empty() ? data : load_dataset(a.eval);
  if (a.attack == "l0")
    plan.ks = int_list(a.ks);
  else
    plan.gammas = parse_double_list(a.gammas);
  plan.pair_fraction = a.pair_fraction;
  plan.pair_floor = a.pair_floor;
  plan.target = a.target;
  plan.attack_cfg = attack_config(g, a);
  plan.eval_pgd = plan.attack_cfg.pgd;
  plan.random_control = !a.no_control;
  plan.out_dir = g.out_dir;

  const ExperimentReport report = run_experiment(plan);
  std::cout << experiment_csv_header() << "\n";
  for (const auto& row : report.rows) {
    std::cout << experiment_csv_row(row) << "\n";
    if (!row.error.empty()) std::cerr << row.attack << " " << row.budget << ": " << row.error << "\n";
  }
  return report.any_failed() ? kExitFailedRow : 0;
}

// ---------------------------------------------------------------------------

struct EvalArgs {
  std::string model, data;
  double eps = 8.0 / 255.0;
  int pgd_steps = 10;
  double pgd_step = 0.0;
};

int run_eval(const Globals& g, const EvalArgs& a) {
  require(a.model, "--model");
  require(a.data, "--data");
  const ModelParams model = load_model(a.model);
  const LabeledDataset data = load_dataset(a.data);
  const RobustnessReport r =
      evaluate_robustness(model, data, pgd_from(a.eps, a.pgd_steps, a.pgd_step), g.seed);
  const fs::path dir(g.out_dir);
  write_text(dir / "robustness.csv", robustness_csv_header() + "\n" + robustness_csv_row(r) + "\n");
  write_text(dir / "robustness.json", robustness_to_json(r).dump(2) + "\n");
  std::cout << robustness_csv_header() << "\n" << robustness_csv_row(r) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct TheoryArgs {
  std::string what = "bounds";
  double gamma = 1.0, r = std::numbers::pi / 2.0, c = 1.0, b = 1.0, A = 1.0;
  double d = 1.0, alpha = 1.0, beta = 1.0, gamma_low = 1.0;
  int depth = 1;
  double rho = 0.5;
  double tau = 0.0, R = 0.0;
  double eps = 0.1;
  Index input_dim = 8;
  int classes = 3;
  Index pairs = 64;
  Index width = 8;
};

json bounds_json(const TheoryArgs& a) {
  json doc;
  doc["eta"] = bound_eta_thm3(a.gamma, a.depth, a.r, a.c, a.b, a.A);
  const UniformConstants k{a.A, a.alpha, a.beta, a.c, a.d, a.gamma_low};
  if (a.alpha + a.beta - 1.0 > 0.0) doc["rho_uniform"] = bound_rho_uniform(a.gamma, a.depth, k);
  const DepthThreshold dr = depth_for_rate(a.rho, a.A, a.gamma, a.r, a.c, a.b);
  doc["depth_for_rate"] = {{"bound", dr.bound}, {"min_depth", dr.min_depth}};
  if (a.alpha + a.beta - 1.0 > 0.0) {
    const DepthThreshold dd = depth_for_rate_dist(a.rho, a.gamma, k);
    doc["depth_for_rate_dist"] = {{"bound", dd.bound}, {"min_depth", dd.min_depth}};
  }
  if (a.tau > 0.0 && a.tau < a.R) {
    const DepthThreshold dm = depth_for_measure(a.tau, a.R, a.A, a.gamma, a.r, a.c, a.b);
    doc["depth_for_measure"] = {{"bound", dm.bound}, {"min_depth", dm.min_depth}};
    if (a.alpha + a.beta - 1.0 > 0.0) {
      const DepthThreshold dmd = depth_for_measure_dist(a.tau, a.R, a.gamma, k);
      doc["depth_for_measure_dist"] = {{"bound", dmd.bound}, {"min_depth", dmd.min_depth}};
    }
  }
  return doc;
}

json shallow_json(const Globals& g, const TheoryArgs& a) {
  ConditionedNetSpec spec;
  spec.input_dim = a.input_dim;
  spec.classes = a.classes;
  spec.pairs = a.pairs;
  spec.seed = g.seed;
  const ModelParams net = conditioned_shallow_net(spec);
  std::mt19937_64 rng(g.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector x0(a.input_dim);
  for (Index i = 0; i < x0.size(); ++i) x0(i) = unit(rng);
  const Sample s{x0, classify(net, x0)};
  const ConstructionTrace t = theorem1_construct(net, s, a.gamma, a.eps);
  const auto& p = t.conditions.params;
  return {{"width", t.conditions.width},
          {"threshold", t.conditions.threshold},
          {"A", p.A},
          {"b", p.b},
          {"c", p.c},
          {"eta", p.eta},
          {"clean_residual", t.clean_residual},
          {"budget_used", t.budget_used},
          {"adversarial_found", t.adversarial_found},
          {"margin_before", t.margin_before},
          {"margin_after", t.margin_after}};
}

json inflation_json(const Globals& g, const TheoryArgs& a) {
  std::vector<Index> dims(static_cast<std::size_t>(a.depth) + 1, a.width);
  dims.push_back(a.classes);
  ModelParams net = ModelParams::random_init(dims, g.seed);
  for (auto& l : net.layers) l.bias.setZero();
  std::mt19937_64 rng(g.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector x0(a.width);
  for (Index i = 0; i < x0.size(); ++i) x0(i) = unit(rng);
  const Sample s{x0, classify(net, x0)};
  const InflationTrace t = gradient_inflation_attack(net, s, a.gamma);
  return {{"layer_residual", t.layer_residual},
          {"budget_used", t.budget_used},
          {"measure_before", t.measure_before},
          {"measure_after", t.measure_after},
          {"sign_value", t.signs.value},
          {"sign_bound", t.signs.bound}};
}

int run_theory(const Globals& g, const TheoryArgs& a) {
  json doc;
  if (a.what == "bounds")
    doc = bounds_json(a);
  else if (a.what == "shallow")
    doc = shallow_json(g, a);
  else if (a.what == "inflation")
    doc = inflation_json(g, a);
  else
    throw UsageError("theory --what must be bounds, shallow or inflation");
  write_text(fs::path(g.out_dir) / ("theory_" + a.what + ".json"), doc.dump(2) + "\n");
  std::cout << doc.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct ReportArgs {
  std::vector<std::string> inputs;
};

int run_report(const Globals& g, const ReportArgs& a) {
  if (a.inputs.empty()) throw UsageError("report needs at least one experiment.csv");
  std::vector<ExperimentRow> rows;
  for (const auto& path : a.inputs) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != experiment_csv_header())
      throw FormatError(path + ": unexpected header", 0);
    while (std::getline(in, line))
      if (!line.empty()) rows.push_back(parse_experiment_csv_row(line));
  }
  std::ostringstream md;
  md << "| attack | budget | AC base | AC att | AA base | AA att | AR(AA) | AR(R4) | failed |\n"
     << "|---|---|---|---|---|---|---|---|---|\n";
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("-"); };
  bool any_failed = false;
  for (const auto& r : rows) {
    md << "| " << r.attack << " | " << r.budget << " | " << format_double(r.ac_base) << " | "
       << format_double(r.ac_att) << " | " << format_double(r.aa_base) << " | "
       << format_double(r.aa_att) << " | " << opt(r.ar_aa) << " | " << opt(r.ar_r4) << " | "
       << (r.failed ? "yes" : "no") << " |\n";
    any_failed = any_failed || (r.failed && !r.control);
  }
  write_text(fs::path(g.out_dir) / "report.md", md.str());
  std::cout << md.str();
  return any_failed ? kExitFailedRow : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adversarial parameter attacks on small ReLU networks"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Seed for every random choice");
  app.add_option("--out-dir", g.out_dir, "Directory for all written files");
  app.add_option("--config", g.config, "Flat key = value file with option defaults");

  GenDataArgs gd;
  auto* gen = app.add_subcommand("gen-data", "Generate or import a dataset");
  gen->add_option("--kind", gd.kind, "blobs, subspace or idx");
  gen->add_option("--dim", gd.dim);
  gen->add_option("--classes", gd.classes);
  gen->add_option("--per-class", gd.per_class);
  gen->add_option("--margin", gd.margin);
  gen->add_option("--radius", gd.radius);
  gen->add_option("--sigma", gd.sigma);
  gen->add_option("--intrinsic-dim", gd.intrinsic_dim);
  gen->add_option("--images", gd.images, "IDX image file");
  gen->add_option("--labels", gd.labels, "IDX label file");
  gen->add_option("--output", gd.output, "Dataset path (default <out-dir>/data.json)");
  gen->add_option("--split", gd.split, "Write a train/test pair with this train fraction");

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "Train an MLP");
  train->add_option("--data", ta.data);
  train->add_option("--test", ta.test, "Dataset reported after training");
  train->add_option("--hidden", ta.hidden, "Comma-separated hidden widths");
  train->add_option("--epochs", ta.epochs);
  train->add_option("--batch", ta.batch);
  train->add_option("--lr", ta.lr);
  train->add_option("--momentum", ta.momentum);
  train->add_option("--lr-decay", ta.lr_decay);
  train->add_option("--decay-every", ta.decay_every);
  train->add_flag("--adversarial", ta.adversarial, "Train on PGD adversaries");
  train->add_option("--eps", ta.eps);
  train->add_option("--pgd-steps", ta.pgd_steps);
  train->add_option("--pgd-step", ta.pgd_step, "0 means eps / 4");
  train->add_option("--output", ta.output, "Model path (default <out-dir>/model.json)");

  AttackArgs aa;
  auto* attack = app.add_subcommand("attack", "Run a parameter attack sweep");
  attack->add_option("--model", aa.model);
  attack->add_option("--data", aa.data, "Attack set");
  attack->add_option("--eval", aa.eval, "Evaluation set (default: the attack set)");
  attack->add_option("--attack", aa.attack, "linf, l0, label, direct or single")
      ->check(CLI::IsMember({"linf", "l0", "label", "direct", "single"}));
  attack->add_option("--gammas", aa.gammas, "Comma-separated box ratios");
  attack->add_option("--ks", aa.ks, "Comma-separated matrix counts for l0");
  attack->add_option("--pair-fraction", aa.pair_fraction);
  attack->add_option("--pair-floor", aa.pair_floor);
  attack->add_option("--target", aa.target, "Target label for label and direct");
  attack->add_option("--sample", aa.sample, "Sample index for single");
  attack->add_option("--eps", aa.eps);
  attack->add_option("--pgd-steps", aa.pgd_steps);
  attack->add_option("--pgd-step", aa.pgd_step, "0 means eps / 4");
  attack->add_option("--n1", aa.n1);
  attack->add_option("--n2", aa.n2);
  attack->add_option("--alpha", aa.alpha);
  attack->add_option("--decay", aa.decay);
  attack->add_option("--decay-every", aa.decay_every);
  attack->add_option("--batch", aa.batch, "0 uses the whole attack set");
  attack->add_option("--gamma-low", aa.gamma_low);
  attack->add_flag("--ascent", aa.ascent, "Step along +gradient");
  attack->add_option("--step-rule", aa.step_rule, "sign or gradient");
  attack->add_flag("--no-control", aa.no_control, "Skip the random-perturbation rows");

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "Robustness report for a model");
  eval->add_option("--model", ea.model);
  eval->add_option("--data", ea.data);
  eval->add_option("--eps", ea.eps);
  eval->add_option("--pgd-steps", ea.pgd_steps);
  eval->add_option("--pgd-step", ea.pgd_step, "0 means eps / 4");

  TheoryArgs th;
  auto* theory = app.add_subcommand("theory", "Bounds and constructions");
  theory->add_option("--what", th.what, "bounds, shallow or inflation");
  theory->add_option("--gamma", th.gamma);
  theory->add_option("--angle", th.r, "Angle floor r in radians");
  theory->add_option("--c", th.c);
  theory->add_option("--b", th.b);
  theory->add_option("--A", th.A);
  theory->add_option("--d", th.d);
  theory->add_option("--alpha", th.alpha);
  theory->add_option("--beta", th.beta);
  theory->add_option("--gamma-low", th.gamma_low);
  theory->add_option("--depth", th.depth);
  theory->add_option("--rho", th.rho);
  theory->add_option("--tau", th.tau);
  theory->add_option("--R", th.R);
  theory->add_option("--eps", th.eps);
  theory->add_option("--input-dim", th.input_dim);
  theory->add_option("--classes", th.classes);
  theory->add_option("--pairs", th.pairs);
  theory->add_option("--width", th.width);

  ReportArgs ra;
  auto* report = app.add_subcommand("report", "Summarize experiment CSV files");
  report->add_option("inputs", ra.inputs, "experiment.csv files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version requests exit 0; every other parse problem is a usage error.
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (!g.config.empty()) {
      const Config cfg = Config::load(g.config);
      std::set<std::string> used = apply_config(app, cfg);
      for (CLI::App* sub : app.get_subcommands()) used.merge(apply_config(*sub, cfg));
      for (const auto& [key, value] : cfg.values())
        if (!used.count(key) && !app.get_option_no_throw("--" + key))
          std::cerr << "note: config key '" << key << "' is not used by this command\n";
    }
    if (gen->parsed()) return run_gen_data(g, gd);
    if (train->parsed()) return run_train(g, ta);
    if (attack->parsed()) return run_attack(g, aa);
    if (eval->parsed()) return run_eval(g, ea);
    if (theory->parsed()) return run_theory(g, th);
    if (report->parsed()) return run_report(g, ra);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitUsage;
}
