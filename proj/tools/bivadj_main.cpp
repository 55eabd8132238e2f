#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "bivadj/checks.hpp"
#include "bivadj/datasets.hpp"
#include "bivadj/gof.hpp"
#include "bivadj/inference.hpp"
#include "bivadj/io_json.hpp"
#include "bivadj/kernels.hpp"
#include "bivadj/report.hpp"
#include "bivadj/svg.hpp"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitTargetMiss = 4;

struct DataFlags {
  std::string builtin;
  std::string csv;
  std::string schema = "pairs";
};

void add_data_flags(CLI::App* cmd, DataFlags& d) {
  cmd->add_option("--data", d.builtin, "builtin dataset: seeds_plants, twenty_pairs or auditc");
  cmd->add_option("--csv", d.csv, "CSV file path");
  cmd->add_option("--schema", d.schema, "CSV schema: pairs, table or studies")
      ->check(CLI::IsMember({"pairs", "table", "studies"}));
}

bivadj::PairSample load_pairs(const DataFlags& d) {
  if (!d.csv.empty()) {
    if (d.schema == "pairs") return bivadj::load_pairs_csv(d.csv);
    if (d.schema == "table") return bivadj::expand_table(bivadj::load_table_csv(d.csv), d.csv);
    throw CLI::ValidationError("--schema", "pair data required (pairs or table)");
  }
  if (d.builtin == "seeds_plants") return bivadj::seeds_plants();
  if (d.builtin == "twenty_pairs") return bivadj::twenty_pairs();
  throw CLI::ValidationError("--data", "unknown pair dataset '" + d.builtin + "'");
}

bivadj::StudySample load_studies(const DataFlags& d) {
  if (!d.csv.empty()) {
    if (d.schema != "studies") throw CLI::ValidationError("--schema", "study data required");
    return bivadj::load_studies_csv(d.csv);
  }
  if (d.builtin == "auditc") return bivadj::auditc();
  throw CLI::ValidationError("--data", "unknown study dataset '" + d.builtin + "'");
}

struct ModelFlags {
  std::string model = "poisson3";
  double t = 1.0;
  bool censored_tail = false;
  int trials1 = 100, trials2 = 100;
  int x0 = -1, y0 = -1;
  std::vector<int> study_x0, study_y0;
};

void add_model_flags(CLI::App* cmd, ModelFlags& m) {
  cmd->add_option("--model", m.model, "poisson3, poisson4, binomial2 or auditc3")
      ->check(CLI::IsMember({"poisson3", "poisson4", "binomial2", "auditc3"}));
  cmd->add_option("--t", m.t, "exp-decay tuning parameter (poisson3)");
  cmd->add_flag("--censored-tail", m.censored_tail,
                "treat the table tail cell as '5 or more' in the likelihood");
  cmd->add_option("--n1", m.trials1, "first binomial size");
  cmd->add_option("--n2", m.trials2, "second binomial size");
  cmd->add_option("--x0", m.x0, "first indicator threshold");
  cmd->add_option("--y0", m.y0, "second indicator threshold");
  cmd->add_option("--study-x0", m.study_x0, "per-study x thresholds (auditc3)");
  cmd->add_option("--study-y0", m.study_y0, "per-study y thresholds (auditc3)");
}

bivadj::ModelConfig to_config(const ModelFlags& m) {
  bivadj::ModelConfig cfg;
  if (m.model == "poisson3")
    cfg.kind = bivadj::ModelKind::Poisson3;
  else if (m.model == "poisson4")
    cfg.kind = bivadj::ModelKind::Poisson4;
  else if (m.model == "binomial2")
    cfg.kind = bivadj::ModelKind::Binomial2;
  else
    cfg.kind = bivadj::ModelKind::AuditC3;
  cfg.t = m.t;
  cfg.censored_tail = m.censored_tail;
  cfg.trials1 = m.trials1;
  cfg.trials2 = m.trials2;
  cfg.x0 = m.x0;
  cfg.y0 = m.y0;
  cfg.study_x0 = m.study_x0;
  cfg.study_y0 = m.study_y0;
  return cfg;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  out << text;
}

bivadj::MarginalSpec parse_marginal(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ':')) parts.push_back(tok);
  if (parts.empty()) throw CLI::ValidationError("marginal", "empty spec");
  const std::string& fam = parts[0];
  auto num = [&](std::size_t i) { return std::stod(parts.at(i)); };
  if (fam == "poisson" && parts.size() == 2) return bivadj::MarginalSpec::poisson(num(1));
  if (fam == "binomial" && parts.size() == 3)
    return bivadj::MarginalSpec::binomial(static_cast<int>(num(1)), num(2));
  if (fam == "normal" && parts.size() == 3) return bivadj::MarginalSpec::normal(num(1), num(2));
  if (fam == "exponential" && parts.size() == 2)
    return bivadj::MarginalSpec::exponential(num(1));
  throw CLI::ValidationError("marginal", "expected poisson:th, binomial:n:p, normal:xi:sigma or "
                                          "exponential:th, got '" + spec + "'");
}

bivadj::AdjustmentSpec parse_adjustment(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ':')) parts.push_back(tok);
  if (parts.empty()) throw CLI::ValidationError("adjustment", "empty spec");
  const std::string& fam = parts[0];
  auto num = [&](std::size_t i) { return std::stod(parts.at(i)); };
  if (fam == "expdecay" && parts.size() == 2) return bivadj::AdjustmentSpec::exp_decay(num(1));
  if (fam == "indicator" && parts.size() == 2)
    return bivadj::AdjustmentSpec::indicator_threshold(num(1));
  if (fam == "linear") return bivadj::AdjustmentSpec::linear_centered();
  if (fam == "phikernel") return bivadj::AdjustmentSpec::phi_kernel();
  if (fam == "quadrant") return bivadj::AdjustmentSpec::quadrant_indicator();
  if (fam == "expquadratic" && parts.size() == 3)
    return bivadj::AdjustmentSpec::exp_quadratic(num(1), num(2));
  if (fam == "limitbrutal") return bivadj::AdjustmentSpec::limit_brutal();
  throw CLI::ValidationError("adjustment", "expected expdecay:t, indicator:x0, linear, phikernel, "
                                            "quadrant, expquadratic:s:t or limitbrutal, got '" +
                                                spec + "'");
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1.0);
  return g;
}

json interval_json(const bivadj::ConfidenceCurve& curve, const std::vector<double>& levels) {
  json arr = json::array();
  for (double level : levels) {
    const auto iv = curve.interval(level);
    arr.push_back({{"level", level},
                   {"lo", iv.lo},
                   {"hi", iv.hi},
                   {"lo_at_edge", iv.lo_at_edge},
                   {"hi_at_edge", iv.hi_at_edge}});
  }
  return arr;
}

int run(int argc, char** argv) {
  CLI::App app{"bivadj: bivariate count models with bounded adjustment dependence"};
  app.require_subcommand(1);

  DataFlags data;
  ModelFlags model;
  std::string format = "json";
  std::string out_path;

  // ---- fit
  auto* fit_cmd = app.add_subcommand("fit", "maximum-likelihood fit");
  add_data_flags(fit_cmd, data);
  add_model_flags(fit_cmd, model);
  fit_cmd->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
  fit_cmd->add_option("--out", out_path, "output file (default stdout)");

  // ---- profile
  auto* prof_cmd = app.add_subcommand("profile", "profile-likelihood confidence curve");
  std::string prof_param = "alpha";
  double grid_lo = 0.0, grid_hi = 0.0;
  int grid_points = 200;
  std::vector<double> levels = {0.95};
  bool fixed_nuisance = false, parallel = false;
  std::string svg_path;
  add_data_flags(prof_cmd, data);
  add_model_flags(prof_cmd, model);
  prof_cmd->add_option("--param", prof_param, "parameter to profile (or 'rho')");
  auto* glo = prof_cmd->add_option("--grid-lo", grid_lo, "grid lower end");
  auto* ghi = prof_cmd->add_option("--grid-hi", grid_hi, "grid upper end");
  prof_cmd->add_option("--grid-points", grid_points)->check(CLI::PositiveNumber);
  prof_cmd->add_option("--level", levels, "confidence levels");
  prof_cmd->add_flag("--fixed-nuisance", fixed_nuisance,
                     "hold nuisance parameters at the MLE (plug-in curve)");
  prof_cmd->add_flag("--parallel", parallel, "evaluate grid points concurrently");
  prof_cmd->add_option("--svg", svg_path, "also write an SVG plot");
  prof_cmd->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
  prof_cmd->add_option("--out", out_path);

  // ---- gof
  auto* gof_cmd = app.add_subcommand("gof", "expected table, Pearson residuals and K");
  std::string gof_model = "poisson3";
  double gof_theta1 = 0.0, gof_theta2 = 0.0, gof_alpha = 0.0;
  bool have_params = false;
  add_data_flags(gof_cmd, data);
  gof_cmd->add_option("--model", gof_model, "independence or poisson3")
      ->check(CLI::IsMember({"independence", "poisson3"}));
  gof_cmd->add_option("--t", model.t, "exp-decay tuning parameter");
  auto* g1 = gof_cmd->add_option("--theta1", gof_theta1, "fix theta1 instead of fitting");
  gof_cmd->add_option("--theta2", gof_theta2, "fix theta2 instead of fitting")->needs(g1);
  gof_cmd->add_option("--alpha", gof_alpha, "fix alpha instead of fitting");
  gof_cmd->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
  gof_cmd->add_option("--out", out_path);

  // ---- simulate
  auto* sim_cmd = app.add_subcommand("simulate", "draw pairs from a fixed model");
  std::size_t sim_n = 100;
  std::uint64_t sim_seed = 1;
  double sim_alpha = 0.0, sim_theta1 = 1.0, sim_theta2 = 1.0, sim_p = 0.5;
  sim_cmd->add_option("--model", model.model, "poisson3 or binomial2")
      ->check(CLI::IsMember({"poisson3", "binomial2"}));
  sim_cmd->add_option("--n", sim_n, "number of pairs")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--seed", sim_seed, "generator seed");
  sim_cmd->add_option("--alpha", sim_alpha, "dependence parameter")->required();
  sim_cmd->add_option("--theta1", sim_theta1);
  sim_cmd->add_option("--theta2", sim_theta2);
  sim_cmd->add_option("--t", model.t);
  sim_cmd->add_option("--p", sim_p, "binomial success probability");
  sim_cmd->add_option("--n1", model.trials1);
  sim_cmd->add_option("--n2", model.trials2);
  sim_cmd->add_option("--x0", model.x0);
  sim_cmd->add_option("--y0", model.y0);
  sim_cmd->add_option("--out", out_path);

  // ---- range
  auto* range_cmd = app.add_subcommand("range", "admissible alpha range and correlation range");
  std::string m1_spec, m2_spec, a1_spec, a2_spec;
  range_cmd->add_option("--m1", m1_spec, "first marginal, e.g. poisson:1.7")->required();
  range_cmd->add_option("--adj1", a1_spec, "first adjustment, e.g. expdecay:1")->required();
  range_cmd->add_option("--m2", m2_spec, "second marginal")->required();
  range_cmd->add_option("--adj2", a2_spec, "second adjustment")->required();
  range_cmd->add_option("--out", out_path);

  // ---- plot
  auto* plot_cmd = app.add_subcommand("plot", "marginal-frequency overlay or pair scatter");
  std::string plot_kind = "scatter";
  int plot_max_count = 5;
  add_data_flags(plot_cmd, data);
  plot_cmd->add_option("--kind", plot_kind)->check(CLI::IsMember({"marginals", "scatter"}));
  plot_cmd->add_option("--max-count", plot_max_count, "last aggregated count bin");
  plot_cmd->add_option("--out", out_path, "SVG output file")->required();

  // ---- reproduce
  auto* rep_cmd = app.add_subcommand("reproduce", "run the reproduction target table");
  bool rep_json = false, rep_censored = false;
  std::vector<int> rep_only;
  rep_cmd->add_flag("--json", rep_json, "machine-readable report");
  rep_cmd->add_flag("--censored-tail", rep_censored, "add censored-tail likelihood variant rows");
  rep_cmd->add_option("--only", rep_only, "run only these criteria (1..10)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (fit_cmd->parsed()) {
    const auto cfg = to_config(model);
    bivadj::FitResult res;
    std::string provenance;
    if (cfg.kind == bivadj::ModelKind::AuditC3) {
      const auto studies = load_studies(data);
      provenance = studies.provenance;
      res = bivadj::fit(cfg, studies);
    } else {
      const auto pairs = load_pairs(data);
      provenance = pairs.provenance;
      res = bivadj::fit(cfg, pairs);
    }
    if (format == "json") {
      json j{{"model", model.model}, {"data", provenance}, {"fit", res}};
      emit(j.dump(2) + "\n", out_path);
    } else {
      emit(bivadj::fit_result_csv(res), out_path);
    }
    if (!res.converged) {
      std::cerr << "fit did not converge (" << res.n_evals << " evaluations)\n";
      return kExitNumerical;
    }
    return kExitOk;
  }

  if (prof_cmd->parsed()) {
    if (glo->count() && ghi->count() && !(grid_lo < grid_hi))
      throw CLI::ValidationError("--grid-lo/--grid-hi", "grid lower end must be below the upper");
    if (grid_points < 3) throw CLI::ValidationError("--grid-points", "at least 3 points");
    for (double level : levels)
      if (!(level > 0.0 && level < 1.0))
        throw CLI::ValidationError("--level", "levels must lie in (0,1)");
    const auto cfg = to_config(model);
    bivadj::ProfileOptions popt;
    popt.fixed_nuisance = fixed_nuisance;
    popt.parallel = parallel;
    bivadj::ConfidenceCurve curve;
    if (prof_param == "rho") {
      const auto pairs = load_pairs(data);
      if (!(glo->count() && ghi->count()))
        throw CLI::ValidationError("--grid-lo/--grid-hi", "required for the rho profile");
      curve = bivadj::profile_correlation(cfg, pairs, linspace(grid_lo, grid_hi, grid_points),
                                          popt);
    } else {
      std::vector<double> grid;
      auto make_grid = [&](const bivadj::FitResult& f) {
        if (glo->count() && ghi->count()) return linspace(grid_lo, grid_hi, grid_points);
        double est = 0.0, se = 0.1;
        for (std::size_t k = 0; k < f.names.size(); ++k)
          if (f.names[k] == prof_param) {
            est = f.estimates[k];
            se = f.se.empty() ? 0.1 : f.se[k];
          }
        return linspace(est - 5.0 * se, est + 5.0 * se, grid_points);
      };
      if (cfg.kind == bivadj::ModelKind::AuditC3) {
        const auto studies = load_studies(data);
        grid = make_grid(bivadj::fit(cfg, studies));
        curve = bivadj::profile(cfg, studies, prof_param, grid, popt);
      } else {
        const auto pairs = load_pairs(data);
        grid = make_grid(bivadj::fit(cfg, pairs));
        curve = bivadj::profile(cfg, pairs, prof_param, grid, popt);
      }
    }
    if (!svg_path.empty()) emit(bivadj::svg::confidence_curve(curve, levels), svg_path);
    if (format == "json") {
      json j{{"curve", curve}, {"intervals", interval_json(curve, levels)}};
      emit(j.dump(2) + "\n", out_path);
    } else {
      emit(bivadj::curve_csv(curve), out_path);
    }
    return kExitOk;
  }

  if (gof_cmd->parsed()) {
    const auto pairs = load_pairs(data);
    const auto table = bivadj::tabulate(pairs, 6, 6);
    have_params = g1->count() > 0;
    double th1 = gof_theta1, th2 = gof_theta2, alpha = gof_alpha;
    if (!have_params) {
      if (gof_model == "independence") {
        const auto s = bivadj::summary(pairs);
        th1 = s.mean_x;
        th2 = s.mean_y;
        alpha = 0.0;
      } else {
        bivadj::ModelConfig cfg;
        cfg.kind = bivadj::ModelKind::Poisson3;
        cfg.t = model.t;
        const auto f = bivadj::fit(cfg, pairs);
        th1 = f.estimate("theta1");
        th2 = f.estimate("theta2");
        alpha = f.estimate("alpha");
      }
    }
    if (gof_model == "independence") alpha = 0.0;
    const auto expd = bivadj::AdjustmentSpec::exp_decay(model.t);
    const bivadj::BivariateModel m(bivadj::MarginalSpec::poisson(th1), expd,
                                   bivadj::MarginalSpec::poisson(th2), expd, alpha);
    const auto expected = bivadj::expected_table(m, static_cast<double>(table.total()), 6, 6);
    const auto rep = bivadj::pearson(table, expected);
    if (format == "json") {
      json j{{"model", gof_model},
             {"theta1", th1},
             {"theta2", th2},
             {"alpha", alpha},
             {"report", rep}};
      emit(j.dump(2) + "\n", out_path);
    } else {
      emit(bivadj::gof_csv(rep), out_path);
    }
    return kExitOk;
  }

  if (sim_cmd->parsed()) {
    std::optional<bivadj::BivariateModel> m;
    if (model.model == "binomial2") {
      if (model.x0 < 0 || model.y0 < 0)
        throw CLI::ValidationError("--x0/--y0", "thresholds required for binomial2");
      m.emplace(bivadj::MarginalSpec::binomial(model.trials1, sim_p),
                bivadj::AdjustmentSpec::indicator_threshold(model.x0),
                bivadj::MarginalSpec::binomial(model.trials2, sim_p),
                bivadj::AdjustmentSpec::indicator_threshold(model.y0), sim_alpha);
    } else {
      m.emplace(bivadj::MarginalSpec::poisson(sim_theta1),
                bivadj::AdjustmentSpec::exp_decay(model.t),
                bivadj::MarginalSpec::poisson(sim_theta2),
                bivadj::AdjustmentSpec::exp_decay(model.t), sim_alpha);
    }
    const auto draws = m->sample(sim_n, sim_seed);
    bivadj::PairSample out;
    out.pairs.reserve(draws.size());
    for (const auto& [x, y] : draws)
      out.pairs.emplace_back(static_cast<int>(x), static_cast<int>(y));
    emit(bivadj::to_csv(out), out_path);
    return kExitOk;
  }

  if (range_cmd->parsed()) {
    const auto m1 = parse_marginal(m1_spec);
    const auto m2 = parse_marginal(m2_spec);
    const auto a1 = parse_adjustment(a1_spec);
    const auto a2 = parse_adjustment(a2_spec);
    const auto ar = bivadj::BivariateModel::alpha_range(m1, a1, m2, a2);
    const auto cr = bivadj::BivariateModel::corr_range(m1, a1, m2, a2);
    json j{{"alpha_range", {ar.first, ar.second}}, {"corr_range", {cr.lo, cr.hi}}};
    emit(j.dump(2) + "\n", out_path);
    return kExitOk;
  }

  if (plot_cmd->parsed()) {
    const auto pairs = load_pairs(data);
    if (plot_kind == "marginals") {
      const auto s = bivadj::summary(pairs);
      emit(bivadj::svg::marginal_overlay(pairs, s.mean_x, s.mean_y, plot_max_count), out_path);
    } else {
      emit(bivadj::svg::scatter(pairs), out_path);
    }
    return kExitOk;
  }

  if (rep_cmd->parsed()) {
    bivadj::report::Options opt;
    opt.censored_tail = rep_censored;
    opt.only = rep_only;
    const auto rows = bivadj::report::run_all(opt);
    if (rep_json) {
      json arr = json::array();
      for (const auto& r : rows)
        arr.push_back({{"criterion", r.criterion},
                       {"id", r.id},
                       {"observed", r.observed},
                       {"target", r.target},
                       {"tol", r.tol},
                       {"pass", r.pass},
                       {"informational", r.informational},
                       {"expected_fail", r.expected_fail},
                       {"note", r.note},
                       {"seconds", r.seconds}});
      std::cout << arr.dump(2) << "\n";
    } else {
      std::cout << bivadj::report::render_text(rows);
    }
    if (!bivadj::report::all_pass(rows)) {
      std::cerr << "reproduction targets missed:\n";
      for (const auto& r : rows)
        if (!r.informational && !r.pass)
          std::cerr << "  criterion " << r.criterion << " " << r.id
                    << (r.expected_fail ? "  (documented)" : "") << "\n";
      return kExitTargetMiss;
    }
    return kExitOk;
  }

  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CLI::ParseError&) {
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
