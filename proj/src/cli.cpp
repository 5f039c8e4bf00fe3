#include "gvmf/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <sstream>

#include "gvmf/error.hpp"
#include "gvmf/gof.hpp"
#include "gvmf/inference.hpp"
#include "gvmf/io.hpp"
#include "gvmf/knn.hpp"
#include "gvmf/model.hpp"
#include "gvmf/rng.hpp"
#include "gvmf/sampling.hpp"

namespace gvmf::cli {
namespace {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const Cell& c) {
  std::string s = std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) return format_number(v);
        else if constexpr (std::is_same_v<T, long long>) return std::to_string(v);
        else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
        else return v;
      },
      c);
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + '"';
}

nlohmann::json json_value(const Cell& c) {
  return std::visit(
      [](const auto& v) -> nlohmann::json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(v)) return nullptr;
          return v;
        } else {
          return v;
        }
      },
      c);
}

struct Options {
  std::string family = "I";
  int d = 3;
  double alpha = 1.0;
  double kappa = 1.0;
  std::vector<double> mu;
  long long n = 1000;
  int k = 3;
  std::uint64_t seed = 0;
  int replicates = 500;
  double beta_level = 0.05;
  std::string estimator = "MLE";
  std::string out;
  std::string format = "csv";
  std::string in;
  bool renormalize = false;
  bool group_grid = false;
  std::vector<double> x;
  std::vector<double> betas{1, 2, 4};
  std::vector<double> alphas{0.5, 1, 1.5, 2, 2.5, 3};
  std::vector<double> kappas{0.1, 0.5, 1, 1.5, 2, 2.5, 3, 4, 5, 6, 7};
  std::string scenario = "TypeI_FB";
  std::vector<int> js;
  std::optional<double> critical;
  bool bootstrap = false;
  std::size_t min_block_size = 100;
  std::vector<long> block_extent{16, 15, 16};
  std::vector<long> block_origin{1, 1, 1};
};

Family family_of(const Options& o) {
  const auto f = parse_family(o.family);
  if (!f) fail(ErrorKind::InvalidArgs, "--family: unknown family '" + o.family + "'");
  return *f;
}

Estimator estimator_of(const Options& o) {
  const auto e = parse_estimator(o.estimator);
  if (!e) fail(ErrorKind::InvalidArgs, "--estimator: expected MLE or MoM, got '" + o.estimator + "'");
  return *e;
}

GvmfParams params_of(const Options& o) {
  require(o.d >= 2, ErrorKind::InvalidArgs, "--d: dimension must be >= 2");
  UnitVector mu = UnitVector::basis(o.d, o.d - 1);
  if (!o.mu.empty()) {
    require(static_cast<int>(o.mu.size()) == o.d, ErrorKind::DimensionMismatch,
            "--mu: expected " + std::to_string(o.d) + " components");
    mu = UnitVector::normalized(Eigen::Map<const Eigen::VectorXd>(o.mu.data(), o.d));
  }
  GvmfParams p(family_of(o), o.alpha, o.kappa, mu);
  p.validate();
  return p;
}

GofConfig gof_config_of(const Options& o, Family family) {
  GofConfig c;
  c.family = family;
  c.k = o.k;
  c.n_null_replicates = o.replicates;
  c.beta_level = o.beta_level;
  c.estimator = estimator_of(o);
  c.seed = SeedSpec{o.seed, 0};
  c.validate();
  return c;
}

Dataset input_of(const Options& o) {
  require(!o.in.empty(), ErrorKind::InvalidArgs, "--in: an input file is required");
  return load_sample(o.in, o.d, o.renormalize);
}

void add_mu_columns(Table& t, int d, const std::string& prefix = "mu") {
  for (int j = 0; j < d; ++j) t.columns.push_back(prefix + std::to_string(j + 1));
}

void push_mu(std::vector<Cell>& row, const UnitVector& mu) {
  for (int j = 0; j < mu.dim(); ++j) row.emplace_back(mu(j));
}

void add_manifest(Table& t, const DatasetManifest& m) {
  t.meta.emplace_back("input", m.path);
  t.meta.emplace_back("rows", static_cast<long long>(m.n_rows));
  t.meta.emplace_back("renormalized", m.normalized);
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(m.checksum));
  t.meta.emplace_back("checksum_fnv1a64", std::string(buf));
}

void add_seed(Table& t, const Options& o) {
  t.meta.emplace_back("seed", static_cast<long long>(o.seed));
  t.meta.emplace_back("rng", std::string(kRngVersion));
}

Table cmd_simulate(const Options& o) {
  const GvmfParams p = params_of(o);
  require(o.n >= 0, ErrorKind::InvalidArgs, "--n: must be >= 0");
  Rng rng(SeedSpec{o.seed, 0});
  const DirectionSample s = sample_gvmf(p, rng, static_cast<std::size_t>(o.n));
  Table t;
  t.command = "simulate";
  for (int j = 0; j < p.d; ++j) t.columns.push_back("x" + std::to_string(j + 1));
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    std::vector<Cell> row;
    for (int j = 0; j < p.d; ++j) row.emplace_back(s.points(j, i));
    t.rows.push_back(std::move(row));
  }
  add_seed(t, o);
  return t;
}

Table cmd_density(const Options& o) {
  const GvmfParams p = params_of(o);
  DirectionSample pts;
  if (!o.in.empty()) {
    pts = input_of(o).sample;
  } else {
    require(static_cast<int>(o.x.size()) == o.d, ErrorKind::DimensionMismatch,
            "--x: expected " + std::to_string(o.d) + " components");
    pts = DirectionSample(Eigen::Map<const Eigen::VectorXd>(o.x.data(), o.d));
    UnitVector(pts.points.col(0));
  }
  const Eigen::VectorXd ld = log_density(p, pts.points);
  Table t;
  t.command = "density";
  for (int j = 0; j < p.d; ++j) t.columns.push_back("x" + std::to_string(j + 1));
  t.columns.push_back("log_density");
  t.columns.push_back("density");
  for (Eigen::Index i = 0; i < pts.size(); ++i) {
    std::vector<Cell> row;
    for (int j = 0; j < p.d; ++j) row.emplace_back(pts.points(j, i));
    row.emplace_back(ld(i));
    row.emplace_back(std::exp(ld(i)));
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table cmd_moments(const Options& o) {
  const GvmfParams p = params_of(o);
  const MomentKind kind = natural_moment_kind(p.family);
  const char* kind_name = kind == MomentKind::SignedPower    ? "signed_power"
                          : kind == MomentKind::ChordalPower ? "chordal_power"
                                                             : "abs_power";
  Table t;
  t.command = "moments";
  t.columns = {"quantity", "beta", "value"};
  for (double b : o.betas)
    t.rows.push_back({std::string(kind_name), b, moment(p, {b, kind})});
  t.rows.push_back({std::string("mean_resultant_length"), std::nan(""), mean_resultant_length(p)});
  t.rows.push_back({std::string("entropy"), std::nan(""), entropy(p)});
  t.rows.push_back({std::string("log_norm_const"), std::nan(""),
                    log_norm_const(p.family, p.d, p.kappa, p.alpha).log_magnitude});
  return t;
}

Table cmd_entropy(const Options& o) {
  Table t;
  t.command = "entropy";
  if (!o.in.empty()) {
    const Dataset data = input_of(o);
    const EntropyEstimate e = estimate_entropy(data.sample, o.k);
    t.columns = {"n", "k", "m", "mean_log_rho", "entropy"};
    t.rows.push_back({static_cast<long long>(e.n), static_cast<long long>(e.k),
                      static_cast<long long>(e.m), e.mean_log_rho, e.value});
    add_manifest(t, data.manifest);
  } else {
    const GvmfParams p = params_of(o);
    t.columns = {"family", "alpha", "kappa", "entropy"};
    t.rows.push_back({std::string(to_string(p.family)), p.alpha, p.kappa, entropy(p)});
  }
  return t;
}

Table cmd_fit(const Options& o) {
  const Dataset data = input_of(o);
  const Family fam = family_of(o);
  const FitResult r = fit(estimator_of(o), fam, data.sample);
  Table t;
  t.command = "fit";
  t.columns = {"family", "estimator", "alpha", "kappa"};
  add_mu_columns(t, data.sample.dim());
  for (const char* c : {"loglik", "converged", "iterations", "on_boundary", "score_residual", "diagnostic"})
    t.columns.emplace_back(c);
  std::vector<Cell> row{std::string(to_string(fam)), std::string(to_string(r.method)),
                        r.params.alpha, r.params.kappa};
  push_mu(row, r.params.mu);
  row.insert(row.end(), {r.loglik, r.converged, static_cast<long long>(r.iterations),
                         r.on_boundary, r.score_residual, r.diagnostic});
  t.rows.push_back(std::move(row));
  add_manifest(t, data.manifest);
  return t;
}

void add_gof_columns(Table& t, int d) {
  for (const char* c : {"statistic", "critical_value", "p_value", "reject", "alpha", "kappa"})
    t.columns.emplace_back(c);
  add_mu_columns(t, d);
  for (const char* c : {"entropy_estimate", "null_replicates", "null_dropped"}) t.columns.emplace_back(c);
}

void push_gof(std::vector<Cell>& row, const GofResult& g) {
  row.insert(row.end(), {g.statistic, g.critical_value, g.p_value, g.reject,
                         g.fitted.params.alpha, g.fitted.params.kappa});
  push_mu(row, g.fitted.params.mu);
  row.insert(row.end(), {g.entropy.value, static_cast<long long>(g.null_replicates),
                         static_cast<long long>(g.null_dropped)});
}

Table cmd_gof(const Options& o) {
  const Dataset data = input_of(o);
  const GofConfig cfg = gof_config_of(o, family_of(o));
  const GofResult g = run_gof_test(data.sample, cfg);
  Table t;
  t.command = "gof";
  t.columns = {"family", "n", "k"};
  add_gof_columns(t, data.sample.dim());
  std::vector<Cell> row{std::string(to_string(cfg.family)), static_cast<long long>(data.sample.size()),
                        static_cast<long long>(cfg.k)};
  push_gof(row, g);
  t.rows.push_back(std::move(row));
  add_manifest(t, data.manifest);
  add_seed(t, o);
  return t;
}

Table cmd_critical_table(const Options& o) {
  const Family fam = family_of(o);
  GofConfig cfg = gof_config_of(o, fam);
  Table t;
  t.command = "critical-table";
  t.columns = {"family", "alpha", "kappa", "n", "k", "beta_level", "critical_value", "replicates",
               "dropped"};
  std::uint64_t cell = 0;
  for (double a : o.alphas)
    for (double kap : o.kappas) {
      cfg.seed = SeedSpec{o.seed, 0}.child(cell++);
      const GvmfParams p(fam, a, kap, UnitVector::basis(o.d, o.d - 1));
      const NullDistribution nd = simulate_null(p, o.n, cfg);
      t.rows.push_back({std::string(to_string(fam)), a, kap, static_cast<long long>(o.n),
                        static_cast<long long>(o.k), o.beta_level, nd.critical_value,
                        static_cast<long long>(nd.abs_statistics.size()),
                        static_cast<long long>(nd.dropped)});
    }
  add_seed(t, o);
  t.meta.emplace_back("estimator", o.estimator);
  return t;
}

Table cmd_power(const Options& o) {
  const auto sc = parse_power_scenario(o.scenario);
  if (!sc) fail(ErrorKind::InvalidArgs, "--scenario: expected TypeI_FB or Axial_FB");
  std::vector<int> js = o.js;
  if (js.empty())
    for (int j = 1; j <= 20; ++j) js.push_back(j);
  GofConfig cfg;
  cfg.family = null_family(*sc);
  cfg.k = o.k;
  cfg.n_null_replicates = o.bootstrap ? o.replicates : 500;
  cfg.beta_level = o.beta_level;
  cfg.estimator = estimator_of(o);
  cfg.seed = SeedSpec{o.seed, 0};
  std::optional<double> crit;
  if (!o.bootstrap) crit = o.critical.value_or(*sc == PowerScenario::TypeI_FB ? 0.05373 : 0.05917);
  const int reps = o.bootstrap ? 100 : o.replicates;
  const auto rows = power_study(*sc, js, o.n, reps, cfg, crit);
  Table t;
  t.command = "power";
  t.columns = {"scenario", "j", "kappa1", "beta2", "power", "standard_error", "rejections",
               "replicates", "dropped", "acceptance_rate"};
  for (const auto& r : rows) {
    const FisherBinghamParams fb = power_alternative(*sc, r.j);
    t.rows.push_back({std::string(to_string(*sc)), static_cast<long long>(r.j), fb.kappa1, fb.beta2,
                      r.power, r.standard_error, static_cast<long long>(r.rejections),
                      static_cast<long long>(r.replicates), static_cast<long long>(r.dropped),
                      r.acceptance_rate});
  }
  add_seed(t, o);
  if (crit) t.meta.emplace_back("critical_value", *crit);
  return t;
}

Table cmd_blocks(const Options& o) {
  const Dataset data = input_of(o);
  require(data.manifest.has_lattice, ErrorKind::InvalidArgs,
          "--in: block tests need three leading lattice index columns");
  require(o.block_extent.size() == 3 && o.block_origin.size() == 3, ErrorKind::InvalidArgs,
          "--block-extent and --block-origin take three integers");
  BlockSpec spec;
  for (int a = 0; a < 3; ++a) {
    spec.extent[a] = o.block_extent[a];
    spec.origin[a] = o.block_origin[a];
  }
  spec.min_block_size = o.min_block_size;
  BlockOptions bo;
  bo.group_grid = o.group_grid;
  const GofConfig cfg = gof_config_of(o, family_of(o));
  const auto rows = run_block_tests(data, spec, cfg, bo);
  Table t;
  t.command = "blocks";
  t.columns = {"l1", "l2", "l3", "n", "status"};
  add_gof_columns(t, data.sample.dim());
  t.columns.emplace_back("note");
  for (const auto& r : rows) {
    std::vector<Cell> row{static_cast<long long>(r.start[0]), static_cast<long long>(r.start[1]),
                          static_cast<long long>(r.start[2]), static_cast<long long>(r.n), r.status};
    if (r.result) {
      push_gof(row, *r.result);
    } else {
      const std::size_t blanks = t.columns.size() - row.size() - 1;
      for (std::size_t b = 0; b < blanks; ++b) row.emplace_back(std::string());
    }
    row.emplace_back(r.note);
    t.rows.push_back(std::move(row));
  }
  add_manifest(t, data.manifest);
  add_seed(t, o);
  return t;
}

Table cmd_qq(const Options& o) {
  const Dataset data = input_of(o);
  const Family fam = family_of(o);
  const FitResult r = fit(estimator_of(o), fam, data.sample);
  const auto pairs = qq_pairs(data.sample, r.params);
  Table t;
  t.command = "qq";
  t.columns = {"sample_quantile", "model_quantile"};
  for (const auto& [a, b] : pairs) t.rows.push_back({a, b});
  t.meta.emplace_back("alpha", r.params.alpha);
  t.meta.emplace_back("kappa", r.params.kappa);
  add_manifest(t, data.manifest);
  return t;
}

}  // namespace

void write_csv(std::ostream& out, const Table& t) {
  for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << csv_field(t.columns[c]);
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << csv_field(row[c]);
    out << '\n';
  }
}

void write_json(std::ostream& out, const Table& t) {
  nlohmann::json j;
  j["command"] = t.command;
  j["columns"] = t.columns;
  j["rows"] = nlohmann::json::array();
  for (const auto& row : t.rows) {
    nlohmann::json r = nlohmann::json::array();
    for (const auto& c : row) r.push_back(json_value(c));
    j["rows"].push_back(std::move(r));
  }
  j["meta"] = nlohmann::json::object();
  for (const auto& [k, v] : t.meta) j["meta"][k] = json_value(v);
  out << j.dump(2) << '\n';
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Generalized von Mises-Fisher distributions: sampling, estimation and testing"};
  app.name("gvmf");
  app.require_subcommand(1);
  Options o;

  auto model_flags = [&](CLI::App* s) {
    s->add_option("--family", o.family, "I, II or Axial")->capture_default_str();
    s->add_option("--d", o.d, "Ambient dimension")->capture_default_str();
    s->add_option("--alpha", o.alpha, "Shape parameter alpha")->capture_default_str();
    s->add_option("--kappa", o.kappa, "Concentration kappa")->capture_default_str();
    s->add_option("--mu", o.mu, "Mean direction, comma separated (default: last axis)")->delimiter(',');
  };
  auto output_flags = [&](CLI::App* s) {
    s->add_option("--out", o.out, "Output file (default: stdout)");
    s->add_option("--format", o.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
  };
  auto input_flags = [&](CLI::App* s) {
    s->add_option("--in", o.in, "Input CSV of unit vectors");
    s->add_flag("--renormalize", o.renormalize, "Project rows onto the sphere instead of rejecting them");
  };
  auto test_flags = [&](CLI::App* s) {
    s->add_option("--k", o.k, "Neighbour order")->capture_default_str();
    s->add_option("--replicates", o.replicates, "Monte-Carlo replicates")->capture_default_str();
    s->add_option("--beta-level", o.beta_level, "Significance level")->capture_default_str();
    s->add_option("--estimator", o.estimator, "MLE or MoM")->capture_default_str();
    s->add_option("--seed", o.seed, "Master seed")->capture_default_str();
  };

  auto* simulate = app.add_subcommand("simulate", "Draw a sample from a GvMF law");
  model_flags(simulate);
  simulate->add_option("--n", o.n, "Sample size")->capture_default_str();
  simulate->add_option("--seed", o.seed, "Master seed")->capture_default_str();
  output_flags(simulate);

  auto* density = app.add_subcommand("density", "Evaluate the log density");
  model_flags(density);
  input_flags(density);
  density->add_option("--x", o.x, "Single evaluation point, comma separated")->delimiter(',');
  output_flags(density);

  auto* moments = app.add_subcommand("moments", "Moments, resultant length and entropy of a law");
  model_flags(moments);
  moments->add_option("--beta", o.betas, "Moment orders, comma separated")->delimiter(',');
  output_flags(moments);

  auto* entropy_cmd = app.add_subcommand("entropy", "Nearest-neighbour entropy of a sample, or exact model entropy");
  model_flags(entropy_cmd);
  input_flags(entropy_cmd);
  entropy_cmd->add_option("--k", o.k, "Neighbour order")->capture_default_str();
  output_flags(entropy_cmd);

  auto* fit_cmd = app.add_subcommand("fit", "Estimate parameters from a sample");
  fit_cmd->add_option("--family", o.family, "I, II or Axial")->capture_default_str();
  fit_cmd->add_option("--d", o.d, "Ambient dimension")->capture_default_str();
  fit_cmd->add_option("--estimator", o.estimator, "MLE or MoM")->capture_default_str();
  input_flags(fit_cmd);
  output_flags(fit_cmd);

  auto* gof_cmd = app.add_subcommand("gof", "Entropy goodness-of-fit test with bootstrap critical value");
  gof_cmd->add_option("--family", o.family, "I, II or Axial")->capture_default_str();
  gof_cmd->add_option("--d", o.d, "Ambient dimension")->capture_default_str();
  input_flags(gof_cmd);
  test_flags(gof_cmd);
  output_flags(gof_cmd);

  auto* crit = app.add_subcommand("critical-table", "Null critical values over an (alpha, kappa) grid");
  crit->add_option("--family", o.family, "I, II or Axial")->capture_default_str();
  crit->add_option("--d", o.d, "Ambient dimension")->capture_default_str();
  crit->add_option("--n", o.n, "Sample size")->capture_default_str();
  crit->add_option("--alphas", o.alphas, "Alpha grid, comma separated")->delimiter(',');
  crit->add_option("--kappas", o.kappas, "Kappa grid, comma separated")->delimiter(',');
  test_flags(crit);
  output_flags(crit);

  auto* power = app.add_subcommand("power", "Power against Fisher-Bingham alternatives");
  power->add_option("--scenario", o.scenario, "TypeI_FB or Axial_FB")->capture_default_str();
  power->add_option("--j", o.js, "Alternative indices, comma separated (default 1..20)")->delimiter(',');
  power->add_option("--n", o.n, "Sample size")->capture_default_str();
  power->add_option("--critical", o.critical, "Fixed critical value (default 0.05373 / 0.05917)");
  power->add_flag("--bootstrap", o.bootstrap, "Bootstrap every replicate instead of a fixed critical value");
  test_flags(power);
  output_flags(power);

  auto* blocks = app.add_subcommand("blocks", "Blockwise tests on a lattice-indexed sample");
  blocks->add_option("--family", o.family, "I, II or Axial");
  blocks->add_option("--d", o.d, "Ambient dimension")->capture_default_str();
  input_flags(blocks);
  test_flags(blocks);
  blocks->add_flag("--group-grid", o.group_grid, "Share null distributions over a coarse parameter grid");
  blocks->add_option("--min-block-size", o.min_block_size, "Skip smaller blocks")->capture_default_str();
  blocks->add_option("--block-extent", o.block_extent, "Block extents along the three lattice axes")->delimiter(',');
  blocks->add_option("--block-origin", o.block_origin, "Lattice index of the first block corner")->delimiter(',');
  output_flags(blocks);

  auto* qq = app.add_subcommand("qq", "Quantile pairs of mu'X against the fitted marginal");
  qq->add_option("--family", o.family, "I, II or Axial");
  qq->add_option("--d", o.d, "Ambient dimension")->capture_default_str();
  qq->add_option("--estimator", o.estimator, "MLE or MoM")->capture_default_str();
  input_flags(qq);
  output_flags(qq);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidationError;
  }

  CLI::App* chosen = app.get_subcommands().front();
  const std::string name = chosen->get_name();
  auto given = [&](const char* flag) {
    const CLI::Option* opt = chosen->get_option_no_throw(flag);
    return opt != nullptr && opt->count() > 0;
  };
  // Defaults that depend on the subcommand.
  if ((name == "blocks" || name == "qq") && !given("--family")) o.family = "Axial";
  if (!given("--replicates")) o.replicates = name == "power" ? 100 : 500;

  try {
    Table t;
    if (name == "simulate") t = cmd_simulate(o);
    else if (name == "density") t = cmd_density(o);
    else if (name == "moments") t = cmd_moments(o);
    else if (name == "entropy") t = cmd_entropy(o);
    else if (name == "fit") t = cmd_fit(o);
    else if (name == "gof") t = cmd_gof(o);
    else if (name == "critical-table") t = cmd_critical_table(o);
    else if (name == "power") t = cmd_power(o);
    else if (name == "blocks") t = cmd_blocks(o);
    else t = cmd_qq(o);

    std::ofstream file;
    std::ostream* sink = &out;
    if (!o.out.empty()) {
      file.open(o.out, std::ios::binary);
      if (!file) fail(ErrorKind::InvalidArgs, "--out: cannot write " + o.out);
      sink = &file;
    }
    if (o.format == "json") write_json(*sink, t);
    else write_csv(*sink, t);
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.is_numeric() ? kNumericError : kValidationError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  }
}

}  // namespace gvmf::cli
