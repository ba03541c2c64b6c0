#pragma once

// Command-line front end. run_cli() is the whole program; tools/ wraps it in
// main().
//
// Exit codes: 0 success or all checks passed, 1 domain error or failed
// verification, 2 usage error.

#include <cstdint>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "robust_t/inference.hpp"
#include "robust_t/io.hpp"
#include "robust_t/montecarlo.hpp"
#include "robust_t/normal_dist.hpp"
#include "robust_t/sampling.hpp"
#include "robust_t/statistics.hpp"

namespace robust_t::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

namespace detail {

struct Common {
  bool json = false;
  unsigned threads = 1;
};

inline std::vector<double> parse_real_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto v = robust_t::detail::parse_number(robust_t::detail::trim(item));
    if (!v) throw CLI::ValidationError(what, "cannot parse '" + item + "' as a number");
    out.push_back(*v);
  }
  if (out.empty()) throw CLI::ValidationError(what, "empty list");
  return out;
}

inline std::string fmt(double x, int precision = 10) {
  std::ostringstream os;
  os << std::setprecision(precision) << x;
  return os.str();
}

inline void emit(std::ostream& out, const Common& common, const nlohmann::json& report,
                 const std::string& human) {
  if (common.json) {
    out << report.dump(2) << '\n';
  } else {
    out << human;
  }
}

// ---------------------------------------------------------------------------

struct TestArgs {
  std::string data;
  std::optional<std::string> column;
  double mu0 = 0.0;
  std::string alternative = "two-sided";
  std::string calibration = "asymptotic";
  std::optional<std::string> table;
  double level = 0.05;
  bool classical = false;
};

inline int run_test(const TestArgs& a, const Common& common, std::ostream& out) {
  const Sample sample = read_sample(a.data, a.column);
  const Alternative alt = a.alternative == "greater" ? Alternative::greater
                          : a.alternative == "less"  ? Alternative::less
                                                     : Alternative::two_sided;
  TestResult result;
  std::optional<QuantileTable> table;
  if (a.classical) {
    result = classical_one_sample_test(sample, a.mu0, alt, a.level);
  } else if (a.calibration == "mc") {
    if (!a.table) throw DomainError("--calibration mc requires --table");
    table = load_table(*a.table);
    result = robust_one_sample_test(sample, a.mu0, alt, Calibration::monte_carlo, &*table, a.level,
                                    common.threads);
  } else {
    result = robust_one_sample_test(sample, a.mu0, alt, a.level);
  }

  nlohmann::json args = {{"data", a.data},           {"mu0", a.mu0},
                         {"alternative", a.alternative}, {"calibration", a.calibration},
                         {"level", a.level},         {"classical", a.classical}};
  args["column"] = a.column ? nlohmann::json(*a.column) : nlohmann::json(nullptr);
  args["table"] = a.table ? nlohmann::json(*a.table) : nlohmann::json(nullptr);
  nlohmann::json results = to_json(result);
  if (!a.classical) {
    std::vector<double> buf(sample.begin(), sample.end());
    const auto mm = median_mad_inplace(buf);
    results["median"] = mm.median;
    results["mad"] = mm.mad;
  }
  std::vector<std::string> notes;
  if (table && table->reps < kReportableTableReps) {
    notes.push_back("quantile table has fewer than " + std::to_string(kReportableTableReps) +
                    " replications");
  }
  if (!a.classical && result.calibration == Calibration::asymptotic && sample.size() < 30) {
    notes.push_back("asymptotic p-value at small n; consider --calibration mc");
  }
  results["notes"] = notes;

  std::ostringstream h;
  if (a.classical) {
    h << "Student one-sample t test\n";
    h << "  t                 = " << fmt(result.statistic_raw) << '\n';
    h << "  df                = " << sample.size() - 1 << '\n';
  } else {
    h << "Median/MAD one-sample test\n";
    h << "  median            = " << fmt(results["median"].get<double>()) << '\n';
    h << "  MAD               = " << fmt(results["mad"].get<double>()) << '\n';
    h << "  T_m               = " << fmt(result.statistic_raw) << '\n';
    h << "  scaled statistic  = " << fmt(result.statistic_scaled) << '\n';
  }
  h << "  n                 = " << result.n << '\n';
  h << "  mu0               = " << fmt(result.mu0) << '\n';
  h << "  alternative       = " << to_string(result.alternative) << '\n';
  h << "  calibration       = " << to_string(result.calibration);
  if (result.table_id) h << " (" << *result.table_id << ")";
  h << '\n';
  h << "  p-value           = " << fmt(result.p_value) << '\n';
  if (result.reject_at) {
    h << "  decision          = " << (result.reject_at->reject ? "reject" : "do not reject")
      << " H0 at level " << fmt(result.reject_at->level) << '\n';
  }
  for (const auto& note : notes) h << "  note: " << note << '\n';

  emit(out, common, make_report("test", args, std::nullopt, results), h.str());
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct CalibrateArgs {
  std::size_t n = 0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::optional<std::string> probs;
  std::string out;
};

inline int run_calibrate(const CalibrateArgs& a, const Common& common, std::ostream& out) {
  const std::vector<double> probs =
      a.probs ? parse_real_list(*a.probs, "--probs") : default_table_probs();
  const RngSpec rng{a.seed, a.stream, 0};
  const QuantileTable table = build_quantile_table(a.n, probs, a.reps, rng, common.threads);
  save_table(table, a.out);

  nlohmann::json args = {{"n", a.n}, {"reps", a.reps}, {"seed", a.seed},
                         {"stream", a.stream}, {"probs", probs}, {"out", a.out}};
  nlohmann::json results = {{"table_id", table.id()},
                            {"n", table.n},
                            {"reps", table.reps},
                            {"probs", table.probs},
                            {"quantiles", table.quantiles}};
  std::ostringstream h;
  h << "Calibrated pivot quantiles for n = " << table.n << " (" << table.reps
    << " replications, seed " << a.seed << ")\n";
  h << "  prob          quantile\n";
  for (std::size_t i = 0; i < table.probs.size(); ++i) {
    h << "  " << std::left << std::setw(12) << fmt(table.probs[i]) << "  "
      << fmt(table.quantiles[i], 12) << '\n';
  }
  h << "Saved to " << a.out << '\n';
  emit(out, common, make_report("calibrate", args, a.seed, results), h.str());
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct VerifyPivotArgs {
  std::size_t n = 0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> params;
  double tolerance = 1e-10;
};

inline int run_verify_pivot(const VerifyPivotArgs& a, const Common& common, std::ostream& out) {
  std::vector<std::pair<double, double>> settings;
  const std::vector<std::string> raw =
      a.params.empty() ? std::vector<std::string>{"0,1", "7,3"} : a.params;
  for (const auto& p : raw) {
    const auto v = parse_real_list(p, "--params");
    if (v.size() != 2) throw CLI::ValidationError("--params", "expected MU,SIGMA, got '" + p + "'");
    if (!(v[1] > 0.0)) throw DomainError("--params: sigma must be positive in '" + p + "'");
    settings.emplace_back(v[0], v[1]);
  }

  SimulationConfig base;
  base.n = a.n;
  base.reps = a.reps;
  base.rng = RngSpec{a.seed, 0, 0};
  base.statistic_kind = StatisticKind::pivot;
  base.data_model = StdNormalModel{};
  base.mu0 = 0.0;
  base.threads = common.threads;
  const auto reference = simulate_statistic(base);

  bool all_ok = true;
  nlohmann::json rows = nlohmann::json::array();
  std::ostringstream h;
  h << "Pivot invariance check: n = " << a.n << ", reps = " << a.reps << ", seed = " << a.seed
    << ", tolerance = " << fmt(a.tolerance) << '\n';
  h << "  reference (mu, sigma) = (0, 1), q50 = " << fmt(empirical_quantile(reference, 0.5), 12)
    << '\n';
  for (const auto& [mu, sigma] : settings) {
    SimulationConfig cfg = base;
    cfg.data_model = LocationScaleModel{mu, sigma};
    cfg.mu0 = mu;
    const auto dist = simulate_statistic(cfg);
    double max_diff = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
      max_diff = std::max(max_diff, std::fabs(dist.sorted_values[i] - reference.sorted_values[i]));
    }
    const bool ok = max_diff <= a.tolerance;
    all_ok = all_ok && ok;
    rows.push_back({{"mu", mu}, {"sigma", sigma}, {"max_abs_diff", max_diff}, {"match", ok}});
    h << "  (" << fmt(mu) << ", " << fmt(sigma) << "): max |diff| = " << fmt(max_diff, 3) << "  "
      << (ok ? "MATCH" : "MISMATCH") << '\n';
  }
  h << (all_ok ? "PASS" : "FAIL") << '\n';

  nlohmann::json args = {{"n", a.n}, {"reps", a.reps}, {"seed", a.seed}, {"params", raw},
                         {"tolerance", a.tolerance}};
  nlohmann::json results = {{"settings", rows}, {"pass", all_ok}};
  emit(out, common, make_report("verify-pivot", args, a.seed, results), h.str());
  return all_ok ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------------------

struct VerifyNormalityArgs {
  std::string grid = "20,50,200,1000";
  std::size_t reps = 0;
  std::uint64_t seed = 0;
};

inline int run_verify_normality(const VerifyNormalityArgs& a, const Common& common,
                                std::ostream& out) {
  std::vector<std::size_t> grid;
  for (double v : parse_real_list(a.grid, "--grid")) {
    if (!(v >= 2.0) || v != std::floor(v)) {
      throw CLI::ValidationError("--grid", "sample sizes must be integers >= 2");
    }
    grid.push_back(static_cast<std::size_t>(v));
  }
  nlohmann::json rows = nlohmann::json::array();
  std::ostringstream h;
  h << "n,reps,ks_distance,mean,variance\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    SimulationConfig cfg;
    cfg.n = grid[i];
    cfg.reps = a.reps;
    // One stream per grid entry so entries are independent.
    cfg.rng = RngSpec{a.seed, i, 0};
    cfg.statistic_kind = StatisticKind::scaled_robust_t;
    cfg.threads = common.threads;
    const auto dist = simulate_statistic(cfg);
    const double ks = ks_distance_to_std_normal(dist);
    const auto m = moments(dist.sorted_values);
    rows.push_back({{"n", grid[i]}, {"reps", a.reps}, {"ks_distance", ks}, {"mean", m.mean},
                    {"variance", m.variance}});
    h << grid[i] << ',' << a.reps << ',' << fmt(ks, 8) << ',' << fmt(m.mean, 8) << ','
      << fmt(m.variance, 8) << '\n';
  }
  nlohmann::json args = {{"grid", grid}, {"reps", a.reps}, {"seed", a.seed}};
  emit(out, common, make_report("verify-normality", args, a.seed, {{"rows", rows}}), h.str());
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct RobustnessArgs {
  std::size_t n = 0;
  double eps = 0.1;
  double shift = 50.0;
  double contam_sigma = 1.0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  double level = 0.05;
};

struct RobustnessOutcome {
  double robust_size;
  double classical_size;
};

/// Empirical two-sided sizes of the asymptotic median/MAD test and the
/// Student test when a fraction eps of N(0, 1) data is replaced by draws from
/// N(shift, contam_sigma^2). Both tests see the same samples.
inline RobustnessOutcome robustness_study(std::size_t n, const ContaminationModel& model,
                                          std::size_t reps, const RngSpec& rng, double level,
                                          unsigned threads) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("level must lie in (0, 1)");
  SimulationConfig cfg;
  cfg.n = n;
  cfg.reps = reps;
  cfg.rng = rng;
  cfg.data_model = model;
  cfg.mu0 = model.clean_mu;
  cfg.threads = threads;

  cfg.statistic_kind = StatisticKind::scaled_robust_t;
  const double robust_critical = std_normal_quantile(1.0 - level / 2.0);
  const double robust = estimate_rejection_rate(cfg, robust_critical, true);

  cfg.statistic_kind = StatisticKind::classical_t;
  const double classical_critical =
      student_t_quantile(1.0 - level / 2.0, static_cast<double>(n - 1));
  const double classical = estimate_rejection_rate(cfg, classical_critical, true);
  return {robust, classical};
}

inline int run_robustness(const RobustnessArgs& a, const Common& common, std::ostream& out) {
  ContaminationModel model;
  model.epsilon = a.eps;
  model.clean_mu = 0.0;
  model.clean_sigma = 1.0;
  model.contam_mu = a.shift;
  model.contam_sigma = a.contam_sigma;
  const auto r = robustness_study(a.n, model, a.reps, RngSpec{a.seed, 0, 0}, a.level,
                                  common.threads);

  nlohmann::json args = {{"n", a.n},         {"eps", a.eps},   {"shift", a.shift},
                         {"contam_sigma", a.contam_sigma}, {"reps", a.reps},
                         {"seed", a.seed},   {"level", a.level}};
  nlohmann::json results = {{"robust_size", r.robust_size},
                            {"classical_size", r.classical_size},
                            {"nominal", a.level}};
  std::ostringstream h;
  h << "Empirical size under contamination: n = " << a.n << ", eps = " << fmt(a.eps)
    << ", shift = " << fmt(a.shift) << " sigma, reps = " << a.reps << '\n';
  h << "  nominal level       " << fmt(a.level) << '\n';
  h << "  median/MAD test     " << fmt(r.robust_size, 6) << '\n';
  h << "  Student t test      " << fmt(r.classical_size, 6) << '\n';
  emit(out, common, make_report("robustness-study", args, a.seed, results), h.str());
  return kExitOk;
}

}  // namespace detail

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Median/MAD robust one-sample t test", "robust-t"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  detail::Common common;
  app.add_flag("--json", common.json, "Emit a JSON report");
  app.add_option("--threads", common.threads, "Simulation worker threads (0 = all cores)")
      ->capture_default_str();
  app.fallthrough();

  detail::TestArgs test;
  auto* test_cmd = app.add_subcommand("test", "One-sample location test on a data file");
  test_cmd->add_option("--data", test.data, "Delimited text file")->required();
  test_cmd->add_option("--column", test.column, "Column header name or 1-based number");
  test_cmd->add_option("--mu0", test.mu0, "Hypothesized location")->required();
  test_cmd->add_option("--alternative", test.alternative)
      ->check(CLI::IsMember({"two-sided", "greater", "less"}))
      ->capture_default_str();
  test_cmd->add_option("--calibration", test.calibration)
      ->check(CLI::IsMember({"asymptotic", "mc"}))
      ->capture_default_str();
  test_cmd->add_option("--table", test.table, "Quantile table for --calibration mc");
  test_cmd->add_option("--level", test.level, "Significance level")->capture_default_str();
  test_cmd->add_flag("--classical", test.classical, "Run the Student t test instead");

  detail::CalibrateArgs cal;
  auto* cal_cmd = app.add_subcommand("calibrate", "Simulate and save pivot quantiles");
  cal_cmd->add_option("--n", cal.n)->required();
  cal_cmd->add_option("--reps", cal.reps)->required();
  cal_cmd->add_option("--seed", cal.seed)->required();
  cal_cmd->add_option("--stream", cal.stream)->capture_default_str();
  cal_cmd->add_option("--probs", cal.probs, "Comma-separated probabilities");
  cal_cmd->add_option("--out", cal.out)->required();

  detail::VerifyPivotArgs vp;
  auto* vp_cmd = app.add_subcommand("verify-pivot", "Check pivot invariance across (mu, sigma)");
  vp_cmd->add_option("--n", vp.n)->required();
  vp_cmd->add_option("--reps", vp.reps)->required();
  vp_cmd->add_option("--seed", vp.seed)->required();
  vp_cmd->add_option("--params", vp.params, "MU,SIGMA (repeatable)")->take_all()
      ->allow_extra_args(false);
  vp_cmd->add_option("--tolerance", vp.tolerance)->capture_default_str();

  detail::VerifyNormalityArgs vn;
  auto* vn_cmd = app.add_subcommand("verify-normality", "KS distance of the scaled statistic to N(0,1)");
  vn_cmd->add_option("--grid", vn.grid, "Comma-separated sample sizes")->capture_default_str();
  vn_cmd->add_option("--reps", vn.reps)->required();
  vn_cmd->add_option("--seed", vn.seed)->required();

  detail::RobustnessArgs rs;
  auto* rs_cmd = app.add_subcommand("robustness-study", "Test sizes under contamination");
  rs_cmd->add_option("--n", rs.n)->required();
  rs_cmd->add_option("--eps", rs.eps)->capture_default_str();
  rs_cmd->add_option("--shift", rs.shift, "Contamination shift in clean-sigma units")
      ->capture_default_str();
  rs_cmd->add_option("--contam-sigma", rs.contam_sigma)->capture_default_str();
  rs_cmd->add_option("--reps", rs.reps)->required();
  rs_cmd->add_option("--seed", rs.seed)->required();
  rs_cmd->add_option("--level", rs.level)->capture_default_str();

  std::vector<const char*> argv;
  argv.push_back("robust-t");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*test_cmd) return detail::run_test(test, common, out);
    if (*cal_cmd) return detail::run_calibrate(cal, common, out);
    if (*vp_cmd) return detail::run_verify_pivot(vp, common, out);
    if (*vn_cmd) return detail::run_verify_normality(vn, common, out);
    if (*rs_cmd) return detail::run_robustness(rs, common, out);
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace robust_t::cli
