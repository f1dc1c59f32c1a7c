#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bfl/config.hpp"
#include "bfl/dirichlet.hpp"
#include "bfl/glauber.hpp"
#include "bfl/io.hpp"
#include "bfl/operators.hpp"
#include "bfl/semigroup.hpp"

namespace bfl {

/// Outcome of one CLI command: the main CSV report, a human-readable
/// summary, and any extra files (vectors, side reports) to be written next
/// to it. Everything is built as strings so identical config + seed gives
/// byte-identical output.
struct CommandResult {
  bool pass = true;
  std::string csv;
  std::string summary;
  std::vector<std::pair<std::string, std::string>> artifacts;
};

inline constexpr int kTransformTrials = 16;
inline constexpr int kFormTrials = 200;
inline constexpr int kContractionTrials = 200;
inline constexpr int kGeneratorTrials = 200;
inline constexpr int kMarkovRangeTrials = 200;
inline constexpr int kMcQueries = 50;
/// Fraction of Monte Carlo queries allowed outside the 3-sigma band.
inline constexpr double kMcFailBudget = 0.03;

namespace detail {

inline ChaosVector random_box_chaos(ParamsPtr params, RngStream& stream) {
  std::vector<double> c(params->space_size());
  for (auto& v : c) v = stream.uniform(-1.0, 1.0);
  return ChaosVector(std::move(params), std::move(c));
}

inline PointwiseVector random_unit_interval_pointwise(ParamsPtr params,
                                                      RngStream& stream) {
  std::vector<double> v(params->space_size());
  for (auto& value : v) value = stream.uniform01();
  return PointwiseVector(std::move(params), std::move(v));
}

inline double max_abs_diff(const std::vector<double>& a,
                           const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d = std::max(d, std::abs(a[i] - b[i]));
  }
  return d;
}

inline std::string pass_line(std::string_view name, bool pass,
                             const std::string& detail) {
  return std::string(name) + ": " + (pass ? "PASS" : "FAIL") +
         (detail.empty() ? "" : " (" + detail + ")") + "\n";
}

}  // namespace detail

// ---------------------------------------------------------------------------
// car-check
// ---------------------------------------------------------------------------

inline CommandResult run_car_check(const ExperimentConfig& cfg) {
  const auto params = cfg.make_params();
  const double tol = cfg.tolerance("car", 0.0);
  CarOptions options;
  options.seed = cfg.seed;

  CommandResult result;
  CsvBuilder csv("j,k,mode,identity,deviation,tolerance,pass");
  double max_dev = 0.0;
  for (int j = 0; j < params->n(); ++j) {
    for (int k = 0; k < params->n(); ++k) {
      const CarReport report = check_car(*params, j, k, options);
      for (const auto& ident : report.identities) {
        const bool ok = ident.deviation <= tol;
        result.pass = result.pass && ok;
        max_dev = std::max(max_dev, ident.deviation);
        csv.field(j)
            .field(k)
            .field(report.exhaustive ? std::string_view("exhaustive")
                                     : std::string_view("battery"))
            .field(ident.identity)
            .field(ident.deviation)
            .field(tol)
            .field(ok);
        csv.end_row();
      }
    }
  }
  result.csv = csv.str();
  result.summary = detail::pass_line(
      "car-check", result.pass,
      "n=" + std::to_string(params->n()) + ", all site pairs, max deviation " +
          format_double(max_dev));
  return result;
}

// ---------------------------------------------------------------------------
// transform
// ---------------------------------------------------------------------------

inline CommandResult run_transform(const ExperimentConfig& cfg,
                                   const std::optional<VectorFile>& input) {
  const auto params = cfg.make_params();
  const double tol = cfg.tolerance("roundtrip", 1e-12);

  CommandResult result;
  CsvBuilder csv("trial,n,max_abs_deviation,tolerance,pass");

  if (input) {
    if (input->n != params->n()) {
      throw std::invalid_argument("transform: input file has n=" +
                                  std::to_string(input->n) +
                                  " but config has n=" + std::to_string(params->n()));
    }
    double dev = 0.0;
    if (input->repr == Repr::chaos) {
      const ChaosVector x(params, input->data);
      const PointwiseVector v = to_pointwise(x);
      result.artifacts.emplace_back("transformed.csv", vector_file_string(v));
      dev = detail::max_abs_diff(to_chaos(v).coeffs, x.coeffs);
    } else {
      const PointwiseVector v(params, input->data);
      const ChaosVector x = to_chaos(v);
      result.artifacts.emplace_back("transformed.csv", vector_file_string(x));
      dev = detail::max_abs_diff(to_pointwise(x).values, v.values);
    }
    const bool ok = dev <= tol;
    result.pass = ok;
    csv.field(0).field(params->n()).field(dev).field(tol).field(ok);
    csv.end_row();
    result.csv = csv.str();
    result.summary = detail::pass_line(
        "transform", result.pass, "converted input, round-trip deviation " +
                                      format_double(dev));
    return result;
  }

  double max_dev = 0.0;
  for (int trial = 0; trial < kTransformTrials; ++trial) {
    RngStream stream(cfg.seed, "transform-battery", std::uint64_t(trial));
    const ChaosVector x = detail::random_box_chaos(params, stream);
    const double dev = detail::max_abs_diff(to_chaos(to_pointwise(x)).coeffs, x.coeffs);
    const bool ok = dev <= tol;
    result.pass = result.pass && ok;
    max_dev = std::max(max_dev, dev);
    csv.field(trial).field(params->n()).field(dev).field(tol).field(ok);
    csv.end_row();
  }
  result.csv = csv.str();
  result.summary = detail::pass_line(
      "transform", result.pass,
      std::to_string(kTransformTrials) + " random round trips at n=" +
          std::to_string(params->n()) + ", max deviation " + format_double(max_dev));
  return result;
}

// ---------------------------------------------------------------------------
// form-eval
// ---------------------------------------------------------------------------

inline CommandResult run_form_eval(const ExperimentConfig& cfg) {
  const auto params = cfg.make_params();
  const WeightFunction w = cfg.make_weight();
  const double tol_two_path = cfg.tolerance("form_two_path", 1e-12);
  const double tol_decomp = cfg.tolerance("form_eq36", 1e-12);

  CommandResult result;
  CsvBuilder csv("trial,check,lhs,rhs,deviation,tolerance,pass");
  double worst_two_path = 0.0, worst_decomp = 0.0;
  for (int trial = 0; trial < kFormTrials; ++trial) {
    RngStream stream(cfg.seed, "form-trial", std::uint64_t(trial));
    const ChaosVector x = bfl::detail::random_unit_chaos(params, stream);
    const ChaosVector y = bfl::detail::random_unit_chaos(params, stream);

    const double closed = energy_form(x, y, w);
    const double definitional = energy_form_definitional(x, y, w);
    const double rel = std::abs(closed - definitional) /
                       std::max({1.0, std::abs(closed), std::abs(definitional)});
    const bool two_ok = rel <= tol_two_path;
    worst_two_path = std::max(worst_two_path, rel);
    csv.field(trial)
        .field("two_path")
        .field(closed)
        .field(definitional)
        .field(rel)
        .field(tol_two_path)
        .field(two_ok);
    csv.end_row();

    const double graph = energy_norm_squared(x, w);
    const double assembled = energy_form(x, x, w) + inner_product(x, x);
    const double gap = std::abs(graph - assembled);
    const bool decomp_ok = gap <= tol_decomp;
    worst_decomp = std::max(worst_decomp, gap);
    csv.field(trial)
        .field("norm_decomposition")
        .field(graph)
        .field(assembled)
        .field(gap)
        .field(tol_decomp)
        .field(decomp_ok);
    csv.end_row();

    result.pass = result.pass && two_ok && decomp_ok;
  }
  result.csv = csv.str();
  result.summary = detail::pass_line(
      "form-eval", result.pass,
      std::to_string(kFormTrials) + " trials, worst two-path " +
          format_double(worst_two_path) + ", worst decomposition " +
          format_double(worst_decomp));
  return result;
}

// ---------------------------------------------------------------------------
// contraction-check
// ---------------------------------------------------------------------------

inline CommandResult run_contraction_check(const ExperimentConfig& cfg) {
  const auto params = cfg.make_params();
  const WeightFunction w = cfg.make_weight();
  const auto catalog = contraction_catalog();

  CommandResult result;
  CsvBuilder csv("trial,contraction,energy_before,energy_after,max_site_excess,slack,pass");
  int failures = 0;
  for (int trial = 0; trial < kContractionTrials; ++trial) {
    RngStream stream(cfg.seed, "contraction-trial", std::uint64_t(trial));
    const ChaosVector x = detail::random_box_chaos(params, stream);
    const ContractionFunction& c = catalog[std::size_t(trial) % catalog.size()];
    const ContractionCheck check = verify_contraction_property(x, c, w);
    failures += check.pass ? 0 : 1;
    result.pass = result.pass && check.pass;
    csv.field(trial)
        .field(c.name())
        .field(check.energy_before)
        .field(check.energy_after)
        .field(check.max_site_excess)
        .field(kInequalitySlack)
        .field(check.pass);
    csv.end_row();
  }
  result.csv = csv.str();
  result.summary = detail::pass_line(
      "contraction-check", result.pass,
      std::to_string(kContractionTrials) + " trials over " +
          std::to_string(catalog.size()) + " catalog contractions, " +
          std::to_string(failures) + " failures");
  return result;
}

// ---------------------------------------------------------------------------
// semigroup-evolve
// ---------------------------------------------------------------------------

inline CommandResult run_semigroup_evolve(const ExperimentConfig& cfg,
                                          const std::optional<VectorFile>& input) {
  const auto params = cfg.make_params();
  const WeightFunction w = cfg.make_weight();
  const double norm_slack = cfg.tolerance("norm_contraction", 1e-14);

  CommandResult result;
  ChaosVector x = ChaosVector::zero(params);
  if (input) {
    if (input->n != params->n()) {
      throw std::invalid_argument("semigroup-evolve: input file has n=" +
                                  std::to_string(input->n) +
                                  " but config has n=" + std::to_string(params->n()));
    }
    x = input->repr == Repr::chaos
            ? ChaosVector(params, input->data)
            : to_chaos(PointwiseVector(params, input->data));
  } else {
    RngStream stream(cfg.seed, "evolve-input");
    x = to_chaos(detail::random_unit_interval_pointwise(params, stream));
    result.artifacts.emplace_back("input_vector.csv", vector_file_string(x));
  }

  CsvBuilder csv("t,norm,min_pointwise,max_pointwise,contraction_excess,tolerance,pass");
  const double base_norm = norm(x);
  for (std::size_t i = 0; i < cfg.t_grid.size(); ++i) {
    const double t = cfg.t_grid[i];
    const ChaosVector evolved = evolve(x, SemigroupQuery(t, w));
    const PointwiseVector values = to_pointwise(evolved);
    double lo = values.values[0], hi = values.values[0];
    for (double v : values.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double excess = norm(evolved) - base_norm;
    const bool ok = excess <= norm_slack * std::max(1.0, base_norm);
    result.pass = result.pass && ok;
    csv.field(t).field(norm(evolved)).field(lo).field(hi).field(excess)
        .field(norm_slack).field(ok);
    csv.end_row();
    result.artifacts.emplace_back("evolved_t" + std::to_string(i) + ".csv",
                                  vector_file_string(evolved));
  }
  result.csv = csv.str();
  result.summary = detail::pass_line(
      "semigroup-evolve", result.pass,
      std::to_string(cfg.t_grid.size()) + " times, norm never increases");
  return result;
}

// ---------------------------------------------------------------------------
// generator-check
// ---------------------------------------------------------------------------

inline CommandResult run_generator_check(const ExperimentConfig& cfg) {
  const auto params = cfg.make_params();
  const WeightFunction w = cfg.make_weight();
  const double tol_two_path = cfg.tolerance("generator_two_path", 1e-11);

  CommandResult result;
  CsvBuilder csv("check,index,lhs,rhs,measured,criterion,pass");
  double worst = 0.0;
  for (int trial = 0; trial < kGeneratorTrials; ++trial) {
    RngStream stream(cfg.seed, "generator-trial", std::uint64_t(trial));
    const ChaosVector x = bfl::detail::random_unit_chaos(params, stream);
    const ChaosVector y = bfl::detail::random_unit_chaos(params, stream);
    const GeneratorRelation rel = check_generator_relation(x, y, w);
    const bool ok = rel.deviation <= tol_two_path;
    result.pass = result.pass && ok;
    worst = std::max(worst, rel.deviation);
    csv.field("two_path")
        .field(trial)
        .field(rel.lhs)
        .field(rel.rhs)
        .field(rel.deviation)
        .field("<=" + format_double(tol_two_path))
        .field(ok);
    csv.end_row();
  }

  // Finite-difference consistency: (x - P_t x)/t approaches N_w x at first
  // order, so the residual should shrink by roughly the grid ratio.
  RngStream stream(cfg.seed, "generator-fd");
  const ChaosVector x = bfl::detail::random_unit_chaos(params, stream);
  const ChaosVector nx = number_operator(x, w);
  const std::vector<double> grid = {1e-2, 1e-3, 1e-4};
  std::vector<double> devs;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    const ChaosVector moved = evolve(x, SemigroupQuery(t, w));
    double ss = 0.0;
    for (std::size_t m = 0; m < x.size(); ++m) {
      const double d = (x.coeffs[m] - moved.coeffs[m]) / t - nx.coeffs[m];
      ss += d * d;
    }
    devs.push_back(std::sqrt(ss));
    csv.field("fd_residual")
        .field(int(i))
        .field(t)
        .field(0.0)
        .field(devs.back())
        .field("decreasing")
        .field(true);
    csv.end_row();
  }
  for (std::size_t i = 0; i + 1 < devs.size(); ++i) {
    const double ratio = devs[i + 1] > 0.0 ? devs[i] / devs[i + 1] : 0.0;
    const bool ok = ratio >= 5.0 && ratio <= 20.0;
    result.pass = result.pass && ok;
    csv.field("fd_ratio")
        .field(int(i))
        .field(devs[i])
        .field(devs[i + 1])
        .field(ratio)
        .field("in [5,20]")
        .field(ok);
    csv.end_row();
  }

  result.csv = csv.str();
  result.summary = detail::pass_line(
      "generator-check", result.pass,
      std::to_string(kGeneratorTrials) + " two-path trials, worst deviation " +
          format_double(worst) + "; first-order residual decay verified");
  return result;
}

// ---------------------------------------------------------------------------
// markov-verify
// ---------------------------------------------------------------------------

inline CommandResult run_markov_verify(const ExperimentConfig& cfg) {
  const auto params = cfg.make_params();
  const WeightFunction w = cfg.make_weight();
  const double z_threshold = cfg.tolerance("z_threshold", 3.0);
  const double rev_tol = cfg.tolerance("reversibility", 1e-12);

  CommandResult result;

  // Range preservation battery for [0,1]-valued inputs.
  CsvBuilder range_csv("trial,t,min_value,max_value,slack,pass");
  bool range_pass = true;
  for (int trial = 0; trial < kMarkovRangeTrials; ++trial) {
    RngStream stream(cfg.seed, "markov-range", std::uint64_t(trial));
    const ChaosVector x =
        to_chaos(detail::random_unit_interval_pointwise(params, stream));
    const double t = cfg.t_grid[std::size_t(trial) % cfg.t_grid.size()];
    const MarkovCheck check = check_markov_property(x, SemigroupQuery(t, w));
    range_pass = range_pass && check.pass;
    range_csv.field(trial)
        .field(t)
        .field(check.min_value)
        .field(check.max_value)
        .field(kInequalitySlack)
        .field(check.pass);
    range_csv.end_row();
  }
  result.artifacts.emplace_back("markov_range.csv", range_csv.str());

  // Monte Carlo cross-validation of the spectral evolution against the
  // site-refresh chain.
  const double horizon = cfg.t_grid.back();
  const GlauberConfig gcfg(params, w, horizon, cfg.n_paths, cfg.seed);
  CsvBuilder mc_csv(
      "t,start_point,spectral_value,mc_estimate,std_error,z_score,threshold,pass");
  int mc_failures = 0;
  for (int query = 0; query < kMcQueries; ++query) {
    RngStream stream(cfg.seed, "mv-query", std::uint64_t(query));
    const ChaosVector x =
        to_chaos(detail::random_unit_interval_pointwise(params, stream));
    const SamplePoint start{stream.mask(params->n())};
    const double t = cfg.t_grid[std::size_t(query) % cfg.t_grid.size()];

    const PointwiseVector spectral = to_pointwise(evolve(x, SemigroupQuery(t, w)));
    const double reference = spectral.values[start.bits];
    const McEstimate mc =
        estimate_semigroup(gcfg, x, t, start, std::uint64_t(query) + 1);
    double z = 0.0;
    if (mc.std_error > 0.0) {
      z = (mc.estimate - reference) / mc.std_error;
    } else {
      z = (mc.estimate == reference) ? 0.0
                                     : std::numeric_limits<double>::infinity();
    }
    const bool ok = std::abs(z) <= z_threshold;
    mc_failures += ok ? 0 : 1;
    mc_csv.field(t)
        .field(std::size_t(start.bits))
        .field(reference)
        .field(mc.estimate)
        .field(mc.std_error)
        .field(z)
        .field(z_threshold)
        .field(ok);
    mc_csv.end_row();
  }
  const int allowed = int(kMcFailBudget * kMcQueries);
  const bool mc_pass = mc_failures <= allowed;
  result.csv = mc_csv.str();

  // Structural checks against the explicit rate matrix (dense, small n).
  bool rev_pass = true;
  std::string rev_note;
  if (params->n() <= 10) {
    const ReversibilityReport rev = check_reversibility(gcfg);
    rev_pass = rev.max_detailed_balance_dev <= rev_tol &&
               rev.max_generator_residual <= rev_tol &&
               rev.max_row_sum <= rev_tol * (1.0 + w.total());
    CsvBuilder rev_csv(
        "n,detailed_balance_dev,generator_residual,max_row_sum,spectral_gap,tolerance,pass");
    rev_csv.field(rev.n)
        .field(rev.max_detailed_balance_dev)
        .field(rev.max_generator_residual)
        .field(rev.max_row_sum)
        .field(rev.spectral_gap)
        .field(rev_tol)
        .field(rev_pass);
    rev_csv.end_row();
    result.artifacts.emplace_back("reversibility.csv", rev_csv.str());
    rev_note = ", spectral gap " + format_double(rev.spectral_gap);
  } else {
    rev_note = ", rate-matrix checks skipped (n > 10)";
  }

  result.pass = range_pass && mc_pass && rev_pass;
  result.summary =
      detail::pass_line(
          "markov-verify", result.pass,
          std::to_string(kMarkovRangeTrials) + " range trials, " +
              std::to_string(kMcQueries) + " Monte Carlo queries with " +
              std::to_string(mc_failures) + " outside " +
              format_double(z_threshold) + " sigma (budget " +
              std::to_string(allowed) + ")" + rev_note) +
      "note: the site-refresh chain is the finite-truncation candidate process "
      "for the form; its generator matches the number operator.\n";
  return result;
}

// ---------------------------------------------------------------------------
// dispatch
// ---------------------------------------------------------------------------

inline CommandResult run_command(std::string_view name, const ExperimentConfig& cfg,
                                 const std::optional<VectorFile>& input = {}) {
  if (name == "car-check") return run_car_check(cfg);
  if (name == "transform") return run_transform(cfg, input);
  if (name == "form-eval") return run_form_eval(cfg);
  if (name == "contraction-check") return run_contraction_check(cfg);
  if (name == "semigroup-evolve") return run_semigroup_evolve(cfg, input);
  if (name == "generator-check") return run_generator_check(cfg);
  if (name == "markov-verify") return run_markov_verify(cfg);
  throw std::invalid_argument("unknown command: " + std::string(name));
}

}  // namespace bfl
