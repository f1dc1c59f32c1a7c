#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bfl/chaos.hpp"
#include "bfl/dirichlet.hpp"
#include "bfl/operators.hpp"
#include "bfl/weight.hpp"

namespace bfl {

/// One evaluation of the weighted Ornstein-Uhlenbeck semigroup: a time
/// t >= 0 and the weight function driving the rates.
struct SemigroupQuery {
  double t = 0.0;
  WeightFunction w;

  SemigroupQuery(double time, WeightFunction weight)
      : t(time), w(std::move(weight)) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
      throw std::domain_error("SemigroupQuery: time must be finite and >= 0");
    }
  }
};

/// Diagonal action of the semigroup: the coefficient at subset sigma is
/// damped by exp(-t * subset_weight(sigma)). Constants are fixed points.
inline ChaosVector evolve(const ChaosVector& x, const SemigroupQuery& q) {
  detail::require_same_n(q.w, x, "evolve");
  const auto& table = q.w.counting_table();
  std::vector<double> out(x.size());
  for (std::size_t m = 0; m < out.size(); ++m) {
    out[m] = std::exp(-q.t * table[m]) * x.coeffs[m];
  }
  return ChaosVector(x.params, std::move(out));
}

struct SemigroupLawReport {
  double composition_deviation = 0.0;  // ||P_s P_t x - P_{s+t} x||
  double contraction_excess = 0.0;     // max over checked times of ||P_t x|| - ||x||
  std::vector<std::pair<double, double>> continuity;  // (t, ||P_t x - x||), t decreasing
  bool continuity_decreasing = false;
};

/// Exercises the semigroup laws on one vector: composition, norm
/// contraction, and strong continuity as a decreasing-grid trend.
inline SemigroupLawReport check_semigroup_laws(const WeightFunction& w, double s,
                                               double t, const ChaosVector& x) {
  if (!(s >= 0.0) || !(t >= 0.0)) {
    throw std::domain_error("check_semigroup_laws: times must be >= 0");
  }
  SemigroupLawReport report;

  const ChaosVector once = evolve(x, SemigroupQuery(t, w));
  const ChaosVector twice = evolve(once, SemigroupQuery(s, w));
  const ChaosVector direct = evolve(x, SemigroupQuery(s + t, w));
  double ss = 0.0;
  for (std::size_t m = 0; m < x.size(); ++m) {
    const double d = twice.coeffs[m] - direct.coeffs[m];
    ss += d * d;
  }
  report.composition_deviation = std::sqrt(ss);

  const double base = norm(x);
  for (double time : {s, t, s + t}) {
    report.contraction_excess = std::max(
        report.contraction_excess, norm(evolve(x, SemigroupQuery(time, w))) - base);
  }

  report.continuity_decreasing = true;
  double previous = std::numeric_limits<double>::infinity();
  for (double time : {1.0, 0.1, 0.01, 0.001}) {
    const ChaosVector moved = evolve(x, SemigroupQuery(time, w));
    double dd = 0.0;
    for (std::size_t m = 0; m < x.size(); ++m) {
      const double d = moved.coeffs[m] - x.coeffs[m];
      dd += d * d;
    }
    const double dev = std::sqrt(dd);
    report.continuity.emplace_back(time, dev);
    if (dev > previous) report.continuity_decreasing = false;
    previous = dev;
  }
  return report;
}

struct GeneratorRelation {
  double lhs = 0.0;  // energy form value
  double rhs = 0.0;  // <x, N_w y>
  double deviation = 0.0;
};

/// The form and the number operator compute the same pairing; both routes
/// are evaluated and the absolute gap reported.
inline GeneratorRelation check_generator_relation(const ChaosVector& x,
                                                  const ChaosVector& y,
                                                  const WeightFunction& w) {
  GeneratorRelation rel;
  rel.lhs = energy_form(x, y, w);
  rel.rhs = inner_product(x, number_operator(y, w));
  rel.deviation = std::abs(rel.lhs - rel.rhs);
  return rel;
}

struct MarkovCheck {
  double min_value = 0.0;
  double max_value = 0.0;
  bool pass = false;
};

/// Slack for range preconditions: passing a functional through the basis
/// transforms perturbs its pointwise values by a few ulp, so exact range
/// membership cannot be demanded of round-tripped inputs.
inline constexpr double kRangeNoise = 1e-12;

namespace detail {

inline void require_range_01(const PointwiseVector& v, const char* what) {
  for (std::size_t m = 0; m < v.size(); ++m) {
    if (!(v.values[m] >= -kRangeNoise && v.values[m] <= 1.0 + kRangeNoise)) {
      throw std::invalid_argument(
          std::string(what) + ": input is not [0,1]-valued; value " +
          std::to_string(v.values[m]) + " at sample point bits=" +
          std::to_string(m));
    }
  }
}

}  // namespace detail

/// Markov property check: a [0,1]-valued functional must stay [0,1]-valued
/// (up to slack) under the semigroup. The precondition is enforced on the
/// pointwise representation and violations name the offending sample point.
inline MarkovCheck check_markov_property(const ChaosVector& x,
                                         const SemigroupQuery& q) {
  detail::require_range_01(to_pointwise(x), "check_markov_property");
  const PointwiseVector evolved = to_pointwise(evolve(x, q));
  MarkovCheck result;
  result.min_value = evolved.values[0];
  result.max_value = evolved.values[0];
  for (double v : evolved.values) {
    result.min_value = std::min(result.min_value, v);
    result.max_value = std::max(result.max_value, v);
  }
  result.pass = result.min_value >= -kInequalitySlack &&
                result.max_value <= 1.0 + kInequalitySlack;
  return result;
}

struct PositivityCheck {
  double min_value = 0.0;
  bool pass = false;
};

/// Nonnegative functionals stay nonnegative under the semigroup.
inline PositivityCheck check_positivity_preservation(const ChaosVector& x,
                                                     const SemigroupQuery& q) {
  const PointwiseVector before = to_pointwise(x);
  for (std::size_t m = 0; m < before.size(); ++m) {
    if (!(before.values[m] >= 0.0)) {
      throw std::invalid_argument(
          "check_positivity_preservation: input is not nonnegative; value " +
          std::to_string(before.values[m]) + " at sample point bits=" +
          std::to_string(m));
    }
  }
  const PointwiseVector evolved = to_pointwise(evolve(x, q));
  PositivityCheck result;
  result.min_value = evolved.values[0];
  for (double v : evolved.values) result.min_value = std::min(result.min_value, v);
  result.pass = result.min_value >= -kInequalitySlack;
  return result;
}

}  // namespace bfl
