#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bfl/chaos.hpp"
#include "bfl/operators.hpp"
#include "bfl/rng.hpp"
#include "bfl/weight.hpp"

namespace bfl {

/// Additive slack for the inequality checks (contraction property,
/// Markov range); scaled by (1 + magnitude) where a natural magnitude
/// exists. Equality-style identities use tighter per-check tolerances.
inline constexpr double kInequalitySlack = 1e-10;

namespace detail {

inline void require_same_n(const WeightFunction& w, const ChaosVector& x,
                           const char* what) {
  if (w.n() != x.n()) {
    throw std::invalid_argument(std::string(what) + ": weight has n=" +
                                std::to_string(w.n()) + ", vector has n=" +
                                std::to_string(x.n()));
  }
}

}  // namespace detail

/// The energy form in closed form: sum over subsets of the subset weight
/// times the product of coefficients. This is the production path; the
/// per-site definitional sum below is kept as the second route of the
/// two-path identity.
inline double energy_form(const ChaosVector& x, const ChaosVector& y,
                          const WeightFunction& w) {
  detail::require_same_params(*x.params, *y.params, "energy_form");
  detail::require_same_n(w, x, "energy_form");
  const auto& table = w.counting_table();
  const auto& a = x.coeffs;
  const auto& b = y.coeffs;
  return detail::pairwise_sum(
      0, a.size(), [&](std::size_t m) { return table[m] * a[m] * b[m]; });
}

/// The energy form evaluated from its definition: the weighted sum over
/// sites of inner products of annihilation images.
inline double energy_form_definitional(const ChaosVector& x, const ChaosVector& y,
                                       const WeightFunction& w) {
  detail::require_same_params(*x.params, *y.params, "energy_form");
  detail::require_same_n(w, x, "energy_form");
  double s = 0.0;
  for (int k = 0; k < w.n(); ++k) {
    s += w(k) * inner_product(annihilate(x, k), annihilate(y, k));
  }
  return s;
}

/// Squared graph norm of the form: sum of (subset weight + 1) times the
/// squared coefficient. Equals energy_form(x,x,w) + <x,x>.
inline double energy_norm_squared(const ChaosVector& x, const WeightFunction& w) {
  detail::require_same_n(w, x, "energy_norm_squared");
  const auto& table = w.counting_table();
  const auto& a = x.coeffs;
  return detail::pairwise_sum(0, a.size(), [&](std::size_t m) {
    return (table[m] + 1.0) * a[m] * a[m];
  });
}

/// A normal contraction: fixes 0 and is 1-Lipschitz. Construction verifies
/// C(0) = 0 and spot-checks the Lipschitz bound on a randomized grid; the
/// shipped catalog entries satisfy both exactly by construction.
class ContractionFunction {
 public:
  ContractionFunction(std::string name, std::function<double(double)> map,
                      std::uint64_t check_seed = 0xC047AC7ull)
      : name_(std::move(name)), map_(std::move(map)) {
    if (!map_) {
      throw std::invalid_argument("ContractionFunction '" + name_ +
                                  "': empty callable");
    }
    if (!(std::abs(map_(0.0)) <= 1e-15)) {
      throw std::invalid_argument("ContractionFunction '" + name_ +
                                  "': C(0) must be 0");
    }
    RngStream stream(check_seed, "contraction-grid");
    for (int trial = 0; trial < 512; ++trial) {
      const double s = stream.uniform(-8.0, 8.0);
      const double t = (trial % 8 == 0) ? s + stream.uniform(-1e-3, 1e-3)
                                        : stream.uniform(-8.0, 8.0);
      const double lhs = std::abs(map_(s) - map_(t));
      const double rhs = std::abs(s - t);
      if (lhs > rhs * (1.0 + 1e-12) + 1e-15) {
        throw std::invalid_argument("ContractionFunction '" + name_ +
                                    "': Lipschitz bound fails at s=" +
                                    std::to_string(s) + ", t=" + std::to_string(t));
      }
    }
  }

  double operator()(double t) const { return map_(t); }
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  std::function<double(double)> map_;
};

inline ContractionFunction scaled_identity(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("scaled_identity: alpha must lie in [0,1]");
  }
  return ContractionFunction("scale_" + std::to_string(alpha),
                             [alpha](double t) { return alpha * t; });
}

/// The stock contractions used by the randomized batteries. The unit
/// contraction (clamp to [0,1]) is the one that defines Markovianity; the
/// rest cover the standard shapes.
inline std::vector<ContractionFunction> contraction_catalog() {
  std::vector<ContractionFunction> cat;
  cat.emplace_back("unit_interval",
                   [](double t) { return std::min(std::max(t, 0.0), 1.0); });
  cat.emplace_back("absolute_value", [](double t) { return std::abs(t); });
  cat.emplace_back("clamp_unit",
                   [](double t) { return std::min(std::max(t, -1.0), 1.0); });
  cat.emplace_back("soft_ratio", [](double t) { return t / (1.0 + std::abs(t)); });
  cat.push_back(scaled_identity(0.5));
  cat.emplace_back("identity", [](double t) { return t; });
  cat.emplace_back("zero", [](double) { return 0.0; });
  return cat;
}

/// Pointwise composition with a contraction, expressed back in the chaos
/// basis. Exact at finite truncation: the n-site space is closed under
/// pointwise maps.
inline ChaosVector apply_contraction(const ChaosVector& x,
                                     const ContractionFunction& c) {
  PointwiseVector v = to_pointwise(x);
  for (auto& value : v.values) value = c(value);
  return to_chaos(v);
}

struct ContractionCheck {
  double energy_before = 0.0;   // energy of x
  double energy_after = 0.0;    // energy of C∘x
  double max_site_excess = 0.0; // max_k ||∂_k(C∘x)|| - ||∂_k x||
  bool sites_ok = false;
  bool energy_ok = false;
  bool pass = false;
};

/// Verifies that composing with a contraction cannot increase energy:
/// per-site norms first, then the full form.
inline ContractionCheck verify_contraction_property(const ChaosVector& x,
                                                    const ContractionFunction& c,
                                                    const WeightFunction& w) {
  detail::require_same_n(w, x, "verify_contraction_property");
  const ChaosVector cx = apply_contraction(x, c);

  ContractionCheck result;
  result.max_site_excess = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < x.n(); ++k) {
    const double before = norm(annihilate(x, k));
    const double after = norm(annihilate(cx, k));
    result.max_site_excess = std::max(result.max_site_excess, after - before);
  }
  result.sites_ok = result.max_site_excess <= kInequalitySlack;

  result.energy_before = energy_form(x, x, w);
  result.energy_after = energy_form(cx, cx, w);
  result.energy_ok = result.energy_after <=
                     result.energy_before +
                         kInequalitySlack * (1.0 + result.energy_before);
  result.pass = result.sites_ok && result.energy_ok;
  return result;
}

}  // namespace bfl
