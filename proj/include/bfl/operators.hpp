#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "bfl/chaos.hpp"
#include "bfl/rng.hpp"
#include "bfl/weight.hpp"

namespace bfl {

/// Image of a single basis element under an operator that maps basis
/// elements to (at most) one basis element. coef is 0 or 1 for every
/// operator in this module.
struct BasisImage {
  std::uint32_t mask = 0;
  double coef = 0.0;
};

/// Basis action of the annihilation operator at site k: the subset loses k
/// if it contains it, otherwise the image is zero.
inline BasisImage annihilate_basis(std::uint32_t sigma, int k) {
  const std::uint32_t bit = std::uint32_t(1) << k;
  if (sigma & bit) return {sigma & ~bit, 1.0};
  return {0, 0.0};
}

/// Basis action of the creation operator at site k (the adjoint): the
/// subset gains k if it lacks it, otherwise the image is zero.
inline BasisImage create_basis(std::uint32_t sigma, int k) {
  const std::uint32_t bit = std::uint32_t(1) << k;
  if (sigma & bit) return {0, 0.0};
  return {sigma | bit, 1.0};
}

/// Annihilation operator on a full coefficient vector:
/// out[sigma] = in[sigma ∪ {k}] when k ∉ sigma, else 0.
inline ChaosVector annihilate(const ChaosVector& x, int k) {
  x.params->require_site(k);
  const std::size_t bit = std::size_t(1) << k;
  const std::size_t size = x.size();
  std::vector<double> out(size);
  for (std::size_t base = 0; base < size; base += 2 * bit) {
    for (std::size_t m = base; m < base + bit; ++m) {
      out[m] = x.coeffs[m + bit];
      out[m + bit] = 0.0;
    }
  }
  return ChaosVector(x.params, std::move(out));
}

/// Creation operator on a full coefficient vector:
/// out[sigma] = in[sigma \ {k}] when k ∈ sigma, else 0.
inline ChaosVector create(const ChaosVector& x, int k) {
  x.params->require_site(k);
  const std::size_t bit = std::size_t(1) << k;
  const std::size_t size = x.size();
  std::vector<double> out(size);
  for (std::size_t base = 0; base < size; base += 2 * bit) {
    for (std::size_t m = base; m < base + bit; ++m) {
      out[m + bit] = x.coeffs[m];
      out[m] = 0.0;
    }
  }
  return ChaosVector(x.params, std::move(out));
}

/// Diagonal number operator: coefficient at subset sigma is scaled by the
/// subset weight of sigma.
inline ChaosVector number_operator(const ChaosVector& x, const WeightFunction& w) {
  if (w.n() != x.n()) {
    throw std::invalid_argument("number_operator: weight has n=" +
                                std::to_string(w.n()) + ", vector has n=" +
                                std::to_string(x.n()));
  }
  const auto& table = w.counting_table();
  std::vector<double> out(x.size());
  for (std::size_t m = 0; m < out.size(); ++m) out[m] = table[m] * x.coeffs[m];
  return ChaosVector(x.params, std::move(out));
}

/// The n-tuple of annihilation images (the discrete gradient).
inline std::vector<ChaosVector> gradient(const ChaosVector& x) {
  std::vector<ChaosVector> g;
  g.reserve(std::size_t(x.n()));
  for (int k = 0; k < x.n(); ++k) g.push_back(annihilate(x, k));
  return g;
}

// ---------------------------------------------------------------------------
// CAR verification
// ---------------------------------------------------------------------------

struct CarIdentityResult {
  std::string identity;
  double deviation = 0.0;
};

struct CarReport {
  int j = 0;
  int k = 0;
  bool exhaustive = true;
  std::vector<CarIdentityResult> identities;

  double max_deviation() const {
    double d = 0.0;
    for (const auto& r : identities) d = std::max(d, r.deviation);
    return d;
  }
};

struct CarOptions {
  int exhaustive_max_n = 12;   // above this, switch to the random battery
  int battery_vectors = 64;
  std::uint64_t seed = 0x5EEDBA5Eull;
};

namespace detail {

// A composite word in the two generators, evaluated on a basis element.
// 'a' = annihilate, 'c' = create; applied right-to-left like operator
// composition.
inline BasisImage apply_word(std::uint32_t sigma, const char* ops,
                             const int* sites, int len) {
  BasisImage img{sigma, 1.0};
  for (int i = len - 1; i >= 0; --i) {
    if (img.coef == 0.0) return {0, 0.0};
    img = (ops[i] == 'a') ? annihilate_basis(img.mask, sites[i])
                          : create_basis(img.mask, sites[i]);
  }
  return img;
}

// Max-abs deviation between two sums of at most two basis images each.
inline double image_sum_deviation(std::array<BasisImage, 2> lhs, int nl,
                                  std::array<BasisImage, 2> rhs, int nr) {
  double dev = 0.0;
  auto coef_at = [](const std::array<BasisImage, 2>& terms, int nt,
                    std::uint32_t mask) {
    double c = 0.0;
    for (int i = 0; i < nt; ++i) {
      if (terms[i].coef != 0.0 && terms[i].mask == mask) c += terms[i].coef;
    }
    return c;
  };
  for (int i = 0; i < nl; ++i) {
    if (lhs[i].coef == 0.0) continue;
    dev = std::max(dev, std::abs(coef_at(lhs, nl, lhs[i].mask) -
                                 coef_at(rhs, nr, lhs[i].mask)));
  }
  for (int i = 0; i < nr; ++i) {
    if (rhs[i].coef == 0.0) continue;
    dev = std::max(dev, std::abs(coef_at(lhs, nl, rhs[i].mask) -
                                 coef_at(rhs, nr, rhs[i].mask)));
  }
  return dev;
}

inline ChaosVector random_unit_chaos(ParamsPtr params, RngStream& stream) {
  std::vector<double> c(params->space_size());
  for (auto& v : c) v = stream.uniform(-1.0, 1.0);
  double ss = 0.0;
  for (double v : c) ss += v * v;
  const double inv = ss > 0.0 ? 1.0 / std::sqrt(ss) : 1.0;
  for (auto& v : c) v *= inv;
  return ChaosVector(std::move(params), std::move(c));
}

}  // namespace detail

/// Checks the equal-time anti-commutation identities for the pair (j, k):
/// cross-site commutations when j != k, and at site k the two nilpotency
/// identities plus the anti-commutator resolving the identity operator.
///
/// For n within options.exhaustive_max_n the check runs over every basis
/// element through the basis-level index maps, so deviations are exact
/// (no floating-point arithmetic occurs). Above that a battery of random
/// dense vectors is pushed through the full-vector operators instead.
inline CarReport check_car(const SiteParams& params, int j, int k,
                           const CarOptions& options = {}) {
  params.require_site(j);
  params.require_site(k);
  CarReport report;
  report.j = j;
  report.k = k;
  report.exhaustive = params.n() <= options.exhaustive_max_n;

  struct Word {
    const char* ops;
    std::array<int, 2> sites;
  };
  struct Identity {
    std::string name;
    Word lhs, rhs;      // rhs ignored when rhs_is described by flags below
    bool rhs_zero = false;
    bool anticommutator = false;  // lhs pair sums to the identity
    Word lhs2{};                  // second term of the anti-commutator
  };

  std::vector<Identity> identities;
  if (j != k) {
    identities.push_back({"annihilate_commute", {"aa", {j, k}}, {"aa", {k, j}}});
    identities.push_back({"create_commute", {"cc", {j, k}}, {"cc", {k, j}}});
    identities.push_back({"mixed_commute", {"ca", {j, k}}, {"ac", {k, j}}});
  }
  identities.push_back({"annihilate_nilpotent", {"aa", {k, k}}, {}, true});
  identities.push_back({"create_nilpotent", {"cc", {k, k}}, {}, true});
  identities.push_back(
      {"anticommutator", {"ac", {k, k}}, {}, false, true, {"ca", {k, k}}});

  if (report.exhaustive) {
    const std::uint32_t size = std::uint32_t(params.space_size());
    for (const auto& ident : identities) {
      double dev = 0.0;
      for (std::uint32_t sigma = 0; sigma < size; ++sigma) {
        std::array<BasisImage, 2> lhs{};
        std::array<BasisImage, 2> rhs{};
        int nl = 1, nr = 0;
        lhs[0] = detail::apply_word(sigma, ident.lhs.ops,
                                    ident.lhs.sites.data(), 2);
        if (ident.anticommutator) {
          lhs[1] = detail::apply_word(sigma, ident.lhs2.ops,
                                      ident.lhs2.sites.data(), 2);
          nl = 2;
          rhs[0] = {sigma, 1.0};
          nr = 1;
        } else if (!ident.rhs_zero) {
          rhs[0] = detail::apply_word(sigma, ident.rhs.ops,
                                      ident.rhs.sites.data(), 2);
          nr = 1;
        }
        dev = std::max(dev, detail::image_sum_deviation(lhs, nl, rhs, nr));
      }
      report.identities.push_back({ident.name, dev});
    }
    return report;
  }

  // Random battery on dense vectors.
  auto params_ptr = std::make_shared<const SiteParams>(params);
  auto apply_dense = [&](const ChaosVector& x, const char* ops,
                         const std::array<int, 2>& sites) {
    ChaosVector out = (ops[1] == 'a') ? annihilate(x, sites[1]) : create(x, sites[1]);
    return (ops[0] == 'a') ? annihilate(out, sites[0]) : create(out, sites[0]);
  };
  std::vector<double> dev(identities.size(), 0.0);
  for (int trial = 0; trial < options.battery_vectors; ++trial) {
    RngStream stream(options.seed, "car-battery", std::uint64_t(trial));
    const ChaosVector x = detail::random_unit_chaos(params_ptr, stream);
    for (std::size_t i = 0; i < identities.size(); ++i) {
      const auto& ident = identities[i];
      const ChaosVector lhs = apply_dense(x, ident.lhs.ops, ident.lhs.sites);
      double d = 0.0;
      if (ident.anticommutator) {
        const ChaosVector lhs2 = apply_dense(x, ident.lhs2.ops, ident.lhs2.sites);
        for (std::size_t m = 0; m < x.size(); ++m) {
          d = std::max(d, std::abs(lhs.coeffs[m] + lhs2.coeffs[m] - x.coeffs[m]));
        }
      } else if (ident.rhs_zero) {
        for (std::size_t m = 0; m < x.size(); ++m) {
          d = std::max(d, std::abs(lhs.coeffs[m]));
        }
      } else {
        const ChaosVector rhs = apply_dense(x, ident.rhs.ops, ident.rhs.sites);
        for (std::size_t m = 0; m < x.size(); ++m) {
          d = std::max(d, std::abs(lhs.coeffs[m] - rhs.coeffs[m]));
        }
      }
      dev[i] = std::max(dev[i], d);
    }
  }
  for (std::size_t i = 0; i < identities.size(); ++i) {
    report.identities.push_back({identities[i].name, dev[i]});
  }
  return report;
}

}  // namespace bfl
