#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bfl/measure.hpp"

namespace bfl {

namespace detail {

/// Pairwise (blocked) summation. Deterministic grouping; error growth
/// O(log N) instead of O(N), which matters for the tightest equality
/// tolerances at large n.
template <class Term>
double pairwise_sum(std::size_t lo, std::size_t hi, const Term& term) {
  if (hi - lo <= 256) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += term(i);
    return s;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(lo, mid, term) + pairwise_sum(mid, hi, term);
}

inline void check_entries_finite(const std::vector<double>& a,
                                 const char* what) {
  for (std::size_t m = 0; m < a.size(); ++m) {
    if (!std::isfinite(a[m])) {
      throw std::invalid_argument(std::string(what) + ": entry " +
                                  std::to_string(m) + " is not finite");
    }
  }
}

inline void check_length(const std::vector<double>& a, const SiteParams& sp,
                         const char* what) {
  if (a.size() != sp.space_size()) {
    throw std::invalid_argument(std::string(what) + ": expected length 2^n = " +
                                std::to_string(sp.space_size()) + ", got " +
                                std::to_string(a.size()));
  }
}

}  // namespace detail

/// A functional in the orthonormal chaos basis. coeffs[m] is the
/// coefficient of the basis element indexed by the subset whose members
/// are the set bits of m (bit j set means site j belongs to the subset).
struct ChaosVector {
  ParamsPtr params;
  std::vector<double> coeffs;

  ChaosVector(ParamsPtr sp, std::vector<double> c)
      : params(std::move(sp)), coeffs(std::move(c)) {
    detail::check_length(coeffs, *params, "ChaosVector");
    detail::check_entries_finite(coeffs, "ChaosVector");
  }

  static ChaosVector zero(ParamsPtr sp) {
    std::vector<double> c(sp->space_size(), 0.0);
    return ChaosVector(std::move(sp), std::move(c));
  }

  /// One-hot basis element for the subset mask `sigma`.
  static ChaosVector basis(ParamsPtr sp, std::uint32_t sigma) {
    if (sigma >= sp->space_size()) {
      throw std::out_of_range("ChaosVector::basis: mask out of range");
    }
    std::vector<double> c(sp->space_size(), 0.0);
    c[sigma] = 1.0;
    return ChaosVector(std::move(sp), std::move(c));
  }

  int n() const { return params->n(); }
  std::size_t size() const { return coeffs.size(); }
};

/// The same functional tabulated at every sample point. values[m] is the
/// value at the SamplePoint with bits m.
struct PointwiseVector {
  ParamsPtr params;
  std::vector<double> values;

  PointwiseVector(ParamsPtr sp, std::vector<double> v)
      : params(std::move(sp)), values(std::move(v)) {
    detail::check_length(values, *params, "PointwiseVector");
    detail::check_entries_finite(values, "PointwiseVector");
  }

  static PointwiseVector constant(ParamsPtr sp, double value) {
    std::vector<double> v(sp->space_size(), value);
    return PointwiseVector(std::move(sp), std::move(v));
  }

  int n() const { return params->n(); }
  std::size_t size() const { return values.size(); }
};

namespace detail {

inline void require_same_params(const SiteParams& a, const SiteParams& b,
                                const char* what) {
  if (!(a == b)) {
    throw std::invalid_argument(std::string(what) +
                                ": operands built over different site parameters");
  }
}

/// Coefficients -> values, one in-place butterfly pass per coordinate.
/// Pass k maps the pair (a, b) = (entry without bit k, with bit k) to
/// (a - b/theta_k, a + b*theta_k), the values on the -1 / +1 side.
inline void to_pointwise_inplace(std::vector<double>& a, const SiteParams& sp) {
  const std::size_t size = a.size();
  for (int k = 0; k < sp.n(); ++k) {
    const std::size_t bit = std::size_t(1) << k;
    const double th = sp.theta(k);
    const double ith = sp.inv_theta(k);
    for (std::size_t base = 0; base < size; base += 2 * bit) {
      for (std::size_t m = base; m < base + bit; ++m) {
        const double lo = a[m];
        const double hi = a[m + bit];
        a[m + bit] = lo + hi * th;
        a[m] = lo - hi * ith;
      }
    }
  }
}

/// Values -> coefficients, the exact inverse pass ordering. Pass k maps
/// (v_minus, v_plus) to (p*v_plus + q*v_minus, sqrt(pq)*(v_plus - v_minus)).
inline void to_chaos_inplace(std::vector<double>& a, const SiteParams& sp) {
  const std::size_t size = a.size();
  for (int k = 0; k < sp.n(); ++k) {
    const std::size_t bit = std::size_t(1) << k;
    const double p = sp.p(k);
    const double q = sp.q(k);
    const double spq = sp.sqrt_pq(k);
    for (std::size_t base = 0; base < size; base += 2 * bit) {
      for (std::size_t m = base; m < base + bit; ++m) {
        const double vm = a[m];
        const double vp = a[m + bit];
        a[m] = p * vp + q * vm;
        a[m + bit] = spq * (vp - vm);
      }
    }
  }
}

}  // namespace detail

/// Inner product in the chaos basis (the basis is orthonormal, so this is
/// also the probability-weighted inner product of the functionals).
inline double inner_product(const ChaosVector& x, const ChaosVector& y) {
  detail::require_same_params(*x.params, *y.params, "inner_product");
  const auto& a = x.coeffs;
  const auto& b = y.coeffs;
  return detail::pairwise_sum(0, a.size(),
                              [&](std::size_t i) { return a[i] * b[i]; });
}

inline double norm(const ChaosVector& x) {
  return std::sqrt(inner_product(x, x));
}

inline PointwiseVector to_pointwise(const ChaosVector& x) {
  std::vector<double> a = x.coeffs;
  detail::to_pointwise_inplace(a, *x.params);
  return PointwiseVector(x.params, std::move(a));
}

inline ChaosVector to_chaos(const PointwiseVector& v) {
  std::vector<double> a = v.values;
  detail::to_chaos_inplace(a, *v.params);
  return ChaosVector(v.params, std::move(a));
}

/// Force coordinate k of a sample point to +1 / -1, leaving the rest alone.
inline SamplePoint flip_plus(const SiteParams& params, SamplePoint omega, int k) {
  params.require_site(k);
  return SamplePoint{omega.bits | (std::uint32_t(1) << k)};
}

inline SamplePoint flip_minus(const SiteParams& params, SamplePoint omega, int k) {
  params.require_site(k);
  return SamplePoint{omega.bits & ~(std::uint32_t(1) << k)};
}

/// The annihilation operator seen on the sample side:
/// omega |-> sqrt(p_k q_k) * [v(omega with k forced to +1) - v(omega with k
/// forced to -1)]. The output is constant along coordinate k.
inline PointwiseVector difference_operator(const PointwiseVector& v, int k) {
  v.params->require_site(k);
  const std::size_t bit = std::size_t(1) << k;
  const double spq = v.params->sqrt_pq(k);
  std::vector<double> out(v.size());
  for (std::size_t m = 0; m < out.size(); ++m) {
    out[m] = spq * (v.values[m | bit] - v.values[m & ~bit]);
  }
  return PointwiseVector(v.params, std::move(out));
}

}  // namespace bfl
