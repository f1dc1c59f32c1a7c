#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bfl/rng.hpp"

namespace bfl {

/// Dense storage of length 2^n caps the usable truncation.
inline constexpr int kMaxSites = 24;

/// One point of the truncated sample space {-1,+1}^n, packed as a bitmask:
/// bit k set means coordinate k equals +1.
struct SamplePoint {
  std::uint32_t bits = 0;

  bool is_plus(int k) const { return (bits >> k) & 1u; }
  int sign(int k) const { return is_plus(k) ? +1 : -1; }

  friend bool operator==(SamplePoint a, SamplePoint b) {
    return a.bits == b.bits;
  }
};

/// Per-site parameters of the truncated Bernoulli product space.
///
/// Holds the success probabilities p_k together with the derived
/// q_k = 1 - p_k and theta_k = sqrt(q_k / p_k). The derived values are
/// computed once here and every downstream formula consumes the cached
/// copies, which keeps repeated runs bit-identical.
class SiteParams {
 public:
  explicit SiteParams(std::vector<double> success_probs) : p_(std::move(success_probs)) {
    const std::size_t n = p_.size();
    if (n < 1 || n > std::size_t(kMaxSites)) {
      throw std::invalid_argument("SiteParams: site count must lie in [1, " +
                                  std::to_string(kMaxSites) + "], got " +
                                  std::to_string(n));
    }
    q_.resize(n);
    theta_.resize(n);
    inv_theta_.resize(n);
    sqrt_pq_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double p = p_[k];
      if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("SiteParams: p[" + std::to_string(k) +
                                    "] must lie in the open interval (0,1)");
      }
      q_[k] = 1.0 - p;
      theta_[k] = std::sqrt(q_[k] / p);
      inv_theta_[k] = 1.0 / theta_[k];
      sqrt_pq_[k] = std::sqrt(p * q_[k]);
    }
  }

  static SiteParams constant(int n, double p) {
    if (n < 1) throw std::invalid_argument("SiteParams: site count must be >= 1");
    return SiteParams(std::vector<double>(std::size_t(n), p));
  }

  int n() const { return int(p_.size()); }
  std::size_t space_size() const { return std::size_t(1) << n(); }

  double p(int k) const { return p_[std::size_t(k)]; }
  double q(int k) const { return q_[std::size_t(k)]; }
  double theta(int k) const { return theta_[std::size_t(k)]; }
  double inv_theta(int k) const { return inv_theta_[std::size_t(k)]; }
  double sqrt_pq(int k) const { return sqrt_pq_[std::size_t(k)]; }

  const std::vector<double>& probs() const { return p_; }

  void require_site(int k) const {
    if (k < 0 || k >= n()) {
      throw std::out_of_range("site index " + std::to_string(k) +
                              " out of range for n=" + std::to_string(n()));
    }
  }

  friend bool operator==(const SiteParams& a, const SiteParams& b) {
    return a.p_ == b.p_;
  }

 private:
  std::vector<double> p_, q_, theta_, inv_theta_, sqrt_pq_;
};

using ParamsPtr = std::shared_ptr<const SiteParams>;

inline ParamsPtr make_params(std::vector<double> success_probs) {
  return std::make_shared<const SiteParams>(std::move(success_probs));
}

inline ParamsPtr make_constant_params(int n, double p) {
  return std::make_shared<const SiteParams>(SiteParams::constant(n, p));
}

/// Value of the normalized site variable at a sample point:
/// theta_k when coordinate k is +1, and -1/theta_k when it is -1.
/// This makes each site variable mean-zero with unit variance.
inline double z_value(const SiteParams& params, int k, SamplePoint omega) {
  params.require_site(k);
  return omega.is_plus(k) ? params.theta(k) : -params.inv_theta(k);
}

/// Probability of a single sample point under the product measure.
inline double point_mass(const SiteParams& params, SamplePoint omega) {
  double mass = 1.0;
  for (int k = 0; k < params.n(); ++k) {
    mass *= omega.is_plus(k) ? params.p(k) : params.q(k);
  }
  return mass;
}

/// Independent draw of all coordinates; coordinate k is +1 with
/// probability p_k. Deterministic for a fixed stream state.
inline SamplePoint sample(const SiteParams& params, RngStream& stream) {
  std::uint32_t bits = 0;
  for (int k = 0; k < params.n(); ++k) {
    if (stream.bernoulli(params.p(k))) bits |= std::uint32_t(1) << k;
  }
  return SamplePoint{bits};
}

}  // namespace bfl
