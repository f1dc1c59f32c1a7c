#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bfl/chaos.hpp"
#include "bfl/measure.hpp"
#include "bfl/rng.hpp"
#include "bfl/weight.hpp"

namespace bfl {

/// Configuration of the continuous-time site-refresh chain: site k is
/// re-drawn from its marginal at rate w(k), independently of its current
/// sign. The product measure is stationary and reversible for this chain,
/// and its generator is the negative number operator, which is what makes
/// it the exact probabilistic counterpart of the spectral semigroup at
/// finite truncation.
struct GlauberConfig {
  ParamsPtr params;
  WeightFunction w;
  double horizon = 1.0;
  int n_paths = 1;
  std::uint64_t seed = 0;

  GlauberConfig(ParamsPtr sp, WeightFunction weight, double time_horizon,
                int paths, std::uint64_t master_seed)
      : params(std::move(sp)),
        w(std::move(weight)),
        horizon(time_horizon),
        n_paths(paths),
        seed(master_seed) {
    if (w.n() != params->n()) {
      throw std::invalid_argument("GlauberConfig: weight/site count mismatch");
    }
    if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
      throw std::invalid_argument("GlauberConfig: horizon must be finite and >= 0");
    }
    if (n_paths < 1) {
      throw std::invalid_argument("GlauberConfig: n_paths must be >= 1");
    }
  }
};

struct GlauberEvent {
  double time = 0.0;
  int site = 0;
  bool plus = false;  // sign the site was refreshed to
};

/// A realized path: the starting point plus the ordered refresh events up
/// to the horizon. Event times are strictly increasing.
class GlauberTrajectory {
 public:
  GlauberTrajectory(SamplePoint initial, std::vector<GlauberEvent> events,
                    double horizon)
      : initial_(initial), events_(std::move(events)), horizon_(horizon) {}

  SamplePoint initial() const { return initial_; }
  const std::vector<GlauberEvent>& events() const { return events_; }
  double horizon() const { return horizon_; }

  /// State after applying every event with time <= t.
  SamplePoint state_at(double t) const {
    if (!(t >= 0.0) || t > horizon_) {
      throw std::domain_error("GlauberTrajectory::state_at: time " +
                              std::to_string(t) + " outside [0, horizon]");
    }
    SamplePoint state = initial_;
    for (const auto& ev : events_) {
      if (ev.time > t) break;
      const std::uint32_t bit = std::uint32_t(1) << ev.site;
      state.bits = ev.plus ? (state.bits | bit) : (state.bits & ~bit);
    }
    return state;
  }

 private:
  SamplePoint initial_;
  std::vector<GlauberEvent> events_;
  double horizon_;
};

namespace detail {

/// Event-driven core: superposed per-site Poisson clocks realized as one
/// exponential clock of total rate with a categorical site draw. Calls
/// sink(time, site, plus) for every refresh epoch.
template <class Sink>
void run_refresh_events(const SiteParams& params, const WeightFunction& w,
                        double horizon, RngStream& stream, Sink&& sink) {
  const double total_rate = w.total();
  if (total_rate <= 0.0 || horizon <= 0.0) return;
  double t = 0.0;
  for (;;) {
    t += stream.exponential(total_rate);
    if (t > horizon) return;
    const int site = int(stream.categorical(w.values(), total_rate));
    const bool plus = stream.bernoulli(params.p(site));
    sink(t, site, plus);
  }
}

inline SamplePoint refresh_endpoint(const SiteParams& params,
                                    const WeightFunction& w, double horizon,
                                    SamplePoint start, RngStream& stream) {
  SamplePoint state = start;
  run_refresh_events(params, w, horizon, stream,
                     [&](double, int site, bool plus) {
                       const std::uint32_t bit = std::uint32_t(1) << site;
                       state.bits = plus ? (state.bits | bit) : (state.bits & ~bit);
                     });
  return state;
}

}  // namespace detail

/// Simulates one path exactly (no time discretization): refresh epochs of
/// site k form a Poisson process of rate w(k); each epoch re-draws the
/// sign from the site marginal. All epochs are recorded, including those
/// that leave the sign unchanged.
inline GlauberTrajectory simulate_path(const GlauberConfig& cfg, SamplePoint start,
                                       RngStream& stream) {
  std::vector<GlauberEvent> events;
  detail::run_refresh_events(*cfg.params, cfg.w, cfg.horizon, stream,
                             [&](double t, int site, bool plus) {
                               events.push_back({t, site, plus});
                             });
  return GlauberTrajectory(start, std::move(events), cfg.horizon);
}

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Monte Carlo estimate of the evolved functional at one starting point:
/// the mean of x over path endpoints at time t, with its standard error.
/// Path i draws from the sub-stream (seed, "glauber-path", query salt + i),
/// so estimates are reproducible and independent of how paths are batched.
inline McEstimate estimate_semigroup(const GlauberConfig& cfg, const ChaosVector& x,
                                     double t, SamplePoint start,
                                     std::uint64_t query_id = 0) {
  if (!(t >= 0.0) || t > cfg.horizon) {
    throw std::domain_error("estimate_semigroup: t must lie in [0, horizon]");
  }
  if (!(*x.params == *cfg.params)) {
    throw std::invalid_argument("estimate_semigroup: vector/config parameter mismatch");
  }
  const PointwiseVector values = to_pointwise(x);

  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < cfg.n_paths; ++i) {
    RngStream stream(cfg.seed, "glauber-path",
                     (query_id << 32) | std::uint64_t(std::uint32_t(i)));
    const SamplePoint end =
        detail::refresh_endpoint(*cfg.params, cfg.w, t, start, stream);
    const double v = values.values[end.bits];
    sum += v;
    sum_sq += v * v;
  }
  const double n = double(cfg.n_paths);
  McEstimate out;
  out.estimate = sum / n;
  if (cfg.n_paths > 1) {
    const double var = std::max(0.0, (sum_sq - n * out.estimate * out.estimate) /
                                         (n - 1.0));
    out.std_error = std::sqrt(var / n);
  }
  return out;
}

struct ReversibilityReport {
  int n = 0;
  /// max over single-site transitions of the relative detailed-balance gap
  double max_detailed_balance_dev = 0.0;
  /// max over basis elements of the relative residual of Q v = -#w(sigma) v
  double max_generator_residual = 0.0;
  /// max absolute row sum of the rate matrix (conservativity)
  double max_row_sum = 0.0;
  double spectral_gap = 0.0;
};

/// Builds the explicit rate matrix of the refresh chain and verifies, for
/// n <= 10: detailed balance with respect to the product measure, zero row
/// sums, and that the chain's generator acts on each chaos basis element as
/// minus the subset weight.
inline ReversibilityReport check_reversibility(const GlauberConfig& cfg) {
  const SiteParams& sp = *cfg.params;
  const int n = sp.n();
  if (n > 10) {
    throw std::domain_error(
        "check_reversibility: dense rate matrix is limited to n <= 10");
  }
  const std::size_t size = sp.space_size();
  const WeightFunction& w = cfg.w;

  // Off-diagonal rate: flipping site k of omega happens at rate
  // w(k) * (p_k if the new sign is +1 else q_k). Refresh draws that keep
  // the sign are not state transitions and stay on the diagonal.
  std::vector<double> rate(size * size, 0.0);
  for (std::size_t m = 0; m < size; ++m) {
    double out_rate = 0.0;
    for (int k = 0; k < n; ++k) {
      const std::size_t flipped = m ^ (std::size_t(1) << k);
      const bool new_plus = (flipped >> k) & 1u;
      const double r = w(k) * (new_plus ? sp.p(k) : sp.q(k));
      rate[m * size + flipped] = r;
      out_rate += r;
    }
    rate[m * size + m] = -out_rate;
  }

  ReversibilityReport report;
  report.n = n;
  report.spectral_gap = w.spectral_gap();

  std::vector<double> mass(size);
  for (std::size_t m = 0; m < size; ++m) {
    mass[m] = point_mass(sp, SamplePoint{std::uint32_t(m)});
  }

  for (std::size_t m = 0; m < size; ++m) {
    double row = 0.0;
    for (std::size_t m2 = 0; m2 < size; ++m2) row += rate[m * size + m2];
    report.max_row_sum = std::max(report.max_row_sum, std::abs(row));
    for (int k = 0; k < n; ++k) {
      const std::size_t m2 = m ^ (std::size_t(1) << k);
      const double forward = mass[m] * rate[m * size + m2];
      const double backward = mass[m2] * rate[m2 * size + m];
      const double scale = std::max({forward, backward, 1e-300});
      report.max_detailed_balance_dev =
          std::max(report.max_detailed_balance_dev,
                   std::abs(forward - backward) / scale);
    }
  }

  // Generator eigencheck: Q v_sigma + #w(sigma) v_sigma should vanish.
  const auto& table = w.counting_table();
  for (std::size_t sigma = 0; sigma < size; ++sigma) {
    const PointwiseVector v =
        to_pointwise(ChaosVector::basis(cfg.params, std::uint32_t(sigma)));
    double vmax = 0.0;
    for (double value : v.values) vmax = std::max(vmax, std::abs(value));
    const double lambda = table[sigma];
    double residual = 0.0;
    for (std::size_t m = 0; m < size; ++m) {
      double qv = 0.0;
      for (std::size_t m2 = 0; m2 < size; ++m2) {
        qv += rate[m * size + m2] * v.values[m2];
      }
      residual = std::max(residual, std::abs(qv + lambda * v.values[m]));
    }
    report.max_generator_residual =
        std::max(report.max_generator_residual,
                 residual / ((1.0 + lambda) * std::max(vmax, 1.0)));
  }
  return report;
}

}  // namespace bfl
