#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bfl {

namespace detail {

struct CountingTableCache {
  std::once_flag built;
  std::vector<double> table;
};

}  // namespace detail

/// Nonnegative per-site weights w(0..n-1) and the subset weights they
/// induce. The full 2^n table of subset weights is built lazily, once, and
/// shared across copies; the diagonal operators downstream index into it.
class WeightFunction {
 public:
  explicit WeightFunction(std::vector<double> values)
      : values_(std::move(values)),
        cache_(std::make_shared<detail::CountingTableCache>()) {
    if (values_.empty()) {
      throw std::invalid_argument("WeightFunction: needs at least one site");
    }
    for (std::size_t k = 0; k < values_.size(); ++k) {
      if (!(values_[k] >= 0.0) || !std::isfinite(values_[k])) {
        throw std::invalid_argument("WeightFunction: w[" + std::to_string(k) +
                                    "] must be finite and >= 0");
      }
    }
  }

  static WeightFunction constant(int n, double c) {
    if (n < 1) throw std::invalid_argument("WeightFunction: site count must be >= 1");
    return WeightFunction(std::vector<double>(std::size_t(n), c));
  }

  /// w(k) = a*k + b; the resolved values must be nonnegative.
  static WeightFunction affine(int n, double a, double b) {
    if (n < 1) throw std::invalid_argument("WeightFunction: site count must be >= 1");
    std::vector<double> v(std::size_t(n), 0.0);
    for (int k = 0; k < n; ++k) v[std::size_t(k)] = a * double(k) + b;
    return WeightFunction(std::move(v));
  }

  int n() const { return int(values_.size()); }
  double operator()(int k) const { return values_[std::size_t(k)]; }
  const std::vector<double>& values() const { return values_; }

  double total() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s;
  }

  /// Smallest subset weight over nonempty subsets (= min_k w(k)).
  double spectral_gap() const {
    double g = values_[0];
    for (double v : values_) g = std::min(g, v);
    return g;
  }

  /// Table of subset weights for every mask, table[m] = sum of w over the
  /// set bits of m. Built on first use via the lowest-set-bit recursion.
  const std::vector<double>& counting_table() const {
    std::call_once(cache_->built, [this] {
      const std::size_t size = std::size_t(1) << n();
      auto& t = cache_->table;
      t.assign(size, 0.0);
      for (std::size_t m = 1; m < size; ++m) {
        t[m] = t[m & (m - 1)] + values_[std::size_t(std::countr_zero(m))];
      }
    });
    return cache_->table;
  }

  friend bool operator==(const WeightFunction& a, const WeightFunction& b) {
    return a.values_ == b.values_;
  }

 private:
  std::vector<double> values_;
  std::shared_ptr<detail::CountingTableCache> cache_;
};

/// Weight of a subset mask: sum of w(j) over the set bits, 0 for the empty
/// mask. Bits are accumulated in descending order so that the result is
/// bit-identical to the cached table.
inline double w_count(const WeightFunction& w, std::uint32_t sigma) {
  if (sigma >= (std::uint64_t(1) << w.n())) {
    throw std::out_of_range("w_count: subset mask out of range for n=" +
                            std::to_string(w.n()));
  }
  double s = 0.0;
  for (int k = w.n() - 1; k >= 0; --k) {
    if ((sigma >> k) & 1u) s += w(k);
  }
  return s;
}

}  // namespace bfl
