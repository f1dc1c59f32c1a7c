#include <catch2/catch_amalgamated.hpp>

#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "bfl/dirichlet.hpp"
#include "bfl/rng.hpp"
#include "oracles.hpp"

using namespace bfl;
using Catch::Approx;

namespace {

ParamsPtr random_params(int n, RngStream& stream) {
  std::vector<double> p(std::size_t(n), 0.0);
  for (auto& v : p) v = stream.uniform(0.2, 0.8);
  return make_params(std::move(p));
}

ChaosVector random_chaos(ParamsPtr params, RngStream& stream) {
  std::vector<double> c(params->space_size());
  for (auto& v : c) v = stream.uniform(-1.0, 1.0);
  return ChaosVector(std::move(params), std::move(c));
}

WeightFunction random_weight(int n, RngStream& stream, double hi = 2.0) {
  std::vector<double> w(std::size_t(n), 0.0);
  for (auto& v : w) v = stream.uniform(0.0, hi);
  return WeightFunction(w);
}

}  // namespace

TEST_CASE("subset weights") {
  const WeightFunction w = WeightFunction::affine(4, 1.0, 1.0);  // w(k) = k+1
  REQUIRE(w_count(w, 0) == 0.0);
  REQUIRE(w_count(w, 0b101) == Approx(4.0));  // sites {0,2}: 1 + 3

  const WeightFunction unit = WeightFunction::constant(4, 1.0);
  for (std::uint32_t m = 0; m < 16; ++m) {
    REQUIRE(w_count(unit, m) == double(std::popcount(m)));
  }

  REQUIRE_THROWS_AS(w_count(unit, 16), std::out_of_range);
  REQUIRE_THROWS_AS(WeightFunction({1.0, -0.5}), std::invalid_argument);
}

TEST_CASE("the counting table matches the direct subset sums exactly") {
  RngStream stream(101, "dirichlet-table");
  const WeightFunction w = random_weight(10, stream);
  const auto& table = w.counting_table();
  for (std::uint32_t m = 0; m < (1u << 10); ++m) {
    REQUIRE(table[m] == w_count(w, m));
  }
}

TEST_CASE("energy form on basis elements") {
  RngStream stream(103, "dirichlet-basis");
  const auto params = random_params(5, stream);
  const WeightFunction w = random_weight(5, stream);
  for (std::uint32_t sigma = 0; sigma < 32; ++sigma) {
    REQUIRE(energy_form(ChaosVector::basis(params, sigma),
                        ChaosVector::basis(params, sigma), w) ==
            Approx(w_count(w, sigma)));
    const std::uint32_t tau = (sigma + 7) % 32;
    if (tau != sigma) {
      REQUIRE(energy_form(ChaosVector::basis(params, sigma),
                          ChaosVector::basis(params, tau), w) == 0.0);
    }
  }

  // constants carry no energy
  const ChaosVector x = random_chaos(params, stream);
  REQUIRE(energy_form(x, ChaosVector::basis(params, 0), w) == 0.0);
}

TEST_CASE("definitional and closed-form energy agree") {
  for (int n : {2, 6, 10}) {
    RngStream stream(107, "dirichlet-twopath", std::uint64_t(n));
    const auto params = random_params(n, stream);
    const WeightFunction w = random_weight(n, stream);
    const ChaosVector x = random_chaos(params, stream);
    const ChaosVector y = random_chaos(params, stream);
    const double closed = energy_form(x, y, w);
    const double definitional = energy_form_definitional(x, y, w);
    REQUIRE(std::abs(closed - definitional) <=
            1e-12 * std::max({1.0, std::abs(closed), std::abs(definitional)}));
  }
}

TEST_CASE("energy form is bilinear, symmetric, and positive") {
  RngStream stream(109, "dirichlet-bilinear");
  const auto params = random_params(7, stream);
  const WeightFunction w = random_weight(7, stream);
  const ChaosVector x = random_chaos(params, stream);
  const ChaosVector y = random_chaos(params, stream);
  const ChaosVector z = random_chaos(params, stream);
  const double alpha = stream.uniform(-2.0, 2.0);
  const double beta = stream.uniform(-2.0, 2.0);

  REQUIRE(energy_form(x, y, w) == Approx(energy_form(y, x, w)).margin(1e-12));

  std::vector<double> combo(x.size());
  for (std::size_t m = 0; m < combo.size(); ++m) {
    combo[m] = alpha * x.coeffs[m] + beta * z.coeffs[m];
  }
  REQUIRE(energy_form(ChaosVector(params, combo), y, w) ==
          Approx(alpha * energy_form(x, y, w) + beta * energy_form(z, y, w))
              .margin(1e-12));

  REQUIRE(energy_form(x, x, w) >= 0.0);

  // Cauchy-Schwarz in the form
  REQUIRE(std::abs(energy_form(x, y, w)) <=
          std::sqrt(energy_form(x, x, w)) * std::sqrt(energy_form(y, y, w)) +
              1e-10);
}

TEST_CASE("graph norm decomposition") {
  RngStream stream(113, "dirichlet-graph");
  const auto params = random_params(8, stream);
  const WeightFunction w = random_weight(8, stream);

  for (std::uint32_t sigma : {0u, 3u, 77u, 255u}) {
    REQUIRE(energy_norm_squared(ChaosVector::basis(params, sigma), w) ==
            Approx(w_count(w, sigma) + 1.0));
  }
  REQUIRE(energy_norm_squared(ChaosVector::zero(params), w) == 0.0);

  const ChaosVector x = random_chaos(params, stream);
  REQUIRE(std::abs(energy_norm_squared(x, w) -
                   (energy_form(x, x, w) + inner_product(x, x))) < 1e-12 *
              (1.0 + energy_norm_squared(x, w)));
}

TEST_CASE("unit weights recover the pointwise gradient energy") {
  RngStream stream(127, "dirichlet-gradient");
  const auto params = random_params(8, stream);
  const WeightFunction unit = WeightFunction::constant(8, 1.0);
  const ChaosVector x = random_chaos(params, stream);

  double pointwise_energy = 0.0;
  const PointwiseVector v = to_pointwise(x);
  for (std::size_t omega = 0; omega < v.size(); ++omega) {
    double square_sum = 0.0;
    for (int k = 0; k < 8; ++k) {
      const double d = difference_operator(v, k).values[omega];
      square_sum += d * d;
    }
    pointwise_energy +=
        point_mass(*params, SamplePoint{std::uint32_t(omega)}) * square_sum;
  }
  REQUIRE(energy_form(x, x, unit) ==
          Approx(pointwise_energy).epsilon(1e-10));
}

TEST_CASE("contraction functions validate at construction") {
  REQUIRE_NOTHROW(ContractionFunction("sin", [](double t) { return std::sin(t); }));
  REQUIRE_THROWS_AS(
      ContractionFunction("shifted", [](double t) { return t + 1.0; }),
      std::invalid_argument);
  REQUIRE_THROWS_AS(
      ContractionFunction("steep", [](double t) { return 2.0 * t; }),
      std::invalid_argument);
  REQUIRE_THROWS_AS(scaled_identity(1.5), std::invalid_argument);

  const auto catalog = contraction_catalog();
  REQUIRE(catalog.size() >= 6);
  for (const auto& c : catalog) REQUIRE(c(0.0) == 0.0);
}

TEST_CASE("composing inside the range changes nothing") {
  RngStream stream(131, "dirichlet-idcontract");
  const auto params = random_params(6, stream);
  // values already inside [-1,1]: clamp is the identity there
  std::vector<double> values(params->space_size());
  for (auto& v : values) v = stream.uniform(-1.0, 1.0);
  const ChaosVector x = to_chaos(PointwiseVector(params, values));
  const ContractionFunction clamp("clamp_unit", [](double t) {
    return std::min(std::max(t, -1.0), 1.0);
  });
  const ChaosVector cx = apply_contraction(x, clamp);
  for (std::size_t m = 0; m < x.size(); ++m) {
    REQUIRE(cx.coeffs[m] == Approx(x.coeffs[m]).margin(1e-12));
  }
}

TEST_CASE("single-site composition with the unit contraction") {
  const auto params = make_constant_params(1, 0.8);
  const ChaosVector x = to_chaos(PointwiseVector(params, {-1.0, 1.5}));
  const ContractionFunction unit("unit_interval", [](double t) {
    return std::min(std::max(t, 0.0), 1.0);
  });
  const ChaosVector cx = apply_contraction(x, unit);
  REQUIRE(cx.coeffs[0] == Approx(0.8));
  REQUIRE(cx.coeffs[1] == Approx(0.4));

  const ContractionFunction zero("zero", [](double) { return 0.0; });
  for (double c : apply_contraction(x, zero).coeffs) {
    REQUIRE(c == Approx(0.0).margin(1e-15));
  }
}

TEST_CASE("contraction property on the single-site example") {
  const auto params = make_constant_params(1, 0.8);
  const ChaosVector x = to_chaos(PointwiseVector(params, {-1.0, 1.5}));
  const ContractionFunction unit("unit_interval", [](double t) {
    return std::min(std::max(t, 0.0), 1.0);
  });
  const WeightFunction w = WeightFunction::constant(1, 1.0);
  const ContractionCheck check = verify_contraction_property(x, unit, w);
  REQUIRE(check.energy_after == Approx(0.16));
  REQUIRE(check.energy_before == Approx(1.0));
  REQUIRE(check.pass);
}

TEST_CASE("constants have zero energy before and after contraction") {
  const auto params = make_constant_params(3, 0.4);
  const WeightFunction w = WeightFunction::constant(3, 2.0);
  const ContractionFunction unit("unit_interval", [](double t) {
    return std::min(std::max(t, 0.0), 1.0);
  });
  const ContractionCheck check =
      verify_contraction_property(ChaosVector::basis(params, 0), unit, w);
  REQUIRE(check.energy_before == 0.0);
  REQUIRE(check.energy_after == Approx(0.0).margin(1e-15));
  REQUIRE(check.pass);
}

TEST_CASE("randomized contraction battery passes across the catalog") {
  const auto catalog = contraction_catalog();
  int trials = 0;
  for (int i = 0; i < 100; ++i) {
    RngStream stream(137, "dirichlet-battery", std::uint64_t(i));
    const int n = 2 + i % 7;
    const auto params = random_params(n, stream);
    const WeightFunction w = random_weight(n, stream);
    const ChaosVector x = random_chaos(params, stream);
    const auto& c = catalog[std::size_t(i) % catalog.size()];
    REQUIRE(verify_contraction_property(x, c, w).pass);
    ++trials;
  }
  REQUIRE(trials == 100);
}
