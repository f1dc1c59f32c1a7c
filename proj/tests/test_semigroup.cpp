#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include "bfl/rng.hpp"
#include "bfl/semigroup.hpp"

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

ChaosVector random_unit_interval(ParamsPtr params, RngStream& stream) {
  std::vector<double> v(params->space_size());
  for (auto& value : v) value = stream.uniform01();
  return to_chaos(PointwiseVector(std::move(params), std::move(v)));
}

}  // namespace

TEST_CASE("evolution damps each coefficient by its subset rate") {
  const auto params = make_constant_params(2, 0.5);
  const WeightFunction w({2.0, 1.0});
  const ChaosVector z0 = ChaosVector::basis(params, 0b01);
  const ChaosVector out = evolve(z0, SemigroupQuery(0.5, w));
  REQUIRE(out.coeffs[0b01] == Approx(std::exp(-1.0)));
  REQUIRE(out.coeffs[0b01] == Approx(0.36787944117144233));

  REQUIRE_THROWS_AS(SemigroupQuery(-0.1, w), std::domain_error);
  REQUIRE_THROWS_AS(evolve(ChaosVector::basis(make_constant_params(3, 0.5), 0),
                           SemigroupQuery(1.0, w)),
                    std::invalid_argument);
}

TEST_CASE("time zero is exactly the identity") {
  RngStream stream(139, "semigroup-t0");
  const auto params = random_params(8, stream);
  const WeightFunction w = random_weight(8, stream);
  const ChaosVector x = random_chaos(params, stream);
  const ChaosVector out = evolve(x, SemigroupQuery(0.0, w));
  for (std::size_t m = 0; m < x.size(); ++m) {
    REQUIRE(out.coeffs[m] == x.coeffs[m]);
  }
}

TEST_CASE("constants are fixed points at every time") {
  RngStream stream(149, "semigroup-const");
  const auto params = random_params(6, stream);
  const WeightFunction w = random_weight(6, stream);
  for (double t : {0.0, 0.3, 2.0, 50.0}) {
    const ChaosVector out =
        evolve(ChaosVector::basis(params, 0), SemigroupQuery(t, w));
    REQUIRE(out.coeffs[0] == 1.0);
  }
}

TEST_CASE("semigroup laws hold on random data") {
  RngStream stream(151, "semigroup-laws");
  const auto params = random_params(9, stream);
  const WeightFunction w = random_weight(9, stream);
  const ChaosVector x = random_chaos(params, stream);

  const SemigroupLawReport report = check_semigroup_laws(w, 0.3, 0.3, x);
  REQUIRE(report.composition_deviation < 1e-12 * norm(x));
  REQUIRE(report.contraction_excess <= 1e-14 * norm(x));
  REQUIRE(report.continuity_decreasing);

  const SemigroupLawReport at_zero = check_semigroup_laws(w, 0.0, 0.0, x);
  REQUIRE(at_zero.composition_deviation == 0.0);

  for (double t : {0.1, 1.0, 10.0}) {
    REQUIRE(norm(evolve(x, SemigroupQuery(t, w))) <= norm(x) * (1.0 + 1e-14));
  }
}

TEST_CASE("evolution is symmetric in the chaos pairing") {
  RngStream stream(157, "semigroup-sym");
  const auto params = random_params(8, stream);
  const WeightFunction w = random_weight(8, stream);
  const ChaosVector x = random_chaos(params, stream);
  const ChaosVector y = random_chaos(params, stream);
  const SemigroupQuery q(0.7, w);
  REQUIRE(inner_product(evolve(x, q), y) ==
          Approx(inner_product(x, evolve(y, q))).margin(1e-12));
}

TEST_CASE("form and number operator compute the same pairing") {
  const auto params = make_constant_params(3, 0.5);
  const WeightFunction w = WeightFunction::affine(3, 0.5, 0.25);
  for (std::uint32_t sigma = 0; sigma < 8; ++sigma) {
    const ChaosVector e = ChaosVector::basis(params, sigma);
    const GeneratorRelation rel = check_generator_relation(e, e, w);
    REQUIRE(rel.lhs == Approx(w_count(w, sigma)));
    REQUIRE(rel.rhs == Approx(w_count(w, sigma)));
  }

  RngStream stream(163, "semigroup-generator");
  const auto rp = random_params(12, stream);
  const WeightFunction rw = random_weight(12, stream);
  const ChaosVector x = random_chaos(rp, stream);
  const ChaosVector y = random_chaos(rp, stream);
  REQUIRE(check_generator_relation(x, y, rw).deviation < 1e-11 * (1.0 + norm(x) * norm(y)));

  const ChaosVector empty = ChaosVector::basis(rp, 0);
  const GeneratorRelation rel = check_generator_relation(x, empty, rw);
  REQUIRE(rel.lhs == 0.0);
  REQUIRE(rel.rhs == 0.0);
}

TEST_CASE("finite differences approach the number operator at first order") {
  RngStream stream(167, "semigroup-fd");
  const auto params = random_params(10, stream);
  const WeightFunction w = random_weight(10, stream);
  const ChaosVector x = random_chaos(params, stream);
  const ChaosVector nx = number_operator(x, w);

  std::vector<double> devs;
  for (double t : {1e-2, 1e-3, 1e-4}) {
    const ChaosVector moved = evolve(x, SemigroupQuery(t, w));
    double ss = 0.0;
    for (std::size_t m = 0; m < x.size(); ++m) {
      const double d = (x.coeffs[m] - moved.coeffs[m]) / t - nx.coeffs[m];
      ss += d * d;
    }
    devs.push_back(std::sqrt(ss));
  }
  REQUIRE(devs[0] / devs[1] >= 5.0);
  REQUIRE(devs[0] / devs[1] <= 20.0);
  REQUIRE(devs[1] / devs[2] >= 5.0);
  REQUIRE(devs[1] / devs[2] <= 20.0);
}

TEST_CASE("markov property holds for [0,1]-valued functionals") {
  RngStream stream(173, "semigroup-markov");
  const auto params = random_params(6, stream);
  const WeightFunction w = random_weight(6, stream, 5.0);

  // the constant one stays the constant one
  const MarkovCheck constant =
      check_markov_property(ChaosVector::basis(params, 0), SemigroupQuery(1.0, w));
  REQUIRE(constant.min_value == Approx(1.0).margin(1e-12));
  REQUIRE(constant.max_value == Approx(1.0).margin(1e-12));
  REQUIRE(constant.pass);

  // indicator of a single sample point
  std::vector<double> indicator(params->space_size(), 0.0);
  indicator[13] = 1.0;
  const ChaosVector spike = to_chaos(PointwiseVector(params, indicator));
  for (double t : {0.1, 1.0}) {
    REQUIRE(check_markov_property(spike, SemigroupQuery(t, w)).pass);
  }

  for (int trial = 0; trial < 50; ++trial) {
    RngStream ts(173, "semigroup-markov-battery", std::uint64_t(trial));
    const ChaosVector x = random_unit_interval(params, ts);
    const double t = std::vector<double>{0.1, 1.0, 10.0}[trial % 3];
    REQUIRE(check_markov_property(x, SemigroupQuery(t, w)).pass);
  }
}

TEST_CASE("markov precondition names the offending sample point") {
  const auto params = make_constant_params(3, 0.5);
  std::vector<double> values(8, 0.5);
  values[5] = 1.5;
  const ChaosVector x = to_chaos(PointwiseVector(params, values));
  const WeightFunction w = WeightFunction::constant(3, 1.0);
  REQUIRE_THROWS_WITH(check_markov_property(x, SemigroupQuery(0.5, w)),
                      Catch::Matchers::ContainsSubstring("bits=5"));
}

TEST_CASE("positivity is preserved") {
  RngStream stream(179, "semigroup-positivity");
  const auto params = random_params(6, stream);
  const WeightFunction w = random_weight(6, stream);
  const SemigroupQuery q(0.8, w);

  const PositivityCheck zero =
      check_positivity_preservation(ChaosVector::zero(params), q);
  REQUIRE(zero.min_value == 0.0);
  REQUIRE(zero.pass);

  std::vector<double> indicator(params->space_size(), 0.0);
  indicator[7] = 1.0;
  const ChaosVector spike = to_chaos(PointwiseVector(params, indicator));
  REQUIRE(check_positivity_preservation(spike, q).pass);

  // scaling a passing input cannot break positivity
  std::vector<double> scaled(params->space_size());
  for (std::size_t m = 0; m < scaled.size(); ++m) scaled[m] = 40.0 * indicator[m];
  REQUIRE(check_positivity_preservation(
              to_chaos(PointwiseVector(params, scaled)), q)
              .pass);

  std::vector<double> negative(params->space_size(), 1.0);
  negative[2] = -0.25;
  REQUIRE_THROWS_AS(check_positivity_preservation(
                        to_chaos(PointwiseVector(params, negative)), q),
                    std::invalid_argument);
}
