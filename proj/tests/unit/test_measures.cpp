#include <doctest.h>

#include <cmath>
#include <random>

#include "../reference.hpp"
#include "pmink/flow.hpp"
#include "pmink/measures.hpp"

using namespace pmink;

TEST_SUITE("measures") {

TEST_CASE("density of disks with closed-form gradients") {
  const auto unit = SupportFunction::sample(64, [](double) { return 1.0; });
  const double g2 = 1.0 / std::log(2.0);
  const auto mu = measure_density(unit, std::vector<double>(64, g2), 2.0);
  for (double d : mu.density) CHECK(d == doctest::Approx(g2).epsilon(1e-14));
  CHECK(mu.total_mass == doctest::Approx(2.0 * ref::kPi / std::log(2.0)).epsilon(1e-14));
  CHECK(mass_functional(unit, mu) == doctest::Approx(9.064720283654388).epsilon(1e-14));

  const double g3 = 0.5 / (1.0 - std::sqrt(0.5));
  const auto mu3 = measure_density(unit, std::vector<double>(64, g3), 3.0);
  for (double d : mu3.density) CHECK(d == doctest::Approx(2.9142135623730963).epsilon(1e-14));

  const auto doubled = measure_density(unit, std::vector<double>(64, 2.0 * g2), 2.0);
  for (std::size_t k = 0; k < 64; ++k) CHECK(doubled.density[k] == doctest::Approx(2.0 * mu.density[k]).epsilon(1e-15));
}

TEST_CASE("mass functional of unit densities") {
  MeasureDensity ones{std::vector<double>(32, 1.0), 2.0 * ref::kPi};
  CHECK(mass_functional(SupportFunction::sample(32, [](double) { return 1.0; }), ones) ==
        doctest::Approx(2.0 * ref::kPi).epsilon(1e-15));
  CHECK(mass_functional(SupportFunction::sample(32, [](double) { return 2.0; }), ones) ==
        doctest::Approx(4.0 * ref::kPi).epsilon(1e-15));
}

TEST_CASE("mass of the measure equals Gamma") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> amp(-0.03, 0.03);
  std::uniform_real_distribution<double> pick_p(1.1, 4.0);
  std::uniform_real_distribution<double> g(0.2, 3.0);
  for (int trial = 0; trial < 25; ++trial) {
    const double a = amp(rng);
    const double c = 0.1 * amp(rng);
    const auto h = SupportFunction::sample(128, [&](double t) { return 1.0 + a * std::cos(2.0 * t) + c * std::cos(6.0 * t); });
    std::vector<double> grad(128);
    for (double& x : grad) x = g(rng);
    const double p = pick_p(rng);
    const auto mu = measure_density(h, grad, p);
    CHECK(mass_functional(h, mu) == doctest::Approx(gamma_functional(h, grad, p)).epsilon(1e-12));
  }
}

TEST_CASE("even inputs give an even density") {
  const auto h = symmetrize(SupportFunction::sample(64, [](double t) { return 1.0 + 0.1 * std::cos(2.0 * t); }));
  REQUIRE(h.is_even());
  std::vector<double> grad(64);
  for (std::size_t k = 0; k < 32; ++k) grad[k] = grad[k + 32] = 1.0 + 0.01 * k;
  const auto mu = measure_density(h, grad, 2.7);
  for (std::size_t k = 0; k < 32; ++k) CHECK(mu.density[k] == mu.density[k + 32]);
}

TEST_CASE("admissibility of constant density") {
  const auto report = check_admissibility(std::vector<double>(256, 1.0));
  CHECK(report.spread_minimum == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(std::abs(report.spread_minimum - 4.0) <= 1e-8);
  CHECK(std::abs(report.centroid_x) < 1e-12);
  CHECK(std::abs(report.centroid_y) < 1e-12);
  CHECK(report.all_pass());
  CHECK_FALSE(report.atoms_note.empty());
}

TEST_CASE("admissibility of an off-centre density") {
  const auto f = ref::sample(256, [](double t) { return 1.0 + 0.5 * std::cos(t); });
  const auto report = check_admissibility(f);
  CHECK(std::abs(report.centroid_x - 0.5 * ref::kPi) <= 1e-8);
  CHECK(std::abs(report.centroid_y) < 1e-12);
  CHECK_FALSE(report.centroid_ok);
  CHECK(report.spread_ok);
  CHECK_FALSE(report.all_pass());
}

TEST_CASE("admissibility of an even density") {
  const auto f = ref::sample(128, [](double t) { return 1.0 + 0.3 * std::cos(2.0 * t); });
  const auto report = check_admissibility(f);
  CHECK(report.all_pass());
  // Along zeta at angle phi the integral is 4 + 0.4 cos 2 phi, smallest on
  // the y axis.
  CHECK(report.spread_minimum == doctest::Approx(4.0 - 0.4).epsilon(1e-10));
}

TEST_CASE("admissibility rejects bad samples") {
  CHECK_THROWS_AS(check_admissibility(std::vector<double>(7, 1.0)), InvalidInput);
  std::vector<double> f(16, 1.0);
  f[3] = 0.0;
  CHECK_THROWS_AS(check_admissibility(f), InvalidInput);
}

}  // TEST_SUITE
