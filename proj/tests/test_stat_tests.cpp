#include <cmath>

#include "doctest.h"
#include "pks/rng.hpp"
#include "pks/stat_tests.hpp"

using namespace pks;
using doctest::Approx;

TEST_CASE("Kolmogorov survival at known points") {
  // Standard table values of the limiting distribution.
  CHECK(kolmogorov_survival(1.36) == Approx(0.0494).epsilon(2e-3));
  CHECK(kolmogorov_survival(1.63) == Approx(0.0098).epsilon(3e-3));
  CHECK(kolmogorov_survival(0.5) == Approx(0.9639).epsilon(1e-3));
  // Both series agree across the switch.
  CHECK(kolmogorov_survival(1.17999) == Approx(kolmogorov_survival(1.18001)).epsilon(1e-4));
}

TEST_CASE("chi-square and normal tails") {
  CHECK(chi_square_survival(3.841458820694124, 1) == Approx(0.05).epsilon(1e-9));
  CHECK(normal_two_sided(1.959963984540054) == Approx(0.05).epsilon(1e-9));
}

TEST_CASE("KS accepts the true law and rejects a shifted one") {
  Rng rng(11);
  std::vector<double> x;
  for (int i = 0; i < 5000; ++i) x.push_back(uniform01(rng));
  const auto uni = [](double t) { return std::clamp(t, 0.0, 1.0); };
  CHECK(ks_one_sample(x, uni).p_value > 1e-3);
  std::vector<double> y = x;
  for (double& v : y) v = std::min(1.0, v + 0.05);
  CHECK(ks_one_sample(y, uni).p_value < 1e-6);
  CHECK(ks_two_sample(x, y).p_value < 1e-3);
  std::vector<double> z;
  for (int i = 0; i < 5000; ++i) z.push_back(uniform01(rng));
  CHECK(ks_two_sample(x, z).p_value > 1e-3);
}

TEST_CASE("chi-square pools sparse cells") {
  const std::vector<double> obs{50, 30, 15, 4, 1};
  const std::vector<double> probs{0.5, 0.3, 0.15, 0.04, 0.01};
  const auto r = chi_square_gof(obs, probs);
  CHECK(r.statistic == Approx(0.0));
  CHECK(r.dof == 3);  // last two pooled into the third
  CHECK(r.p_value == Approx(1.0));
}

TEST_CASE("dispersion of Poisson counts") {
  Rng rng(5);
  std::vector<double> counts;
  std::poisson_distribution<int> pois(7.0);
  for (int i = 0; i < 2000; ++i) counts.push_back(pois(rng));
  CHECK(dispersion_test(counts).p_value > 1e-3);
  std::vector<double> over;
  for (int i = 0; i < 2000; ++i) over.push_back(i % 2 ? 0 : 14);
  CHECK(dispersion_test(over).p_value < 1e-6);
}

TEST_CASE("summaries") {
  const auto s = summarize({1, 2, 3, 4});
  CHECK(s.mean == 2.5);
  CHECK(s.variance == Approx(5.0 / 3));
  CHECK(correlation({1, 2, 3}, {2, 4, 6}) == Approx(1.0));
  CHECK(correlation({1, 2, 3}, {1, 1, 1}) == 0.0);
}
