#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "crscore/distribution.hpp"
#include "crscore/normal.hpp"
#include "crscore/report.hpp"
#include "crscore/stats.hpp"

using namespace crscore;

namespace {

ScalarDistribution unif(std::vector<double> values) {
  return ScalarDistribution::uniform_over(values);
}

/// Independent quantile oracle: bisection on the erfc-based normal CDF.
double quantile_by_bisection(double p) {
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (normal_cdf(mid) < p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("survival counts mass at and above the threshold") {
  const auto d = unif({5.0, 10.0});
  CHECK(survival(d, 5.0) == 1.0);
  CHECK(survival(d, 7.0) == 0.5);
  CHECK(survival(d, 10.0001) == 0.0);
  CHECK(survival(d, 10.0) == 0.5);
}

TEST_CASE("cdf is right-continuous and complements survival off the support") {
  const auto d = unif({5.0, 10.0});
  CHECK(cdf(d, 5.0) == 0.5);
  CHECK(cdf(d, 4.9999) == 0.0);
  CHECK(cdf(d, 10.0) == 1.0);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> value(0.0, 20.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> values;
    for (int i = 0; i < 5; ++i) values.push_back(std::floor(value(rng)));
    const auto dist = unif(values);
    const double z = value(rng) + 0.31;  // off the integer support
    CHECK(cdf(dist, z) + survival(dist, z) == Catch::Approx(1.0).margin(1e-12));
    CHECK(cdf(dist, z) <= cdf(dist, z + 1.0) + 1e-15);
    CHECK(survival(dist, z + 1.0) <= survival(dist, z) + 1e-15);
  }
}

TEST_CASE("scalar distributions canonicalize: merge, sort, renormalize") {
  const ScalarDistribution d({{3.0, 0.25}, {1.0, 0.5}, {3.0, 0.25}});
  REQUIRE(d.size() == 2);
  CHECK(d.atoms()[0].value == 1.0);
  CHECK(d.atoms()[0].prob == 0.5);
  CHECK(d.atoms()[1].value == 3.0);
  CHECK(d.atoms()[1].prob == 0.5);
  CHECK(d.min_value() == 1.0);
  CHECK(d.max_value() == 3.0);
  CHECK(d.mean() == Catch::Approx(2.0));

  CHECK(unif({2.0, 2.0, 8.0, 8.0}) == unif({2.0, 8.0}));

  CHECK_THROWS_AS(ScalarDistribution({}), InvalidDistribution);
  CHECK_THROWS_AS(ScalarDistribution({{1.0, 0.5}}), InvalidDistribution);
  CHECK_THROWS_AS(ScalarDistribution({{1.0, 0.5}, {2.0, 0.6}}), InvalidDistribution);
  CHECK_THROWS_AS(ScalarDistribution({{-1.0, 1.0}}), InvalidDistribution);
  CHECK_THROWS_AS(ScalarDistribution({{1.0, -0.5}, {2.0, 1.5}}), InvalidDistribution);
}

TEST_CASE("cumulative levels end exactly at 1") {
  const auto d = unif({1.0, 2.0, 3.0});
  const auto levels = d.cumulative_levels();
  REQUIRE(levels.size() == 3);
  CHECK(levels[0] == Catch::Approx(1.0 / 3.0));
  CHECK(levels[1] == Catch::Approx(2.0 / 3.0));
  CHECK(levels[2] == 1.0);
}

TEST_CASE("rankings must be permutations") {
  CHECK_NOTHROW(Ranking({2, 0, 1}));
  CHECK_THROWS_AS(Ranking({0, 0, 1}), InvalidRanking);
  CHECK_THROWS_AS(Ranking({0, 1, 3}), InvalidRanking);
  CHECK_THROWS_AS(Ranking({0, 1, -1}), InvalidRanking);
  CHECK(Ranking({2, 0, 1}).position_of(2) == 1);
  CHECK(Ranking({2, 0, 1}).position_of(1) == 3);
}

TEST_CASE("ranking distributions merge duplicate atoms") {
  const RankingDistribution d(2, {{Ranking({0, 1}), 0.25},
                                  {Ranking({1, 0}), 0.5},
                                  {Ranking({0, 1}), 0.25}});
  REQUIRE(d.atoms().size() == 2);
  CHECK(d.atoms()[0].ranking == Ranking({0, 1}));
  CHECK(d.atoms()[0].prob == 0.5);
  CHECK_THROWS_AS(RankingDistribution(2, {{Ranking({0, 1, 2}), 1.0}}), InvalidDistribution);
  CHECK_THROWS_AS(RankingDistribution(2, {{Ranking({0, 1}), 0.7}}), InvalidDistribution);
}

TEST_CASE("normal discretization matches pinned quantile grids") {
  const auto two = discretize_normal(NormalSpec(0.0, 1.0), 2);
  REQUIRE(two.size() == 2);
  CHECK(two.atoms()[0].value == Catch::Approx(0.0).margin(1e-4));
  CHECK(two.atoms()[1].value == Catch::Approx(0.6745).margin(1e-4));
  CHECK(two.atoms()[0].prob == 0.5);

  const auto four = discretize_normal(NormalSpec(100.0, 10.0), 4);
  REQUIRE(four.size() == 4);
  const double expected[] = {88.49, 96.81, 103.19, 111.51};
  for (int i = 0; i < 4; ++i) CHECK(four.atoms()[i].value == Catch::Approx(expected[i]).margin(1e-2));

  // A spread below the floating-point resolution of the mean collapses all
  // quantiles onto the mean, which the constructor merges into one atom.
  const auto point = discretize_normal(NormalSpec(10.0, 1e-16), 5);
  REQUIRE(point.size() == 1);
  CHECK(point.atoms()[0].value == Catch::Approx(10.0).margin(1e-12));
  CHECK(point.atoms()[0].prob == 1.0);

  CHECK_THROWS_AS(discretize_normal(NormalSpec(0.0, 1.0), 1), InvalidDistribution);
}

TEST_CASE("normal quantile agrees with a bisection oracle") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.001, 0.999);
  for (int i = 0; i < 200; ++i) {
    const double p = unit(rng);
    CHECK(normal_quantile(p) == Catch::Approx(quantile_by_bisection(p)).margin(1e-9));
  }

  std::uniform_real_distribution<double> mean(-50.0, 150.0), sd(0.1, 30.0);
  for (int trial = 0; trial < 20; ++trial) {
    const NormalSpec spec(mean(rng), sd(rng));
    const int m = 2 + static_cast<int>(unit(rng) * 8);
    const auto d = discretize_normal(spec, m);
    // Oracle quantiles, clamped and merged the same way.
    std::vector<double> expected;
    for (int i = 1; i <= m; ++i)
      expected.push_back(std::max(0.0, spec.mean + spec.std * quantile_by_bisection((i - 0.5) / m)));
    const auto oracle = ScalarDistribution::uniform_over(expected);
    REQUIRE(d.size() == oracle.size());
    for (int i = 0; i < d.size(); ++i)
      CHECK(d.atoms()[i].value == Catch::Approx(oracle.atoms()[i].value).margin(1e-8));
  }
}

TEST_CASE("competitive ratio zero conventions") {
  CHECK(competitive_ratio(0.0, 0.0) == 1.0);
  CHECK(competitive_ratio(5.0, 0.0) == 0.0);
  CHECK(competitive_ratio(0.0, 5.0) == 0.0);
  CHECK(competitive_ratio(10.0, 5.0) == 0.5);
  CHECK(competitive_ratio(5.0, 10.0) == 0.5);
  CHECK(competitive_ratio(-2.5, -7.5) == Catch::Approx(1.0 / 3.0));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(NormalSpec(1.0, 0.0), InvalidStd);
  CHECK_THROWS_AS(NormalSpec(1.0, -2.0), InvalidStd);
  CHECK_THROWS_AS(NewsvendorRatio(0.0), InvalidDistribution);
  CHECK_THROWS_AS(NewsvendorRatio(1.0), InvalidDistribution);
  CHECK_NOTHROW(NewsvendorRatio(0.5));
  CHECK_THROWS_AS(PricingCost(-1.0), InvalidDistribution);

  CHECK_THROWS_AS(AssortmentParams({5.0, 10.0}, {1.0, 1.0}, 1.0), InvalidDistribution);
  CHECK_THROWS_AS(AssortmentParams({10.0, 5.0}, {1.0}, 1.0), DimensionMismatch);
  CHECK_THROWS_AS(AssortmentParams({10.0, 5.0}, {1.0, -1.0}, 1.0), InvalidDistribution);
  CHECK_THROWS_AS(AssortmentParams({10.0, 5.0}, {1.0, 1.0}, 0.0), InvalidDistribution);
  CHECK(AssortmentParams({10.0, 5.0}, {1.0, 3.0}, 1.5).budget() == Catch::Approx(3.0));
}

TEST_CASE("student t quantiles match tabulated values") {
  CHECK(student_t_quantile(0.975, 1.0) == Catch::Approx(12.706).margin(1e-3));
  CHECK(student_t_quantile(0.975, 5.0) == Catch::Approx(2.5706).margin(1e-4));
  CHECK(student_t_quantile(0.975, 19.0) == Catch::Approx(2.0930).margin(1e-4));
  CHECK(student_t_cdf(0.0, 7.0) == Catch::Approx(0.5));
}

TEST_CASE("summaries use the t interval over replicates") {
  const auto s = summarize({1.0, 2.0, 3.0});
  CHECK(s.mean == Catch::Approx(2.0));
  CHECK(s.count == 3);
  CHECK_FALSE(s.degenerate);
  // half width = t_{0.975,2} * sd/sqrt(3) = 4.3027 * 1/sqrt(3)
  CHECK(s.ci_half_width == Catch::Approx(4.3027 / std::sqrt(3.0)).margin(1e-3));

  const auto single = summarize({5.0});
  CHECK(single.degenerate);
  CHECK(single.ci_half_width == 0.0);
  CHECK_THROWS_AS(summarize({}), EmptyInput);
}
