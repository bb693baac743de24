#include <doctest.h>

#include <cmath>

#include "dld/errors.hpp"
#include "dld/grid_engine.hpp"
#include "dld/oracles.hpp"

using namespace dld;

TEST_CASE("grid geometry") {
  const GridSpec g{-0.5, 0.5, -1.0, 1.0, 11, 21};
  CHECK(g.x(0) == -0.5);
  CHECK(g.x(10) == 0.5);
  CHECK(g.y(20) == 1.0);
  CHECK(g.x(5) == doctest::Approx(0.0));
  CHECK(g.index(3, 2) == 2 * 11 + 3);
  CHECK_THROWS_AS((GridSpec{0, 1, 0, 1, 1, 1}.validate()), Error);
  CHECK_THROWS_AS((GridSpec{1, 0, 0, 1, 5, 5}.validate()), Error);
  const auto nn = nearest_node(g, {0.04, -2.0});
  CHECK(nn.first == 5);
  CHECK(nn.second == 0);
}

TEST_CASE("field equals the closed form at every node") {
  LinearSaddle k({1.1});
  const GridSpec g{-0.5, 0.5, -0.5, 0.5, 41, 41};
  const auto f = evaluate_field(k, g, {0.5, 20}, 3);
  double worst = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double ref = md_linear_saddle(g.x(i), g.y(j), 1.1, 0.5, 20);
      if (ref > 0) worst = std::max(worst, std::fabs(f.at(i, j) - ref) / ref);
    }
  }
  CHECK(worst <= 1e-12);
  CHECK(f.kernel_name == "linear-saddle");
}

TEST_CASE("smallest grid") {
  LinearSaddle k({1.1});
  const auto f = evaluate_field(k, {-1, 1, -1, 1, 2, 2}, {0.5, 5}, 8);
  CHECK(f.values.size() == 4);
  CHECK(f.at(0, 0) == f.at(1, 1));
  CHECK_THROWS_AS(evaluate_field(k, {-1, 1, -1, 1, 1, 1}, {0.5, 5}), Error);
}

TEST_CASE("worker count does not change the field") {
  Henon k({9.5, -1.0, 0.2});
  const GridSpec g{-6, 6, -6, 6, 97, 83};
  DescriptorParams params{0.05, 5};
  params.escape_radius = 50.0;
  const auto a = evaluate_field(k, g, params, 1);
  for (int w : {2, 8, 200}) {
    const auto b = evaluate_field(k, g, params, w);
    CHECK(a.values == b.values);
    CHECK(a.escaped == b.escaped);
  }
}

TEST_CASE("errors inside workers propagate") {
  Henon k({9.5, -1.0, 0.0});
  CHECK_THROWS_AS(evaluate_field(k, {-6, 6, -6, 6, 20, 20}, {0.5, 30}, 4), Error);
}

TEST_CASE("autonomous limit of the forced map") {
  const GridSpec g{-6, 6, -6, 6, 60, 60};
  DescriptorParams params{0.05, 5};
  params.escape_radius = 50.0;
  params.n0 = 3;
  const auto a = evaluate_field(Henon({9.5, -1.0, 0.0}), g, params, 2);
  const auto b = evaluate_field(Henon({9.5, -1.0, 0.0}), g, {0.05, 5, 0, 50.0}, 2);
  CHECK(a.values == b.values);
}

TEST_CASE("minimum markers") {
  LinearSaddle k({1.1});
  const GridSpec g{-0.5, 0.5, -0.5, 0.5, 21, 21};
  const auto f = evaluate_field(k, g, {0.5, 20});
  const auto m = min_markers(f, 3);
  REQUIRE(m.size() == 3);
  CHECK(m[0].i == 10);
  CHECK(m[0].j == 10);
  CHECK(m[0].value == 0.0);
  for (std::size_t a = 0; a < m.size(); ++a) {
    for (std::size_t b = a + 1; b < m.size(); ++b) {
      CHECK(std::max(std::abs(m[a].i - m[b].i), std::abs(m[a].j - m[b].j)) >= 3);
    }
  }
  CHECK_THROWS_WITH_AS(min_markers(f, 1000), doctest::Contains("FewerThanK"), Error);
}

TEST_CASE("summary and quantiles") {
  FieldResult f;
  f.grid = {0, 1, 0, 1, 2, 2};
  f.values = {4, 1, 3, 2};
  f.escaped = {0, 0, 0, 1};
  const auto s = summarize(f);
  CHECK(s.min == 1);
  CHECK(s.max == 4);
  CHECK(s.median == 2.5);
  CHECK(s.escape_fraction == 0.25);
  CHECK(percentile_non_escaped(f, 0.0) == 1.0);
  CHECK(percentile_non_escaped(f, 0.25) == 2.0);
  CHECK(percentile_non_escaped(f, 1.0) == 4.0);
  const auto mask = low_value_mask(f, 0.5);
  CHECK(mask == std::vector<std::uint8_t>{0, 1, 1, 0});
}

TEST_CASE("component counting") {
  const std::vector<std::uint8_t> m{
      1, 0, 0, 1,
      0, 1, 0, 0,
      0, 0, 0, 1,
  };
  CHECK(count_components(m, 4, 3) == 3);
  CHECK(count_components(std::vector<std::uint8_t>(12, 0), 4, 3) == 0);
  CHECK(count_components(std::vector<std::uint8_t>(12, 1), 4, 3) == 1);
}

TEST_CASE("henon fixed point sits in a low-descriptor region") {
  Henon k({9.5, -1.0, 0.0});
  const GridSpec g{-6, 6, -6, 6, 400, 400};
  DescriptorParams params{0.05, 5};
  params.escape_radius = 50.0;
  const auto f = evaluate_field(k, g, params, 4);
  const double xs = -1.0 + std::sqrt(10.5);
  const auto [i, j] = nearest_node(g, {xs, xs});
  CHECK_FALSE(f.escaped_at(i, j));
  CHECK(f.at(i, j) < percentile_non_escaped(f, 0.5));
}
