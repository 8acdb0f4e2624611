#include <doctest.h>

#include <cmath>
#include <random>

#include "hjrd/errors.hpp"
#include "hjrd/shapes.hpp"

using namespace hjrd;

namespace {

// Independent membership check straight from the definition.
bool in_box(const AxisBox& box, const std::vector<double>& x) {
  for (std::size_t k = 0; k < box.dims.size(); ++k)
    if (std::abs(x[box.dims[k]] - box.center[k]) > box.half_width[k]) return false;
  return true;
}

}  // namespace

TEST_CASE("signed distance of a square, hand-computed points") {
  AxisBox box{{0, 1}, {0.0, 0.0}, {0.5, 0.5}};
  const double center[] = {0.0, 0.0};
  CHECK(box_signed_distance(box, center) == doctest::Approx(-0.5).epsilon(1e-15));
  const double inside[] = {0.25, 0.0};
  CHECK(box_signed_distance(box, inside) == doctest::Approx(-0.25).epsilon(1e-15));
  const double face[] = {1.0, 0.0};
  CHECK(box_signed_distance(box, face) == doctest::Approx(0.5).epsilon(1e-15));
  const double corner[] = {1.0, 1.0};
  CHECK(box_signed_distance(box, corner) ==
        doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  const double boundary[] = {0.5, 0.3};
  CHECK(box_signed_distance(box, boundary) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("sub-zero set is exactly the box") {
  Grid g({{-2, -2}, {2, 2}, {41, 41}, {false, false}});
  AxisBox box{{0, 1}, {0.3, -0.4}, {0.7, 1.1}};
  Field f = signed_distance_box(g, box);
  std::vector<double> x(2);
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    g.node_coordinates(i, x);
    CHECK((f.values[i] <= 0) == in_box(box, x));
  }
}

TEST_CASE("unconstrained dimensions do not affect the distance") {
  Grid g({{-1, -1, -1}, {1, 1, 1}, {9, 9, 9}, {false, false, false}});
  AxisBox box{{0, 1}, {0.0, 0.0}, {0.25, 0.5}};
  Field f = signed_distance_box(g, box);
  // Values along dimension 2 must all equal the slice at index 0.
  std::vector<std::size_t> m(3);
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    g.multi_index(i, m);
    const std::size_t base = g.linear_index(std::vector<std::size_t>{m[0], m[1], 0});
    CHECK(f.values[i] == f.values[base]);
  }
}

TEST_CASE("distance fields are 1-Lipschitz along grid lines") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> center(-1, 1), width(0.1, 1.5);
  Grid g({{-2, -2, -2}, {2, 2, 2}, {17, 13, 11}, {false, false, false}});
  for (int rep = 0; rep < 20; ++rep) {
    AxisBox box;
    std::uniform_int_distribution<int> ndims(1, 3);
    const int k = ndims(rng);
    for (int d = 0; d < k; ++d) {
      box.dims.push_back(static_cast<std::size_t>(d));
      box.center.push_back(center(rng));
      box.half_width.push_back(width(rng));
    }
    Field f = signed_distance_box(g, box);
    std::vector<std::size_t> m(3);
    for (std::size_t i = 0; i < g.num_nodes(); ++i) {
      g.multi_index(i, m);
      for (std::size_t j = 0; j < 3; ++j) {
        if (m[j] + 1 == g.count(j)) continue;
        const double diff = std::abs(f.values[i + g.stride(j)] - f.values[i]);
        CHECK(diff <= g.spacing(j) + 1e-9);
      }
    }
  }
}

TEST_CASE("pointwise max intersects, pointwise min unions") {
  Grid g({{-2, -2}, {2, 2}, {21, 21}, {false, false}});
  AxisBox left{{0, 1}, {-0.5, 0.0}, {0.6, 0.6}};
  AxisBox right{{0, 1}, {0.5, 0.0}, {0.6, 0.6}};
  Field a = signed_distance_box(g, left);
  Field b = signed_distance_box(g, right);
  Field both = intersect(a, b);
  Field either = set_union(a, b);
  std::vector<double> x(2);
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    g.node_coordinates(i, x);
    CHECK(both.values[i] == std::max(a.values[i], b.values[i]));
    CHECK(either.values[i] == std::min(a.values[i], b.values[i]));
    CHECK((both.values[i] <= 0) == (in_box(left, x) && in_box(right, x)));
    CHECK((either.values[i] <= 0) == (in_box(left, x) || in_box(right, x)));
  }
}

TEST_CASE("set algebra rejects mismatched grids") {
  Grid a({{0}, {1}, {5}, {false}});
  Grid b({{0}, {1}, {6}, {false}});
  CHECK_THROWS_AS(intersect(make_field(a), make_field(b)), GridMismatch);
  CHECK_THROWS_AS(set_union(make_field(a), make_field(b)), GridMismatch);
}

TEST_CASE("box validation") {
  Grid g({{-1, -1}, {1, 1}, {5, 5}, {false, false}});
  CHECK_THROWS_AS(signed_distance_box(g, AxisBox{{2}, {0.0}, {0.5}}), DimMismatch);
  CHECK_THROWS_AS(signed_distance_box(g, AxisBox{{0, 0}, {0.0, 0.0}, {0.5, 0.5}}), InvalidSpec);
  CHECK_THROWS_AS(signed_distance_box(g, AxisBox{{0}, {0.0}, {0.0}}), InvalidSpec);
  CHECK_THROWS_AS(signed_distance_box(g, AxisBox{{0}, {0.0}, {-1.0}}), InvalidSpec);
  CHECK_THROWS_AS(signed_distance_box(g, AxisBox{{0}, {0.0, 0.0}, {0.5}}), InvalidSpec);
  CHECK_THROWS_AS(signed_distance_box(g, AxisBox{{}, {}, {}}), InvalidSpec);
  CHECK(constant_field(g, -1.0).values[7] == -1.0);
}
