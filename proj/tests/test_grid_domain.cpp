#include "convlab/grid_domain.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <doctest.h>

#include "convlab/errors.hpp"
#include "convlab/gallery.hpp"

using namespace convlab;

namespace {

std::shared_ptr<const GridDomain> shared(GridDomain&& d) {
  return std::make_shared<const GridDomain>(std::move(d));
}

// Independent stars-and-bars count.
std::size_t compositions_count(std::int64_t total, int parts) {
  // C(total + parts - 1, parts - 1)
  std::size_t r = 1;
  for (int i = 1; i <= parts - 1; ++i) {
    r = r * static_cast<std::size_t>(total + i) / static_cast<std::size_t>(i);
  }
  return r;
}

}  // namespace

TEST_CASE("simplex grids") {
  CHECK(make_simplex_grid(1, 4).size() == 1);

  const auto s32 = make_simplex_grid(3, 2);
  CHECK(s32.size() == 15);
  CHECK(s32.size() == compositions_count(4, 3));
  // Exhaustive enumeration oracle.
  std::size_t count = 0;
  for (int a = 0; a <= 4; ++a) {
    for (int b = 0; a + b <= 4; ++b) {
      ++count;
      const std::vector<GridDomain::Coord> p{a, b, 4 - a - b};
      CHECK(s32.find(p) != GridDomain::npos);
    }
  }
  CHECK(count == s32.size());

  const auto s21 = make_simplex_grid(2, 1);
  REQUIRE(s21.size() == 3);
  CHECK(s21.point_values(0) == std::vector<double>{0.0, 1.0});
  CHECK(s21.point_values(1) == std::vector<double>{0.5, 0.5});
  CHECK(s21.point_values(2) == std::vector<double>{1.0, 0.0});
}

TEST_CASE("cube and ball grids") {
  const auto c10 = make_cube_grid(1, 0);
  REQUIRE(c10.size() == 3);
  CHECK(c10.point_values(0)[0] == -1.0);
  CHECK(c10.point_values(1)[0] == 0.0);
  CHECK(c10.point_values(2)[0] == 1.0);

  CHECK(make_ball_grid(2, 1, BodyKind::BallSup).size() == 25);

  const auto be = make_ball_grid(2, 1, BodyKind::BallEuclid);
  // Exhaustive filter of the 25 cube points by x^2+y^2 <= 1: the 4 corners
  // and the 8 points of type (+-1, +-1/2) fail it, leaving 13.
  CHECK(be.size() == 13);
  // Independent filter of the 25 cube points.
  std::size_t oracle = 0;
  for (int x = -2; x <= 2; ++x) {
    for (int y = -2; y <= 2; ++y) {
      if (x * x + y * y <= 4) ++oracle;
    }
  }
  CHECK(oracle == be.size());
  CHECK(be.find(std::vector<GridDomain::Coord>{2, 1}) == GridDomain::npos);  // (1, 1/2) excluded

  CHECK(make_positive_section_grid(2, 1).size() == 9);
  CHECK_THROWS_AS(make_ball_grid(2, 1, BodyKind::Simplex), ParameterError);
}

TEST_CASE("size caps fail loudly") {
  GridLimits tiny;
  tiny.max_points = 5;
  CHECK_THROWS_AS(make_cube_grid(2, 1, tiny), SizeLimitError);
  CHECK_THROWS_WITH_AS(make_cube_grid(2, 1, tiny), doctest::Contains("25"), SizeLimitError);
  GridLimits tiny_triples;
  tiny_triples.max_triples = 10;
  auto domain = shared(make_cube_grid(1, 1));
  CHECK_THROWS_AS(enumerate_convex_triples(domain, 2, tiny_triples), SizeLimitError);
}

TEST_CASE("convex triple enumeration") {
  // Degenerate one-point domain: x = y, any t.
  const auto single = shared(make_simplex_grid(1, 2));
  const auto triples = enumerate_convex_triples(single, 2);
  CHECK(triples.triples.size() == 5);
  for (const auto& t : triples.triples) {
    CHECK(t.x_id == 0);
    CHECK(t.y_id == 0);
    CHECK(t.combo_id == 0);
  }

  const auto s21 = shared(make_simplex_grid(2, 1));
  const auto ts = enumerate_convex_triples(s21, 1);
  const bool has_midpoint = std::any_of(ts.triples.begin(), ts.triples.end(), [](const ConvexTriple& t) {
    return t.x_id == 0 && t.y_id == 2 && t.t_num == 1 && t.combo_id == 1;
  });
  CHECK(has_midpoint);

  const auto c10 = shared(make_cube_grid(1, 0));
  const auto tc = enumerate_convex_triples(c10, 1);
  bool found_good = false, found_bad = false;
  for (const auto& t : tc.triples) {
    if (t.x_id == 0 && t.y_id == 2 && t.t_num == 1) found_good = true;   // (-1+1)/2 = 0 on grid
    if (t.x_id == 0 && t.y_id == 1 && t.t_num == 1) found_bad = true;    // midpoint -1/2 off grid
  }
  CHECK(found_good);
  CHECK(!found_bad);
}

TEST_CASE("triple enumeration invariants") {
  const auto domain = shared(make_cube_grid(2, 1));
  const auto a = enumerate_convex_triples(domain, 2);
  const auto b = enumerate_convex_triples(domain, 2);
  REQUIRE(a.triples.size() == b.triples.size());
  for (std::size_t i = 0; i < a.triples.size(); ++i) {
    CHECK(a.triples[i].x_id == b.triples[i].x_id);
    CHECK(a.triples[i].y_id == b.triples[i].y_id);
    CHECK(a.triples[i].t_num == b.triples[i].t_num);
    CHECK(a.triples[i].combo_id == b.triples[i].combo_id);
  }

  // Lexicographic order and the (x,y,t) <-> (y,x,1-t) symmetry.
  std::set<std::tuple<std::size_t, std::size_t, std::int64_t>> keys;
  auto prev = std::tuple<std::size_t, std::size_t, std::int64_t>{0, 0, -1};
  for (const auto& t : a.triples) {
    const auto key = std::tuple{t.x_id, t.y_id, t.t_num};
    CHECK(prev < key);
    prev = key;
    keys.insert(key);
  }
  for (const auto& t : a.triples) {
    CHECK(keys.count({t.y_id, t.x_id, 4 - t.t_num}) == 1);
  }

  // Exactness: recompute every combination in integer arithmetic.
  for (const auto& t : a.triples) {
    const auto px = domain->point(t.x_id);
    const auto py = domain->point(t.y_id);
    const auto pc = domain->point(t.combo_id);
    for (int j = 0; j < domain->dim(); ++j) {
      CHECK(t.t_num * px[j] + (4 - t.t_num) * py[j] == 4 * pc[j]);
    }
  }
}

TEST_CASE("midpoint pairs") {
  const auto c11 = shared(make_cube_grid(1, 1));  // {-1,-1/2,0,1/2,1}
  const auto pairs = enumerate_midpoint_pairs(c11);
  bool has = false, bad = false;
  for (const auto& p : pairs.pairs) {
    if (p.x_id == 0 && p.y_id == 4) {
      has = true;
      CHECK(p.mid_id == 2);
    }
    if (p.x_id == 0 && p.y_id == 3) bad = true;  // midpoint -1/4 off grid
  }
  CHECK(has);
  CHECK(!bad);

  // Count oracle on simplex(3, k=2): independent double loop.
  const auto s = shared(make_simplex_grid(3, 2));
  const auto mp = enumerate_midpoint_pairs(s);
  std::size_t oracle = 0;
  for (std::size_t x = 0; x < s->size(); ++x) {
    for (std::size_t y = 0; y < s->size(); ++y) {
      const auto px = s->point(x);
      const auto py = s->point(y);
      bool ok = true;
      std::vector<GridDomain::Coord> mid(3);
      for (int j = 0; j < 3; ++j) {
        if ((px[j] + py[j]) % 2 != 0) {
          ok = false;
          break;
        }
        mid[j] = (px[j] + py[j]) / 2;
      }
      if (ok && s->find(mid) != GridDomain::npos) ++oracle;
    }
  }
  CHECK(mp.pairs.size() == oracle);
}

TEST_CASE("sample_function") {
  const auto s = shared(make_simplex_grid(4, 2));
  const auto zero = sample_function(s, [](std::span<const double>) { return 0.0; });
  for (double v : zero.values()) CHECK(v == 0.0);

  const auto sums = sample_function(s, [](std::span<const double> x) {
    double acc = 0;
    for (double v : x) acc += v;
    return acc;
  });
  for (double v : sums.values()) CHECK(v == 1.0);

  const auto ent = sample_function(s, [](std::span<const double> x) { return entropy_simplex(x); });
  const auto uniform_id = s->find(std::vector<GridDomain::Coord>{1, 1, 1, 1});
  REQUIRE(uniform_id != GridDomain::npos);
  CHECK(ent[uniform_id] == 2.0);

  CHECK_THROWS_AS(
      sample_function(s, [](std::span<const double> x) { return std::log(x[0] - 1.0); }),
      EvaluationError);
}

TEST_CASE("domain JSON round trip") {
  const auto d = make_ball_grid(2, 1, BodyKind::BallEuclid);
  const auto back = GridDomain::from_json(d.to_json());
  REQUIRE(back.size() == d.size());
  CHECK(back.body_kind() == d.body_kind());
  CHECK(back.denom_power() == d.denom_power());
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(std::equal(d.point(i).begin(), d.point(i).end(), back.point(i).begin()));
  }
}

TEST_CASE("constructor rejects malformed points") {
  CHECK_THROWS_AS(GridDomain(BodyKind::Simplex, 2, 1, {{1, 0}}), ParameterError);      // sums to 1/2
  CHECK_THROWS_AS(GridDomain(BodyKind::Cube, 1, 0, {{2}}), ParameterError);            // outside
  CHECK_THROWS_AS(GridDomain(BodyKind::Cube, 1, 0, {{1}, {1}}), ParameterError);       // duplicate
  CHECK_THROWS_AS(GridDomain(BodyKind::Simplex, 2, 1, {{-1, 3}}), ParameterError);     // negative
}
