#include "gptik/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "test_util.hpp"

using gptik::Vector;
using gptik::geometry::ConvexSet;
using gptik::geometry::support_sample;
using gptik::testutil::vec;

namespace {

// Reference simplex projection by support enumeration: for each candidate
// support T, the KKT multiplier is theta = (sum_{i in T} x_i - scale)/|T| and
// the candidate y_i = max(x_i - theta, 0); the support is consistent iff
// x_i - theta > 0 exactly on T. Exponential, used only as a test oracle.
Vector simplex_project_bruteforce(const Vector& x, double scale) {
  const int d = static_cast<int>(x.size());
  for (unsigned mask = 1; mask < (1u << d); ++mask) {
    double sum = 0.0;
    int card = 0;
    for (int i = 0; i < d; ++i) {
      if (mask & (1u << i)) {
        sum += x[i];
        ++card;
      }
    }
    const double theta = (sum - scale) / card;
    bool ok = true;
    for (int i = 0; i < d; ++i) {
      const double slack = x[i] - theta;
      if (mask & (1u << i)) {
        if (slack < -1e-12) ok = false;
      } else {
        if (slack > 1e-12) ok = false;
      }
    }
    if (!ok) continue;
    Vector y = Vector::Zero(d);
    for (int i = 0; i < d; ++i) {
      if (mask & (1u << i)) y[i] = std::max(x[i] - theta, 0.0);
    }
    return y;
  }
  FAIL("no consistent support found");
  return Vector::Zero(d);
}

std::vector<ConvexSet> catalogue() {
  std::vector<ConvexSet> sets;
  sets.push_back(ConvexSet::box(vec({0, 0}), vec({1, 1})));
  sets.push_back(ConvexSet::box(vec({-1, 0.5, -3}), vec({2, 0.5, 4})));
  sets.push_back(ConvexSet::ball(vec({0, 0}), 1.0));
  sets.push_back(ConvexSet::ball(vec({1, -2, 0.5}), 2.5));
  sets.push_back(ConvexSet::simplex(2, 1.0));
  sets.push_back(ConvexSet::simplex(3, 2.5));
  sets.push_back(ConvexSet::halfspace(vec({1, 0}), 0.0));
  sets.push_back(ConvexSet::halfspace(vec({1, 2, -1}), 0.7));
  sets.push_back(ConvexSet::affine_hyperplane(vec({1, 1}), 2.0));
  sets.push_back(ConvexSet::affine_hyperplane(vec({0, 2, 1}), -1.0));
  sets.push_back(ConvexSet::whole_space(2));
  return sets;
}

Vector random_point(std::mt19937_64& rng, Eigen::Index dim, double span) {
  std::uniform_real_distribution<double> u(-span, span);
  Vector x(dim);
  for (Eigen::Index i = 0; i < dim; ++i) x[i] = u(rng);
  return x;
}

}  // namespace

TEST_CASE("projection worked examples") {
  const auto box = ConvexSet::box(vec({0, 0}), vec({1, 1}));
  CHECK((box.project(vec({2, -1})) - vec({1, 0})).norm() == 0.0);

  const auto ball = ConvexSet::ball(vec({0, 0}), 1.0);
  CHECK((ball.project(vec({3, 4})) - vec({0.6, 0.8})).norm() <= 1e-15);

  const auto simplex = ConvexSet::simplex(2, 1.0);
  CHECK((simplex.project(vec({1, 1})) - vec({0.5, 0.5})).norm() <= 1e-15);

  const auto hyper = ConvexSet::affine_hyperplane(vec({1, 1}), 2.0);
  CHECK((hyper.project(vec({2, 2})) - vec({1, 1})).norm() <= 1e-15);

  const auto half = ConvexSet::halfspace(vec({1, 0}), 0.0);
  CHECK((half.project(vec({2, 5})) - vec({0, 5})).norm() <= 1e-15);

  const auto all = ConvexSet::whole_space(2);
  CHECK((all.project(vec({7, -3})) - vec({7, -3})).norm() == 0.0);
}

TEST_CASE("membership worked examples") {
  const auto box = ConvexSet::box(vec({0, 0}), vec({1, 1}));
  CHECK(box.contains(vec({0.5, 0.5}), 0.0));
  CHECK_FALSE(box.contains(vec({1.0 + 1e-6, 0.5}), 1e-9));
  CHECK(box.contains(vec({1.0 + 1e-13, 0.5}), 1e-12));

  const auto ball = ConvexSet::ball(vec({0, 0}), 1.0);
  CHECK(ball.contains(vec({1.0, 1e-13}), 1e-9));

  const auto half = ConvexSet::halfspace(vec({1, 0}), 0.0);
  CHECK_FALSE(half.contains(vec({0.1, 0}), 0.0));
  CHECK(half.contains(vec({-0.1, 123456.0}), 0.0));

  const double inf = std::numeric_limits<double>::infinity();
  CHECK_FALSE(box.contains(vec({std::nan(""), 0.5}), 1.0));
  CHECK_FALSE(ball.contains(vec({inf, 0}), 1.0));
}

TEST_CASE("simplex projection matches support enumeration oracle") {
  std::mt19937_64 rng(42);
  for (double scale : {1.0, 2.5}) {
    const auto simplex = ConvexSet::simplex(3, scale);
    for (int trial = 0; trial < 200; ++trial) {
      const Vector x = random_point(rng, 3, 2.0);
      const Vector got = simplex.project(x);
      const Vector want = simplex_project_bruteforce(x, scale);
      CHECK((got - want).norm() <= 1e-10);
    }
  }
}

TEST_CASE("projection satisfies the variational inequality") {
  std::mt19937_64 rng(7);
  for (const auto& set : catalogue()) {
    const auto inside = support_sample(set, 99, 1000);
    int checked = 0;
    for (int i = 0; i < 1000; ++i) {
      const Vector x = random_point(rng, set.dim(), 5.0);
      const Vector y = set.project(x);
      const Vector& v = inside[static_cast<std::size_t>(i)];
      const double vi = (y - x).dot(y - v);
      CHECK(vi <= 1e-9 * (1.0 + x.squaredNorm()));
      CHECK(set.contains(y, 1e-12));
      ++checked;
    }
    CHECK(checked == 1000);
  }
}

TEST_CASE("projection is idempotent") {
  std::mt19937_64 rng(11);
  for (const auto& set : catalogue()) {
    for (int i = 0; i < 200; ++i) {
      const Vector y = set.project(random_point(rng, set.dim(), 8.0));
      CHECK((set.project(y) - y).norm() <= 1e-12);
    }
  }
}

TEST_CASE("projection is nonexpansive") {
  std::mt19937_64 rng(13);
  for (const auto& set : catalogue()) {
    for (int i = 0; i < 200; ++i) {
      const Vector x = random_point(rng, set.dim(), 5.0);
      const Vector y = random_point(rng, set.dim(), 5.0);
      CHECK((set.project(x) - set.project(y)).norm() <= (x - y).norm() + 1e-12);
    }
  }
}

TEST_CASE("points already in the set are fixed by projection") {
  for (const auto& set : catalogue()) {
    const auto pts = support_sample(set, 17, 50);
    for (const Vector& p : pts) {
      REQUIRE(set.contains(p, 1e-12));
      const Vector q = set.project(p);
      if (set.kind() == ConvexSet::Kind::box || set.kind() == ConvexSet::Kind::halfspace ||
          set.kind() == ConvexSet::Kind::whole_space) {
        CHECK((q - p).norm() == 0.0);  // exact: these projections branch on membership
      } else {
        CHECK((q - p).norm() <= 1e-12);
      }
    }
  }
}

TEST_CASE("support sampling is deterministic in the seed") {
  for (const auto& set : catalogue()) {
    const auto a = support_sample(set, 7, 3);
    const auto b = support_sample(set, 7, 3);
    REQUIRE(a.size() == 3);
    REQUIRE(b.size() == 3);
    for (int i = 0; i < 3; ++i) {
      CHECK((a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)]).norm() == 0.0);
      CHECK(set.contains(a[static_cast<std::size_t>(i)], 1e-12));
    }
    const auto c = support_sample(set, 8, 3);
    double diff = 0.0;
    for (int i = 0; i < 3; ++i) {
      diff += (a[static_cast<std::size_t>(i)] - c[static_cast<std::size_t>(i)]).norm();
    }
    CHECK(diff > 0.0);  // a different seed must move at least one point
  }
  const auto whole = ConvexSet::whole_space(2);
  CHECK(support_sample(whole, 1, 2).size() == 2);
}

TEST_CASE("invalid construction is rejected") {
  CHECK_THROWS_AS(ConvexSet::box(vec({1, 0}), vec({0, 1})), std::invalid_argument);
  CHECK_THROWS_AS(ConvexSet::box(vec({0}), vec({0, 1})), std::invalid_argument);
  CHECK_THROWS_AS(ConvexSet::ball(vec({0, 0}), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ConvexSet::ball(vec({0, 0}), -1.0), std::invalid_argument);
  CHECK_THROWS_AS(ConvexSet::simplex(0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ConvexSet::simplex(2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ConvexSet::halfspace(vec({0, 0}), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ConvexSet::affine_hyperplane(vec({0, 0}), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ConvexSet::whole_space(0), std::invalid_argument);

  const double nan = std::nan("");
  CHECK_THROWS_AS(ConvexSet::ball(vec({nan, 0}), 1.0), std::invalid_argument);
}

TEST_CASE("projection rejects malformed inputs") {
  const auto box = ConvexSet::box(vec({0, 0}), vec({1, 1}));
  CHECK_THROWS_AS(box.project(vec({1, 2, 3})), std::invalid_argument);
  CHECK_THROWS_AS(box.project(vec({std::nan(""), 0})), std::invalid_argument);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(box.project(vec({inf, 0})), std::invalid_argument);
}
