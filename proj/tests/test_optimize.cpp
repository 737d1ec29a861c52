// Copyright 2026 The tcgp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "tcgp/box.hpp"
#include "tcgp/error.hpp"
#include "tcgp/optimize.hpp"
#include "tcgp/rng.hpp"

namespace {

using tcgp::Box;
using tcgp::Point;

Point vec(std::initializer_list<double> v) {
  Point p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) p[i++] = x;
  return p;
}

TEST(BoxTest, ValidatesAndQueries) {
  EXPECT_THROW(Box({0.0}, {0.0}), tcgp::InputError);
  EXPECT_THROW(Box({0.0, 1.0}, {1.0}), tcgp::InputError);
  const Box b({-1.0, 0.0}, {1.0, 4.0});
  EXPECT_EQ(b.dim(), 2u);
  EXPECT_DOUBLE_EQ(b.volume(), 8.0);
  EXPECT_TRUE(b.contains(vec({0.0, 4.0})));
  EXPECT_FALSE(b.contains(vec({1.1, 2.0})));
  EXPECT_EQ(b.clamp(vec({3.0, -1.0})), vec({1.0, 0.0}));
  EXPECT_EQ(b.to_unit(vec({0.0, 1.0})), vec({0.5, 0.25}));
}

TEST(BoxTest, ReflectStaysInside) {
  const Box b = Box::cube(3, -2.0, 3.0);
  tcgp::Rng rng(4);
  for (int k = 0; k < 1000; ++k) {
    Point x(3);
    for (int j = 0; j < 3; ++j) x[j] = rng.uniform(-40.0, 40.0);
    EXPECT_TRUE(b.contains(b.reflect(x)));
  }
  EXPECT_EQ(b.reflect(vec({3.5, -2.5, 0.0})), vec({2.5, -1.5, 0.0}));
}

TEST(BoxTest, SamplesInside) {
  const Box b({0.0, 10.0}, {1e-3, 11.0});
  tcgp::Rng rng(2);
  for (int k = 0; k < 1000; ++k) EXPECT_TRUE(b.contains(b.sample(rng)));
}

TEST(RngTest, DeterministicAndSplitIndependent) {
  tcgp::Rng a(123), b(123);
  for (int k = 0; k < 10; ++k) EXPECT_EQ(a.next_u64(), b.next_u64());
  tcgp::Rng c = a.split();
  tcgp::Rng d = b.split();
  EXPECT_EQ(c.uniform(), d.uniform());
  for (int k = 0; k < 1000; ++k) {
    const double u = a.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_GT(a.uniform_open(), 0.0);
    EXPECT_LT(a.index(7), 7u);
  }
}

TEST(NelderMead, FindsInteriorMinimum) {
  const Box b = Box::cube(2, -5.0, 5.0);
  auto f = [](const Point& x) { return (x[0] - 1.0) * (x[0] - 1.0) + 10.0 * (x[1] + 2.0) * (x[1] + 2.0); };
  tcgp::NelderMeadOptions o;
  o.max_evaluations = 2000;
  o.value_tolerance = 1e-14;
  const auto r = tcgp::nelder_mead(f, vec({4.0, 4.0}), b, o);
  EXPECT_NEAR(r.x[0], 1.0, 1e-4);
  EXPECT_NEAR(r.x[1], -2.0, 1e-4);
  EXPECT_LE(r.evaluations, 2000);
}

TEST(NelderMead, RespectsBoundsAtBoundaryMinimum) {
  const Box b = Box::cube(2, 0.0, 1.0);
  auto f = [](const Point& x) { return (x[0] + 3.0) * (x[0] + 3.0) + (x[1] - 0.5) * (x[1] - 0.5); };
  const auto r = tcgp::nelder_mead(f, vec({0.7, 0.2}), b, {1000, 1e-12, 1e-12, 0.1});
  EXPECT_TRUE(b.contains(r.x));
  EXPECT_NEAR(r.x[0], 0.0, 1e-6);
  EXPECT_NEAR(r.x[1], 0.5, 1e-3);
}

TEST(NelderMead, NeverWorseThanStart) {
  const Box b = Box::cube(1, -1.0, 1.0);
  auto f = [](const Point& x) { return x[0] > 0.2 ? std::numeric_limits<double>::quiet_NaN() : std::fabs(x[0] + 0.5); };
  const double start = f(vec({0.1}));
  const auto r = tcgp::nelder_mead(f, vec({0.1}), b);
  EXPECT_LE(r.value, start);
  EXPECT_TRUE(std::isfinite(r.value));
}

TEST(LocalMaximize, ClimbsToConcavePeak) {
  const Box b = Box::cube(3, -1.0, 1.0);
  auto f = [](const Point& x) { return -((x.array() - 0.3).square().sum()); };
  const auto r = tcgp::local_maximize(f, vec({-0.9, 0.9, 0.0}), b, {400, 1e-7, 0.05, 1e-12});
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(r.x[j], 0.3, 1e-4);
}

TEST(LocalMaximize, StaysInBoundsAndImproves) {
  const Box b = Box::cube(2, 0.0, 1.0);
  auto f = [](const Point& x) { return x[0] + 2.0 * x[1]; };
  const Point x0 = vec({0.5, 0.5});
  const auto r = tcgp::local_maximize(f, x0, b);
  EXPECT_TRUE(b.contains(r.x));
  EXPECT_GE(r.value, f(x0));
}

}  // namespace
