// Copyright 2026 The dpsvt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dpsvt/privacy_calc.h"

#include <cmath>
#include <limits>

#include "gtest/gtest.h"

namespace dpsvt {
namespace {

// Reference values below were evaluated independently in 50-digit arithmetic.

void ExpectRel(double actual, double expected, double tol = 1e-12) {
  EXPECT_LE(std::abs(actual - expected), tol * std::abs(expected))
      << "actual " << actual << " expected " << expected;
}

TEST(DeltaCapTest, Values) {
  ExpectRel(*DeltaCap(1, std::exp(-std::exp(1.0))), 2.718281828459045);
  ExpectRel(*DeltaCap(0.5, 0.01), 20.44996562367072);
  EXPECT_FALSE(DeltaCap(1, std::exp(-1.0)).ok());
  EXPECT_FALSE(DeltaCap(0, 0.1).ok());
  EXPECT_FALSE(DeltaCap(1, 1.0).ok());
}

TEST(XiBoundTest, Values) {
  ExpectRel(*XiBound(0.1, std::exp(-10.0), 10), 10.75);
  EXPECT_EQ(*XiBound(0, 0.01, 3), 0.0);
  EXPECT_FALSE(XiBound(0.1, 0.01, 0.5).ok());
  // k = ln(1/delta) gives at most 100 eps + 75 eps / ln(1/delta).
  const double eps = 0.03, delta = 1e-5, l = std::log(1 / delta);
  EXPECT_LE(*XiBound(eps, delta, l), 100 * eps + 75 * eps / l + 1e-15);
}

TEST(AdvancedCompositionTest, Values) {
  auto r = AdvancedComposition(0.1, 0.0, 1, std::exp(-2.0));
  ExpectRel(r->epsilon, 0.2105170918075648);
  ExpectRel(r->delta, std::exp(-2.0));
  r = AdvancedComposition(0.01, 1e-9, 100, std::exp(-8.0));
  ExpectRel(r->epsilon, 0.4100501670841681);
  ExpectRel(r->delta, 100e-9 + std::exp(-8.0));
  r = AdvancedComposition(0, 1e-6, 7, 1e-3);
  EXPECT_EQ(r->epsilon, 0.0);
  ExpectRel(r->delta, 7e-6 + 1e-3);
  EXPECT_FALSE(AdvancedComposition(0.1, 0, 0, 0.1).ok());
  EXPECT_FALSE(AdvancedComposition(0.1, 0, 1, 0).ok());
}

TEST(AdvancedCompositionTest, NeverBelowEpsilon) {
  for (double eps : {1e-4, 0.01, 0.5, 2.0}) {
    for (std::int64_t ell : {1, 2, 10, 1000}) {
      for (double dh : {std::exp(-0.5), 1e-3, 1e-12}) {
        EXPECT_GE(AdvancedComposition(eps, 0, ell, dh)->epsilon, eps);
      }
    }
  }
}

TEST(Epsilon0BoundTest, Values) {
  const double delta = std::exp(-10.0);
  auto r = Epsilon0Bound(0.01, delta, 100);
  EXPECT_EQ(EpochCount(delta, 100), 10);
  ExpectRel(r->epsilon, 35.95021947624806);
  ExpectRel(r->delta, 31 * delta);
  EXPECT_LE(r->delta, 3 * 100 * delta + delta);
  // Single epoch.
  r = Epsilon0Bound(0.1, delta, 10);
  EXPECT_EQ(EpochCount(delta, 10), 1);
  ExpectRel(r->epsilon, 10.75);
  ExpectRel(r->delta, 4 * delta);
}

TEST(Epsilon0BoundTest, MonotoneInKAndEpsilon) {
  const double delta = 1e-4;
  double last = 0;
  for (double k = 1; k <= 200; k += 1) {
    const double e = Epsilon0Bound(0.01, delta, k)->epsilon;
    EXPECT_GE(e, last) << k;
    last = e;
  }
  last = 0;
  for (double eps = 0.001; eps < 0.5; eps *= 1.3) {
    const double e = Epsilon0Bound(eps, delta, 30)->epsilon;
    EXPECT_GE(e, last);
    EXPECT_GE(*XiBound(eps, delta, 30), *XiBound(eps * 0.9, delta, 30));
    last = e;
  }
}

TEST(CalibrateMonitorTest, KFour) {
  auto p = CalibrateMonitor({1.0, 1e-6}, 4);
  ASSERT_TRUE(p.ok());
  ExpectRel(p->epsilon, 0.020879821340507, 1e-8);
  ExpectRel(p->delta, 1e-6 / 13);
  const auto back = Epsilon0Bound(p->epsilon, p->delta, 4);
  EXPECT_LE(back->epsilon, 1.0);
  EXPECT_GE(back->epsilon, 0.999999 * 1.0 - 1e-9);
  EXPECT_LE(back->delta, 1e-6);
}

TEST(CalibrateMonitorTest, RoundTrips) {
  for (double eps : {0.1, 1.0, 3.0}) {
    for (double delta : {1e-3, 1e-6, 1e-9}) {
      for (double k : {1.0, 2.0, 5.0, 40.0, 300.0}) {
        auto p = CalibrateMonitor({eps, delta}, k);
        ASSERT_TRUE(p.ok()) << eps << " " << delta << " " << k;
        const auto back = Epsilon0Bound(p->epsilon, p->delta, k);
        EXPECT_LE(back->epsilon, eps);
        EXPECT_GE(back->epsilon, eps * (1 - 1e-6));
        EXPECT_LE(back->delta, delta);
      }
    }
  }
}

TEST(CalibrateMonitorTest, Errors) {
  EXPECT_FALSE(CalibrateMonitor({0, 1e-6}, 3).ok());
  EXPECT_FALSE(CalibrateMonitor({1, 0}, 3).ok());
  EXPECT_FALSE(CalibrateMonitor({1, 1e-6}, 0).ok());
}

TEST(CalibrateEvolvingTest, KNine) {
  auto s = CalibrateEvolving({1.0, 1e-6}, 9, 100);
  ASSERT_TRUE(s.ok());
  ExpectRel(s->epsilon_tilde, 0.014548077287187, 1e-8);
  ExpectRel(s->scale1, *DeltaCap(s->epsilon_tilde, s->delta_tilde));
  ExpectRel(s->scale2, std::log(1 / s->delta_tilde) / s->epsilon_tilde);
  ExpectRel(s->scale1 / s->scale2,
            std::log(std::log(1 / s->delta_tilde) / s->epsilon_tilde));
  ExpectRel(s->scale1 / s->scale2, 7.0721614, 1e-6);
  EXPECT_LT(s->scale2, s->scale1);
}

TEST(CalibrateEvolvingTest, KOneMatchesMonitor) {
  auto s = CalibrateEvolving({0.5, 1e-4}, 1, 10);
  auto p = CalibrateMonitor({0.5, 1e-4}, 1);
  EXPECT_EQ(s->epsilon_tilde, p->epsilon);
  EXPECT_EQ(s->delta_tilde, p->delta);
  EXPECT_EQ(EpochCount(p->delta, 1), 1);
}

TEST(TauTest, Values) {
  ExpectRel(*Tau(1, 1, std::exp(-5.0), 10, 100, 0.01, 1), 57.56462732485114);
  ExpectRel(*Tau(12, 0.3, 1e-4, 50, 1000, 0.1, 2.5) /
                *Tau(3, 0.3, 1e-4, 50, 1000, 0.1, 2.5),
            2.0);
  const double r = *Tau(2, 1, 1e-3, 40, 77, 0.05, 1) / *Tau(2, 1, 1e-3, 20, 77, 0.05, 1);
  ExpectRel(r, std::log(2 * 20 * 77 / 0.05) / std::log(20 * 77 / 0.05));
  EXPECT_FALSE(Tau(0, 1, 0.1, 1, 1, 0.1, 1).ok());
  EXPECT_FALSE(Tau(1, 1, 0.1, 1, 1, 0.1, -1).ok());
}

}  // namespace
}  // namespace dpsvt
