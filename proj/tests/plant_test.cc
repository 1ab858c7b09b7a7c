// Copyright 2026 The orthant_gait Authors
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

// Tests for the compass-walker dynamics, kinematics and impact map.

#include "orthant_gait/plant.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

namespace orthant_gait {
namespace {

constexpr double kPi = std::numbers::pi;

WalkerState random_state(std::mt19937_64& rng, double angle = kPi, double rate = 5.0) {
  std::uniform_real_distribution<double> a(-angle, angle), r(-rate, rate);
  return {a(rng), a(rng), r(rng), r(rng), 0.0};
}

// Cramer's rule, written out independently of linalg2.
Vec2 cramer(const Mat2& m, const Vec2& rhs) {
  const double d = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  const double x0 = (rhs[0] * m[1][1] - m[0][1] * rhs[1]) / d;
  const double x1 = (m[0][0] * rhs[1] - rhs[0] * m[1][0]) / d;
  return {x0, x1};
}

TEST(WalkerParamsTest, DefaultsAreTableValues) {
  WalkerParams p;
  EXPECT_EQ(p.hip_mass, 1.0);
  EXPECT_EQ(p.leg_mass, 0.5);
  EXPECT_EQ(p.a, 0.5);
  EXPECT_EQ(p.b, 0.5);
  EXPECT_EQ(p.leg_length, 1.0);
  EXPECT_EQ(p.gravity, 9.81);
  EXPECT_NO_THROW(p.validate());
}

TEST(WalkerParamsTest, RejectsInconsistentLegLength) {
  WalkerParams p;
  p.leg_length = 1.1;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = WalkerParams{};
  p.leg_mass = 0.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = WalkerParams{};
  p.gravity = -9.81;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  EXPECT_EQ(WalkerParams::make(2.0, 1.0, 0.25, 0.5).leg_length, 0.75);
}

TEST(MassMatrixTest, AlignedLegs) {
  const Mat2 m = mass_matrix({}, {0.3, 0.3, 0.0, 0.0});
  EXPECT_DOUBLE_EQ(m[0][0], 1.625);
  EXPECT_DOUBLE_EQ(m[0][1], -0.25);
  EXPECT_DOUBLE_EQ(m[1][0], -0.25);
  EXPECT_DOUBLE_EQ(m[1][1], 0.125);
}

TEST(MassMatrixTest, OffDiagonalVanishesAtRightAngle) {
  const Mat2 m = mass_matrix({}, {kPi / 2, 0.0, 0.0, 0.0});
  EXPECT_NEAR(m[0][1], 0.0, 1e-15);
  EXPECT_NEAR(m[1][0], 0.0, 1e-15);
}

TEST(MassMatrixTest, SymmetricPositiveDefinite) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 10000; ++i) {
    const Mat2 m = mass_matrix({}, random_state(rng));
    ASSERT_EQ(m[0][1], m[1][0]);
    // Eigenvalues of a symmetric 2x2 are positive iff trace > 0 and det > 0.
    const double tr = m[0][0] + m[1][1];
    const double d = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    const double disc = std::sqrt(0.25 * tr * tr - d);
    ASSERT_GT(0.5 * tr - disc, 0.0);
  }
}

TEST(CoriolisTest, ZeroForAlignedLegs) {
  const Mat2 c = coriolis_matrix({}, {0.4, 0.4, 3.0, -2.0});
  for (const auto& row : c) {
    for (double v : row) EXPECT_EQ(v, 0.0);
  }
}

TEST(CoriolisTest, RightAngleExample) {
  const Mat2 c = coriolis_matrix({}, {kPi / 2, 0.0, 1.0, 2.0});
  EXPECT_EQ(c[0][0], 0.0);
  EXPECT_EQ(c[1][1], 0.0);
  EXPECT_NEAR(c[0][1], -0.5, 1e-15);
  EXPECT_NEAR(c[1][0], 0.25, 1e-15);
}

TEST(CoriolisTest, MdotMinusTwoCIsSkewSymmetric) {
  std::mt19937_64 rng(2);
  const WalkerParams p;
  const double h = 1e-6;
  for (int i = 0; i < 1000; ++i) {
    const WalkerState s = random_state(rng);
    // d/dt M(theta(t)) by central differences along theta' = dtheta.
    WalkerState fwd = s, bwd = s;
    fwd.theta1 += h * s.dtheta1;
    fwd.theta2 += h * s.dtheta2;
    bwd.theta1 -= h * s.dtheta1;
    bwd.theta2 -= h * s.dtheta2;
    const Mat2 mf = mass_matrix(p, fwd), mb = mass_matrix(p, bwd), c = coriolis_matrix(p, s);
    Mat2 n;
    for (int r = 0; r < 2; ++r) {
      for (int k = 0; k < 2; ++k) n[r][k] = (mf[r][k] - mb[r][k]) / (2 * h) - 2 * c[r][k];
    }
    for (int r = 0; r < 2; ++r) {
      for (int k = 0; k < 2; ++k) ASSERT_LT(std::abs(n[r][k] + n[k][r]), 1e-6);
    }
  }
}

TEST(GravityTest, UprightIsZero) {
  const Vec2 g = gravity_vector({}, {0.0, 0.0, 0.0, 0.0});
  EXPECT_EQ(g[0], 0.0);
  EXPECT_EQ(g[1], 0.0);
}

TEST(GravityTest, HorizontalStanceLeg) {
  // -9.81 * (1*1 + 0.5*0.5 + 0.5*1) * sin(pi/2)
  const Vec2 g = gravity_vector({}, {kPi / 2, 0.0, 0.0, 0.0});
  EXPECT_NEAR(g[0], -17.1675, 1e-12);
  EXPECT_EQ(g[1], 0.0);
}

TEST(GravityTest, IsGradientOfPotential) {
  std::mt19937_64 rng(3);
  const WalkerParams p;
  const double h = 1e-6;
  auto potential = [&p](double t1, double t2) {
    return p.gravity * (1.75 * std::cos(t1) - 0.25 * std::cos(t2));
  };
  for (int i = 0; i < 1000; ++i) {
    const WalkerState s = random_state(rng);
    const Vec2 g = gravity_vector(p, s);
    const double d1 = (potential(s.theta1 + h, s.theta2) - potential(s.theta1 - h, s.theta2)) / (2 * h);
    const double d2 = (potential(s.theta1, s.theta2 + h) - potential(s.theta1, s.theta2 - h)) / (2 * h);
    ASSERT_NEAR(g[0], d1, 1e-6);
    ASSERT_NEAR(g[1], d2, 1e-6);
    ASSERT_NEAR(potential_energy(p, s), potential(s.theta1, s.theta2), 1e-12);
  }
}

TEST(ActuationTest, ColumnsOfS) {
  Vec2 v = actuation({1.0, 0.0});
  EXPECT_EQ(v[0], 1.0);
  EXPECT_EQ(v[1], 0.0);
  v = actuation({0.0, 1.0});
  EXPECT_EQ(v[0], 1.0);
  EXPECT_EQ(v[1], -1.0);
  v = actuation({2.0, -3.0});
  EXPECT_EQ(v[0], -1.0);
  EXPECT_EQ(v[1], 3.0);
}

TEST(AccelerationsTest, UprightEquilibrium) {
  const Vec2 a = accelerations({}, {0.0, 0.0, 0.0, 0.0}, {});
  EXPECT_EQ(a[0], 0.0);
  EXPECT_EQ(a[1], 0.0);
}

TEST(AccelerationsTest, MatchesCramerOracle) {
  const WalkerParams p;
  const WalkerState s{0.1, -0.1, 0.0, 0.0, 0.0};
  // Hand-built system: M from the closed form, rhs = -g (no velocity, no torque).
  const double c = std::cos(0.2);
  const Mat2 m{{{1.625, -0.25 * c}, {-0.25 * c, 0.125}}};
  const Vec2 rhs{9.81 * 1.75 * std::sin(0.1), -9.81 * 0.25 * std::sin(-0.1)};
  const Vec2 expected = cramer(m, rhs);
  const Vec2 got = accelerations(p, s, {});
  EXPECT_NEAR(got[0], expected[0], 1e-12);
  EXPECT_NEAR(got[1], expected[1], 1e-12);

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int i = 0; i < 1000; ++i) {
    const WalkerState r = random_state(rng);
    const Control ctl{u(rng), u(rng)};
    const Vec2 w = r.rates();
    const Mat2 mm = mass_matrix(p, r);
    const Mat2 cc = coriolis_matrix(p, r);
    const Vec2 gg = gravity_vector(p, r);
    const Vec2 b{ctl.u1 + ctl.u2 - cc[0][0] * w[0] - cc[0][1] * w[1] - gg[0],
                 -ctl.u2 - cc[1][0] * w[0] - cc[1][1] * w[1] - gg[1]};
    const Vec2 e = cramer(mm, b);
    const Vec2 g2 = accelerations(p, r, ctl);
    ASSERT_NEAR(g2[0], e[0], 1e-9 * (1 + std::abs(e[0])));
    ASSERT_NEAR(g2[1], e[1], 1e-9 * (1 + std::abs(e[1])));
  }
}

TEST(AccelerationsTest, UnforcedPowerBalance) {
  // dE/dt = w'M a + 0.5 w'Mdot w + w'g = 0 when u = 0.
  std::mt19937_64 rng(5);
  const WalkerParams p;
  for (int i = 0; i < 1000; ++i) {
    const WalkerState s = random_state(rng);
    const Vec2 w = s.rates();
    const Vec2 a = accelerations(p, s, {});
    const Mat2 m = mass_matrix(p, s);
    const double md12 = 0.25 * std::sin(s.theta1 - s.theta2) * (w[0] - w[1]);
    const double power = dot(w, mul(m, a)) + 0.5 * (2 * md12 * w[0] * w[1]) +
                         dot(w, gravity_vector(p, s));
    ASSERT_NEAR(power, 0.0, 1e-9);
  }
}

TEST(AccelerationsTest, SingularMassIsReported) {
  WalkerParams p;
  p.leg_mass = 1e-300;  // validate() is not run here on purpose
  EXPECT_THROW(accelerations(p, {0.1, 0.1, 0.0, 0.0}, {}), SingularMassError);
}

TEST(HipPoseTest, Examples) {
  const WalkerParams p;
  HipPose h = hip_pose(p, {0.0, 0.0, 0.0, 0.0, 0.0});
  EXPECT_EQ(h.px, 0.0);
  EXPECT_EQ(h.py, 1.0);
  h = hip_pose(p, {kPi / 2, 0.0, 0.0, 0.0, 0.0});
  EXPECT_NEAR(h.py, 0.0, 1e-15);
  EXPECT_LE(h.py, p.leg_length);
}

TEST(HipPoseTest, ForwardWhenStanceRotatesBackward) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> ang(-kPi / 2 + 1e-6, kPi / 2 - 1e-6), rate(-5.0, 0.0);
  for (int i = 0; i < 10000; ++i) {
    const WalkerState s{ang(rng), ang(rng), rate(rng), 0.0, 0.0};
    const HipPose h = hip_pose({}, s);
    ASSERT_GE(h.vx, 0.0);
    ASSERT_LE(h.py, 1.0);
  }
}

TEST(HipPoseTest, VelocityMatchesFiniteDifference) {
  std::mt19937_64 rng(7);
  const WalkerParams p;
  const double h = 1e-6;
  for (int i = 0; i < 200; ++i) {
    const WalkerState s = random_state(rng);
    WalkerState f = s, b = s;
    f.theta1 += h * s.dtheta1;
    f.theta2 += h * s.dtheta2;
    b.theta1 -= h * s.dtheta1;
    b.theta2 -= h * s.dtheta2;
    const HipPose hp = hip_pose(p, s);
    EXPECT_NEAR(hp.vx, (hip_pose(p, f).px - hip_pose(p, b).px) / (2 * h), 1e-6);
    EXPECT_NEAR(hp.vy, (hip_pose(p, f).py - hip_pose(p, b).py) / (2 * h), 1e-6);
    EXPECT_NEAR(swing_foot_pose(p, s).vy,
                (swing_foot_pose(p, f).y - swing_foot_pose(p, b).y) / (2 * h), 1e-6);
  }
}

TEST(SwingFootTest, Examples) {
  const WalkerParams p;
  SwingFootPose f = swing_foot_pose(p, {0.3, 0.3, 0.0, 0.0, 2.0});
  EXPECT_NEAR(f.x, 2.0, 1e-15);
  EXPECT_NEAR(f.y, 0.0, 1e-15);

  f = swing_foot_pose(p, {-0.25, 0.25, 0.0, 0.0, 1.0});
  EXPECT_EQ(f.y, 0.0);
  EXPECT_NEAR(f.x, 1.0 + 2 * std::sin(0.25), 1e-15);

  f = swing_foot_pose(p, {0.2, 0.3, 0.0, 0.0, 0.0});
  EXPECT_NEAR(f.y, 0.0247300887, 1e-9);
}

TEST(ContactTest, SymmetricStanceDescending) {
  const WalkerParams p;
  const WalkerState s{-0.2, 0.2, -1.0, -0.5, 0.0};
  ASSERT_LT(swing_foot_pose(p, s).vy, 0.0);
  EXPECT_TRUE(contact_predicate(p, s, 1e-3));
}

TEST(ContactTest, SwingFootBehindNeverContacts) {
  const WalkerParams p;
  // theta2 < theta1 puts the swing foot behind; try several heights.
  for (double t2 : {-0.6, -0.3, 0.0, 0.1}) {
    const WalkerState s{0.2, t2, -1.0, -3.0, 0.0};
    ASSERT_LT(swing_foot_pose(p, s).x, s.stance_foot_x);
    EXPECT_FALSE(contact_predicate(p, s, 1e-3));
  }
}

TEST(ContactTest, DescendingAboveGroundIsNoContact) {
  const WalkerParams p;
  const WalkerState s{-0.1, 0.3, -1.0, -1.0, 0.0};
  ASSERT_GT(swing_foot_pose(p, s).y, 0.0);
  ASSERT_LT(swing_foot_pose(p, s).vy, 0.0);
  EXPECT_FALSE(contact_predicate(p, s, 1e-3));
}

TEST(ContactTest, MonotoneInHeight) {
  // Lowering the foot (raising |theta1| with theta2 fixed, keeping the foot in
  // front and descending) never turns a contact off.
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> t2d(0.05, 0.8), extra(0.0, 0.3);
  const WalkerParams p;
  for (int i = 0; i < 2000; ++i) {
    const double t2 = t2d(rng);
    WalkerState s{-t2 - 1e-9, t2, -1.0, -1.0, 0.0};
    if (!contact_predicate(p, s, 1e-3)) continue;
    WalkerState lower = s;
    lower.theta1 = -(t2 + extra(rng));
    if (swing_foot_pose(p, lower).vy >= 0.0 || swing_foot_pose(p, lower).x <= 1e-3) continue;
    ASSERT_LE(swing_foot_pose(p, lower).y, swing_foot_pose(p, s).y);
    ASSERT_TRUE(contact_predicate(p, lower, 1e-3));
  }
}

TEST(ImpactTest, MatricesAtZeroAngle) {
  const ImpactMatrices t = impact_matrices({}, 0.0);
  EXPECT_DOUBLE_EQ(t.post[0][0], 1.375);
  EXPECT_DOUBLE_EQ(t.post[0][1], -0.125);
  EXPECT_DOUBLE_EQ(t.post[1][0], -0.25);
  EXPECT_DOUBLE_EQ(t.post[1][1], 0.125);
  EXPECT_DOUBLE_EQ(t.pre[0][0], 1.375);
  EXPECT_DOUBLE_EQ(t.pre[0][1], -0.125);
  EXPECT_DOUBLE_EQ(t.pre[1][0], -0.125);
  EXPECT_DOUBLE_EQ(t.pre[1][1], 0.0);
}

TEST(ImpactTest, ZeroAngleRatesMatchCramer) {
  const ImpactEvent e = impact_map({}, {0.0, 0.0, 1.0, 0.0, 0.0});
  // T+ x = T- (1, 0) = (1.375, -0.125), solved by hand: x = (10/9, 11/9).
  EXPECT_NEAR(e.post_state.dtheta1, 10.0 / 9.0, 1e-14);
  EXPECT_NEAR(e.post_state.dtheta2, 11.0 / 9.0, 1e-14);
  EXPECT_EQ(e.alpha, 0.0);
}

// Angular momentum of the whole walker about the new contact point, and of
// the trailing leg about the hip, from Cartesian positions and velocities.
struct Momenta {
  double about_contact;
  double trailing_about_hip;
};

Momenta cartesian_momenta(const WalkerParams& p, const WalkerState& s, bool pre_impact) {
  const double l = p.leg_length, a = p.a, b = p.b, m = p.leg_mass;
  auto cross = [](double rx, double ry, double vx, double vy) { return rx * vy - ry * vx; };
  const double fx = s.stance_foot_x;
  const double hx = fx - l * std::sin(s.theta1), hy = l * std::cos(s.theta1);
  const double hvx = -l * std::cos(s.theta1) * s.dtheta1, hvy = -l * std::sin(s.theta1) * s.dtheta1;
  const double sx = fx - a * std::sin(s.theta1), sy = a * std::cos(s.theta1);
  const double svx = -a * std::cos(s.theta1) * s.dtheta1, svy = -a * std::sin(s.theta1) * s.dtheta1;
  const double wx = hx + b * std::sin(s.theta2), wy = hy - b * std::cos(s.theta2);
  const double wvx = hvx + b * std::cos(s.theta2) * s.dtheta2;
  const double wvy = hvy + b * std::sin(s.theta2) * s.dtheta2;
  const double swing_x = hx + l * std::sin(s.theta2);
  // Pre-impact the contact is the swing foot; post-impact it is the stance foot.
  const double cx = pre_impact ? swing_x : fx;
  Momenta out{};
  out.about_contact = p.hip_mass * cross(hx - cx, hy, hvx, hvy) + m * cross(sx - cx, sy, svx, svy) +
                      m * cross(wx - cx, wy, wvx, wvy);
  // Trailing leg: stance leg before impact, swing leg after.
  out.trailing_about_hip = pre_impact ? m * cross(sx - hx, sy - hy, svx, svy)
                                      : m * cross(wx - hx, wy - hy, wvx, wvy);
  return out;
}

TEST(ImpactTest, ConservesAngularMomentaAndSwapsAngles) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> ang(0.05, 0.6), rate(-3.0, 3.0);
  const WalkerParams p;
  for (int i = 0; i < 1000; ++i) {
    const double t = ang(rng);
    const WalkerState pre{-t, t, rate(rng), rate(rng), 0.7};
    const ImpactEvent e = impact_map(p, pre);
    ASSERT_EQ(e.post_state.theta1, pre.theta2);
    ASSERT_EQ(e.post_state.theta2, pre.theta1);
    ASSERT_EQ(e.alpha, pre.theta1 - pre.theta2);
    const Momenta before = cartesian_momenta(p, pre, true);
    const Momenta after = cartesian_momenta(p, e.post_state, false);
    ASSERT_NEAR(before.about_contact, after.about_contact, 1e-12);
    ASSERT_NEAR(before.trailing_about_hip, after.trailing_about_hip, 1e-12);
    // Residual of the defining equation.
    const ImpactMatrices tm = impact_matrices(p, e.alpha);
    const Vec2 res = mul(tm.post, e.post_state.rates()) - mul(tm.pre, pre.rates());
    ASSERT_LT(std::hypot(res[0], res[1]), 1e-10);
    // Hip position is continuous.
    ASSERT_NEAR(hip_pose(p, pre).px, hip_pose(p, e.post_state).px, 1e-12);
  }
}

TEST(EnergyTest, UprightRestingEnergy) {
  EXPECT_NEAR(total_energy({}, {0.0, 0.0, 0.0, 0.0}), 14.715, 1e-12);
}

TEST(EnergyTest, UnactuatedFlowConservesEnergy) {
  const WalkerParams p;
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 5; ++trial) {
    WalkerState s = random_state(rng, 0.5, 2.0);
    const double e0 = total_energy(p, s);
    double worst = 0.0;
    for (int k = 0; k < 2000; ++k) {
      s = rk4_step(p, s, {}, 1e-3);
      worst = std::max(worst, std::abs(total_energy(p, s) - e0) / std::abs(e0));
    }
    EXPECT_LT(worst, 1e-8) << "trial " << trial;
  }
}

}  // namespace
}  // namespace orthant_gait
