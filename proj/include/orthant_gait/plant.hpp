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

#ifndef ORTHANT_GAIT_PLANT_HPP_
#define ORTHANT_GAIT_PLANT_HPP_

// Compass-gait walker: two point-mass legs joined at a hip point mass,
// pinned at the stance foot.
//
// Kinematic convention (both angles measured from the upright):
//   hip        = stance_foot + l * (-sin(theta1),  cos(theta1))
//   swing_foot = hip         + l * ( sin(theta2), -cos(theta2))
// With this choice forward progress (+x) has dtheta1 <= 0, and after a heel
// strike the new stance angle is positive.

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "orthant_gait/linalg2.hpp"

namespace orthant_gait {

class SingularMassError : public SingularMatrixError {
 public:
  using SingularMatrixError::SingularMatrixError;
};

class SingularImpactError : public SingularMatrixError {
 public:
  using SingularMatrixError::SingularMatrixError;
};

struct WalkerParams {
  double hip_mass = 1.0;    // m_H [kg]
  double leg_mass = 0.5;    // m [kg]
  double a = 0.5;           // foot to leg mass [m]
  double b = 0.5;           // leg mass to hip [m]
  double leg_length = 1.0;  // l = a + b [m]
  double gravity = 9.81;    // [m/s^2]

  // Builds a parameter set with leg_length derived from a + b.
  static WalkerParams make(double hip_mass, double leg_mass, double a, double b,
                           double gravity = 9.81) {
    WalkerParams p{hip_mass, leg_mass, a, b, a + b, gravity};
    p.validate();
    return p;
  }

  // Throws std::invalid_argument unless all quantities are positive and finite
  // and leg_length == a + b.
  void validate() const {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(hip_mass) || !positive(leg_mass) || !positive(a) || !positive(b) ||
        !positive(gravity) || !positive(leg_length)) {
      throw std::invalid_argument("walker parameters must be positive and finite");
    }
    if (leg_length != a + b) {
      throw std::invalid_argument("leg_length must equal a + b");
    }
  }
};

struct WalkerState {
  double theta1 = 0.0;   // stance leg angle from upright [rad]
  double theta2 = 0.0;   // swing leg angle from upright [rad]
  double dtheta1 = 0.0;  // [rad/s]
  double dtheta2 = 0.0;  // [rad/s]
  // World x of the pinned stance foot. Changes only at impacts.
  double stance_foot_x = 0.0;

  std::array<double, 4> phase() const { return {theta1, theta2, dtheta1, dtheta2}; }
  Vec2 angles() const { return {theta1, theta2}; }
  Vec2 rates() const { return {dtheta1, dtheta2}; }

  bool finite() const {
    return std::isfinite(theta1) && std::isfinite(theta2) && std::isfinite(dtheta1) &&
           std::isfinite(dtheta2) && std::isfinite(stance_foot_x);
  }

  friend bool operator==(const WalkerState&, const WalkerState&) = default;
};

struct HipPose {
  double px = 0.0;
  double py = 0.0;
  double vx = 0.0;
  double vy = 0.0;
};

struct SwingFootPose {
  double x = 0.0;
  double y = 0.0;
  double vy = 0.0;
};

// u1 acts at the hip, u2 at the ankle.
struct Control {
  double u1 = 0.0;
  double u2 = 0.0;

  friend bool operator==(const Control&, const Control&) = default;
};

struct ImpactEvent {
  double alpha = 0.0;  // inter-leg angle theta1^- - theta2^-
  WalkerState pre_state;
  WalkerState post_state;
  double time = 0.0;
};

inline constexpr double kMassDetMin = 1e-12;
inline constexpr double kImpactDetMin = 1e-10;

inline Mat2 mass_matrix(const WalkerParams& p, const WalkerState& s) {
  const double l = p.leg_length;
  const double m = p.leg_mass;
  const double off = -m * p.b * l * std::cos(s.theta1 - s.theta2);
  return {{{p.hip_mass * l * l + m * p.a * p.a + m * l * l, off}, {off, m * p.b * p.b}}};
}

inline Mat2 coriolis_matrix(const WalkerParams& p, const WalkerState& s) {
  const double k = p.leg_mass * p.b * p.leg_length * std::sin(s.theta1 - s.theta2);
  return {{{0.0, -k * s.dtheta2}, {k * s.dtheta1, 0.0}}};
}

inline Vec2 gravity_vector(const WalkerParams& p, const WalkerState& s) {
  const double l = p.leg_length;
  const double m = p.leg_mass;
  return {-p.gravity * (p.hip_mass * l + m * p.a + m * l) * std::sin(s.theta1),
          p.gravity * m * p.b * std::sin(s.theta2)};
}

// S u with S = [[1, 1], [0, -1]].
inline Vec2 actuation(const Control& u) { return {u.u1 + u.u2, -u.u2}; }

// Solves M(theta) ddtheta = S u - C(theta, dtheta) dtheta - g(theta).
inline Vec2 accelerations(const WalkerParams& p, const WalkerState& s, const Control& u) {
  const Vec2 rhs = actuation(u) - mul(coriolis_matrix(p, s), s.rates()) - gravity_vector(p, s);
  return solve<SingularMassError>(mass_matrix(p, s), rhs, kMassDetMin, "mass matrix");
}

inline HipPose hip_pose(const WalkerParams& p, const WalkerState& s) {
  const double l = p.leg_length;
  const double c1 = std::cos(s.theta1);
  const double s1 = std::sin(s.theta1);
  return {s.stance_foot_x - l * s1, l * c1, -l * c1 * s.dtheta1, -l * s1 * s.dtheta1};
}

inline SwingFootPose swing_foot_pose(const WalkerParams& p, const WalkerState& s) {
  const HipPose hip = hip_pose(p, s);
  const double l = p.leg_length;
  return {hip.px + l * std::sin(s.theta2), hip.py - l * std::cos(s.theta2),
          hip.vy + l * std::sin(s.theta2) * s.dtheta2};
}

// Heel strike: swing foot ahead of the stance foot by more than eps_front,
// at or below the ground, and moving down.
inline bool contact_predicate(const WalkerParams& p, const WalkerState& s, double eps_front) {
  const SwingFootPose f = swing_foot_pose(p, s);
  return f.x - s.stance_foot_x > eps_front && f.y <= 0.0 && f.vy < 0.0;
}

struct ImpactMatrices {
  Mat2 post;  // T+(alpha), acts on post-impact rates
  Mat2 pre;   // T-(alpha), acts on pre-impact rates
};

inline ImpactMatrices impact_matrices(const WalkerParams& p, double alpha) {
  const double l = p.leg_length;
  const double m = p.leg_mass;
  const double a = p.a;
  const double b = p.b;
  const double mh = p.hip_mass;
  const double c = std::cos(alpha);
  ImpactMatrices t;
  t.post = {{{mh * l * l + m * a * a + m * l * (l - b * c), m * b * (b - l * c)},
             {-m * b * l * c, m * b * b}}};
  t.pre = {{{(mh * l * l + 2.0 * m * a * l) * c - m * a * b, -m * a * b}, {-m * a * b, 0.0}}};
  return t;
}

// Perfectly inelastic heel strike. The legs swap roles; the new rates solve
// T+(alpha) dtheta+ = T-(alpha) dtheta-. The stance foot advances by the
// stride so the hip x position is continuous.
inline ImpactEvent impact_map(const WalkerParams& p, const WalkerState& pre, double time = 0.0) {
  const double alpha = pre.theta1 - pre.theta2;
  const ImpactMatrices t = impact_matrices(p, alpha);
  const Vec2 rates = solve<SingularImpactError>(t.post, mul(t.pre, pre.rates()), kImpactDetMin,
                                                "impact matrix");
  const double stride = swing_foot_pose(p, pre).x - pre.stance_foot_x;
  WalkerState post{pre.theta2, pre.theta1, rates[0], rates[1], pre.stance_foot_x + stride};
  return {alpha, pre, post, time};
}

inline double kinetic_energy(const WalkerParams& p, const WalkerState& s) {
  const Vec2 w = s.rates();
  return 0.5 * dot(w, mul(mass_matrix(p, s), w));
}

// Antiderivative of gravity_vector, so that gravity_vector = grad U.
inline double potential_energy(const WalkerParams& p, const WalkerState& s) {
  const double l = p.leg_length;
  const double m = p.leg_mass;
  return p.gravity *
         ((p.hip_mass * l + m * p.a + m * l) * std::cos(s.theta1) - m * p.b * std::cos(s.theta2));
}

inline double total_energy(const WalkerParams& p, const WalkerState& s) {
  return kinetic_energy(p, s) + potential_energy(p, s);
}

// Classic RK4 on the smooth (between-impact) dynamics with constant torque.
inline WalkerState rk4_step(const WalkerParams& p, const WalkerState& s, const Control& u,
                            double h) {
  using Phase = std::array<double, 4>;
  auto deriv = [&](const Phase& x) -> Phase {
    WalkerState tmp{x[0], x[1], x[2], x[3], s.stance_foot_x};
    const Vec2 acc = accelerations(p, tmp, u);
    return {x[2], x[3], acc[0], acc[1]};
  };
  auto axpy = [](const Phase& x, double k, const Phase& d) -> Phase {
    return {x[0] + k * d[0], x[1] + k * d[1], x[2] + k * d[2], x[3] + k * d[3]};
  };
  const Phase x0 = s.phase();
  const Phase k1 = deriv(x0);
  const Phase k2 = deriv(axpy(x0, 0.5 * h, k1));
  const Phase k3 = deriv(axpy(x0, 0.5 * h, k2));
  const Phase k4 = deriv(axpy(x0, h, k3));
  Phase out;
  for (int i = 0; i < 4; ++i) out[i] = x0[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return {out[0], out[1], out[2], out[3], s.stance_foot_x};
}

}  // namespace orthant_gait

#endif  // ORTHANT_GAIT_PLANT_HPP_
