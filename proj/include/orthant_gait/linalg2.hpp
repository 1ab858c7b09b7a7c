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

#ifndef ORTHANT_GAIT_LINALG2_HPP_
#define ORTHANT_GAIT_LINALG2_HPP_

// Closed-form 2x2 linear algebra. Everything in the plant is two-dimensional,
// so there is no need for a general matrix library.

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace orthant_gait {

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline double det(const Mat2& m) { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }

inline Vec2 mul(const Mat2& m, const Vec2& v) {
  return {m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]};
}

inline Mat2 transpose(const Mat2& m) { return {{{m[0][0], m[1][0]}, {m[0][1], m[1][1]}}}; }

inline Vec2 operator+(const Vec2& a, const Vec2& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Vec2 operator-(const Vec2& a, const Vec2& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }

// Solves m x = rhs by the adjugate formula. Throws Error (a subclass of
// SingularMatrixError) when |det m| < min_det.
template <typename Error = SingularMatrixError>
Vec2 solve(const Mat2& m, const Vec2& rhs, double min_det, const char* what = "matrix") {
  const double d = det(m);
  if (!(std::abs(d) >= min_det)) {
    throw Error(std::string("singular ") + what + ": |det| = " + std::to_string(std::abs(d)));
  }
  return {(m[1][1] * rhs[0] - m[0][1] * rhs[1]) / d, (m[0][0] * rhs[1] - m[1][0] * rhs[0]) / d};
}

}  // namespace orthant_gait

#endif  // ORTHANT_GAIT_LINALG2_HPP_
