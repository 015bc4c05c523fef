// Copyright 2026 The absmbd Authors
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

#ifndef ABSMBD_MODEL_HPP_
#define ABSMBD_MODEL_HPP_

#include <string>
#include <vector>

#include "absmbd/so3.hpp"

namespace absmbd {

// f(t) for a scalar constraint. Cosine: c0 + c1 cos(omega t + phi0).
// With `angle` set the cosine expression is an angle alpha(t) and the driver
// value is cos(alpha(t)); used to prescribe the angle between two unit
// vectors through a dot-product constraint.
struct DriverFn {
  enum class Kind { kConstant, kCosine };
  Kind kind = Kind::kConstant;
  double c = 0.0;
  double c0 = 0.0;
  double c1 = 0.0;
  double omega = 0.0;
  double phi0 = 0.0;
  bool angle = false;

  static DriverFn constant(double value);
  static DriverFn cosine(double c0, double c1, double omega, double phi0, bool angle = false);

  bool operator==(const DriverFn&) const = default;
};

struct DriverValue {
  double f;
  double f_dot;
  double f_ddot;
};

DriverValue eval_driver(const DriverFn& d, double t);

enum class GconKind { kDP1, kDP2, kD, kCD };
enum class JointKind { kSJ, kUJ, kCJ, kRJ, kTJ };

const char* to_string(GconKind k);
const char* to_string(JointKind k);

// One scalar constraint between bodies i and j (ids; 0 is ground).
// Vectors a_i, a_j, s_p, s_q are body-local; c is global.
//   DP1: a_i' A_i' A_j a_j - f
//   DP2: a_i' A_i' d_ij - f
//   D:   d_ij' d_ij - f
//   CD:  c' d_ij - f
// with d_ij = r_j + A_j s_q - r_i - A_i s_p.
struct GconSpec {
  GconKind kind = GconKind::kDP1;
  int body_i = 0;
  int body_j = 0;
  Vec3 a_i = Vec3::Zero();
  Vec3 a_j = Vec3::Zero();
  Vec3 s_p = Vec3::Zero();
  Vec3 s_q = Vec3::Zero();
  Vec3 c = Vec3::Zero();
  DriverFn driver;
  // Provenance for diagnostics, e.g. "constraints[2](RJ)".
  std::string label;

  bool operator==(const GconSpec&) const = default;
};

// Local geometry of a joint between bodies i and j.
//   s_p, s_q: joint point on i and on j.
//   a_i, b_i: two non-colinear vectors on i spanning the plane normal to the
//             joint axis (RJ, CJ, TJ); a_i alone is the cross arm for UJ.
//   c_j:      joint axis on j (RJ, CJ, TJ) or second cross arm (UJ).
//   d_j:      TJ only; vector on j kept normal to a_i, blocks rotation about
//             the axis.
struct JointGeometry {
  int body_i = 0;
  int body_j = 0;
  Vec3 s_p = Vec3::Zero();
  Vec3 s_q = Vec3::Zero();
  Vec3 a_i = Vec3::Zero();
  Vec3 b_i = Vec3::Zero();
  Vec3 c_j = Vec3::Zero();
  Vec3 d_j = Vec3::Zero();
};

// SJ: 3 CD. UJ: 3 CD + 1 DP1. RJ: 3 CD + 2 DP1. CJ: 2 DP1 + 2 DP2.
// TJ: 3 DP1 + 2 DP2. Throws ModelError on degenerate geometry.
std::vector<GconSpec> expand_joint(JointKind kind, const JointGeometry& g,
                                   const std::string& label = {});

struct Body {
  int id = 1;
  std::string name;
  double mass = 1.0;
  // Diagonal of the body-frame inertia tensor.
  Vec3 inertia = Vec3::Ones();
  Vec3 r0 = Vec3::Zero();
  Mat3 A0 = Mat3::Identity();
  Vec3 rdot0 = Vec3::Zero();
  Vec3 omega_bar0 = Vec3::Zero();
  // Constant applied loads: force in the global frame, torque in the body frame.
  Vec3 force = Vec3::Zero();
  Vec3 torque_bar = Vec3::Zero();

  bool operator==(const Body&) const = default;
};

struct GconCounts {
  int dp1 = 0;
  int dp2 = 0;
  int d = 0;
  int cd = 0;
  bool operator==(const GconCounts&) const = default;
};

struct MechanismModel {
  std::string name;
  Vec3 gravity = Vec3(0.0, 0.0, -9.81);
  std::vector<Body> bodies;
  std::vector<GconSpec> gcons;

  int nb() const { return static_cast<int>(bodies.size()); }
  int nc() const { return static_cast<int>(gcons.size()); }
  bool fully_driven() const { return nc() == 6 * nb(); }
  // Position of body `id` in `bodies`, -1 for ground. Throws ModelError for
  // unknown ids.
  int body_index(int id) const;
  GconCounts counts() const;

  bool operator==(const MechanismModel&) const = default;
};

// Checks the invariants that load_model enforces; throws ModelError.
void validate_model(const MechanismModel& m);

}  // namespace absmbd

#endif  // ABSMBD_MODEL_HPP_
