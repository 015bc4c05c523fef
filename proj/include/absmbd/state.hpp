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

#ifndef ABSMBD_STATE_HPP_
#define ABSMBD_STATE_HPP_

#include <string>
#include <vector>

#include "absmbd/model.hpp"

namespace absmbd {

enum class Formulation { kRA, kRP, kREps };

const char* to_string(Formulation f);
// Accepts "rA", "rp", "reps".
Formulation parse_formulation(const std::string& s);

// Per-body state. The formulation's native orientation coordinates are
// authoritative (A | p | eps and their rates); A, omega_bar and
// omega_bar_dot are kept in sync for every formulation so that results can
// be compared and written without conversion.
struct BodyDynState {
  Vec3 r = Vec3::Zero();
  Vec3 r_dot = Vec3::Zero();
  Vec3 r_ddot = Vec3::Zero();
  Mat3 A = Mat3::Identity();
  Vec3 omega_bar = Vec3::Zero();
  Vec3 omega_bar_dot = Vec3::Zero();
  Vec4 p = Vec4(1.0, 0.0, 0.0, 0.0);
  Vec4 p_dot = Vec4::Zero();
  Vec4 p_ddot = Vec4::Zero();
  Vec3 eps = Vec3::Zero();
  Vec3 eps_dot = Vec3::Zero();
  Vec3 eps_ddot = Vec3::Zero();
};

struct DynState {
  Formulation form = Formulation::kRA;
  double t = 0.0;
  std::vector<BodyDynState> bodies;
  // One multiplier per scalar constraint; rp adds one per body for the
  // normalization condition.
  Eigen::VectorXd lambda;
  Eigen::VectorXd lambda_p;
};

// Model initial pose and velocity expressed in formulation `f`. Throws
// GimbalLock for reps when a body starts with |sin theta| < 1e-6.
DynState initial_state(const MechanismModel& m, Formulation f);

// Infinity norm of the position-level constraint residual.
double constraint_residual(const MechanismModel& m, const DynState& s);
// Infinity norm of G q_dot - nu.
double velocity_residual(const MechanismModel& m, const DynState& s);
// Infinity norm of G q_ddot - gamma.
double acceleration_residual(const MechanismModel& m, const DynState& s);

}  // namespace absmbd

#endif  // ABSMBD_STATE_HPP_
