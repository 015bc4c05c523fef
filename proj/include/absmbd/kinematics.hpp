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

#ifndef ABSMBD_KINEMATICS_HPP_
#define ABSMBD_KINEMATICS_HPP_

#include <vector>

#include "absmbd/state.hpp"

namespace absmbd {

// Starting guess for the position solve at t_n from the converged state at
// t_{n-1}. kHold reuses q_{n-1}. kPoseOnly advances only the orientation
// with the previous angular rate (A exp(h omega), p + h p_dot,
// eps + h eps_dot) and keeps r; kFull also advances r by h r_dot.
enum class KinPredictor { kHold, kPoseOnly, kFull };

struct KinematicsConfig {
  Formulation form = Formulation::kRA;
  double h = 1e-3;
  double t_end = 3.0;
  double pos_tol = 1e-10;
  int max_iter = 50;
  KinPredictor predictor = KinPredictor::kFull;
  // When false only the final record is kept.
  bool keep_records = true;
};

struct KinStepRecord {
  double t = 0.0;
  std::vector<BodyDynState> bodies;
  int iterations = 0;
  double correction_norm = 0.0;
  double phi_norm = 0.0;
};

struct KinematicsLog {
  Formulation form = Formulation::kRA;
  std::vector<KinStepRecord> records;
  KinStepRecord final_record;
  // Statistics over the marched steps t_1 .. t_N (the assembly at t_0 is
  // excluded).
  int steps = 0;
  long total_iterations = 0;
  int max_iterations = 0;
  double wall_seconds = 0.0;
  double mean_iterations() const {
    return steps ? static_cast<double>(total_iterations) / steps : 0.0;
  }
};

struct PositionResult {
  int iterations = 0;
  double correction_norm = 0.0;
  // |delta|_2 of every iteration.
  std::vector<double> corrections;
};

// Newton iteration on Phi(q, t) = 0 starting from `state` (updated in
// place; state.t is set to t). Stops when |delta|_2 <= tol. Throws
// PreconditionError unless the model is fully driven, NonConvergence,
// SingularIteration.
PositionResult solve_position(const MechanismModel& m, DynState& state, double t,
                              double tol = 1e-10, int max_iter = 50);
// Linear solves G q_dot = nu and G q_ddot = gamma at state.t.
void solve_velocity(const MechanismModel& m, DynState& state);
void solve_acceleration(const MechanismModel& m, DynState& state);

KinematicsLog kinematics_run(const MechanismModel& m, const KinematicsConfig& cfg);

}  // namespace absmbd

#endif  // ABSMBD_KINEMATICS_HPP_
