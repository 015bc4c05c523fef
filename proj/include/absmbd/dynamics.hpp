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

#ifndef ABSMBD_DYNAMICS_HPP_
#define ABSMBD_DYNAMICS_HPP_

#include <vector>

#include "absmbd/state.hpp"

namespace absmbd {

// Iteration matrix used by the Newton loop. kFiniteDifference differentiates
// the discretized residual numerically and serves as a reference.
enum class NewtonJacobian { kAnalytic, kFiniteDifference };

// rp/reps only: orientation-orientation derivative of the constraint forces
// Phi_o^T lambda inside the analytic iteration matrix. kFiniteDifference
// uses central differences of the constraint rows with step 1e-7.
enum class ReactionHessian { kFiniteDifference, kAnalytic };

struct DynamicsConfig {
  Formulation form = Formulation::kRA;
  double h = 1e-3;
  double t_end = 3.0;
  // Stopping threshold on |delta|_2.
  double theta = 1e-3;
  // Use theta = 1e-11 / h^2 instead of `theta`.
  bool auto_theta = false;
  int max_iter = 50;
  // Keep every state in the log (otherwise only the final one).
  bool store_states = true;
  NewtonJacobian jacobian = NewtonJacobian::kAnalytic;
  ReactionHessian reaction_hessian = ReactionHessian::kFiniteDifference;

  double effective_theta() const { return auto_theta ? 1e-11 / (h * h) : theta; }
};

struct StepInfo {
  int iterations = 0;
  double correction_norm = 0.0;
};

struct DynStepRecord {
  double t = 0.0;
  int iterations = 0;
  double correction_norm = 0.0;
  // max |Phi| over the geometric constraints.
  double phi_norm = 0.0;
  // rp: max |p^T p / 2 - 1/2|; rA: max |A^T A - I|; zero otherwise.
  double orientation_drift = 0.0;
};

struct TrajectoryLog {
  Formulation form = Formulation::kRA;
  double h = 0.0;
  double theta = 0.0;
  // Rows of the Newton iteration matrix.
  int system_dim = 0;
  // One record per step t_1 .. t_N.
  std::vector<DynStepRecord> steps;
  // t_0 .. t_N when store_states is set.
  std::vector<DynState> states;
  DynState final_state;
  long total_iterations = 0;
  int max_iterations = 0;
  double wall_seconds = 0.0;

  double mean_iterations() const {
    return steps.empty() ? 0.0 : static_cast<double>(total_iterations) / steps.size();
  }
};

// Size of the Newton system: 6 nb + nc for rA and reps, 8 nb + nc for rp.
int newton_dimension(const MechanismModel& m, Formulation f);

// Consistent accelerations and multipliers at t = 0 from the model's
// positions and velocities. Throws InconsistentInitialConditions when the
// position or velocity residual exceeds 1e-8.
DynState initial_conditions_solve(const MechanismModel& m, Formulation f);

// Largest residual of the equations of motion and of the acceleration-level
// constraints at s (accelerations and multipliers taken from s).
double eom_residual(const MechanismModel& m, const DynState& s);

// One implicit Euler step from `prev` to t_next. Throws NonConvergence,
// SingularIteration and (reps) GimbalLock.
DynState step_rA(const MechanismModel& m, const DynState& prev, double t_next,
                 const DynamicsConfig& cfg, StepInfo* info = nullptr);
DynState step_rp(const MechanismModel& m, const DynState& prev, double t_next,
                 const DynamicsConfig& cfg, StepInfo* info = nullptr);
DynState step_reps(const MechanismModel& m, const DynState& prev, double t_next,
                   const DynamicsConfig& cfg, StepInfo* info = nullptr);
// Dispatches on prev.form.
DynState dynamics_step(const MechanismModel& m, const DynState& prev, double t_next,
                       const DynamicsConfig& cfg, StepInfo* info = nullptr);

// Newton iteration matrix of the step from `prev` to iterate.t, evaluated at
// the accelerations and multipliers of `iterate` (cfg.jacobian selects the
// analytic or the finite-difference matrix).
Eigen::MatrixXd newton_matrix(const MechanismModel& m, const DynState& prev,
                              const DynState& iterate, const DynamicsConfig& cfg);

// Marches from the consistent initial state to t_end.
TrajectoryLog dynamics_run(const MechanismModel& m, const DynamicsConfig& cfg);
// Same, from a given initial state.
TrajectoryLog dynamics_run(const MechanismModel& m, const DynState& start,
                           const DynamicsConfig& cfg);

}  // namespace absmbd

#endif  // ABSMBD_DYNAMICS_HPP_
