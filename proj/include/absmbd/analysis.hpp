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


#ifndef ABSMBD_ANALYSIS_HPP_
#define ABSMBD_ANALYSIS_HPP_

#include <string>
#include <vector>

#include "absmbd/dynamics.hpp"
#include "absmbd/kinematics.hpp"

namespace absmbd {

// Least-squares slope of log(y) against log(x). Throws PreconditionError
// with fewer than two points or a nonpositive value.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct OrderConfig {
  Formulation form = Formulation::kRA;
  std::vector<double> h_list = {1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
  double t_end = 3.0;
  // Dynamics stopping rule; auto_theta selects theta = 1e-11 / h^2.
  bool auto_theta = true;
  double theta = 1e-3;
  int max_iter = 50;
  // Ground truth: kinematics with this step and tolerance.
  double truth_h = 1e-3;
  double truth_tol = 1e-12;
  // Compared coordinate: component (0..2) of the position of body `body`
  // (model body id).
  int body = 1;
  int component = 2;
};

struct OrderPoint {
  double h = 0.0;
  double theta = 0.0;
  double pos_err = 0.0;
  double vel_err = 0.0;
  double acc_err = 0.0;
  double mean_iterations = 0.0;
};

struct OrderResult {
  Formulation form = Formulation::kRA;
  std::vector<OrderPoint> points;
  double vel_slope = 0.0;
  double acc_slope = 0.0;
  // Reported only; position errors sit at the Newton tolerance.
  double pos_slope = 0.0;
  double max_pos_err = 0.0;
};

// Dynamics error at t_end against kinematics of the same (fully driven)
// model, one point per h, and fitted slopes. Throws PreconditionError unless
// there are at least four steps spanning at least 1.5 decades and t_end is a
// whole number of every step.
OrderResult order_analysis(const MechanismModel& m, const OrderConfig& cfg);

enum class RunMode { kKinematics, kDynamics };
const char* to_string(RunMode mode);
RunMode parse_run_mode(const std::string& s);

struct BenchConfig {
  RunMode mode = RunMode::kDynamics;
  std::vector<Formulation> forms = {Formulation::kRA, Formulation::kRP, Formulation::kREps};
  double h = 1e-3;
  double t_end = 3.0;
  double theta = 1e-3;
  bool auto_theta = false;
  double pos_tol = 1e-10;
  int max_iter = 50;
  ReactionHessian reaction_hessian = ReactionHessian::kFiniteDifference;
  int reps = 10;
};

struct BenchRow {
  Formulation form = Formulation::kRA;
  int reps = 0;
  double mean_seconds = 0.0;
  double min_seconds = 0.0;
  double mean_iterations = 0.0;
  // Newton system rows: dynamics matrix, or the position Jacobian.
  int system_dim = 0;
  // Mean rp time over this mean time; zero when rp was not run.
  double speedup_vs_rp = 0.0;
};

// Repetitions are interleaved across formulations. Only the solver loop is
// timed.
std::vector<BenchRow> benchmark(const MechanismModel& m, const BenchConfig& cfg);

}  // namespace absmbd

#endif  // ABSMBD_ANALYSIS_HPP_
