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


#include "absmbd/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absmbd/errors.hpp"

namespace absmbd {

namespace {

bool divides(double t_end, double h) {
  const double n = std::round(t_end / h);
  return n >= 1.0 && std::abs(n * h - t_end) <= 1e-9 * std::max(1.0, t_end);
}

int kinematics_dimension(const MechanismModel& m, Formulation f) {
  return f == Formulation::kRP ? 7 * m.nb() : 6 * m.nb();
}

}  // namespace

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw PreconditionError("slope fit needs at least two (x, y) pairs");
  }
  const std::size_t n = x.size();
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw PreconditionError("slope fit needs positive values");
    }
    sx += std::log(x[i]);
    sy += std::log(y[i]);
  }
  const double mx = sx / n, my = sy / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw PreconditionError("slope fit needs distinct x values");
  return sxy / sxx;
}

OrderResult order_analysis(const MechanismModel& m, const OrderConfig& cfg) {
  if (cfg.h_list.size() < 4) throw PreconditionError("order analysis needs at least four steps");
  const auto [h_min, h_max] = std::minmax_element(cfg.h_list.begin(), cfg.h_list.end());
  if (!(std::log10(*h_max / *h_min) >= 1.5)) {
    throw PreconditionError("order analysis steps must span at least 1.5 decades");
  }
  if (cfg.component < 0 || cfg.component > 2) throw PreconditionError("component must be 0, 1 or 2");
  const int b = m.body_index(cfg.body);
  if (b < 0) throw PreconditionError("order analysis body must not be ground");
  for (double h : cfg.h_list) {
    if (!(h > 0.0) || !divides(cfg.t_end, h)) {
      throw PreconditionError("t_end is not a whole number of steps of h=" + std::to_string(h));
    }
  }
  if (!divides(cfg.t_end, cfg.truth_h)) {
    throw PreconditionError("t_end is not a whole number of ground-truth steps");
  }

  KinematicsConfig kc;
  kc.form = Formulation::kRA;
  kc.h = cfg.truth_h;
  kc.t_end = cfg.t_end;
  kc.pos_tol = cfg.truth_tol;
  kc.max_iter = cfg.max_iter;
  kc.keep_records = false;
  const BodyDynState truth = kinematics_run(m, kc).final_record.bodies[b];

  OrderResult out;
  out.form = cfg.form;
  std::vector<double> hs, pos, vel, acc;
  for (double h : cfg.h_list) {
    DynamicsConfig dc;
    dc.form = cfg.form;
    dc.h = h;
    dc.t_end = cfg.t_end;
    dc.theta = cfg.theta;
    dc.auto_theta = cfg.auto_theta;
    dc.max_iter = cfg.max_iter;
    dc.store_states = false;
    const TrajectoryLog log = dynamics_run(m, dc);
    const BodyDynState& s = log.final_state.bodies[b];
    const int c = cfg.component;
    OrderPoint p;
    p.h = h;
    p.theta = dc.effective_theta();
    p.pos_err = std::abs(s.r[c] - truth.r[c]);
    p.vel_err = std::abs(s.r_dot[c] - truth.r_dot[c]);
    p.acc_err = std::abs(s.r_ddot[c] - truth.r_ddot[c]);
    p.mean_iterations = log.mean_iterations();
    out.points.push_back(p);
    out.max_pos_err = std::max(out.max_pos_err, p.pos_err);
    hs.push_back(h);
    pos.push_back(p.pos_err);
    vel.push_back(p.vel_err);
    acc.push_back(p.acc_err);
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto fit = [&](const std::vector<double>& e) {
    return std::all_of(e.begin(), e.end(), [](double v) { return v > 0.0; }) ? loglog_slope(hs, e)
                                                                              : nan;
  };
  out.vel_slope = fit(vel);
  out.acc_slope = fit(acc);
  out.pos_slope = fit(pos);
  return out;
}

const char* to_string(RunMode mode) {
  return mode == RunMode::kKinematics ? "kinematics" : "dynamics";
}

RunMode parse_run_mode(const std::string& s) {
  if (s == "kinematics") return RunMode::kKinematics;
  if (s == "dynamics") return RunMode::kDynamics;
  throw PreconditionError("unknown mode '" + s + "' (expected kinematics or dynamics)");
}

std::vector<BenchRow> benchmark(const MechanismModel& m, const BenchConfig& cfg) {
  if (cfg.reps < 1) throw PreconditionError("benchmark needs at least one repetition");
  if (cfg.forms.empty()) throw PreconditionError("benchmark needs at least one formulation");
  const std::size_t nf = cfg.forms.size();
  std::vector<BenchRow> rows(nf);
  std::vector<DynState> starts(nf);
  std::vector<double> total(nf, 0.0);
  for (std::size_t i = 0; i < nf; ++i) {
    rows[i].form = cfg.forms[i];
    rows[i].min_seconds = std::numeric_limits<double>::infinity();
    if (cfg.mode == RunMode::kDynamics) {
      starts[i] = initial_conditions_solve(m, cfg.forms[i]);
      rows[i].system_dim = newton_dimension(m, cfg.forms[i]);
    } else {
      rows[i].system_dim = kinematics_dimension(m, cfg.forms[i]);
    }
  }
  for (int rep = 0; rep < cfg.reps; ++rep) {
    for (std::size_t i = 0; i < nf; ++i) {
      double seconds = 0.0, mean_it = 0.0;
      if (cfg.mode == RunMode::kDynamics) {
        DynamicsConfig dc;
        dc.form = cfg.forms[i];
        dc.h = cfg.h;
        dc.t_end = cfg.t_end;
        dc.theta = cfg.theta;
        dc.auto_theta = cfg.auto_theta;
        dc.max_iter = cfg.max_iter;
        dc.reaction_hessian = cfg.reaction_hessian;
        dc.store_states = false;
        const TrajectoryLog log = dynamics_run(m, starts[i], dc);
        seconds = log.wall_seconds;
        mean_it = log.mean_iterations();
      } else {
        KinematicsConfig kc;
        kc.form = cfg.forms[i];
        kc.h = cfg.h;
        kc.t_end = cfg.t_end;
        kc.pos_tol = cfg.pos_tol;
        kc.max_iter = cfg.max_iter;
        kc.keep_records = false;
        const KinematicsLog log = kinematics_run(m, kc);
        seconds = log.wall_seconds;
        mean_it = log.mean_iterations();
      }
      total[i] += seconds;
      rows[i].min_seconds = std::min(rows[i].min_seconds, seconds);
      rows[i].mean_iterations = mean_it;
      rows[i].reps = rep + 1;
    }
  }
  double rp_mean = 0.0;
  for (std::size_t i = 0; i < nf; ++i) {
    rows[i].mean_seconds = total[i] / cfg.reps;
    if (rows[i].form == Formulation::kRP) rp_mean = rows[i].mean_seconds;
  }
  for (BenchRow& r : rows) r.speedup_vs_rp = rp_mean > 0.0 ? rp_mean / r.mean_seconds : 0.0;
  return rows;
}

}  // namespace absmbd
