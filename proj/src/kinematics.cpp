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

#include "absmbd/kinematics.hpp"

#include <chrono>
#include <cmath>

#include "absmbd/errors.hpp"
#include "system.hpp"

namespace absmbd {

namespace {

void require_fully_driven(const MechanismModel& m) {
  if (!m.fully_driven()) {
    throw PreconditionError("model not fully driven: kinematics needs nc = 6 nb (nc = " +
                            std::to_string(m.nc()) + ", nb = " + std::to_string(m.nb()) + ")");
  }
}

template <class T>
class KinEngine {
 public:
  explicit KinEngine(const MechanismModel& m)
      : sys_(m), G_(sys_.n_rows(), sys_.n_coords()), lu_(sys_.n_rows()) {}

  PositionResult position(DynState& s, double t, double tol, int max_iter) {
    s.t = t;
    PositionResult res;
    for (int k = 1; k <= max_iter; ++k) {
      sys_.load(s);
      sys_.phi(s, t, rhs_);
      factor(s, t);
      delta_ = lu_.solve(-rhs_);
      if (!delta_.allFinite()) throw SingularIteration(t);
      apply(s, delta_);
      res.iterations = k;
      res.correction_norm = delta_.norm();
      res.corrections.push_back(res.correction_norm);
      if (res.correction_norm <= tol) {
        finish_position(s);
        return res;
      }
    }
    throw NonConvergence(t, max_iter, res.correction_norm);
  }

  // Velocity and acceleration at the converged position share one
  // factorization.
  void velocity(DynState& s) {
    sys_.load(s);
    factor(s, s.t);
    sys_.nu(s.t, rhs_);
    delta_ = lu_.solve(rhs_);
    if (!delta_.allFinite()) throw SingularIteration(s.t);
    for (int b = 0; b < sys_.nb(); ++b) {
      s.bodies[b].r_dot = delta_.template segment<3>(sys_.r_col(b));
      T::set_rate(s.bodies[b], delta_.template segment<T::K>(sys_.o_col(b)));
    }
    factored_ = true;
  }

  void acceleration(DynState& s) {
    sys_.load(s);
    if (!factored_) factor(s, s.t);
    factored_ = false;
    sys_.gamma(s, s.t, rhs_);
    delta_ = lu_.solve(rhs_);
    if (!delta_.allFinite()) throw SingularIteration(s.t);
    for (int b = 0; b < sys_.nb(); ++b) {
      s.bodies[b].r_ddot = delta_.template segment<3>(sys_.r_col(b));
      T::set_accel(s.bodies[b], delta_.template segment<T::K>(sys_.o_col(b)));
      T::sync(s.bodies[b]);
    }
  }

  double phi_norm(const DynState& s) {
    sys_.load(s);
    sys_.phi(s, s.t, rhs_);
    return rhs_.head(sys_.nc()).cwiseAbs().maxCoeff();
  }

  void predict(const DynState& prev, DynState& s, double h, KinPredictor mode) {
    s = prev;
    if (mode == KinPredictor::kHold) return;
    for (int b = 0; b < sys_.nb(); ++b) {
      if (mode == KinPredictor::kFull) s.bodies[b].r = prev.bodies[b].r + h * prev.bodies[b].r_dot;
      T::advance(prev.bodies[b], s.bodies[b], h);
    }
  }

 private:
  void factor(const DynState& s, double t) {
    G_.setZero();
    sys_.jacobian(s, G_, 0, 0, false);
    lu_.compute(G_);
    if (detail::lu_singular(lu_)) throw SingularIteration(t);
  }

  void apply(DynState& s, const Eigen::VectorXd& d) {
    for (int b = 0; b < sys_.nb(); ++b) {
      s.bodies[b].r += d.template segment<3>(sys_.r_col(b));
      T::correct(s.bodies[b], d.template segment<T::K>(sys_.o_col(b)));
    }
  }

  void finish_position(DynState& s) {
    for (auto& b : s.bodies) {
      if constexpr (T::kNormalization) {
        if (std::abs(b.p.norm() - 1.0) > 1e-9) b.p.normalize();
      }
      T::sync(b);
    }
    if constexpr (T::kForm == Formulation::kREps) detail::check_gimbal(s, sys_.model());
  }

  detail::System<T> sys_;
  Eigen::MatrixXd G_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  Eigen::VectorXd rhs_, delta_;
  bool factored_ = false;
};

}  // namespace

using detail::dispatch;

PositionResult solve_position(const MechanismModel& m, DynState& state, double t, double tol,
                              int max_iter) {
  require_fully_driven(m);
  return dispatch(state.form, [&](auto tr) {
    KinEngine<decltype(tr)> eng(m);
    return eng.position(state, t, tol, max_iter);
  });
}

void solve_velocity(const MechanismModel& m, DynState& state) {
  require_fully_driven(m);
  dispatch(state.form, [&](auto tr) {
    KinEngine<decltype(tr)> eng(m);
    eng.velocity(state);
    for (auto& b : state.bodies) decltype(tr)::sync(b);
    return 0;
  });
}

void solve_acceleration(const MechanismModel& m, DynState& state) {
  require_fully_driven(m);
  dispatch(state.form, [&](auto tr) {
    KinEngine<decltype(tr)> eng(m);
    eng.acceleration(state);
    return 0;
  });
}

KinematicsLog kinematics_run(const MechanismModel& m, const KinematicsConfig& cfg) {
  require_fully_driven(m);
  if (!(cfg.h > 0.0) || !(cfg.pos_tol > 0.0) || cfg.max_iter < 1 || !(cfg.t_end >= 0.0)) {
    throw PreconditionError("invalid kinematics configuration");
  }
  return dispatch(cfg.form, [&](auto tr) {
    using T = decltype(tr);
    KinEngine<T> eng(m);
    KinematicsLog log;
    log.form = cfg.form;
    const auto start = std::chrono::steady_clock::now();
    const long n_steps = std::lround(cfg.t_end / cfg.h);

    DynState cur = initial_state(m, cfg.form);
    DynState prev;
    auto record = [&](const PositionResult& pr) {
      KinStepRecord rec;
      rec.t = cur.t;
      rec.bodies = cur.bodies;
      rec.iterations = pr.iterations;
      rec.correction_norm = pr.correction_norm;
      rec.phi_norm = eng.phi_norm(cur);
      if (cfg.keep_records) log.records.push_back(rec);
      log.final_record = std::move(rec);
    };
    if (cfg.keep_records) log.records.reserve(n_steps + 1);

    for (long n = 0; n <= n_steps; ++n) {
      const double t = n * cfg.h;
      if (n > 0) {
        prev = cur;
        eng.predict(prev, cur, cfg.h, cfg.predictor);
      }
      PositionResult pr;
      try {
        pr = eng.position(cur, t, cfg.pos_tol, cfg.max_iter);
      } catch (const NonConvergence& e) {
        throw NonConvergence(t, e.iterations(), e.correction_norm());
      }
      eng.velocity(cur);
      eng.acceleration(cur);
      if (n > 0) {
        ++log.steps;
        log.total_iterations += pr.iterations;
        log.max_iterations = std::max(log.max_iterations, pr.iterations);
      }
      record(pr);
    }
    log.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return log;
  });
}

}  // namespace absmbd
