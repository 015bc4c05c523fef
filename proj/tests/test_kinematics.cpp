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

#include <cmath>
#include <numbers>
#include <string>

#include "absmbd/errors.hpp"
#include "absmbd/kinematics.hpp"
#include "absmbd/model_io.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace absmbd;
using absmbd::testing::model_path;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr Formulation kForms[] = {Formulation::kRA, Formulation::kRP, Formulation::kREps};

// Closed-form motion of the bundled pendulum: the rod's x axis stays in the
// xz plane, its y axis makes the angle a(t) = pi/2 + pi/4 cos 2t with -Z and
// the centre of mass sits 2 m from the pivot along x.
struct PendulumExact {
  Vec3 r, r_dot, r_ddot;
};

PendulumExact pendulum_exact(double t) {
  const double a = kPi / 2 + kPi / 4 * std::cos(2 * t);
  const double a_dot = -kPi / 2 * std::sin(2 * t);
  const double a_ddot = -kPi * std::cos(2 * t);
  const Vec3 u(std::cos(a), 0.0, -std::sin(a));
  const Vec3 du(-std::sin(a), 0.0, -std::cos(a));
  return {2.0 * u, 2.0 * a_dot * du, 2.0 * (a_ddot * du - a_dot * a_dot * u)};
}

// A rotation drive encoded as DP1 f = cos(alpha) loses rank where
// sin(alpha) = 0; velocity and acceleration are ill-conditioned there.
double drive_sine(const MechanismModel& m, double t) {
  double s = 1.0;
  for (const auto& g : m.gcons) {
    if (g.kind != GconKind::kDP1 || g.driver.kind != DriverFn::Kind::kCosine || g.driver.angle) continue;
    const double f = eval_driver(g.driver, t).f;
    s = std::min(s, std::sqrt(std::max(0.0, 1.0 - f * f)));
  }
  return s;
}

void perturb(DynState& s, testing::Rng& rng, double size) {
  for (auto& b : s.bodies) {
    b.r += rng.vec3(-size, size);
    b.A = b.A * exp_so3(rng.vec3(-size, size));
    b.p += rng.vec4(-size, size);
    b.eps += rng.vec3(-size, size);
  }
}

}  // namespace

TEST_CASE("kinematics rejects models with free degrees of freedom") {
  const auto m = load_model(model_path("double_pendulum"));
  KinematicsConfig cfg;
  cfg.t_end = 0.01;
  try {
    kinematics_run(m, cfg);
    FAIL("expected PreconditionError");
  } catch (const PreconditionError& e) {
    CHECK(std::string(e.what()).find("model not fully driven") != std::string::npos);
  }
  DynState s = initial_state(m, Formulation::kRA);
  CHECK_THROWS_AS(solve_position(m, s, 0.0), PreconditionError);
}

TEST_CASE("position Newton converges quadratically") {
  const auto m = load_model(model_path("pendulum"));
  testing::Rng rng(5);
  for (Formulation f : kForms) {
    const std::string form = to_string(f);
    CAPTURE(form);
    for (double size : {1e-4, 1e-2}) {
      DynState s = initial_state(m, f);
      perturb(s, rng, size);
      const PositionResult res = solve_position(m, s, 0.0, 1e-13);
      const auto& d = res.corrections;
      REQUIRE(d.size() >= 3);
      // With e_{k+1} = C e_k^2 the ratio d_{k+1} / d_k^2 is the same C at
      // every step while the corrections stay above roundoff. From the far
      // seed the first steps may contract faster than the asymptotic rate.
      for (std::size_t k = 1; k + 1 < d.size() && d[k + 1] > 1e-13; ++k) {
        const double c0 = d[k] / (d[k - 1] * d[k - 1]);
        const double c1 = d[k + 1] / (d[k] * d[k]);
        CAPTURE(k);
        CHECK(c1 < 10.0 * c0);
        if (size < 1e-3) CHECK(c1 > 0.1 * c0);
      }
      CHECK(d.back() <= 1e-13);
      CHECK(constraint_residual(m, s) < 1e-13);
    }
  }
}

TEST_CASE("a converged seed is a fixed point") {
  const auto m = load_model(model_path("slider_crank"));
  for (Formulation f : kForms) {
    const std::string form = to_string(f);
    CAPTURE(form);
    DynState s = initial_state(m, f);
    solve_position(m, s, 0.37);
    const DynState converged = s;
    const PositionResult res = solve_position(m, s, 0.37);
    CHECK(res.iterations == 1);
    CHECK(res.correction_norm < 1e-13);
    for (std::size_t b = 0; b < s.bodies.size(); ++b) {
      CHECK((s.bodies[b].r - converged.bodies[b].r).norm() < 1e-13);
    }
  }
}

TEST_CASE("initial model velocities agree with the velocity solve") {
  for (const char* name : {"pendulum", "slider_crank", "four_link"}) {
    const std::string model_name = name;
    CAPTURE(model_name);
    const auto m = load_model(model_path(name));
    for (Formulation f : kForms) {
      const std::string form = to_string(f);
    CAPTURE(form);
      DynState s = initial_state(m, f);
      solve_position(m, s, 0.0);
      solve_velocity(m, s);
      for (int b = 0; b < m.nb(); ++b) {
        CHECK(testing::rel_err(s.bodies[b].r_dot, m.bodies[b].rdot0) < 1e-9);
        CHECK(testing::rel_err(s.bodies[b].omega_bar, m.bodies[b].omega_bar0) < 1e-9);
      }
    }
  }
}

TEST_CASE("pendulum kinematics follows the closed-form motion") {
  const auto m = load_model(model_path("pendulum"));
  for (Formulation f : kForms) {
    const std::string form = to_string(f);
    CAPTURE(form);
    KinematicsConfig cfg;
    cfg.form = f;
    const KinematicsLog log = kinematics_run(m, cfg);
    REQUIRE(log.records.size() == 3001);
    CHECK(log.steps == 3000);
    double r_err = 0, v_err = 0, a_err = 0, phi = 0;
    for (const auto& rec : log.records) {
      const PendulumExact ex = pendulum_exact(rec.t);
      r_err = std::max(r_err, (rec.bodies[0].r - ex.r).cwiseAbs().maxCoeff());
      v_err = std::max(v_err, (rec.bodies[0].r_dot - ex.r_dot).cwiseAbs().maxCoeff());
      a_err = std::max(a_err, (rec.bodies[0].r_ddot - ex.r_ddot).cwiseAbs().maxCoeff());
      phi = std::max(phi, rec.phi_norm);
    }
    CHECK(log.records.back().t == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(r_err < 1e-9);
    CHECK(v_err < 1e-9);
    CHECK(a_err < 1e-8);
    CHECK(phi <= 1e-8);
  }
}

TEST_CASE("kinematics solutions satisfy all three constraint levels") {
  for (const char* name : {"pendulum", "slider_crank", "four_link"}) {
    const std::string model_name = name;
    CAPTURE(model_name);
    const auto m = load_model(model_path(name));
    for (Formulation f : kForms) {
      const std::string form = to_string(f);
    CAPTURE(form);
      KinematicsConfig cfg;
      cfg.form = f;
      cfg.t_end = 1.5;
      const KinematicsLog log = kinematics_run(m, cfg);
      double pos = 0, vel = 0, acc = 0, ortho = 0, norm = 0;
      for (std::size_t n = 0; n < log.records.size(); n += 25) {
        DynState s;
        s.form = f;
        s.t = log.records[n].t;
        s.bodies = log.records[n].bodies;
        pos = std::max(pos, constraint_residual(m, s));
        vel = std::max(vel, velocity_residual(m, s));
        acc = std::max(acc, acceleration_residual(m, s));
        for (const auto& b : s.bodies) {
          ortho = std::max(ortho, (b.A.transpose() * b.A - Mat3::Identity()).cwiseAbs().maxCoeff());
          if (f == Formulation::kRP) norm = std::max(norm, std::abs(b.p.norm() - 1.0));
        }
      }
      CHECK(pos <= 1e-8);
      CHECK(vel <= 1e-8);
      CHECK(acc <= 1e-8);
      CHECK(ortho <= 1e-10);
      CHECK(norm <= 1e-10);
    }
  }
}

TEST_CASE("formulations agree on translational velocity and acceleration") {
  for (const char* name : {"slider_crank", "four_link"}) {
    const std::string model_name = name;
    CAPTURE(model_name);
    const auto m = load_model(model_path(name));
    KinematicsConfig cfg;
    cfg.t_end = 2.0;
    cfg.form = Formulation::kRA;
    const KinematicsLog ra = kinematics_run(m, cfg);
    for (Formulation f : {Formulation::kRP, Formulation::kREps}) {
      const std::string form = to_string(f);
    CAPTURE(form);
      cfg.form = f;
      const KinematicsLog other = kinematics_run(m, cfg);
      REQUIRE(other.records.size() == ra.records.size());
      double dv = 0, da = 0, dw = 0;
      for (std::size_t n = 0; n < ra.records.size(); ++n) {
        if (drive_sine(m, ra.records[n].t) < 0.1) continue;
        for (int b = 0; b < m.nb(); ++b) {
          const auto& x = ra.records[n].bodies[b];
          const auto& y = other.records[n].bodies[b];
          dv = std::max(dv, testing::rel_err(y.r_dot, x.r_dot));
          da = std::max(da, testing::rel_err(y.r_ddot, x.r_ddot));
          dw = std::max(dw, testing::rel_err(y.omega_bar, x.omega_bar));
        }
      }
      CHECK(dv < 1e-9);
      CHECK(da < 1e-9);
      CHECK(dw < 1e-9);
    }
  }
}

TEST_CASE("predictors change the iteration count but not the solution") {
  const auto m = load_model(model_path("four_link"));
  KinematicsConfig cfg;
  cfg.t_end = 0.5;
  cfg.predictor = KinPredictor::kFull;
  const KinematicsLog full = kinematics_run(m, cfg);
  for (KinPredictor p : {KinPredictor::kHold, KinPredictor::kPoseOnly}) {
    cfg.predictor = p;
    const KinematicsLog other = kinematics_run(m, cfg);
    CHECK(other.mean_iterations() >= full.mean_iterations());
    CHECK(testing::rel_err(other.final_record.bodies[1].r, full.final_record.bodies[1].r) < 1e-10);
  }
}
