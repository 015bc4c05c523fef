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

#include "absmbd/state.hpp"

#include "absmbd/errors.hpp"
#include "system.hpp"

namespace absmbd {

const char* to_string(Formulation f) {
  switch (f) {
    case Formulation::kRA: return "rA";
    case Formulation::kRP: return "rp";
    case Formulation::kREps: return "reps";
  }
  return "?";
}

Formulation parse_formulation(const std::string& s) {
  if (s == "rA") return Formulation::kRA;
  if (s == "rp") return Formulation::kRP;
  if (s == "reps") return Formulation::kREps;
  throw std::invalid_argument("unknown formulation '" + s + "' (expected rA, rp or reps)");
}

DynState initial_state(const MechanismModel& m, Formulation f) {
  DynState s;
  s.form = f;
  s.t = 0.0;
  s.bodies.resize(m.nb());
  for (int b = 0; b < m.nb(); ++b) {
    const Body& body = m.bodies[b];
    BodyDynState& bs = s.bodies[b];
    bs.r = body.r0;
    bs.r_dot = body.rdot0;
    bs.A = body.A0;
    bs.omega_bar = body.omega_bar0;
    switch (f) {
      case Formulation::kRA:
        break;
      case Formulation::kRP:
        bs.p = p_from_matrix(body.A0);
        bs.p_dot = 0.5 * b_p_matrix(bs.p).transpose() * body.omega_bar0;
        detail::TraitsP::sync(bs);
        break;
      case Formulation::kREps: {
        const auto e = eps_from_matrix(body.A0);
        if (e.gimbal_lock || std::abs(std::sin(e.eps[1])) < 1e-6) throw GimbalLock(0.0, body.id);
        bs.eps = e.eps;
        bs.eps_dot = b_eps_matrix(bs.eps).lu().solve(body.omega_bar0);
        detail::TraitsE::sync(bs);
        break;
      }
    }
  }
  s.lambda = Eigen::VectorXd::Zero(m.nc());
  if (f == Formulation::kRP) s.lambda_p = Eigen::VectorXd::Zero(m.nb());
  return s;
}

using detail::dispatch;

double constraint_residual(const MechanismModel& m, const DynState& s) {
  return dispatch(s.form, [&](auto tr) {
    detail::System<decltype(tr)> sys(m);
    sys.load(s);
    Eigen::VectorXd phi;
    sys.phi(s, s.t, phi);
    return phi.size() ? phi.head(m.nc()).cwiseAbs().maxCoeff() : 0.0;
  });
}

double velocity_residual(const MechanismModel& m, const DynState& s) {
  return dispatch(s.form, [&](auto tr) {
    detail::System<decltype(tr)> sys(m);
    sys.load(s);
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(sys.n_rows(), sys.n_coords());
    sys.jacobian(s, G, 0, 0, false);
    Eigen::VectorXd v, nu;
    sys.velocities(s, v);
    sys.nu(s.t, nu);
    return sys.n_rows() ? (G * v - nu).cwiseAbs().maxCoeff() : 0.0;
  });
}

double acceleration_residual(const MechanismModel& m, const DynState& s) {
  return dispatch(s.form, [&](auto tr) {
    detail::System<decltype(tr)> sys(m);
    sys.load(s);
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(sys.n_rows(), sys.n_coords());
    sys.jacobian(s, G, 0, 0, false);
    Eigen::VectorXd a, gam;
    sys.accelerations(s, a);
    sys.gamma(s, s.t, gam);
    return sys.n_rows() ? (G * a - gam).cwiseAbs().maxCoeff() : 0.0;
  });
}

}  // namespace absmbd
