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

#include "absmbd/model.hpp"

#include <cmath>

#include "absmbd/errors.hpp"

namespace absmbd {

DriverFn DriverFn::constant(double value) {
  DriverFn d;
  d.kind = Kind::kConstant;
  d.c = value;
  return d;
}

DriverFn DriverFn::cosine(double c0, double c1, double omega, double phi0, bool angle) {
  DriverFn d;
  d.kind = Kind::kCosine;
  d.c0 = c0;
  d.c1 = c1;
  d.omega = omega;
  d.phi0 = phi0;
  d.angle = angle;
  return d;
}

DriverValue eval_driver(const DriverFn& d, double t) {
  if (d.kind == DriverFn::Kind::kConstant) return {d.c, 0.0, 0.0};
  const double arg = d.omega * t + d.phi0;
  const double ca = std::cos(arg), sa = std::sin(arg);
  const double v = d.c0 + d.c1 * ca;
  const double v_dot = -d.c1 * d.omega * sa;
  const double v_ddot = -d.c1 * d.omega * d.omega * ca;
  if (!d.angle) return {v, v_dot, v_ddot};
  const double cv = std::cos(v), sv = std::sin(v);
  return {cv, -sv * v_dot, -cv * v_dot * v_dot - sv * v_ddot};
}

const char* to_string(GconKind k) {
  switch (k) {
    case GconKind::kDP1: return "DP1";
    case GconKind::kDP2: return "DP2";
    case GconKind::kD: return "D";
    case GconKind::kCD: return "CD";
  }
  return "?";
}

const char* to_string(JointKind k) {
  switch (k) {
    case JointKind::kSJ: return "SJ";
    case JointKind::kUJ: return "UJ";
    case JointKind::kCJ: return "CJ";
    case JointKind::kRJ: return "RJ";
    case JointKind::kTJ: return "TJ";
  }
  return "?";
}

namespace {

GconSpec make(GconKind kind, const JointGeometry& g, const std::string& label) {
  GconSpec s;
  s.kind = kind;
  s.body_i = g.body_i;
  s.body_j = g.body_j;
  s.label = label;
  s.driver = DriverFn::constant(0.0);
  return s;
}

void require_nonzero(const Vec3& v, const std::string& label, const char* field) {
  if (!(v.norm() > 1e-12)) throw ModelError(label, std::string(field) + " must be nonzero");
}

void append_sj(std::vector<GconSpec>& out, const JointGeometry& g, const std::string& label) {
  for (int k = 0; k < 3; ++k) {
    GconSpec s = make(GconKind::kCD, g, label);
    s.c = Vec3::Unit(k);
    s.s_p = g.s_p;
    s.s_q = g.s_q;
    out.push_back(s);
  }
}

GconSpec dp1(const JointGeometry& g, const Vec3& a_i, const Vec3& a_j, const std::string& label) {
  GconSpec s = make(GconKind::kDP1, g, label);
  s.a_i = a_i;
  s.a_j = a_j;
  return s;
}

GconSpec dp2(const JointGeometry& g, const Vec3& a_i, const std::string& label) {
  GconSpec s = make(GconKind::kDP2, g, label);
  s.a_i = a_i;
  s.s_p = g.s_p;
  s.s_q = g.s_q;
  return s;
}

void append_perp1(std::vector<GconSpec>& out, const JointGeometry& g, const std::string& label) {
  require_nonzero(g.a_i, label, "a_i");
  require_nonzero(g.b_i, label, "b_i");
  require_nonzero(g.c_j, label, "c_j");
  if (g.a_i.cross(g.b_i).norm() <= 1e-9 * g.a_i.norm() * g.b_i.norm()) {
    throw ModelError(label, "a_i and b_i are colinear");
  }
  out.push_back(dp1(g, g.a_i, g.c_j, label));
  out.push_back(dp1(g, g.b_i, g.c_j, label));
}

}  // namespace

std::vector<GconSpec> expand_joint(JointKind kind, const JointGeometry& g,
                                   const std::string& label) {
  if (g.body_i == g.body_j) throw ModelError(label, "joint connects a body to itself");
  std::vector<GconSpec> out;
  switch (kind) {
    case JointKind::kSJ:
      append_sj(out, g, label);
      break;
    case JointKind::kUJ:
      require_nonzero(g.a_i, label, "a_i");
      require_nonzero(g.c_j, label, "c_j");
      append_sj(out, g, label);
      out.push_back(dp1(g, g.a_i, g.c_j, label));
      break;
    case JointKind::kRJ:
      append_sj(out, g, label);
      append_perp1(out, g, label);
      break;
    case JointKind::kCJ:
      append_perp1(out, g, label);
      out.push_back(dp2(g, g.a_i, label));
      out.push_back(dp2(g, g.b_i, label));
      break;
    case JointKind::kTJ:
      require_nonzero(g.d_j, label, "d_j");
      append_perp1(out, g, label);
      out.push_back(dp2(g, g.a_i, label));
      out.push_back(dp2(g, g.b_i, label));
      out.push_back(dp1(g, g.a_i, g.d_j, label));
      break;
  }
  return out;
}

int MechanismModel::body_index(int id) const {
  if (id == 0) return -1;
  for (int k = 0; k < nb(); ++k) {
    if (bodies[k].id == id) return k;
  }
  throw ModelError("", "unknown body id " + std::to_string(id));
}

GconCounts MechanismModel::counts() const {
  GconCounts c;
  for (const auto& g : gcons) {
    switch (g.kind) {
      case GconKind::kDP1: ++c.dp1; break;
      case GconKind::kDP2: ++c.dp2; break;
      case GconKind::kD: ++c.d; break;
      case GconKind::kCD: ++c.cd; break;
    }
  }
  return c;
}

namespace {

bool finite(const Vec3& v) { return v.allFinite(); }

}  // namespace

void validate_model(const MechanismModel& m) {
  if (!finite(m.gravity)) throw ModelError("gravity", "must be finite");
  for (int k = 0; k < m.nb(); ++k) {
    const Body& b = m.bodies[k];
    const std::string path = "bodies[" + std::to_string(k) + "]";
    if (b.id <= 0) throw ModelError(path + ".id", "must be a positive integer");
    for (int q = 0; q < k; ++q) {
      if (m.bodies[q].id == b.id) {
        throw ModelError(path + ".id", "duplicate body id " + std::to_string(b.id));
      }
    }
    if (!(b.mass > 0.0) || !std::isfinite(b.mass)) {
      throw ModelError(path + ".mass", "body " + std::to_string(b.id) + " mass must be positive");
    }
    if (!(b.inertia.minCoeff() > 0.0) || !finite(b.inertia)) {
      throw ModelError(path + ".inertia",
                       "body " + std::to_string(b.id) + " inertia entries must be positive");
    }
    if (!finite(b.r0) || !finite(b.rdot0) || !finite(b.omega_bar0) || !finite(b.force) ||
        !finite(b.torque_bar)) {
      throw ModelError(path, "non-finite initial state or load");
    }
    const double ortho = (b.A0.transpose() * b.A0 - Mat3::Identity()).cwiseAbs().maxCoeff();
    if (!(ortho <= 1e-9) || !(b.A0.determinant() > 0.0)) {
      throw ModelError(path + ".A0", "initial orientation of body " + std::to_string(b.id) +
                                         " is not a proper rotation");
    }
  }
  for (int k = 0; k < m.nc(); ++k) {
    const GconSpec& g = m.gcons[k];
    const std::string path =
        g.label.empty() ? "constraints[" + std::to_string(k) + "]" : g.label;
    if (g.body_i == g.body_j) throw ModelError(path, "i and j must differ");
    for (int id : {g.body_i, g.body_j}) {
      if (id == 0) continue;
      bool found = false;
      for (const auto& b : m.bodies) found = found || b.id == id;
      if (!found) throw ModelError(path, "unknown body id " + std::to_string(id));
    }
    switch (g.kind) {
      case GconKind::kDP1:
        require_nonzero(g.a_i, path, "a_i");
        require_nonzero(g.a_j, path, "a_j");
        break;
      case GconKind::kDP2:
        require_nonzero(g.a_i, path, "a_i");
        break;
      case GconKind::kCD:
        require_nonzero(g.c, path, "c");
        break;
      case GconKind::kD: {
        const DriverFn& d = g.driver;
        const bool positive =
            d.kind == DriverFn::Kind::kConstant ? d.c > 0.0
                                                : !d.angle && d.c0 - std::abs(d.c1) > 0.0;
        if (!positive) throw ModelError(path + ".driver", "D requires f(t) > 0");
        break;
      }
    }
  }
}

}  // namespace absmbd
