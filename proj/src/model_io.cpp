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

#include "absmbd/model_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "absmbd/errors.hpp"
#include "json.hpp"

namespace absmbd {

using nlohmann::json;

namespace {

const json& field(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw ModelError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ModelError(path + "." + key, "missing required field");
  return *it;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ModelError(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ModelError(path, "must be finite");
  return x;
}

template <int N>
Eigen::Matrix<double, N, 1> vec(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != N) {
    throw ModelError(path, "expected an array of " + std::to_string(N) + " numbers");
  }
  Eigen::Matrix<double, N, 1> out;
  for (int k = 0; k < N; ++k) out[k] = number(v[k], path + "[" + std::to_string(k) + "]");
  return out;
}

Vec3 vec3_or(const json& obj, const std::string& key, const std::string& path, const Vec3& dflt) {
  auto it = obj.find(key);
  return it == obj.end() ? dflt : vec<3>(*it, path + "." + key);
}

int body_ref(const json& obj, const std::string& key, const std::string& path) {
  const json& v = field(obj, key, path);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ModelError(path + "." + key, "expected a body id (non-negative integer)");
  }
  return v.get<int>();
}

DriverFn parse_driver(const json& d, const std::string& path) {
  const json& kind = field(d, "kind", path);
  if (!kind.is_string()) throw ModelError(path + ".kind", "expected a string");
  const std::string k = kind.get<std::string>();
  if (k == "constant") return DriverFn::constant(number(field(d, "c", path), path + ".c"));
  if (k == "cosine") {
    bool angle = false;
    if (auto it = d.find("angle"); it != d.end()) {
      if (!it->is_boolean()) throw ModelError(path + ".angle", "expected a boolean");
      angle = it->get<bool>();
    }
    return DriverFn::cosine(number(field(d, "c0", path), path + ".c0"),
                            number(field(d, "c1", path), path + ".c1"),
                            number(field(d, "omega", path), path + ".omega"),
                            number(field(d, "phi0", path), path + ".phi0"), angle);
  }
  throw ModelError(path + ".kind", "unknown driver kind '" + k + "'");
}

Body parse_body(const json& b, const std::string& path) {
  Body body;
  const json& id = field(b, "id", path);
  if (!id.is_number_integer() || id.get<long long>() <= 0) {
    throw ModelError(path + ".id", "must be a positive integer");
  }
  body.id = id.get<int>();
  if (auto it = b.find("name"); it != b.end() && it->is_string()) body.name = *it;
  body.mass = number(field(b, "mass", path), path + ".mass");
  if (!(body.mass > 0.0)) {
    throw ModelError(path + ".mass", "body " + std::to_string(body.id) + " mass must be positive");
  }
  body.inertia = vec<3>(field(b, "inertia", path), path + ".inertia");
  body.r0 = vec<3>(field(b, "r0", path), path + ".r0");
  const bool has_a = b.contains("A0"), has_p = b.contains("p0");
  if (has_a == has_p) throw ModelError(path, "exactly one of A0 or p0 is required");
  if (has_a) {
    const auto flat = vec<9>(b["A0"], path + ".A0");
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) body.A0(r, c) = flat[3 * r + c];
  } else {
    const Vec4 p = vec<4>(b["p0"], path + ".p0");
    if (!(std::abs(p.norm() - 1.0) <= 1e-6)) {
      throw ModelError(path + ".p0", "Euler parameters must be unit length");
    }
    body.A0 = a_from_p(p.normalized());
  }
  body.rdot0 = vec3_or(b, "rdot0", path, Vec3::Zero());
  body.omega_bar0 = vec3_or(b, "omega_bar0", path, Vec3::Zero());
  body.force = vec3_or(b, "force", path, Vec3::Zero());
  body.torque_bar = vec3_or(b, "torque_bar", path, Vec3::Zero());
  return body;
}

// Frame of body `id` at its initial pose; ground is the identity.
void initial_pose(const std::vector<Body>& bodies, int id, const std::string& path, Vec3& r,
                  Mat3& A) {
  r.setZero();
  A.setIdentity();
  if (id == 0) return;
  for (const auto& b : bodies) {
    if (b.id == id) {
      r = b.r0;
      A = b.A0;
      return;
    }
  }
  throw ModelError(path, "unknown body id " + std::to_string(id));
}

// Two unit vectors completing `u` to a right-handed orthonormal frame.
void complement(const Vec3& u, Vec3& u1, Vec3& u2) {
  int k = 0;
  u.cwiseAbs().minCoeff(&k);
  u1 = u.cross(Vec3::Unit(k)).normalized();
  u2 = u.cross(u1);
}

JointGeometry parse_joint_geometry(JointKind kind, const json& c, const std::vector<Body>& bodies,
                                   const std::string& path) {
  JointGeometry g;
  g.body_i = body_ref(c, "i", path);
  g.body_j = body_ref(c, "j", path);
  Vec3 ri, rj;
  Mat3 Ai, Aj;
  initial_pose(bodies, g.body_i, path + ".i", ri, Ai);
  initial_pose(bodies, g.body_j, path + ".j", rj, Aj);

  // Global description: a point and axes in world coordinates at the initial
  // configuration. Local fields, when present, take precedence.
  if (c.contains("point")) {
    const Vec3 p = vec<3>(c["point"], path + ".point");
    g.s_p = Ai.transpose() * (p - ri);
    g.s_q = Aj.transpose() * (p - rj);
  }
  if (c.contains("axis")) {
    const Vec3 u = vec<3>(c["axis"], path + ".axis");
    if (!(u.norm() > 1e-12)) throw ModelError(path + ".axis", "must be nonzero");
    Vec3 u1, u2;
    complement(u.normalized(), u1, u2);
    g.a_i = Ai.transpose() * u1;
    g.b_i = Ai.transpose() * u2;
    g.c_j = Aj.transpose() * u.normalized();
    g.d_j = Aj.transpose() * u2;
  }
  if (kind == JointKind::kUJ) {
    if (c.contains("axis_i")) g.a_i = Ai.transpose() * vec<3>(c["axis_i"], path + ".axis_i");
    if (c.contains("axis_j")) g.c_j = Aj.transpose() * vec<3>(c["axis_j"], path + ".axis_j");
  }
  g.s_p = vec3_or(c, "s_p", path, g.s_p);
  g.s_q = vec3_or(c, "s_q", path, g.s_q);
  g.a_i = vec3_or(c, "a_i", path, g.a_i);
  g.b_i = vec3_or(c, "b_i", path, g.b_i);
  g.c_j = vec3_or(c, "c_j", path, g.c_j);
  g.d_j = vec3_or(c, "d_j", path, g.d_j);
  return g;
}

void parse_constraint(const json& c, const std::vector<Body>& bodies, const std::string& path,
                      std::vector<GconSpec>& out) {
  const json& kind_v = field(c, "kind", path);
  if (!kind_v.is_string()) throw ModelError(path + ".kind", "expected a string");
  const std::string kind = kind_v.get<std::string>();
  std::string label = path + "(" + kind + ")";
  if (auto it = c.find("label"); it != c.end() && it->is_string()) label = *it;

  static const std::pair<const char*, JointKind> kJoints[] = {
      {"SJ", JointKind::kSJ}, {"UJ", JointKind::kUJ}, {"CJ", JointKind::kCJ},
      {"RJ", JointKind::kRJ}, {"TJ", JointKind::kTJ}};
  for (const auto& [name, jk] : kJoints) {
    if (kind == name) {
      const auto expanded = expand_joint(jk, parse_joint_geometry(jk, c, bodies, path), label);
      out.insert(out.end(), expanded.begin(), expanded.end());
      return;
    }
  }

  GconSpec g;
  if (kind == "DP1") g.kind = GconKind::kDP1;
  else if (kind == "DP2") g.kind = GconKind::kDP2;
  else if (kind == "D") g.kind = GconKind::kD;
  else if (kind == "CD") g.kind = GconKind::kCD;
  else throw ModelError(path + ".kind", "unknown constraint kind '" + kind + "'");
  g.label = label;
  g.body_i = body_ref(c, "i", path);
  g.body_j = body_ref(c, "j", path);
  Vec3 r;
  Mat3 A;
  initial_pose(bodies, g.body_i, path + ".i", r, A);
  initial_pose(bodies, g.body_j, path + ".j", r, A);
  auto need = [&](const char* key) { return vec<3>(field(c, key, path), path + "." + key); };
  switch (g.kind) {
    case GconKind::kDP1:
      g.a_i = need("a_i");
      g.a_j = need("a_j");
      break;
    case GconKind::kDP2:
      g.a_i = need("a_i");
      g.s_p = need("s_p");
      g.s_q = need("s_q");
      break;
    case GconKind::kD:
      g.s_p = need("s_p");
      g.s_q = need("s_q");
      break;
    case GconKind::kCD:
      g.c = need("c");
      g.s_p = need("s_p");
      g.s_q = need("s_q");
      break;
  }
  g.driver = c.contains("driver") ? parse_driver(c["driver"], path + ".driver")
                                  : DriverFn::constant(0.0);
  out.push_back(g);
}

json to_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

json to_json(const DriverFn& d) {
  if (d.kind == DriverFn::Kind::kConstant) return {{"kind", "constant"}, {"c", d.c}};
  json j = {{"kind", "cosine"}, {"c0", d.c0}, {"c1", d.c1}, {"omega", d.omega}, {"phi0", d.phi0}};
  if (d.angle) j["angle"] = true;
  return j;
}

}  // namespace

MechanismModel parse_model(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ModelError("", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ModelError("", "model document must be a JSON object");
  MechanismModel m;
  if (auto it = doc.find("name"); it != doc.end() && it->is_string()) m.name = *it;
  m.gravity = vec3_or(doc, "gravity", "", m.gravity);
  const json& bodies = field(doc, "bodies", "");
  if (!bodies.is_array()) throw ModelError("bodies", "expected an array");
  for (size_t k = 0; k < bodies.size(); ++k) {
    m.bodies.push_back(parse_body(bodies[k], "bodies[" + std::to_string(k) + "]"));
  }
  if (auto it = doc.find("constraints"); it != doc.end()) {
    if (!it->is_array()) throw ModelError("constraints", "expected an array");
    for (size_t k = 0; k < it->size(); ++k) {
      parse_constraint((*it)[k], m.bodies, "constraints[" + std::to_string(k) + "]", m.gcons);
    }
  }
  validate_model(m);
  return m;
}

MechanismModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("", "cannot open model file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

std::string serialize_model(const MechanismModel& m) {
  json doc;
  doc["name"] = m.name;
  doc["gravity"] = to_json(m.gravity);
  doc["bodies"] = json::array();
  for (const Body& b : m.bodies) {
    json jb;
    jb["id"] = b.id;
    if (!b.name.empty()) jb["name"] = b.name;
    jb["mass"] = b.mass;
    jb["inertia"] = to_json(b.inertia);
    jb["r0"] = to_json(b.r0);
    json a = json::array();
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) a.push_back(b.A0(r, c));
    jb["A0"] = a;
    jb["rdot0"] = to_json(b.rdot0);
    jb["omega_bar0"] = to_json(b.omega_bar0);
    if (!b.force.isZero(0.0)) jb["force"] = to_json(b.force);
    if (!b.torque_bar.isZero(0.0)) jb["torque_bar"] = to_json(b.torque_bar);
    doc["bodies"].push_back(jb);
  }
  doc["constraints"] = json::array();
  for (const GconSpec& g : m.gcons) {
    json jc;
    jc["kind"] = to_string(g.kind);
    jc["i"] = g.body_i;
    jc["j"] = g.body_j;
    switch (g.kind) {
      case GconKind::kDP1:
        jc["a_i"] = to_json(g.a_i);
        jc["a_j"] = to_json(g.a_j);
        break;
      case GconKind::kDP2:
        jc["a_i"] = to_json(g.a_i);
        jc["s_p"] = to_json(g.s_p);
        jc["s_q"] = to_json(g.s_q);
        break;
      case GconKind::kD:
        jc["s_p"] = to_json(g.s_p);
        jc["s_q"] = to_json(g.s_q);
        break;
      case GconKind::kCD:
        jc["c"] = to_json(g.c);
        jc["s_p"] = to_json(g.s_p);
        jc["s_q"] = to_json(g.s_q);
        break;
    }
    jc["driver"] = to_json(g.driver);
    if (!g.label.empty()) jc["label"] = g.label;
    doc["constraints"].push_back(jc);
  }
  return doc.dump(2);
}

void save_model(const MechanismModel& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ModelError("", "cannot write model file '" + path + "'");
  out << serialize_model(m) << "\n";
}

}  // namespace absmbd
