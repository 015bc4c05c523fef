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


#include "absmbd/fdcheck.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <type_traits>

#include "absmbd/gcon.hpp"

namespace absmbd {

namespace {

constexpr GconKind kKinds[] = {GconKind::kDP1, GconKind::kDP2, GconKind::kD, GconKind::kCD};
constexpr const char* kBlocks[] = {"r_i", "o_i", "r_j", "o_j"};
constexpr const char* kSensitivities[] = {"force_r", "force_theta", "torque_r", "torque_theta"};
constexpr const char* kForms[] = {"rA", "rp", "reps"};
constexpr const char* kSo3Items[] = {"pi_bar_local", "pi_bar_global", "B(p,s)",  "Bp",
                                     "Beps",         "Beps_dot",      "A_eps_partials", "D"};

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t group, std::uint64_t index) {
  return splitmix(splitmix(splitmix(seed) ^ group) ^ index);
}

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }
  Vec3 vec3(double lo = -1.0, double hi = 1.0) {
    return Vec3(uniform(lo, hi), uniform(lo, hi), uniform(lo, hi));
  }
  Vec4 vec4(double lo = -1.0, double hi = 1.0) {
    return Vec4(uniform(lo, hi), uniform(lo, hi), uniform(lo, hi), uniform(lo, hi));
  }
  Vec3 unit3() {
    std::normal_distribution<double> n;
    Vec3 v;
    do v = Vec3(n(gen_), n(gen_), n(gen_)); while (v.norm() < 1e-6);
    return v.normalized();
  }
  Mat3 rotation() { return exp_so3(uniform(0.0, std::numbers::pi) * unit3()); }

 private:
  std::mt19937_64 gen_;
};

// Euler angles of a random rotation, redrawn until |sin theta| >= 0.1.
Vec3 random_angles(Sampler& s) {
  for (;;) {
    const Vec3 e = eps_from_matrix(s.rotation()).eps;
    if (std::abs(std::sin(e[1])) >= 0.1) return e;
  }
}

// Native coordinates per formulation. The perturbations act on the raw
// coordinates (body-frame rotation vector for rA) and do not use the frame
// derivative code under test.
template <class F>
struct Native;

template <>
struct Native<FrameA> {
  static constexpr int K = 3;
  using C = Mat3;
  using R = Vec3;
  static C coords(Sampler& s) { return s.rotation(); }
  static R rates(Sampler& s) { return s.vec3(); }
  static C perturb(const C& a, int k, double eta) { return a * exp_so3(eta * Vec3::Unit(k)); }
  static C along(const C& c, const R& w, const R& wd, double t) {
    return c * exp_so3(w * t + 0.5 * t * t * wd);
  }
};

template <>
struct Native<FrameP> {
  static constexpr int K = 4;
  using C = Vec4;
  using R = Vec4;
  static C coords(Sampler& s) { return p_from_matrix(s.rotation()); }
  static R rates(Sampler& s) { return s.vec4(); }
  static C perturb(const C& p, int k, double eta) { return p + eta * Vec4::Unit(k); }
  static C along(const C& c, const R& w, const R& wd, double t) {
    return c + t * w + 0.5 * t * t * wd;
  }
};

template <>
struct Native<FrameE> {
  static constexpr int K = 3;
  using C = Vec3;
  using R = Vec3;
  static C coords(Sampler& s) { return random_angles(s); }
  static R rates(Sampler& s) { return s.vec3(); }
  static C perturb(const C& e, int k, double eta) { return e + eta * Vec3::Unit(k); }
  static C along(const C& c, const R& w, const R& wd, double t) {
    return c + t * w + 0.5 * t * t * wd;
  }
};

template <class F>
struct BodySample {
  using N = Native<F>;
  Vec3 r, r_dot, r_ddot;
  typename N::C o;
  typename N::R o_dot, o_ddot;

  static BodySample random(Sampler& s) {
    BodySample b;
    b.r = s.vec3(-2, 2);
    b.r_dot = s.vec3();
    b.r_ddot = s.vec3();
    b.o = N::coords(s);
    b.o_dot = N::rates(s);
    b.o_ddot = N::rates(s);
    return b;
  }
  BodyView<F> view() const {
    BodyView<F> v;
    v.r = r;
    v.r_dot = r_dot;
    v.frame = F(o, o_dot);
    return v;
  }
  // Motion with the sampled position, rate and acceleration at tau = 0.
  BodyView<F> view_at(double tau) const {
    BodyView<F> v;
    v.r = r + tau * r_dot + 0.5 * tau * tau * r_ddot;
    v.frame = F(N::along(o, o_dot, o_ddot, tau), typename N::R(o_dot + tau * o_ddot));
    return v;
  }
};

GconSpec random_gcon(GconKind kind, Sampler& s) {
  GconSpec g;
  g.kind = kind;
  g.body_i = 1;
  g.body_j = 2;
  g.a_i = s.vec3(-2, 2);
  g.a_j = s.vec3(-2, 2);
  g.s_p = s.vec3(-2, 2);
  g.s_q = s.vec3(-2, 2);
  g.c = s.unit3();
  g.driver = DriverFn::cosine(s.uniform(-1, 1), s.uniform(-1, 1), s.uniform(0.5, 3.0),
                              s.uniform(0.0, 2.0 * std::numbers::pi));
  return g;
}

Vec3 vee(const Mat3& m) {
  const Mat3 w = 0.5 * (m - m.transpose());
  return Vec3(w(2, 1), w(0, 2), w(1, 0));
}

class Recorder {
 public:
  explicit Recorder(const FdCheckConfig& cfg) : cfg_(cfg) {
    for (const std::string& name : fd_item_names()) {
      index_[name] = items_.size();
      FdItem item;
      item.name = name;
      item.tol = cfg.tol;
      items_.push_back(item);
    }
  }

  template <class A, class B>
  void record(const std::string& name, const A& analytic, const B& oracle, std::uint64_t seed) {
    Eigen::MatrixXd a = analytic;
    const Eigen::MatrixXd o = oracle;
    if (name == cfg_.tamper) a(0, 0) += cfg_.tamper_delta;
    const double err = (a - o).cwiseAbs().maxCoeff() / std::max(o.cwiseAbs().maxCoeff(), 1.0);
    FdItem& item = items_.at(index_.at(name));
    ++item.samples;
    // A NaN error must be reported, never skipped.
    if (item.samples == 1 || err > item.max_rel_err || std::isnan(err)) {
      item.max_rel_err = std::isnan(err) ? std::numeric_limits<double>::infinity() : err;
      item.worst_seed = seed;
    }
  }

  std::vector<FdItem> take() { return std::move(items_); }

 private:
  const FdCheckConfig& cfg_;
  std::vector<FdItem> items_;
  std::map<std::string, std::size_t> index_;
};

template <class F>
void check_gcon_sample(Recorder& rec, const std::string& form, GconKind kind, std::uint64_t seed) {
  using N = Native<F>;
  constexpr int K = N::K;
  using Terms = Eigen::Matrix<double, 2 * (3 + K), 1>;
  Sampler smp(seed);
  const GconSpec g = random_gcon(kind, smp);
  BodySample<F> si = BodySample<F>::random(smp);
  BodySample<F> sj = BodySample<F>::random(smp);
  const double t0 = smp.uniform(0, 2);
  const double lambda = smp.uniform(-3, 3);
  const std::string tag = form + "/" + to_string(kind);

  // Jacobian blocks against central differences of Phi.
  const auto row = gcon_jacobian(g, si.view(), sj.view());
  const double eta = 1e-6;
  auto phi_now = [&]() { return gcon_phi(g, si.view(), sj.view(), t0); };
  for (int body = 0; body < 2; ++body) {
    BodySample<F>& s = body == 0 ? si : sj;
    Eigen::RowVector3d fd_r;
    Eigen::Matrix<double, 1, K> fd_o;
    for (int k = 0; k < 3; ++k) {
      const Vec3 r0 = s.r;
      s.r = r0 + eta * Vec3::Unit(k);
      const double fp = phi_now();
      s.r = r0 - eta * Vec3::Unit(k);
      const double fm = phi_now();
      s.r = r0;
      fd_r[k] = (fp - fm) / (2 * eta);
    }
    for (int k = 0; k < K; ++k) {
      const auto o0 = s.o;
      s.o = N::perturb(o0, k, eta);
      const double fp = phi_now();
      s.o = N::perturb(o0, k, -eta);
      const double fm = phi_now();
      s.o = o0;
      fd_o[k] = (fp - fm) / (2 * eta);
    }
    rec.record("jacobian/" + tag + "/" + kBlocks[2 * body], body == 0 ? row.r_i : row.r_j, fd_r,
               seed);
    rec.record("jacobian/" + tag + "/" + kBlocks[2 * body + 1], body == 0 ? row.o_i : row.o_j,
               fd_o, seed);
  }

  // gamma against a five-point second derivative of Phi along a motion with
  // the sampled accelerations; the driver time advances with the motion.
  auto phi_at = [&](double tau) {
    return gcon_phi(g, si.view_at(tau), sj.view_at(tau), t0 + tau);
  };
  const double hs = 1e-3;
  const double phi_dd =
      (-phi_at(2 * hs) + 16 * phi_at(hs) - 30 * phi_at(0) + 16 * phi_at(-hs) - phi_at(-2 * hs)) /
      (12 * hs * hs);
  const double acc = row.r_i.dot(si.r_ddot) + row.o_i.dot(si.o_ddot) + row.r_j.dot(sj.r_ddot) +
                     row.o_j.dot(sj.o_ddot);
  const double gam = gcon_gamma(g, si.view(), sj.view(), t0);
  rec.record("gamma/" + tag, Eigen::Matrix<double, 1, 1>(acc - gam),
             Eigen::Matrix<double, 1, 1>(phi_dd), seed);

  // Position derivatives of the reaction terms lambda * row^T.
  const auto an = reaction_position_derivative(g, si.view(), sj.view(), lambda);
  auto terms = [&]() {
    const auto rw = gcon_jacobian(g, si.view(), sj.view());
    Terms v;
    v << rw.r_i.transpose(), rw.o_i.transpose(), rw.r_j.transpose(), rw.o_j.transpose();
    return Terms(lambda * v);
  };
  Eigen::Matrix<double, 2 * (3 + K), 6> fd;
  for (int c = 0; c < 2; ++c) {
    BodySample<F>& s = c == 0 ? si : sj;
    for (int k = 0; k < 3; ++k) {
      const Vec3 r0 = s.r;
      s.r = r0 + eta * Vec3::Unit(k);
      const Terms tp = terms();
      s.r = r0 - eta * Vec3::Unit(k);
      const Terms tm = terms();
      s.r = r0;
      fd.col(3 * c + k) = (tp - tm) / (2 * eta);
    }
  }
  Eigen::Matrix<double, 6, 6> an_rr, fd_rr;
  Eigen::Matrix<double, 2 * K, 6> an_or, fd_or;
  for (int b = 0; b < 2; ++b) {
    const int off = b * (3 + K);
    for (int c = 0; c < 2; ++c) {
      an_rr.block<3, 3>(3 * b, 3 * c) = an.r_r[b][c];
      an_or.template block<K, 3>(K * b, 3 * c) = an.o_r[b][c];
    }
    fd_rr.block<3, 6>(3 * b, 0) = fd.template block<3, 6>(off, 0);
    fd_or.template block<K, 6>(K * b, 0) = fd.template block<K, 6>(off + 3, 0);
  }
  rec.record("reaction_position/" + tag + "/r_r", an_rr, fd_rr, seed);
  rec.record("reaction_position/" + tag + "/o_r", an_or, fd_or, seed);

  // Orientation derivatives of the orientation reaction terms (rp, reps).
  if constexpr (!std::is_same_v<F, FrameA>) {
    const auto ao = reaction_orientation_derivative(g, si.view(), sj.view(), lambda);
    Eigen::Matrix<double, 2 * K, 2 * K> an_oo, fd_oo;
    for (int c = 0; c < 2; ++c) {
      BodySample<F>& s = c == 0 ? si : sj;
      for (int k = 0; k < K; ++k) {
        const auto o0 = s.o;
        s.o = N::perturb(o0, k, eta);
        const Terms tp = terms();
        s.o = N::perturb(o0, k, -eta);
        const Terms tm = terms();
        s.o = o0;
        const Terms d = (tp - tm) / (2 * eta);
        fd_oo.col(K * c + k) << d.template segment<K>(3), d.template segment<K>(6 + K);
      }
      for (int b = 0; b < 2; ++b) an_oo.template block<K, K>(K * b, K * c) = ao.o_o[b][c];
    }
    rec.record("reaction_orientation/" + tag + "/o_o", an_oo, fd_oo, seed);
  }
}

void check_sensitivity_sample(Recorder& rec, GconKind kind, std::uint64_t seed) {
  Sampler smp(seed);
  const GconSpec g = random_gcon(kind, smp);
  BodySample<FrameA> si = BodySample<FrameA>::random(smp);
  BodySample<FrameA> sj = BodySample<FrameA>::random(smp);
  const double lambda = smp.uniform(-3, 3);
  const auto sens = reaction_sensitivities_rA(g, si.view(), sj.view(), lambda);
  // Reaction terms Phi_r^T lambda and Pi^T lambda of both bodies.
  auto terms = [&]() {
    const auto row = jac_rA(g, si.view(), sj.view());
    Eigen::Matrix<double, 12, 1> v;
    v << row.r_i.transpose(), row.o_i.transpose(), row.r_j.transpose(), row.o_j.transpose();
    return Eigen::Matrix<double, 12, 1>(lambda * v);
  };
  const double eta = 1e-6;
  Eigen::Matrix<double, 12, 6> d_r, d_th;
  for (int c = 0; c < 2; ++c) {
    BodySample<FrameA>& s = c == 0 ? si : sj;
    for (int k = 0; k < 3; ++k) {
      const Vec3 r0 = s.r;
      s.r = r0 + eta * Vec3::Unit(k);
      const auto tp = terms();
      s.r = r0 - eta * Vec3::Unit(k);
      const auto tm = terms();
      s.r = r0;
      d_r.col(3 * c + k) = (tp - tm) / (2 * eta);
      const Mat3 A0 = s.o;
      s.o = A0 * exp_so3(eta * Vec3::Unit(k));
      const auto ap = terms();
      s.o = A0 * exp_so3(-eta * Vec3::Unit(k));
      const auto am = terms();
      s.o = A0;
      d_th.col(3 * c + k) = (ap - am) / (2 * eta);
    }
  }
  Eigen::Matrix<double, 6, 6> f_r, f_th, t_r, t_th, o_f_r, o_f_th, o_t_r, o_t_th;
  for (int b = 0; b < 2; ++b) {
    for (int c = 0; c < 2; ++c) {
      f_r.block<3, 3>(3 * b, 3 * c) = sens.force_r[b][c];
      f_th.block<3, 3>(3 * b, 3 * c) = sens.force_theta[b][c];
      t_r.block<3, 3>(3 * b, 3 * c) = sens.torque_r[b][c];
      t_th.block<3, 3>(3 * b, 3 * c) = sens.torque_theta[b][c];
    }
    o_f_r.block<3, 6>(3 * b, 0) = d_r.block<3, 6>(6 * b, 0);
    o_f_th.block<3, 6>(3 * b, 0) = d_th.block<3, 6>(6 * b, 0);
    o_t_r.block<3, 6>(3 * b, 0) = d_r.block<3, 6>(6 * b + 3, 0);
    o_t_th.block<3, 6>(3 * b, 0) = d_th.block<3, 6>(6 * b + 3, 0);
  }
  const std::string tag = std::string("sensitivity/") + to_string(kind) + "/";
  rec.record(tag + "force_r", f_r, o_f_r, seed);
  rec.record(tag + "force_theta", f_th, o_f_th, seed);
  rec.record(tag + "torque_r", t_r, o_t_r, seed);
  rec.record(tag + "torque_theta", t_th, o_t_th, seed);
}

void check_so3_sample(Recorder& rec, std::uint64_t seed) {
  Sampler smp(seed);
  const double eta = 1e-6;
  const Mat3 A = smp.rotation();
  const Vec3 s = smp.vec3(-2, 2);

  Mat3 fd_local, fd_global;
  for (int k = 0; k < 3; ++k) {
    const Mat3 Ap = A * exp_so3(eta * Vec3::Unit(k)), Am = A * exp_so3(-eta * Vec3::Unit(k));
    fd_local.col(k) = (Ap * s - Am * s) / (2 * eta);
    fd_global.col(k) = (Ap.transpose() * s - Am.transpose() * s) / (2 * eta);
  }
  rec.record("so3/pi_bar_local", pi_bar_local(A, s), fd_local, seed);
  rec.record("so3/pi_bar_global", pi_bar_global(A, s), fd_global, seed);

  const Vec4 p = p_from_matrix(smp.rotation());
  Mat34 fd_b;
  for (int k = 0; k < 4; ++k) {
    fd_b.col(k) = (a_from_p_unchecked(p + eta * Vec4::Unit(k)) * s -
                   a_from_p_unchecked(p - eta * Vec4::Unit(k)) * s) /
                  (2 * eta);
  }
  rec.record("so3/B(p,s)", b_matrix(p, s), fd_b, seed);

  // Body angular velocity along a unit-length curve through p.
  Vec4 p_dot = smp.vec4();
  p_dot -= p.dot(p_dot) * p;
  auto a_on_sphere = [&](double tau) {
    return a_from_p_unchecked((p + tau * p_dot).normalized());
  };
  const Mat3 a_dot_p = (a_on_sphere(eta) - a_on_sphere(-eta)) / (2 * eta);
  rec.record("so3/Bp", 2.0 * b_p_matrix(p) * p_dot, vee(a_from_p(p).transpose() * a_dot_p), seed);

  const Vec3 e = random_angles(smp);
  const Vec3 e_dot = smp.vec3();
  auto a_of = [&](double tau) { return a_from_eps(e + tau * e_dot); };
  const Mat3 a_dot_e = (a_of(eta) - a_of(-eta)) / (2 * eta);
  rec.record("so3/Beps", b_eps_matrix(e) * e_dot, vee(a_from_eps(e).transpose() * a_dot_e), seed);
  const Mat3 fd_bdot =
      (b_eps_matrix(e + eta * e_dot) - b_eps_matrix(e - eta * e_dot)) / (2 * eta);
  rec.record("so3/Beps_dot", b_eps_dot(e, e_dot), fd_bdot, seed);

  const EulerAngleDerivatives d = a_eps_derivatives(e, e_dot);
  Eigen::Matrix<double, 3, 9> an_part, fd_part;
  an_part << d.A_phi, d.A_theta, d.A_psi;
  for (int k = 0; k < 3; ++k) {
    fd_part.block<3, 3>(0, 3 * k) =
        (a_from_eps(e + eta * Vec3::Unit(k)) - a_from_eps(e - eta * Vec3::Unit(k))) / (2 * eta);
  }
  rec.record("so3/A_eps_partials", an_part, fd_part, seed);

  // With zero angle accelerations the second derivative of A is D.
  const double h2 = 1e-4;
  const Mat3 fd_d = (a_of(h2) - 2.0 * a_of(0.0) + a_of(-h2)) / (h2 * h2);
  rec.record("so3/D", d.D, fd_d, seed);
}

}  // namespace

bool FdReport::all_pass() const {
  for (const FdItem& item : items)
    if (!item.pass()) return false;
  return true;
}

std::vector<std::string> FdReport::failures() const {
  std::vector<std::string> out;
  for (const FdItem& item : items)
    if (!item.pass()) out.push_back(item.name);
  return out;
}

std::vector<std::string> fd_item_names() {
  std::vector<std::string> names;
  for (const char* form : kForms)
    for (GconKind kind : kKinds)
      for (const char* block : kBlocks)
        names.push_back(std::string("jacobian/") + form + "/" + to_string(kind) + "/" + block);
  for (const char* form : kForms)
    for (GconKind kind : kKinds) names.push_back(std::string("gamma/") + form + "/" + to_string(kind));
  for (GconKind kind : kKinds)
    for (const char* q : kSensitivities)
      names.push_back(std::string("sensitivity/") + to_string(kind) + "/" + q);
  for (const char* form : kForms)
    for (GconKind kind : kKinds)
      for (const char* q : {"r_r", "o_r"})
        names.push_back(std::string("reaction_position/") + form + "/" + to_string(kind) + "/" + q);
  for (const char* form : {"rp", "reps"})
    for (GconKind kind : kKinds)
      names.push_back(std::string("reaction_orientation/") + form + "/" + to_string(kind) + "/o_o");
  for (const char* item : kSo3Items) names.push_back(std::string("so3/") + item);
  return names;
}

FdReport fd_check(const FdCheckConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  Recorder rec(cfg);
  std::uint64_t group = 0;
  for (int f = 0; f < 3; ++f) {
    for (GconKind kind : kKinds) {
      ++group;
      for (int i = 0; i < cfg.reps; ++i) {
        const std::uint64_t seed = sample_seed(cfg.seed, group, i);
        if (f == 0) check_gcon_sample<FrameA>(rec, kForms[f], kind, seed);
        else if (f == 1) check_gcon_sample<FrameP>(rec, kForms[f], kind, seed);
        else check_gcon_sample<FrameE>(rec, kForms[f], kind, seed);
      }
    }
  }
  for (GconKind kind : kKinds) {
    ++group;
    for (int i = 0; i < cfg.reps; ++i) check_sensitivity_sample(rec, kind, sample_seed(cfg.seed, group, i));
  }
  ++group;
  for (int i = 0; i < cfg.reps; ++i) check_so3_sample(rec, sample_seed(cfg.seed, group, i));

  FdReport report;
  report.items = rec.take();
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace absmbd
