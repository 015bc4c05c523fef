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
#include <functional>

#include "absmbd/gcon.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace absmbd;
using absmbd::testing::rel_err;
using absmbd::testing::Rng;

namespace {

// Native-coordinate handling per formulation, written independently of the
// library frames' derivative code.
template <class F>
struct Native;

template <>
struct Native<FrameA> {
  static constexpr int K = 3;
  using C = Mat3;
  using R = Vec3;
  static C coords(Rng& rng) { return rng.rotation(); }
  static R rates(Rng& rng) { return rng.vec3(); }
  static C perturb(const C& a, int k, double eta) { return a * exp_so3(eta * Vec3::Unit(k)); }
  // Motion with o(0) = c, rate(0) = w, rate_dot(0) = wd.
  static C along(const C& c, const R& w, const R& wd, double t) {
    return c * exp_so3(w * t + 0.5 * t * t * wd);
  }
  static FrameA frame(const C& c, const R& w) { return FrameA(c, w); }
};

template <>
struct Native<FrameP> {
  static constexpr int K = 4;
  using C = Vec4;
  using R = Vec4;
  static C coords(Rng& rng) { return rng.unit4(); }
  static R rates(Rng& rng) { return rng.vec4(); }
  static C perturb(const C& p, int k, double eta) { return p + eta * Vec4::Unit(k); }
  static C along(const C& c, const R& w, const R& wd, double t) {
    return c + t * w + 0.5 * t * t * wd;
  }
  static FrameP frame(const C& c, const R& w) { return FrameP(c, w); }
};

template <>
struct Native<FrameE> {
  static constexpr int K = 3;
  using C = Vec3;
  using R = Vec3;
  static C coords(Rng& rng) {
    C e = rng.vec3(-3, 3);
    e[1] = rng.uniform(0.2, 2.9);
    return e;
  }
  static R rates(Rng& rng) { return rng.vec3(); }
  static C perturb(const C& e, int k, double eta) { return e + eta * Vec3::Unit(k); }
  static C along(const C& c, const R& w, const R& wd, double t) {
    return c + t * w + 0.5 * t * t * wd;
  }
  static FrameE frame(const C& c, const R& w) { return FrameE(c, w); }
};

template <class F>
struct BodySample {
  using N = Native<F>;
  Vec3 r, r_dot, r_ddot;
  typename N::C o;
  typename N::R o_dot, o_ddot;
  bool ground = false;

  static BodySample random(Rng& rng, bool ground) {
    BodySample s;
    s.ground = ground;
    if (ground) {
      s.r = s.r_dot = s.r_ddot = Vec3::Zero();
      s.o = N::coords(rng);  // overwritten below
      s.o = BodyView<F>::make_ground().frame.rotation().eval() == Mat3::Identity()
                ? identity()
                : s.o;
      s.o_dot.setZero();
      s.o_ddot.setZero();
      return s;
    }
    s.r = rng.vec3(-2, 2);
    s.r_dot = rng.vec3();
    s.r_ddot = rng.vec3();
    s.o = N::coords(rng);
    s.o_dot = N::rates(rng);
    s.o_ddot = N::rates(rng);
    return s;
  }
  static typename N::C identity() {
    if constexpr (std::is_same_v<F, FrameA>) return Mat3::Identity();
    else if constexpr (std::is_same_v<F, FrameP>) return Vec4(1, 0, 0, 0);
    else return Vec3::Zero();
  }
  BodyView<F> view() const {
    if (ground) return BodyView<F>::make_ground();
    BodyView<F> v;
    v.r = r;
    v.r_dot = r_dot;
    v.frame = N::frame(o, o_dot);
    return v;
  }
  BodyView<F> view_at(double t) const {
    if (ground) return BodyView<F>::make_ground();
    BodyView<F> v;
    v.r = r + t * r_dot + 0.5 * t * t * r_ddot;
    v.frame = N::frame(N::along(o, o_dot, o_ddot, t), typename N::R(o_dot + t * o_ddot));
    return v;
  }
};

GconSpec random_gcon(GconKind kind, Rng& rng, bool rheonomic) {
  GconSpec g;
  g.kind = kind;
  g.body_i = 1;
  g.body_j = 2;
  g.a_i = rng.vec3(-2, 2);
  g.a_j = rng.vec3(-2, 2);
  g.s_p = rng.vec3(-2, 2);
  g.s_q = rng.vec3(-2, 2);
  g.c = rng.unit3();
  g.driver = rheonomic ? DriverFn::cosine(3.0, 0.5, 1.3, 0.2) : DriverFn::constant(1.5);
  return g;
}

constexpr GconKind kKinds[] = {GconKind::kDP1, GconKind::kDP2, GconKind::kD, GconKind::kCD};

template <class F>
void check_jacobian_fd(std::uint64_t seed, double tol) {
  using N = Native<F>;
  Rng rng(seed);
  for (GconKind kind : kKinds) {
    for (int rep = 0; rep < 100; ++rep) {
      const GconSpec g = random_gcon(kind, rng, true);
      const bool ground_i = rep % 5 == 4;
      auto si = BodySample<F>::random(rng, ground_i);
      auto sj = BodySample<F>::random(rng, false);
      const double t = rng.uniform(0, 2);
      const auto row = gcon_jacobian(g, si.view(), sj.view());
      CHECK(row.has_i == !ground_i);
      const double eta = 1e-6;
      auto phi_of = [&](const BodySample<F>& a, const BodySample<F>& b) {
        return gcon_phi(g, a.view(), b.view(), t);
      };
      for (int body = 0; body < 2; ++body) {
        BodySample<F>& s = body == 0 ? si : sj;
        if (s.ground) continue;
        Eigen::Matrix<double, 1, 3> fd_r;
        Eigen::Matrix<double, 1, N::K> fd_o;
        for (int k = 0; k < 3; ++k) {
          const Vec3 r0 = s.r;
          s.r = r0 + eta * Vec3::Unit(k);
          const double fp = phi_of(si, sj);
          s.r = r0 - eta * Vec3::Unit(k);
          const double fm = phi_of(si, sj);
          s.r = r0;
          fd_r[k] = (fp - fm) / (2 * eta);
        }
        for (int k = 0; k < N::K; ++k) {
          const auto o0 = s.o;
          s.o = N::perturb(o0, k, eta);
          const double fp = phi_of(si, sj);
          s.o = N::perturb(o0, k, -eta);
          const double fm = phi_of(si, sj);
          s.o = o0;
          fd_o[k] = (fp - fm) / (2 * eta);
        }
        CAPTURE(to_string(kind));
        CAPTURE(body);
        CHECK(rel_err(body == 0 ? row.r_i : row.r_j, fd_r) < tol);
        CHECK(rel_err(body == 0 ? row.o_i : row.o_j, fd_o) < tol);
      }
    }
  }
}

template <class F>
void check_gamma_fd(std::uint64_t seed) {
  using N = Native<F>;
  Rng rng(seed);
  for (GconKind kind : kKinds) {
    for (int rep = 0; rep < 100; ++rep) {
      const GconSpec g = random_gcon(kind, rng, true);
      const auto si = BodySample<F>::random(rng, rep % 5 == 4);
      const auto sj = BodySample<F>::random(rng, false);
      const double t0 = rng.uniform(0, 2);
      // Phi along the synthetic motion; the driver time advances with it.
      auto phi_at = [&](double tau) { return gcon_phi(g, si.view_at(tau), sj.view_at(tau), t0 + tau); };
      const double h = 1e-3;
      const double phi_dd = (-phi_at(2 * h) + 16 * phi_at(h) - 30 * phi_at(0) + 16 * phi_at(-h) -
                             phi_at(-2 * h)) /
                            (12 * h * h);
      const auto row = gcon_jacobian(g, si.view(), sj.view());
      double acc = 0.0;
      if (!si.ground) acc += row.r_i.dot(si.r_ddot) + row.o_i.dot(si.o_ddot);
      acc += row.r_j.dot(sj.r_ddot) + row.o_j.dot(sj.o_ddot);
      const double gam = gcon_gamma(g, si.view(), sj.view(), t0);
      CAPTURE(to_string(kind));
      CHECK(rel_err(acc - gam, phi_dd) < 1e-5);
      (void)sizeof(N);
    }
  }
}

}  // namespace

TEST_CASE("phi examples") {
  auto ground = BodyView<FrameA>::make_ground();
  BodyView<FrameA> b;
  GconSpec g;
  g.kind = GconKind::kDP1;
  g.a_i = Vec3::UnitX();
  g.a_j = Vec3::UnitY();
  CHECK(phi(g, b, b, 0.0) == 0.0);

  g = GconSpec();
  g.kind = GconKind::kD;
  g.driver = DriverFn::constant(4.0);
  BodyView<FrameA> b2;
  b2.r = Vec3(2, 0, 0);
  CHECK(phi(g, ground, b2, 0.0) == 0.0);

  g = GconSpec();
  g.kind = GconKind::kCD;
  g.c = Vec3::UnitZ();
  g.s_p = Vec3(0, 0, 3);
  g.s_q = Vec3(0, 0, 1);
  g.driver = DriverFn::constant(-2.0);
  CHECK(phi(g, ground, b, 0.0) == 0.0);
}

TEST_CASE("rA Jacobian rows: structure and perturbation oracle") {
  Rng rng(31);
  const auto si = BodySample<FrameA>::random(rng, false), sj = BodySample<FrameA>::random(rng, false);
  GconSpec g = random_gcon(GconKind::kDP1, rng, false);
  const auto row = jac_rA(g, si.view(), sj.view());
  CHECK(row.r_i.norm() == 0.0);
  CHECK(row.r_j.norm() == 0.0);
  // Closed-form orientation block of the dot-product constraint.
  const Mat3& Ai = si.view().frame.A;
  const Mat3& Aj = sj.view().frame.A;
  const Eigen::RowVector3d expect = -g.a_j.transpose() * Aj.transpose() * Ai * tilde(g.a_i);
  CHECK((row.o_i - expect).norm() < 1e-14);

  g = GconSpec();
  g.kind = GconKind::kCD;
  g.c = Vec3::UnitX();
  g.s_q = Vec3::UnitZ();
  BodyView<FrameA> id;
  const auto cd = jac_rA(g, BodyView<FrameA>::make_ground(), id);
  CHECK_FALSE(cd.has_i);
  // -c' tilde(s_q) with c = x, s_q = z: -(row 0 of tilde(z)) = (0, 1, 0).
  CHECK((cd.o_j - Eigen::RowVector3d(0, 1, 0)).norm() == 0.0);

  check_jacobian_fd<FrameA>(32, 1e-6);
}

TEST_CASE("rp Jacobian rows match finite differences in raw p") { check_jacobian_fd<FrameP>(33, 1e-6); }

TEST_CASE("reps Jacobian rows match finite differences in the angles") {
  check_jacobian_fd<FrameE>(34, 1e-6);
}

TEST_CASE("position blocks agree across formulations") {
  Rng rng(35);
  for (GconKind kind : kKinds) {
    const GconSpec g = random_gcon(kind, rng, false);
    const Mat3 Ai = rng.rotation(), Aj = rng.rotation();
    const Vec3 ri = rng.vec3(-2, 2), rj = rng.vec3(-2, 2);
    BodyView<FrameA> ai, aj;
    BodyView<FrameP> pi, pj;
    BodyView<FrameE> ei, ej;
    ai.r = pi.r = ei.r = ri;
    aj.r = pj.r = ej.r = rj;
    ai.frame = FrameA(Ai, Vec3::Zero());
    aj.frame = FrameA(Aj, Vec3::Zero());
    pi.frame = FrameP(p_from_matrix(Ai), Vec4::Zero());
    pj.frame = FrameP(p_from_matrix(Aj), Vec4::Zero());
    ei.frame = FrameE(eps_from_matrix(Ai).eps, Vec3::Zero());
    ej.frame = FrameE(eps_from_matrix(Aj).eps, Vec3::Zero());
    const auto ra = jac_rA(g, ai, aj);
    const auto rp = jac_rp(g, pi, pj);
    const auto re = jac_reps(g, ei, ej);
    CHECK((ra.r_i - rp.r_i).norm() < 1e-13);
    CHECK((ra.r_j - rp.r_j).norm() < 1e-13);
    CHECK((ra.r_i - re.r_i).norm() < 1e-13);
    CHECK((ra.r_j - re.r_j).norm() < 1e-13);
  }
}

TEST_CASE("nu is the driver rate") {
  GconSpec g;
  CHECK(nu(g, 1.0) == 0.0);
  g.driver = DriverFn::cosine(1.5707963267948966, 0.7853981633974483, 2.0, 0.0);
  CHECK(nu(g, 0.7853981633974483) == doctest::Approx(-1.5707963267948966).epsilon(1e-14));
  const double h = 1e-6, t = 0.3;
  CHECK(rel_err(nu(g, t), (eval_driver(g.driver, t + h).f - eval_driver(g.driver, t - h).f) / (2 * h)) <
        1e-8);
}

TEST_CASE("gamma vanishes at rest with scleronomic drivers") {
  Rng rng(36);
  for (GconKind kind : kKinds) {
    const GconSpec g = random_gcon(kind, rng, false);
    BodyView<FrameA> ai, aj;
    ai.frame = FrameA(rng.rotation(), Vec3::Zero());
    aj.frame = FrameA(rng.rotation(), Vec3::Zero());
    ai.r = rng.vec3();
    aj.r = rng.vec3();
    CHECK(gamma_rA(g, ai, aj, 0.3) == 0.0);
    BodyView<FrameP> pi, pj;
    pi.frame = FrameP(rng.unit4(), Vec4::Zero());
    pj.frame = FrameP(rng.unit4(), Vec4::Zero());
    CHECK(gamma_rp(g, pi, pj, 0.3) == 0.0);
    BodyView<FrameE> ei, ej;
    ei.frame = FrameE(rng.vec3(), Vec3::Zero());
    ej.frame = FrameE(rng.vec3(), Vec3::Zero());
    CHECK(gamma_reps(g, ei, ej, 0.3) == 0.0);
  }
}

TEST_CASE("gamma matches the second time derivative of phi") {
  check_gamma_fd<FrameA>(37);
  check_gamma_fd<FrameP>(38);
  check_gamma_fd<FrameE>(39);
}

TEST_CASE("reaction sensitivities match finite differences of the reaction terms") {
  Rng rng(40);
  for (GconKind kind : kKinds) {
    for (int rep = 0; rep < 100; ++rep) {
      const GconSpec g = random_gcon(kind, rng, false);
      const double lambda = rng.uniform(-3, 3);
      auto si = BodySample<FrameA>::random(rng, false);
      auto sj = BodySample<FrameA>::random(rng, false);
      const auto sens = reaction_sensitivities_rA(g, si.view(), sj.view(), lambda);
      // Generalized reaction terms from the Jacobian row definition.
      auto terms = [&]() {
        const auto row = jac_rA(g, si.view(), sj.view());
        Eigen::Matrix<double, 12, 1> v;
        v << lambda * row.r_i.transpose(), lambda * row.o_i.transpose(), lambda * row.r_j.transpose(),
            lambda * row.o_j.transpose();
        return v;
      };
      const double eta = 1e-6;
      for (int c = 0; c < 2; ++c) {
        BodySample<FrameA>& s = c == 0 ? si : sj;
        Eigen::Matrix<double, 12, 3> d_r, d_th;
        for (int k = 0; k < 3; ++k) {
          const Vec3 r0 = s.r;
          s.r = r0 + eta * Vec3::Unit(k);
          const auto tp = terms();
          s.r = r0 - eta * Vec3::Unit(k);
          const auto tm = terms();
          s.r = r0;
          d_r.col(k) = (tp - tm) / (2 * eta);
          const Mat3 A0 = s.o;
          s.o = A0 * exp_so3(eta * Vec3::Unit(k));
          const auto ap = terms();
          s.o = A0 * exp_so3(-eta * Vec3::Unit(k));
          const auto am = terms();
          s.o = A0;
          d_th.col(k) = (ap - am) / (2 * eta);
        }
        for (int b = 0; b < 2; ++b) {
          CAPTURE(to_string(kind));
          CAPTURE(b);
          CAPTURE(c);
          CHECK(rel_err(sens.force_r[b][c], Mat3(d_r.block<3, 3>(6 * b, 0))) < 1e-6);
          CHECK(rel_err(sens.torque_r[b][c], Mat3(d_r.block<3, 3>(6 * b + 3, 0))) < 1e-6);
          CHECK(rel_err(sens.force_theta[b][c], Mat3(d_th.block<3, 3>(6 * b, 0))) < 1e-6);
          CHECK(rel_err(sens.torque_theta[b][c], Mat3(d_th.block<3, 3>(6 * b + 3, 0))) < 1e-6);
        }
      }
    }
  }
}

TEST_CASE("reaction sensitivity structure") {
  Rng rng(41);
  for (GconKind kind : kKinds) {
    const GconSpec g = random_gcon(kind, rng, false);
    const auto si = BodySample<FrameA>::random(rng, false), sj = BodySample<FrameA>::random(rng, false);
    const auto zero = reaction_sensitivities_rA(g, si.view(), sj.view(), 0.0);
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) {
        CHECK(zero.force_r[b][c].norm() == 0.0);
        CHECK(zero.force_theta[b][c].norm() == 0.0);
        CHECK(zero.torque_r[b][c].norm() == 0.0);
        CHECK(zero.torque_theta[b][c].norm() == 0.0);
      }
    const auto s = reaction_sensitivities_rA(g, si.view(), sj.view(), 1.7);
    if (kind == GconKind::kCD || kind == GconKind::kDP1) {
      for (int c = 0; c < 2; ++c) {
        CHECK(s.force_r[0][c].norm() == 0.0);
        CHECK(s.force_theta[0][c].norm() == 0.0);
      }
    }
    // Reaction forces of D and CD are equal and opposite.
    const auto row = jac_rA(g, si.view(), sj.view());
    if (kind == GconKind::kD || kind == GconKind::kCD) CHECK((row.r_i + row.r_j).norm() < 1e-14);
  }
}

TEST_CASE("position derivative of the generalized reaction terms") {
  auto run = [](auto tag, std::uint64_t seed) {
    using F = decltype(tag);
    using N = Native<F>;
    Rng rng(seed);
    for (GconKind kind : kKinds) {
      for (int rep = 0; rep < 50; ++rep) {
        const GconSpec g = random_gcon(kind, rng, false);
        const double lambda = rng.uniform(-3, 3);
        auto si = BodySample<F>::random(rng, false);
        auto sj = BodySample<F>::random(rng, false);
        const auto an = reaction_position_derivative(g, si.view(), sj.view(), lambda);
        const double eta = 1e-6;
        for (int c = 0; c < 2; ++c) {
          BodySample<F>& s = c == 0 ? si : sj;
          Eigen::Matrix<double, 2 * (3 + N::K), 3> fd;
          for (int k = 0; k < 3; ++k) {
            auto terms = [&]() {
              const auto row = gcon_jacobian(g, si.view(), sj.view());
              Eigen::Matrix<double, 2 * (3 + N::K), 1> v;
              v << row.r_i.transpose(), row.o_i.transpose(), row.r_j.transpose(), row.o_j.transpose();
              return Eigen::Matrix<double, 2 * (3 + N::K), 1>(lambda * v);
            };
            const Vec3 r0 = s.r;
            s.r = r0 + eta * Vec3::Unit(k);
            const auto tp = terms();
            s.r = r0 - eta * Vec3::Unit(k);
            const auto tm = terms();
            s.r = r0;
            fd.col(k) = (tp - tm) / (2 * eta);
          }
          for (int b = 0; b < 2; ++b) {
            const int off = b * (3 + N::K);
            CHECK(rel_err(an.r_r[b][c], Mat3(fd.template block<3, 3>(off, 0))) < 1e-6);
            CHECK(rel_err(an.o_r[b][c],
                          Eigen::Matrix<double, N::K, 3>(fd.template block<N::K, 3>(off + 3, 0))) <
                  1e-6);
          }
        }
      }
    }
  };
  run(FrameA(), 42);
  run(FrameP(), 43);
  run(FrameE(), 44);
}

TEST_CASE("frame second derivatives of projected world vectors") {
  auto run = [](auto tag, std::uint64_t seed) {
    using F = decltype(tag);
    using N = Native<F>;
    Rng rng(seed);
    for (int rep = 0; rep < 100; ++rep) {
      const typename N::C o = N::coords(rng);
      const typename N::R od = N::rates(rng);
      const Vec3 s = rng.vec3(-2, 2), w = rng.vec3(-2, 2);
      const auto an = N::frame(o, od).ddworld(s, w);
      const double eta = 1e-6;
      Eigen::Matrix<double, N::K, N::K> fd;
      for (int k = 0; k < N::K; ++k) {
        const auto gp = (w.transpose() * N::frame(N::perturb(o, k, eta), od).dworld(s)).eval();
        const auto gm = (w.transpose() * N::frame(N::perturb(o, k, -eta), od).dworld(s)).eval();
        fd.col(k) = ((gp - gm) / (2 * eta)).transpose();
      }
      CHECK(rel_err(an, fd) < 1e-7);
      CHECK((an - an.transpose()).norm() == 0.0);
    }
  };
  run(FrameP(), 50);
  run(FrameE(), 51);
}

TEST_CASE("orientation derivative of the generalized reaction terms") {
  auto run = [](auto tag, std::uint64_t seed) {
    using F = decltype(tag);
    using N = Native<F>;
    Rng rng(seed);
    for (GconKind kind : kKinds) {
      for (int rep = 0; rep < 50; ++rep) {
        const GconSpec g = random_gcon(kind, rng, false);
        const double lambda = rng.uniform(-3, 3);
        const bool ground_i = rep % 5 == 4;
        auto si = BodySample<F>::random(rng, ground_i);
        auto sj = BodySample<F>::random(rng, false);
        const auto an = reaction_orientation_derivative(g, si.view(), sj.view(), lambda);
        const double eta = 1e-6;
        for (int c = 0; c < 2; ++c) {
          BodySample<F>& s = c == 0 ? si : sj;
          if (s.ground) continue;
          Eigen::Matrix<double, N::K, N::K> fd[2];
          for (int k = 0; k < N::K; ++k) {
            const auto o0 = s.o;
            s.o = N::perturb(o0, k, eta);
            const auto rp = gcon_jacobian(g, si.view(), sj.view());
            s.o = N::perturb(o0, k, -eta);
            const auto rm = gcon_jacobian(g, si.view(), sj.view());
            s.o = o0;
            fd[0].col(k) = lambda * (rp.o_i - rm.o_i).transpose() / (2 * eta);
            fd[1].col(k) = lambda * (rp.o_j - rm.o_j).transpose() / (2 * eta);
          }
          CAPTURE(to_string(kind));
          CAPTURE(c);
          for (int b = 0; b < 2; ++b) {
            if (b == 0 && ground_i) continue;
            CHECK(rel_err(an.o_o[b][c], fd[b]) < 1e-6);
          }
        }
      }
    }
  };
  run(FrameP(), 52);
  run(FrameE(), 53);
}
