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

#include "absmbd/so3.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace absmbd;
using absmbd::testing::rel_err;
using absmbd::testing::Rng;

namespace {

constexpr double kPi = std::numbers::pi;

// Truncated power series of the matrix exponential.
Mat3 exp_series(const Vec3& theta, int terms) {
  const Mat3 t = tilde(theta);
  Mat3 sum = Mat3::Identity(), term = Mat3::Identity();
  for (int k = 1; k < terms; ++k) {
    term = term * t / static_cast<double>(k);
    sum += term;
  }
  return sum;
}

}  // namespace

TEST_CASE("tilde is the cross product matrix") {
  CHECK((tilde(Vec3(1, 0, 0)) * Vec3(0, 1, 0) - Vec3(0, 0, 1)).norm() == 0.0);
  Rng rng(1);
  for (int k = 0; k < 20; ++k) {
    const Vec3 v = rng.vec3(), w = rng.vec3();
    CHECK((tilde(v) * w - v.cross(w)).norm() < 1e-15);
    CHECK((tilde(v) * v).norm() < 1e-15);
    CHECK((tilde(v) + tilde(v).transpose()).norm() == 0.0);
  }
}

TEST_CASE("exp_so3 basics and series oracle") {
  CHECK((exp_so3(Vec3::Zero()) - Mat3::Identity()).norm() == 0.0);
  CHECK((exp_so3(Vec3(0, 0, kPi / 2)) * Vec3(1, 0, 0) - Vec3(0, 1, 0)).norm() < 1e-15);
  Rng rng(2);
  for (int k = 0; k < 100; ++k) {
    const Vec3 th = rng.unit3() * rng.uniform(0.0, 1.0);
    CHECK(rel_err(exp_so3(th), exp_series(th, 20)) < 1e-12);
  }
  // Small-angle branch agrees with the series too.
  const Vec3 tiny(3e-9, -1e-9, 2e-9);
  CHECK(rel_err(exp_so3(tiny), exp_series(tiny, 6)) < 1e-16);
}

TEST_CASE("exp_so3 group properties") {
  Rng rng(3);
  for (int k = 0; k < 100; ++k) {
    const Vec3 th = rng.vec3(-4.0, 4.0);
    const Mat3 R = exp_so3(th);
    CHECK((R.transpose() * R - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(std::abs(R.determinant() - 1.0) < 1e-13);
    CHECK((R * exp_so3(-th) - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-13);
    const Vec3 u = rng.unit3();
    const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2);
    CHECK((exp_so3(a * u) * exp_so3(b * u) - exp_so3((a + b) * u)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("pi_bar operators match perturbation oracles") {
  Rng rng(4);
  CHECK((pi_bar_local(Mat3::Identity(), Vec3(1, 2, 3)) + tilde(Vec3(1, 2, 3))).norm() == 0.0);
  CHECK((pi_bar_global(Mat3::Identity(), Vec3(1, 2, 3)) - tilde(Vec3(1, 2, 3))).norm() == 0.0);
  for (int k = 0; k < 50; ++k) {
    const Mat3 A = rng.rotation();
    const Vec3 s = rng.vec3(-2, 2), u = rng.unit3();
    double prev_local = 0.0, prev_global = 0.0;
    for (double eta : {1e-3, 1e-4, 1e-5}) {
      const Vec3 d = eta * u;
      const Mat3 Ap = A * exp_so3(d);
      const double el = (Ap * s - A * s - pi_bar_local(A, s) * d).norm();
      const double eg = (Ap.transpose() * s - A.transpose() * s - pi_bar_global(A, s) * d).norm();
      if (prev_local > 0.0) {
        // Second-order remainder: a tenfold smaller step shrinks it ~100x.
        CHECK(prev_local / el > 50.0);
        CHECK(prev_global / eg > 50.0);
      }
      prev_local = el;
      prev_global = eg;
    }
    const Vec3 d = 1e-6 * u;
    const Mat3 Ap = A * exp_so3(d);
    CHECK(rel_err(Vec3((Ap * s - A * s) / 1e-6), Vec3(pi_bar_local(A, s) * u)) < 1e-5);
    CHECK(rel_err(Vec3((Ap.transpose() * s - A.transpose() * s) / 1e-6),
                  Vec3(pi_bar_global(A, s) * u)) < 1e-5);
    CHECK((pi_bar_global(A, s) * (A.transpose() * s)).norm() < 1e-14);
    const Vec3 w = rng.vec3();
    CHECK(((A * tilde(w)) * s - pi_bar_local(A, s) * w).norm() < 1e-14);
  }
}

TEST_CASE("Euler parameter rotation matrix") {
  CHECK((a_from_p(Vec4(1, 0, 0, 0)) - Mat3::Identity()).norm() == 0.0);
  const double a = 0.7;
  CHECK((a_from_p(Vec4(std::cos(a / 2), 0, 0, std::sin(a / 2))) - exp_so3(Vec3(0, 0, a)))
            .cwiseAbs()
            .maxCoeff() < 1e-14);
  CHECK_THROWS(a_from_p(Vec4(1.1, 0, 0, 0)));
  Rng rng(5);
  for (int k = 0; k < 100; ++k) {
    const Vec4 p = rng.unit4();
    const Mat3 A = a_from_p(p);
    CHECK((A.transpose() * A - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-14);
    // Axis-angle recovered from p: angle 2 acos(e0), axis e / |e|.
    const double chi = 2.0 * std::acos(p[0]);
    const Vec3 axis = p.tail<3>().normalized();
    CHECK((A - exp_so3(chi * axis)).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("b_matrix is the exact derivative of A(p) s") {
  Rng rng(6);
  const Vec4 p0 = rng.unit4();
  CHECK(b_matrix(p0, Vec3::Zero()).norm() == 0.0);
  for (int k = 0; k < 100; ++k) {
    const Vec4 p = rng.unit4();
    const Vec3 s = rng.vec3(-2, 2);
    Mat34 fd;
    for (int c = 0; c < 4; ++c) {
      const Vec4 dp = 1e-6 * Vec4::Unit(c);
      fd.col(c) = (a_from_p_unchecked(p + dp) * s - a_from_p_unchecked(p - dp) * s) / 2e-6;
    }
    CHECK(rel_err(b_matrix(p, s), fd) < 1e-8);
    CHECK(rel_err(Vec3(b_matrix(p, s) * p), Vec3(2.0 * (a_from_p(p) + Mat3::Identity()) * s)) <
          1e-13);
  }
}

TEST_CASE("b_p_matrix identities") {
  Mat34 e;
  e << 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1;
  CHECK((b_p_matrix(Vec4(1, 0, 0, 0)) - e).norm() == 0.0);
  Rng rng(7);
  for (int k = 0; k < 100; ++k) {
    const Vec4 q = rng.vec4(-3, 3);
    CHECK((b_p_matrix(q) * q).norm() < 1e-14);
    const Vec4 p = rng.unit4();
    const Mat34 G = b_p_matrix(p);
    CHECK((G * G.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-14);
    // omega_bar = 2 G p_dot: compare against A' A_dot from the FD of A(p(t)).
    Vec4 pd = rng.vec4();
    pd -= p.dot(pd) * p;
    const double h = 1e-6;
    const Mat3 A_dot = (a_from_p_unchecked(p + h * pd) - a_from_p_unchecked(p - h * pd)) / (2 * h);
    const Mat3 w_tilde = a_from_p(p).transpose() * A_dot;
    CHECK(rel_err(tilde(2.0 * G * pd), w_tilde) < 1e-8);
  }
}

TEST_CASE("Euler angle rotation matrix") {
  CHECK((a_from_eps(Vec3::Zero()) - Mat3::Identity()).norm() == 0.0);
  CHECK((a_from_eps(Vec3(0.4, 0, 0)) - exp_so3(Vec3(0, 0, 0.4))).cwiseAbs().maxCoeff() < 1e-15);
  Rng rng(8);
  for (int k = 0; k < 50; ++k) {
    CHECK(std::abs(a_from_eps(rng.vec3(-3, 3)).determinant() - 1.0) < 1e-14);
  }
}

TEST_CASE("a_eps_derivatives match finite differences") {
  const auto zero = a_eps_derivatives(Vec3(0.2, 1.0, -0.3), Vec3::Zero());
  CHECK(zero.A_dot.norm() == 0.0);
  CHECK(zero.D.norm() == 0.0);
  Rng rng(9);
  for (int k = 0; k < 100; ++k) {
    const Vec3 e0 = rng.vec3(-3, 3), ed = rng.vec3(), edd = rng.vec3();
    const auto d = a_eps_derivatives(e0, ed, edd);
    auto eps_at = [&](double t) { return Vec3(e0 + t * ed + 0.5 * t * t * edd); };
    const double h1 = 1e-6;
    const Mat3 A_dot_fd = (a_from_eps(eps_at(h1)) - a_from_eps(eps_at(-h1))) / (2 * h1);
    CHECK(rel_err(d.A_dot, A_dot_fd) < 1e-7);
    const double h2 = 1e-4;
    const Mat3 A_ddot_fd =
        (a_from_eps(eps_at(h2)) - 2.0 * a_from_eps(e0) + a_from_eps(eps_at(-h2))) / (h2 * h2);
    CHECK(rel_err(d.A_ddot, A_ddot_fd) < 1e-5);
    // Partials against coordinate FD.
    for (int c = 0; c < 3; ++c) {
      const Vec3 de = h1 * Vec3::Unit(c);
      const Mat3 fd = (a_from_eps(e0 + de) - a_from_eps(e0 - de)) / (2 * h1);
      const Mat3& an = c == 0 ? d.A_phi : c == 1 ? d.A_theta : d.A_psi;
      CHECK(rel_err(an, fd) < 1e-7);
    }
  }
}

TEST_CASE("second partials of the Euler angle rotation matrix") {
  Rng rng(19);
  const int kPair[6][2] = {{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}};
  for (int k = 0; k < 100; ++k) {
    const Vec3 e0 = rng.vec3(-3, 3);
    const auto d = a_eps_derivatives(e0, Vec3::Zero());
    const double h = 1e-4;
    for (int i = 0; i < 6; ++i) {
      const int a = kPair[i][0], b = kPair[i][1];
      const Vec3 da = h * Vec3::Unit(a), db = h * Vec3::Unit(b);
      const Mat3 fd = (a_from_eps(e0 + da + db) - a_from_eps(e0 + da - db) -
                       a_from_eps(e0 - da + db) + a_from_eps(e0 - da - db)) /
                      (4 * h * h);
      CHECK(rel_err(d.A_second[i], fd) < 1e-6);
    }
  }
}

TEST_CASE("b_eps_partials match finite differences") {
  Rng rng(20);
  for (int k = 0; k < 100; ++k) {
    const Vec3 e0 = rng.vec3(-3, 3);
    const EulerRatePartials p = b_eps_partials(e0);
    const double h = 1e-6;
    const Vec3 dt = h * Vec3::Unit(1), dp = h * Vec3::Unit(2);
    CHECK(rel_err(p.B_theta, Mat3((b_eps_matrix(e0 + dt) - b_eps_matrix(e0 - dt)) / (2 * h))) <
          1e-8);
    CHECK(rel_err(p.B_psi, Mat3((b_eps_matrix(e0 + dp) - b_eps_matrix(e0 - dp)) / (2 * h))) <
          1e-8);
    const Vec3 dphi = Vec3::Unit(0);
    CHECK((b_eps_matrix(e0 + dphi) - b_eps_matrix(e0)).norm() == 0.0);
  }
}

TEST_CASE("b_eps_matrix maps angle rates to body angular velocity") {
  CHECK(std::abs(b_eps_matrix(Vec3(0.3, 0.0, 1.1)).determinant()) < 1e-15);
  Mat3 e;
  e << 0, 1, 0, 1, 0, 0, 0, 0, 1;
  CHECK((b_eps_matrix(Vec3(0, kPi / 2, 0)) - e).cwiseAbs().maxCoeff() < 1e-15);
  Rng rng(10);
  for (int k = 0; k < 100; ++k) {
    Vec3 eps = rng.vec3(-3, 3);
    eps[1] = rng.uniform(0.2, kPi - 0.2);
    const Vec3 ed = rng.vec3();
    const auto d = a_eps_derivatives(eps, ed);
    CHECK((tilde(b_eps_matrix(eps) * ed) - d.A.transpose() * d.A_dot).cwiseAbs().maxCoeff() <
          1e-12);
    const double h = 1e-6;
    const Mat3 fd = (b_eps_matrix(eps + h * ed) - b_eps_matrix(eps - h * ed)) / (2 * h);
    CHECK(rel_err(b_eps_dot(eps, ed), fd) < 1e-8);
  }
}

TEST_CASE("orientation extraction round trips") {
  const auto id = eps_from_matrix(Mat3::Identity());
  CHECK(id.gimbal_lock);
  CHECK(id.eps.norm() == 0.0);
  const double a = 0.9;
  const Vec4 p = p_from_matrix(exp_so3(Vec3(0, 0, a)));
  CHECK((p - Vec4(std::cos(a / 2), 0, 0, std::sin(a / 2))).norm() < 1e-15);
  Rng rng(11);
  for (int k = 0; k < 100; ++k) {
    const Mat3 A = rng.rotation();
    const Vec4 q = p_from_matrix(A);
    CHECK(q[0] >= 0.0);
    CHECK((a_from_p(q) - A).cwiseAbs().maxCoeff() < 1e-12);
    const auto e = eps_from_matrix(A);
    CHECK_FALSE(e.gimbal_lock);
    CHECK(e.eps[1] > 0.0);
    CHECK(e.eps[1] < kPi);
    CHECK((a_from_eps(e.eps) - A).cwiseAbs().maxCoeff() < 1e-12);
  }
  // Near-pi rotations exercise the non-trace branches.
  for (int c = 0; c < 3; ++c) {
    const Mat3 A = exp_so3((kPi - 1e-9) * Vec3::Unit(c));
    CHECK((a_from_p(p_from_matrix(A)) - A).cwiseAbs().maxCoeff() < 1e-12);
  }
  // theta = pi gimbal lock.
  const Mat3 flip = rot_z(0.3) * rot_x(kPi);
  const auto f = eps_from_matrix(flip);
  CHECK(f.gimbal_lock);
  CHECK((a_from_eps(f.eps) - flip).cwiseAbs().maxCoeff() < 1e-12);
}
