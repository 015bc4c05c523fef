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

#include "absmbd/so3.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace absmbd {

Mat3 tilde(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

Mat3 exp_so3(const Vec3& theta) {
  const double chi2 = theta.squaredNorm();
  const double chi = std::sqrt(chi2);
  double a, b;  // sin(chi)/chi, (1 - cos(chi))/chi^2
  if (chi < 1e-8) {
    a = 1.0 - chi2 / 6.0;
    b = 0.5 - chi2 / 24.0;
  } else {
    a = std::sin(chi) / chi;
    b = (1.0 - std::cos(chi)) / chi2;
  }
  const Mat3 t = tilde(theta);
  return Mat3::Identity() + a * t + b * (t * t);
}

Mat3 pi_bar_local(const Mat3& A, const Vec3& s_bar) { return -A * tilde(s_bar); }

Mat3 pi_bar_global(const Mat3& A, const Vec3& s) { return tilde(A.transpose() * s); }

Mat3 a_from_p_unchecked(const EulerParams& p) {
  const double e0 = p[0], e1 = p[1], e2 = p[2], e3 = p[3];
  Mat3 m;
  m << e0 * e0 + e1 * e1 - 0.5, e1 * e2 - e0 * e3, e1 * e3 + e0 * e2,
       e1 * e2 + e0 * e3, e0 * e0 + e2 * e2 - 0.5, e2 * e3 - e0 * e1,
       e1 * e3 - e0 * e2, e2 * e3 + e0 * e1, e0 * e0 + e3 * e3 - 0.5;
  return 2.0 * m;
}

Mat3 a_from_p(const EulerParams& p) {
  if (!(std::abs(p.norm() - 1.0) <= 1e-9)) {
    throw std::invalid_argument("a_from_p: Euler parameters are not unit length");
  }
  return a_from_p_unchecked(p);
}

Mat34 b_matrix(const EulerParams& p, const Vec3& s) {
  // Derivative of the quadratic form above, including its -1/2 diagonal
  // offsets (they are constants, so e0 enters with 2 e0^2).
  const double e0 = p[0];
  const Vec3 e = p.tail<3>();
  Mat34 b;
  b.col(0) = 2.0 * e0 * s + e.cross(s);
  b.rightCols<3>() = e.dot(s) * Mat3::Identity() + e * s.transpose() - e0 * tilde(s);
  return 2.0 * b;
}

Mat34 b_p_matrix(const EulerParams& p) {
  const double e0 = p[0], e1 = p[1], e2 = p[2], e3 = p[3];
  Mat34 g;
  g << -e1, e0, e3, -e2,
       -e2, -e3, e0, e1,
       -e3, e2, -e1, e0;
  return g;
}

Mat3 rot_z(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Mat3 m;
  m << c, -s, 0.0,
       s, c, 0.0,
       0.0, 0.0, 1.0;
  return m;
}

Mat3 rot_x(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Mat3 m;
  m << 1.0, 0.0, 0.0,
       0.0, c, -s,
       0.0, s, c;
  return m;
}

namespace {

Mat3 rot_z_d1(double c, double s) {
  Mat3 m;
  m << -s, -c, 0.0,
       c, -s, 0.0,
       0.0, 0.0, 0.0;
  return m;
}

Mat3 rot_z_d2(double c, double s) {
  Mat3 m;
  m << -c, s, 0.0,
       -s, -c, 0.0,
       0.0, 0.0, 0.0;
  return m;
}

Mat3 rot_x_d1(double c, double s) {
  Mat3 m;
  m << 0.0, 0.0, 0.0,
       0.0, -s, -c,
       0.0, c, -s;
  return m;
}

Mat3 rot_x_d2(double c, double s) {
  Mat3 m;
  m << 0.0, 0.0, 0.0,
       0.0, -c, s,
       0.0, -s, -c;
  return m;
}

}  // namespace

Mat3 a_from_eps(const EulerAngles& eps) {
  return rot_z(eps[0]) * rot_x(eps[1]) * rot_z(eps[2]);
}

EulerAngleDerivatives a_eps_derivatives(const EulerAngles& eps, const Vec3& eps_dot,
                                        const Vec3& eps_ddot) {
  const double c1 = std::cos(eps[0]), s1 = std::sin(eps[0]);
  const double c2 = std::cos(eps[1]), s2 = std::sin(eps[1]);
  const double c3 = std::cos(eps[2]), s3 = std::sin(eps[2]);

  Mat3 a1, a2, a3;
  a1 << c1, -s1, 0.0, s1, c1, 0.0, 0.0, 0.0, 1.0;
  a2 << 1.0, 0.0, 0.0, 0.0, c2, -s2, 0.0, s2, c2;
  a3 << c3, -s3, 0.0, s3, c3, 0.0, 0.0, 0.0, 1.0;
  const Mat3 a1d = rot_z_d1(c1, s1), a2d = rot_x_d1(c2, s2), a3d = rot_z_d1(c3, s3);
  const Mat3 a1dd = rot_z_d2(c1, s1), a2dd = rot_x_d2(c2, s2), a3dd = rot_z_d2(c3, s3);

  const double fd = eps_dot[0], td = eps_dot[1], pd = eps_dot[2];

  EulerAngleDerivatives out;
  const Mat3 a23 = a2 * a3;
  const Mat3 a12 = a1 * a2;
  out.A = a1 * a23;
  out.A_phi = a1d * a23;
  out.A_theta = a1 * a2d * a3;
  out.A_psi = a12 * a3d;
  out.A_dot = fd * out.A_phi + td * out.A_theta + pd * out.A_psi;
  Mat3* sec = out.A_second;
  sec[0] = a1dd * a23;
  sec[1] = a1d * a2d * a3;
  sec[2] = a1d * a2 * a3d;
  sec[3] = a1 * a2dd * a3;
  sec[4] = a1 * a2d * a3d;
  sec[5] = a12 * a3dd;
  out.D = fd * fd * sec[0] + td * td * sec[3] + pd * pd * sec[5] + 2.0 * fd * td * sec[1] +
          2.0 * td * pd * sec[4] + 2.0 * fd * pd * sec[2];
  out.A_ddot = eps_ddot[0] * out.A_phi + eps_ddot[1] * out.A_theta + eps_ddot[2] * out.A_psi +
               out.D;
  return out;
}

Mat3 b_eps_matrix(const EulerAngles& eps) {
  const double st = std::sin(eps[1]), ct = std::cos(eps[1]);
  const double sp = std::sin(eps[2]), cp = std::cos(eps[2]);
  Mat3 b;
  b << sp * st, cp, 0.0,
       cp * st, -sp, 0.0,
       ct, 0.0, 1.0;
  return b;
}

EulerRatePartials b_eps_partials(const EulerAngles& eps) {
  const double st = std::sin(eps[1]), ct = std::cos(eps[1]);
  const double sp = std::sin(eps[2]), cp = std::cos(eps[2]);
  EulerRatePartials out;
  out.B_theta << sp * ct, 0.0, 0.0,
                 cp * ct, 0.0, 0.0,
                 -st, 0.0, 0.0;
  out.B_psi << cp * st, -sp, 0.0,
               -sp * st, -cp, 0.0,
               0.0, 0.0, 0.0;
  return out;
}

Mat3 b_eps_dot(const EulerAngles& eps, const Vec3& eps_dot) {
  const EulerRatePartials d = b_eps_partials(eps);
  return eps_dot[1] * d.B_theta + eps_dot[2] * d.B_psi;
}

EulerAngleExtraction eps_from_matrix(const Mat3& A) {
  EulerAngleExtraction out;
  const double a22 = std::clamp(A(2, 2), -1.0, 1.0);
  if (std::abs(a22) >= 1.0 - 1e-12) {
    out.gimbal_lock = true;
    const double theta = a22 > 0.0 ? 0.0 : std::numbers::pi;
    // A = rot_z(phi) rot_x(theta) with psi := 0; first column is (c, s, 0).
    out.eps = EulerAngles(std::atan2(A(1, 0), A(0, 0)), theta, 0.0);
    return out;
  }
  out.eps = EulerAngles(std::atan2(A(0, 2), -A(1, 2)), std::acos(a22),
                        std::atan2(A(2, 0), A(2, 1)));
  return out;
}

EulerParams p_from_matrix(const Mat3& A) {
  const double tr = A.trace();
  EulerParams p;
  int k = 0;
  double best = tr;
  for (int i = 0; i < 3; ++i) {
    if (A(i, i) > best) {
      best = A(i, i);
      k = i + 1;
    }
  }
  if (k == 0) {
    const double e0 = 0.5 * std::sqrt(1.0 + tr);
    const double q = 0.25 / e0;
    p << e0, (A(2, 1) - A(1, 2)) * q, (A(0, 2) - A(2, 0)) * q, (A(1, 0) - A(0, 1)) * q;
  } else if (k == 1) {
    const double e1 = 0.5 * std::sqrt(1.0 + 2.0 * A(0, 0) - tr);
    const double q = 0.25 / e1;
    p << (A(2, 1) - A(1, 2)) * q, e1, (A(0, 1) + A(1, 0)) * q, (A(0, 2) + A(2, 0)) * q;
  } else if (k == 2) {
    const double e2 = 0.5 * std::sqrt(1.0 + 2.0 * A(1, 1) - tr);
    const double q = 0.25 / e2;
    p << (A(0, 2) - A(2, 0)) * q, (A(0, 1) + A(1, 0)) * q, e2, (A(1, 2) + A(2, 1)) * q;
  } else {
    const double e3 = 0.5 * std::sqrt(1.0 + 2.0 * A(2, 2) - tr);
    const double q = 0.25 / e3;
    p << (A(1, 0) - A(0, 1)) * q, (A(0, 2) + A(2, 0)) * q, (A(1, 2) + A(2, 1)) * q, e3;
  }
  if (p[0] < 0.0) p = -p;
  return p.normalized();
}

}  // namespace absmbd
