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

#ifndef ABSMBD_SO3_HPP_
#define ABSMBD_SO3_HPP_

#include <Eigen/Dense>

namespace absmbd {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat34 = Eigen::Matrix<double, 3, 4>;
using Mat4 = Eigen::Matrix4d;

// [e0, e1, e2, e3]; scalar part first.
using EulerParams = Vec4;
// [phi, theta, psi], intrinsic z-x-z.
using EulerAngles = Vec3;

// Cross-product matrix: tilde(v) * w == v.cross(w).
Mat3 tilde(const Vec3& v);

// Rodrigues exponential of the rotation vector theta.
Mat3 exp_so3(const Vec3& theta);

// -A * tilde(s_bar): maps a body-frame rotation increment to d(A s_bar).
Mat3 pi_bar_local(const Mat3& A, const Vec3& s_bar);

// tilde(A^T s): maps a body-frame rotation increment to d(A^T s).
Mat3 pi_bar_global(const Mat3& A, const Vec3& s);

// Rotation matrix of a unit Euler parameter vector. Throws std::invalid_argument
// when | |p| - 1 | > 1e-9.
Mat3 a_from_p(const EulerParams& p);

// Same polynomial without the normalization check. Newton iterates on p are
// only approximately unit length, and solvers need the raw quadratic form.
Mat3 a_from_p_unchecked(const EulerParams& p);

// d(A(p) s_bar)/dp, exact for any p (A(p) taken as the quadratic form).
Mat34 b_matrix(const EulerParams& p, const Vec3& s_bar);

// Rate matrix: omega_bar = 2 * b_p_matrix(p) * p_dot for unit p.
Mat34 b_p_matrix(const EulerParams& p);

// Single-axis factors: A = a1(phi) * a2(theta) * a3(psi).
Mat3 rot_z(double angle);
Mat3 rot_x(double angle);
Mat3 a_from_eps(const EulerAngles& eps);

struct EulerAngleDerivatives {
  Mat3 A;
  Mat3 A_dot;
  // Velocity-only part of A_ddot.
  Mat3 D;
  // Coefficients of phi_ddot, theta_ddot, psi_ddot in A_ddot; also the
  // partial derivatives of A with respect to each angle.
  Mat3 A_phi;
  Mat3 A_theta;
  Mat3 A_psi;
  Mat3 A_ddot;
  // Second partial derivatives of A, ordered phi-phi, phi-theta, phi-psi,
  // theta-theta, theta-psi, psi-psi.
  Mat3 A_second[6];
};

EulerAngleDerivatives a_eps_derivatives(const EulerAngles& eps,
                                        const Vec3& eps_dot,
                                        const Vec3& eps_ddot = Vec3::Zero());

// omega_bar = b_eps_matrix(eps) * eps_dot.
Mat3 b_eps_matrix(const EulerAngles& eps);
// Time derivative of b_eps_matrix along eps_dot.
Mat3 b_eps_dot(const EulerAngles& eps, const Vec3& eps_dot);
// Partial derivatives of b_eps_matrix with respect to theta and psi (it does
// not depend on phi).
struct EulerRatePartials {
  Mat3 B_theta;
  Mat3 B_psi;
};
EulerRatePartials b_eps_partials(const EulerAngles& eps);

struct EulerAngleExtraction {
  EulerAngles eps;
  // Set when |A(2,2)| >= 1 - 1e-12. Then psi is fixed to 0 and phi carries
  // the whole rotation about z.
  bool gimbal_lock = false;
};

// theta in [0, pi].
EulerAngleExtraction eps_from_matrix(const Mat3& A);

// Largest-diagonal branch selection; result has e0 >= 0.
EulerParams p_from_matrix(const Mat3& A);

}  // namespace absmbd

#endif  // ABSMBD_SO3_HPP_
