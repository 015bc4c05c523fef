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

#ifndef ABSMBD_GCON_HPP_
#define ABSMBD_GCON_HPP_

#include "absmbd/frames.hpp"
#include "absmbd/model.hpp"

namespace absmbd {

// One constraint row split per body: columns for r (3) and for the native
// orientation coordinates (K). Blocks of a ground body are left zero and
// flagged absent.
template <int K>
struct JacobianRow {
  Eigen::RowVector3d r_i = Eigen::RowVector3d::Zero();
  Eigen::Matrix<double, 1, K> o_i = Eigen::Matrix<double, 1, K>::Zero();
  Eigen::RowVector3d r_j = Eigen::RowVector3d::Zero();
  Eigen::Matrix<double, 1, K> o_j = Eigen::Matrix<double, 1, K>::Zero();
  bool has_i = true;
  bool has_j = true;
};

namespace detail {

template <class F>
Vec3 gap(const GconSpec& g, const BodyView<F>& bi, const BodyView<F>& bj) {
  return bj.r + bj.frame.world(g.s_q) - bi.r - bi.frame.world(g.s_p);
}

template <class F>
Vec3 gap_dot(const GconSpec& g, const BodyView<F>& bi, const BodyView<F>& bj) {
  return bj.r_dot + bj.frame.vel(g.s_q) - bi.r_dot - bi.frame.vel(g.s_p);
}

}  // namespace detail

template <class F>
double gcon_phi(const GconSpec& g, const BodyView<F>& bi, const BodyView<F>& bj, double t) {
  const double f = eval_driver(g.driver, t).f;
  switch (g.kind) {
    case GconKind::kDP1:
      return bi.frame.world(g.a_i).dot(bj.frame.world(g.a_j)) - f;
    case GconKind::kDP2:
      return bi.frame.world(g.a_i).dot(detail::gap(g, bi, bj)) - f;
    case GconKind::kD:
      return detail::gap(g, bi, bj).squaredNorm() - f;
    case GconKind::kCD:
      return g.c.dot(detail::gap(g, bi, bj)) - f;
  }
  return 0.0;
}

template <class F>
JacobianRow<F::kDim> gcon_jacobian(const GconSpec& g, const BodyView<F>& bi,
                                   const BodyView<F>& bj) {
  JacobianRow<F::kDim> row;
  row.has_i = !bi.ground;
  row.has_j = !bj.ground;
  switch (g.kind) {
    case GconKind::kDP1: {
      const Vec3 ai = bi.frame.world(g.a_i), aj = bj.frame.world(g.a_j);
      if (row.has_i) row.o_i = aj.transpose() * bi.frame.dworld(g.a_i);
      if (row.has_j) row.o_j = ai.transpose() * bj.frame.dworld(g.a_j);
      break;
    }
    case GconKind::kDP2: {
      const Vec3 ai = bi.frame.world(g.a_i), d = detail::gap(g, bi, bj);
      if (row.has_i) {
        row.r_i = -ai.transpose();
        row.o_i = d.transpose() * bi.frame.dworld(g.a_i) - ai.transpose() * bi.frame.dworld(g.s_p);
      }
      if (row.has_j) {
        row.r_j = ai.transpose();
        row.o_j = ai.transpose() * bj.frame.dworld(g.s_q);
      }
      break;
    }
    case GconKind::kD: {
      const Vec3 d = detail::gap(g, bi, bj);
      if (row.has_i) {
        row.r_i = -2.0 * d.transpose();
        row.o_i = -2.0 * d.transpose() * bi.frame.dworld(g.s_p);
      }
      if (row.has_j) {
        row.r_j = 2.0 * d.transpose();
        row.o_j = 2.0 * d.transpose() * bj.frame.dworld(g.s_q);
      }
      break;
    }
    case GconKind::kCD: {
      if (row.has_i) {
        row.r_i = -g.c.transpose();
        row.o_i = -g.c.transpose() * bi.frame.dworld(g.s_p);
      }
      if (row.has_j) {
        row.r_j = g.c.transpose();
        row.o_j = g.c.transpose() * bj.frame.dworld(g.s_q);
      }
      break;
    }
  }
  return row;
}

// Velocity right-hand side: df/dt.
inline double nu(const GconSpec& g, double t) { return eval_driver(g.driver, t).f_dot; }

// Acceleration right-hand side: row * o_ddot = gamma along any motion with
// Phi identically zero.
template <class F>
double gcon_gamma(const GconSpec& g, const BodyView<F>& bi, const BodyView<F>& bj, double t) {
  const double f_ddot = eval_driver(g.driver, t).f_ddot;
  const F& fi = bi.frame;
  const F& fj = bj.frame;
  switch (g.kind) {
    case GconKind::kDP1:
      return -(fi.quad(g.a_i).dot(fj.world(g.a_j)) + 2.0 * fi.vel(g.a_i).dot(fj.vel(g.a_j)) +
               fi.world(g.a_i).dot(fj.quad(g.a_j))) +
             f_ddot;
    case GconKind::kDP2: {
      const Vec3 d = detail::gap(g, bi, bj), d_dot = detail::gap_dot(g, bi, bj);
      const Vec3 d_quad = fj.quad(g.s_q) - fi.quad(g.s_p);
      return -(fi.quad(g.a_i).dot(d) + 2.0 * fi.vel(g.a_i).dot(d_dot) +
               fi.world(g.a_i).dot(d_quad)) +
             f_ddot;
    }
    case GconKind::kD: {
      const Vec3 d = detail::gap(g, bi, bj), d_dot = detail::gap_dot(g, bi, bj);
      const Vec3 d_quad = fj.quad(g.s_q) - fi.quad(g.s_p);
      return -2.0 * d_dot.squaredNorm() - 2.0 * d.dot(d_quad) + f_ddot;
    }
    case GconKind::kCD:
      return -g.c.dot(fj.quad(g.s_q) - fi.quad(g.s_p)) + f_ddot;
  }
  return 0.0;
}

// Derivatives of the generalized reaction terms row^T * lambda with respect
// to the body positions. Index [b][c]: reaction on body b (0 = i, 1 = j),
// perturbation of r of body c. Also, by symmetry of the Hessian of
// lambda * Phi, the transposes of o_r give d(row_r^T lambda)/do.
template <int K>
struct ReactionPositionDerivative {
  Mat3 r_r[2][2];
  Eigen::Matrix<double, K, 3> o_r[2][2];
};

template <class F>
ReactionPositionDerivative<F::kDim> reaction_position_derivative(const GconSpec& g,
                                                                 const BodyView<F>& bi,
                                                                 const BodyView<F>& bj,
                                                                 double lambda) {
  constexpr int K = F::kDim;
  ReactionPositionDerivative<K> out;
  for (int b = 0; b < 2; ++b) {
    for (int c = 0; c < 2; ++c) {
      out.r_r[b][c].setZero();
      out.o_r[b][c].setZero();
    }
  }
  if (g.kind == GconKind::kDP2) {
    const Eigen::Matrix<double, K, 3> w = bi.frame.dworld(g.a_i).transpose();
    out.o_r[0][0] = -lambda * w;
    out.o_r[0][1] = lambda * w;
  } else if (g.kind == GconKind::kD) {
    const double mu = 2.0 * lambda;
    out.r_r[0][0] = out.r_r[1][1] = mu * Mat3::Identity();
    out.r_r[0][1] = out.r_r[1][0] = -mu * Mat3::Identity();
    const Eigen::Matrix<double, K, 3> wi = bi.frame.dworld(g.s_p).transpose();
    const Eigen::Matrix<double, K, 3> wj = bj.frame.dworld(g.s_q).transpose();
    out.o_r[0][0] = mu * wi;
    out.o_r[0][1] = -mu * wi;
    out.o_r[1][0] = -mu * wj;
    out.o_r[1][1] = mu * wj;
  }
  return out;
}

// Orientation-orientation block of the Hessian of lambda * Phi for rp and
// reps. Index [b][c]: rows o of body b, columns o of body c; o_o[1][0] is
// the transpose of o_o[0][1]. Ground blocks are left zero.
template <int K>
struct ReactionOrientationDerivative {
  Eigen::Matrix<double, K, K> o_o[2][2];
};

template <class F>
ReactionOrientationDerivative<F::kDim> reaction_orientation_derivative(const GconSpec& g,
                                                                       const BodyView<F>& bi,
                                                                       const BodyView<F>& bj,
                                                                       double lambda) {
  using MatK = Eigen::Matrix<double, F::kDim, F::kDim>;
  ReactionOrientationDerivative<F::kDim> out;
  for (auto& row : out.o_o)
    for (auto& m : row) m.setZero();
  const F& fi = bi.frame;
  const F& fj = bj.frame;
  MatK ii = MatK::Zero(), ij = MatK::Zero(), jj = MatK::Zero();
  switch (g.kind) {
    case GconKind::kDP1: {
      const Vec3 ai = fi.world(g.a_i), aj = fj.world(g.a_j);
      if (!bi.ground) ii = fi.ddworld(g.a_i, aj);
      if (!bj.ground) jj = fj.ddworld(g.a_j, ai);
      if (!bi.ground && !bj.ground) ij = fi.dworld(g.a_i).transpose() * fj.dworld(g.a_j);
      break;
    }
    case GconKind::kDP2: {
      const Vec3 ai = fi.world(g.a_i), d = detail::gap(g, bi, bj);
      if (!bi.ground) {
        const auto da = fi.dworld(g.a_i), dp = fi.dworld(g.s_p);
        ii = fi.ddworld(g.a_i, d) - fi.ddworld(g.s_p, ai) - da.transpose() * dp -
             dp.transpose() * da;
      }
      if (!bj.ground) jj = fj.ddworld(g.s_q, ai);
      if (!bi.ground && !bj.ground) ij = fi.dworld(g.a_i).transpose() * fj.dworld(g.s_q);
      break;
    }
    case GconKind::kD: {
      const Vec3 d = detail::gap(g, bi, bj);
      if (!bi.ground) {
        const auto dp = fi.dworld(g.s_p);
        ii = 2.0 * (dp.transpose() * dp - fi.ddworld(g.s_p, d));
      }
      if (!bj.ground) {
        const auto dq = fj.dworld(g.s_q);
        jj = 2.0 * (dq.transpose() * dq + fj.ddworld(g.s_q, d));
      }
      if (!bi.ground && !bj.ground) {
        ij = -2.0 * fi.dworld(g.s_p).transpose() * fj.dworld(g.s_q);
      }
      break;
    }
    case GconKind::kCD:
      if (!bi.ground) ii = -fi.ddworld(g.s_p, g.c);
      if (!bj.ground) jj = fj.ddworld(g.s_q, g.c);
      break;
  }
  out.o_o[0][0] = lambda * ii;
  out.o_o[0][1] = lambda * ij;
  out.o_o[1][0] = lambda * ij.transpose();
  out.o_o[1][1] = lambda * jj;
  return out;
}

// Variations, for the rotation-matrix formulation, of the reaction terms as
// they enter the equations of motion: the force term Phi_r^T lambda (that is,
// minus the reaction force) and the torque term Pi^T lambda (minus the
// reaction torque, body frame). Index [b][c]: term on body b (0 = i, 1 = j)
// varied with respect to body c's position (force_r, torque_r) or body-frame
// rotation increment (force_theta, torque_theta).
struct ReactionSensitivity {
  Mat3 force_r[2][2];
  Mat3 force_theta[2][2];
  Mat3 torque_r[2][2];
  Mat3 torque_theta[2][2];
};

ReactionSensitivity reaction_sensitivities_rA(const GconSpec& g, const BodyView<FrameA>& bi,
                                              const BodyView<FrameA>& bj, double lambda);

// Convenience entry points per formulation.
inline double phi(const GconSpec& g, const BodyView<FrameA>& bi, const BodyView<FrameA>& bj,
                  double t) {
  return gcon_phi(g, bi, bj, t);
}
inline JacobianRow<3> jac_rA(const GconSpec& g, const BodyView<FrameA>& bi,
                             const BodyView<FrameA>& bj) {
  return gcon_jacobian(g, bi, bj);
}
inline JacobianRow<4> jac_rp(const GconSpec& g, const BodyView<FrameP>& bi,
                             const BodyView<FrameP>& bj) {
  return gcon_jacobian(g, bi, bj);
}
inline JacobianRow<3> jac_reps(const GconSpec& g, const BodyView<FrameE>& bi,
                               const BodyView<FrameE>& bj) {
  return gcon_jacobian(g, bi, bj);
}
inline double gamma_rA(const GconSpec& g, const BodyView<FrameA>& bi, const BodyView<FrameA>& bj,
                       double t) {
  return gcon_gamma(g, bi, bj, t);
}
inline double gamma_rp(const GconSpec& g, const BodyView<FrameP>& bi, const BodyView<FrameP>& bj,
                       double t) {
  return gcon_gamma(g, bi, bj, t);
}
inline double gamma_reps(const GconSpec& g, const BodyView<FrameE>& bi,
                         const BodyView<FrameE>& bj, double t) {
  return gcon_gamma(g, bi, bj, t);
}

}  // namespace absmbd

#endif  // ABSMBD_GCON_HPP_
