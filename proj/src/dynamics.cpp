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

#include "absmbd/dynamics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "absmbd/errors.hpp"
#include "system.hpp"

namespace absmbd {

namespace {

using detail::dispatch;
using detail::VecK;

template <int K>
using MatK = Eigen::Matrix<double, K, K>;

// Orientation part of the equations of motion of one body written as
// Mq(o) o_ddot = tau(o, o_dot).
template <int K>
struct BodyTerms {
  MatK<K> mass;
  VecK<K> tau;
};

BodyTerms<3> body_terms(detail::TraitsA, const Body& body, const BodyDynState& b) {
  const Mat3 J = body.inertia.asDiagonal();
  const Vec3& w = b.omega_bar;
  return {J, body.torque_bar - w.cross(J * w)};
}

BodyTerms<4> body_terms(detail::TraitsP, const Body& body, const BodyDynState& b) {
  const Mat34 G = b_p_matrix(b.p);
  const Mat34 G_dot = b_p_matrix(b.p_dot);
  const Mat3 J = body.inertia.asDiagonal();
  return {4.0 * G.transpose() * J * G,
          2.0 * G.transpose() * body.torque_bar + 8.0 * G_dot.transpose() * J * G_dot * b.p};
}

BodyTerms<3> body_terms(detail::TraitsE, const Body& body, const BodyDynState& b) {
  const Mat3 B = b_eps_matrix(b.eps);
  const Mat3 B_dot = b_eps_dot(b.eps, b.eps_dot);
  const Mat3 J = body.inertia.asDiagonal();
  const Vec3 w = B * b.eps_dot;
  return {B.transpose() * J * B,
          B.transpose() * (body.torque_bar - w.cross(J * w) - J * B_dot * b.eps_dot)};
}

// Partial derivatives of e = Mq o_ddot - tau at fixed o_ddot.
template <int K>
struct BodyDerivatives {
  MatK<K> mass;
  MatK<K> d_rate;
  MatK<K> d_coords;
};

// d(G(a)^T w)/da for the Euler parameter rate matrix G = b_p_matrix, which
// is linear in its argument.
Mat4 g_transpose_derivative(const Vec3& w) {
  Mat4 l;
  l(0, 0) = 0.0;
  l.block<1, 3>(0, 1) = -w.transpose();
  l.block<3, 1>(1, 0) = w;
  l.block<3, 3>(1, 1) = -tilde(w);
  return l;
}

BodyDerivatives<4> body_derivatives(detail::TraitsP, const Body& body, const BodyDynState& b) {
  // G(a) b = -G(b) a for any a, b.
  const Mat34 G = b_p_matrix(b.p);
  const Mat34 G_dot = b_p_matrix(b.p_dot);
  const Mat3 J = body.inertia.asDiagonal();
  const Mat34 JG = J * G;
  BodyDerivatives<4> d;
  d.mass = 4.0 * G.transpose() * JG;
  d.d_rate = -8.0 * g_transpose_derivative(J * (G_dot * b.p)) + 8.0 * G_dot.transpose() * JG;
  d.d_coords = 4.0 * g_transpose_derivative(JG * b.p_ddot) -
               4.0 * G.transpose() * J * b_p_matrix(b.p_ddot) -
               2.0 * g_transpose_derivative(body.torque_bar) -
               8.0 * G_dot.transpose() * J * G_dot;
  return d;
}

BodyDerivatives<3> body_derivatives(detail::TraitsE, const Body& body, const BodyDynState& b) {
  const Vec3& e_dot = b.eps_dot;
  const Vec3& e_ddot = b.eps_ddot;
  const double st = std::sin(b.eps[1]), ct = std::cos(b.eps[1]);
  const double sp = std::sin(b.eps[2]), cp = std::cos(b.eps[2]);
  const Mat3 B = b_eps_matrix(b.eps);
  const EulerRatePartials p = b_eps_partials(b.eps);
  Mat3 B_tt, B_tp, B_pp;
  B_tt << -sp * st, 0.0, 0.0,
          -cp * st, 0.0, 0.0,
          -ct, 0.0, 0.0;
  B_tp << cp * ct, 0.0, 0.0,
          -sp * ct, 0.0, 0.0,
          0.0, 0.0, 0.0;
  B_pp << -sp * st, -cp, 0.0,
          -cp * st, sp, 0.0,
          0.0, 0.0, 0.0;
  const Mat3 B_dot = e_dot[1] * p.B_theta + e_dot[2] * p.B_psi;
  const Mat3 J = body.inertia.asDiagonal();
  const Vec3 w = B * e_dot;
  const Vec3 Jw = J * w;
  // d(w x J w)/dw.
  const Mat3 S = tilde(w) * J - tilde(Jw);
  const Vec3 u = J * (B * e_ddot + B_dot * e_dot) + w.cross(Jw) - body.torque_bar;

  BodyDerivatives<3> d;
  d.mass = B.transpose() * J * B;
  Mat3 C = Mat3::Zero();
  C.col(1) = p.B_theta * e_dot;
  C.col(2) = p.B_psi * e_dot;
  d.d_rate = B.transpose() * (J * (B_dot + C) + S * B);
  const Mat3* Bk[2] = {&p.B_theta, &p.B_psi};
  const Mat3 Bk_dot[2] = {e_dot[1] * B_tt + e_dot[2] * B_tp, e_dot[1] * B_tp + e_dot[2] * B_pp};
  d.d_coords.col(0).setZero();
  for (int k = 0; k < 2; ++k) {
    const Mat3& Bd = *Bk[k];
    d.d_coords.col(k + 1) = Bd.transpose() * u +
                            B.transpose() * (J * (Bd * e_ddot + Bk_dot[k] * e_dot) + S * (Bd * e_dot));
  }
  return d;
}

template <class T>
class DynEngine {
 public:
  static constexpr int K = T::K;

  DynEngine(const MechanismModel& m, const DynamicsConfig& cfg)
      : m_(m),
        cfg_(cfg),
        sys_(m),
        nq_(sys_.n_coords()),
        nc_(sys_.nc()),
        n_(nq_ + sys_.n_rows()),
        G_(n_, n_),
        lu_(n_),
        rows_(nc_) {}

  int dim() const { return n_; }

  // Fills accelerations and multipliers of s from its positions and
  // velocities.
  void consistent_accelerations(DynState& s) {
    sys_.load(s);
    G_.setZero();
    Eigen::VectorXd rhs(n_);
    for (int b = 0; b < sys_.nb(); ++b) {
      const Body& body = m_.bodies[b];
      const auto bt = body_terms(T{}, body, s.bodies[b]);
      G_.block<3, 3>(sys_.r_col(b), sys_.r_col(b)) = body.mass * Mat3::Identity();
      G_.block<K, K>(sys_.o_col(b), sys_.o_col(b)) = bt.mass;
      rhs.segment<3>(sys_.r_col(b)) = applied_force(b);
      rhs.segment<K>(sys_.o_col(b)) = bt.tau;
    }
    sys_.jacobian(s, G_, nq_, 0, true);
    Eigen::VectorXd gam;
    sys_.gamma(s, s.t, gam);
    rhs.tail(sys_.n_rows()) = gam;
    lu_.compute(G_);
    x_ = lu_.solve(rhs);
    if (!x_.allFinite() || detail::lu_singular(lu_)) throw SingularIteration(s.t);
    for (int b = 0; b < sys_.nb(); ++b) {
      s.bodies[b].r_ddot = x_.segment<3>(sys_.r_col(b));
      T::set_accel(s.bodies[b], x_.segment<K>(sys_.o_col(b)));
      T::sync(s.bodies[b]);
    }
    s.lambda = x_.segment(nq_, nc_);
    if constexpr (T::kNormalization) s.lambda_p = x_.tail(sys_.nb());
  }

  double eom_residual(const DynState& s) {
    sys_.load(s);
    x_ = pack(s);
    Eigen::VectorXd g(n_);
    g.head(nq_) = dynamic_residual(s);
    sys_.jacobian(s, jac_ = Eigen::MatrixXd::Zero(sys_.n_rows(), nq_), 0, 0, false);
    Eigen::VectorXd a, gam;
    sys_.accelerations(s, a);
    sys_.gamma(s, s.t, gam);
    g.tail(sys_.n_rows()) = jac_ * a - gam;
    return g.size() ? g.cwiseAbs().maxCoeff() : 0.0;
  }

  DynState step(const DynState& prev, double t, StepInfo* info) {
    const double theta = cfg_.effective_theta();
    x_ = pack(prev);
    DynState s = prev;
    s.t = t;
    StepInfo res;
    for (int k = 1; k <= cfg_.max_iter; ++k) {
      unpack(prev, x_, s);
      if constexpr (T::kForm == Formulation::kREps) detail::check_gimbal(s, m_);
      sys_.load(s);
      residual(s, g_);
      if (cfg_.jacobian == NewtonJacobian::kAnalytic) {
        iteration_matrix(s);
      } else {
        fd_iteration_matrix(prev, s);
      }
      lu_.compute(G_);
      delta_ = lu_.solve(-g_);
      if (!delta_.allFinite() || detail::lu_singular(lu_)) throw SingularIteration(t);
      x_ += delta_;
      res.iterations = k;
      res.correction_norm = delta_.norm();
      if (res.correction_norm < theta) {
        unpack(prev, x_, s);
        for (auto& b : s.bodies) T::sync(b);
        if constexpr (T::kForm == Formulation::kREps) detail::check_gimbal(s, m_);
        if (info) *info = res;
        return s;
      }
    }
    throw NonConvergence(t, cfg_.max_iter, res.correction_norm);
  }

  const Eigen::MatrixXd& newton_matrix(const DynState& prev, const DynState& iterate) {
    x_ = pack(iterate);
    DynState s = prev;
    s.t = iterate.t;
    unpack(prev, x_, s);
    sys_.load(s);
    residual(s, g_);
    if (cfg_.jacobian == NewtonJacobian::kAnalytic) {
      iteration_matrix(s);
    } else {
      fd_iteration_matrix(prev, s);
    }
    return G_;
  }

  double phi_norm(const DynState& s) {
    if (nc_ == 0) return 0.0;
    sys_.load(s);
    Eigen::VectorXd phi;
    sys_.phi(s, s.t, phi);
    return phi.head(nc_).cwiseAbs().maxCoeff();
  }

 private:
  Vec3 applied_force(int b) const {
    const Body& body = m_.bodies[b];
    return body.mass * m_.gravity + body.force;
  }

  Eigen::VectorXd pack(const DynState& s) const {
    Eigen::VectorXd x(n_);
    for (int b = 0; b < sys_.nb(); ++b) {
      x.segment<3>(sys_.r_col(b)) = s.bodies[b].r_ddot;
      x.segment<K>(sys_.o_col(b)) = T::accel(s.bodies[b]);
    }
    x.segment(nq_, nc_) = s.lambda.size() == nc_ ? s.lambda : Eigen::VectorXd::Zero(nc_);
    if constexpr (T::kNormalization) {
      x.tail(sys_.nb()) =
          s.lambda_p.size() == sys_.nb() ? s.lambda_p : Eigen::VectorXd::Zero(sys_.nb());
    }
    return x;
  }

  // Implicit Euler reconstruction of positions and velocities from the
  // unknown accelerations.
  void unpack(const DynState& prev, const Eigen::VectorXd& x, DynState& s) const {
    const double h = cfg_.h;
    for (int b = 0; b < sys_.nb(); ++b) {
      const BodyDynState& p = prev.bodies[b];
      BodyDynState& c = s.bodies[b];
      c.r_ddot = x.segment<3>(sys_.r_col(b));
      c.r_dot = p.r_dot + h * c.r_ddot;
      c.r = p.r + h * c.r_dot;
      const VecK<K> acc = x.segment<K>(sys_.o_col(b));
      T::set_accel(c, acc);
      T::set_rate(c, T::rate(p) + h * acc);
      T::advance(p, c, h);
    }
    s.lambda = x.segment(nq_, nc_);
    if constexpr (T::kNormalization) s.lambda_p = x.tail(sys_.nb());
  }

  // Equations of motion M q_ddot + Phi_q^T lambda - Q at the loaded state;
  // caches the constraint rows.
  Eigen::VectorXd dynamic_residual(const DynState& s) {
    Eigen::VectorXd g(nq_);
    for (int b = 0; b < sys_.nb(); ++b) {
      const BodyDynState& bs = s.bodies[b];
      const auto bt = body_terms(T{}, m_.bodies[b], bs);
      g.segment<3>(sys_.r_col(b)) = m_.bodies[b].mass * bs.r_ddot - applied_force(b);
      g.segment<K>(sys_.o_col(b)) = bt.mass * T::accel(bs) - bt.tau;
      if constexpr (T::kNormalization) g.segment<K>(sys_.o_col(b)) += bs.p * s.lambda_p[b];
    }
    for (int k = 0; k < nc_; ++k) {
      rows_[k] = sys_.row_k(k);
      const double lam = s.lambda[k];
      const int bi = sys_.body_i(k), bj = sys_.body_j(k);
      if (bi >= 0) {
        g.segment<3>(sys_.r_col(bi)) += rows_[k].r_i.transpose() * lam;
        g.segment<K>(sys_.o_col(bi)) += rows_[k].o_i.transpose() * lam;
      }
      if (bj >= 0) {
        g.segment<3>(sys_.r_col(bj)) += rows_[k].r_j.transpose() * lam;
        g.segment<K>(sys_.o_col(bj)) += rows_[k].o_j.transpose() * lam;
      }
    }
    return g;
  }

  // Discretized residual with the constraint rows scaled by 1/h^2.
  void residual(const DynState& s, Eigen::VectorXd& g) {
    g.resize(n_);
    g.head(nq_) = dynamic_residual(s);
    Eigen::VectorXd phi;
    sys_.phi(s, s.t, phi);
    g.tail(sys_.n_rows()) = phi / (cfg_.h * cfg_.h);
  }

  void iteration_matrix(const DynState& s) {
    const double h = cfg_.h, h2 = h * h;
    G_.setZero();
    for (int b = 0; b < sys_.nb(); ++b) {
      const Body& body = m_.bodies[b];
      const BodyDynState& bs = s.bodies[b];
      const int ro = sys_.r_col(b), oo = sys_.o_col(b);
      G_.block<3, 3>(ro, ro) = body.mass * Mat3::Identity();
      if constexpr (T::kForm == Formulation::kRA) {
        const Mat3 J = body.inertia.asDiagonal();
        const Vec3& w = bs.omega_bar;
        G_.block<3, 3>(oo, oo) = J + h * (tilde(w) * J - tilde(J * w));
      } else {
        G_.block<K, K>(oo, oo) = body_block(body, bs);
        if constexpr (T::kNormalization) {
          G_.block<K, K>(oo, oo) += h2 * s.lambda_p[b] * MatK<K>::Identity();
        }
      }
    }
    if constexpr (T::kForm == Formulation::kRA) {
      reaction_blocks_rA(s);
    } else {
      reaction_blocks(s);
    }
    sys_.jacobian(s, G_, nq_, 0, true);
  }

  // d/do_ddot of Mq(o) o_ddot - tau(o, o_dot) through o_dot = o_dot_n + h
  // o_ddot and o = o_n + h o_dot.
  MatK<K> body_block(const Body& body, const BodyDynState& bs) const {
    const double h = cfg_.h;
    const auto d = body_derivatives(T{}, body, bs);
    return d.mass + h * d.d_rate + h * h * d.d_coords;
  }

  template <class Block>
  void add(int row, int col, const Block& blk) {
    G_.block<Block::RowsAtCompileTime, Block::ColsAtCompileTime>(row, col) += blk;
  }

  void reaction_blocks_rA(const DynState&) {
    const double h2 = cfg_.h * cfg_.h;
    for (int k = 0; k < nc_; ++k) {
      const int idx[2] = {sys_.body_i(k), sys_.body_j(k)};
      const ReactionSensitivity rs = reaction_sensitivities_rA(
          m_.gcons[k], sys_.view_or_ground(idx[0]), sys_.view_or_ground(idx[1]), x_[nq_ + k]);
      for (int b = 0; b < 2; ++b) {
        if (idx[b] < 0) continue;
        for (int c = 0; c < 2; ++c) {
          if (idx[c] < 0) continue;
          const int rb = sys_.r_col(idx[b]), ob = sys_.o_col(idx[b]);
          const int rc = sys_.r_col(idx[c]), oc = sys_.o_col(idx[c]);
          add(rb, rc, Mat3(h2 * rs.force_r[b][c]));
          add(rb, oc, Mat3(h2 * rs.force_theta[b][c]));
          add(ob, rc, Mat3(h2 * rs.torque_r[b][c]));
          add(ob, oc, Mat3(h2 * rs.torque_theta[b][c]));
        }
      }
    }
  }

  // Position derivatives of Phi_q^T lambda for rp and reps.
  void reaction_blocks(const DynState& s) {
    const double h2 = cfg_.h * cfg_.h;
    const bool analytic = cfg_.reaction_hessian == ReactionHessian::kAnalytic;
    for (int k = 0; k < nc_; ++k) {
      const int idx[2] = {sys_.body_i(k), sys_.body_j(k)};
      const auto& vi = sys_.view_or_ground(idx[0]);
      const auto& vj = sys_.view_or_ground(idx[1]);
      const auto d = reaction_position_derivative(m_.gcons[k], vi, vj, s.lambda[k]);
      for (int b = 0; b < 2; ++b) {
        if (idx[b] < 0) continue;
        for (int c = 0; c < 2; ++c) {
          if (idx[c] < 0) continue;
          const int rb = sys_.r_col(idx[b]), ob = sys_.o_col(idx[b]);
          const int rc = sys_.r_col(idx[c]);
          add(rb, rc, Mat3(h2 * d.r_r[b][c]));
          add(ob, rc, Eigen::Matrix<double, K, 3>(h2 * d.o_r[b][c]));
          // Symmetry of the Hessian of lambda Phi.
          add(rc, ob, Eigen::Matrix<double, 3, K>(h2 * d.o_r[b][c].transpose()));
        }
      }
      if (analytic) {
        const auto o = reaction_orientation_derivative(m_.gcons[k], vi, vj, s.lambda[k]);
        for (int b = 0; b < 2; ++b) {
          if (idx[b] < 0) continue;
          for (int c = 0; c < 2; ++c) {
            if (idx[c] >= 0) add(sys_.o_col(idx[b]), sys_.o_col(idx[c]), MatK<K>(h2 * o.o_o[b][c]));
          }
        }
      }
    }
    if (!analytic) fd_reaction_orientation_blocks(s);
  }

  // Central differences of sum_k lambda_k Phi_k,o^T in the orientation
  // coordinates, one perturbed frame per body and coordinate shared by all
  // constraints touching the body.
  void fd_reaction_orientation_blocks(const DynState& s) {
    constexpr double kStep = 1e-7;
    const double h2 = cfg_.h * cfg_.h;
    for (int c = 0; c < sys_.nb(); ++c) {
      const BodyDynState& bs = s.bodies[c];
      const VecK<K> o = T::coords(bs);
      const int oc = sys_.o_col(c);
      for (int m = 0; m < K; ++m) {
        VecK<K> op = o, om = o;
        op[m] += kStep;
        om[m] -= kStep;
        const typename T::Frame fp(op, T::rate(bs)), fm(om, T::rate(bs));
        for (int k : sys_.touching(c)) {
          const int idx[2] = {sys_.body_i(k), sys_.body_j(k)};
          BodyView<typename T::Frame> vp[2] = {sys_.view_or_ground(idx[0]),
                                               sys_.view_or_ground(idx[1])};
          BodyView<typename T::Frame> vm[2] = {vp[0], vp[1]};
          for (int b = 0; b < 2; ++b) {
            if (idx[b] == c) {
              vp[b].frame = fp;
              vm[b].frame = fm;
            }
          }
          const JacobianRow<K> rp = gcon_jacobian(m_.gcons[k], vp[0], vp[1]);
          const JacobianRow<K> rm = gcon_jacobian(m_.gcons[k], vm[0], vm[1]);
          const double scale = h2 * s.lambda[k] / (2.0 * kStep);
          if (idx[0] >= 0) {
            G_.template block<K, 1>(sys_.o_col(idx[0]), oc + m) +=
                scale * (rp.o_i - rm.o_i).transpose();
          }
          if (idx[1] >= 0) {
            G_.template block<K, 1>(sys_.o_col(idx[1]), oc + m) +=
                scale * (rp.o_j - rm.o_j).transpose();
          }
        }
      }
    }
  }

  // Central differences of the discretized residual in the unknowns.
  void fd_iteration_matrix(const DynState& prev, const DynState& s) {
    G_.resize(n_, n_);
    DynState work = s;
    Eigen::VectorXd gp, gm;
    for (int j = 0; j < n_; ++j) {
      const double eta = 1e-6 * std::max(1.0, std::abs(x_[j]));
      Eigen::VectorXd xp = x_, xm = x_;
      xp[j] += eta;
      xm[j] -= eta;
      unpack(prev, xp, work);
      sys_.load(work);
      residual(work, gp);
      unpack(prev, xm, work);
      sys_.load(work);
      residual(work, gm);
      G_.col(j) = (gp - gm) / (2.0 * eta);
    }
    sys_.load(s);
  }

  const MechanismModel& m_;
  DynamicsConfig cfg_;
  detail::System<T> sys_;
  int nq_;
  int nc_;
  int n_;
  Eigen::MatrixXd G_;
  Eigen::MatrixXd jac_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  Eigen::VectorXd x_, g_, delta_;
  std::vector<JacobianRow<K>> rows_;
};

void validate(const MechanismModel& m, const DynamicsConfig& cfg) {
  if (!(cfg.h > 0.0) || !(cfg.effective_theta() > 0.0) || cfg.max_iter < 1 ||
      !(cfg.t_end >= 0.0)) {
    throw PreconditionError("invalid dynamics configuration");
  }
  if (m.nc() > 6 * m.nb()) {
    throw PreconditionError("more constraints than coordinates (nc = " + std::to_string(m.nc()) +
                            ", 6 nb = " + std::to_string(6 * m.nb()) + ")");
  }
}

double orientation_drift(const DynState& s) {
  double d = 0.0;
  for (const auto& b : s.bodies) {
    if (s.form == Formulation::kRA) {
      d = std::max(d, (b.A.transpose() * b.A - Mat3::Identity()).cwiseAbs().maxCoeff());
    } else if (s.form == Formulation::kRP) {
      d = std::max(d, std::abs(0.5 * b.p.squaredNorm() - 0.5));
    }
  }
  return d;
}

template <class T>
DynState step_impl(const MechanismModel& m, const DynState& prev, double t_next,
                   const DynamicsConfig& cfg, StepInfo* info) {
  if (prev.form != T::kForm) throw PreconditionError("state formulation does not match step");
  validate(m, cfg);
  DynEngine<T> eng(m, cfg);
  return eng.step(prev, t_next, info);
}

}  // namespace

int newton_dimension(const MechanismModel& m, Formulation f) {
  return (f == Formulation::kRP ? 8 : 6) * m.nb() + m.nc();
}

DynState initial_conditions_solve(const MechanismModel& m, Formulation f) {
  DynState s = initial_state(m, f);
  const double pos = constraint_residual(m, s);
  const double vel = velocity_residual(m, s);
  if (!(pos <= 1e-8) || !(vel <= 1e-8)) {
    throw InconsistentInitialConditions("initial state violates the constraints (position " +
                                        std::to_string(pos) + ", velocity " +
                                        std::to_string(vel) + ")");
  }
  dispatch(f, [&](auto tr) {
    DynamicsConfig cfg;
    cfg.form = f;
    DynEngine<decltype(tr)> eng(m, cfg);
    eng.consistent_accelerations(s);
    return 0;
  });
  return s;
}

Eigen::MatrixXd newton_matrix(const MechanismModel& m, const DynState& prev,
                              const DynState& iterate, const DynamicsConfig& cfg) {
  if (prev.form != cfg.form || iterate.form != cfg.form) {
    throw PreconditionError("state formulation does not match configuration");
  }
  validate(m, cfg);
  return dispatch(cfg.form, [&](auto tr) {
    DynEngine<decltype(tr)> eng(m, cfg);
    return Eigen::MatrixXd(eng.newton_matrix(prev, iterate));
  });
}

double eom_residual(const MechanismModel& m, const DynState& s) {
  return dispatch(s.form, [&](auto tr) {
    DynamicsConfig cfg;
    cfg.form = s.form;
    DynEngine<decltype(tr)> eng(m, cfg);
    return eng.eom_residual(s);
  });
}

DynState step_rA(const MechanismModel& m, const DynState& prev, double t_next,
                 const DynamicsConfig& cfg, StepInfo* info) {
  return step_impl<detail::TraitsA>(m, prev, t_next, cfg, info);
}

DynState step_rp(const MechanismModel& m, const DynState& prev, double t_next,
                 const DynamicsConfig& cfg, StepInfo* info) {
  return step_impl<detail::TraitsP>(m, prev, t_next, cfg, info);
}

DynState step_reps(const MechanismModel& m, const DynState& prev, double t_next,
                   const DynamicsConfig& cfg, StepInfo* info) {
  return step_impl<detail::TraitsE>(m, prev, t_next, cfg, info);
}

DynState dynamics_step(const MechanismModel& m, const DynState& prev, double t_next,
                       const DynamicsConfig& cfg, StepInfo* info) {
  return dispatch(prev.form, [&](auto tr) {
    return step_impl<decltype(tr)>(m, prev, t_next, cfg, info);
  });
}

TrajectoryLog dynamics_run(const MechanismModel& m, const DynamicsConfig& cfg) {
  validate(m, cfg);
  return dynamics_run(m, initial_conditions_solve(m, cfg.form), cfg);
}

TrajectoryLog dynamics_run(const MechanismModel& m, const DynState& start,
                           const DynamicsConfig& cfg) {
  validate(m, cfg);
  if (start.form != cfg.form) throw PreconditionError("initial state formulation mismatch");
  return dispatch(cfg.form, [&](auto tr) {
    using T = decltype(tr);
    const auto t0 = std::chrono::steady_clock::now();
    DynEngine<T> eng(m, cfg);
    TrajectoryLog log;
    log.form = cfg.form;
    log.h = cfg.h;
    log.theta = cfg.effective_theta();
    log.system_dim = eng.dim();
    const long n_steps = std::lround(cfg.t_end / cfg.h);
    log.steps.reserve(n_steps);
    if (cfg.store_states) {
      log.states.reserve(n_steps + 1);
      log.states.push_back(start);
    }
    DynState cur = start;
    for (long n = 1; n <= n_steps; ++n) {
      StepInfo info;
      cur = eng.step(cur, start.t + n * cfg.h, &info);
      DynStepRecord rec;
      rec.t = cur.t;
      rec.iterations = info.iterations;
      rec.correction_norm = info.correction_norm;
      rec.phi_norm = eng.phi_norm(cur);
      rec.orientation_drift = orientation_drift(cur);
      log.steps.push_back(rec);
      log.total_iterations += info.iterations;
      log.max_iterations = std::max(log.max_iterations, info.iterations);
      if (cfg.store_states) log.states.push_back(cur);
    }
    log.final_state = std::move(cur);
    log.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return log;
  });
}

}  // namespace absmbd
