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

// Formulation traits and whole-system constraint assembly shared by the
// kinematics and dynamics solvers.

#ifndef ABSMBD_SRC_SYSTEM_HPP_
#define ABSMBD_SRC_SYSTEM_HPP_

#include <cmath>
#include <vector>

#include "absmbd/errors.hpp"
#include "absmbd/gcon.hpp"
#include "absmbd/state.hpp"

namespace absmbd::detail {

template <int K>
using VecK = Eigen::Matrix<double, K, 1>;

struct TraitsA {
  using Frame = FrameA;
  static constexpr int K = 3;
  static constexpr bool kNormalization = false;
  static constexpr Formulation kForm = Formulation::kRA;

  static Frame frame(const BodyDynState& b) { return Frame(b.A, b.omega_bar); }
  static VecK<3> rate(const BodyDynState& b) { return b.omega_bar; }
  static VecK<3> accel(const BodyDynState& b) { return b.omega_bar_dot; }
  static void set_rate(BodyDynState& b, const VecK<3>& v) { b.omega_bar = v; }
  static void set_accel(BodyDynState& b, const VecK<3>& v) { b.omega_bar_dot = v; }
  static void correct(BodyDynState& b, const VecK<3>& d) { b.A = b.A * exp_so3(d); }
  // Orientation at the end of a step of length h taken with b's rate.
  static void advance(const BodyDynState& prev, BodyDynState& b, double h) {
    b.A = prev.A * exp_so3(h * b.omega_bar);
  }
  static void sync(BodyDynState&) {}
};

struct TraitsP {
  using Frame = FrameP;
  static constexpr int K = 4;
  static constexpr bool kNormalization = true;
  static constexpr Formulation kForm = Formulation::kRP;

  static Frame frame(const BodyDynState& b) { return Frame(b.p, b.p_dot); }
  static VecK<4> coords(const BodyDynState& b) { return b.p; }
  static VecK<4> rate(const BodyDynState& b) { return b.p_dot; }
  static VecK<4> accel(const BodyDynState& b) { return b.p_ddot; }
  static void set_rate(BodyDynState& b, const VecK<4>& v) { b.p_dot = v; }
  static void set_accel(BodyDynState& b, const VecK<4>& v) { b.p_ddot = v; }
  static void correct(BodyDynState& b, const VecK<4>& d) { b.p += d; }
  static void advance(const BodyDynState& prev, BodyDynState& b, double h) {
    b.p = prev.p + h * b.p_dot;
  }
  static void sync(BodyDynState& b) {
    b.A = a_from_p_unchecked(b.p);
    const Mat34 g = b_p_matrix(b.p);
    b.omega_bar = 2.0 * g * b.p_dot;
    // G(p_dot) p_dot = 0, so the rate of omega_bar has no velocity term.
    b.omega_bar_dot = 2.0 * g * b.p_ddot;
  }
};

struct TraitsE {
  using Frame = FrameE;
  static constexpr int K = 3;
  static constexpr bool kNormalization = false;
  static constexpr Formulation kForm = Formulation::kREps;

  static Frame frame(const BodyDynState& b) { return Frame(b.eps, b.eps_dot); }
  static VecK<3> coords(const BodyDynState& b) { return b.eps; }
  static VecK<3> rate(const BodyDynState& b) { return b.eps_dot; }
  static VecK<3> accel(const BodyDynState& b) { return b.eps_ddot; }
  static void set_rate(BodyDynState& b, const VecK<3>& v) { b.eps_dot = v; }
  static void set_accel(BodyDynState& b, const VecK<3>& v) { b.eps_ddot = v; }
  static void correct(BodyDynState& b, const VecK<3>& d) { b.eps += d; }
  static void advance(const BodyDynState& prev, BodyDynState& b, double h) {
    b.eps = prev.eps + h * b.eps_dot;
  }
  static void sync(BodyDynState& b) {
    b.A = a_from_eps(b.eps);
    const Mat3 B = b_eps_matrix(b.eps);
    b.omega_bar = B * b.eps_dot;
    b.omega_bar_dot = B * b.eps_ddot + b_eps_dot(b.eps, b.eps_dot) * b.eps_dot;
  }
};

// Calls fn with the traits object of formulation f.
template <class Fn>
auto dispatch(Formulation f, Fn&& fn) {
  switch (f) {
    case Formulation::kRA: return fn(TraitsA{});
    case Formulation::kRP: return fn(TraitsP{});
    case Formulation::kREps: break;
  }
  return fn(TraitsE{});
}

// Singularity test on a partial-pivoting LU: smallest over largest pivot
// magnitude at or below 1e-15.
template <class LU>
bool lu_singular(const LU& lu) {
  const Eigen::VectorXd d = lu.matrixLU().diagonal().cwiseAbs();
  return d.size() > 0 && !(d.minCoeff() > 1e-15 * d.maxCoeff());
}

inline void check_gimbal(const DynState& s, const MechanismModel& m) {
  if (s.form != Formulation::kREps) return;
  for (size_t b = 0; b < s.bodies.size(); ++b) {
    if (std::abs(std::sin(s.bodies[b].eps[1])) < 1e-6) throw GimbalLock(s.t, m.bodies[b].id);
  }
}

// Column layout over all bodies: [r_1 .. r_nb, o_1 .. o_nb]. Constraint rows
// follow model order; rp appends one normalization row per body.
template <class T>
class System {
 public:
  using Frame = typename T::Frame;
  static constexpr int K = T::K;

  explicit System(const MechanismModel& m) : model_(m), nb_(m.nb()), nc_(m.nc()) {
    body_i_.reserve(nc_);
    body_j_.reserve(nc_);
    touching_.resize(nb_);
    for (int k = 0; k < nc_; ++k) {
      body_i_.push_back(m.body_index(m.gcons[k].body_i));
      body_j_.push_back(m.body_index(m.gcons[k].body_j));
      if (body_i_[k] >= 0) touching_[body_i_[k]].push_back(k);
      if (body_j_[k] >= 0 && body_j_[k] != body_i_[k]) touching_[body_j_[k]].push_back(k);
    }
    views_.resize(nb_);
    ground_ = BodyView<Frame>::make_ground();
  }

  const MechanismModel& model() const { return model_; }
  int nb() const { return nb_; }
  int nc() const { return nc_; }
  int n_coords() const { return (3 + K) * nb_; }
  int n_norm() const { return T::kNormalization ? nb_ : 0; }
  int n_rows() const { return nc_ + n_norm(); }
  int r_col(int b) const { return 3 * b; }
  int o_col(int b) const { return 3 * nb_ + K * b; }
  int body_i(int k) const { return body_i_[k]; }
  int body_j(int k) const { return body_j_[k]; }
  const std::vector<int>& touching(int b) const { return touching_[b]; }

  void load(const DynState& s) {
    for (int b = 0; b < nb_; ++b) {
      const BodyDynState& bs = s.bodies[b];
      views_[b].r = bs.r;
      views_[b].r_dot = bs.r_dot;
      views_[b].frame = T::frame(bs);
    }
  }
  BodyView<Frame>& view(int b) { return views_[b]; }
  const BodyView<Frame>& view_or_ground(int b) const { return b < 0 ? ground_ : views_[b]; }

  double phi_k(int k, double t) const {
    return gcon_phi(model_.gcons[k], view_or_ground(body_i_[k]), view_or_ground(body_j_[k]), t);
  }
  JacobianRow<K> row_k(int k) const {
    return gcon_jacobian(model_.gcons[k], view_or_ground(body_i_[k]), view_or_ground(body_j_[k]));
  }

  // Constraint values (and rp normalization values) at the loaded state.
  void phi(const DynState& s, double t, Eigen::VectorXd& out) const {
    out.resize(n_rows());
    for (int k = 0; k < nc_; ++k) out[k] = phi_k(k, t);
    if constexpr (T::kNormalization) {
      for (int b = 0; b < nb_; ++b) out[nc_ + b] = 0.5 * s.bodies[b].p.squaredNorm() - 0.5;
    }
  }

  // Writes the n_rows x n_coords constraint Jacobian into `G` at (row0,
  // col0); with `transpose` also writes its transpose at (col0, row0).
  template <class Mat>
  void jacobian(const DynState& s, Mat& G, int row0, int col0, bool transpose) const {
    for (int k = 0; k < nc_; ++k) {
      const JacobianRow<K> row = row_k(k);
      const int bi = body_i_[k], bj = body_j_[k];
      if (bi >= 0) put(G, row0 + k, col0, bi, row.r_i, row.o_i, transpose);
      if (bj >= 0) put(G, row0 + k, col0, bj, row.r_j, row.o_j, transpose);
    }
    if constexpr (T::kNormalization) {
      for (int b = 0; b < nb_; ++b) {
        const Eigen::RowVector4d pt = s.bodies[b].p.transpose();
        G.block(row0 + nc_ + b, col0 + o_col(b), 1, 4) = pt;
        if (transpose) G.block(col0 + o_col(b), row0 + nc_ + b, 4, 1) = pt.transpose();
      }
    }
  }

  void nu(double t, Eigen::VectorXd& out) const {
    out.setZero(n_rows());
    for (int k = 0; k < nc_; ++k) out[k] = absmbd::nu(model_.gcons[k], t);
  }

  void gamma(const DynState& s, double t, Eigen::VectorXd& out) const {
    out.resize(n_rows());
    for (int k = 0; k < nc_; ++k) {
      out[k] = gcon_gamma(model_.gcons[k], view_or_ground(body_i_[k]),
                          view_or_ground(body_j_[k]), t);
    }
    if constexpr (T::kNormalization) {
      for (int b = 0; b < nb_; ++b) out[nc_ + b] = -s.bodies[b].p_dot.squaredNorm();
    }
  }

  // Stacked [r; o] vectors of the loaded state.
  void velocities(const DynState& s, Eigen::VectorXd& v) const {
    v.resize(n_coords());
    for (int b = 0; b < nb_; ++b) {
      v.segment<3>(r_col(b)) = s.bodies[b].r_dot;
      v.segment<K>(o_col(b)) = T::rate(s.bodies[b]);
    }
  }
  void accelerations(const DynState& s, Eigen::VectorXd& a) const {
    a.resize(n_coords());
    for (int b = 0; b < nb_; ++b) {
      a.segment<3>(r_col(b)) = s.bodies[b].r_ddot;
      a.segment<K>(o_col(b)) = T::accel(s.bodies[b]);
    }
  }

 private:
  template <class Mat>
  void put(Mat& G, int row, int col0, int b, const Eigen::RowVector3d& r,
           const Eigen::Matrix<double, 1, K>& o, bool transpose) const {
    G.block(row, col0 + r_col(b), 1, 3) = r;
    G.block(row, col0 + o_col(b), 1, K) = o;
    if (transpose) {
      G.block(col0 + r_col(b), row, 3, 1) = r.transpose();
      G.block(col0 + o_col(b), row, K, 1) = o.transpose();
    }
  }

  const MechanismModel& model_;
  int nb_;
  int nc_;
  std::vector<int> body_i_;
  std::vector<int> body_j_;
  std::vector<std::vector<int>> touching_;
  std::vector<BodyView<Frame>> views_;
  BodyView<Frame> ground_;
};

}  // namespace absmbd::detail

#endif  // ABSMBD_SRC_SYSTEM_HPP_
