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

#ifndef ABSMBD_FRAMES_HPP_
#define ABSMBD_FRAMES_HPP_

#include "absmbd/so3.hpp"

namespace absmbd {

// A body's orientation in one formulation's native coordinates o (with rate
// o_dot). Each frame answers, for a body-fixed vector s:
//   world(s)  = A s
//   dworld(s) = d(A s)/do                 (3 x kDim)
//   vel(s)    = d/dt (A s)
//   quad(s)   = d2/dt2 (A s) - dworld(s) * o_ddot
// For rA the coordinate increment is the body-frame rotation vector. rp and
// reps also give ddworld(s, w) = d2(w' A s)/do2 (kDim x kDim).

struct FrameA {
  static constexpr int kDim = 3;
  using Coords = Mat3;
  using Rates = Vec3;
  using DWorld = Mat3;

  Mat3 A = Mat3::Identity();
  Vec3 omega = Vec3::Zero();

  FrameA() = default;
  FrameA(const Mat3& a, const Vec3& w) : A(a), omega(w) {}

  Mat3 rotation() const { return A; }
  Vec3 world(const Vec3& s) const { return A * s; }
  DWorld dworld(const Vec3& s) const { return -A * tilde(s); }
  Vec3 vel(const Vec3& s) const { return A * omega.cross(s); }
  Vec3 quad(const Vec3& s) const { return A * omega.cross(omega.cross(s)); }
};

struct FrameP {
  static constexpr int kDim = 4;
  using Coords = Vec4;
  using Rates = Vec4;
  using DWorld = Mat34;

  Vec4 p = Vec4(1.0, 0.0, 0.0, 0.0);
  Vec4 p_dot = Vec4::Zero();
  Mat3 A = Mat3::Identity();

  FrameP() = default;
  FrameP(const Vec4& pp, const Vec4& pd) : p(pp), p_dot(pd), A(a_from_p_unchecked(pp)) {}

  Mat3 rotation() const { return A; }
  Vec3 world(const Vec3& s) const { return A * s; }
  DWorld dworld(const Vec3& s) const { return b_matrix(p, s); }
  Vec3 vel(const Vec3& s) const { return b_matrix(p, s) * p_dot; }
  // b_matrix is linear in its first argument.
  Vec3 quad(const Vec3& s) const { return b_matrix(p_dot, s) * p_dot; }
  // Constant in p: w' A s is quadratic in p.
  Mat4 ddworld(const Vec3& s, const Vec3& w) const {
    Mat4 h;
    h(0, 0) = 4.0 * w.dot(s);
    h.block<3, 1>(1, 0) = 2.0 * s.cross(w);
    h.block<1, 3>(0, 1) = 2.0 * s.cross(w).transpose();
    h.block<3, 3>(1, 1) = 2.0 * (w * s.transpose() + s * w.transpose());
    return h;
  }
};

struct FrameE {
  static constexpr int kDim = 3;
  using Coords = Vec3;
  using Rates = Vec3;
  using DWorld = Mat3;

  Vec3 eps = Vec3::Zero();
  Vec3 eps_dot = Vec3::Zero();
  EulerAngleDerivatives d;

  FrameE() : d(a_eps_derivatives(Vec3::Zero(), Vec3::Zero())) {}
  FrameE(const Vec3& e, const Vec3& ed) : eps(e), eps_dot(ed), d(a_eps_derivatives(e, ed)) {}

  Mat3 rotation() const { return d.A; }
  Vec3 world(const Vec3& s) const { return d.A * s; }
  DWorld dworld(const Vec3& s) const {
    DWorld m;
    m << d.A_phi * s, d.A_theta * s, d.A_psi * s;
    return m;
  }
  Vec3 vel(const Vec3& s) const { return d.A_dot * s; }
  Vec3 quad(const Vec3& s) const { return d.D * s; }
  Mat3 ddworld(const Vec3& s, const Vec3& w) const {
    static constexpr int kRow[6] = {0, 0, 0, 1, 1, 2};
    static constexpr int kCol[6] = {0, 1, 2, 1, 2, 2};
    Mat3 h;
    for (int i = 0; i < 6; ++i) h(kRow[i], kCol[i]) = h(kCol[i], kRow[i]) = w.dot(d.A_second[i] * s);
    return h;
  }
};

// Position and velocity of one body plus its orientation frame. Ground is
// the identity frame at rest and owns no columns.
template <class Frame>
struct BodyView {
  Vec3 r = Vec3::Zero();
  Vec3 r_dot = Vec3::Zero();
  Frame frame;
  bool ground = false;

  static BodyView make_ground() {
    BodyView v;
    v.ground = true;
    return v;
  }
};

}  // namespace absmbd

#endif  // ABSMBD_FRAMES_HPP_
