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

#include "absmbd/gcon.hpp"

namespace absmbd {

ReactionSensitivity reaction_sensitivities_rA(const GconSpec& g, const BodyView<FrameA>& bi,
                                              const BodyView<FrameA>& bj, double lambda) {
  ReactionSensitivity s;
  for (int b = 0; b < 2; ++b) {
    for (int c = 0; c < 2; ++c) {
      s.force_r[b][c].setZero();
      s.force_theta[b][c].setZero();
      s.torque_r[b][c].setZero();
      s.torque_theta[b][c].setZero();
    }
  }
  const Mat3& Ai = bi.frame.A;
  const Mat3& Aj = bj.frame.A;
  const Mat3 I = Mat3::Identity();

  switch (g.kind) {
    case GconKind::kDP1: {
      // Torques: lambda ~a_i A_i' a_j and lambda ~a_j A_j' a_i.
      const Mat3 ai_t = tilde(g.a_i), aj_t = tilde(g.a_j);
      const Vec3 ai = Ai * g.a_i, aj = Aj * g.a_j;
      s.torque_theta[0][0] = lambda * ai_t * tilde(Ai.transpose() * aj);
      s.torque_theta[0][1] = -lambda * ai_t * Ai.transpose() * Aj * aj_t;
      s.torque_theta[1][1] = lambda * aj_t * tilde(Aj.transpose() * ai);
      s.torque_theta[1][0] = -lambda * aj_t * Aj.transpose() * Ai * ai_t;
      break;
    }
    case GconKind::kDP2: {
      // Forces: -lambda a_i on i, +lambda a_i on j.
      // Torques: lambda ~a_i A_i'(r_j + A_j s_q - r_i) on i (the s_p parts
      // cancel), lambda ~s_q A_j' a_i on j.
      const Mat3 ai_t = tilde(g.a_i), sq_t = tilde(g.s_q);
      const Vec3 ai = Ai * g.a_i;
      s.force_theta[0][0] = lambda * Ai * ai_t;
      s.force_theta[1][0] = -lambda * Ai * ai_t;
      const Vec3 e = bj.r + Aj * g.s_q - bi.r;
      s.torque_r[0][0] = -lambda * ai_t * Ai.transpose();
      s.torque_r[0][1] = lambda * ai_t * Ai.transpose();
      s.torque_theta[0][0] = lambda * ai_t * tilde(Ai.transpose() * e);
      s.torque_theta[0][1] = -lambda * ai_t * Ai.transpose() * Aj * sq_t;
      s.torque_theta[1][1] = lambda * sq_t * tilde(Aj.transpose() * ai);
      s.torque_theta[1][0] = -lambda * sq_t * Aj.transpose() * Ai * ai_t;
      break;
    }
    case GconKind::kD: {
      // Scaled by 2 lambda. Forces: -mu d on i, +mu d on j.
      // Torques: -mu ~s_p A_i'(r_j + A_j s_q - r_i) on i,
      //          +mu ~s_q A_j'(r_j - r_i - A_i s_p) on j.
      const double mu = 2.0 * lambda;
      const Mat3 sp_t = tilde(g.s_p), sq_t = tilde(g.s_q);
      s.force_r[0][0] = mu * I;
      s.force_r[0][1] = -mu * I;
      s.force_r[1][0] = -mu * I;
      s.force_r[1][1] = mu * I;
      s.force_theta[0][0] = -mu * Ai * sp_t;
      s.force_theta[0][1] = mu * Aj * sq_t;
      s.force_theta[1][0] = mu * Ai * sp_t;
      s.force_theta[1][1] = -mu * Aj * sq_t;
      const Vec3 ei = bj.r + Aj * g.s_q - bi.r;
      const Vec3 ej = bj.r - bi.r - Ai * g.s_p;
      s.torque_r[0][0] = mu * sp_t * Ai.transpose();
      s.torque_r[0][1] = -mu * sp_t * Ai.transpose();
      s.torque_r[1][0] = -mu * sq_t * Aj.transpose();
      s.torque_r[1][1] = mu * sq_t * Aj.transpose();
      s.torque_theta[0][0] = -mu * sp_t * tilde(Ai.transpose() * ei);
      s.torque_theta[0][1] = mu * sp_t * Ai.transpose() * Aj * sq_t;
      s.torque_theta[1][1] = mu * sq_t * tilde(Aj.transpose() * ej);
      s.torque_theta[1][0] = mu * sq_t * Aj.transpose() * Ai * sp_t;
      break;
    }
    case GconKind::kCD: {
      // Forces are constant (-lambda c, +lambda c). Torques:
      // -lambda ~s_p A_i' c on i, lambda ~s_q A_j' c on j.
      s.torque_theta[0][0] = -lambda * tilde(g.s_p) * tilde(Ai.transpose() * g.c);
      s.torque_theta[1][1] = lambda * tilde(g.s_q) * tilde(Aj.transpose() * g.c);
      break;
    }
  }
  return s;
}

}  // namespace absmbd
