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

#ifndef ABSMBD_TESTS_SUPPORT_HPP_
#define ABSMBD_TESTS_SUPPORT_HPP_

#include <random>
#include <string>

#include "absmbd/so3.hpp"

namespace absmbd::testing {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  Vec3 vec3(double lo = -1.0, double hi = 1.0) {
    return Vec3(uniform(lo, hi), uniform(lo, hi), uniform(lo, hi));
  }
  Vec4 vec4(double lo = -1.0, double hi = 1.0) {
    return Vec4(uniform(lo, hi), uniform(lo, hi), uniform(lo, hi), uniform(lo, hi));
  }
  Vec3 unit3() {
    Vec3 v;
    do v = vec3(); while (v.norm() < 1e-3 || v.norm() > 1.0);
    return v.normalized();
  }
  Vec4 unit4() {
    Vec4 v;
    do v = vec4(); while (v.norm() < 1e-3 || v.norm() > 1.0);
    return v.normalized();
  }
  Mat3 rotation() { return exp_so3(uniform(0.0, 3.14159) * unit3()); }

 private:
  std::mt19937_64 gen_;
};

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1.0); }

template <class A, class B>
double rel_err(const A& a, const B& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(b.cwiseAbs().maxCoeff(), 1.0);
}

#ifdef ABSMBD_MODEL_DIR
inline std::string model_path(const std::string& name) {
  return std::string(ABSMBD_MODEL_DIR) + "/" + name + ".json";
}
#endif

}  // namespace absmbd::testing

#endif  // ABSMBD_TESTS_SUPPORT_HPP_
