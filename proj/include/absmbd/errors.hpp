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

#ifndef ABSMBD_ERRORS_HPP_
#define ABSMBD_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace absmbd {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid model document or model invariant violation. `path` names the
// offending field, e.g. "bodies[0].mass".
class ModelError : public Error {
 public:
  ModelError(const std::string& path, const std::string& what)
      : Error(path.empty() ? what : path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// Operation not applicable to this model (e.g. kinematics on an under-driven
// mechanism).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  NonConvergence(double t, int iterations, double correction_norm)
      : Error("Newton iteration did not converge at t=" + std::to_string(t) + " after " +
              std::to_string(iterations) + " iterations (|delta|=" +
              std::to_string(correction_norm) + ")"),
        t_(t), iterations_(iterations), correction_norm_(correction_norm) {}
  double t() const { return t_; }
  int iterations() const { return iterations_; }
  double correction_norm() const { return correction_norm_; }

 private:
  double t_;
  int iterations_;
  double correction_norm_;
};

class SingularIteration : public Error {
 public:
  explicit SingularIteration(double t)
      : Error("singular iteration matrix at t=" + std::to_string(t)), t_(t) {}
  double t() const { return t_; }

 private:
  double t_;
};

class GimbalLock : public Error {
 public:
  GimbalLock(double t, int body_id)
      : Error("GimbalLock: Euler angle rate map singular for body " + std::to_string(body_id) +
              " at t=" + std::to_string(t)),
        t_(t), body_id_(body_id) {}
  double t() const { return t_; }
  int body_id() const { return body_id_; }

 private:
  double t_;
  int body_id_;
};

class InconsistentInitialConditions : public Error {
 public:
  using Error::Error;
};

}  // namespace absmbd

#endif  // ABSMBD_ERRORS_HPP_
