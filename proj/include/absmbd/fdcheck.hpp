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


#ifndef ABSMBD_FDCHECK_HPP_
#define ABSMBD_FDCHECK_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace absmbd {

struct FdCheckConfig {
  std::uint64_t seed = 1;
  // Random states per item.
  int reps = 100;
  double tol = 1e-5;
  // Test hook: the analytic value of the named item is offset by
  // tamper_delta in its first entry before comparison.
  std::string tamper;
  double tamper_delta = 1e-3;
};

// Worst case of one analytic quantity against its oracle. Errors are
// |analytic - oracle|_inf / max(|oracle|_inf, 1).
struct FdItem {
  // e.g. "jacobian/rA/DP2/o_i", "gamma/rp/D", "sensitivity/CD/torque_theta".
  std::string name;
  int samples = 0;
  double max_rel_err = 0.0;
  // Seed of the sample that produced max_rel_err.
  std::uint64_t worst_seed = 0;
  double tol = 0.0;
  bool pass() const { return max_rel_err <= tol; }
};

struct FdReport {
  std::vector<FdItem> items;
  double wall_seconds = 0.0;
  bool all_pass() const;
  std::vector<std::string> failures() const;
};

// Item names in report order.
std::vector<std::string> fd_item_names();

// Every sample draws its random state from its own generator seeded with
// (cfg.seed, item group, sample index), so a report line is reproducible
// from worst_seed alone.
FdReport fd_check(const FdCheckConfig& cfg);

}  // namespace absmbd

#endif  // ABSMBD_FDCHECK_HPP_
