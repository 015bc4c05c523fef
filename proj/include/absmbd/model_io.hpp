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

#ifndef ABSMBD_MODEL_IO_HPP_
#define ABSMBD_MODEL_IO_HPP_

#include <string>

#include "absmbd/model.hpp"

namespace absmbd {

// JSON model documents. Joints ("SJ", "UJ", "CJ", "RJ", "TJ") are expanded
// into scalar constraints at load. Errors throw ModelError with a field path.
MechanismModel load_model(const std::string& path);
MechanismModel parse_model(const std::string& json_text);

// Writes expanded constraints only; parse_model(serialize_model(m)) == m.
std::string serialize_model(const MechanismModel& m);
void save_model(const MechanismModel& m, const std::string& path);

}  // namespace absmbd

#endif  // ABSMBD_MODEL_IO_HPP_
