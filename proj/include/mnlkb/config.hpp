// Copyright 2026 The mnlkb Authors
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

#ifndef MNLKB_CONFIG_HPP_
#define MNLKB_CONFIG_HPP_

// JSON experiment documents. Unknown keys are rejected; every failure is a
// ConfigError naming the offending key path.

#include <filesystem>
#include <string>

#include "mnlkb/harness.hpp"

namespace mnlkb {

ExperimentConfig parse_config(const std::string& text);

// Throws ConfigError naming the path when the file cannot be read.
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace mnlkb

#endif  // MNLKB_CONFIG_HPP_
