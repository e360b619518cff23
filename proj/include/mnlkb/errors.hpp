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

#ifndef MNLKB_ERRORS_HPP_
#define MNLKB_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace mnlkb {

// A computation that is well-defined but exceeds a configured size limit
// (enumeration caps, DP state caps, LP nonzero caps).
class CapabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Configuration documents that fail validation.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A hard invariant of a simulation run was broken (inventory overdraw).
class FeasibilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mnlkb

#endif  // MNLKB_ERRORS_HPP_
