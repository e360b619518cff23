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

#ifndef MNLKB_IO_HPP_
#define MNLKB_IO_HPP_

// Result files. Writers return the file body; write_file_atomic puts it in
// place through a temporary sibling and a rename.

#include <filesystem>
#include <string>

#include "mnlkb/harness.hpp"
#include "mnlkb/planner.hpp"

namespace mnlkb {

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& body);

// Shortest round-trippable-enough decimal form used in every output file.
std::string format_number(double x);

// replication,policy,revenue,stop_time,regret
std::string runs_csv(const ExperimentResult& result);
std::string epochs_csv(const ExperimentResult& result);
// assortment,weight with 1-based ids.
std::string distribution_csv(const SparseDistribution& dist);
std::string scaling_csv(const ScalingResult& scaling);

// Any of the inputs may be null.
std::string diagnostics_json(const ExperimentResult* result,
                             const DiagnosticReport* report,
                             const ScalingResult* scaling);

// Mean regret against the horizon as a single polyline.
std::string regret_svg(const ScalingResult& scaling);

}  // namespace mnlkb

#endif  // MNLKB_IO_HPP_
