//  Copyright 2026 The GEACL Simulator Authors
//
//  Licensed under the Apache License, Version 2.0 (the "License");
//  you may not use this file except in compliance with the License.
//  You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
//  Unless required by applicable law or agreed to in writing, software
//  distributed under the License is distributed on an "AS IS" BASIS,
//  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//  See the License for the specific language governing permissions and
//  limitations under the License.

#ifndef GEACL_CLI_HPP_
#define GEACL_CLI_HPP_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "geacl/scenarios.hpp"

namespace geacl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitTimeout = 3;

struct RunOptions {
  std::string config_path;
  std::vector<std::string> overrides;  // "--seed" is folded in as "seed=<n>"
  std::string out_dir{"."};
  bool trace{false};
  unsigned jobs{0};  // 0: GEACL_SIM_JOBS, else hardware concurrency
};

int cmd_run(const RunOptions& opts, std::ostream& log);
int cmd_sweep(const RunOptions& opts, const std::string& axis, const std::vector<std::string>& values,
              const std::vector<std::uint64_t>& seeds, std::ostream& log);
int cmd_compare(const RunOptions& opts, const std::vector<std::uint64_t>& seeds, std::ostream& log);

/// "1-20", "3,5,9" or a mix ("1-3,10").
std::vector<std::uint64_t> parse_seeds(const std::string& text);

/// Sweep table column names for a scenario; independent of run outcomes.
std::vector<std::string> sweep_columns(ScenarioKind kind);
std::vector<std::string> compare_columns(ScenarioKind kind);

/// Runs `jobs` workers over [0, count); results are written by index.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn);

/// Entry point used by the geacl_sim binary.
int main(int argc, char** argv);

}  // namespace geacl::cli

#endif  // GEACL_CLI_HPP_
