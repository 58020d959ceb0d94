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

#ifndef GEACL_CONFIG_HPP_
#define GEACL_CONFIG_HPP_

#include <map>
#include <string>
#include <vector>

#include "geacl/scenarios.hpp"

namespace geacl {

/// Maps dotted field paths ("gossip.fanout", "faults.crashes[0].agent") to
/// the 1-based line where the key appears in a JSON document.
std::map<std::string, std::size_t> key_lines(const std::string& text);

/// Parses a run config. Every field is optional except "scenario"; unknown
/// fields and malformed values throw Error(kConfig) with a
/// "<source>:<line>: ..." message. Overrides are "dotted.path=value" strings
/// applied before validation; values parse as JSON, else as plain strings.
RunConfig parse_run_config(const std::string& text, const std::string& source,
                           const std::vector<std::string>& overrides = {});
RunConfig load_run_config(const std::string& path,
                          const std::vector<std::string>& overrides = {});

/// Sweep axes and the override each one expands to.
const std::vector<std::string>& sweep_axes();
/// Throws Error(kConfig) for an unknown axis.
std::vector<std::string> axis_overrides(const std::string& axis, const std::string& value);

}  // namespace geacl

#endif  // GEACL_CONFIG_HPP_
