/* Copyright 2026 The Boxforge Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef BOXFORGE_CLI_H_
#define BOXFORGE_CLI_H_

#include <string>
#include <vector>

namespace boxforge {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInternal = 3;

// Runs the command line (args excludes the program name). Data goes to
// stdout, diagnostics to stderr.
int run_cli(const std::vector<std::string>& args);

}  // namespace boxforge

#endif  // BOXFORGE_CLI_H_
