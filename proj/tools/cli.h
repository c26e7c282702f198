// Copyright 2026 The infoverse Authors.
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

#ifndef INFOVERSE_TOOLS_CLI_H_
#define INFOVERSE_TOOLS_CLI_H_

#include <string>
#include <vector>

namespace infoverse::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitUsage = 2;

// Runs one `infoverse` command. `args[0]` is the program name. Diagnostics go
// to stderr; machine output only to the files named by flags.
int Run(const std::vector<std::string>& args);

}  // namespace infoverse::cli

#endif  // INFOVERSE_TOOLS_CLI_H_
