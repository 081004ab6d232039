// Copyright 2026 The NOMAD Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NOMAD_CLI_H_
#define NOMAD_CLI_H_

#include <string>
#include <vector>

namespace nomad::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kInputError = 1;
inline constexpr int kInternalError = 2;

// Entry point of the `nomad` tool. args[0] is the program name.
int Run(const std::vector<std::string>& args);

}  // namespace nomad::cli

#endif  // NOMAD_CLI_H_
