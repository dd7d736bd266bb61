// Copyright 2026 The gpformation Authors
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

#ifndef GPFORMATION_CLI_HPP_
#define GPFORMATION_CLI_HPP_

#include <ostream>

namespace gpformation {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitConfig = 2,
  kExitSimulation = 3,
  kExitIo = 4,
};

// Entry point of the gpformation command line tool.
int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gpformation

#endif  // GPFORMATION_CLI_HPP_
