// Copyright 2026 The fairrec Authors.
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

#ifndef FAIRREC_TOOLS_OUTPUT_GUARD_H_
#define FAIRREC_TOOLS_OUTPUT_GUARD_H_

#include <filesystem>
#include <set>
#include <vector>

namespace fairrec::tools {

// Removes everything a failed command created under `dir`: the directory
// itself if it did not exist, otherwise the entries that were not there
// before. Commit() keeps the outputs.
class OutputGuard {
 public:
  explicit OutputGuard(std::filesystem::path dir);
  ~OutputGuard();

  OutputGuard(const OutputGuard&) = delete;
  OutputGuard& operator=(const OutputGuard&) = delete;

  void Commit() { committed_ = true; }

 private:
  std::filesystem::path dir_;
  bool existed_ = false;
  std::set<std::filesystem::path> before_;
  bool committed_ = false;
};

}  // namespace fairrec::tools

#endif  // FAIRREC_TOOLS_OUTPUT_GUARD_H_
