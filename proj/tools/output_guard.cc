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

#include "output_guard.h"

#include <system_error>

namespace fairrec::tools {

OutputGuard::OutputGuard(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  existed_ = std::filesystem::is_directory(dir_, ec);
  if (!existed_) return;
  for (const auto& entry : std::filesystem::directory_iterator(dir_, ec)) {
    before_.insert(entry.path());
  }
}

OutputGuard::~OutputGuard() {
  if (committed_) return;
  std::error_code ec;
  if (!existed_) {
    std::filesystem::remove_all(dir_, ec);
    return;
  }
  std::vector<std::filesystem::path> created;
  for (const auto& entry : std::filesystem::directory_iterator(dir_, ec)) {
    if (!before_.count(entry.path())) created.push_back(entry.path());
  }
  for (const auto& p : created) std::filesystem::remove_all(p, ec);
}

}  // namespace fairrec::tools
