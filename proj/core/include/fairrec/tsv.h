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

#ifndef FAIRREC_TSV_H_
#define FAIRREC_TSV_H_

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fairrec {

// Splits on '\t' without collapsing empty fields. A trailing '\r' is removed.
std::vector<std::string_view> SplitTabs(std::string_view line);

std::optional<long long> ParseInt(std::string_view text);
std::optional<double> ParseDouble(std::string_view text);

std::string_view Trim(std::string_view text);

// Calls `fn(line_number, line)` for every line (1-based). Throws
// PipelineError(stage) when the file cannot be opened.
void ForEachLine(const std::filesystem::path& path, const std::string& stage,
                 const std::function<void(std::size_t, std::string_view)>& fn);

// Opens `path` for writing or throws PipelineError(stage).
std::ofstream OpenForWrite(const std::filesystem::path& path, const std::string& stage);

// RFC-4180 field quoting: fields containing ',', '"', CR or LF are wrapped in
// double quotes with embedded quotes doubled.
std::string CsvField(std::string_view field);
std::string CsvRow(const std::vector<std::string>& fields);

// Shortest round-trip decimal representation ("%.17g" trimmed to the shortest
// string that parses back to the same double).
std::string FormatDouble(double value);

}  // namespace fairrec

#endif  // FAIRREC_TSV_H_
