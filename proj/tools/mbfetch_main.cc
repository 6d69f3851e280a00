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

#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fairrec/corpus.h"
#include "fairrec/error.h"
#include "fairrec/tsv.h"
#include "musicbrainz.h"
#include "output_guard.h"

int main(int argc, char** argv) {
  CLI::App app{"Resolve artist genders from MusicBrainz into a gender map TSV"};
  std::string artists_path, out_path;
  fairrec::tools::FetchOptions options;
  int interval_ms = 1000;
  app.add_option("--artists", artists_path, "file whose first column holds artist MBIDs")->required();
  app.add_option("--out", out_path, "gender map to write")->required();
  app.add_option("--base-url", options.base_url, "MusicBrainz server");
  app.add_option("--user-agent", options.user_agent, "User-Agent header");
  app.add_option("--interval-ms", interval_ms, "minimum milliseconds between requests")
      ->check(CLI::Range(1000, 600000));
  CLI11_PARSE(app, argc, argv);
  options.interval = std::chrono::milliseconds(interval_ms);

  try {
    std::set<std::string> ids;
    fairrec::ForEachLine(artists_path, "mbfetch", [&](std::size_t, std::string_view line) {
      const auto fields = fairrec::SplitTabs(line);
      if (fields.empty()) return;
      const auto id = fairrec::Trim(fields[0]);
      if (!id.empty() && id != "artist_id") ids.emplace(id);
    });
    fairrec::tools::FetchReport report;
    const auto map = fairrec::tools::FetchGenders(
        {ids.begin(), ids.end()}, options, &report,
        [](std::size_t n) { if (n % 50 == 0) std::cerr << n << " requests\n"; });
    fairrec::tools::OutputGuard guard(std::filesystem::path(out_path).parent_path().empty()
                                          ? std::filesystem::path(".")
                                          : std::filesystem::path(out_path).parent_path());
    std::ofstream out = fairrec::OpenForWrite(out_path, "mbfetch");
    fairrec::WriteGenderMap(out, map);
    out.close();
    if (!out) throw fairrec::PipelineError("mbfetch", "write failed for '" + out_path + "'");
    guard.Commit();
    for (const auto& f : report.failures) std::cerr << "failed: " << f << "\n";
    std::cout << ids.size() << " artists, " << report.requests << " requests, "
              << report.failures.size() << " failures\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
