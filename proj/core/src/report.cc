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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "fairrec/error.h"
#include "fairrec/experiment.h"
#include "fairrec/tsv.h"

namespace fairrec {

namespace {

std::string Optional(const std::optional<double>& v) { return v ? FormatDouble(*v) : ""; }

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::vector<const AuditRow*> MeanRows(const std::vector<AuditRow>& rows) {
  std::vector<const AuditRow*> out;
  for (const auto& r : rows) {
    if (r.fold == "mean") out.push_back(&r);
  }
  return out;
}

std::vector<std::string> AlgorithmOrder(const std::vector<const AuditRow*>& rows) {
  std::vector<std::string> names;
  for (const auto* r : rows) {
    if (std::find(names.begin(), names.end(), r->algorithm) == names.end()) {
      names.push_back(r->algorithm);
    }
  }
  return names;
}

constexpr const char* kBarColors[4] = {"#1f77b4", "#aec7e8", "#d62728", "#ff9896"};

int CellSlot(const AuditRow& r) {
  return (r.group == UserGroup::kMaleUsers ? 0 : 2) + (r.category == ArtistCategory::kMaleArtists ? 0 : 1);
}

std::string SlotLabel(int slot) {
  static const char* labels[4] = {"MaleUsers/MaleArtists", "MaleUsers/FemaleArtists",
                                  "FemaleUsers/MaleArtists", "FemaleUsers/FemaleArtists"};
  return labels[slot];
}

struct ChartFrame {
  double width = 0.0;
  double height = 0.0;
  double left = 60.0;
  double right = 20.0;
  double top = 40.0;
  double bottom = 90.0;
  double lo = 0.0;
  double hi = 1.0;

  double Y(double v) const { return top + (hi - v) / (hi - lo) * (height - top - bottom); }
  double PlotWidth() const { return width - left - right; }
};

void SvgOpen(std::ostream& out, const ChartFrame& frame, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << frame.width << "\" height=\""
      << frame.height << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << frame.width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
      << title << "</text>\n";
}

void SvgAxis(std::ostream& out, const ChartFrame& frame, double step) {
  const double x0 = frame.left, x1 = frame.width - frame.right;
  for (double v = frame.lo; v <= frame.hi + 1e-9; v += step) {
    const double y = frame.Y(v);
    out << "<line x1=\"" << x0 << "\" y1=\"" << y << "\" x2=\"" << x1 << "\" y2=\"" << y
        << "\" stroke=\"#ddd\"/>\n";
    out << "<text x=\"" << x0 - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">"
        << Fixed(v, 2) << "</text>\n";
  }
  out << "<line x1=\"" << x0 << "\" y1=\"" << frame.Y(0.0) << "\" x2=\"" << x1 << "\" y2=\""
      << frame.Y(0.0) << "\" stroke=\"black\"/>\n";
}

void SvgLegend(std::ostream& out, const ChartFrame& frame) {
  for (int s = 0; s < 4; ++s) {
    const double x = frame.left + s * frame.PlotWidth() / 4.0;
    const double y = frame.height - 25.0;
    out << "<rect x=\"" << x << "\" y=\"" << y - 9 << "\" width=\"10\" height=\"10\" fill=\""
        << kBarColors[s] << "\"/>\n";
    out << "<text x=\"" << x + 14 << "\" y=\"" << y << "\">" << SlotLabel(s) << "</text>\n";
  }
}

template <typename BarFn>
void SvgBars(std::ostream& out, const ChartFrame& frame, const std::vector<std::string>& algos,
             const std::vector<const AuditRow*>& rows, BarFn bar) {
  const double group_width = frame.PlotWidth() / static_cast<double>(std::max<std::size_t>(algos.size(), 1));
  const double bar_width = group_width * 0.8 / 4.0;
  for (std::size_t g = 0; g < algos.size(); ++g) {
    const double gx = frame.left + static_cast<double>(g) * group_width + group_width * 0.1;
    out << "<text x=\"" << gx + group_width * 0.4 << "\" y=\"" << frame.height - frame.bottom + 18
        << "\" text-anchor=\"middle\">" << algos[g] << "</text>\n";
    for (const auto* r : rows) {
      if (r->algorithm != algos[g]) continue;
      const int slot = CellSlot(*r);
      bar(*r, gx + slot * bar_width, bar_width, kBarColors[slot]);
    }
  }
}

}  // namespace

void WriteAuditCsv(std::ostream& out, const std::vector<AuditRow>& rows) {
  out << kAuditHeader << "\r\n";
  for (const auto& r : rows) {
    out << CsvRow({r.experiment, r.dataset, r.algorithm, r.fold, std::string(UserGroupName(r.group)),
                   std::string(ArtistCategoryName(r.category)), Optional(r.pr_input),
                   Optional(r.pr_output), Optional(r.bias_disparity), r.skip_reason});
  }
}

void WriteMetricsCsv(std::ostream& out, const std::vector<MetricRow>& rows) {
  out << kMetricsHeader << "\r\n";
  for (const auto& r : rows) {
    const MetricReport& m = r.report;
    out << CsvRow({r.experiment, r.dataset, r.algorithm, r.fold, FormatDouble(m.precision),
                   FormatDouble(m.ndcg), FormatDouble(m.coverage), FormatDouble(m.spread),
                   FormatDouble(m.longtail_pct), std::to_string(m.users_evaluated),
                   std::to_string(m.ndcg_skipped)});
  }
}

void WritePrDistributionTsv(std::ostream& out, const std::vector<PrDistributionRow>& rows) {
  out << "user_id\tgender\tpr_male\tpr_female\n";
  for (const auto& r : rows) {
    out << r.user_id << '\t' << (r.group == UserGroup::kMaleUsers ? "male" : "female") << '\t'
        << FormatDouble(r.pr_male) << '\t' << FormatDouble(r.pr_female) << '\n';
  }
}

void WritePrChartSvg(std::ostream& out, const std::vector<AuditRow>& rows) {
  const auto means = MeanRows(rows);
  const auto algos = AlgorithmOrder(means);
  ChartFrame frame;
  frame.width = 120.0 + 160.0 * static_cast<double>(algos.size());
  frame.height = 360.0;
  frame.lo = 0.0;
  frame.hi = 1.0;
  SvgOpen(out, frame, "Preference ratio (output bars, input dotted)");
  SvgAxis(out, frame, 0.2);
  SvgBars(out, frame, algos, means, [&](const AuditRow& r, double x, double w, const char* color) {
    if (r.pr_output) {
      const double y = frame.Y(*r.pr_output);
      out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << w << "\" height=\""
          << frame.Y(0.0) - y << "\" fill=\"" << color << "\"/>\n";
    }
    if (r.pr_input) {
      const double y = frame.Y(*r.pr_input);
      out << "<line x1=\"" << x << "\" y1=\"" << y << "\" x2=\"" << x + w << "\" y2=\"" << y
          << "\" stroke=\"black\" stroke-dasharray=\"2,2\"/>\n";
    }
  });
  SvgLegend(out, frame);
  out << "</svg>\n";
}

void WriteBdChartSvg(std::ostream& out, const std::vector<AuditRow>& rows) {
  const auto means = MeanRows(rows);
  const auto algos = AlgorithmOrder(means);
  double lo = -0.2, hi = 0.2;
  for (const auto* r : means) {
    if (!r->bias_disparity) continue;
    lo = std::min(lo, *r->bias_disparity);
    hi = std::max(hi, *r->bias_disparity);
  }
  const double step = std::max(0.1, std::ceil((hi - lo) / 8.0 * 10.0) / 10.0);
  ChartFrame frame;
  frame.width = 120.0 + 160.0 * static_cast<double>(algos.size());
  frame.height = 360.0;
  frame.lo = std::floor(lo / step) * step;
  frame.hi = std::ceil(hi / step) * step;
  SvgOpen(out, frame, "Bias disparity");
  SvgAxis(out, frame, step);
  SvgBars(out, frame, algos, means, [&](const AuditRow& r, double x, double w, const char* color) {
    if (!r.bias_disparity) return;
    const double y0 = frame.Y(0.0), y1 = frame.Y(*r.bias_disparity);
    out << "<rect x=\"" << x << "\" y=\"" << std::min(y0, y1) << "\" width=\"" << w
        << "\" height=\"" << std::abs(y1 - y0) << "\" fill=\"" << color << "\"/>\n";
  });
  SvgLegend(out, frame);
  out << "</svg>\n";
}

std::vector<std::filesystem::path> EmitReport(const ExperimentResult& result,
                                              const std::filesystem::path& dir, bool write_svg) {
  if (result.audit.empty() || result.metrics.empty()) {
    throw PipelineError("report", "nothing to report");
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw PipelineError("report", "cannot create output directory '" + dir.string() + "'");
  }
  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::string& name, auto&& writer) {
    const auto path = dir / name;
    std::ofstream out = OpenForWrite(path, "report");
    writer(out);
    out.close();
    if (!out) throw PipelineError("report", "write failed for '" + path.string() + "'");
    written.push_back(path);
  };
  emit("audit.csv", [&](std::ostream& o) { WriteAuditCsv(o, result.audit); });
  emit("metrics.csv", [&](std::ostream& o) { WriteMetricsCsv(o, result.metrics); });
  emit("pr_distribution.tsv",
       [&](std::ostream& o) { WritePrDistributionTsv(o, result.pr_distribution); });
  if (write_svg) {
    emit("pr_chart.svg", [&](std::ostream& o) { WritePrChartSvg(o, result.audit); });
    emit("bd_chart.svg", [&](std::ostream& o) { WriteBdChartSvg(o, result.audit); });
  }
  return written;
}

std::vector<std::vector<std::string>> ReadCsv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PipelineError("report", "cannot read '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();

  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool row_has_content = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        row_has_content = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        row_has_content = true;
        break;
      case '\r':
        break;
      case '\n':
        if (row_has_content || !field.empty()) {
          row.push_back(std::move(field));
          rows.push_back(std::move(row));
        }
        field.clear();
        row.clear();
        row_has_content = false;
        break;
      default:
        field += c;
        row_has_content = true;
    }
  }
  if (quoted) throw PipelineError("report", "unterminated quote in '" + path.string() + "'");
  if (row_has_content || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace fairrec
