#include "cowest/metrics/report.hpp"

#include <algorithm>
#include <cstdio>
#include <system_error>

#include "cowest/core/errors.hpp"

namespace cowest::metrics {
namespace fs = std::filesystem;

std::string display_name(const std::string& metric) {
  if (metric == "em") return "EM";
  if (metric == "token_f1" || metric == "macro_f1") return "F1";
  if (metric == "accuracy") return "Acc";
  return metric;
}

Record report_record(const std::string& dataset, const MetricReport& report) {
  Record r = report.to_record();
  r["dataset"] = dataset;
  return r;
}

namespace {

void require_nonempty(const fs::path& path) {
  std::error_code ec;
  if (!fs::exists(path, ec)) throw MissingFile(path.string(), "no such file");
  if (fs::file_size(path, ec) == 0 || ec) throw MissingFile(path.string(), "file is empty");
}

}  // namespace

ReportColumn load_run_report(const fs::path& path) {
  require_nonempty(path);
  ReportColumn col;
  const auto parent = path.parent_path();
  col.name = (parent.filename() == "reports" && parent.has_parent_path())
                 ? parent.parent_path().filename().string() + "/" + path.stem().string()
                 : path.stem().string();
  const auto records = read_records(path);
  if (records.empty()) throw MissingFile(path.string(), "file holds no reports");
  for (const auto& r : records) {
    const auto m = MetricReport::from_record(r);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", 100.0 * m.value);
    col.cells.push_back({r.value("dataset", std::string("-")), display_name(m.metric), buf});
  }
  return col;
}

ReportColumn load_reference_fixture(const fs::path& path) {
  require_nonempty(path);
  ReportColumn col;
  try {
    const auto doc = nlohmann::json::parse(read_text_file(path));
    col.name = "paper:" + doc.at("method").get<std::string>();
    for (const auto& row : doc.at("rows"))
      col.cells.push_back({row.at("dataset").get<std::string>(), row.at("metric").get<std::string>(),
                           row.at("value").get<std::string>()});
  } catch (const nlohmann::json::exception& e) {
    throw MalformedRecord(1, path.string() + ": " + e.what());
  }
  return col;
}

std::string render_table(std::span<const ReportColumn> columns) {
  std::vector<std::pair<std::string, std::string>> rows;
  for (const auto& col : columns)
    for (const auto& cell : col.cells) {
      std::pair key{cell.dataset, cell.metric};
      if (std::find(rows.begin(), rows.end(), key) == rows.end()) rows.push_back(key);
    }

  std::vector<std::vector<std::string>> grid;
  std::vector<std::string> header{"dataset", "metric"};
  for (const auto& col : columns) header.push_back(col.name);
  grid.push_back(header);
  for (const auto& [dataset, metric] : rows) {
    std::vector<std::string> line{dataset, metric};
    for (const auto& col : columns) {
      auto it = std::find_if(col.cells.begin(), col.cells.end(), [&](const ReportCell& c) {
        return c.dataset == dataset && c.metric == metric;
      });
      line.push_back(it == col.cells.end() ? "-" : it->value);
    }
    grid.push_back(std::move(line));
  }

  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& line : grid)
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());

  std::string out;
  for (const auto& line : grid) {
    std::string text;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (i > 0) text += "  ";
      text += line[i];
      if (i + 1 < line.size()) text.append(width[i] - line[i].size(), ' ');
    }
    out += text + "\n";
  }
  return out;
}

}  // namespace cowest::metrics
