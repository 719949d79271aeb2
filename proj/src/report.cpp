#include <cstdio>
#include <fstream>
#include <sstream>

#include "mvqc/eval.hpp"

namespace mvqc {
namespace fs = std::filesystem;
namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) return out;
    start = comma + 1;
  }
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace

std::string format_percent(double rate) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", rate * 100.0);
  return buf;
}

std::string summary_csv(std::span<const EvalReport> reports) {
  std::ostringstream out;
  out << kSummaryHeader << '\n';
  for (const auto& r : reports)
    for (const auto& s : r.summary)
      out << to_string(s.classifier) << ',' << to_string(r.kind) << ',' << r.d1 << ',' << r.b << ','
          << format_percent(s.avg_frr) << ',' << format_percent(s.avg_far) << ',' << s.n_zero_frr << ','
          << s.n_zero_far << '\n';
  return out.str();
}

std::string subject_csv(std::span<const EvalReport> reports) {
  std::ostringstream out;
  out << kSubjectHeader << '\n';
  for (const auto& r : reports)
    for (const auto& row : r.rows)
      out << to_string(row.classifier) << ',' << to_string(r.kind) << ',' << r.d1 << ',' << r.b << ','
          << row.subject << ',' << format_percent(row.frr) << ',' << format_percent(row.far) << ','
          << row.genuine_tests << ',' << row.imposter_tests << '\n';
  return out.str();
}

fs::path subject_csv_path(const fs::path& summary_path) {
  return summary_path.parent_path() / (summary_path.stem().string() + "_subjects.csv");
}

void write_report_csv(std::span<const EvalReport> reports, const fs::path& path) {
  write_file(path, summary_csv(reports));
  write_file(subject_csv_path(path), subject_csv(reports));
}

std::vector<SummaryRow> parse_summary_csv(std::string_view text) {
  std::vector<SummaryRow> rows;
  std::size_t pos = 0;
  bool header = true;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::size_t line_start = pos;
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (header) {
      if (line != kSummaryHeader) throw ParseError("unexpected summary CSV header", line_start);
      header = false;
      continue;
    }
    const auto f = split_fields(line);
    if (f.size() != 8) throw ParseError("summary CSV row needs 8 fields", line_start);
    SummaryRow r;
    r.classifier = std::string(f[0]);
    r.moment = std::string(f[1]);
    r.d1 = static_cast<int>(parse_double(f[2]));
    r.b = static_cast<int>(parse_double(f[3]));
    r.avg_frr_pct = parse_double(f[4]);
    r.avg_far_pct = parse_double(f[5]);
    r.n_zero_frr = static_cast<int>(parse_double(f[6]));
    r.n_zero_far = static_cast<int>(parse_double(f[7]));
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string format_summary_table(std::span<const EvalReport> reports) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-18s %-9s %4s %3s %9s %9s %7s %7s\n", "classifier", "moment", "d1", "b",
                "FRR %", "FAR %", "0-FRR", "0-FAR");
  out << line;
  for (const auto& r : reports) {
    for (const auto& s : r.summary) {
      std::snprintf(line, sizeof line, "%-18s %-9s %4d %3d %9s %9s %7d %7d\n",
                    std::string(to_string(s.classifier)).c_str(), std::string(to_string(r.kind)).c_str(), r.d1,
                    r.b, format_percent(s.avg_frr).c_str(), format_percent(s.avg_far).c_str(), s.n_zero_frr,
                    s.n_zero_far);
      out << line;
    }
    if (r.skipped_subjects > 0) out << "  (" << r.skipped_subjects << " subject(s) skipped)\n";
  }
  return out.str();
}

}  // namespace mvqc
