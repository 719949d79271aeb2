#include <charconv>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <system_error>

#include "mvqc/mvqc.hpp"

namespace mvqc {
namespace {

constexpr std::string_view kHeader = "mvqc-template v1";

template <typename T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_same_v<T, double>)
      out += format_double(values[i]);
    else
      out += std::to_string(values[i]);
  }
  return out;
}

int parse_int(std::string_view text, const std::string& key) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw Error("template field '" + key + "': bad integer '" + std::string(text) + "'");
  return v;
}

std::vector<std::string_view> split_commas(std::string_view text) {
  std::vector<std::string_view> out;
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    out.push_back(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw Error("cannot format double");
  return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
  double v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
    throw Error("bad number '" + std::string(text) + "'");
  return v;
}

std::string serialize_template(const MvqcTemplate& t) {
  const auto& r = t.reference;
  std::ostringstream out;
  out << kHeader << '\n'
      << "subject=" << t.subject << '\n'
      << "modality=" << to_string(t.modality) << '\n'
      << "t_dark=" << t.iris.t_dark << '\n'
      << "offset1=" << t.iris.offset1 << '\n'
      << "offset2=" << t.iris.offset2 << '\n'
      << "moment=" << to_string(t.kind) << '\n'
      << "tile_order=" << to_string(t.order) << '\n'
      << "d1=" << t.d1 << '\n'
      << "b=" << t.b << '\n'
      << "indices=" << join(t.indices) << '\n'
      << "H=" << join(r.sums) << '\n'
      << "m1=" << format_double(r.m1) << '\n'
      << "m2=" << format_double(r.m2) << '\n'
      << "mean=" << format_double(r.mean) << '\n'
      << "factor=" << format_double(r.factor) << '\n'
      << "c1=" << format_double(r.seeds.c1) << '\n'
      << "c2=" << format_double(r.seeds.c2) << '\n'
      << "threshold=" << format_double(r.seeds.threshold) << '\n'
      << "knn_k=" << r.knn_k << '\n'
      << "knn_tau=" << format_double(r.knn_tau) << '\n'
      << "knn_slack=" << format_double(r.options.knn_slack) << '\n'
      << "fuzzifier=" << format_double(r.options.fuzzifier) << '\n';
  return out.str();
}

MvqcTemplate parse_template(std::string_view text) {
  std::map<std::string, std::string, std::less<>> fields;
  std::size_t pos = 0;
  bool header_seen = false;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const std::size_t line_start = pos;
    pos = eol + 1;
    if (!header_seen) {
      if (line != kHeader) throw ParseError("not an MVQC template (bad header)", line_start);
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key=value", line_start);
    fields.emplace(std::string(line.substr(0, eq)), std::string(line.substr(eq + 1)));
  }
  if (!header_seen) throw ParseError("empty template", 0);

  const auto get = [&](const std::string& key) -> const std::string& {
    const auto it = fields.find(key);
    if (it == fields.end()) throw Error("template missing field '" + key + "'");
    return it->second;
  };

  MvqcTemplate t;
  t.subject = get("subject");
  t.modality = parse_modality(get("modality"));
  t.iris.t_dark = parse_int(get("t_dark"), "t_dark");
  t.iris.offset1 = parse_int(get("offset1"), "offset1");
  t.iris.offset2 = parse_int(get("offset2"), "offset2");
  t.kind = parse_moment_kind(get("moment"));
  t.order = parse_tile_order(get("tile_order"));
  t.d1 = parse_int(get("d1"), "d1");
  t.b = parse_int(get("b"), "b");
  for (auto item : split_commas(get("indices"))) t.indices.push_back(parse_int(item, "indices"));
  std::vector<double> h;
  for (auto item : split_commas(get("H"))) h.push_back(parse_double(item));

  const int count = tile_count(kNormalizedSide, t.d1);
  if (static_cast<int>(t.indices.size()) != t.b) throw Error("template: indices length differs from b");
  for (std::size_t i = 0; i < t.indices.size(); ++i) {
    if (t.indices[i] < 1 || t.indices[i] > count) throw Error("template: tile index out of range");
    if (i > 0 && t.indices[i] <= t.indices[i - 1]) throw Error("template: indices not strictly increasing");
  }
  if (h.empty()) throw Error("template: empty H");

  ReferenceOptions opts;
  opts.knn_slack = parse_double(get("knn_slack"));
  opts.fuzzifier = parse_double(get("fuzzifier"));
  t.reference = make_reference(h, opts);

  // Derived values are recomputed; the stored copies must agree.
  const auto& r = t.reference;
  const std::pair<const char*, double> derived[] = {
      {"m1", r.m1},       {"m2", r.m2},       {"mean", r.mean},
      {"factor", r.factor}, {"c1", r.seeds.c1}, {"c2", r.seeds.c2},
      {"threshold", r.seeds.threshold}, {"knn_tau", r.knn_tau}};
  for (const auto& [key, value] : derived)
    if (parse_double(get(key)) != value)
      throw Error(std::string("template field '") + key + "' inconsistent with H");
  if (parse_int(get("knn_k"), "knn_k") != r.knn_k) throw Error("template field 'knn_k' inconsistent with H");
  return t;
}

void write_template(const std::filesystem::path& path, const MvqcTemplate& tmpl) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write template " + path.string());
  out << serialize_template(tmpl);
  if (!out) throw Error("write failed for " + path.string());
}

MvqcTemplate read_template(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open template " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_template(text);
}

}  // namespace mvqc
