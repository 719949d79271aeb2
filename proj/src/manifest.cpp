#include <charconv>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "mvqc/eval.hpp"

namespace mvqc {
namespace fs = std::filesystem;
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

int param_int(std::string_view value, std::size_t offset) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc{} || ptr != value.data() + value.size())
    throw ParseError("expected an integer parameter value", offset);
  return v;
}

}  // namespace

DatasetManifest parse_manifest(std::string_view text, const fs::path& base_dir) {
  DatasetManifest m;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::size_t line_start = pos;
    const std::string_view line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    if (line.empty() || line.front() == '#') continue;

    const std::size_t space = line.find_first_of(" \t");
    const std::string_view keyword = line.substr(0, space);
    const std::string_view rest = space == std::string_view::npos ? std::string_view{} : trim(line.substr(space));
    if (rest.empty()) throw ParseError("'" + std::string(keyword) + "' needs a value", line_start);

    if (keyword == "subject") {
      m.subjects.push_back(SubjectEntry{std::string(rest), {}, {}});
    } else if (keyword == "genuine" || keyword == "imposter") {
      if (m.subjects.empty()) throw ParseError("sample listed before any subject", line_start);
      fs::path p{std::string(rest)};
      if (p.is_relative()) p = base_dir / p;
      auto& list = keyword == "genuine" ? m.subjects.back().genuine : m.subjects.back().imposters;
      list.push_back(p.lexically_normal());
    } else if (keyword == "param") {
      const std::size_t sep = rest.find_first_of(" \t");
      if (sep == std::string_view::npos) throw ParseError("param needs a key and a value", line_start);
      const std::string_view key = rest.substr(0, sep);
      const std::string_view value = trim(rest.substr(sep));
      if (key == "modality")
        m.modality = parse_modality(value);
      else if (key == "t_dark")
        m.iris.t_dark = param_int(value, line_start);
      else if (key == "offset1")
        m.iris.offset1 = param_int(value, line_start);
      else if (key == "offset2")
        m.iris.offset2 = param_int(value, line_start);
      else
        throw ParseError("unknown param '" + std::string(key) + "'", line_start);
    } else {
      throw ParseError("unknown manifest keyword '" + std::string(keyword) + "'", line_start);
    }
  }
  return m;
}

void validate_manifest(const DatasetManifest& manifest, int min_genuine, bool check_files) {
  if (manifest.subjects.empty()) throw Error("manifest lists no subjects");
  std::set<std::string> ids;
  std::set<fs::path> paths;
  for (const auto& s : manifest.subjects) {
    if (!ids.insert(s.id).second) throw Error("duplicate subject id '" + s.id + "'");
    if (static_cast<int>(s.genuine.size()) < min_genuine)
      throw Error("subject '" + s.id + "' has " + std::to_string(s.genuine.size()) +
                  " genuine samples, need at least " + std::to_string(min_genuine));
    for (const auto* list : {&s.genuine, &s.imposters})
      for (const auto& p : *list) {
        if (!paths.insert(p).second) throw Error("duplicate sample path " + p.string());
        if (check_files && !fs::is_regular_file(p)) throw Error("missing sample file " + p.string());
      }
  }
}

DatasetManifest load_manifest(const fs::path& path, int min_genuine) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open manifest " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  DatasetManifest m;
  try {
    m = parse_manifest(text, path.parent_path());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.message(), e.offset());
  }
  validate_manifest(m, min_genuine);
  return m;
}

std::string format_manifest(const DatasetManifest& manifest, const fs::path& base_dir,
                            std::span<const std::string> comments) {
  std::ostringstream out;
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "param modality " << to_string(manifest.modality) << '\n';
  if (manifest.modality == Modality::Iris)
    out << "param t_dark " << manifest.iris.t_dark << '\n'
        << "param offset1 " << manifest.iris.offset1 << '\n'
        << "param offset2 " << manifest.iris.offset2 << '\n';
  const auto rel = [&](const fs::path& p) {
    const fs::path r = p.lexically_relative(base_dir);
    return (r.empty() || *r.begin() == "..") ? p.generic_string() : r.generic_string();
  };
  for (const auto& s : manifest.subjects) {
    out << "subject " << s.id << '\n';
    for (const auto& p : s.genuine) out << "genuine " << rel(p) << '\n';
    for (const auto& p : s.imposters) out << "imposter " << rel(p) << '\n';
  }
  return out.str();
}

std::string_view to_string(ImposterPool pool) {
  return pool == ImposterPool::Manifest ? "manifest" : "other-subjects";
}

ImposterPool parse_imposter_pool(std::string_view text) {
  if (text == "manifest") return ImposterPool::Manifest;
  if (text == "other-subjects") return ImposterPool::OtherSubjects;
  throw Error("unknown imposter pool '" + std::string(text) + "' (expected manifest or other-subjects)");
}

}  // namespace mvqc
