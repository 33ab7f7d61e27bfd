#include "tsdiff/dataset_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "schema_json.hpp"
#include "tsdiff/errors.hpp"

namespace tsdiff {
namespace {

using detail::Json;

std::string json_string(std::string_view s) { return Json(std::string(s)).dump(); }

std::string array_text(std::span<const double> xs) {
  std::string out = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += format_double(xs[i]);
  }
  return out + "]";
}

// Reads a CSV column written by series_csv (header optional).
TimeSeries read_series_csv(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  TimeSeries out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string cell = line.substr(0, line.find(','));
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
      if (first) {
        first = false;
        continue;
      }
      throw DataError(path.string() + ": bad numeric value '" + cell + "'");
    }
    first = false;
    out.push_back(v);
  }
  return out;
}

TimeSeries series_field(const Json& obj, const std::string& key, const std::filesystem::path& base,
                        const std::string& id) {
  if (obj.contains(key)) {
    const Json& arr = obj.at(key);
    if (!arr.is_array()) throw DataError("sample " + id + ": '" + key + "' must be an array of numbers");
    TimeSeries out;
    out.reserve(arr.size());
    for (const auto& v : arr) {
      if (!v.is_number()) throw DataError("sample " + id + ": '" + key + "' must be an array of numbers");
      out.push_back(v.get<double>());
    }
    return out;
  }
  const std::string file_key = key + "_file";
  if (obj.contains(file_key) && obj.at(file_key).is_string()) {
    return read_series_csv(base / obj.at(file_key).get<std::string>());
  }
  throw DataError("sample " + id + ": missing '" + key + "' or '" + file_key + "'");
}

std::filesystem::path manifest_path(const std::filesystem::path& path) {
  return std::filesystem::is_directory(path) ? path / kManifestName : path;
}

// Calls fn(json, line_number) for every non-blank line.
template <typename Fn>
void for_each_json_line(const std::filesystem::path& path, Fn&& fn) {
  std::istringstream in(read_file(path));
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      const ParseError inner = detail::syntax_error(e, line);
      throw ParseError(ParseError::Kind::Syntax,
                       path.string() + ": syntax error at line " + std::to_string(number) + ", column " +
                           std::to_string(inner.column()),
                       number, inner.column());
    }
    if (!j.is_object()) {
      throw ParseError(ParseError::Kind::Schema, path.string() + ": line " + std::to_string(number) +
                                                     " is not a JSON object");
    }
    fn(j, number);
  }
}

std::string id_of(const Json& j, const std::filesystem::path& path, std::size_t line) {
  if (!j.contains("id") || !j.at("id").is_string()) {
    throw ParseError(ParseError::Kind::Schema,
                     path.string() + ": line " + std::to_string(line) + " has no string 'id'");
  }
  return j.at("id").get<std::string>();
}

ExplanationList list_at(const Json& j, const char* key, ParseMode mode, std::optional<int> length,
                        const std::filesystem::path& path, std::size_t line, const std::string& id) {
  try {
    return detail::list_from_json(j.at(key), mode, length);
  } catch (const ParseError& e) {
    throw ParseError(ParseError::Kind::Schema,
                     path.string() + ": line " + std::to_string(line) + " (sample " + id + "): " + e.what());
  }
}

}  // namespace

std::string format_double(double v) {
  if (!std::isfinite(v)) throw DataError("non-finite value cannot be written as JSON");
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw DataError("cannot format value");
  std::string s(buf, ptr);
  // Keep it a JSON number that reads back as floating point.
  if (s.find_first_of(".eE") == std::string::npos && s.find("inf") == std::string::npos) s += ".0";
  return s;
}

std::string manifest_line(const PairSample& sample, const std::optional<SeriesFiles>& files) {
  std::string out = "{\"id\": " + json_string(sample.id);
  if (files) {
    out += ", \"ref_file\": " + json_string(files->ref) + ", \"tgt_file\": " + json_string(files->tgt);
  } else {
    out += ", \"ref\": " + array_text(sample.reference) + ", \"tgt\": " + array_text(sample.target);
  }
  out += ", \"ground_truth\": " + serialize(sample.ground_truth, static_cast<int>(sample.reference.size()));
  const auto& p = sample.provenance;
  out += ", \"provenance\": {\"seed\": " + std::to_string(p.seed) + ", \"index\": " + std::to_string(p.index) +
         ", \"source\": " + json_string(p.source) + ", \"config_hash\": " + json_string(p.config_hash) + "}}";
  return out;
}

std::string series_csv(std::span<const double> series) {
  std::string out = "value\n";
  for (double v : series) out += format_double(v) + "\n";
  return out;
}

std::string overlay_csv(std::span<const double> ref, std::span<const double> tgt) {
  if (ref.size() != tgt.size()) throw DataError("reference and target lengths differ");
  std::string out = "ref,tgt\n";
  for (std::size_t i = 0; i < ref.size(); ++i) out += format_double(ref[i]) + "," + format_double(tgt[i]) + "\n";
  return out;
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  const auto file = manifest_path(path);
  const auto base = file.parent_path();
  std::vector<ManifestEntry> out;
  for_each_json_line(file, [&](const Json& j, std::size_t line) {
    ManifestEntry e;
    e.id = id_of(j, file, line);
    e.reference = series_field(j, "ref", base, e.id);
    e.target = series_field(j, "tgt", base, e.id);
    if (e.reference.size() != e.target.size()) {
      throw DataError("sample " + e.id + ": reference and target lengths differ");
    }
    if (!j.contains("ground_truth")) throw DataError("sample " + e.id + ": missing 'ground_truth'");
    e.ground_truth =
        list_at(j, "ground_truth", ParseMode::Strict, static_cast<int>(e.reference.size()), file, line, e.id);
    if (j.contains("provenance") && j.at("provenance").is_object()) {
      const Json& p = j.at("provenance");
      e.provenance.seed = p.value("seed", std::uint64_t{0});
      e.provenance.index = p.value("index", std::uint64_t{0});
      e.provenance.source = p.value("source", std::string());
      e.provenance.config_hash = p.value("config_hash", std::string());
    }
    out.push_back(std::move(e));
  });
  return out;
}

std::string prediction_line(std::string_view id, const ExplanationList& list) {
  return "{\"id\": " + json_string(id) + ", \"explanation\": " + serialize(list) + "}";
}

std::vector<IdentifiedList> read_lists(const std::filesystem::path& path, ParseMode mode) {
  const auto file = manifest_path(path);
  std::vector<IdentifiedList> out;
  for_each_json_line(file, [&](const Json& j, std::size_t line) {
    IdentifiedList item;
    item.id = id_of(j, file, line);
    const char* key = j.contains("explanation") ? "explanation" : "ground_truth";
    if (!j.contains(key)) {
      throw ParseError(ParseError::Kind::Schema, file.string() + ": line " + std::to_string(line) +
                                                     " has neither 'explanation' nor 'ground_truth'");
    }
    item.list = list_at(j, key, mode, std::nullopt, file, line, item.id);
    out.push_back(std::move(item));
  });
  return out;
}

TextValidation validate_text(std::string_view text, ParseMode mode) {
  TextValidation out;
  auto check_value = [&](const Json& j, const std::string& where) {
    try {
      if (j.is_array()) {
        out.records += detail::list_from_json(j, mode, std::nullopt).size();
        return;
      }
      if (!j.is_object()) throw ParseError(ParseError::Kind::Schema, "expected an array or an object");
      const char* key = j.contains("explanation") ? "explanation" : "ground_truth";
      if (!j.contains(key)) throw ParseError(ParseError::Kind::Schema, "neither 'explanation' nor 'ground_truth'");
      std::optional<int> length;
      if (j.contains("ref") && j.at("ref").is_array()) length = static_cast<int>(j.at("ref").size());
      const std::string id = j.contains("id") && j.at("id").is_string() ? j.at("id").get<std::string>() : "?";
      try {
        out.records += detail::list_from_json(j.at(key), mode, length).size();
      } catch (const ParseError& e) {
        throw ParseError(ParseError::Kind::Schema, "sample " + id + ": " + e.what());
      }
    } catch (const ParseError& e) {
      out.problems.push_back(where + e.what());
    }
  };

  try {
    const Json whole = Json::parse(text);
    check_value(whole, "");
    return out;
  } catch (const nlohmann::json::parse_error&) {
    // Not a single document; fall through to JSON lines.
  }
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const std::string where = "line " + std::to_string(number) + ": ";
    try {
      check_value(Json::parse(line), where);
    } catch (const nlohmann::json::parse_error& e) {
      out.problems.push_back(where + detail::syntax_error(e, line).what());
    }
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move " + tmp.string() + " to " + path.string());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string RunManifest::to_json() const {
  Json j;
  j["command"] = command;
  j["config_hash"] = config_hash;
  j["seed"] = seed ? Json(*seed) : Json(nullptr);
  j["tool_version"] = tool_version;
  j["inputs"] = inputs;
  j["outputs"] = outputs;
  j["duration_seconds"] = duration_seconds;
  return j.dump(2) + "\n";
}

}  // namespace tsdiff
