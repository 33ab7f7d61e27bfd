#include "tsdiff/schema.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <sstream>

#include "schema_json.hpp"

namespace tsdiff {
namespace {

constexpr std::array<std::string_view, 7> kKeys{"type", "func", "start", "end", "presence", "param", "magnitude"};

std::string quoted(std::string_view s) { return "\"" + std::string(s) + "\""; }

template <typename T>
std::string optional_field(const std::optional<T>& v) {
  return v ? quoted(to_string(*v)) : std::string("null");
}

std::string join_violations(const std::vector<Violation>& vs) {
  std::string out;
  for (const auto& v : vs) {
    if (!out.empty()) out += "; ";
    out += v.field + ": " + v.message;
  }
  return out;
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::optional<DiffType> parse_type(std::string_view s) {
  if (s == "TYPE1") return DiffType::Type1;
  if (s == "TYPE2") return DiffType::Type2;
  return std::nullopt;
}

std::optional<Presence> parse_presence(std::string_view s) {
  if (s == "PRESENT") return Presence::Present;
  if (s == "ABSENT") return Presence::Absent;
  return std::nullopt;
}

std::optional<Magnitude> parse_magnitude(std::string_view s) {
  if (s == "LARGER") return Magnitude::Larger;
  if (s == "SMALLER") return Magnitude::Smaller;
  return std::nullopt;
}

class RecordReader {
 public:
  RecordReader(const detail::Json& j, ParseMode mode, std::size_t index) : j_(j), mode_(mode), index_(index) {}

  DifferenceRecord read() {
    if (!j_.is_object()) fail("record", "must be a JSON object");
    check_keys();
    DifferenceRecord r;
    r.type = required_enum<DiffType>("type", parse_type);
    r.func = required_enum<FuncId>("func", parse_func_id);
    r.start = required_int("start");
    r.end = required_int("end");
    r.presence = optional_enum<Presence>("presence", parse_presence);
    r.param = optional_enum<Param>("param", parse_param);
    r.magnitude = optional_enum<Magnitude>("magnitude", parse_magnitude);
    return r;
  }

  [[noreturn]] void fail(std::string_view field, std::string_view message) const {
    throw ParseError(ParseError::Kind::Schema,
                     "record " + std::to_string(index_) + ", field " + std::string(field) + ": " + std::string(message));
  }

 private:
  void check_keys() const {
    for (const auto& [key, value] : j_.items()) {
      if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) fail(key, "unknown key");
    }
    if (mode_ == ParseMode::Lenient) return;
    std::size_t i = 0;
    for (const auto& [key, value] : j_.items()) {
      if (i >= kKeys.size() || key != kKeys[i]) {
        if (!j_.contains(std::string(kKeys[i]))) fail(kKeys[i], "missing");
        fail(key, "key out of order (expected " + std::string(kKeys[i]) + ")");
      }
      ++i;
    }
    if (i < kKeys.size()) fail(kKeys[i], "missing");
  }

  const detail::Json* find(std::string_view key) const {
    auto it = j_.find(std::string(key));
    return it == j_.end() ? nullptr : &*it;
  }

  template <typename E, typename Parser>
  E parse_enum(std::string_view field, const detail::Json& v, Parser parser) const {
    if (!v.is_string()) fail(field, "must be a string");
    const auto& s = v.get_ref<const std::string&>();
    if (auto e = parser(s)) return *e;
    if (s != upper(s) && parser(upper(s))) fail(field, "enum values must be uppercase, got '" + s + "'");
    fail(field, "unknown enum for " + std::string(field) + " '" + s + "'");
  }

  template <typename E, typename Parser>
  E required_enum(std::string_view field, Parser parser) const {
    const auto* v = find(field);
    if (v == nullptr) fail(field, "missing");
    return parse_enum<E>(field, *v, parser);
  }

  template <typename E, typename Parser>
  std::optional<E> optional_enum(std::string_view field, Parser parser) const {
    const auto* v = find(field);
    if (v == nullptr || v->is_null()) return std::nullopt;
    return parse_enum<E>(field, *v, parser);
  }

  int required_int(std::string_view field) const {
    const auto* v = find(field);
    if (v == nullptr) fail(field, "missing");
    if (!v->is_number_integer()) fail(field, "must be an integer");
    const auto value = v->get<long long>();
    if (value < std::numeric_limits<int>::min() || value > std::numeric_limits<int>::max()) {
      fail(field, "out of range");
    }
    return static_cast<int>(value);
  }

  const detail::Json& j_;
  ParseMode mode_;
  std::size_t index_;
};

}  // namespace

std::string_view to_string(DiffType t) { return t == DiffType::Type1 ? "TYPE1" : "TYPE2"; }
std::string_view to_string(Presence p) { return p == Presence::Present ? "PRESENT" : "ABSENT"; }
std::string_view to_string(Magnitude m) { return m == Magnitude::Larger ? "LARGER" : "SMALLER"; }

std::vector<Violation> validate(const DifferenceRecord& r, std::optional<int> length) {
  std::vector<Violation> out;
  if (r.type == DiffType::Type1) {
    if (!r.presence) out.push_back({"presence", "presence must be PRESENT or ABSENT for TYPE1"});
    if (r.param) out.push_back({"param", "param must be null for TYPE1"});
    if (r.magnitude) out.push_back({"magnitude", "magnitude must be null for TYPE1"});
  } else {
    if (r.presence) out.push_back({"presence", "presence must be null for TYPE2"});
    if (!r.param) out.push_back({"param", "param must be set for TYPE2"});
    if (!r.magnitude) out.push_back({"magnitude", "magnitude must be LARGER or SMALLER for TYPE2"});
  }
  if (r.param && !default_catalog().spec(r.func).is_modifiable(*r.param)) {
    out.push_back({"param", std::string(to_string(*r.param)) + " is not a modifiable parameter of " +
                                std::string(to_string(r.func))});
  }
  if (r.start < 0) out.push_back({"start", "start must be >= 0"});
  if (r.start > r.end) out.push_back({"end", "end must be >= start"});
  if (length && r.end > *length - 1) {
    out.push_back({"end", "end must be <= " + std::to_string(*length - 1)});
  }
  return out;
}

void sort_records(ExplanationList& list) {
  std::stable_sort(list.begin(), list.end(), [](const DifferenceRecord& a, const DifferenceRecord& b) {
    if (a.start != b.start) return a.start < b.start;
    return to_string(a.func) < to_string(b.func);
  });
}

ValidationError::ValidationError(std::size_t record_index, std::vector<Violation> violations)
    : std::runtime_error("record " + std::to_string(record_index) + " invalid: " + join_violations(violations)),
      record_index_(record_index),
      violations_(std::move(violations)) {}

std::string serialize(const DifferenceRecord& r) {
  std::string out = "{\"type\": " + quoted(to_string(r.type));
  out += ", \"func\": " + quoted(to_string(r.func));
  out += ", \"start\": " + std::to_string(r.start);
  out += ", \"end\": " + std::to_string(r.end);
  out += ", \"presence\": " + optional_field(r.presence);
  out += ", \"param\": " + optional_field(r.param);
  out += ", \"magnitude\": " + optional_field(r.magnitude);
  out += "}";
  return out;
}

std::string serialize(const ExplanationList& list, std::optional<int> length) {
  std::string out = "[";
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (auto vs = validate(list[i], length); !vs.empty()) throw ValidationError(i, std::move(vs));
    if (i > 0) out += ", ";
    out += serialize(list[i]);
  }
  out += "]";
  return out;
}

ParseError::ParseError(Kind kind, std::string message, std::size_t line, std::size_t column)
    : std::runtime_error(std::move(message)), kind_(kind), line_(line), column_(column) {}

namespace detail {

ExplanationList list_from_json(const Json& j, ParseMode mode, std::optional<int> length) {
  if (!j.is_array()) throw ParseError(ParseError::Kind::Schema, "explanation must be a JSON array");
  ExplanationList out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    RecordReader reader(j[i], mode, i);
    DifferenceRecord r = reader.read();
    if (auto vs = validate(r, length); !vs.empty()) reader.fail(vs.front().field, join_violations(vs));
    out.push_back(r);
  }
  return out;
}

ParseError syntax_error(const nlohmann::json::parse_error& e, std::string_view text) {
  // e.byte is 1-based and points at the offending character.
  const std::size_t offset = e.byte == 0 ? 0 : std::min<std::size_t>(e.byte - 1, text.size());
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < offset; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return ParseError(ParseError::Kind::Syntax,
                    "syntax error at line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                        e.what(),
                    line, column);
}

}  // namespace detail

ExplanationList parse(std::string_view text, ParseMode mode, std::optional<int> length) {
  detail::Json j;
  try {
    j = detail::Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw detail::syntax_error(e, text);
  }
  return detail::list_from_json(j, mode, length);
}

std::string canonical_form(std::string_view text) { return serialize(parse(text, ParseMode::Lenient)); }

std::string schema_document() {
  using detail::Json;
  auto enum_of = [](const std::vector<std::string>& values, bool nullable) {
    Json e = Json::array();
    for (const auto& v : values) e.push_back(v);
    if (nullable) e.push_back(nullptr);
    return Json{{"enum", e}};
  };
  std::vector<std::string> funcs;
  for (FuncId id : all_functions()) funcs.emplace_back(to_string(id));
  std::vector<std::string> params;
  for (Param p : {Param::Amplitude, Param::Frequency}) params.emplace_back(to_string(p));

  Json item;
  item["type"] = "object";
  item["additionalProperties"] = false;
  item["required"] = Json::array({"type", "func", "start", "end", "presence", "param", "magnitude"});
  item["properties"] = {
      {"type", enum_of({"TYPE1", "TYPE2"}, false)},
      {"func", enum_of(funcs, false)},
      {"start", {{"type", "integer"}, {"minimum", 0}}},
      {"end", {{"type", "integer"}, {"minimum", 0}}},
      {"presence", enum_of({"PRESENT", "ABSENT"}, true)},
      {"param", enum_of(params, true)},
      {"magnitude", enum_of({"LARGER", "SMALLER"}, true)},
  };
  auto type_is = [](std::string_view t) { return Json{{"properties", {{"type", {{"const", t}}}}}}; };
  item["allOf"] = Json::array({
      {{"if", type_is("TYPE1")},
       {"then",
        {{"properties",
          {{"presence", {{"enum", {"PRESENT", "ABSENT"}}}},
           {"param", {{"type", "null"}}},
           {"magnitude", {{"type", "null"}}}}}}}},
      {{"if", type_is("TYPE2")},
       {"then",
        {{"properties",
          {{"presence", {{"type", "null"}}},
           {"param", {{"enum", params}}},
           {"magnitude", {{"enum", {"LARGER", "SMALLER"}}}}}}}}},
  });

  Json categories = Json::object();
  for (Category c : kCategories) {
    Json members = Json::array();
    for (FuncId id : default_catalog().in_category(c)) members.push_back(to_string(id));
    categories[std::string(to_string(c))] = members;
  }
  Json modifiable = Json::object();
  for (const auto& spec : default_catalog().specs()) {
    Json ps = Json::array();
    for (Param p : spec.modifiable()) ps.push_back(to_string(p));
    modifiable[std::string(spec.name())] = ps;
  }

  Json doc;
  doc["$schema"] = "https://json-schema.org/draft/2020-12/schema";
  doc["title"] = "Time-series difference explanation";
  doc["type"] = "array";
  doc["items"] = item;
  doc["x-categories"] = categories;
  doc["x-modifiable-params"] = modifiable;
  doc["x-key-order"] = Json::array({"type", "func", "start", "end", "presence", "param", "magnitude"});
  return doc.dump(2) + "\n";
}

}  // namespace tsdiff
