#pragma once

// Structured difference explanation: one JSON object per elementary difference
// with the fields type, func, start, end, presence, param, magnitude.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tsdiff/funclib.hpp"

namespace tsdiff {

enum class DiffType : std::uint8_t { Type1, Type2 };
enum class Presence : std::uint8_t { Present, Absent };
enum class Magnitude : std::uint8_t { Larger, Smaller };

std::string_view to_string(DiffType t);
std::string_view to_string(Presence p);
std::string_view to_string(Magnitude m);

struct DifferenceRecord {
  DiffType type = DiffType::Type1;
  FuncId func = FuncId::LinearIncrease;
  int start = 0;
  int end = 0;
  std::optional<Presence> presence;
  std::optional<Param> param;
  std::optional<Magnitude> magnitude;

  Interval interval() const { return Interval{start, end}; }

  friend bool operator==(const DifferenceRecord&, const DifferenceRecord&) = default;
};

using ExplanationList = std::vector<DifferenceRecord>;

struct Violation {
  std::string field;
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

/// All broken invariants of `record`; empty means valid. When `length` is given
/// the interval must also fit inside a series of that many samples.
std::vector<Violation> validate(const DifferenceRecord& record, std::optional<int> length = std::nullopt);

/// Canonical record order: start ascending, ties by func name.
void sort_records(ExplanationList& list);

/// Thrown by serialize() for invalid records.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::size_t record_index, std::vector<Violation> violations);

  std::size_t record_index() const { return record_index_; }
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::size_t record_index_;
  std::vector<Violation> violations_;
};

/// Canonical JSON text: keys in schema order, explicit nulls, ", " and ": " separators.
std::string serialize(const ExplanationList& list, std::optional<int> length = std::nullopt);
std::string serialize(const DifferenceRecord& record);

enum class ParseMode : std::uint8_t {
  Strict,   // exact key set in schema order, every key present
  Lenient,  // any key order; missing presence/param/magnitude read as null
};

class ParseError : public std::runtime_error {
 public:
  enum class Kind : std::uint8_t { Syntax, Schema };

  ParseError(Kind kind, std::string message, std::size_t line = 0, std::size_t column = 0);

  Kind kind() const { return kind_; }
  /// 1-based position of a syntax error; 0 for schema errors.
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  Kind kind_;
  std::size_t line_;
  std::size_t column_;
};

/// Parses a JSON array of records. Every accepted record passes validate().
ExplanationList parse(std::string_view text, ParseMode mode = ParseMode::Strict,
                      std::optional<int> length = std::nullopt);

/// serialize(parse(text)) in lenient mode.
std::string canonical_form(std::string_view text);

/// Machine-readable description of the record schema (JSON Schema document).
std::string schema_document();

}  // namespace tsdiff
