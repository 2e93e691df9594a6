#pragma once

// Line-oriented "key = value" files shared by field definitions and run
// configurations. '#' starts a comment. A key may repeat (basis rows); get()
// returns the last occurrence.

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kbad/numberfield.hpp"

namespace kbad {

class KeyValueFile {
 public:
  static KeyValueFile parse(std::istream& in);
  static KeyValueFile load(const std::string& path);

  std::optional<std::string> get(const std::string& key) const;
  std::vector<std::string> get_all(const std::string& key) const;
  std::string require(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

std::vector<std::int64_t> parse_int_list(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);

// Field file: min_poly (constant term first), optional repeated basis rows
// of rationals over the power basis, optional weights.
struct FieldDefinition {
  std::vector<std::int64_t> min_poly;
  std::optional<std::vector<std::vector<Rational>>> basis;
  std::optional<WeightVector> weights;
};

FieldDefinition parse_field_definition(const KeyValueFile& kv);
FieldDefinition load_field_definition(const std::string& path);

}  // namespace kbad
