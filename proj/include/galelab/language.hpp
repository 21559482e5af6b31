#pragma once

// Languages as characteristic sequences over the standard enumeration
// s_0 = lambda, s_1 = "0", s_2 = "1", s_3 = "00", ... of {0,1}*.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "galelab/rational.hpp"

namespace galelab {

// Length-lexicographic order. Strings are limited to 63 bits.
std::string index_to_string(std::uint64_t n);
std::uint64_t string_to_index(std::string_view s);

// Self-delimiting pairing: each bit of a doubled, then "01", then b.
std::string pair(std::string_view a, std::string_view b);
std::pair<std::string, std::string> unpair(std::string_view codeword);

// val(x) = binary value of 0.x1; distinct strings get distinct values.
Rational left_cut_value(std::string_view x);
// Sign of val(a) - val(b).
int compare_left_cut_values(std::string_view a, std::string_view b);

class LanguageSpec {
 public:
  enum class Kind { LeftCut, Periodic, SeededRandom, FileBacked, ProgramBacked };

  static LanguageSpec left_cut(const Rational& theta, std::string name = {});
  static LanguageSpec periodic(std::string pattern, std::string name = {});
  static LanguageSpec seeded_random(std::uint64_t seed, std::string name = {});
  static LanguageSpec from_bits(std::string bits, std::string name);
  static LanguageSpec from_file(const std::string& path, std::string name = {});
  static LanguageSpec program(std::string name, std::function<bool(std::string_view)> membership);
  static LanguageSpec empty();
  static LanguageSpec everything();

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  // Left-cut threshold; zero for other kinds.
  const Rational& theta() const { return theta_; }

  bool contains(std::string_view x) const;
  bool bit(std::uint64_t n) const;

  // Only meaningful for file-backed languages.
  std::uint64_t length_limit() const;

 private:
  LanguageSpec(Kind kind, std::string name);

  Kind kind_;
  std::string name_;
  Rational theta_;
  std::shared_ptr<const std::string> bits_;  // pattern or fixture contents
  std::uint64_t seed_ = 0;
  std::function<bool(std::string_view)> membership_;
};

// Bit i is membership of s_i.
std::string char_prefix(const LanguageSpec& language, std::uint64_t n);

// Fixture file: `length N` then N characters of {0,1}.
std::string read_language_fixture(std::istream& in);
void write_language_fixture(std::ostream& out, std::string_view bits);

// {"name", "kind", "params"} manifest entries; params per kind:
//   left-cut {theta}, periodic {pattern}, seeded-random {seed}, file {path},
//   bits {bits}, empty, all.
LanguageSpec language_from_json(const nlohmann::json& entry);
std::vector<LanguageSpec> languages_from_manifest(const nlohmann::json& manifest);

// Stateless 64-bit mix; used for seeded fixtures and seeded selectors.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t hash_string(std::uint64_t seed, std::string_view s);

}  // namespace galelab
