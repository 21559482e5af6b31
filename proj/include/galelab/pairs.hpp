#pragma once

// Disjoint pairs (A, B) coded over {0, 1, -1}: symbol n is 1 when s_n is in A,
// -1 when s_n is in B and 0 otherwise. Text form uses '0', '+', '-'.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include "galelab/gale.hpp"
#include "galelab/language.hpp"

namespace galelab {

class PairEncoding {
 public:
  PairEncoding(LanguageSpec a, LanguageSpec b, std::string name = {});

  const LanguageSpec& first() const { return a_; }
  const LanguageSpec& second() const { return b_; }
  const std::string& name() const { return name_; }

  // Throws DisjointnessViolation when both components claim s_n.
  char symbol(std::uint64_t n) const;

 private:
  LanguageSpec a_;
  LanguageSpec b_;
  std::string name_;
};

// gamma_0 = (1/4, 3/8, 3/8) on (0, 1, -1).
AlphabetDistribution gamma_zero();

std::string encode_pair(const PairEncoding& pair, std::uint64_t n);

// 0 -> 0, and both 1 and -1 -> 1. Accepts '+', '-', '0' and also '1', so it is
// idempotent on binary words.
std::string flatten(std::string_view word);

LanguageSpec union_language(const PairEncoding& pair);

// Pair fixture file: a `pair` header line followed by two language fixture blocks.
PairEncoding read_pair_fixture(std::istream& in, std::string name);
void write_pair_fixture(std::ostream& out, std::string_view a_bits, std::string_view b_bits);

}  // namespace galelab
