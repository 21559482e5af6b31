#include "galelab/pairs.hpp"

#include <istream>
#include <ostream>

#include "galelab/errors.hpp"

namespace galelab {

PairEncoding::PairEncoding(LanguageSpec a, LanguageSpec b, std::string name)
    : a_(std::move(a)), b_(std::move(b)), name_(std::move(name)) {
  if (name_.empty()) name_ = "(" + a_.name() + "," + b_.name() + ")";
}

char PairEncoding::symbol(std::uint64_t n) const {
  bool in_a = a_.bit(n);
  bool in_b = b_.bit(n);
  if (in_a && in_b) throw DisjointnessViolation(n, index_to_string(n));
  return in_a ? '+' : (in_b ? '-' : '0');
}

AlphabetDistribution gamma_zero() {
  return AlphabetDistribution::ternary(Rational(1, 4), Rational(3, 8), Rational(3, 8));
}

std::string encode_pair(const PairEncoding& pair, std::uint64_t n) {
  std::string out;
  out.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) out.push_back(pair.symbol(i));
  return out;
}

std::string flatten(std::string_view word) {
  std::string out;
  out.reserve(word.size());
  for (char c : word) {
    switch (c) {
      case '0':
        out.push_back('0');
        break;
      case '+':
      case '-':
      case '1':
        out.push_back('1');
        break;
      default:
        throw InputError(std::string("flatten: unexpected symbol '") + c + "'");
    }
  }
  return out;
}

LanguageSpec union_language(const PairEncoding& pair) {
  return LanguageSpec::program("union" + pair.name(), [pair](std::string_view x) {
    return pair.symbol(string_to_index(x)) != '0';
  });
}

PairEncoding read_pair_fixture(std::istream& in, std::string name) {
  std::string header;
  if (!(in >> header) || header != "pair") throw InputError("pair fixture must start with 'pair'");
  std::string a = read_language_fixture(in);
  std::string b = read_language_fixture(in);
  if (a.size() != b.size()) throw InputError("pair fixture components differ in length");
  return PairEncoding(LanguageSpec::from_bits(std::move(a), name + ".A"),
                      LanguageSpec::from_bits(std::move(b), name + ".B"), name);
}

void write_pair_fixture(std::ostream& out, std::string_view a_bits, std::string_view b_bits) {
  out << "pair\n";
  write_language_fixture(out, a_bits);
  write_language_fixture(out, b_bits);
}

}  // namespace galelab
