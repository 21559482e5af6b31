#pragma once

// Martingales, s-gales and beta-s-gales stored in mass form.
//
// A gale d over alphabet Sigma with distribution beta and exponent s is kept as
// the mass function M(w) = d(w) * beta(w)^s, where beta(w) is the product of
// beta over the symbols of w. The gale identity d(w) = sum_a d(wa) beta(a)^s is
// then exactly M(w) = sum_a M(wa), which holds in rational arithmetic with no
// tolerance. Irrational factors appear only when a capital is reported:
// log2 d(w) = log2 M(w) - s * sum_a count_a(w) * log2 beta(a).

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "galelab/rational.hpp"

namespace galelab {

// Ordered symbol set. Binary words use '0','1'; pair encodings use '0','+','-'
// for the symbols 0, 1, -1.
class Alphabet {
 public:
  explicit Alphabet(std::string symbols);

  static const Alphabet& binary();
  static const Alphabet& ternary();

  std::size_t size() const { return symbols_.size(); }
  char symbol(std::size_t index) const { return symbols_.at(index); }
  std::size_t index_of(char c) const;
  const std::string& symbols() const { return symbols_; }

  bool operator==(const Alphabet& other) const = default;

 private:
  std::string symbols_;
};

class AlphabetDistribution {
 public:
  // Probabilities must be strictly positive and sum to exactly 1.
  AlphabetDistribution(Alphabet alphabet, std::vector<Rational> probabilities);

  static AlphabetDistribution uniform_binary();
  static AlphabetDistribution binary(const Rational& p0, const Rational& p1);
  // Order (0, 1, -1).
  static AlphabetDistribution ternary(const Rational& p0, const Rational& p_plus,
                                      const Rational& p_minus);

  const Alphabet& alphabet() const { return alphabet_; }
  std::size_t size() const { return probabilities_.size(); }
  const Rational& probability(std::size_t symbol) const { return probabilities_.at(symbol); }
  const std::vector<Rational>& probabilities() const { return probabilities_; }
  long double log2_probability(std::size_t symbol) const { return log2_probabilities_.at(symbol); }
  bool is_uniform_binary() const;

  bool operator==(const AlphabetDistribution& other) const;

 private:
  Alphabet alphabet_;
  std::vector<Rational> probabilities_;
  std::vector<long double> log2_probabilities_;
};

// One node of a (possibly infinite) mass tree. Nodes are immutable and may be
// shared between threads.
class MassNode {
 public:
  virtual ~MassNode() = default;
  virtual const Rational& mass() const = 0;
  virtual std::shared_ptr<const MassNode> child(std::size_t symbol) const = 0;
};
using MassNodePtr = std::shared_ptr<const MassNode>;

class MassRule {
 public:
  virtual ~MassRule() = default;
  virtual std::size_t arity() const = 0;
  virtual MassNodePtr root() const = 0;
};

class MassFunction {
 public:
  explicit MassFunction(std::shared_ptr<const MassRule> rule);

  std::size_t arity() const { return rule_->arity(); }
  MassNodePtr root() const { return rule_->root(); }
  const std::shared_ptr<const MassRule>& rule() const { return rule_; }

  MassNodePtr node(std::string_view word, const Alphabet& alphabet) const;
  Rational at(std::string_view word, const Alphabet& alphabet) const;

 private:
  std::shared_ptr<const MassRule> rule_;
};

class GaleSpec {
 public:
  GaleSpec(std::string id, AlphabetDistribution distribution, Rational exponent,
           MassFunction mass);

  const std::string& id() const { return id_; }
  const AlphabetDistribution& distribution() const { return distribution_; }
  const Alphabet& alphabet() const { return distribution_.alphabet(); }
  const Rational& exponent() const { return exponent_; }
  const MassFunction& mass() const { return mass_; }

  GaleSpec with_id(std::string id) const;
  GaleSpec with_exponent(Rational exponent) const;

 private:
  std::string id_;
  AlphabetDistribution distribution_;
  Rational exponent_;
  MassFunction mass_;
};

// log2 d(w), kept as log2 M(w) plus the symbol counts of w. The float value
// is within 1e-9 of the true log2 d(w) for |w| <= 2^20.
class LogCapital {
 public:
  LogCapital(long double log2_mass, std::vector<std::uint64_t> counts, const GaleSpec& gale);

  long double log2_mass() const { return log2_mass_; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  const Rational& exponent() const { return exponent_; }
  bool is_zero() const;
  long double log2() const;

 private:
  long double log2_mass_;
  std::vector<std::uint64_t> counts_;
  Rational exponent_;
  std::vector<long double> log2_probabilities_;
};

LogCapital capital(const GaleSpec& gale, std::string_view word);

// log2 of beta(w)^s for the gale's distribution and exponent, i.e. the amount
// subtracted from log2 M(w) to get log2 d(w) is its negation.
long double log2_beta_power(const GaleSpec& gale, const std::vector<std::uint64_t>& counts);

struct MassReport {
  bool ok = true;
  std::optional<std::string> first_violation;
  std::size_t words_checked = 0;
};

// Checks sum_a M(wa) == M(w) exactly for every |w| < depth, breadth first, so
// a reported violation is the shortest (then lexicographically first).
MassReport validate_mass(const MassFunction& mass, const Alphabet& alphabet, std::size_t depth);
MassReport validate_mass(const GaleSpec& gale, std::size_t depth);

// d is an s-gale iff 2^{(1-s)|w|} d(w) is a martingale. In mass form only
// the exponent label changes.
GaleSpec martingale_to_sgale(const GaleSpec& martingale, const Rational& s);
GaleSpec sgale_to_martingale(const GaleSpec& sgale);

struct SuccessTrace {
  std::vector<long double> log2_capital;  // entries for prefixes of length 0..n
  std::optional<std::size_t> first_crossing;
};

// `sequence` supplies at least n symbols of the gale's alphabet.
SuccessTrace success_trace(const GaleSpec& gale, std::string_view sequence, std::size_t n,
                           long double threshold_log2);

// Mass tables: words in length-lexicographic order with exact masses.
using MassTable = std::vector<std::pair<std::string, Rational>>;

MassTable tabulate(const MassFunction& mass, const Alphabet& alphabet, std::size_t depth);
// One line per word: `word<TAB>numerator/denominator`; the empty word is an empty field.
void write_mass_table(std::ostream& out, const MassTable& table);
MassTable read_mass_table(std::istream& in);

// Built-in gales over uniform binary.
GaleSpec constant_martingale();
// Stakes everything on `symbol` at every step.
GaleSpec all_in_gale(char symbol, const Rational& s);

}  // namespace galelab
