#include "galelab/gale.hpp"

#include <cmath>
#include <functional>
#include <istream>
#include <limits>
#include <ostream>
#include <optional>
#include <sstream>
#include <tuple>

#include "galelab/errors.hpp"
#include "galelab/mass_rules.hpp"

namespace galelab {

Alphabet::Alphabet(std::string symbols) : symbols_(std::move(symbols)) {
  if (symbols_.size() < 2) throw InputError("alphabet needs at least two symbols");
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    for (std::size_t j = i + 1; j < symbols_.size(); ++j) {
      if (symbols_[i] == symbols_[j]) throw InputError("alphabet symbols must be distinct");
    }
  }
}

const Alphabet& Alphabet::binary() {
  static const Alphabet alphabet("01");
  return alphabet;
}

const Alphabet& Alphabet::ternary() {
  static const Alphabet alphabet("0+-");
  return alphabet;
}

std::size_t Alphabet::index_of(char c) const {
  auto pos = symbols_.find(c);
  if (pos == std::string::npos) {
    throw InputError(std::string("symbol '") + c + "' is not in alphabet {" + symbols_ + "}");
  }
  return pos;
}

AlphabetDistribution::AlphabetDistribution(Alphabet alphabet, std::vector<Rational> probabilities)
    : alphabet_(std::move(alphabet)), probabilities_(std::move(probabilities)) {
  if (probabilities_.size() != alphabet_.size()) {
    throw InputError("distribution needs one probability per symbol");
  }
  Rational total = 0;
  for (auto& p : probabilities_) {
    p.canonicalize();
    if (sgn(p) <= 0) throw InputError("distribution probabilities must be strictly positive");
    total += p;
  }
  if (total != 1) throw InputError("distribution probabilities must sum to exactly 1");
  log2_probabilities_.reserve(probabilities_.size());
  for (const auto& p : probabilities_) log2_probabilities_.push_back(log2_of(p));
}

AlphabetDistribution AlphabetDistribution::uniform_binary() {
  return AlphabetDistribution(Alphabet::binary(), {Rational(1, 2), Rational(1, 2)});
}

AlphabetDistribution AlphabetDistribution::binary(const Rational& p0, const Rational& p1) {
  return AlphabetDistribution(Alphabet::binary(), {p0, p1});
}

AlphabetDistribution AlphabetDistribution::ternary(const Rational& p0, const Rational& p_plus,
                                                   const Rational& p_minus) {
  return AlphabetDistribution(Alphabet::ternary(), {p0, p_plus, p_minus});
}

bool AlphabetDistribution::is_uniform_binary() const {
  return alphabet_ == Alphabet::binary() && probabilities_[0] == Rational(1, 2);
}

bool AlphabetDistribution::operator==(const AlphabetDistribution& other) const {
  return alphabet_ == other.alphabet_ && probabilities_ == other.probabilities_;
}

MassFunction::MassFunction(std::shared_ptr<const MassRule> rule) : rule_(std::move(rule)) {
  if (!rule_) throw InputError("mass function needs a rule");
}

MassNodePtr MassFunction::node(std::string_view word, const Alphabet& alphabet) const {
  if (alphabet.size() != arity()) throw InputError("alphabet does not match mass arity");
  MassNodePtr current = root();
  for (char c : word) current = current->child(alphabet.index_of(c));
  return current;
}

Rational MassFunction::at(std::string_view word, const Alphabet& alphabet) const {
  return node(word, alphabet)->mass();
}

GaleSpec::GaleSpec(std::string id, AlphabetDistribution distribution, Rational exponent,
                   MassFunction mass)
    : id_(std::move(id)),
      distribution_(std::move(distribution)),
      exponent_(std::move(exponent)),
      mass_(std::move(mass)) {
  exponent_.canonicalize();
  if (sgn(exponent_) < 0) throw InputError("gale exponent must be non-negative");
  if (mass_.arity() != distribution_.size()) {
    throw InputError("mass arity does not match the distribution's alphabet");
  }
}

GaleSpec GaleSpec::with_id(std::string id) const {
  return GaleSpec(std::move(id), distribution_, exponent_, mass_);
}

GaleSpec GaleSpec::with_exponent(Rational exponent) const {
  return GaleSpec(id_, distribution_, std::move(exponent), mass_);
}

LogCapital::LogCapital(long double log2_mass, std::vector<std::uint64_t> counts,
                       const GaleSpec& gale)
    : log2_mass_(log2_mass), counts_(std::move(counts)), exponent_(gale.exponent()) {
  const auto& dist = gale.distribution();
  log2_probabilities_.reserve(dist.size());
  for (std::size_t a = 0; a < dist.size(); ++a) {
    log2_probabilities_.push_back(dist.log2_probability(a));
  }
}

bool LogCapital::is_zero() const { return std::isinf(log2_mass_) && log2_mass_ < 0; }

long double LogCapital::log2() const {
  if (is_zero()) return -std::numeric_limits<long double>::infinity();
  long double correction = 0;
  for (std::size_t a = 0; a < counts_.size(); ++a) {
    correction += static_cast<long double>(counts_[a]) * log2_probabilities_[a];
  }
  return log2_mass_ - to_long_double(exponent_) * correction;
}

long double log2_beta_power(const GaleSpec& gale, const std::vector<std::uint64_t>& counts) {
  long double sum = 0;
  for (std::size_t a = 0; a < counts.size(); ++a) {
    sum += static_cast<long double>(counts[a]) * gale.distribution().log2_probability(a);
  }
  return to_long_double(gale.exponent()) * sum;
}

LogCapital capital(const GaleSpec& gale, std::string_view word) {
  std::vector<std::uint64_t> counts(gale.alphabet().size(), 0);
  MassNodePtr node = gale.mass().root();
  for (char c : word) {
    std::size_t a = gale.alphabet().index_of(c);
    ++counts[a];
    node = node->child(a);
  }
  return LogCapital(log2_of(node->mass()), std::move(counts), gale);
}

MassReport validate_mass(const MassFunction& mass, const Alphabet& alphabet, std::size_t depth) {
  if (alphabet.size() != mass.arity()) throw InputError("alphabet does not match mass arity");
  const std::size_t arity = alphabet.size();
  // Depth first keeps few nodes alive. A failure is keyed by (length,
  // position within the length-lexicographic level, stage) so the reported
  // one is the first a breadth-first scan would meet.
  struct Failure {
    std::size_t length;
    std::uint64_t index;
    int stage;  // 0 negative mass, 1 undefined child, 2 sum mismatch
    std::string word;
    bool operator<(const Failure& o) const {
      return std::tie(length, index, stage) < std::tie(o.length, o.index, o.stage);
    }
  };
  std::optional<Failure> first;
  std::string word;
  MassReport report;

  auto note = [&](Failure f) {
    if (!first || f < *first) first = std::move(f);
  };
  std::function<void(const MassNode&, std::uint64_t)> visit = [&](const MassNode& node,
                                                                   std::uint64_t index) {
    const std::size_t len = word.size();
    if (first && len >= first->length) return;
    ++report.words_checked;
    if (sgn(node.mass()) < 0) return note({len, index, 0, word});
    MassNodePtr children[8];
    std::vector<MassNodePtr> spill;
    if (arity > 8) spill.resize(arity);
    MassNodePtr* kids = arity > 8 ? spill.data() : children;
    Rational sum;
    for (std::size_t a = 0; a < arity; ++a) {
      try {
        kids[a] = node.child(a);
      } catch (const PartialDefinitionError&) {
        return note({len, index, 1, word + alphabet.symbol(a)});
      }
      sum += kids[a]->mass();
    }
    if (sum != node.mass()) return note({len, index, 2, word});
    if (len + 1 == depth) return;
    for (std::size_t a = 0; a < arity; ++a) {
      word.push_back(alphabet.symbol(a));
      visit(*kids[a], index * arity + a);
      word.pop_back();
      kids[a].reset();
    }
  };
  if (depth > 0) visit(*mass.root(), 0);
  if (first) {
    if (first->stage == 1) throw PartialDefinitionError(first->word);
    report.ok = false;
    report.first_violation = first->word;
  }
  return report;
}

MassReport validate_mass(const GaleSpec& gale, std::size_t depth) {
  return validate_mass(gale.mass(), gale.alphabet(), depth);
}

GaleSpec martingale_to_sgale(const GaleSpec& martingale, const Rational& s) {
  if (!martingale.distribution().is_uniform_binary()) {
    throw UnsupportedError("martingale_to_sgale requires the uniform binary distribution");
  }
  if (martingale.exponent() != 1) throw InputError("input is not a martingale (exponent != 1)");
  if (sgn(s) < 0) throw InputError("target exponent must be non-negative");
  return martingale.with_exponent(s);
}

GaleSpec sgale_to_martingale(const GaleSpec& sgale) {
  if (!sgale.distribution().is_uniform_binary()) {
    throw UnsupportedError("sgale_to_martingale requires the uniform binary distribution");
  }
  return sgale.with_exponent(1);
}

SuccessTrace success_trace(const GaleSpec& gale, std::string_view sequence, std::size_t n,
                           long double threshold_log2) {
  if (sequence.size() < n) throw InputError("sequence shorter than requested trace length");
  SuccessTrace trace;
  trace.log2_capital.reserve(n + 1);
  std::vector<std::uint64_t> counts(gale.alphabet().size(), 0);
  MassNodePtr node = gale.mass().root();
  for (std::size_t i = 0;; ++i) {
    long double value = LogCapital(log2_of(node->mass()), counts, gale).log2();
    trace.log2_capital.push_back(value);
    if (!trace.first_crossing && value >= threshold_log2) trace.first_crossing = i;
    if (i == n) break;
    std::size_t a = gale.alphabet().index_of(sequence[i]);
    ++counts[a];
    node = node->child(a);
  }
  return trace;
}

MassTable tabulate(const MassFunction& mass, const Alphabet& alphabet, std::size_t depth) {
  MassTable table;
  std::vector<std::pair<std::string, MassNodePtr>> level{{std::string(), mass.root()}};
  for (std::size_t len = 0; len <= depth; ++len) {
    std::vector<std::pair<std::string, MassNodePtr>> next;
    for (const auto& [word, node] : level) {
      table.emplace_back(word, node->mass());
      if (len == depth) continue;
      for (std::size_t a = 0; a < alphabet.size(); ++a) {
        next.emplace_back(word + alphabet.symbol(a), node->child(a));
      }
    }
    level = std::move(next);
  }
  return table;
}

void write_mass_table(std::ostream& out, const MassTable& table) {
  for (const auto& [word, mass] : table) out << word << '\t' << format_rational(mass) << '\n';
}

MassTable read_mass_table(std::istream& in) {
  MassTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw InputError("mass table line " + std::to_string(line_no) + " has no tab");
    }
    table.emplace_back(line.substr(0, tab), parse_rational(line.substr(tab + 1)));
  }
  return table;
}

GaleSpec constant_martingale() {
  return GaleSpec("constant", AlphabetDistribution::uniform_binary(), 1, uniform_mass(2));
}

GaleSpec all_in_gale(char symbol, const Rational& s) {
  std::vector<Rational> ratios{0, 0};
  ratios[Alphabet::binary().index_of(symbol)] = 1;
  return GaleSpec(std::string("all-in-") + symbol, AlphabetDistribution::uniform_binary(), s,
                  product_mass(std::move(ratios)));
}

}  // namespace galelab
