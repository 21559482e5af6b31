#include "galelab/functions.hpp"

#include "galelab/errors.hpp"
#include "galelab/language.hpp"

namespace galelab {

SelectorFunction::SelectorFunction(std::string name, StringFunction on_pair)
    : name_(std::move(name)), on_pair_(std::move(on_pair)) {
  if (!on_pair_) throw InputError("selector needs a function");
}

std::string SelectorFunction::operator()(std::string_view a, std::string_view b) const {
  std::string out = on_pair_(pair(a, b));
  if (out != a && out != b) {
    throw SelectorContractViolation("selector '" + name_ + "' returned '" + out +
                                    "' on <" + std::string(a) + "," + std::string(b) + ">");
  }
  return out;
}

ReductionFunction::ReductionFunction(std::string name, StringFunction map, LengthBound bound)
    : name_(std::move(name)), map_(std::move(map)), bound_(std::move(bound)) {
  if (!map_ || !bound_) throw InputError("reduction needs a map and a length bound");
}

std::string ReductionFunction::operator()(std::string_view x) const {
  std::string out = map_(x);
  if (out.size() > bound_(x.size())) {
    throw ReductionBoundViolation("reduction '" + name_ + "' produced " +
                                  std::to_string(out.size()) + " bits on input of length " +
                                  std::to_string(x.size()));
  }
  return out;
}

SelectorFunction left_cut_selector(const Rational& theta) {
  // theta does not affect the choice; it names the language the selector serves.
  return SelectorFunction("left-cut(" + format_rational(theta) + ")",
                          [](std::string_view codeword) {
                            auto [a, b] = unpair(codeword);
                            return compare_left_cut_values(b, a) < 0 ? b : a;
                          });
}

SelectorFunction enumeration_min_selector() {
  return SelectorFunction("enumeration-min", [](std::string_view codeword) {
    auto [a, b] = unpair(codeword);
    return string_to_index(b) < string_to_index(a) ? b : a;
  });
}

SelectorFunction first_argument_selector() {
  return SelectorFunction("first-argument",
                          [](std::string_view codeword) { return unpair(codeword).first; });
}

SelectorFunction coin_flip_selector(std::uint64_t seed) {
  return SelectorFunction("coin-flip(" + std::to_string(seed) + ")",
                          [seed](std::string_view codeword) {
                            auto [a, b] = unpair(codeword);
                            return (hash_string(seed, codeword) & 1u) ? b : a;
                          });
}

ReductionFunction identity_reduction() {
  return ReductionFunction(
      "identity", [](std::string_view x) { return std::string(x); },
      [](std::size_t n) { return n; });
}

ReductionFunction strip_last_bit_reduction() {
  return ReductionFunction(
      "strip-last-bit",
      [](std::string_view x) { return std::string(x.empty() ? x : x.substr(0, x.size() - 1)); },
      [](std::size_t n) { return n; });
}

FunctionRegistry::FunctionRegistry(std::vector<Entry> entries) : entries_(std::move(entries)) {
  for (const auto& e : entries_) {
    if (!e.function) throw InputError("registry entry '" + e.name + "' has no function");
  }
}

void FunctionRegistry::add(std::string name, StringFunction function) {
  if (!function) throw InputError("registry entry '" + name + "' has no function");
  entries_.push_back({std::move(name), std::move(function)});
}

const FunctionRegistry::Entry& FunctionRegistry::entry(std::size_t k) const {
  if (k >= entries_.size()) {
    throw InputError("registry slice " + std::to_string(k) + " out of range (size " +
                     std::to_string(entries_.size()) + ")");
  }
  return entries_[k];
}

const StringFunction& FunctionRegistry::slice(std::size_t k) const { return entry(k).function; }

std::string FunctionRegistry::evaluate(std::string_view u) const {
  auto one = u.find('1');
  if (one == std::string_view::npos) return {};
  return slice(one)(u.substr(one + 1));
}

std::string run_constructor(const StringFunction& delta, std::size_t n) {
  std::string w;
  for (std::size_t step = 1; step <= n; ++step) {
    std::string next = delta(w);
    if (next.size() <= w.size() || next.compare(0, w.size(), w) != 0) {
      throw ConstructorViolation(step, "'" + next + "' is not a proper extension of '" + w + "'");
    }
    w = std::move(next);
  }
  return w;
}

namespace {

bool is_power_of_two(const BigInt& n) { return n > 0 && mpz_popcount(n.get_mpz_t()) == 1; }

}  // namespace

BigInt growth_rate(unsigned level, const BigInt& n, std::size_t max_bits) {
  if (level == 0) {
    if (n < 0) throw InputError("growth_rate needs n >= 0");
    return BigInt(2 * n);
  }
  if (!is_power_of_two(n)) {
    throw InputError("growth_rate needs n to be a power of two (got " + n.get_str() + ")");
  }
  // log2 of a power of two is its bit index.
  BigInt log_n(static_cast<unsigned long>(mpz_sizeinbase(n.get_mpz_t(), 2) - 1));
  BigInt inner = growth_rate(level - 1, log_n, max_bits);
  if (inner > BigInt(static_cast<unsigned long>(max_bits))) {
    throw InputError("growth_rate result exceeds 2^" + std::to_string(max_bits));
  }
  BigInt out;
  mpz_ui_pow_ui(out.get_mpz_t(), 2, inner.get_ui());
  return out;
}

}  // namespace galelab
