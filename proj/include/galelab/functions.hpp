#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "galelab/oracle.hpp"
#include "galelab/rational.hpp"

namespace galelab {

// Called on the paired codeword <a,b>; must return a or b. The call operator
// checks the contract.
class SelectorFunction {
 public:
  SelectorFunction(std::string name, StringFunction on_pair);

  const std::string& name() const { return name_; }
  std::string operator()(std::string_view a, std::string_view b) const;
  std::string raw(std::string_view codeword) const { return on_pair_(codeword); }

 private:
  std::string name_;
  StringFunction on_pair_;
};

class ReductionFunction {
 public:
  using LengthBound = std::function<std::size_t(std::size_t)>;

  ReductionFunction(std::string name, StringFunction map, LengthBound output_bound);

  const std::string& name() const { return name_; }
  std::string operator()(std::string_view x) const;
  std::size_t output_bound(std::size_t input_length) const { return bound_(input_length); }

 private:
  std::string name_;
  StringFunction map_;
  LengthBound bound_;
};

// Picks the argument with smaller val(); ties go to the first argument. A
// selector for the left cut {x : val(x) < theta} for every theta.
SelectorFunction left_cut_selector(const Rational& theta);
// Picks the argument that comes first in the standard enumeration.
SelectorFunction enumeration_min_selector();
// Always returns the first argument.
SelectorFunction first_argument_selector();
// Returns a or b by a seeded hash of the codeword. Not a selector for anything
// nontrivial; used to exercise broken-premise detection.
SelectorFunction coin_flip_selector(std::uint64_t seed);

ReductionFunction identity_reduction();
// x -> x without its last bit; lambda -> lambda.
ReductionFunction strip_last_bit_reduction();

// Finite stand-in for an enumeration of functions: slice(k) is f_k and
// evaluate(0^k 1 x) = f_k(x).
class FunctionRegistry {
 public:
  struct Entry {
    std::string name;
    StringFunction function;
  };

  FunctionRegistry() = default;
  explicit FunctionRegistry(std::vector<Entry> entries);

  void add(std::string name, StringFunction function);
  std::size_t size() const { return entries_.size(); }
  const Entry& entry(std::size_t k) const;
  const StringFunction& slice(std::size_t k) const;
  // Words without a 1 map to lambda.
  std::string evaluate(std::string_view u) const;

 private:
  std::vector<Entry> entries_;
};

// delta^n(lambda); every step must properly extend its input.
std::string run_constructor(const StringFunction& delta, std::size_t n);

// g_0(n) = 2n, g_{i+1}(n) = 2^{g_i(log n)}; every logarithm taken must be of a
// power of two. Results above 2^max_bits raise an error.
BigInt growth_rate(unsigned level, const BigInt& n, std::size_t max_bits = 1u << 24);

}  // namespace galelab
