#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace galelab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: symbol outside alphabet, bad rational literal, bad file.
class InputError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// A mass function was asked for a word it does not define.
class PartialDefinitionError : public Error {
 public:
  explicit PartialDefinitionError(std::string word)
      : Error("partial definition: mass undefined at word '" + word + "'"),
        word_(std::move(word)) {}
  const std::string& word() const { return word_; }

 private:
  std::string word_;
};

class DecodeError : public Error {
 public:
  using Error::Error;
};

class ConstructorViolation : public Error {
 public:
  ConstructorViolation(std::size_t step, const std::string& detail)
      : Error("constructor violation at step " + std::to_string(step) + ": " + detail),
        step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

class PolicyViolation : public Error {
 public:
  PolicyViolation(std::string query, std::size_t context, std::size_t bound)
      : Error("oracle policy violation: query '" + query + "' of length " +
              std::to_string(query.size()) + " exceeds bound " + std::to_string(bound) +
              " at context length " + std::to_string(context)),
        query_(std::move(query)) {}
  const std::string& query() const { return query_; }

 private:
  std::string query_;
};

class SelectorContractViolation : public Error {
 public:
  using Error::Error;
};

class ReductionBoundViolation : public Error {
 public:
  using Error::Error;
};

class ThresholdViolated : public Error {
 public:
  explicit ThresholdViolated(std::uint64_t q)
      : Error("threshold violated at q=" + std::to_string(q)), q_(q) {}
  std::uint64_t block() const { return q_; }

 private:
  std::uint64_t q_;
};

class DisjointnessViolation : public Error {
 public:
  DisjointnessViolation(std::uint64_t index, const std::string& string)
      : Error("disjointness violation at index " + std::to_string(index) + " (s_" +
              std::to_string(index) + " = '" + string + "')"),
        index_(index) {}
  std::uint64_t index() const { return index_; }

 private:
  std::uint64_t index_;
};

class FixtureOverrun : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace galelab
