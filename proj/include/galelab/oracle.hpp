#pragma once

// Oracle access restricted to queries of length O(log |w|), where |w| is the
// length of the word whose capital is being computed.

#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace galelab {

using StringFunction = std::function<std::string(std::string_view)>;

struct OraclePolicy {
  enum class OnViolation { Error, Record };

  unsigned c = 4;
  OnViolation on_violation = OnViolation::Error;

  // c * max(1, floor(log2 |w|)).
  std::size_t max_query_length(std::size_t context_length) const;
};

struct QueryRecord {
  std::string query;
  std::size_t context = 0;
  std::size_t bound = 0;
  bool allowed = true;
};

// Forwards compliant queries to g and logs every query. Each evaluation
// session should own its instance; the log is internally synchronized.
class RestrictedOracle {
 public:
  RestrictedOracle(StringFunction g, OraclePolicy policy);

  void set_context(std::size_t context_length);
  std::size_t context() const;

  std::string operator()(std::string_view query);
  std::string query(std::string_view query, std::size_t context_length);
  bool admits(std::size_t query_length, std::size_t context_length) const;

  const OraclePolicy& policy() const { return policy_; }
  std::vector<QueryRecord> log() const;
  std::size_t query_count() const;
  std::size_t violation_count() const;

 private:
  StringFunction g_;
  OraclePolicy policy_;
  mutable std::mutex mutex_;
  std::size_t context_ = 0;
  std::vector<QueryRecord> log_;
  std::size_t violations_ = 0;
};

std::shared_ptr<RestrictedOracle> restrict_oracle(StringFunction g, OraclePolicy policy);

}  // namespace galelab
