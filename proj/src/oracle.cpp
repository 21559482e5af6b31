#include "galelab/oracle.hpp"

#include <bit>

#include "galelab/errors.hpp"

namespace galelab {

std::size_t OraclePolicy::max_query_length(std::size_t context_length) const {
  std::size_t log = context_length == 0 ? 0 : std::bit_width(context_length) - 1;
  return static_cast<std::size_t>(c) * std::max<std::size_t>(1, log);
}

RestrictedOracle::RestrictedOracle(StringFunction g, OraclePolicy policy)
    : g_(std::move(g)), policy_(policy) {
  if (!g_) throw InputError("restricted oracle needs a function");
}

void RestrictedOracle::set_context(std::size_t context_length) {
  std::lock_guard lock(mutex_);
  context_ = context_length;
}

std::size_t RestrictedOracle::context() const {
  std::lock_guard lock(mutex_);
  return context_;
}

std::string RestrictedOracle::operator()(std::string_view q) { return query(q, context()); }

bool RestrictedOracle::admits(std::size_t query_length, std::size_t context_length) const {
  return query_length <= policy_.max_query_length(context_length);
}

std::string RestrictedOracle::query(std::string_view q, std::size_t context_length) {
  std::size_t bound = policy_.max_query_length(context_length);
  bool allowed = q.size() <= bound;
  {
    std::lock_guard lock(mutex_);
    log_.push_back({std::string(q), context_length, bound, allowed});
    if (!allowed) ++violations_;
  }
  if (!allowed && policy_.on_violation == OraclePolicy::OnViolation::Error) {
    throw PolicyViolation(std::string(q), context_length, bound);
  }
  return g_(q);
}

std::vector<QueryRecord> RestrictedOracle::log() const {
  std::lock_guard lock(mutex_);
  return log_;
}

std::size_t RestrictedOracle::query_count() const {
  std::lock_guard lock(mutex_);
  return log_.size();
}

std::size_t RestrictedOracle::violation_count() const {
  std::lock_guard lock(mutex_);
  return violations_;
}

std::shared_ptr<RestrictedOracle> restrict_oracle(StringFunction g, OraclePolicy policy) {
  return std::make_shared<RestrictedOracle>(std::move(g), policy);
}

}  // namespace galelab
