#pragma once

// Betting on a language A that many-one reduces to a selective language B.
//
// Strings are taken in blocks of k consecutive strings s_{qk}, ..., s_{qk+k-1}.
// Inside block q the selector orders the block (via a tournament graph on the
// reduced strings), and A's members in the block always form a suffix of that
// order. The k+1 sub-strategies bet on the k+1 possible suffixes; the
// aggregate redistributes its capital evenly among them at every block start.

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "galelab/functions.hpp"
#include "galelab/gale.hpp"
#include "galelab/language.hpp"
#include "galelab/oracle.hpp"

namespace galelab {

// Least k >= 1 with 2^{ks} / (k+1) > 1, decided as 2^{k p} > (k+1)^r for s = p/r.
unsigned min_block_size(const Rational& s);
// Exact test of 2^{ks} > k+1.
bool block_size_admissible(const Rational& s, unsigned k);

struct StrategyConfig {
  Rational s;
  unsigned k = 0;
  SelectorFunction selector;
  ReductionFunction reduction;
  std::size_t cache_size = 1u << 16;
  // When set, reduction inputs s_{qk+i} are submitted through a restricted
  // channel with context length qk+1 and the query log is kept.
  std::optional<OraclePolicy> policy;

  void validate() const;
};

// Computes the SCC condensation and linear order on construction.
class BlockTournament {
 public:
  BlockTournament(std::uint64_t q, unsigned k, std::vector<std::vector<bool>> edges);

  std::uint64_t block() const { return q_; }
  unsigned size() const { return k_; }
  bool edge(unsigned i, unsigned j) const { return edges_[i][j]; }
  // Strongly connected component of each vertex, numbered in topological order.
  const std::vector<unsigned>& component() const { return component_; }
  // Vertices 0..k-1 listed in the linear order.
  const std::vector<unsigned>& order() const { return order_; }
  // Position of vertex v in the order; rank(k) == k (the extra maximal element).
  unsigned rank(unsigned v) const { return rank_.at(v); }
  // i precedes-or-equals j, for i, j in 0..k.
  bool precedes_eq(unsigned i, unsigned j) const { return rank_.at(i) <= rank_.at(j); }
  bool reachable(unsigned from, unsigned to) const;

 private:
  std::uint64_t q_;
  unsigned k_;
  std::vector<std::vector<bool>> edges_;
  std::vector<unsigned> component_;
  std::vector<unsigned> order_;
  std::vector<unsigned> rank_;
};

// Topologically sorts the SCC condensation; ties between components go to the
// component with the smallest vertex, and vertices inside a component are
// listed in ascending order.
BlockTournament order_tournament(std::uint64_t q, unsigned k,
                                 std::vector<std::vector<bool>> edges);

struct CallCounts {
  std::uint64_t selector_calls = 0;
  std::uint64_t reduction_calls = 0;
  std::uint64_t tournaments_built = 0;
};

// Builds the block tournament with k reduction calls and k^2 selector calls.
BlockTournament build_tournament(std::uint64_t q, const StrategyConfig& config,
                                 RestrictedOracle* channel = nullptr,
                                 CallCounts* counts = nullptr);

// The unique i in 0..k with A ∩ block = {s_{qk+j} : i precedes-or-equals j}.
// Throws ThresholdViolated if none exists. Test-harness only: the gale never
// looks at A.
unsigned threshold_index(const BlockTournament& tournament, const LanguageSpec& language);
unsigned threshold_index(std::uint64_t q, const StrategyConfig& config,
                         const LanguageSpec& language);

class SelectiveEngine : public MassRule, public std::enable_shared_from_this<SelectiveEngine> {
 public:
  explicit SelectiveEngine(StrategyConfig config);

  std::size_t arity() const override { return 2; }
  MassNodePtr root() const override;

  const StrategyConfig& config() const { return config_; }
  std::shared_ptr<const BlockTournament> tournament(std::uint64_t q) const;
  GaleSpec gale(std::string id = "selective") const;

  // Sub-strategy masses D_i(w) = d_i(w) * 2^{-s|w|}, i = 0..k.
  std::vector<Rational> sub_masses(std::string_view word) const;

  CallCounts counts() const;
  // Null unless the config carries a policy.
  const RestrictedOracle* channel() const { return channel_.get(); }

 private:
  StrategyConfig config_;
  std::shared_ptr<RestrictedOracle> channel_;
  mutable std::shared_mutex cache_mutex_;
  mutable std::map<std::uint64_t, std::shared_ptr<const BlockTournament>> cache_;
  mutable std::atomic<std::uint64_t> selector_calls_{0};
  mutable std::atomic<std::uint64_t> reduction_calls_{0};
  mutable std::atomic<std::uint64_t> tournaments_built_{0};
};

std::shared_ptr<SelectiveEngine> make_selective_engine(StrategyConfig config);
GaleSpec selective_gale(StrategyConfig config);

struct BlockDiagnostic {
  std::uint64_t q = 0;
  std::vector<unsigned> order;
  std::optional<unsigned> threshold;  // empty when the threshold is violated
  long double capital_log2 = 0;       // at the end of the block
};

struct CertifyReport {
  std::vector<long double> trace;  // log2 d(A|m), m = 0..n
  std::vector<BlockDiagnostic> blocks;
  bool bound_satisfied = true;     // at every boundary m = qk <= n, q >= 1
  std::vector<std::uint64_t> bound_failures;
  std::vector<std::uint64_t> threshold_violations;
  std::optional<std::size_t> first_crossing;
  long double final_log2 = 0;
  CallCounts counts;
  std::size_t queries = 0;
  std::size_t policy_violations = 0;
};

// Float tolerance for the log-domain bound check.
inline constexpr long double kBoundTolerance = 1e-9L;

// q * (k s - log2(k+1)).
long double capital_lower_bound_log2(const Rational& s, unsigned k, std::uint64_t q);

CertifyReport certify_success(const StrategyConfig& config, const LanguageSpec& language,
                              std::size_t n, long double threshold_log2 = 10);

}  // namespace galelab
