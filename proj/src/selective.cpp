#include "galelab/selective.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <mutex>
#include <queue>

#include "galelab/errors.hpp"

namespace galelab {

bool block_size_admissible(const Rational& s, unsigned k) {
  if (sgn(s) <= 0) throw InputError("exponent s must be positive");
  if (k == 0) return false;
  const BigInt& p = s.get_num();
  const BigInt& r = s.get_den();
  if (!p.fits_ulong_p() || !r.fits_ulong_p()) throw InputError("exponent s has oversized terms");
  BigInt lhs = BigInt(1) << static_cast<mp_bitcnt_t>(static_cast<unsigned long>(k) * p.get_ui());
  BigInt rhs;
  mpz_ui_pow_ui(rhs.get_mpz_t(), k + 1ul, r.get_ui());
  return lhs > rhs;
}

unsigned min_block_size(const Rational& s) {
  if (sgn(s) <= 0) throw InputError("min_block_size needs s > 0");
  constexpr unsigned kLimit = 1u << 20;
  for (unsigned k = 1; k < kLimit; ++k) {
    if (block_size_admissible(s, k)) return k;
  }
  throw InputError("no admissible block size below 2^20 for s=" + format_rational(s));
}

void StrategyConfig::validate() const {
  if (sgn(s) <= 0) throw ConfigError("selective strategy needs s > 0");
  if (k == 0) throw ConfigError("block size k must be at least 1");
  if (!block_size_admissible(s, k)) {
    throw ConfigError("block size k=" + std::to_string(k) + " violates 2^{ks}/(k+1) > 1 for s=" +
                      format_rational(s) + " (minimum is " + std::to_string(min_block_size(s)) +
                      ")");
  }
  if (cache_size == 0) throw ConfigError("tournament cache size must be positive");
}

bool BlockTournament::reachable(unsigned from, unsigned to) const {
  std::vector<bool> seen(k_, false);
  std::vector<unsigned> stack{from};
  seen[from] = true;
  while (!stack.empty()) {
    unsigned v = stack.back();
    stack.pop_back();
    if (v == to) return true;
    for (unsigned w = 0; w < k_; ++w) {
      if (edges_[v][w] && !seen[w]) {
        seen[w] = true;
        stack.push_back(w);
      }
    }
  }
  return false;
}

namespace {

// Tarjan's algorithm; component ids come out in reverse topological order.
class Tarjan {
 public:
  explicit Tarjan(const std::vector<std::vector<bool>>& edges)
      : edges_(edges),
        n_(static_cast<unsigned>(edges.size())),
        index_(n_, kUnvisited),
        low_(n_, 0),
        on_stack_(n_, false),
        component_(n_, 0) {
    for (unsigned v = 0; v < n_; ++v) {
      if (index_[v] == kUnvisited) visit(v);
    }
  }

  unsigned count() const { return count_; }
  const std::vector<unsigned>& component() const { return component_; }

 private:
  static constexpr unsigned kUnvisited = ~0u;

  void visit(unsigned v) {
    index_[v] = low_[v] = next_index_++;
    stack_.push_back(v);
    on_stack_[v] = true;
    for (unsigned w = 0; w < n_; ++w) {
      if (!edges_[v][w]) continue;
      if (index_[w] == kUnvisited) {
        visit(w);
        low_[v] = std::min(low_[v], low_[w]);
      } else if (on_stack_[w]) {
        low_[v] = std::min(low_[v], index_[w]);
      }
    }
    if (low_[v] == index_[v]) {
      unsigned w;
      do {
        w = stack_.back();
        stack_.pop_back();
        on_stack_[w] = false;
        component_[w] = count_;
      } while (w != v);
      ++count_;
    }
  }

  const std::vector<std::vector<bool>>& edges_;
  unsigned n_;
  std::vector<unsigned> index_;
  std::vector<unsigned> low_;
  std::vector<bool> on_stack_;
  std::vector<unsigned> component_;
  std::vector<unsigned> stack_;
  unsigned next_index_ = 0;
  unsigned count_ = 0;
};

}  // namespace

BlockTournament::BlockTournament(std::uint64_t q, unsigned k, std::vector<std::vector<bool>> edges)
    : q_(q), k_(k), edges_(std::move(edges)) {
  if (edges_.size() != k) throw InputError("tournament adjacency has the wrong size");
  for (const auto& row : edges_) {
    if (row.size() != k) throw InputError("tournament adjacency has the wrong size");
  }
  Tarjan tarjan(edges_);
  const unsigned components = tarjan.count();
  const auto& comp = tarjan.component();

  std::vector<std::vector<unsigned>> members(components);
  for (unsigned v = 0; v < k; ++v) members[comp[v]].push_back(v);  // ascending

  std::vector<std::vector<bool>> dag(components, std::vector<bool>(components, false));
  std::vector<unsigned> indegree(components, 0);
  for (unsigned v = 0; v < k; ++v) {
    for (unsigned w = 0; w < k; ++w) {
      if (edges_[v][w] && comp[v] != comp[w] && !dag[comp[v]][comp[w]]) {
        dag[comp[v]][comp[w]] = true;
        ++indegree[comp[w]];
      }
    }
  }

  // Kahn's algorithm keyed by each component's smallest vertex.
  using Item = std::pair<unsigned, unsigned>;  // (smallest vertex, component)
  std::priority_queue<Item, std::vector<Item>, std::greater<>> ready;
  for (unsigned c = 0; c < components; ++c) {
    if (indegree[c] == 0) ready.emplace(members[c].front(), c);
  }
  component_.assign(k, 0);
  unsigned position = 0;
  while (!ready.empty()) {
    unsigned c = ready.top().second;
    ready.pop();
    for (unsigned v : members[c]) {
      order_.push_back(v);
      component_[v] = position;
    }
    ++position;
    for (unsigned d = 0; d < components; ++d) {
      if (dag[c][d] && --indegree[d] == 0) ready.emplace(members[d].front(), d);
    }
  }

  rank_.assign(k + 1, 0);
  for (unsigned pos = 0; pos < k; ++pos) rank_[order_[pos]] = pos;
  rank_[k] = k;
}

BlockTournament order_tournament(std::uint64_t q, unsigned k,
                                 std::vector<std::vector<bool>> edges) {
  return BlockTournament(q, k, std::move(edges));
}

BlockTournament build_tournament(std::uint64_t q, const StrategyConfig& config,
                                 RestrictedOracle* channel, CallCounts* counts) {
  const unsigned k = config.k;
  const std::uint64_t first = q * k;
  std::vector<std::string> reduced;
  reduced.reserve(k);
  for (unsigned i = 0; i < k; ++i) {
    std::string x = index_to_string(first + i);
    reduced.push_back(channel ? channel->query(x, first + 1) : config.reduction(x));
  }
  std::vector<std::vector<bool>> edges(k, std::vector<bool>(k, false));
  for (unsigned i = 0; i < k; ++i) {
    for (unsigned j = 0; j < k; ++j) {
      edges[i][j] = config.selector(reduced[i], reduced[j]) == reduced[j];
    }
  }
  if (counts) {
    counts->reduction_calls += k;
    counts->selector_calls += static_cast<std::uint64_t>(k) * k;
    counts->tournaments_built += 1;
  }
  return BlockTournament(q, k, std::move(edges));
}

unsigned threshold_index(const BlockTournament& tournament, const LanguageSpec& language) {
  const unsigned k = tournament.size();
  const std::uint64_t first = tournament.block() * k;
  std::vector<bool> member(k);
  for (unsigned j = 0; j < k; ++j) member[j] = language.bit(first + j);
  for (unsigned i = 0; i <= k; ++i) {
    bool matches = true;
    for (unsigned j = 0; j < k && matches; ++j) {
      matches = member[j] == tournament.precedes_eq(i, j);
    }
    if (matches) return i;
  }
  throw ThresholdViolated(tournament.block());
}

unsigned threshold_index(std::uint64_t q, const StrategyConfig& config,
                         const LanguageSpec& language) {
  return threshold_index(build_tournament(q, config), language);
}

namespace {

class SelectiveNode final : public MassNode {
 public:
  SelectiveNode(std::shared_ptr<const SelectiveEngine> engine, std::uint64_t position,
                Rational base, std::vector<char> alive, Rational mass)
      : engine_(std::move(engine)),
        position_(position),
        base_(std::move(base)),
        alive_(std::move(alive)),
        mass_(std::move(mass)) {}

  const Rational& mass() const override { return mass_; }

  MassNodePtr child(std::size_t symbol) const override {
    if (symbol > 1) throw InputError("selective gale is binary");
    const unsigned k = engine_->config().k;
    const unsigned j = static_cast<unsigned>(position_ % k);
    const std::uint64_t q = position_ / k;
    Rational base = j == 0 ? mass_ : base_;
    std::vector<char> alive = j == 0 ? std::vector<char>(k + 1, 1) : alive_;
    unsigned survivors = 0;
    if (sgn(base) != 0) {
      auto tournament = engine_->tournament(q);
      for (unsigned i = 0; i <= k; ++i) {
        if (!alive[i]) continue;
        bool predicts_member = tournament->precedes_eq(i, j);
        if (predicts_member != (symbol == 1)) {
          alive[i] = 0;
        } else {
          ++survivors;
        }
      }
    } else {
      std::fill(alive.begin(), alive.end(), 0);
    }
    Rational share(survivors, k + 1ul);
    share.canonicalize();
    Rational mass = base * share;
    return std::make_shared<SelectiveNode>(engine_, position_ + 1, std::move(base),
                                           std::move(alive), std::move(mass));
  }

  std::vector<Rational> sub_masses() const {
    std::vector<Rational> out;
    out.reserve(alive_.size());
    for (char a : alive_) out.push_back(a ? (position_ == 0 ? Rational(1) : base_) : Rational(0));
    return out;
  }

 private:
  std::shared_ptr<const SelectiveEngine> engine_;
  std::uint64_t position_;
  Rational base_;            // aggregate mass at the start of the current block
  std::vector<char> alive_;  // sub-strategies that have predicted every bit of the block
  Rational mass_;
};

}  // namespace

SelectiveEngine::SelectiveEngine(StrategyConfig config) : config_(std::move(config)) {
  config_.validate();
  if (config_.policy) {
    auto reduction = config_.reduction;
    channel_ = restrict_oracle([reduction](std::string_view x) { return reduction(x); },
                               *config_.policy);
  }
}

MassNodePtr SelectiveEngine::root() const {
  return std::make_shared<SelectiveNode>(shared_from_this(), 0, Rational(1),
                                         std::vector<char>(config_.k + 1, 1), Rational(1));
}

std::shared_ptr<const BlockTournament> SelectiveEngine::tournament(std::uint64_t q) const {
  {
    std::shared_lock lock(cache_mutex_);
    if (auto it = cache_.find(q); it != cache_.end()) return it->second;
  }
  CallCounts counts;
  auto built = std::make_shared<const BlockTournament>(
      build_tournament(q, config_, channel_.get(), &counts));
  selector_calls_ += counts.selector_calls;
  reduction_calls_ += counts.reduction_calls;
  tournaments_built_ += counts.tournaments_built;
  std::unique_lock lock(cache_mutex_);
  if (auto it = cache_.find(q); it != cache_.end()) return it->second;
  if (cache_.size() >= config_.cache_size) cache_.clear();
  cache_.emplace(q, built);
  return built;
}

GaleSpec SelectiveEngine::gale(std::string id) const {
  return GaleSpec(std::move(id), AlphabetDistribution::uniform_binary(), config_.s,
                  MassFunction(shared_from_this()));
}

std::vector<Rational> SelectiveEngine::sub_masses(std::string_view word) const {
  MassNodePtr node = root();
  for (char c : word) node = node->child(Alphabet::binary().index_of(c));
  return static_cast<const SelectiveNode&>(*node).sub_masses();
}

CallCounts SelectiveEngine::counts() const {
  return {selector_calls_.load(), reduction_calls_.load(), tournaments_built_.load()};
}

std::shared_ptr<SelectiveEngine> make_selective_engine(StrategyConfig config) {
  return std::make_shared<SelectiveEngine>(std::move(config));
}

GaleSpec selective_gale(StrategyConfig config) {
  return make_selective_engine(std::move(config))->gale();
}

long double capital_lower_bound_log2(const Rational& s, unsigned k, std::uint64_t q) {
  return static_cast<long double>(q) *
         (static_cast<long double>(k) * to_long_double(s) - std::log2(static_cast<long double>(k) + 1));
}

CertifyReport certify_success(const StrategyConfig& config, const LanguageSpec& language,
                              std::size_t n, long double threshold_log2) {
  auto engine = make_selective_engine(config);
  const unsigned k = config.k;
  const std::string prefix = char_prefix(language, n);
  const GaleSpec gale = engine->gale();

  CertifyReport report;
  report.trace.reserve(n + 1);
  MassNodePtr node = engine->root();
  const BigInt k_plus_one(k + 1ul);
  BigInt scale(1);  // (k+1)^q
  for (std::size_t m = 0;; ++m) {
    long double value = log2_of(node->mass()) + static_cast<long double>(m) * to_long_double(config.s);
    report.trace.push_back(value);
    if (!report.first_crossing && value >= threshold_log2) report.first_crossing = m;
    if (m > 0 && m % k == 0) {
      std::uint64_t q = m / k;
      scale *= k_plus_one;
      bool exact_ok = node->mass() * Rational(scale) >= 1;
      bool float_ok = value - capital_lower_bound_log2(config.s, k, q) > -kBoundTolerance;
      if (!exact_ok || !float_ok) {
        report.bound_satisfied = false;
        report.bound_failures.push_back(q);
      }
    }
    if (m == n) break;
    node = node->child(prefix[m] == '1' ? 1 : 0);
  }
  report.final_log2 = report.trace.back();

  for (std::uint64_t q = 0; (q + 1) * k <= n; ++q) {
    BlockDiagnostic block;
    block.q = q;
    auto tournament = engine->tournament(q);
    block.order = tournament->order();
    try {
      block.threshold = threshold_index(*tournament, language);
    } catch (const ThresholdViolated&) {
      report.threshold_violations.push_back(q);
    }
    block.capital_log2 = report.trace[(q + 1) * k];
    report.blocks.push_back(std::move(block));
  }

  report.counts = engine->counts();
  if (const auto* channel = engine->channel()) {
    report.queries = channel->query_count();
    report.policy_violations = channel->violation_count();
  }
  return report;
}

}  // namespace galelab
