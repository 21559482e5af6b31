#pragma once

// Experiment runner behind the `galelab` CLI. Every command is a pure function
// of (config, seed); outputs are written in a canonical order so repeated runs
// are byte-identical.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "galelab/gale.hpp"
#include "galelab/language.hpp"
#include "galelab/oracle.hpp"
#include "galelab/pairs.hpp"
#include "galelab/selective.hpp"

namespace galelab {

struct ExponentGrid {
  Rational start = 0;
  Rational stop = 1;
  Rational step = Rational(1, 64);

  std::vector<Rational> points() const;
};

struct Fixture {
  std::string id;
  std::optional<LanguageSpec> language;
  std::optional<PairEncoding> pair;

  bool is_pair() const { return pair.has_value(); }
  // First n symbols: characteristic bits for languages, '0/+/-' for pairs.
  std::string sequence(std::uint64_t n) const;
};

struct ExperimentConfig {
  nlohmann::json raw;
  std::uint64_t seed = 0;
  std::size_t n = 4096;
  long double threshold_log2 = 10;
  ExponentGrid grid;
  unsigned policy_c = 4;
  std::vector<Fixture> fixtures;
};

// `seed_override` (from --seed) replaces the config's "seed".
ExperimentConfig parse_config(const nlohmann::json& json,
                              std::optional<std::uint64_t> seed_override = {});
ExperimentConfig load_config(const std::filesystem::path& path,
                             std::optional<std::uint64_t> seed_override = {});

Fixture fixture_from_json(const nlohmann::json& entry, std::uint64_t seed);

// Oracle-aware gales receive their oracle through a restricted session.
struct GaleContext {
  std::uint64_t seed = 0;
  std::shared_ptr<RestrictedOracle> oracle;
  // Language a "predictor" with language "target" bets on; for pair fixtures
  // this is the union of the two components.
  std::optional<LanguageSpec> target;
};

struct BuiltGale {
  GaleSpec gale;
  std::optional<unsigned> block_size;  // set for selective gales
};

BuiltGale gale_from_json(const nlohmann::json& spec, const GaleContext& context);
// Applies {op, params} steps: exponent_shift, to_beta, lift_pair.
BuiltGale apply_transforms(BuiltGale gale, const nlohmann::json& pipeline);

StrategyConfig strategy_from_json(const nlohmann::json& spec, std::uint64_t seed);

// Oracle registry entries: {"name", "kind": "noop" | "theta-bits", "thetas": [...]}.
// theta-bits answers a query 0^i 1 x with bit |x| of thetas[i] ("0"/"1").
struct NamedOracle {
  std::string name;
  StringFunction function;
};
NamedOracle oracle_from_json(const nlohmann::json& entry);

// Registry-relative dimension estimate: nullopt is the +infinity sentinel.
using Estimate = std::optional<Rational>;
std::string format_estimate(const Estimate& estimate);
std::string format_log2(long double value);

struct DimestRow {
  std::string fixture_id;
  Estimate s_hat;
  std::string witness;
};
std::vector<DimestRow> run_dimest(const ExperimentConfig& config);

struct P2sCell {
  std::string oracle_id;
  std::string fixture_id;
  Estimate s_hat;
  std::string witness;
  std::size_t policy_violations = 0;
};
struct P2sResult {
  std::vector<P2sCell> cells;  // sorted by oracle id, then fixture order
  std::map<std::string, Estimate> per_oracle_sup;
  Estimate min_sup;
  std::string argmin;
};
P2sResult run_p2s(const ExperimentConfig& config);

struct SelectiveRun {
  std::string fixture_id;
  CertifyReport report;
};
std::vector<SelectiveRun> run_selective(const ExperimentConfig& config);

struct LiftPairRun {
  std::string fixture_id;
  std::string encoding;
  std::vector<long double> pair_trace;  // log2 D on prefixes of the encoding
  std::vector<long double> flat_trace;  // log2 d on prefixes of the flattening
  bool dominated = true;
  long double min_residual = 0;
  std::optional<std::size_t> pair_crossing;
  std::optional<std::size_t> flat_crossing;
  bool transfer_ok = true;
};
struct LiftPairResult {
  bool feasible = false;
  Rational s;        // exponent of the beta-gale
  Rational s_prime;  // exponent of the pair gale
  std::string failing_inequality;
  std::string pair_gale_id;
  std::string source_gale_id;
  std::vector<LiftPairRun> runs;
};
LiftPairResult run_liftpair(const ExperimentConfig& config);

struct CommandOptions {
  std::filesystem::path config_path;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out_dir = ".";
};

// Exit codes: 0 all checks passed, 2 property violation, 1 usage/config error.
int run_command(const std::string& command, const CommandOptions& options, std::ostream& log);

}  // namespace galelab
