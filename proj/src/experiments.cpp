#include "galelab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include "galelab/errors.hpp"
#include "galelab/functions.hpp"
#include "galelab/mass_rules.hpp"
#include "galelab/transforms.hpp"

namespace galelab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

Rational rational_from(const json& value) {
  if (value.is_string()) return parse_rational(value.get<std::string>());
  if (value.is_number_integer()) return Rational(value.get<long>());
  if (value.is_number_float()) return parse_rational(value.dump());
  throw ConfigError("expected a rational, got " + value.dump());
}

Rational rational_field(const json& spec, const char* key, const Rational& fallback) {
  return spec.contains(key) ? rational_from(spec.at(key)) : fallback;
}

const json& required(const json& spec, const char* key) {
  if (!spec.is_object() || !spec.contains(key)) {
    throw ConfigError(std::string("missing required field '") + key + "'");
  }
  return spec.at(key);
}

AlphabetDistribution distribution_from(const json& value) {
  if (!value.is_array()) throw ConfigError("distribution must be a list of probabilities");
  std::vector<Rational> p;
  for (const auto& v : value) p.push_back(rational_from(v));
  if (p.size() == 2) return AlphabetDistribution::binary(p[0], p[1]);
  if (p.size() == 3) return AlphabetDistribution::ternary(p[0], p[1], p[2]);
  throw ConfigError("distribution must have 2 or 3 entries");
}

AlphabetDistribution default_beta() {
  return AlphabetDistribution::binary(Rational(1, 4), Rational(3, 4));
}

std::string resolve_path(const std::string& path, const fs::path& base) {
  fs::path p(path);
  if (p.is_relative() && !base.empty()) p = base / p;
  return p.string();
}

ReductionFunction reduction_by_name(const std::string& name) {
  if (name == "identity") return identity_reduction();
  if (name == "strip-last-bit") return strip_last_bit_reduction();
  throw ConfigError("unknown reduction '" + name + "'");
}

// Languages beyond the lang-model kinds that configs need for fixtures.
LanguageSpec language_entry(const json& entry, std::uint64_t seed, const fs::path& base,
                            const std::string& name) {
  const std::string kind = entry.value("kind", "");
  if (kind == "seeded-random" && !entry.contains("seed") &&
      !(entry.contains("params") && entry["params"].contains("seed"))) {
    return LanguageSpec::seeded_random(seed, name);
  }
  if (kind == "interval") {
    Rational low = rational_from(required(entry, "low"));
    Rational high = rational_from(required(entry, "high"));
    return LanguageSpec::program(name, [low, high](std::string_view x) {
      Rational v = left_cut_value(x);
      return low <= v && v < high;
    });
  }
  if (kind == "preimage") {
    auto reduction = std::make_shared<ReductionFunction>(
        reduction_by_name(required(entry, "reduction").get<std::string>()));
    auto target = std::make_shared<LanguageSpec>(
        language_entry(required(entry, "target"), seed, base, name + ".target"));
    return LanguageSpec::program(name, [reduction, target](std::string_view x) {
      return target->contains((*reduction)(x));
    });
  }
  if (kind == "complement") {
    auto inner = std::make_shared<LanguageSpec>(
        language_entry(required(entry, "of"), seed, base, name + ".inner"));
    return LanguageSpec::program(name,
                                 [inner](std::string_view x) { return !inner->contains(x); });
  }
  json copy = entry;
  copy["name"] = name;
  if (kind == "file") {
    json& holder = copy.contains("params") ? copy["params"] : copy;
    holder["path"] = resolve_path(required(holder, "path").get<std::string>(), base);
  }
  return language_from_json(copy);
}

Fixture fixture_with_base(const json& entry, std::uint64_t seed, const fs::path& base) {
  if (!entry.is_object()) throw ConfigError("fixture entry must be an object");
  std::string id = entry.value("name", entry.value("id", ""));
  if (id.empty()) throw ConfigError("fixture entry needs a name");
  const std::string kind = entry.value("kind", "");
  Fixture fixture;
  fixture.id = id;
  if (kind == "pair") {
    fixture.pair = PairEncoding(language_entry(required(entry, "a"), seed, base, id + ".A"),
                                language_entry(required(entry, "b"), seed, base, id + ".B"), id);
  } else if (kind == "pair-file") {
    std::ifstream in(resolve_path(required(entry, "path").get<std::string>(), base));
    if (!in) throw ConfigError("cannot open pair fixture for '" + id + "'");
    fixture.pair = read_pair_fixture(in, id);
  } else {
    fixture.language = language_entry(entry, seed, base, id);
  }
  return fixture;
}

ExperimentConfig parse_with_base(const json& doc, std::optional<std::uint64_t> seed_override,
                                 const fs::path& base) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig config;
  config.raw = doc;
  config.raw["_base"] = base.string();
  config.seed = seed_override ? *seed_override : doc.value("seed", std::uint64_t{0});
  if (doc.contains("n")) {
    long n = doc.at("n").get<long>();
    if (n < 1) throw ConfigError("n must be at least 1");
    config.n = static_cast<std::size_t>(n);
  }
  if (doc.contains("threshold_log2")) {
    config.threshold_log2 = doc.at("threshold_log2").get<double>();
  }
  if (doc.contains("grid")) {
    const json& g = doc.at("grid");
    config.grid.start = rational_field(g, "start", config.grid.start);
    config.grid.stop = rational_field(g, "stop", config.grid.stop);
    config.grid.step = rational_field(g, "step", config.grid.step);
  }
  if (sgn(config.grid.step) <= 0) throw ConfigError("grid step must be positive");
  if (config.grid.start > config.grid.stop) throw ConfigError("grid start exceeds stop");
  if (doc.contains("policy_c")) config.policy_c = doc.at("policy_c").get<unsigned>();
  if (config.policy_c == 0) throw ConfigError("policy constant must be positive");
  std::set<std::string> ids;
  for (const auto& entry : doc.value("fixtures", json::array())) {
    Fixture f = fixture_with_base(entry, config.seed, base);
    if (!ids.insert(f.id).second) throw ConfigError("duplicate fixture name '" + f.id + "'");
    config.fixtures.push_back(std::move(f));
  }
  return config;
}

fs::path base_of(const ExperimentConfig& config) {
  return fs::path(config.raw.value("_base", std::string()));
}

bool bit_of(const Rational& theta, std::size_t j) {
  // j-th fractional binary digit, j >= 1.
  Rational scaled = theta * pow2(static_cast<long>(j));
  BigInt whole = scaled.get_num() / scaled.get_den();
  return mpz_odd_p(whole.get_mpz_t()) != 0;
}

std::string zeros_then_one(std::size_t zeros) { return std::string(zeros, '0') + '1'; }

// Decides val(s_n) < theta from theta's bits read through the restricted
// channel. Abstains when a needed query would not fit the length budget or
// theta's expansion ties with x1 for as long as the budget allows.
Predictor theta_predictor(std::shared_ptr<RestrictedOracle> oracle, std::size_t channel) {
  return [oracle, channel](std::uint64_t position) -> std::optional<std::size_t> {
    std::string x1 = index_to_string(position) + '1';
    const std::string prefix = zeros_then_one(channel);
    auto read = [&](std::size_t j) -> std::optional<int> {
      std::size_t length = prefix.size() + j;
      if (!oracle->admits(length, position)) return std::nullopt;
      std::string answer = oracle->query(prefix + std::string(j, '0'), position);
      return answer == "1" ? 1 : 0;
    };
    for (std::size_t j = 1; j <= x1.size(); ++j) {
      auto b = read(j);
      if (!b) return std::nullopt;
      int x = x1[j - 1] - '0';
      if (*b > x) return 1;
      if (*b < x) return 0;
    }
    for (std::size_t j = x1.size() + 1;; ++j) {
      auto b = read(j);
      if (!b) return std::nullopt;
      if (*b == 1) return 1;
    }
  };
}

long double residual_of(long double upper, long double lower) {
  if (std::isinf(lower) && lower < 0) return 0;
  return upper - lower;
}

std::optional<LanguageSpec> target_of(const Fixture& fixture) {
  if (fixture.language) return fixture.language;
  if (fixture.pair) return union_language(*fixture.pair);
  return std::nullopt;
}

std::vector<json> registry_of(const ExperimentConfig& config) {
  std::vector<json> specs;
  for (json spec : config.raw.value("registry", json::array())) {
    spec["_base"] = base_of(config).string();
    specs.push_back(std::move(spec));
  }
  return specs;
}

// Least grid point at which the re-exponentiated gale crosses the threshold
// within the trace, given log2 of its mass along the prefix.
std::optional<Rational> least_crossing(const std::vector<long double>& log2_mass,
                                       const std::vector<Rational>& grid,
                                       long double threshold) {
  for (const Rational& s : grid) {
    long double sv = to_long_double(s);
    for (std::size_t m = 0; m < log2_mass.size(); ++m) {
      if (log2_mass[m] + sv * static_cast<long double>(m) >= threshold) return s;
    }
  }
  return std::nullopt;
}

struct CellResult {
  Estimate s_hat;
  std::string witness;
};

CellResult estimate_cell(const ExperimentConfig& config, const Fixture& fixture,
                         const std::vector<json>& registry, const GaleContext& base_context,
                         const std::vector<Rational>& grid) {
  CellResult cell;
  GaleContext context = base_context;
  context.target = target_of(fixture);
  std::string sequence;
  for (const auto& spec : registry) {
    BuiltGale built = gale_from_json(spec, context);
    const GaleSpec& g = built.gale;
    if (!g.distribution().is_uniform_binary()) {
      throw ConfigError("registry gale '" + g.id() + "' must be over uniform binary");
    }
    if (fixture.is_pair()) throw ConfigError("dimension estimates need language fixtures");
    if (sequence.empty()) sequence = fixture.sequence(config.n);
    SuccessTrace trace = success_trace(g, sequence, config.n, config.threshold_log2);
    // Mass is exponent-free, so log2 M(m) = log2 d(m) - e m, and the same mass
    // read as an s-gale has log2 capital log2 M(m) + s m.
    long double e = to_long_double(g.exponent());
    std::vector<long double> log2_mass(trace.log2_capital.size());
    for (std::size_t m = 0; m < log2_mass.size(); ++m) {
      log2_mass[m] = trace.log2_capital[m] - e * static_cast<long double>(m);
    }
    auto s = least_crossing(log2_mass, grid, config.threshold_log2);
    if (!s) continue;
    if (!cell.s_hat || *s < *cell.s_hat || (*s == *cell.s_hat && g.id() < cell.witness)) {
      cell.s_hat = s;
      cell.witness = g.id();
    }
  }
  return cell;
}

bool estimate_less(const Estimate& a, const Estimate& b) {
  if (!a) return false;
  if (!b) return true;
  return *a < *b;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

void write_trace_rows(std::ostream& out, const std::vector<long double>& trace,
                      const std::string& gale_id, const std::string& fixture_id,
                      std::optional<unsigned> block_size) {
  for (std::size_t m = 0; m < trace.size(); ++m) {
    out << m << ',' << format_log2(trace[m]) << ',' << gale_id << ',' << fixture_id << ',';
    if (block_size) out << m / *block_size;
    out << '\n';
  }
}

constexpr const char* kTraceHeader = "n,log2_capital,gale_id,fixture_id,block_q\n";

std::string estimate_rational(const Estimate& e) { return e ? format_rational(*e) : "inf"; }

int exit_for(bool violation) { return violation ? 2 : 0; }

}  // namespace

std::vector<Rational> ExponentGrid::points() const {
  if (sgn(step) <= 0) throw ConfigError("grid step must be positive");
  std::vector<Rational> out;
  for (Rational s = start; s <= stop; s += step) out.push_back(s);
  return out;
}

std::string Fixture::sequence(std::uint64_t n) const {
  if (pair) return encode_pair(*pair, n);
  if (language) return char_prefix(*language, n);
  throw ConfigError("fixture '" + id + "' is empty");
}

ExperimentConfig parse_config(const json& doc, std::optional<std::uint64_t> seed_override) {
  return parse_with_base(doc, seed_override, fs::path());
}

ExperimentConfig load_config(const fs::path& path, std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_with_base(doc, seed_override, path.parent_path());
}

Fixture fixture_from_json(const json& entry, std::uint64_t seed) {
  return fixture_with_base(entry, seed, fs::path());
}

StrategyConfig strategy_from_json(const json& spec, std::uint64_t seed) {
  Rational s = rational_from(required(spec, "s"));
  if (sgn(s) <= 0 || s > 1) throw ConfigError("selective exponent must lie in (0,1]");
  unsigned k = spec.contains("k") ? spec.at("k").get<unsigned>() : min_block_size(s);

  json sel = spec.value("selector", json("enumeration-min"));
  std::string sel_kind = sel.is_string() ? sel.get<std::string>() : sel.value("kind", "");
  auto selector = [&]() -> SelectorFunction {
    if (sel_kind == "left-cut") return left_cut_selector(rational_from(required(sel, "theta")));
    if (sel_kind == "enumeration-min") return enumeration_min_selector();
    if (sel_kind == "first-argument") return first_argument_selector();
    if (sel_kind == "coin-flip") {
      std::uint64_t sel_seed =
          sel.is_object() && sel.contains("seed") ? sel.at("seed").get<std::uint64_t>() : seed;
      return coin_flip_selector(sel_seed);
    }
    throw ConfigError("unknown selector '" + sel_kind + "'");
  }();
  ReductionFunction reduction = reduction_by_name(spec.value("reduction", "identity"));

  StrategyConfig config{s, k, std::move(selector), std::move(reduction), std::size_t{1} << 16,
                        std::nullopt};
  if (spec.contains("cache_size")) config.cache_size = spec.at("cache_size").get<std::size_t>();
  if (spec.contains("policy")) {
    const json& p = spec.at("policy");
    OraclePolicy policy;
    policy.c = p.value("c", 4u);
    std::string mode = p.value("on_violation", "record");
    if (mode == "error") {
      policy.on_violation = OraclePolicy::OnViolation::Error;
    } else if (mode == "record") {
      policy.on_violation = OraclePolicy::OnViolation::Record;
    } else {
      throw ConfigError("policy on_violation must be 'error' or 'record'");
    }
    config.policy = policy;
  }
  config.validate();
  return config;
}

NamedOracle oracle_from_json(const json& entry) {
  std::string name = required(entry, "name").get<std::string>();
  std::string kind = required(entry, "kind").get<std::string>();
  if (kind == "noop") return {name, [](std::string_view) { return std::string(); }};
  if (kind == "theta-bits") {
    std::vector<Rational> thetas;
    for (const auto& t : required(entry, "thetas")) {
      Rational theta = rational_from(t);
      if (sgn(theta) < 0 || theta > 1) throw ConfigError("theta must lie in [0,1]");
      thetas.push_back(theta);
    }
    return {name, [thetas](std::string_view q) -> std::string {
              std::size_t one = q.find('1');
              if (one == std::string_view::npos || one >= thetas.size()) return std::string();
              std::size_t j = q.size() - one - 1;
              if (j == 0) return std::string();
              return bit_of(thetas[one], j) ? "1" : "0";
            }};
  }
  throw ConfigError("unknown oracle kind '" + kind + "'");
}

BuiltGale gale_from_json(const json& spec, const GaleContext& context) {
  if (!spec.is_object()) throw ConfigError("gale spec must be an object");
  const std::string kind = required(spec, "kind").get<std::string>();
  const fs::path base(spec.value("_base", std::string()));
  std::optional<unsigned> block_size;

  auto binary_distribution = [&]() {
    return spec.contains("distribution") ? distribution_from(spec.at("distribution"))
                                         : AlphabetDistribution::uniform_binary();
  };

  std::optional<GaleSpec> gale;
  if (kind == "constant") {
    gale = constant_martingale();
  } else if (kind == "all-in") {
    std::string symbol = spec.value("symbol", "0");
    if (symbol.size() != 1) throw ConfigError("all-in symbol must be one character");
    gale = all_in_gale(symbol[0], 1);
  } else if (kind == "product") {
    std::vector<Rational> ratios;
    for (const auto& r : required(spec, "ratios")) ratios.push_back(rational_from(r));
    AlphabetDistribution dist = ratios.size() == 3 && !spec.contains("distribution")
                                    ? gamma_zero()
                                    : binary_distribution();
    if (spec.contains("distribution")) dist = distribution_from(spec.at("distribution"));
    gale = GaleSpec("product", dist, 1, product_mass(std::move(ratios)));
  } else if (kind == "predictor") {
    const json& lang = required(spec, "language");
    std::shared_ptr<LanguageSpec> language;
    if (lang.is_string() && lang.get<std::string>() == "target") {
      if (!context.target) throw ConfigError("predictor targets a fixture but none is bound");
      language = std::make_shared<LanguageSpec>(*context.target);
    } else {
      language = std::make_shared<LanguageSpec>(
          language_entry(lang, context.seed, base, "predictor.language"));
    }
    Rational confidence = rational_field(spec, "confidence", 1);
    Predictor predictor = [language](std::uint64_t n) -> std::optional<std::size_t> {
      return language->bit(n) ? 1 : 0;
    };
    gale = GaleSpec("predictor", binary_distribution(), 1,
                    predictor_mass(2, std::move(predictor), confidence));
  } else if (kind == "theta-predictor") {
    if (!context.oracle) throw ConfigError("theta-predictor needs an oracle");
    std::size_t channel = spec.value("channel", std::size_t{0});
    Rational confidence = rational_field(spec, "confidence", 1);
    gale = GaleSpec("theta-predictor-" + std::to_string(channel),
                    AlphabetDistribution::uniform_binary(), 1,
                    predictor_mass(2, theta_predictor(context.oracle, channel), confidence));
  } else if (kind == "selective") {
    StrategyConfig strategy = strategy_from_json(spec, context.seed);
    block_size = strategy.k;
    gale = selective_gale(std::move(strategy));
  } else if (kind == "mixture") {
    std::vector<GaleSpec> members;
    for (const auto& m : required(spec, "members")) {
      json member = m;
      if (!base.empty() && !member.contains("_base")) member["_base"] = base.string();
      members.push_back(gale_from_json(member, context).gale);
    }
    if (members.empty()) throw ConfigError("mixture needs at least one member");
    std::optional<std::vector<Rational>> weights;
    if (spec.contains("weights")) {
      weights.emplace();
      for (const auto& w : spec.at("weights")) weights->push_back(rational_from(w));
    }
    gale = mixture(GaleFamily(std::move(members)), std::move(weights));
  } else if (kind == "table") {
    std::ifstream in(resolve_path(required(spec, "path").get<std::string>(), base));
    if (!in) throw ConfigError("cannot open mass table");
    MassTable table = read_mass_table(in);
    std::string alphabet = spec.value("alphabet", "binary");
    AlphabetDistribution dist = alphabet == "ternary" ? gamma_zero() : binary_distribution();
    if (spec.contains("distribution")) dist = distribution_from(spec.at("distribution"));
    gale = GaleSpec("table", dist, 1, table_mass(table, dist.alphabet()));
  } else {
    throw ConfigError("unknown gale kind '" + kind + "'");
  }

  if (spec.contains("exponent")) gale = gale->with_exponent(rational_from(spec.at("exponent")));
  if (spec.contains("id")) gale = gale->with_id(spec.at("id").get<std::string>());
  BuiltGale built{*gale, block_size};
  if (spec.contains("transforms")) built = apply_transforms(std::move(built), spec.at("transforms"));
  return built;
}

BuiltGale apply_transforms(BuiltGale built, const json& pipeline) {
  if (!pipeline.is_array()) throw ConfigError("transforms must be a list");
  for (const auto& step : pipeline) {
    const std::string op = required(step, "op").get<std::string>();
    GaleSpec& g = built.gale;
    if (op == "exponent_shift") {
      g = martingale_to_sgale(g, rational_from(required(step, "s")));
    } else if (op == "exponent_unshift") {
      g = sgale_to_martingale(g);
    } else if (op == "to_beta") {
      AlphabetDistribution beta =
          step.contains("beta") ? distribution_from(step.at("beta")) : default_beta();
      g = to_beta_gale(g, rational_from(required(step, "t")), beta);
    } else if (op == "lift_pair") {
      AlphabetDistribution gamma =
          step.contains("gamma") ? distribution_from(step.at("gamma")) : gamma_zero();
      Rational s_prime;
      if (step.contains("s_prime")) {
        s_prime = rational_from(step.at("s_prime"));
      } else {
        auto found = find_exponent_pair(g.distribution(), gamma, g.exponent());
        if (!found) throw PreconditionError("no feasible pair exponent for '" + g.id() + "'");
        s_prime = *found;
      }
      LiftPreconditions pre = check_lift_preconditions(g.distribution(), g.exponent(), gamma,
                                                       s_prime);
      if (!pre.ok) throw PreconditionError("lift precondition fails: " + pre.failing);
      g = lift_to_pair_gale(g, gamma, s_prime);
      built.block_size.reset();
    } else {
      throw ConfigError("unknown transform '" + op + "'");
    }
  }
  return built;
}

std::string format_log2(long double value) {
  if (std::isinf(value)) return value < 0 ? "-inf" : "inf";
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.9Lf", value);
  std::string out(buffer);
  if (out == "-0.000000000") out = "0.000000000";
  return out;
}

std::string format_estimate(const Estimate& estimate) {
  if (!estimate) return "inf";
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.6Lf", to_long_double(*estimate));
  return buffer;
}

std::vector<DimestRow> run_dimest(const ExperimentConfig& config) {
  std::vector<json> registry = registry_of(config);
  std::vector<Rational> grid = config.grid.points();
  std::vector<DimestRow> rows;
  for (const Fixture& fixture : config.fixtures) {
    GaleContext context;
    context.seed = config.seed;
    context.oracle = restrict_oracle([](std::string_view) { return std::string(); },
                                     OraclePolicy{config.policy_c,
                                                  OraclePolicy::OnViolation::Record});
    CellResult cell = estimate_cell(config, fixture, registry, context, grid);
    rows.push_back({fixture.id, cell.s_hat, cell.witness});
  }
  return rows;
}

P2sResult run_p2s(const ExperimentConfig& config) {
  std::vector<NamedOracle> oracles;
  for (const auto& entry : config.raw.value("oracles", json::array())) {
    oracles.push_back(oracle_from_json(entry));
  }
  if (oracles.empty()) throw ConfigError("p2s needs at least one oracle");
  std::sort(oracles.begin(), oracles.end(),
            [](const NamedOracle& a, const NamedOracle& b) { return a.name < b.name; });
  for (std::size_t i = 1; i < oracles.size(); ++i) {
    if (oracles[i].name == oracles[i - 1].name) {
      throw ConfigError("duplicate oracle name '" + oracles[i].name + "'");
    }
  }
  std::vector<json> registry = registry_of(config);
  std::vector<Rational> grid = config.grid.points();

  P2sResult result;
  for (const NamedOracle& oracle : oracles) {
    Estimate sup = grid.empty() ? Estimate{} : Estimate{grid.front()};
    bool any = false;
    for (const Fixture& fixture : config.fixtures) {
      GaleContext context;
      context.seed = config.seed;
      context.oracle = restrict_oracle(
          oracle.function, OraclePolicy{config.policy_c, OraclePolicy::OnViolation::Record});
      CellResult cell = estimate_cell(config, fixture, registry, context, grid);
      result.cells.push_back({oracle.name, fixture.id, cell.s_hat, cell.witness,
                              context.oracle->violation_count()});
      if (!any || estimate_less(sup, cell.s_hat)) sup = cell.s_hat;
      any = true;
    }
    result.per_oracle_sup[oracle.name] = sup;
    if (result.argmin.empty() || estimate_less(sup, result.min_sup)) {
      result.min_sup = sup;
      result.argmin = oracle.name;
    }
  }
  return result;
}

std::vector<SelectiveRun> run_selective(const ExperimentConfig& config) {
  StrategyConfig strategy = strategy_from_json(required(config.raw, "strategy"), config.seed);
  std::vector<SelectiveRun> runs;
  for (const Fixture& fixture : config.fixtures) {
    if (!fixture.language) throw ConfigError("selective runs need language fixtures");
    runs.push_back({fixture.id, certify_success(strategy, *fixture.language, config.n,
                                                config.threshold_log2)});
  }
  return runs;
}

LiftPairResult run_liftpair(const ExperimentConfig& config) {
  const json& doc = config.raw;
  AlphabetDistribution beta = doc.contains("beta") ? distribution_from(doc.at("beta"))
                                                   : default_beta();
  AlphabetDistribution gamma = doc.contains("gamma") ? distribution_from(doc.at("gamma"))
                                                     : gamma_zero();
  json source_spec = required(doc, "source");
  source_spec["_base"] = base_of(config).string();

  auto build_source = [&](const GaleContext& context) {
    GaleSpec g = gale_from_json(source_spec, context).gale;
    if (g.distribution().is_uniform_binary() && !(beta == g.distribution())) {
      g = to_beta_gale(g, rational_from(required(doc, "t")), beta);
    }
    if (!(g.distribution() == beta)) {
      throw ConfigError("source gale distribution does not match beta");
    }
    return g;
  };

  LiftPairResult result;
  // The exponent pair only depends on the source's exponent, so settle
  // feasibility before touching any fixture.
  GaleContext probe;
  probe.seed = config.seed;
  if (!config.fixtures.empty()) probe.target = target_of(config.fixtures.front());
  GaleSpec first = build_source(probe);
  result.s = first.exponent();
  result.source_gale_id = first.id();

  std::optional<Rational> s_prime;
  if (doc.contains("s_prime")) {
    s_prime = rational_from(doc.at("s_prime"));
  } else {
    s_prime = find_exponent_pair(beta, gamma, result.s);
  }
  Rational probe_prime = s_prime ? *s_prime : std::max(result.s, Rational(999, 1000));
  LiftPreconditions pre = check_lift_preconditions(beta, result.s, gamma, probe_prime);
  result.s_prime = probe_prime;
  if (!s_prime || !pre.ok) {
    result.feasible = false;
    result.failing_inequality = pre.failing.empty() ? pre.nonzero.name : pre.failing;
    return result;
  }
  result.feasible = true;

  for (const Fixture& fixture : config.fixtures) {
    if (!fixture.is_pair()) throw ConfigError("liftpair needs pair fixtures");
    GaleContext context;
    context.seed = config.seed;
    context.target = target_of(fixture);
    GaleSpec d = build_source(context);
    GaleSpec lifted = lift_to_pair_gale(d, gamma, *s_prime);
    result.pair_gale_id = lifted.id();

    LiftPairRun run;
    run.fixture_id = fixture.id;
    run.encoding = fixture.sequence(config.n);
    std::string flat = flatten(run.encoding);
    SuccessTrace pair_trace = success_trace(lifted, run.encoding, config.n, config.threshold_log2);
    SuccessTrace flat_trace = success_trace(d, flat, config.n, config.threshold_log2);
    run.pair_trace = std::move(pair_trace.log2_capital);
    run.flat_trace = std::move(flat_trace.log2_capital);
    run.pair_crossing = pair_trace.first_crossing;
    run.flat_crossing = flat_trace.first_crossing;
    run.min_residual = std::numeric_limits<long double>::infinity();
    for (std::size_t m = 0; m < run.pair_trace.size(); ++m) {
      run.min_residual =
          std::min(run.min_residual, residual_of(run.pair_trace[m], run.flat_trace[m]));
    }
    run.dominated = run.min_residual >= -kBoundTolerance;
    run.transfer_ok = !run.flat_crossing ||
                      (run.pair_crossing && *run.pair_crossing <= *run.flat_crossing);
    result.runs.push_back(std::move(run));
  }
  return result;
}

namespace {

int command_trace(const ExperimentConfig& config, const fs::path& out_dir, std::ostream& log) {
  json spec = required(config.raw, "gale");
  spec["_base"] = base_of(config).string();
  std::optional<NamedOracle> oracle;
  if (config.raw.contains("oracle")) oracle = oracle_from_json(config.raw.at("oracle"));

  std::ofstream csv = open_output(out_dir / "trace.csv");
  std::ofstream report = open_output(out_dir / "trace_report.txt");
  csv << kTraceHeader;
  for (const Fixture& fixture : config.fixtures) {
    GaleContext context;
    context.seed = config.seed;
    context.target = target_of(fixture);
    if (oracle) {
      context.oracle = restrict_oracle(
          oracle->function, OraclePolicy{config.policy_c, OraclePolicy::OnViolation::Record});
    }
    BuiltGale built = gale_from_json(spec, context);
    if (config.raw.contains("transforms")) {
      built = apply_transforms(std::move(built), config.raw.at("transforms"));
    }
    const bool ternary = built.gale.alphabet().size() == 3;
    if (ternary != fixture.is_pair()) {
      throw ConfigError("fixture '" + fixture.id + "' does not match the gale's alphabet");
    }
    SuccessTrace trace =
        success_trace(built.gale, fixture.sequence(config.n), config.n, config.threshold_log2);
    write_trace_rows(csv, trace.log2_capital, built.gale.id(), fixture.id, built.block_size);
    report << "fixture " << fixture.id << ": gale " << built.gale.id() << ", final log2 capital "
           << format_log2(trace.log2_capital.back()) << ", first crossing "
           << (trace.first_crossing ? std::to_string(*trace.first_crossing) : "none") << '\n';
  }
  log << "trace: wrote " << config.fixtures.size() << " fixture trace(s)\n";
  return 0;
}

int command_dimest(const ExperimentConfig& config, const fs::path& out_dir, std::ostream& log) {
  std::vector<DimestRow> rows = run_dimest(config);
  std::ofstream csv = open_output(out_dir / "dimest.csv");
  csv << "fixture_id,s_hat_estimate,s_hat_estimate_rational,witness_gale\n";
  for (const auto& row : rows) {
    csv << row.fixture_id << ',' << format_estimate(row.s_hat) << ','
        << estimate_rational(row.s_hat) << ',' << row.witness << '\n';
  }
  log << "dimest: " << rows.size() << " fixture estimate(s)\n";
  return 0;
}

int command_p2s(const ExperimentConfig& config, const fs::path& out_dir, std::ostream& log) {
  P2sResult result = run_p2s(config);
  std::ofstream csv = open_output(out_dir / "p2s.csv");
  csv << "oracle_id,fixture_id,s_hat_estimate,s_hat_estimate_rational,witness_gale,"
         "policy_violations\n";
  std::size_t violations = 0;
  for (const auto& cell : result.cells) {
    csv << cell.oracle_id << ',' << cell.fixture_id << ',' << format_estimate(cell.s_hat) << ','
        << estimate_rational(cell.s_hat) << ',' << cell.witness << ',' << cell.policy_violations
        << '\n';
    violations += cell.policy_violations;
  }
  json summary;
  summary["label"] = "estimate";
  for (const auto& [name, sup] : result.per_oracle_sup) {
    summary["sup_over_fixtures"][name] = estimate_rational(sup);
  }
  summary["min_sup"] = estimate_rational(result.min_sup);
  summary["argmin_oracle"] = result.argmin;
  summary["policy_violations"] = violations;
  std::ofstream out = open_output(out_dir / "p2s_summary.json");
  out << summary.dump(2) << '\n';
  log << "p2s: min-sup estimate " << estimate_rational(result.min_sup) << " via "
      << result.argmin << "\n";
  return exit_for(violations > 0);
}

int command_selective(const ExperimentConfig& config, const fs::path& out_dir,
                      std::ostream& log) {
  std::vector<SelectiveRun> runs = run_selective(config);
  unsigned k = strategy_from_json(config.raw.at("strategy"), config.seed).k;
  std::ofstream csv = open_output(out_dir / "selective_trace.csv");
  std::ofstream report = open_output(out_dir / "selective_report.txt");
  csv << kTraceHeader;
  json blocks = json::array();
  bool violation = false;
  for (const auto& run : runs) {
    const CertifyReport& r = run.report;
    write_trace_rows(csv, r.trace, "selective", run.fixture_id, k);
    for (const auto& b : r.blocks) {
      json entry;
      entry["fixture"] = run.fixture_id;
      entry["q"] = b.q;
      entry["order"] = b.order;
      entry["i"] = b.threshold ? json(*b.threshold) : json(nullptr);
      entry["capital_log2"] = std::isfinite(b.capital_log2)
                                  ? json(static_cast<double>(b.capital_log2))
                                  : json(nullptr);
      blocks.push_back(std::move(entry));
    }
    report << "fixture " << run.fixture_id << '\n';
    report << "bound satisfied: " << (r.bound_satisfied ? "true" : "false") << '\n';
    if (!r.bound_failures.empty()) {
      report << "bound failed at q=" << r.bound_failures.front() << " ("
             << r.bound_failures.size() << " block(s))\n";
    }
    if (r.threshold_violations.empty()) {
      report << "threshold violations: none\n";
    } else {
      report << "threshold violated at q=" << r.threshold_violations.front() << " ("
             << r.threshold_violations.size() << " block(s))\n";
    }
    report << "final log2 capital: " << format_log2(r.final_log2) << '\n';
    report << "first crossing: "
           << (r.first_crossing ? std::to_string(*r.first_crossing) : "none") << '\n';
    report << "selector calls: " << r.counts.selector_calls
           << ", reduction calls: " << r.counts.reduction_calls
           << ", tournaments built: " << r.counts.tournaments_built << '\n';
    report << "policy queries: " << r.queries << ", policy violations: " << r.policy_violations
           << '\n';
    violation = violation || !r.bound_satisfied || !r.threshold_violations.empty() ||
                r.policy_violations > 0;
    log << "selective " << run.fixture_id << ": bound satisfied: "
        << (r.bound_satisfied ? "true" : "false");
    if (!r.threshold_violations.empty()) {
      log << ", threshold violated at q=" << r.threshold_violations.front();
    }
    log << ", final log2 capital " << format_log2(r.final_log2) << '\n';
  }
  std::ofstream out = open_output(out_dir / "selective_blocks.json");
  out << "[\n";
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    out << "  " << blocks[i].dump() << (i + 1 < blocks.size() ? ",\n" : "\n");
  }
  out << "]\n";
  return exit_for(violation);
}

int command_liftpair(const ExperimentConfig& config, const fs::path& out_dir,
                     std::ostream& log) {
  LiftPairResult result = run_liftpair(config);
  std::ofstream report = open_output(out_dir / "liftpair_report.txt");
  report << "source exponent s: " << format_rational(result.s) << '\n';
  if (!result.feasible) {
    report << "infeasible: " << result.failing_inequality << " fails at s'="
           << format_rational(result.s_prime) << '\n';
    log << "liftpair: infeasible exponent pair, failing inequality " << result.failing_inequality
        << '\n';
    return 1;
  }
  report << "pair exponent s': " << format_rational(result.s_prime) << '\n';
  std::ofstream pair_csv = open_output(out_dir / "liftpair_pair_trace.csv");
  std::ofstream flat_csv = open_output(out_dir / "liftpair_source_trace.csv");
  std::ofstream symbols = open_output(out_dir / "liftpair_encoding.csv");
  pair_csv << kTraceHeader;
  flat_csv << kTraceHeader;
  symbols << "n,symbol,flattened,fixture_id\n";
  bool violation = false;
  for (const auto& run : result.runs) {
    write_trace_rows(pair_csv, run.pair_trace, result.pair_gale_id, run.fixture_id, {});
    write_trace_rows(flat_csv, run.flat_trace, result.source_gale_id, run.fixture_id, {});
    std::string flat = flatten(run.encoding);
    for (std::size_t m = 0; m < run.encoding.size(); ++m) {
      symbols << m << ',' << run.encoding[m] << ',' << flat[m] << ',' << run.fixture_id << '\n';
    }
    auto crossing = [](const std::optional<std::size_t>& c) {
      return c ? std::to_string(*c) : std::string("none");
    };
    report << "fixture " << run.fixture_id << ": domination "
           << (run.dominated ? "holds" : "FAILS") << " (min residual "
           << format_log2(run.min_residual) << "), pair crossing " << crossing(run.pair_crossing)
           << ", source crossing " << crossing(run.flat_crossing) << ", success transfer "
           << (run.transfer_ok ? "holds" : "FAILS") << '\n';
    violation = violation || !run.dominated || !run.transfer_ok;
  }
  log << "liftpair: s'=" << format_rational(result.s_prime) << ", "
      << (violation ? "violation found" : "all checks passed") << '\n';
  return exit_for(violation);
}

}  // namespace

int run_command(const std::string& command, const CommandOptions& options, std::ostream& log) {
  try {
    ExperimentConfig config = load_config(options.config_path, options.seed);
    fs::create_directories(options.out_dir);
    if (command == "trace") return command_trace(config, options.out_dir, log);
    if (command == "dimest") return command_dimest(config, options.out_dir, log);
    if (command == "p2s") return command_p2s(config, options.out_dir, log);
    if (command == "selective") return command_selective(config, options.out_dir, log);
    if (command == "liftpair") return command_liftpair(config, options.out_dir, log);
    log << "unknown command '" << command << "'\n";
    return 1;
  } catch (const DisjointnessViolation& e) {
    log << "property violation: " << e.what() << '\n';
    return 2;
  } catch (const ThresholdViolated& e) {
    log << "property violation: " << e.what() << '\n';
    return 2;
  } catch (const PolicyViolation& e) {
    log << "property violation: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace galelab
