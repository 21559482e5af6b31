// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <sys/wait.h>

#include <boost/multiprecision/cpp_int.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "galelab/errors.hpp"
#include "galelab/experiments.hpp"
#include "galelab/functions.hpp"
#include "galelab/gale.hpp"
#include "galelab/language.hpp"
#include "galelab/mass_rules.hpp"
#include "galelab/oracle.hpp"
#include "galelab/pairs.hpp"
#include "galelab/selective.hpp"
#include "galelab/transforms.hpp"

using namespace galelab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = fs::path(GALELAB_SOURCE_DIR) / "configs";

std::mt19937_64 rng(0xace5eed);

Rational random_ratio(unsigned denominator) {
  std::uniform_int_distribution<unsigned> pick(1, denominator - 1);
  Rational r(pick(rng), denominator);
  r.canonicalize();
  return r;
}

AlphabetDistribution quarter_beta() {
  return AlphabetDistribution::binary(Rational(1, 4), Rational(3, 4));
}

GaleSpec lean(const Rational& p1, const AlphabetDistribution& dist = AlphabetDistribution::uniform_binary(),
              const Rational& s = 1) {
  return GaleSpec("lean", dist, s, product_mass({1 - p1, p1}));
}

GaleSpec predictor_on(const LanguageSpec& lang, const Rational& confidence) {
  Predictor predictor = [lang](std::uint64_t n) -> std::optional<std::size_t> {
    return lang.bit(n) ? 1 : 0;
  };
  return GaleSpec("predictor", AlphabetDistribution::uniform_binary(), 1,
                  predictor_mass(2, std::move(predictor), confidence));
}

StrategyConfig left_cut_strategy(const Rational& theta) {
  return StrategyConfig{Rational(1, 2), 6, left_cut_selector(theta), identity_reduction(),
                        std::size_t{1} << 16, std::nullopt};
}

// Depth-first walk over every word of length <= depth, visiting parent
// nodes of two mass trees in lockstep.
using PairVisitor = std::function<bool(const std::string&, const Rational&, const Rational&)>;

bool walk_pair(const MassNodePtr& a, const MassNodePtr& b, std::size_t arity, const std::string& symbols,
               std::string& word, std::size_t depth, const PairVisitor& visit) {
  if (!visit(word, a->mass(), b->mass())) return false;
  if (word.size() == depth) return true;
  for (std::size_t c = 0; c < arity; ++c) {
    word.push_back(symbols[c]);
    bool ok = walk_pair(a->child(c), b->child(c), arity, symbols, word, depth, visit);
    word.pop_back();
    if (!ok) return false;
  }
  return true;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

Outcome fail(std::string why) { return {false, std::move(why)}; }

// ---------------------------------------------------------------------------

Outcome gale_identity() {
  auto theta = oracle_from_json(json{{"name", "theta"}, {"kind", "theta-bits"}, {"thetas", {"2/3", "1/3"}}});
  GaleContext context{7, restrict_oracle(theta.function, OraclePolicy{4, OraclePolicy::OnViolation::Record}),
                      std::nullopt};
  GaleSpec product = lean(Rational(5, 7), quarter_beta(), Rational(3, 10));
  std::vector<GaleSpec> mixture_members{constant_martingale(), lean(Rational(1, 3)), lean(Rational(3, 5)),
                                        all_in_gale('1', 1), predictor_on(LanguageSpec::seeded_random(5), Rational(3, 4))};

  std::vector<GaleSpec> binary{
      constant_martingale(),
      all_in_gale('0', 1),
      all_in_gale('1', Rational(1, 3)),
      product,
      predictor_on(LanguageSpec::left_cut(Rational(2, 3)), Rational(5, 7)),
      gale_from_json(json{{"kind", "theta-predictor"}, {"channel", 0}, {"confidence", "3/4"}}, context).gale,
      selective_gale(left_cut_strategy(Rational(2, 3))),
      selective_gale(StrategyConfig{Rational(1, 2), 6, left_cut_selector(Rational(3, 10)),
                                    strip_last_bit_reduction(), std::size_t{1} << 16, std::nullopt}),
      mixture(GaleFamily(mixture_members)),
      exponent_shift(GaleFamily(mixture_members), Rational(1, 2)).member(2),
      martingale_to_sgale(sgale_to_martingale(selective_gale(left_cut_strategy(Rational(1, 3)))), Rational(3, 4)),
      to_beta_gale(lean(Rational(2, 3)).with_exponent(Rational(1, 2)), Rational(1, 2), quarter_beta()),
      to_beta_gale(all_in_gale('0', Rational(1, 2)), Rational(1, 2), quarter_beta()),
      GaleSpec("table", AlphabetDistribution::uniform_binary(), 1,
               table_mass(tabulate(product.mass(), Alphabet::binary(), 16), Alphabet::binary())),
  };
  GaleSpec source = lean(Rational(2, 7), quarter_beta(), Rational(3, 10));
  std::vector<GaleSpec> ternary{
      GaleSpec("product3", gamma_zero(), 1, product_mass({Rational(1, 5), Rational(1, 2), Rational(3, 10)})),
      lift_to_pair_gale(source, gamma_zero(), Rational(4, 5)),
      lift_to_pair_gale(to_beta_gale(constant_martingale().with_exponent(Rational(3, 10)), Rational(3, 10),
                                     quarter_beta()),
                        gamma_zero(), Rational(4, 5)),
      lift_to_pair_gale(GaleSpec("c", quarter_beta(), Rational(1, 10), uniform_mass(2)),
                        AlphabetDistribution::ternary(Rational(1, 4), Rational(1, 2), Rational(1, 4)),
                        Rational(9, 10)),
  };
  std::size_t words = 0;
  for (const auto& g : binary) {
    MassReport r = validate_mass(g, 16);
    words += r.words_checked;
    if (!r.ok) return fail(g.id() + " violates at '" + r.first_violation.value_or("?") + "'");
  }
  for (const auto& g : ternary) {
    MassReport r = validate_mass(g, 12);
    words += r.words_checked;
    if (!r.ok) return fail(g.id() + " violates at '" + r.first_violation.value_or("?") + "'");
  }
  return {true, std::to_string(binary.size()) + " binary + " + std::to_string(ternary.size()) +
                    " ternary gales, " + std::to_string(words) + " words"};
}

Outcome relabel_round_trip() {
  for (int trial = 0; trial < 20; ++trial) {
    GaleSpec martingale = [&]() {
      switch (trial % 4) {
        case 0: return lean(random_ratio(101));
        case 1: return predictor_on(LanguageSpec::seeded_random(rng()), random_ratio(13));
        case 2: return selective_gale(left_cut_strategy(random_ratio(1000))).with_exponent(1);
        default:
          return mixture(GaleFamily({lean(random_ratio(31)), all_in_gale('0', 1), constant_martingale()}));
      }
    }();
    Rational s = random_ratio(64);
    GaleSpec sgale = martingale_to_sgale(martingale, s);
    GaleSpec back = sgale_to_martingale(sgale);
    if (back.exponent() != 1 || tabulate(back.mass(), Alphabet::binary(), 12) !=
                                    tabulate(martingale.mass(), Alphabet::binary(), 12)) {
      return fail("trial " + std::to_string(trial) + " changes the mass table");
    }
    // d_s(w) = 2^{(s-1)|w|} d(w) on a sample word.
    std::string w = "0110100111";
    long double expected = capital(martingale, w).log2() + (to_long_double(s) - 1) * w.size();
    if (!capital(martingale, w).is_zero() && std::fabs(capital(sgale, w).log2() - expected) > 1e-9) {
      return fail("trial " + std::to_string(trial) + " relabels capital wrongly");
    }
  }
  return {true, "20 fixtures identical at depth 12"};
}

Outcome selective_capital_bound() {
  const Rational theta(2, 3);
  auto language = LanguageSpec::left_cut(theta);
  StrategyConfig config = left_cut_strategy(theta);
  CertifyReport r = certify_success(config, language, 6000);
  const long double per_block = 3 - std::log2(7.0L);
  for (std::uint64_t q = 1; q <= 1000; ++q) {
    if (!(r.trace[6 * q] > q * per_block - 1e-9L)) {
      return fail("float bound fails at q=" + std::to_string(q));
    }
  }
  // Exact form: d(A|6q) = M(A|6q) 8^q, so the bound reads M(A|6q) 7^q >= 1.
  std::string prefix = char_prefix(language, 6000);
  MassNodePtr node = selective_gale(config).mass().root();
  Rational seven_power = 1;
  for (std::size_t m = 1; m <= 6000; ++m) {
    node = node->child(prefix[m - 1] - '0');
    if (m % 6 == 0) {
      seven_power *= 7;
      if (node->mass() * seven_power < 1) return fail("exact bound fails at m=" + std::to_string(m));
    }
  }
  if (r.final_log2 < 192) return fail("final log2 capital " + format_log2(r.final_log2));
  if (!r.threshold_violations.empty()) return fail("threshold violations present");
  return {true, "final log2 capital " + format_log2(r.final_log2)};
}

Outcome threshold_brute_force() {
  for (int trial = 0; trial < 10; ++trial) {
    Rational theta = random_ratio(1u << 20);
    auto language = LanguageSpec::left_cut(theta);
    StrategyConfig config = left_cut_strategy(theta);
    for (std::uint64_t q = 0; q <= 50; ++q) {
      BlockTournament t = build_tournament(q, config);
      std::vector<bool> members(6);
      for (unsigned j = 0; j < 6; ++j) members[j] = language.contains(index_to_string(q * 6 + j));
      std::vector<unsigned> valid;
      for (unsigned i = 0; i <= 6; ++i) {
        bool ok = true;
        for (unsigned j = 0; j < 6; ++j) ok = ok && members[j] == t.precedes_eq(i, j);
        if (ok) valid.push_back(i);
      }
      if (valid.size() != 1) {
        return fail("theta=" + format_rational(theta) + " q=" + std::to_string(q) + " has " +
                    std::to_string(valid.size()) + " thresholds");
      }
      if (threshold_index(t, language) != valid.front()) return fail("threshold_index disagrees");
    }
  }
  return {true, "10 thetas, blocks 0..50"};
}

Outcome block_size_oracle() {
  using boost::multiprecision::cpp_int;
  std::ostringstream table;
  for (unsigned j = 1; j <= 16; ++j) {
    unsigned k = 1;
    // 2^{k j/16} > k+1  <=>  2^{k j} > (k+1)^16
    while (!((cpp_int(1) << (k * j)) > boost::multiprecision::pow(cpp_int(k + 1), 16))) ++k;
    if (min_block_size(parse_rational(std::to_string(j) + "/16")) != k) {
      return fail("s=" + std::to_string(j) + "/16: expected " + std::to_string(k));
    }
    if (j == 4 || j == 8 || j == 16) table << " s=" << j << "/16->" << k;
  }
  if (min_block_size(1) != 2 || min_block_size(Rational(1, 2)) != 6 || min_block_size(Rational(1, 4)) != 17) {
    return fail("reference table mismatch");
  }
  return {true, "16 exponents agree;" + table.str()};
}

Outcome mixture_domination() {
  std::vector<GaleSpec> members{constant_martingale(), lean(Rational(1, 3)), lean(Rational(3, 5)),
                                all_in_gale('1', 1), predictor_on(LanguageSpec::seeded_random(9), Rational(5, 6))};
  GaleSpec mix = mixture(GaleFamily(members));
  for (std::size_t k = 0; k < members.size(); ++k) {
    Rational weight(1, 1);
    for (std::size_t i = 0; i < k; ++i) weight /= 2;
    std::string word;
    bool ok = walk_pair(mix.mass().root(), members[k].mass().root(), 2, "01", word, 14,
                        [&](const std::string&, const Rational& mixed, const Rational& member) {
                          return mixed >= weight * member;
                        });
    if (!ok) return fail("member " + std::to_string(k) + " not dominated");
    // The log form on one long path.
    std::string path = char_prefix(LanguageSpec::seeded_random(9), 14);
    for (std::size_t len = 0; len <= 14; ++len) {
      auto m = capital(members[k], path.substr(0, len));
      if (m.is_zero()) break;
      if (capital(mix, path.substr(0, len)).log2() < m.log2() - static_cast<long double>(k) - 1e-12L) {
        return fail("log form fails for member " + std::to_string(k));
      }
    }
  }
  return {true, "5 members, all words to depth 14"};
}

Outcome beta_transform() {
  std::vector<GaleSpec> sources{
      constant_martingale().with_exponent(Rational(1, 2)),
      all_in_gale('0', Rational(1, 2)),
      all_in_gale('1', Rational(1, 2)),
      lean(Rational(2, 3)).with_exponent(Rational(1, 2)),
      lean(Rational(1, 10)).with_exponent(Rational(3, 4)),
      lean(random_ratio(97)),
      predictor_on(LanguageSpec::left_cut(Rational(2, 3)), Rational(4, 5)).with_exponent(Rational(1, 2)),
      predictor_on(LanguageSpec::periodic("001"), 1),
      selective_gale(left_cut_strategy(Rational(2, 3))),
      mixture(GaleFamily({lean(Rational(1, 4)), all_in_gale('1', 1)})).with_exponent(Rational(5, 8)),
  };
  const Rational t(1, 2);
  long double worst = INFINITY;
  for (const auto& d : sources) {
    GaleSpec transformed = to_beta_gale(d, t, quarter_beta());
    if (!(transformed.distribution() == quarter_beta()) || transformed.exponent() != t) {
      return fail(d.id() + " has the wrong label");
    }
    if (!validate_mass(transformed, 16).ok) return fail(d.id() + " transform is not a gale");
    std::string word;
    bool ok = walk_pair(transformed.mass().root(), d.mass().root(), 2, "01", word, 16,
                        [&](const std::string& w, const Rational& upper, const Rational& lower) {
                          // The bound is M'(w) >= M(w) in mass form; check the library residual too.
                          if (upper < lower) return false;
                          if (sgn(lower) == 0) return true;
                          long double r = beta_bound_residual(d, transformed, w);
                          worst = std::min(worst, r);
                          return r >= -1e-9L;
                        });
    if (!ok) return fail(d.id() + " bound fails");
  }
  return {true, "10 sources to depth 16, min residual " + format_log2(worst)};
}

Outcome pair_lift() {
  const Rational s(3, 10), s_prime(4, 5);
  LiftPreconditions pre = check_lift_preconditions(quarter_beta(), s, gamma_zero(), s_prime);
  if (!pre.ok || pre.zero.lhs - pre.zero.rhs < 1e-9L || pre.nonzero.lhs - pre.nonzero.rhs < 1e-9L) {
    return fail("preconditions: " + pre.failing);
  }
  for (const GaleSpec& d : {lean(Rational(5, 7), quarter_beta(), s), lean(Rational(1, 8), quarter_beta(), s)}) {
    GaleSpec lifted = lift_to_pair_gale(d, gamma_zero(), s_prime);
    std::string word;
    long double worst = INFINITY;
    bool ok = walk_pair(lifted.mass().root(), lifted.mass().root(), 3, "0+-", word, 12,
                        [&](const std::string& w, const Rational&, const Rational&) {
                          long double r = lift_domination_residual(d, lifted, w);
                          worst = std::min(worst, r);
                          return r >= -1e-9L;
                        });
    if (!ok) return fail("domination fails, residual " + format_log2(worst));
  }
  ExperimentConfig config = load_config(kConfigs / "liftpair.json");
  config.raw["s_prime"] = "4/5";
  LiftPairResult result = run_liftpair(config);
  if (!result.feasible || result.s != s || result.s_prime != s_prime) return fail("liftpair run is infeasible");
  if (result.runs.size() != 5) return fail("expected 5 pair fixtures");
  std::ostringstream crossings;
  for (const auto& run : result.runs) {
    if (!run.dominated || !run.transfer_ok) return fail(run.fixture_id + " fails domination or transfer");
    if (run.flat_crossing && (!run.pair_crossing || *run.pair_crossing > *run.flat_crossing)) {
      return fail(run.fixture_id + " crosses late");
    }
    crossings << ' ' << (run.pair_crossing ? std::to_string(*run.pair_crossing) : "-") << '/'
              << (run.flat_crossing ? std::to_string(*run.flat_crossing) : "-");
  }
  return {true, "margins ok, all ternary words to depth 12, crossings" + crossings.str()};
}

Outcome point_to_set() {
  ExperimentConfig both = load_config(kConfigs / "p2s.json");
  ExperimentConfig noop = load_config(kConfigs / "p2s_noop.json");
  P2sResult with_theta = run_p2s(both);
  P2sResult without = run_p2s(noop);
  bool strictly_lower = with_theta.min_sup && (!without.min_sup || *with_theta.min_sup < *without.min_sup);
  if (!strictly_lower) {
    return fail("min-sup " + format_estimate(with_theta.min_sup) + " vs " + format_estimate(without.min_sup));
  }
  ExperimentConfig permuted = both;
  std::reverse(permuted.raw["oracles"].begin(), permuted.raw["oracles"].end());
  auto& registry = permuted.raw["registry"];
  std::rotate(registry.begin(), registry.begin() + 2, registry.end());
  P2sResult again = run_p2s(permuted);
  if (again.min_sup != with_theta.min_sup || again.argmin != with_theta.argmin ||
      again.per_oracle_sup != with_theta.per_oracle_sup) {
    return fail("registry permutation changes the result");
  }
  return {true, "min-sup " + format_estimate(with_theta.min_sup) + " with theta vs " +
                    format_estimate(without.min_sup) + " without"};
}

Outcome oracle_policy() {
  StrategyConfig config = left_cut_strategy(Rational(2, 3));
  config.policy = OraclePolicy{4, OraclePolicy::OnViolation::Record};
  auto engine = make_selective_engine(config);
  GaleSpec g = engine->gale();
  std::string prefix = char_prefix(LanguageSpec::left_cut(Rational(2, 3)), 4096);
  std::string other;
  for (int i = 0; i < 4096; ++i) other += (rng() & 1) ? '1' : '0';
  MassNodePtr a = g.mass().root(), b = g.mass().root();
  for (std::size_t m = 0; m < 4096; ++m) {
    a = a->child(prefix[m] - '0');
    b = b->child(other[m] - '0');
  }
  auto log = engine->channel()->log();
  if (log.empty()) return fail("no queries logged");
  for (const auto& record : log) {
    std::size_t bound = 4 * std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::log2(
                                                     static_cast<double>(std::max<std::size_t>(record.context, 1))))));
    if (record.context > 4096 || record.query.size() > bound || !record.allowed) {
      return fail("query '" + record.query + "' at context " + std::to_string(record.context));
    }
  }
  if (engine->channel()->violation_count() != 0) return fail("violations counted");
  return {true, std::to_string(log.size()) + " queries audited, 0 violations"};
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(GALELAB_CLI) + " " + args + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome determinism() {
  fs::path root = fs::temp_directory_path() / "galelab_acceptance_determinism";
  std::size_t files = 0, runs = 0;
  std::vector<fs::path> configs;
  for (const auto& entry : fs::directory_iterator(kConfigs)) {
    if (entry.path().extension() == ".json") configs.push_back(entry.path());
  }
  std::sort(configs.begin(), configs.end());
  for (const auto& config : configs) {
    std::string stem = config.stem().string();
    std::string command = stem.substr(0, stem.find('_'));
    int codes[2];
    fs::path dirs[2] = {root / (stem + "_a"), root / (stem + "_b")};
    for (int r = 0; r < 2; ++r) {
      fs::remove_all(dirs[r]);
      fs::create_directories(dirs[r]);
      codes[r] = run_cli(command + " --config " + config.string() + " --seed 5 --out " + dirs[r].string());
    }
    runs += 2;
    if (codes[0] != codes[1]) return fail(stem + " exit codes differ");
    std::vector<std::string> names;
    for (const auto& f : fs::directory_iterator(dirs[0])) names.push_back(f.path().filename().string());
    std::size_t count_b = std::distance(fs::directory_iterator(dirs[1]), fs::directory_iterator());
    if (names.empty() && codes[0] == 0) return fail(stem + " wrote no output");
    if (names.size() != count_b) return fail(stem + " writes different file sets");
    for (const auto& name : names) {
      if (slurp(dirs[0] / name) != slurp(dirs[1] / name)) return fail(stem + "/" + name + " differs");
      ++files;
    }
  }
  fs::remove_all(root);
  return {true, std::to_string(runs) + " runs over " + std::to_string(configs.size()) + " configs, " +
                    std::to_string(files) + " files identical"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    const char* title;
    std::function<Outcome()> check;
    double time_limit_s;  // 0 = none
  };
  std::vector<Criterion> criteria{
      {"AC1", "gale identity exactness", gale_identity, 10},
      {"AC2", "martingale/s-gale round trip", relabel_round_trip, 0},
      {"AC3", "selective capital bound", selective_capital_bound, 60},
      {"AC4", "threshold brute force", threshold_brute_force, 0},
      {"AC5", "block size oracle", block_size_oracle, 0},
      {"AC6", "mixture domination", mixture_domination, 0},
      {"AC7", "beta transform bound", beta_transform, 0},
      {"AC8", "pair lift", pair_lift, 0},
      {"AC9", "point-to-set analogue", point_to_set, 0},
      {"AC10", "oracle policy", oracle_policy, 0},
      {"AC11", "CLI determinism", determinism, 0},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.check();
    } catch (const std::exception& e) {
      outcome = fail(std::string("exception: ") + e.what());
    }
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (outcome.pass && c.time_limit_s > 0 && seconds >= c.time_limit_s) {
      outcome = fail("took " + std::to_string(seconds) + " s, limit " + std::to_string(c.time_limit_s) + " s");
    }
    if (!outcome.pass) ++failures;
    std::ostringstream line;
    line.setf(std::ios::fixed);
    line.precision(2);
    line << c.id << ' ' << (outcome.pass ? "PASS" : "FAIL") << ' ' << c.title << " (" << seconds
         << " s): " << outcome.detail;
    std::cout << line.str() << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
