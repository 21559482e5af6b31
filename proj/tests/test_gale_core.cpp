#include <doctest.h>

#include <cmath>
#include <sstream>

#include "galelab/errors.hpp"
#include "galelab/functions.hpp"
#include "galelab/gale.hpp"
#include "galelab/language.hpp"
#include "galelab/mass_rules.hpp"
#include "galelab/selective.hpp"
#include "galelab/transforms.hpp"

using namespace galelab;

namespace {

StrategyConfig left_cut_strategy() {
  return StrategyConfig{Rational(1, 2), 6, left_cut_selector(Rational(2, 3)), identity_reduction()};
}

// Independent rendering of the block strategy: k+1 explicit sub-capitals in
// mass form, each killed on a wrong guess, all revived from the aggregate at
// a block start.
struct ReferenceSelective {
  StrategyConfig config;
  std::vector<Rational> sub;  // D_i = d_i 2^{-s|w|}
  Rational aggregate = 1;
  std::uint64_t position = 0;

  explicit ReferenceSelective(StrategyConfig c) : config(std::move(c)), sub(config.k + 1, 1) {}

  void step(int bit) {
    const unsigned k = config.k;
    const unsigned j = position % k;
    BlockTournament t = build_tournament(position / k, config);
    Rational total = 0;
    for (unsigned i = 0; i <= k; ++i) {
      Rational start = j == 0 ? aggregate : sub[i];
      bool guess = t.rank(i) <= t.rank(j);
      sub[i] = guess == (bit == 1) ? start : Rational(0);
      total += sub[i];
    }
    aggregate = total / (k + 1);
    ++position;
  }
};

}  // namespace

TEST_CASE("alphabet distributions must be positive and sum to one") {
  CHECK_THROWS_AS(AlphabetDistribution::binary(Rational(1, 2), Rational(1, 3)), InputError);
  CHECK_THROWS_AS(AlphabetDistribution::binary(Rational(0), Rational(1)), InputError);
  auto beta = AlphabetDistribution::binary(Rational(1, 4), Rational(3, 4));
  CHECK(beta.probability(1) == Rational(3, 4));
  CHECK(AlphabetDistribution::uniform_binary().is_uniform_binary());
  CHECK_FALSE(beta.is_uniform_binary());
}

TEST_CASE("validate_mass accepts the uniform halving mass") {
  MassReport report = validate_mass(uniform_mass(2), Alphabet::binary(), 8);
  CHECK(report.ok);
  CHECK_FALSE(report.first_violation.has_value());
  CHECK(report.words_checked == 255);  // internal nodes of depth < 8
}

TEST_CASE("validate_mass reports the shortest violating word") {
  MassTable table{{"", 1}, {"0", 1}, {"1", 1}};
  MassReport report = validate_mass(table_mass(table, Alphabet::binary()), Alphabet::binary(), 1);
  CHECK_FALSE(report.ok);
  REQUIRE(report.first_violation.has_value());
  CHECK(*report.first_violation == "");

  MassTable deeper{{"", 1},          {"0", Rational(1, 2)}, {"1", Rational(1, 2)},
                   {"00", Rational(1, 4)}, {"01", Rational(1, 4)}, {"10", Rational(1, 2)},
                   {"11", Rational(1, 4)}};
  report = validate_mass(table_mass(deeper, Alphabet::binary()), Alphabet::binary(), 2);
  CHECK(*report.first_violation == "1");
}

TEST_CASE("validate_mass names the word where a table runs out") {
  MassTable table{{"", 1}, {"0", Rational(1, 2)}, {"1", Rational(1, 2)}};
  try {
    validate_mass(table_mass(table, Alphabet::binary()), Alphabet::binary(), 2);
    FAIL("expected a partial definition error");
  } catch (const PartialDefinitionError& e) {
    CHECK(std::string(e.what()).find("'00'") != std::string::npos);
  }
}

TEST_CASE("selective aggregate mass is sum-preserving and matches an explicit recursion") {
  StrategyConfig config = left_cut_strategy();
  GaleSpec gale = selective_gale(config);
  CHECK(validate_mass(gale, 12).ok);

  // Walk a few explicit paths and compare with the reference sub-capitals.
  for (const std::string path : {std::string(18, '1'), std::string("010011010111001101"),
                                 char_prefix(LanguageSpec::left_cut(Rational(2, 3)), 18)}) {
    ReferenceSelective ref(config);
    for (std::size_t m = 0; m < path.size(); ++m) {
      ref.step(path[m] - '0');
      std::string prefix = path.substr(0, m + 1);
      CHECK(gale.mass().at(prefix, Alphabet::binary()) == ref.aggregate);
    }
  }
}

TEST_CASE("capital of simple gales") {
  GaleSpec constant = constant_martingale();
  for (std::string w : {"", "0", "1101", "0000000000"}) {
    CHECK(capital(constant, w).log2() == doctest::Approx(0.0));
  }
  GaleSpec half = constant.with_exponent(Rational(1, 2));
  CHECK(capital(half, "0110100111").log2() == doctest::Approx(-5.0));
  CHECK_THROWS_AS(capital(constant, "012"), InputError);
}

TEST_CASE("beta transform of the constant martingale at the symbol 1") {
  auto beta = AlphabetDistribution::binary(Rational(1, 4), Rational(3, 4));
  GaleSpec d = constant_martingale().with_exponent(Rational(1, 2));
  GaleSpec transformed = to_beta_gale(d, Rational(1, 2), beta);
  const long double expected = -0.5L * std::log2(3.0L);  // log2(1/sqrt 3)
  CHECK(static_cast<double>(capital(transformed, "1").log2()) ==
        doctest::Approx(static_cast<double>(expected)).epsilon(1e-12));
  // beta-t identity at the root, in capital form.
  long double d0 = std::exp2(capital(transformed, "0").log2());
  long double d1 = std::exp2(capital(transformed, "1").log2());
  long double lhs = d0 * std::sqrt(0.25L) + d1 * std::sqrt(0.75L);
  CHECK(static_cast<double>(std::fabs(lhs - 1)) < 1e-12);
}

TEST_CASE("exponent relabeling between martingales and s-gales") {
  GaleSpec m = constant_martingale();
  GaleSpec g = martingale_to_sgale(m, Rational(1, 2));
  CHECK(g.exponent() == Rational(1, 2));
  CHECK(capital(g, "0101").log2() == doctest::Approx(-2.0));
  GaleSpec same = martingale_to_sgale(m, 1);
  CHECK(tabulate(same.mass(), same.alphabet(), 6) == tabulate(m.mass(), m.alphabet(), 6));
  CHECK(sgale_to_martingale(g).exponent() == 1);

  GaleSpec ternary("t", AlphabetDistribution::ternary(Rational(1, 4), Rational(3, 8), Rational(3, 8)),
                   1, uniform_mass(3));
  CHECK_THROWS_AS(martingale_to_sgale(ternary, Rational(1, 2)), UnsupportedError);
  CHECK_THROWS_AS(martingale_to_sgale(g, Rational(1, 2)), InputError);
}

TEST_CASE("round trip of the selective gale through a martingale keeps the mass table") {
  GaleSpec g = selective_gale(left_cut_strategy());
  GaleSpec back = martingale_to_sgale(sgale_to_martingale(g), g.exponent());
  CHECK(tabulate(back.mass(), back.alphabet(), 12) == tabulate(g.mass(), g.alphabet(), 12));
  CHECK(back.exponent() == g.exponent());
}

TEST_CASE("success traces") {
  std::string zeros(64, '0');
  SuccessTrace flat = success_trace(constant_martingale(), zeros, 64, 10);
  CHECK(flat.log2_capital.size() == 65);
  CHECK_FALSE(flat.first_crossing.has_value());

  SuccessTrace all_in = success_trace(all_in_gale('0', 1), zeros, 64, 10);
  for (std::size_t m = 0; m <= 64; ++m) CHECK(all_in.log2_capital[m] == doctest::Approx(m));
  REQUIRE(all_in.first_crossing.has_value());
  CHECK(*all_in.first_crossing == 10);

  std::string lost = "0001";
  SuccessTrace dead = success_trace(all_in_gale('0', 1), lost, 4, 10);
  CHECK(std::isinf(dead.log2_capital[4]));

  CHECK_THROWS_AS(success_trace(constant_martingale(), "01", 3, 10), InputError);
}

TEST_CASE("selective gale crosses threshold 15 within 600 bits on the left cut") {
  auto language = LanguageSpec::left_cut(Rational(2, 3));
  SuccessTrace trace =
      success_trace(selective_gale(left_cut_strategy()), char_prefix(language, 600), 600, 15);
  REQUIRE(trace.first_crossing.has_value());
  CHECK(*trace.first_crossing < 600);
}

TEST_CASE("log capital keeps the symbolic part precise on long words") {
  // Mass stays 1, so the whole value comes from the count bookkeeping.
  GaleSpec g = all_in_gale('0', Rational(1, 3));
  const std::size_t n = std::size_t{1} << 20;
  std::string word(n, '0');
  long double value = capital(g, word).log2();
  CHECK(static_cast<double>(std::fabs(value - static_cast<long double>(n) / 3)) < 1e-9);
}

TEST_CASE("mass tables serialize as word<TAB>num/den") {
  MassTable table = tabulate(product_mass({Rational(1, 4), Rational(3, 4)}), Alphabet::binary(), 2);
  std::ostringstream out;
  write_mass_table(out, table);
  CHECK(out.str().rfind("\t1/1\n0\t1/4\n1\t3/4\n", 0) == 0);
  std::istringstream in(out.str());
  CHECK(read_mass_table(in) == table);
}
