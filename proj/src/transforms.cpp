#include "galelab/transforms.hpp"

#include <cmath>
#include <limits>

#include "galelab/errors.hpp"
#include "galelab/mass_rules.hpp"
#include "galelab/pairs.hpp"

namespace galelab {

GaleFamily::GaleFamily(std::vector<GaleSpec> members) : members_(std::move(members)) {
  for (const auto& m : members_) {
    if (!(m.distribution() == members_.front().distribution())) {
      throw InputError("gale family members must share alphabet and distribution");
    }
  }
}

const GaleSpec& GaleFamily::member(std::size_t k) const {
  if (k >= members_.size()) {
    throw InputError("gale family index " + std::to_string(k) + " out of range");
  }
  return members_[k];
}

GaleFamily exponent_shift(const GaleFamily& family, const Rational& s) {
  std::vector<GaleSpec> out;
  out.reserve(family.size());
  for (const auto& m : family.members()) {
    if (!m.distribution().is_uniform_binary() || m.exponent() != 1) {
      throw InputError("exponent_shift: member '" + m.id() + "' is not a martingale");
    }
    out.push_back(martingale_to_sgale(m, s));
  }
  return GaleFamily(std::move(out));
}

GaleFamily exponent_unshift(const GaleFamily& family) {
  std::vector<GaleSpec> out;
  out.reserve(family.size());
  for (const auto& m : family.members()) out.push_back(sgale_to_martingale(m));
  return GaleFamily(std::move(out));
}

GaleSpec mixture(const GaleFamily& family, std::optional<std::vector<Rational>> weights,
                 std::string id) {
  if (family.size() == 0) throw InputError("mixture of an empty family");
  std::vector<Rational> w;
  if (weights) {
    w = std::move(*weights);
    if (w.size() != family.size()) throw InputError("mixture needs one weight per member");
  } else {
    for (std::size_t k = 0; k < family.size(); ++k) w.push_back(pow2(-static_cast<long>(k)));
  }
  const Rational& s = family.member(0).exponent();
  std::vector<std::pair<Rational, MassFunction>> terms;
  for (std::size_t k = 0; k < family.size(); ++k) {
    if (family.member(k).exponent() != s) {
      throw InputError("mixture members must share the exponent");
    }
    if (sgn(w[k]) <= 0) throw InputError("mixture weights must be positive");
    terms.emplace_back(w[k], family.member(k).mass());
  }
  return GaleSpec(std::move(id), family.member(0).distribution(), s,
                  weighted_sum_mass(std::move(terms)));
}

namespace {

// M(child) = M(parent) * factor * M_src(src child) / M_src(src parent). The
// ratio M / M_src is carried as `scale`, so a step is one multiplication.
class RatioNode final : public MassNode {
 public:
  RatioNode(MassNodePtr source, Rational scale, std::shared_ptr<const std::vector<Rational>> factors,
            std::shared_ptr<const std::vector<std::size_t>> source_symbol)
      : source_(std::move(source)),
        scale_(std::move(scale)),
        mass_(scale_ * source_->mass()),
        factors_(std::move(factors)),
        source_symbol_(std::move(source_symbol)) {}

  const Rational& mass() const override { return mass_; }

  MassNodePtr child(std::size_t symbol) const override {
    if (symbol >= factors_->size()) throw InputError("symbol index out of range");
    MassNodePtr source_child = source_->child((*source_symbol_)[symbol]);
    Rational next_scale;
    if (sgn(mass_) != 0) next_scale = scale_ * (*factors_)[symbol];
    return std::make_shared<RatioNode>(std::move(source_child), std::move(next_scale), factors_,
                                       source_symbol_);
  }

 private:
  MassNodePtr source_;
  Rational scale_;
  Rational mass_;
  std::shared_ptr<const std::vector<Rational>> factors_;
  std::shared_ptr<const std::vector<std::size_t>> source_symbol_;
};

class RatioRule final : public MassRule {
 public:
  RatioRule(MassFunction source, std::vector<Rational> factors,
            std::vector<std::size_t> source_symbol)
      : source_(std::move(source)),
        factors_(std::make_shared<const std::vector<Rational>>(std::move(factors))),
        source_symbol_(std::make_shared<const std::vector<std::size_t>>(std::move(source_symbol))) {}

  std::size_t arity() const override { return factors_->size(); }
  MassNodePtr root() const override {
    return std::make_shared<RatioNode>(source_.root(), Rational(1), factors_, source_symbol_);
  }

 private:
  MassFunction source_;
  std::shared_ptr<const std::vector<Rational>> factors_;
  std::shared_ptr<const std::vector<std::size_t>> source_symbol_;
};

long double residual_between(const LogCapital& upper, const LogCapital& lower,
                             long double lower_shift) {
  if (lower.is_zero()) return std::numeric_limits<long double>::infinity();
  if (upper.is_zero()) return -std::numeric_limits<long double>::infinity();
  return upper.log2() - (lower.log2() + lower_shift);
}

}  // namespace

GaleSpec to_beta_gale(const GaleSpec& d, const Rational& t, const AlphabetDistribution& beta,
                      std::string id) {
  if (!d.distribution().is_uniform_binary()) {
    throw InputError("to_beta_gale expects an s-gale over the uniform binary distribution");
  }
  if (beta.alphabet() != Alphabet::binary()) throw InputError("beta must be a binary distribution");
  if (sgn(t) <= 0 || t >= 1) throw InputError("to_beta_gale needs t in (0,1)");
  if (id.empty()) id = d.id() + ">beta";
  MassFunction mass(std::make_shared<RatioRule>(d.mass(), std::vector<Rational>{1, 1},
                                                std::vector<std::size_t>{0, 1}));
  return GaleSpec(std::move(id), beta, t, std::move(mass));
}

long double beta_bound_residual(const GaleSpec& d, const GaleSpec& transformed,
                                std::string_view word) {
  LogCapital source = capital(d, word);
  LogCapital target = capital(transformed, word);
  long double log2_beta_w = 0;
  for (std::size_t a = 0; a < target.counts().size(); ++a) {
    log2_beta_w += static_cast<long double>(target.counts()[a]) *
                   transformed.distribution().log2_probability(a);
  }
  long double shift = -to_long_double(d.exponent()) * static_cast<long double>(word.size()) -
                      to_long_double(transformed.exponent()) * log2_beta_w;
  if (source.is_zero() && target.is_zero()) return 0;
  return residual_between(target, source, shift);
}

long double beta_transfer_exponent(const AlphabetDistribution& beta, const Rational& t) {
  long double max_log = std::max(beta.log2_probability(0), beta.log2_probability(1));
  return -to_long_double(t) * max_log;
}

LiftPreconditions check_lift_preconditions(const AlphabetDistribution& beta, const Rational& s,
                                           const AlphabetDistribution& gamma,
                                           const Rational& s_prime) {
  if (beta.alphabet() != Alphabet::binary()) throw PreconditionError("beta must be binary");
  if (gamma.alphabet() != Alphabet::ternary()) {
    throw PreconditionError("gamma must be a distribution on {0, 1, -1}");
  }
  if (beta.probability(0) != gamma.probability(0)) {
    throw PreconditionError("lift requires beta(0) = gamma(0) (got " +
                            format_rational(beta.probability(0)) + " vs " +
                            format_rational(gamma.probability(0)) + ")");
  }
  if (sgn(s) < 0 || sgn(s_prime) < 0) throw PreconditionError("exponents must be non-negative");

  const long double sl = to_long_double(s);
  const long double spl = to_long_double(s_prime);
  LiftPreconditions out;
  out.symmetric = gamma.probability(1) == gamma.probability(2);

  // Same base on both sides, base < 1: decided exactly as s' >= s.
  out.zero.name = "beta(0)^s >= gamma(0)^s'";
  out.zero.lhs = std::pow(to_long_double(beta.probability(0)), sl);
  out.zero.rhs = std::pow(to_long_double(gamma.probability(0)), spl);
  out.zero.exact = true;
  out.zero.holds = s_prime >= s;

  out.nonzero.name = "beta(1)^s >= gamma(1)^s' + gamma(-1)^s'";
  out.nonzero.lhs = std::pow(to_long_double(beta.probability(1)), sl);
  out.nonzero.rhs = std::pow(to_long_double(gamma.probability(1)), spl) +
                    std::pow(to_long_double(gamma.probability(2)), spl);
  long double diff = out.nonzero.lhs - out.nonzero.rhs;
  out.nonzero.ambiguous = std::fabs(diff) < kPreconditionMargin;
  out.nonzero.holds = diff >= kPreconditionMargin;

  out.ok = out.zero.holds && out.nonzero.holds;
  if (!out.zero.holds) {
    out.failing = out.zero.name;
  } else if (!out.nonzero.holds) {
    out.failing = out.nonzero.name;
  }
  return out;
}

GaleSpec lift_to_pair_gale(const GaleSpec& d, const AlphabetDistribution& gamma,
                           const Rational& s_prime, std::string id) {
  LiftPreconditions pre = check_lift_preconditions(d.distribution(), d.exponent(), gamma, s_prime);
  if (!pre.ok) {
    throw PreconditionError("lift preconditions fail: " + pre.failing +
                            (pre.nonzero.ambiguous ? " (within decision margin)" : ""));
  }
  Rational rho_plus(1, 2);
  Rational rho_minus(1, 2);
  if (!pre.symmetric) {
    const long double spl = to_long_double(s_prime);
    long double plus = std::pow(to_long_double(gamma.probability(1)), spl);
    long double minus = std::pow(to_long_double(gamma.probability(2)), spl);
    long double share = plus / (plus + minus);
    constexpr int kBits = 60;
    auto scaled = static_cast<unsigned long long>(std::llround(std::ldexp(share, kBits)));
    rho_plus = Rational(BigInt(std::to_string(scaled)), BigInt(1) << kBits);
    rho_plus.canonicalize();
    rho_minus = Rational(1) - rho_plus;
  }
  if (id.empty()) id = d.id() + ">pair";
  MassFunction mass(std::make_shared<RatioRule>(
      d.mass(), std::vector<Rational>{1, rho_plus, rho_minus}, std::vector<std::size_t>{0, 1, 1}));
  return GaleSpec(std::move(id), gamma, s_prime, std::move(mass));
}

long double lift_domination_residual(const GaleSpec& d, const GaleSpec& lifted,
                                     std::string_view ternary_word) {
  LogCapital upper = capital(lifted, ternary_word);
  LogCapital lower = capital(d, flatten(ternary_word));
  if (upper.is_zero() && lower.is_zero()) return 0;
  return residual_between(upper, lower, 0);
}

std::optional<Rational> find_exponent_pair(const AlphabetDistribution& beta,
                                           const AlphabetDistribution& gamma, const Rational& s) {
  if (sgn(s) <= 0 || s >= 1) throw InputError("find_exponent_pair needs s in (0,1)");
  check_lift_preconditions(beta, s, gamma, s);  // throws on beta(0) != gamma(0)
  // Smallest grid point >= s.
  Rational scaled = s * 1000;
  BigInt start = scaled.get_num() / scaled.get_den();
  if (Rational(start) < scaled) start += 1;
  for (unsigned long m = start.get_ui(); m < 1000; ++m) {
    Rational candidate(static_cast<long>(m), 1000);
    candidate.canonicalize();
    if (check_lift_preconditions(beta, s, gamma, candidate).ok) return candidate;
  }
  return std::nullopt;
}

}  // namespace galelab
