#pragma once

// Gale-to-gale constructions, all defined on mass functions so the rational
// structure survives; irrational factors only enter when capital is reported.

#include <optional>
#include <string>
#include <vector>

#include "galelab/gale.hpp"

namespace galelab {

// Finite list of gales sharing alphabet and distribution. Member k plays the
// role of the k-th slice of an enumerated family.
class GaleFamily {
 public:
  explicit GaleFamily(std::vector<GaleSpec> members);

  std::size_t size() const { return members_.size(); }
  const GaleSpec& member(std::size_t k) const;
  const std::vector<GaleSpec>& members() const { return members_; }

 private:
  std::vector<GaleSpec> members_;
};

// Member k becomes the s-gale 2^{(s-1)|x|} d_k(x). Members must be martingales
// over uniform binary.
GaleFamily exponent_shift(const GaleFamily& family, const Rational& s);
// Per-member inverse of exponent_shift.
GaleFamily exponent_unshift(const GaleFamily& family);

// sum_k weight_k * d_k; default weights 2^{-k}. No renormalization: the root
// capital may exceed 1.
GaleSpec mixture(const GaleFamily& family, std::optional<std::vector<Rational>> weights = {},
                 std::string id = "mixture");

// Binary s-gale d to the beta-t-gale
//   d'(wb) = d'(w) * d(wb) / (2^s d(w)) * beta(b)^{-t},  d'(lambda) = d(lambda),
// whose mass recursion is M'(wb) = M'(w) * M_d(wb) / M_d(w). Subtrees below a
// zero of M_d are pruned to zero.
GaleSpec to_beta_gale(const GaleSpec& d, const Rational& t, const AlphabetDistribution& beta,
                      std::string id = {});

// log2 d'(w) - [log2 d(w) - s|w| - t log2 beta(w)]; non-negative when the
// transform bound holds. Zero when both capitals vanish.
long double beta_bound_residual(const GaleSpec& d, const GaleSpec& transformed,
                                std::string_view word);

// Largest s' with max(beta(0), beta(1)) <= 2^{-s'/t}, i.e. -t log2 max(beta).
// Success transfers from d to the transform when this exceeds d's exponent.
long double beta_transfer_exponent(const AlphabetDistribution& beta, const Rational& t);

struct InequalityCheck {
  std::string name;
  long double lhs = 0;
  long double rhs = 0;
  bool exact = false;  // decided in rational arithmetic
  bool holds = false;
  bool ambiguous = false;  // |lhs - rhs| below the decision margin
};

struct LiftPreconditions {
  bool ok = false;
  bool symmetric = false;
  InequalityCheck zero;    // beta(0)^s >= gamma(0)^{s'}
  InequalityCheck nonzero; // beta(1)^s >= gamma(1)^{s'} + gamma(-1)^{s'}
  std::string failing;     // name of the first failing inequality
};

inline constexpr long double kPreconditionMargin = 1e-9L;

// Throws PreconditionError when beta(0) != gamma(0) or the alphabets are wrong.
LiftPreconditions check_lift_preconditions(const AlphabetDistribution& beta, const Rational& s,
                                           const AlphabetDistribution& gamma,
                                           const Rational& s_prime);

// Lifts a binary beta-s-gale d to the gamma-s'-gale D over {0,+,-}:
//   M_D(w0) = M_D(w) M_d(w̄0)/M_d(w̄),  M_D(w±) = M_D(w) M_d(w̄1)/M_d(w̄) * rho_±
// with rho_± = gamma(±1)^{s'} / (gamma(1)^{s'} + gamma(-1)^{s'}). For symmetric
// gamma rho_± = 1/2 exactly; otherwise rho_+ is rounded to a dyadic rational
// with 60 fractional bits and rho_- = 1 - rho_+, keeping the mass exact.
GaleSpec lift_to_pair_gale(const GaleSpec& d, const AlphabetDistribution& gamma,
                           const Rational& s_prime, std::string id = {});

// log2 D(w) - log2 d(w̄); non-negative when D dominates.
long double lift_domination_residual(const GaleSpec& d, const GaleSpec& lifted,
                                     std::string_view ternary_word);

// Smallest s' on the 1/1000 grid in [s, 1) meeting both lift inequalities.
std::optional<Rational> find_exponent_pair(const AlphabetDistribution& beta,
                                           const AlphabetDistribution& gamma, const Rational& s);

}  // namespace galelab
