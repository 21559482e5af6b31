#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "galelab/gale.hpp"

namespace galelab {

// M(w) = arity^{-|w|} * root.
MassFunction uniform_mass(std::size_t arity, const Rational& root = 1);

// M(wa) = M(w) * ratios[a]; ratios must be non-negative and sum to 1.
MassFunction product_mass(std::vector<Rational> ratios, const Rational& root = 1);

// Returns the predicted symbol for the next position, or nullopt to abstain.
using Predictor = std::function<std::optional<std::size_t>(std::uint64_t position)>;

// Puts `confidence` of the current mass on the predicted symbol and splits the
// remainder evenly over the others; abstaining splits evenly over all symbols.
MassFunction predictor_mass(std::size_t arity, Predictor predictor, const Rational& confidence,
                            const Rational& root = 1);

// Defined up to the deepest word in the table; deeper words raise
// PartialDefinitionError.
MassFunction table_mass(const MassTable& table, const Alphabet& alphabet);

// sum_k weight_k * M_k(w). Sum-preserving whenever every member is.
MassFunction weighted_sum_mass(std::vector<std::pair<Rational, MassFunction>> terms);

}  // namespace galelab
