#include "galelab/mass_rules.hpp"

#include <map>

#include "galelab/errors.hpp"

namespace galelab {

namespace {

class UniformNode final : public MassNode {
 public:
  UniformNode(std::size_t arity, Rational mass) : arity_(arity), mass_(std::move(mass)) {}
  const Rational& mass() const override { return mass_; }
  MassNodePtr child(std::size_t symbol) const override {
    if (symbol >= arity_) throw InputError("symbol index out of range");
    return std::make_shared<UniformNode>(arity_, mass_ / Rational(static_cast<long>(arity_)));
  }

 private:
  std::size_t arity_;
  Rational mass_;
};

class UniformRule final : public MassRule {
 public:
  UniformRule(std::size_t arity, Rational root) : arity_(arity), root_(std::move(root)) {}
  std::size_t arity() const override { return arity_; }
  MassNodePtr root() const override { return std::make_shared<UniformNode>(arity_, root_); }

 private:
  std::size_t arity_;
  Rational root_;
};

class ProductNode final : public MassNode {
 public:
  ProductNode(std::shared_ptr<const std::vector<Rational>> ratios, Rational mass)
      : ratios_(std::move(ratios)), mass_(std::move(mass)) {}
  const Rational& mass() const override { return mass_; }
  MassNodePtr child(std::size_t symbol) const override {
    return std::make_shared<ProductNode>(ratios_, mass_ * ratios_->at(symbol));
  }

 private:
  std::shared_ptr<const std::vector<Rational>> ratios_;
  Rational mass_;
};

class ProductRule final : public MassRule {
 public:
  ProductRule(std::vector<Rational> ratios, Rational root)
      : ratios_(std::make_shared<const std::vector<Rational>>(std::move(ratios))),
        root_(std::move(root)) {}
  std::size_t arity() const override { return ratios_->size(); }
  MassNodePtr root() const override { return std::make_shared<ProductNode>(ratios_, root_); }

 private:
  std::shared_ptr<const std::vector<Rational>> ratios_;
  Rational root_;
};

struct PredictorShared {
  std::size_t arity;
  Predictor predictor;
  Rational confidence;
  Rational remainder_share;  // (1 - confidence) / (arity - 1)
  Rational even_share;       // 1 / arity
};

class PredictorNode final : public MassNode {
 public:
  PredictorNode(std::shared_ptr<const PredictorShared> shared, std::uint64_t position,
                Rational mass)
      : shared_(std::move(shared)), position_(position), mass_(std::move(mass)) {}
  const Rational& mass() const override { return mass_; }
  MassNodePtr child(std::size_t symbol) const override {
    if (symbol >= shared_->arity) throw InputError("symbol index out of range");
    Rational next;
    if (sgn(mass_) != 0) {
      std::optional<std::size_t> guess = shared_->predictor(position_);
      if (!guess) {
        next = mass_ * shared_->even_share;
      } else if (*guess == symbol) {
        next = mass_ * shared_->confidence;
      } else {
        next = mass_ * shared_->remainder_share;
      }
    }
    return std::make_shared<PredictorNode>(shared_, position_ + 1, std::move(next));
  }

 private:
  std::shared_ptr<const PredictorShared> shared_;
  std::uint64_t position_;
  Rational mass_;
};

class PredictorRule final : public MassRule {
 public:
  PredictorRule(std::shared_ptr<const PredictorShared> shared, Rational root)
      : shared_(std::move(shared)), root_(std::move(root)) {}
  std::size_t arity() const override { return shared_->arity; }
  MassNodePtr root() const override { return std::make_shared<PredictorNode>(shared_, 0, root_); }

 private:
  std::shared_ptr<const PredictorShared> shared_;
  Rational root_;
};

using TableIndex = std::map<std::string, Rational, std::less<>>;

class TableNode final : public MassNode {
 public:
  TableNode(std::shared_ptr<const TableIndex> index, std::shared_ptr<const Alphabet> alphabet,
            std::string word, Rational mass)
      : index_(std::move(index)),
        alphabet_(std::move(alphabet)),
        word_(std::move(word)),
        mass_(std::move(mass)) {}
  const Rational& mass() const override { return mass_; }
  MassNodePtr child(std::size_t symbol) const override {
    std::string next = word_ + alphabet_->symbol(symbol);
    auto it = index_->find(next);
    if (it == index_->end()) throw PartialDefinitionError(next);
    return std::make_shared<TableNode>(index_, alphabet_, std::move(next), it->second);
  }

 private:
  std::shared_ptr<const TableIndex> index_;
  std::shared_ptr<const Alphabet> alphabet_;
  std::string word_;
  Rational mass_;
};

class TableRule final : public MassRule {
 public:
  TableRule(std::shared_ptr<const TableIndex> index, std::shared_ptr<const Alphabet> alphabet)
      : index_(std::move(index)), alphabet_(std::move(alphabet)) {}
  std::size_t arity() const override { return alphabet_->size(); }
  MassNodePtr root() const override {
    auto it = index_->find(std::string());
    if (it == index_->end()) throw PartialDefinitionError("");
    return std::make_shared<TableNode>(index_, alphabet_, std::string(), it->second);
  }

 private:
  std::shared_ptr<const TableIndex> index_;
  std::shared_ptr<const Alphabet> alphabet_;
};

class SumNode final : public MassNode {
 public:
  SumNode(std::shared_ptr<const std::vector<Rational>> weights, std::vector<MassNodePtr> members)
      : weights_(std::move(weights)), members_(std::move(members)) {
    for (std::size_t k = 0; k < members_.size(); ++k) {
      mass_ += (*weights_)[k] * members_[k]->mass();
    }
  }
  const Rational& mass() const override { return mass_; }
  MassNodePtr child(std::size_t symbol) const override {
    std::vector<MassNodePtr> next;
    next.reserve(members_.size());
    for (const auto& m : members_) next.push_back(m->child(symbol));
    return std::make_shared<SumNode>(weights_, std::move(next));
  }
  const std::vector<MassNodePtr>& members() const { return members_; }

 private:
  std::shared_ptr<const std::vector<Rational>> weights_;
  std::vector<MassNodePtr> members_;
  Rational mass_;
};

class SumRule final : public MassRule {
 public:
  SumRule(std::size_t arity, std::shared_ptr<const std::vector<Rational>> weights,
          std::vector<MassFunction> members)
      : arity_(arity), weights_(std::move(weights)), members_(std::move(members)) {}
  std::size_t arity() const override { return arity_; }
  MassNodePtr root() const override {
    std::vector<MassNodePtr> roots;
    roots.reserve(members_.size());
    for (const auto& m : members_) roots.push_back(m.root());
    return std::make_shared<SumNode>(weights_, std::move(roots));
  }

 private:
  std::size_t arity_;
  std::shared_ptr<const std::vector<Rational>> weights_;
  std::vector<MassFunction> members_;
};

}  // namespace

MassFunction uniform_mass(std::size_t arity, const Rational& root) {
  if (arity < 2) throw InputError("uniform mass needs arity >= 2");
  if (sgn(root) < 0) throw InputError("root mass must be non-negative");
  return MassFunction(std::make_shared<UniformRule>(arity, root));
}

MassFunction product_mass(std::vector<Rational> ratios, const Rational& root) {
  if (ratios.size() < 2) throw InputError("product mass needs at least two ratios");
  Rational total = 0;
  for (auto& r : ratios) {
    r.canonicalize();
    if (sgn(r) < 0) throw InputError("product mass ratios must be non-negative");
    total += r;
  }
  if (total != 1) throw InputError("product mass ratios must sum to 1");
  if (sgn(root) < 0) throw InputError("root mass must be non-negative");
  return MassFunction(std::make_shared<ProductRule>(std::move(ratios), root));
}

MassFunction predictor_mass(std::size_t arity, Predictor predictor, const Rational& confidence,
                            const Rational& root) {
  if (arity < 2) throw InputError("predictor mass needs arity >= 2");
  if (sgn(confidence) < 0 || confidence > 1) {
    throw InputError("predictor confidence must lie in [0,1]");
  }
  auto shared = std::make_shared<PredictorShared>();
  shared->arity = arity;
  shared->predictor = std::move(predictor);
  shared->confidence = confidence;
  shared->remainder_share = (Rational(1) - confidence) / Rational(static_cast<long>(arity - 1));
  shared->even_share = Rational(1, static_cast<unsigned long>(arity));
  return MassFunction(std::make_shared<PredictorRule>(std::move(shared), root));
}

MassFunction table_mass(const MassTable& table, const Alphabet& alphabet) {
  auto index = std::make_shared<TableIndex>();
  for (const auto& [word, mass] : table) {
    for (char c : word) alphabet.index_of(c);
    if (sgn(mass) < 0) throw InputError("mass table entry for '" + word + "' is negative");
    (*index)[word] = mass;
  }
  return MassFunction(std::make_shared<TableRule>(std::move(index),
                                                  std::make_shared<const Alphabet>(alphabet)));
}

MassFunction weighted_sum_mass(std::vector<std::pair<Rational, MassFunction>> terms) {
  if (terms.empty()) throw InputError("weighted sum needs at least one term");
  std::size_t arity = terms.front().second.arity();
  auto weights = std::make_shared<std::vector<Rational>>();
  std::vector<MassFunction> members;
  for (auto& [w, m] : terms) {
    if (m.arity() != arity) throw InputError("weighted sum members must share arity");
    if (sgn(w) <= 0) throw InputError("weighted sum weights must be positive");
    weights->push_back(w);
    members.push_back(std::move(m));
  }
  return MassFunction(std::make_shared<SumRule>(arity, std::move(weights), std::move(members)));
}

}  // namespace galelab
