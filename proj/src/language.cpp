#include "galelab/language.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "galelab/errors.hpp"

namespace galelab {

std::string index_to_string(std::uint64_t n) {
  if (n == UINT64_MAX) throw InputError("index too large for the standard enumeration");
  std::uint64_t v = n + 1;
  int top = 63;
  while (!((v >> top) & 1u)) --top;
  std::string s;
  s.reserve(static_cast<std::size_t>(top));
  for (int bit = top - 1; bit >= 0; --bit) s.push_back(((v >> bit) & 1u) ? '1' : '0');
  return s;
}

std::uint64_t string_to_index(std::string_view s) {
  if (s.size() > 63) throw InputError("string too long for a 64-bit enumeration index");
  std::uint64_t v = 1;
  for (char c : s) {
    if (c != '0' && c != '1') throw InputError("string_to_index expects a binary string");
    v = (v << 1) | static_cast<std::uint64_t>(c == '1');
  }
  return v - 1;
}

std::string pair(std::string_view a, std::string_view b) {
  std::string out;
  out.reserve(2 * a.size() + 2 + b.size());
  for (char c : a) {
    if (c != '0' && c != '1') throw InputError("pair expects binary strings");
    out.push_back(c);
    out.push_back(c);
  }
  out += "01";
  for (char c : b) {
    if (c != '0' && c != '1') throw InputError("pair expects binary strings");
  }
  out += b;
  return out;
}

std::pair<std::string, std::string> unpair(std::string_view codeword) {
  std::string a;
  std::size_t i = 0;
  for (;;) {
    if (i + 1 >= codeword.size()) {
      throw DecodeError("unpair: '" + std::string(codeword) + "' has no separator");
    }
    char x = codeword[i];
    char y = codeword[i + 1];
    i += 2;
    if (x == y && (x == '0' || x == '1')) {
      a.push_back(x);
    } else if (x == '0' && y == '1') {
      break;
    } else {
      throw DecodeError("unpair: '" + std::string(codeword) + "' is not a pair codeword");
    }
  }
  std::string b(codeword.substr(i));
  for (char c : b) {
    if (c != '0' && c != '1') throw DecodeError("unpair: non-binary symbol");
  }
  return {std::move(a), std::move(b)};
}

Rational left_cut_value(std::string_view x) {
  BigInt numerator(std::string(x) + "1", 2);
  Rational value(numerator, BigInt(1) << static_cast<mp_bitcnt_t>(x.size() + 1));
  value.canonicalize();
  return value;
}

int compare_left_cut_values(std::string_view a, std::string_view b) {
  std::string x = std::string(a) + '1';
  std::string y = std::string(b) + '1';
  std::size_t len = std::max(x.size(), y.size());
  x.resize(len, '0');
  y.resize(len, '0');
  int cmp = x.compare(y);
  return (cmp > 0) - (cmp < 0);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_string(std::uint64_t seed, std::string_view s) {
  // FNV-1a over the bytes, then mixed with the seed.
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  h ^= s.size();
  return splitmix64(h ^ splitmix64(seed));
}

LanguageSpec::LanguageSpec(Kind kind, std::string name) : kind_(kind), name_(std::move(name)) {}

LanguageSpec LanguageSpec::left_cut(const Rational& theta, std::string name) {
  if (sgn(theta) < 0 || theta >= 1) throw InputError("left-cut theta must lie in [0,1)");
  if (name.empty()) name = "left-cut(" + format_rational(theta) + ")";
  LanguageSpec spec(Kind::LeftCut, std::move(name));
  spec.theta_ = theta;
  return spec;
}

LanguageSpec LanguageSpec::periodic(std::string pattern, std::string name) {
  if (pattern.empty()) throw InputError("periodic pattern must be non-empty");
  for (char c : pattern) {
    if (c != '0' && c != '1') throw InputError("periodic pattern must be binary");
  }
  if (name.empty()) name = "periodic(" + pattern + ")";
  LanguageSpec spec(Kind::Periodic, std::move(name));
  spec.bits_ = std::make_shared<const std::string>(std::move(pattern));
  return spec;
}

LanguageSpec LanguageSpec::seeded_random(std::uint64_t seed, std::string name) {
  if (name.empty()) name = "seeded-random(" + std::to_string(seed) + ")";
  LanguageSpec spec(Kind::SeededRandom, std::move(name));
  spec.seed_ = seed;
  return spec;
}

LanguageSpec LanguageSpec::from_bits(std::string bits, std::string name) {
  for (char c : bits) {
    if (c != '0' && c != '1') throw InputError("fixture bits must be 0 or 1");
  }
  LanguageSpec spec(Kind::FileBacked, std::move(name));
  spec.bits_ = std::make_shared<const std::string>(std::move(bits));
  return spec;
}

LanguageSpec LanguageSpec::from_file(const std::string& path, std::string name) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open language fixture '" + path + "'");
  return from_bits(read_language_fixture(in), name.empty() ? path : std::move(name));
}

LanguageSpec LanguageSpec::program(std::string name,
                                   std::function<bool(std::string_view)> membership) {
  if (!membership) throw InputError("program-backed language needs a membership rule");
  LanguageSpec spec(Kind::ProgramBacked, std::move(name));
  spec.membership_ = std::move(membership);
  return spec;
}

LanguageSpec LanguageSpec::empty() { return periodic("0", "empty"); }
LanguageSpec LanguageSpec::everything() { return periodic("1", "all"); }

bool LanguageSpec::contains(std::string_view x) const {
  switch (kind_) {
    case Kind::LeftCut:
      return left_cut_value(x) < theta_;
    case Kind::ProgramBacked:
      return membership_(x);
    default:
      return bit(string_to_index(x));
  }
}

bool LanguageSpec::bit(std::uint64_t n) const {
  switch (kind_) {
    case Kind::Periodic:
      return (*bits_)[n % bits_->size()] == '1';
    case Kind::SeededRandom:
      return (splitmix64(seed_ ^ splitmix64(n)) >> 63) != 0;
    case Kind::FileBacked:
      if (n >= bits_->size()) {
        throw FixtureOverrun("fixture '" + name_ + "' has " + std::to_string(bits_->size()) +
                             " bits; index " + std::to_string(n) + " requested");
      }
      return (*bits_)[n] == '1';
    default:
      return contains(index_to_string(n));
  }
}

std::uint64_t LanguageSpec::length_limit() const {
  return kind_ == Kind::FileBacked ? bits_->size() : UINT64_MAX;
}

std::string char_prefix(const LanguageSpec& language, std::uint64_t n) {
  std::string out;
  out.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) out.push_back(language.bit(i) ? '1' : '0');
  return out;
}

std::string read_language_fixture(std::istream& in) {
  std::string keyword;
  std::uint64_t length = 0;
  if (!(in >> keyword >> length) || keyword != "length") {
    throw InputError("language fixture must start with 'length N'");
  }
  std::string bits;
  if (length > 0 && !(in >> bits)) throw InputError("language fixture is missing its bits");
  if (bits.size() != length) {
    throw InputError("language fixture declares " + std::to_string(length) + " bits but has " +
                     std::to_string(bits.size()));
  }
  for (char c : bits) {
    if (c != '0' && c != '1') throw InputError("language fixture bits must be 0 or 1");
  }
  return bits;
}

void write_language_fixture(std::ostream& out, std::string_view bits) {
  out << "length " << bits.size() << '\n' << bits << '\n';
}

namespace {

const nlohmann::json& params_of(const nlohmann::json& entry) {
  static const nlohmann::json empty_object = nlohmann::json::object();
  if (entry.contains("params")) return entry.at("params");
  return empty_object;
}

// Parameters may sit either under "params" or directly on the entry.
const nlohmann::json& param(const nlohmann::json& entry, const char* key) {
  const auto& params = params_of(entry);
  if (params.contains(key)) return params.at(key);
  if (entry.contains(key)) return entry.at(key);
  throw ConfigError(std::string("language entry is missing parameter '") + key + "'");
}

Rational rational_param(const nlohmann::json& value) {
  if (value.is_string()) return parse_rational(value.get<std::string>());
  if (value.is_number_integer()) return Rational(value.get<long>());
  throw ConfigError("rational parameters must be strings like \"2/3\" or integers");
}

}  // namespace

LanguageSpec language_from_json(const nlohmann::json& entry) {
  if (!entry.is_object()) throw ConfigError("language entry must be an object");
  std::string kind = entry.value("kind", "");
  std::string name = entry.value("name", "");
  if (kind == "left-cut") return LanguageSpec::left_cut(rational_param(param(entry, "theta")), name);
  if (kind == "periodic") return LanguageSpec::periodic(param(entry, "pattern").get<std::string>(), name);
  if (kind == "seeded-random") {
    return LanguageSpec::seeded_random(param(entry, "seed").get<std::uint64_t>(), name);
  }
  if (kind == "file") return LanguageSpec::from_file(param(entry, "path").get<std::string>(), name);
  if (kind == "bits") {
    return LanguageSpec::from_bits(param(entry, "bits").get<std::string>(),
                                   name.empty() ? "bits" : name);
  }
  if (kind == "empty") return LanguageSpec::periodic("0", name.empty() ? "empty" : name);
  if (kind == "all") return LanguageSpec::periodic("1", name.empty() ? "all" : name);
  throw ConfigError("unknown language kind '" + kind + "'");
}

std::vector<LanguageSpec> languages_from_manifest(const nlohmann::json& manifest) {
  if (!manifest.is_array()) throw ConfigError("language manifest must be a JSON list");
  std::vector<LanguageSpec> out;
  for (const auto& entry : manifest) out.push_back(language_from_json(entry));
  return out;
}

}  // namespace galelab
