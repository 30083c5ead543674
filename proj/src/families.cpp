#include "qbfcert/families.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

namespace qbfcert {

Formula gen_iff_family(std::uint32_t n) {
  if (n == 0) throw std::invalid_argument("family size must be positive");
  Formula f;
  f.set_max_var(2 * n);
  for (Var i = 1; i <= n; ++i) {
    f.prefix().add_block(Quantifier::kForall, std::vector<Var>{2 * i - 1});
    f.prefix().add_block(Quantifier::kExists, std::vector<Var>{2 * i});
  }
  for (Var i = 1; i <= n; ++i) {
    const Var u = 2 * i - 1, e = 2 * i;
    f.add_clause({Lit::negative(u), Lit::positive(e)});
    f.add_clause({Lit::positive(u), Lit::negative(e)});
  }
  return f;
}

Formula gen_random_qcnf(const RandomQcnfParams& p) {
  if (p.num_vars == 0) throw std::invalid_argument("num_vars must be positive");
  if (p.min_len == 0 || p.min_len > p.max_len) throw std::invalid_argument("invalid clause length range");
  if (p.max_len > p.num_vars) throw std::invalid_argument("clause length exceeds variable count");
  if (p.universal_ratio < 0.0 || p.universal_ratio > 1.0) throw std::invalid_argument("universal_ratio outside [0,1]");

  std::mt19937_64 rng(p.seed);
  std::bernoulli_distribution is_universal(p.universal_ratio);
  std::bernoulli_distribution negate(0.5);
  std::uniform_int_distribution<std::uint32_t> len_dist(p.min_len, p.max_len);

  std::vector<Quantifier> quant(p.num_vars + 1, Quantifier::kExists);
  for (Var v = 1; v <= p.num_vars; ++v) quant[v] = is_universal(rng) ? Quantifier::kForall : Quantifier::kExists;
  if (p.existential_per_clause && std::find(quant.begin() + 1, quant.end(), Quantifier::kExists) == quant.end())
    quant[p.num_vars] = Quantifier::kExists;

  Formula f;
  f.set_max_var(p.num_vars);
  for (Var v = 1; v <= p.num_vars; ++v) f.prefix().add_block(quant[v], std::vector<Var>{v});
  const Prefix& prefix = f.prefix();

  std::vector<Var> pool(p.num_vars);
  std::iota(pool.begin(), pool.end(), Var{1});
  for (std::uint32_t c = 0; c < p.num_clauses; ++c) {
    std::uint32_t len = len_dist(rng);
    LitVec lits;
    do {
      // partial Fisher-Yates: first `len` entries become the sample
      for (std::uint32_t i = 0; i < len; ++i) {
        std::uniform_int_distribution<std::uint32_t> pick(i, p.num_vars - 1);
        std::swap(pool[i], pool[pick(rng)]);
      }
      lits.clear();
      for (std::uint32_t i = 0; i < len; ++i) lits.push_back(Lit::make(pool[i], negate(rng)));
    } while (p.existential_per_clause &&
             std::none_of(lits.begin(), lits.end(), [&](Lit l) { return prefix.is_existential(l); }));
    f.add_clause(std::move(lits));
  }
  return f;
}

}  // namespace qbfcert
