#include "qbfcert/formula.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <sstream>
#include <unordered_set>

namespace qbfcert {

Lit Lit::from_dimacs(long value) {
  if (value == 0) throw FormulaError("literal 0 is not a literal");
  return value > 0 ? positive(static_cast<Var>(value)) : negative(static_cast<Var>(-value));
}

std::ostream& operator<<(std::ostream& os, Lit lit) { return os << lit.dimacs(); }

bool normalize_clause(LitVec& lits) {
  std::sort(lits.begin(), lits.end());
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  for (std::size_t i = 1; i < lits.size(); ++i) {
    if (lits[i].var() == lits[i - 1].var()) return false;
  }
  return true;
}

bool is_subset(std::span<const Lit> small, std::span<const Lit> big) {
  if (small.size() > big.size()) return false;
  std::size_t j = 0;
  for (Lit l : small) {
    while (j < big.size() && big[j] < l) ++j;
    if (j == big.size() || big[j] != l) return false;
    ++j;
  }
  return true;
}

bool contains_lit(std::span<const Lit> lits, Lit lit) {
  return std::binary_search(lits.begin(), lits.end(), lit);
}

std::string to_string(std::span<const Lit> lits) {
  std::string s = "(";
  for (std::size_t i = 0; i < lits.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(lits[i].dimacs());
  }
  return s + ")";
}

// ---------------------------------------------------------------------------
// Prefix

void Prefix::ensure_size(Var v) {
  if (pos_.size() <= v) {
    pos_.resize(v + 1, 0);
    quant_.resize(v + 1, Quantifier::kExists);
  }
}

void Prefix::add_block(Quantifier q, std::span<const Var> vars) {
  if (vars.empty()) return;
  for (Var v : vars) {
    if (v == 0) throw FormulaError("variable 0 in prefix");
    if (contains(v)) throw FormulaError("variable " + std::to_string(v) + " quantified twice");
  }
  if (blocks_.empty() || blocks_.back().quant != q) blocks_.push_back({q, {}});
  for (Var v : vars) {
    ensure_size(v);
    pos_[v] = next_pos_++;
    quant_[v] = q;
    blocks_.back().vars.push_back(v);
    ++num_vars_;
  }
}

void Prefix::remove_var(Var v) {
  if (!contains(v)) throw FormulaError("variable " + std::to_string(v) + " not in prefix");
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    auto& vars = blocks_[b].vars;
    auto it = std::find(vars.begin(), vars.end(), v);
    if (it == vars.end()) continue;
    vars.erase(it);
    if (vars.empty()) {
      blocks_.erase(blocks_.begin() + static_cast<std::ptrdiff_t>(b));
      if (b > 0 && b < blocks_.size() && blocks_[b - 1].quant == blocks_[b].quant) {
        auto& prev = blocks_[b - 1].vars;
        prev.insert(prev.end(), blocks_[b].vars.begin(), blocks_[b].vars.end());
        blocks_.erase(blocks_.begin() + static_cast<std::ptrdiff_t>(b));
      }
    }
    break;
  }
  pos_[v] = 0;
  --num_vars_;
}

Quantifier Prefix::quant(Var v) const {
  if (!contains(v)) throw FormulaError("variable " + std::to_string(v) + " not in prefix");
  return quant_[v];
}

std::uint64_t Prefix::position(Var v) const {
  if (!contains(v)) throw FormulaError("variable " + std::to_string(v) + " not in prefix");
  return pos_[v];
}

std::size_t Prefix::block_index(Var v) const {
  const std::uint64_t pos = position(v);
  // positions grow along the prefix, so the owning block is the last one starting at or before pos
  auto it = std::upper_bound(blocks_.begin(), blocks_.end(), pos,
                             [&](std::uint64_t p, const QuantBlock& b) { return p < pos_[b.vars.front()]; });
  return static_cast<std::size_t>(it - blocks_.begin()) - 1;
}

std::vector<Var> Prefix::vars_in_order() const {
  std::vector<Var> out;
  out.reserve(num_vars_);
  for (const auto& b : blocks_) out.insert(out.end(), b.vars.begin(), b.vars.end());
  return out;
}

Var Prefix::max_var() const {
  Var m = 0;
  for (const auto& b : blocks_)
    for (Var v : b.vars) m = std::max(m, v);
  return m;
}

bool literal_less(const Prefix& p, Lit l1, Lit l2) { return p.less(l1, l2); }

// ---------------------------------------------------------------------------
// Formula

ClauseId Formula::add_clause(LitVec lits) {
  if (!normalize_clause(lits)) throw FormulaError("tautologous clause " + to_string(lits));
  for (Lit l : lits) {
    if (!prefix_.contains(l.var()))
      throw FormulaError("variable " + std::to_string(l.var()) + " not in prefix");
  }
  const auto id = static_cast<ClauseId>(store_.size() + 1);
  for (Lit l : lits) {
    if (occ_.size() <= l.code()) occ_.resize((l.code() | 1u) + 1);
    occ_[l.code()].push_back(id);
  }
  store_.push_back(std::move(lits));
  live_.push_back(1);
  ++num_live_;
  return id;
}

void Formula::remove_clause(ClauseId id) {
  if (!is_live(id)) throw FormulaError("clause " + std::to_string(id) + " is not live");
  live_[id - 1] = 0;
  --num_live_;
  for (Lit l : store_[id - 1]) {
    auto& list = occ_[l.code()];
    auto it = std::find(list.begin(), list.end(), id);
    *it = list.back();
    list.pop_back();
  }
}

const LitVec& Formula::lits(ClauseId id) const {
  if (!exists(id)) throw FormulaError("unknown clause id " + std::to_string(id));
  return store_[id - 1];
}

std::vector<ClauseId> Formula::live_ids() const {
  std::vector<ClauseId> ids;
  ids.reserve(num_live_);
  for (std::size_t i = 0; i < live_.size(); ++i)
    if (live_[i]) ids.push_back(static_cast<ClauseId>(i + 1));
  return ids;
}

const std::vector<ClauseId>& Formula::occurrences(Lit l) const {
  static const std::vector<ClauseId> kNone;
  return l.code() < occ_.size() ? occ_[l.code()] : kNone;
}

std::size_t Formula::total_literals() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < live_.size(); ++i)
    if (live_[i]) n += store_[i].size();
  return n;
}

// ---------------------------------------------------------------------------
// Assignment

void Assignment::set(Var v, bool value) {
  if (vals_.size() <= v) vals_.resize(v + 1, -1);
  vals_[v] = value ? 1 : 0;
}

void Assignment::unset(Var v) {
  if (v < vals_.size()) vals_[v] = -1;
}

std::optional<bool> Assignment::get(Var v) const {
  if (v >= vals_.size() || vals_[v] < 0) return std::nullopt;
  return vals_[v] == 1;
}

bool Assignment::value(Lit l) const {
  auto v = get(l.var());
  if (!v) throw FormulaError("variable " + std::to_string(l.var()) + " unassigned");
  return *v != l.is_negated();
}

bool Assignment::complete_for(const Prefix& p) const {
  for (Var v : p.vars_in_order())
    if (!get(v)) return false;
  return true;
}

bool eval_matrix(const Formula& f, const Assignment& a) {
  if (!a.complete_for(f.prefix())) throw FormulaError("incomplete assignment");
  for (ClauseId id : f.live_ids()) {
    const auto& c = f.lits(id);
    if (std::none_of(c.begin(), c.end(), [&](Lit l) { return a.value(l); })) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// QDIMACS

namespace {

std::vector<long> read_ints(std::istringstream& ss, std::size_t line_no) {
  std::vector<long> out;
  std::string tok;
  while (ss >> tok) {
    char* end = nullptr;
    long v = std::strtol(tok.c_str(), &end, 10);
    if (end == tok.c_str() || *end != '\0') throw ParseError(line_no, "expected integer, got '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace

Formula parse_qdimacs(std::istream& in, std::vector<std::string>* warnings) {
  auto warn = [&](std::size_t line, const std::string& msg) {
    if (warnings) warnings->push_back("line " + std::to_string(line) + ": " + msg);
  };

  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  bool in_clauses = false;
  long declared_vars = 0;
  long declared_clauses = 0;
  Var max_var = 0;
  std::vector<std::pair<Quantifier, std::vector<Var>>> blocks;
  std::vector<char> quantified;
  std::vector<LitVec> clauses;
  LitVec pending;
  std::size_t pending_line = 0;

  auto mark_quantified = [&](Var v, std::size_t ln) {
    if (quantified.size() <= v) quantified.resize(v + 1, 0);
    if (quantified[v]) throw ParseError(ln, "variable " + std::to_string(v) + " quantified twice");
    quantified[v] = 1;
  };
  auto check_var = [&](Var v, std::size_t ln) {
    if (static_cast<long>(v) > declared_vars && v > max_var) {
      warn(ln, "variable " + std::to_string(v) + " exceeds declared maximum " + std::to_string(declared_vars));
    }
    max_var = std::max(max_var, v);
  };

  while (std::getline(in, line)) {
    ++line_no;
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    char c = line[first];
    if (c == 'c') continue;
    std::istringstream ss(line.substr(first));
    if (c == 'p') {
      if (have_header) throw ParseError(line_no, "duplicate header");
      std::string p, cnf;
      ss >> p >> cnf;
      if (cnf != "cnf") throw ParseError(line_no, "expected 'p cnf'");
      auto nums = read_ints(ss, line_no);
      if (nums.size() != 2 || nums[0] < 0 || nums[1] < 0) throw ParseError(line_no, "malformed header");
      declared_vars = nums[0];
      declared_clauses = nums[1];
      max_var = static_cast<Var>(declared_vars);
      have_header = true;
      continue;
    }
    if (!have_header) throw ParseError(line_no, "missing 'p cnf' header");
    if (c == 'a' || c == 'e') {
      if (in_clauses) throw ParseError(line_no, "quantifier line after clauses");
      std::string q;
      ss >> q;
      if (q != "a" && q != "e") throw ParseError(line_no, "malformed quantifier line");
      auto nums = read_ints(ss, line_no);
      if (nums.empty() || nums.back() != 0) throw ParseError(line_no, "quantifier line not terminated by 0");
      nums.pop_back();
      std::vector<Var> vars;
      for (long n : nums) {
        if (n <= 0) throw ParseError(line_no, "invalid variable " + std::to_string(n) + " in prefix");
        Var v = static_cast<Var>(n);
        check_var(v, line_no);
        mark_quantified(v, line_no);
        vars.push_back(v);
      }
      Quantifier quant = q == "a" ? Quantifier::kForall : Quantifier::kExists;
      if (vars.empty()) continue;
      if (!blocks.empty() && blocks.back().first == quant) {
        blocks.back().second.insert(blocks.back().second.end(), vars.begin(), vars.end());
      } else {
        blocks.emplace_back(quant, std::move(vars));
      }
      continue;
    }
    in_clauses = true;
    auto nums = read_ints(ss, line_no);
    if (pending.empty()) pending_line = line_no;
    for (long n : nums) {
      if (n == 0) {
        clauses.push_back(std::move(pending));
        pending.clear();
        pending_line = line_no;
        continue;
      }
      Var v = static_cast<Var>(std::labs(n));
      check_var(v, line_no);
      pending.push_back(Lit::from_dimacs(n));
    }
  }
  if (!have_header) throw ParseError(line_no, "missing 'p cnf' header");
  if (!pending.empty()) throw ParseError(pending_line, "clause not terminated by 0");
  if (static_cast<long>(clauses.size()) != declared_clauses) {
    warn(line_no, "header declares " + std::to_string(declared_clauses) + " clauses, found " +
                      std::to_string(clauses.size()));
  }

  // Free variables go into an outermost existential block.
  std::vector<char> seen(max_var + 1, 0);
  std::vector<Var> free_vars;
  for (const auto& cl : clauses) {
    for (Lit l : cl) {
      Var v = l.var();
      bool bound = v < quantified.size() && quantified[v];
      if (!bound && !seen[v]) {
        seen[v] = 1;
        free_vars.push_back(v);
      }
    }
  }
  std::sort(free_vars.begin(), free_vars.end());

  Formula f;
  f.set_max_var(max_var);
  if (!free_vars.empty()) {
    if (!blocks.empty() && blocks.front().first == Quantifier::kExists) {
      auto& front = blocks.front().second;
      front.insert(front.begin(), free_vars.begin(), free_vars.end());
    } else {
      blocks.insert(blocks.begin(), {Quantifier::kExists, free_vars});
    }
  }
  for (const auto& [q, vars] : blocks) f.prefix().add_block(q, vars);
  for (auto& cl : clauses) {
    if (!normalize_clause(cl)) continue;
    f.add_clause(std::move(cl));
  }
  return f;
}

Formula parse_qdimacs_string(const std::string& text, std::vector<std::string>* warnings) {
  std::istringstream ss(text);
  return parse_qdimacs(ss, warnings);
}

void write_qdimacs(std::ostream& out, const Formula& f) {
  Var max_var = std::max(f.max_var(), f.prefix().max_var());
  out << "p cnf " << max_var << ' ' << f.num_clauses() << '\n';
  for (const auto& b : f.prefix().blocks()) {
    out << (b.quant == Quantifier::kForall ? 'a' : 'e');
    for (Var v : b.vars) out << ' ' << v;
    out << " 0\n";
  }
  for (ClauseId id : f.live_ids()) {
    for (Lit l : f.lits(id)) out << l.dimacs() << ' ';
    out << "0\n";
  }
}

std::string to_qdimacs(const Formula& f) {
  std::ostringstream ss;
  write_qdimacs(ss, f);
  return ss.str();
}

bool isomorphic(const Formula& a, const Formula& b) {
  if (!(a.prefix() == b.prefix())) return false;
  std::map<LitVec, long> count;
  for (ClauseId id : a.live_ids()) ++count[a.lits(id)];
  for (ClauseId id : b.live_ids()) --count[b.lits(id)];
  return std::all_of(count.begin(), count.end(), [](const auto& kv) { return kv.second == 0; });
}

std::uint64_t digest(const Formula& f) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : to_qdimacs(f)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string digest_hex(std::uint64_t d) {
  static const char* kHex = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = kHex[d & 0xf];
    d >>= 4;
  }
  return s;
}

}  // namespace qbfcert
