#include "qbfcert/trace.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>
#include <unordered_map>

namespace qbfcert {

bool resolve(std::span<const Lit> a, std::span<const Lit> b, Lit pivot, LitVec& out) {
  if (!contains_lit(a, pivot) || !contains_lit(b, ~pivot)) return false;
  out.clear();
  for (Lit l : a)
    if (l != pivot) out.push_back(l);
  for (Lit l : b)
    if (l != ~pivot) out.push_back(l);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].var() == pivot.var()) return false;
    if (i > 0 && out[i].var() == out[i - 1].var()) return false;
  }
  return true;
}

bool blocked_witnesses(const Formula& f, std::span<const Lit> clause, Lit lit, ClauseId self, LitVec& witnesses) {
  const Prefix& p = f.prefix();
  witnesses.clear();
  std::vector<char> used(clause.size(), 0);
  for (ClauseId d : f.occurrences(~lit)) {
    if (d == self) continue;
    const LitVec& other = f.lits(d);
    bool clash = false;
    for (std::size_t i = 0; i < clause.size(); ++i) {
      Lit k = clause[i];
      if (k == lit || !p.less(k, lit)) continue;
      if (contains_lit(other, ~k)) {
        used[i] = 1;
        clash = true;
      }
    }
    if (!clash) return false;
  }
  for (std::size_t i = 0; i < clause.size(); ++i)
    if (used[i]) witnesses.push_back(clause[i]);
  return true;
}

namespace {

// Variables of one block commute, so VE reads the order with x moved to the
// end of its block: only later blocks count as "after x".
bool one_side(const Prefix& p, Var x, const std::vector<ClauseRecord>& side, const std::vector<ClauseRecord>& other) {
  const std::size_t bx = p.block_index(x);
  for (const auto& c : side) {
    bool has_later =
        std::any_of(c.lits.begin(), c.lits.end(), [&](Lit k) { return p.block_index(k.var()) > bx; });
    if (!has_later) continue;
    for (const auto& d : other) {
      bool clash = std::any_of(c.lits.begin(), c.lits.end(), [&](Lit z) {
        return z.var() != x && p.block_index(z.var()) <= bx && contains_lit(d.lits, ~z);
      });
      if (!clash) return false;
    }
  }
  return true;
}

std::string step_label(std::size_t index, const TraceStep& s) {
  return std::string("step ") + std::to_string(index) + " (" + step_keyword(s) + ")";
}

[[noreturn]] void fail(const std::string& msg) { throw TraceError(msg); }

void require_live(const Formula& f, ClauseId id) {
  if (!f.is_live(id)) fail("clause " + std::to_string(id) + " is not live");
}

void require_record(const Formula& f, const ClauseRecord& r) {
  require_live(f, r.id);
  if (f.lits(r.id) != r.lits) fail("literal mismatch for clause " + std::to_string(r.id));
}

std::set<ClauseId> occurrence_set(const Formula& f, Lit l) {
  const auto& occ = f.occurrences(l);
  return {occ.begin(), occ.end()};
}

std::set<ClauseId> id_set(const std::vector<ClauseRecord>& recs) {
  std::set<ClauseId> s;
  for (const auto& r : recs) s.insert(r.id);
  return s;
}

/// Literals reachable from `from` in the implication graph of `clauses`.
bool reaches(const std::vector<ClauseRecord>& clauses, Lit from, Lit to) {
  std::unordered_map<std::uint32_t, std::vector<Lit>> succ;
  for (const auto& c : clauses) {
    if (c.lits.size() != 2) continue;
    succ[(~c.lits[0]).code()].push_back(c.lits[1]);
    succ[(~c.lits[1]).code()].push_back(c.lits[0]);
  }
  std::set<Lit> seen{from};
  std::deque<Lit> queue{from};
  while (!queue.empty()) {
    Lit cur = queue.front();
    queue.pop_front();
    if (cur == to) return true;
    auto it = succ.find(cur.code());
    if (it == succ.end()) continue;
    for (Lit n : it->second)
      if (seen.insert(n).second) queue.push_back(n);
  }
  return false;
}

struct StepApplier {
  Formula& f;

  void operator()(const AddResolvent& s) {
    require_live(f, s.antecedent1);
    require_live(f, s.antecedent2);
    LitVec r;
    if (!resolve(f.lits(s.antecedent1), f.lits(s.antecedent2), s.pivot, r)) fail("resolution undefined");
    if (r != s.lits) fail("recorded resolvent " + to_string(s.lits) + " differs from " + to_string(r));
    if (s.new_id != f.next_clause_id()) fail("resolvent id " + std::to_string(s.new_id) + " out of sequence");
    f.add_clause(r);
  }

  void operator()(const DeleteSubsumed& s) {
    require_live(f, s.victim);
    require_live(f, s.witness);
    if (s.victim == s.witness) fail("clause cannot subsume itself");
    if (!is_subset(f.lits(s.witness), f.lits(s.victim))) fail("witness does not subsume victim");
    f.remove_clause(s.victim);
  }

  void operator()(const DeleteBlocked& s) {
    require_record(f, {s.victim, s.victim_lits});
    if (!contains_lit(s.victim_lits, s.blocking_lit)) fail("blocking literal not in clause");
    if (!f.prefix().is_existential(s.blocking_lit)) fail("blocking literal is universal");
    LitVec w;
    if (!blocked_witnesses(f, s.victim_lits, s.blocking_lit, s.victim, w)) fail("literal is not blocked");
    if (w != s.witnesses) fail("witness set " + to_string(s.witnesses) + " differs from " + to_string(w));
    f.remove_clause(s.victim);
  }

  void operator()(const RemoveUniversalLit& s) {
    if (!f.prefix().is_universal(s.lit)) fail("literal is not universal");
    if (!f.occurrences(~s.lit).empty()) fail("literal is not pure");
    std::set<ClauseId> recorded;
    for (const auto& a : s.affected) recorded.insert(a.before);
    if (recorded != occurrence_set(f, s.lit)) fail("affected clauses differ from occurrences");
    for (const auto& a : s.affected) {
      LitVec expect = f.lits(a.before);
      expect.erase(std::find(expect.begin(), expect.end(), s.lit));
      if (expect != a.lits_after) fail("rewritten clause mismatch for " + std::to_string(a.before));
    }
    for (const auto& a : s.affected) f.remove_clause(a.before);
    for (const auto& a : s.affected) {
      if (a.after != f.next_clause_id()) fail("rewritten clause id out of sequence");
      f.add_clause(a.lits_after);
    }
  }

  void operator()(const DeleteVE& s) {
    if (!f.prefix().is_existential(s.var)) fail("eliminated variable is not existential");
    for (const auto& r : s.pos_clauses) {
      require_record(f, r);
      if (!contains_lit(r.lits, Lit::positive(s.var))) fail("positive list entry lacks the variable");
    }
    for (const auto& r : s.neg_clauses) {
      require_record(f, r);
      if (!contains_lit(r.lits, Lit::negative(s.var))) fail("negative list entry lacks the variable");
    }
    if (id_set(s.pos_clauses) != occurrence_set(f, Lit::positive(s.var)) ||
        id_set(s.neg_clauses) != occurrence_set(f, Lit::negative(s.var)))
      fail("recorded clause lists do not partition the occurrences");
    if (!ve_side_condition(f.prefix(), s.var, s.pos_clauses, s.neg_clauses)) fail("side-condition violated");
    for (const auto& r : s.pos_clauses) f.remove_clause(r.id);
    for (const auto& r : s.neg_clauses) f.remove_clause(r.id);
  }

  void operator()(const ElsSubst& s) {
    const Prefix& p = f.prefix();
    const Lit r = s.representative;
    if (!contains_lit(s.component, r)) fail("representative outside component");
    for (std::size_t i = 1; i < s.component.size(); ++i)
      if (s.component[i].var() == s.component[i - 1].var()) fail("component holds complementary literals");
    std::size_t universals = 0;
    for (Lit l : s.component) {
      if (p.is_universal(l)) ++universals;
      if (l != r && !p.less(r, l)) fail("representative is not the outermost literal");
    }
    if (universals > 1) fail("component holds two universal literals");
    if (universals == 1 && !p.is_universal(r)) fail("existential literal precedes universal literal");
    for (const auto& b : s.binary_clauses) {
      require_record(f, b);
      if (b.lits.size() != 2) fail("recorded implication clause is not binary");
    }
    for (Lit l : s.component) {
      if (l == r) continue;
      if (!reaches(s.binary_clauses, l, r) || !reaches(s.binary_clauses, r, l))
        fail("literal " + std::to_string(l.dimacs()) + " not equivalent to representative");
    }
    auto substitute = [&](Lit l) {
      for (Lit m : s.component) {
        if (m == r) continue;
        if (l == m) return r;
        if (l == ~m) return ~r;
      }
      return l;
    };
    std::set<ClauseId> touched;
    for (Lit m : s.component) {
      if (m == r) continue;
      for (ClauseId id : f.occurrences(m)) touched.insert(id);
      for (ClauseId id : f.occurrences(~m)) touched.insert(id);
    }
    std::set<ClauseId> recorded;
    for (const auto& rw : s.rewrites) {
      require_record(f, {rw.old_id, rw.old_lits});
      recorded.insert(rw.old_id);
      LitVec expect;
      for (Lit l : rw.old_lits) expect.push_back(substitute(l));
      bool ok = normalize_clause(expect);
      if (!ok && rw.new_id != 0) fail("tautologous rewrite kept");
      if (ok && (rw.new_id == 0 || expect != rw.new_lits)) fail("rewrite mismatch for clause " + std::to_string(rw.old_id));
    }
    if (recorded != touched) fail("rewrites do not cover the component's occurrences");
    for (const auto& rw : s.rewrites) f.remove_clause(rw.old_id);
    for (const auto& rw : s.rewrites) {
      if (rw.new_id == 0) continue;
      if (rw.new_id != f.next_clause_id()) fail("rewritten clause id out of sequence");
      f.add_clause(rw.new_lits);
    }
  }

  void operator()(const ElsRefute& s) {
    const Prefix& p = f.prefix();
    for (const auto& b : s.binary_clauses) {
      require_record(f, b);
      if (b.lits.size() != 2) fail("recorded implication clause is not binary");
    }
    const auto& pl = s.pivot_literals;
    auto equivalent = [&](Lit a, Lit b) { return reaches(s.binary_clauses, a, b) && reaches(s.binary_clauses, b, a); };
    switch (s.falsity_case) {
      case 1:
        if (pl.size() != 2 || pl[0] == pl[1] || !p.is_universal(pl[0]) || !p.is_universal(pl[1]))
          fail("case 1 needs two distinct universal literals");
        if (!equivalent(pl[0], pl[1])) fail("case 1 literals not equivalent");
        break;
      case 2:
        if (pl.size() != 2 || !p.is_existential(pl[0]) || !p.is_universal(pl[1]) || !p.less(pl[0], pl[1]))
          fail("case 2 needs an existential literal preceding a universal literal");
        if (!equivalent(pl[0], pl[1])) fail("case 2 literals not equivalent");
        break;
      case 3:
        if (pl.size() != 1 || !p.is_existential(pl[0])) fail("case 3 needs one existential literal");
        if (!equivalent(pl[0], ~pl[0])) fail("case 3 literals not equivalent");
        break;
      default:
        fail("unknown falsity case");
    }
  }

  void operator()(const DropVar& s) {
    if (!f.prefix().contains(s.var)) fail("variable " + std::to_string(s.var) + " not in prefix");
    if (f.occurrence_count(s.var) != 0) fail("variable " + std::to_string(s.var) + " still occurs");
    f.prefix().remove_var(s.var);
  }
};

}  // namespace

bool ve_side_condition(const Prefix& p, Var x, const std::vector<ClauseRecord>& pos,
                       const std::vector<ClauseRecord>& neg) {
  return one_side(p, x, pos, neg) && one_side(p, x, neg, pos);
}

void apply_step(Formula& f, const TraceStep& step) {
  try {
    std::visit(StepApplier{f}, step);
  } catch (const FormulaError& e) {
    throw TraceError(e.what());
  }
}

Formula replay(const Formula& initial, const Trace& trace) {
  if (digest(initial) != trace.digest_in) throw TraceError("initial formula digest mismatch");
  Formula f = initial;
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    try {
      apply_step(f, trace.steps[i]);
    } catch (const TraceError& e) {
      throw TraceError(step_label(i, trace.steps[i]) + ": " + e.what());
    }
  }
  if (digest(f) != trace.digest_out) throw TraceError("final formula digest mismatch");
  return f;
}

const char* step_keyword(const TraceStep& step) {
  static constexpr const char* kNames[] = {"RES", "SUBS", "BLOCK", "UPURE", "VE", "ELSSUB", "ELSREF", "DROP"};
  return kNames[step.index()];
}

// ---------------------------------------------------------------------------
// Text format

namespace {

void put_lits(std::ostream& out, const LitVec& lits) {
  for (Lit l : lits) out << ' ' << l.dimacs();
  out << " 0";
}

void put_records(std::ostream& out, const std::vector<ClauseRecord>& recs) {
  out << ' ' << recs.size();
  for (const auto& r : recs) {
    out << ' ' << r.id;
    put_lits(out, r.lits);
  }
}

struct StepWriter {
  std::ostream& out;
  void operator()(const AddResolvent& s) {
    out << "RES " << s.new_id << ' ' << s.antecedent1 << ' ' << s.antecedent2 << ' ' << s.pivot.dimacs();
    put_lits(out, s.lits);
  }
  void operator()(const DeleteSubsumed& s) { out << "SUBS " << s.victim << ' ' << s.witness; }
  void operator()(const DeleteBlocked& s) {
    out << "BLOCK " << s.victim << ' ' << s.blocking_lit.dimacs();
    put_lits(out, s.victim_lits);
    put_lits(out, s.witnesses);
  }
  void operator()(const RemoveUniversalLit& s) {
    out << "UPURE " << s.lit.dimacs() << ' ' << s.affected.size();
    for (const auto& a : s.affected) {
      out << ' ' << a.before << ' ' << a.after;
      put_lits(out, a.lits_after);
    }
  }
  void operator()(const DeleteVE& s) {
    out << "VE " << s.var;
    put_records(out, s.pos_clauses);
    put_records(out, s.neg_clauses);
  }
  void operator()(const ElsSubst& s) {
    out << "ELSSUB " << s.representative.dimacs();
    put_lits(out, s.component);
    put_records(out, s.binary_clauses);
    out << ' ' << s.rewrites.size();
    for (const auto& rw : s.rewrites) {
      out << ' ' << rw.old_id;
      put_lits(out, rw.old_lits);
      out << ' ' << rw.new_id;
      put_lits(out, rw.new_lits);
    }
  }
  void operator()(const ElsRefute& s) {
    out << "ELSREF " << s.falsity_case;
    put_lits(out, s.pivot_literals);
    put_records(out, s.binary_clauses);
  }
  void operator()(const DropVar& s) { out << "DROP " << s.var; }
};

class LineReader {
 public:
  LineReader(const std::string& line, std::size_t line_no) : ss_(line), line_no_(line_no) {}

  long integer() {
    std::string tok;
    if (!(ss_ >> tok)) throw ParseError(line_no_, "unexpected end of line");
    char* end = nullptr;
    long v = std::strtol(tok.c_str(), &end, 10);
    if (end == tok.c_str() || *end != '\0') throw ParseError(line_no_, "expected integer, got '" + tok + "'");
    return v;
  }
  std::uint32_t unsigned_int() {
    long v = integer();
    if (v < 0) throw ParseError(line_no_, "expected non-negative integer");
    return static_cast<std::uint32_t>(v);
  }
  Lit lit() {
    long v = integer();
    if (v == 0) throw ParseError(line_no_, "expected non-zero literal");
    return Lit::from_dimacs(v);
  }
  LitVec lits() {
    LitVec out;
    for (long v = integer(); v != 0; v = integer()) out.push_back(Lit::from_dimacs(v));
    return out;
  }
  std::vector<ClauseRecord> records() {
    std::vector<ClauseRecord> out(unsigned_int());
    for (auto& r : out) {
      r.id = unsigned_int();
      r.lits = lits();
    }
    return out;
  }
  void finish() {
    std::string tok;
    if (ss_ >> tok) throw ParseError(line_no_, "trailing token '" + tok + "'");
  }

 private:
  std::istringstream ss_;
  std::size_t line_no_;
};

TraceStep parse_step(const std::string& keyword, LineReader& in, std::size_t line_no) {
  if (keyword == "RES") {
    AddResolvent s;
    s.new_id = in.unsigned_int();
    s.antecedent1 = in.unsigned_int();
    s.antecedent2 = in.unsigned_int();
    s.pivot = in.lit();
    s.lits = in.lits();
    return s;
  }
  if (keyword == "SUBS") {
    DeleteSubsumed s;
    s.victim = in.unsigned_int();
    s.witness = in.unsigned_int();
    return s;
  }
  if (keyword == "BLOCK") {
    DeleteBlocked s;
    s.victim = in.unsigned_int();
    s.blocking_lit = in.lit();
    s.victim_lits = in.lits();
    s.witnesses = in.lits();
    return s;
  }
  if (keyword == "UPURE") {
    RemoveUniversalLit s;
    s.lit = in.lit();
    s.affected.resize(in.unsigned_int());
    for (auto& a : s.affected) {
      a.before = in.unsigned_int();
      a.after = in.unsigned_int();
      a.lits_after = in.lits();
    }
    return s;
  }
  if (keyword == "VE") {
    DeleteVE s;
    s.var = in.unsigned_int();
    s.pos_clauses = in.records();
    s.neg_clauses = in.records();
    return s;
  }
  if (keyword == "ELSSUB") {
    ElsSubst s;
    s.representative = in.lit();
    s.component = in.lits();
    s.binary_clauses = in.records();
    s.rewrites.resize(in.unsigned_int());
    for (auto& rw : s.rewrites) {
      rw.old_id = in.unsigned_int();
      rw.old_lits = in.lits();
      rw.new_id = in.unsigned_int();
      rw.new_lits = in.lits();
    }
    return s;
  }
  if (keyword == "ELSREF") {
    ElsRefute s;
    s.falsity_case = static_cast<int>(in.integer());
    s.pivot_literals = in.lits();
    s.binary_clauses = in.records();
    return s;
  }
  if (keyword == "DROP") {
    DropVar s;
    s.var = in.unsigned_int();
    return s;
  }
  throw ParseError(line_no, "unknown step keyword '" + keyword + "'");
}

std::uint64_t parse_hex(const std::string& s, std::size_t line_no) {
  if (s.empty() || s.size() > 16) throw ParseError(line_no, "malformed digest");
  std::uint64_t v = 0;
  for (char c : s) {
    int d;
    if (c >= '0' && c <= '9') d = c - '0';
    else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
    else throw ParseError(line_no, "malformed digest");
    v = v * 16 + static_cast<std::uint64_t>(d);
  }
  return v;
}

}  // namespace

void write_trace(std::ostream& out, const Trace& t) {
  out << "t qbf-prep-trace 1\n";
  out << "digest-in " << digest_hex(t.digest_in) << '\n';
  out << "digest-out " << digest_hex(t.digest_out) << '\n';
  for (const auto& s : t.steps) {
    std::visit(StepWriter{out}, s);
    out << '\n';
  }
}

std::string to_string(const Trace& t) {
  std::ostringstream ss;
  write_trace(ss, t);
  return ss.str();
}

Trace parse_trace(std::istream& in) {
  Trace t;
  std::string line;
  std::size_t line_no = 0;
  int header = 0;  // 0: expect magic, 1: digest-in, 2: digest-out, 3: steps
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (line[0] == 'c') continue;
    std::istringstream ss(line);
    std::string keyword;
    ss >> keyword;
    if (header == 0) {
      std::string kind, version;
      ss >> kind >> version;
      if (keyword != "t" || kind != "qbf-prep-trace" || version != "1")
        throw ParseError(line_no, "expected 't qbf-prep-trace 1'");
      header = 1;
      continue;
    }
    if (header == 1 || header == 2) {
      std::string want = header == 1 ? "digest-in" : "digest-out";
      std::string hex, extra;
      ss >> hex;
      if (keyword != want || (ss >> extra)) throw ParseError(line_no, "expected '" + want + " <hex>'");
      (header == 1 ? t.digest_in : t.digest_out) = parse_hex(hex, line_no);
      ++header;
      continue;
    }
    LineReader reader(line.substr(line.find(keyword) + keyword.size()), line_no);
    try {
      t.steps.push_back(parse_step(keyword, reader, line_no));
    } catch (const FormulaError& e) {
      throw ParseError(line_no, e.what());
    }
    reader.finish();
  }
  if (header < 3) throw ParseError(line_no, "truncated trace header");
  return t;
}

Trace parse_trace_string(const std::string& text) {
  std::istringstream ss(text);
  return parse_trace(ss);
}

}  // namespace qbfcert
