/* Copyright 2026 The ddlpo Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "ddl/extension.hpp"
#include "ddl/literal.hpp"
#include "ddl/reduct.hpp"
#include "ddl/theory.hpp"

namespace ddl {

/// Raised when a reduct computation re-enters itself. Reducts strictly shrink
/// the theory, so this signals an internal error rather than bad input.
class DependencyCycle : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Verdict { Proven, Refuted, Undetermined };

enum class VerdictReason {
  AllIndependent,     // every conjunct is an obligation independent of the others' violations
  ConjunctRefuted,    // some conjunct is refuted as an obligation
  NotIndependent,     // some conjunct is not provable once the others' violations are removed
  ConjunctUndecided,  // some conjunct has no settled status
  DependencyCycle,    // the conjunction feeds its own conjuncts and no stage settles it
};

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Proven: return "proven";
    case Verdict::Refuted: return "refuted";
    case Verdict::Undetermined: return "undetermined";
  }
  return "?";
}

struct ConjunctRecord {
  Literal conjunct;
  bool obligation_pos = false;
  bool obligation_neg = false;
  bool reduct_is_self = false;      // removing the other violations leaves the theory unchanged
  std::optional<bool> in_reduct;    // conjunct in +dO of the reduct; empty when not settled
};

struct EvaluationVerdict {
  Conjunction target;
  Verdict verdict = Verdict::Undetermined;
  VerdictReason reason = VerdictReason::ConjunctUndecided;
  std::optional<Literal> deciding;
  std::vector<ConjunctRecord> conjuncts;

  [[nodiscard]] std::string explain() const {
    std::string out = target.str() + ": " + verdict_name(verdict);
    std::string who = deciding ? deciding->str() : std::string("?");
    switch (reason) {
      case VerdictReason::AllIndependent: out += " (every conjunct is independent of the other violations)"; break;
      case VerdictReason::ConjunctRefuted: out += " (" + who + " is refuted as an obligation)"; break;
      case VerdictReason::NotIndependent:
        out += " (" + who + " is not provable without the violations of the other conjuncts)";
        break;
      case VerdictReason::ConjunctUndecided: out += " (" + who + " has no settled status)"; break;
      case VerdictReason::DependencyCycle: out += " (" + who + " depends on this conjunction)"; break;
    }
    return out;
  }
};

enum class SetTag { FactualPos, FactualNeg, OblPos, OblNeg, ConjPos, ConjNeg };

inline const char* set_tag_name(SetTag t) {
  switch (t) {
    case SetTag::FactualPos: return "+d";
    case SetTag::FactualNeg: return "-d";
    case SetTag::OblPos: return "+dO";
    case SetTag::OblNeg: return "-dO";
    case SetTag::ConjPos: return "+dO";
    case SetTag::ConjNeg: return "-dO";
  }
  return "?";
}

using Target = std::variant<Literal, Conjunction>;

inline std::string target_str(const Target& t) {
  return std::holds_alternative<Literal>(t) ? std::get<Literal>(t).str()
                                            : std::get<Conjunction>(t).str();
}

struct StageEntry {
  SetTag set = SetTag::FactualPos;
  Target target;
  std::string justification;
};

/// E_0, E_1, ..., E_k stored as E_0 plus the additions of each stage.
class StageTrace {
 public:
  StageTrace() = default;
  StageTrace(Extension initial, std::vector<std::vector<StageEntry>> deltas)
      : initial_(std::move(initial)), deltas_(std::move(deltas)) {
    for (const auto& f : initial_.factual_pos) where_[{SetTag::FactualPos, f.str()}] = {0, 0};
    fixpoint_ = initial_;
    for (std::size_t i = 0; i < deltas_.size(); ++i) {
      for (std::size_t j = 0; j < deltas_[i].size(); ++j) {
        const auto& e = deltas_[i][j];
        where_.emplace(std::make_pair(e.set, target_str(e.target)), std::make_pair(i + 1, j));
        add(fixpoint_, e);
      }
    }
  }

  /// Number of stored extensions, E_0 through the fixpoint.
  [[nodiscard]] std::size_t size() const { return deltas_.size() + 1; }
  [[nodiscard]] const Extension& fixpoint() const { return fixpoint_; }
  [[nodiscard]] const Extension& initial() const { return initial_; }

  [[nodiscard]] Extension stage(std::size_t i) const {
    if (i >= size()) throw std::out_of_range("stage " + std::to_string(i) + " beyond fixpoint");
    Extension e = initial_;
    for (std::size_t s = 0; s < i; ++s)
      for (const auto& entry : deltas_[s]) add(e, entry);
    return e;
  }

  /// Entries added when moving from E_{i-1} to E_i (i >= 1).
  [[nodiscard]] const std::vector<StageEntry>& delta(std::size_t i) const { return deltas_.at(i - 1); }

  [[nodiscard]] std::optional<std::size_t> stage_of(SetTag set, const Target& t) const {
    auto it = where_.find({normalize(set, t), target_str(t)});
    if (it == where_.end()) return std::nullopt;
    return it->second.first;
  }

  /// The entry that added `t`; nullptr for facts of E_0 and absent targets.
  [[nodiscard]] const StageEntry* entry(SetTag set, const Target& t) const {
    auto it = where_.find({normalize(set, t), target_str(t)});
    if (it == where_.end() || it->second.first == 0) return nullptr;
    return &deltas_[it->second.first - 1][it->second.second];
  }

 private:
  static SetTag normalize(SetTag s, const Target& t) {
    if (std::holds_alternative<Conjunction>(t)) {
      if (s == SetTag::OblPos) return SetTag::ConjPos;
      if (s == SetTag::OblNeg) return SetTag::ConjNeg;
    }
    return s;
  }

  static void add(Extension& e, const StageEntry& entry) {
    switch (entry.set) {
      case SetTag::FactualPos: e.factual_pos.insert(std::get<Literal>(entry.target)); break;
      case SetTag::FactualNeg: e.factual_neg.insert(std::get<Literal>(entry.target)); break;
      case SetTag::OblPos: e.obligation_pos.insert(std::get<Literal>(entry.target)); break;
      case SetTag::OblNeg: e.obligation_neg.insert(std::get<Literal>(entry.target)); break;
      case SetTag::ConjPos: e.conj_pos.insert(std::get<Conjunction>(entry.target)); break;
      case SetTag::ConjNeg: e.conj_neg.insert(std::get<Conjunction>(entry.target)); break;
    }
  }

  Extension initial_;
  Extension fixpoint_;
  std::vector<std::vector<StageEntry>> deltas_;
  std::map<std::pair<SetTag, std::string>, std::pair<std::size_t, std::size_t>> where_;
};

/// A conjunction in some rule body whose status could not be settled because
/// removing the other conjuncts' violations leaves the theory unchanged while
/// `conjunct` itself is still open.
struct CycleDiagnostic {
  Conjunction conjunction;
  Literal conjunct;
  std::set<Literal> removed;  // the violation set whose reduct is the theory itself

  [[nodiscard]] std::string message() const {
    std::string rm;
    for (const auto& l : removed) rm += (rm.empty() ? "" : ", ") + l.str();
    return "conjunction " + conjunction.str() + " depends on its own status through " +
           conjunct.str() + " (reduct by {" + rm + "} is the theory itself)";
  }

  bool operator==(const CycleDiagnostic&) const = default;
  auto operator<=>(const CycleDiagnostic& o) const {
    if (auto c = conjunction <=> o.conjunction; c != 0) return c;
    return conjunct <=> o.conjunct;
  }
};

struct ExtensionResult {
  Extension extension;
  StageTrace trace;
  std::vector<CycleDiagnostic> cycles;
};

namespace detail {

inline constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

struct HeadOcc {
  std::uint32_t rule;
  std::uint32_t pos;  // 1-based
};

struct CompiledRule {
  std::vector<std::uint32_t> head;       // literal ids
  std::vector<std::uint32_t> superiors;  // sorted ids of rules t with t > this
  std::vector<std::pair<BodyKind, std::uint32_t>> body;  // literal id, or conjunction id
  std::uint32_t body_size = 0;
  bool prescriptive = false;
  bool defeasible = false;
};

/// Integer-indexed form of a theory. Literal id = 2 * atom + (negated ? 1 : 0),
/// so the complement of id x is x ^ 1.
struct Compiled {
  std::vector<std::string> atoms;
  std::unordered_map<std::string, std::uint32_t> atom_ids;
  std::vector<CompiledRule> rules;
  std::vector<std::string> labels;
  std::vector<std::uint32_t> facts;  // literal ids, in fact order
  std::vector<char> is_fact;         // by literal id (root theory)

  // Occurrence cells by literal id.
  std::vector<std::vector<HeadOcc>> head_c, head_o;
  std::vector<std::vector<std::uint32_t>> body_plain, body_obl, body_neg_obl;

  std::vector<Conjunction> conj_values;
  std::map<Conjunction, std::uint32_t> conj_ids;
  std::vector<std::vector<std::uint32_t>> conj_members;  // literal ids
  std::vector<std::vector<std::uint32_t>> conj_rules;    // rules with the conjunction in the body
  std::vector<char> conj_declared;
  std::vector<std::vector<std::uint32_t>> conj_of_lit;

  explicit Compiled(const Theory& t) {
    auto u = universe(t);
    for (const auto& l : u.literals) {
      if (atom_ids.emplace(l.atom, static_cast<std::uint32_t>(atoms.size())).second)
        atoms.push_back(l.atom);
    }
    std::size_t n = 2 * atoms.size();
    head_c.resize(n);
    head_o.resize(n);
    body_plain.resize(n);
    body_obl.resize(n);
    body_neg_obl.resize(n);
    conj_of_lit.resize(n);
    is_fact.assign(n, 0);
    for (const auto& f : t.facts()) {
      facts.push_back(id(f));
      is_fact[id(f)] = 1;
    }
    for (const auto& c : u.conjunctions) intern(c);
    for (const auto& q : t.queries()) conj_declared[conj_ids.at(q)] = 1;

    rules.resize(t.rules().size());
    for (std::uint32_t r = 0; r < t.rules().size(); ++r) {
      const auto& rule = t.rules()[r];
      auto& cr = rules[r];
      labels.push_back(rule.label);
      cr.prescriptive = rule.prescriptive();
      cr.defeasible = rule.defeasible();
      cr.body_size = static_cast<std::uint32_t>(rule.antecedent.size());
      for (std::uint32_t k = 1; k <= rule.head.length(); ++k) {
        auto h = id(rule.head.at(k));
        cr.head.push_back(h);
        (cr.prescriptive ? head_o : head_c)[h].push_back({r, k});
      }
      for (const auto& a : rule.antecedent) {
        cr.body.emplace_back(a.kind, a.kind == BodyKind::ConjObl ? conj_ids.at(a.conjunction()) : id(a.literal()));
        switch (a.kind) {
          case BodyKind::Plain: body_plain[id(a.literal())].push_back(r); break;
          case BodyKind::Obl: body_obl[id(a.literal())].push_back(r); break;
          case BodyKind::NegObl: body_neg_obl[id(a.literal())].push_back(r); break;
          case BodyKind::ConjObl: conj_rules[conj_ids.at(a.conjunction())].push_back(r); break;
        }
      }
    }
    for (const auto& [s, w] : t.superiority())
      rules[*t.rule_index(w)].superiors.push_back(static_cast<std::uint32_t>(*t.rule_index(s)));
    for (auto& cr : rules) std::sort(cr.superiors.begin(), cr.superiors.end());
  }

  [[nodiscard]] std::size_t literal_count() const { return 2 * atoms.size(); }

  [[nodiscard]] std::optional<std::uint32_t> find(const Literal& l) const {
    auto it = atom_ids.find(l.atom);
    if (it == atom_ids.end()) return std::nullopt;
    return 2 * it->second + (l.positive ? 0 : 1);
  }

  [[nodiscard]] std::uint32_t id(const Literal& l) const { return *find(l); }

  [[nodiscard]] Literal literal(std::uint32_t id) const { return Literal(atoms[id / 2], (id & 1) == 0); }

  [[nodiscard]] bool superior(std::uint32_t t, std::uint32_t s) const {
    const auto& sup = rules[s].superiors;
    return std::binary_search(sup.begin(), sup.end(), t);
  }

 private:
  void intern(const Conjunction& c) {
    auto cid = static_cast<std::uint32_t>(conj_values.size());
    conj_ids.emplace(c, cid);
    conj_values.push_back(c);
    conj_members.emplace_back();
    for (const auto& l : c.conjuncts()) {
      conj_members.back().push_back(id(l));
      conj_of_lit[id(l)].push_back(cid);
    }
    conj_rules.emplace_back();
    conj_declared.push_back(0);
  }
};

/// A sub-theory of the compiled root: which rules and facts survive.
struct ViewKey {
  std::vector<bool> rules;
  std::vector<bool> facts;  // indexed like Compiled::facts

  bool operator==(const ViewKey&) const = default;
  bool operator<(const ViewKey& o) const {
    if (rules != o.rules) return rules < o.rules;
    return facts < o.facts;
  }
};

inline constexpr std::uint8_t kPos = 1;
inline constexpr std::uint8_t kNeg = 2;

struct Solution {
  std::vector<std::uint8_t> fact_st;  // by literal id
  std::vector<std::uint8_t> obl_st;   // by literal id
  std::vector<std::uint8_t> conj_st;  // by conjunction id
  std::vector<char> conj_active;      // conjunction evaluated in this view
};

struct RuleState {
  std::uint32_t pending = 0;      // body atoms not yet satisfied
  bool discarded = false;         // some body atom contradicted
  std::uint32_t first_unsat = 1;  // first chain position not both obligatory and violated
  std::uint32_t first_bad = kNone;  // first chain position refuted or not violable
};

class Engine;

class Run {
 public:
  Run(Engine& engine, const ViewKey& key, bool root, std::vector<ViewKey>& stack);

  /// Iterates to the fixpoint. When `deltas` is given, each stage's additions
  /// are recorded with a justification.
  Solution execute(std::vector<std::vector<StageEntry>>* deltas,
                   std::vector<CycleDiagnostic>& cycles);

 private:
  struct Why {
    bool ok = false;
    std::uint32_t rule = kNone;
    std::uint32_t pos = 0;
    int code = 0;
  };
  struct Addition {
    SetTag set;
    std::uint32_t id;
    Why why;
  };
  struct MemberReduct {
    bool self = false;
    std::shared_ptr<const Solution> sol;
    std::vector<std::uint32_t> removed;
  };

  bool active(std::uint32_t r) const { return key_.rules[r]; }
  bool applicable(std::uint32_t r, std::uint32_t j) const {
    return rs_[r].pending == 0 && rs_[r].first_unsat >= j;
  }
  bool discarded(std::uint32_t r, std::uint32_t j) const {
    return rs_[r].discarded || rs_[r].first_bad < j;
  }
  bool chain_sat(std::uint32_t r, std::uint32_t k) const {
    auto c = cp_.rules[r].head[k - 1];
    return (sol_.obl_st[c] & kPos) && (sol_.fact_st[c ^ 1] & kPos);
  }
  bool chain_bad(std::uint32_t r, std::uint32_t k) const {
    auto c = cp_.rules[r].head[k - 1];
    return (sol_.obl_st[c] & kNeg) || (sol_.fact_st[c ^ 1] & kNeg);
  }

  Why eval_fact_pos(std::uint32_t q) const;
  Why eval_fact_neg(std::uint32_t q) const;
  Why eval_obl_pos(std::uint32_t q) const;
  Why eval_obl_neg(std::uint32_t q) const;
  std::pair<Why, Why> eval_conj(std::uint32_t c);
  const std::vector<MemberReduct>& member_reducts(std::uint32_t c);

  void mark_dirty(std::uint32_t r);
  void enqueue_lit(std::vector<char>& flags, std::vector<std::uint32_t>& list, std::uint32_t x);
  void apply(SetTag set, std::uint32_t x);
  void advance(std::uint32_t r);
  std::string justify(const Addition& a) const;

  Engine& eng_;
  const Compiled& cp_;
  ViewKey key_;
  bool root_;
  std::vector<ViewKey>& stack_;
  Solution sol_;
  std::vector<RuleState> rs_;
  std::vector<char> fact_here_;
  std::vector<std::optional<std::vector<MemberReduct>>> reducts_;
  std::vector<char> cand_fact_, cand_obl_, cand_conj_;
  std::vector<std::uint32_t> list_fact_, list_obl_, list_conj_;
};

/// Compiled theory plus the memo table of reduct fixpoints.
class Engine {
 public:
  explicit Engine(const Theory& t) : cp_(t) {
    root_.rules.assign(cp_.rules.size(), true);
    root_.facts.assign(cp_.facts.size(), true);
  }

  [[nodiscard]] const Compiled& compiled() const { return cp_; }
  [[nodiscard]] const ViewKey& root_key() const { return root_; }

  /// Key of red(base, L): facts in L dropped, constitutive rules with some l
  /// in L in their head dropped. Unknown literals in L have no effect.
  [[nodiscard]] ViewKey reduct_key(const ViewKey& base, const std::vector<std::uint32_t>& removed) const {
    ViewKey k = base;
    for (auto l : removed) {
      for (const auto& o : cp_.head_c[l]) k.rules[o.rule] = false;
    }
    for (std::size_t i = 0; i < cp_.facts.size(); ++i)
      if (std::find(removed.begin(), removed.end(), cp_.facts[i]) != removed.end()) k.facts[i] = false;
    return k;
  }

  /// Narrows `key` to the rules the obligation status of literal `x` can
  /// depend on. Statuses inside that cone are the same in both views.
  [[nodiscard]] ViewKey cone_key(const ViewKey& key, std::uint32_t x) const {
    ViewKey k = key;
    std::fill(k.rules.begin(), k.rules.end(), false);
    std::vector<char> seen_fact(cp_.literal_count(), 0), seen_obl(cp_.literal_count(), 0);
    std::vector<std::pair<bool, std::uint32_t>> work{{true, x & ~1u}};
    auto need = [&](bool obl, std::uint32_t l) {
      l &= ~1u;  // a literal and its complement share one entry
      auto& seen = obl ? seen_obl : seen_fact;
      if (!seen[l]) work.emplace_back(obl, l);
    };
    while (!work.empty()) {
      auto [obl, l] = work.back();
      work.pop_back();
      auto& seen = obl ? seen_obl : seen_fact;
      if (seen[l]) continue;
      seen[l] = 1;
      for (auto q : {l, l ^ 1}) {
        for (const auto& o : (obl ? cp_.head_o : cp_.head_c)[q]) {
          if (!key.rules[o.rule] || k.rules[o.rule]) continue;
          k.rules[o.rule] = true;
          const auto& cr = cp_.rules[o.rule];
          for (const auto& [kind, v] : cr.body) {
            if (kind == BodyKind::Plain) need(false, v);
            else if (kind == BodyKind::ConjObl)
              for (auto m : cp_.conj_members[v]) need(true, m);
            else need(true, v);
          }
          if (cr.prescriptive) {
            for (auto h : cr.head) {
              need(true, h);
              need(false, h);
            }
          }
        }
      }
    }
    return k;
  }

  std::shared_ptr<const Solution> solve(const ViewKey& key, std::vector<ViewKey>& stack) {
    if (memoize_) {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = cache_.find(key);
      if (it != cache_.end()) return it->second;
    }
    if (std::find(stack.begin(), stack.end(), key) != stack.end())
      throw DependencyCycle("reduct computation re-entered an in-progress sub-theory");
    stack.push_back(key);
    std::vector<CycleDiagnostic> cycles;
    auto sol = std::make_shared<const Solution>(Run(*this, key, key == root_, stack).execute(nullptr, cycles));
    stack.pop_back();
    std::lock_guard<std::mutex> lock(mu_);
    ++evaluations_;
    for (auto& c : cycles) nested_cycles_.insert(std::move(c));
    if (!memoize_) return sol;
    return cache_.emplace(key, sol).first->second;
  }

  /// Root fixpoint with stage trace.
  Solution solve_root(std::vector<std::vector<StageEntry>>& deltas, std::vector<CycleDiagnostic>& cycles) {
    std::vector<ViewKey> stack{root_};
    return Run(*this, root_, true, stack).execute(&deltas, cycles);
  }

  void set_memoization(bool on) {
    std::lock_guard<std::mutex> lock(mu_);
    memoize_ = on;
    if (!on) cache_.clear();
  }

  [[nodiscard]] std::size_t evaluations() const {
    std::lock_guard<std::mutex> lock(mu_);
    return evaluations_;
  }

  [[nodiscard]] std::set<CycleDiagnostic> nested_cycles() const {
    std::lock_guard<std::mutex> lock(mu_);
    return nested_cycles_;
  }

 private:
  Compiled cp_;
  ViewKey root_;
  mutable std::mutex mu_;
  bool memoize_ = true;
  std::size_t evaluations_ = 0;
  std::map<ViewKey, std::shared_ptr<const Solution>> cache_;
  std::set<CycleDiagnostic> nested_cycles_;
};

inline Run::Run(Engine& engine, const ViewKey& key, bool root, std::vector<ViewKey>& stack)
    : eng_(engine), cp_(engine.compiled()), key_(key), root_(root), stack_(stack) {
  std::size_t n = cp_.literal_count();
  std::size_t nc = cp_.conj_values.size();
  sol_.fact_st.assign(n, 0);
  sol_.obl_st.assign(n, 0);
  sol_.conj_st.assign(nc, 0);
  sol_.conj_active.assign(nc, 0);
  for (std::uint32_t c = 0; c < nc; ++c) {
    bool in_body = false;
    for (auto r : cp_.conj_rules[c]) in_body = in_body || active(r);
    sol_.conj_active[c] = in_body || (root_ && cp_.conj_declared[c]);
  }
  rs_.resize(cp_.rules.size());
  for (std::uint32_t r = 0; r < cp_.rules.size(); ++r) rs_[r].pending = cp_.rules[r].body_size;
  fact_here_.assign(n, 0);
  for (std::size_t i = 0; i < cp_.facts.size(); ++i)
    if (key_.facts[i]) fact_here_[cp_.facts[i]] = 1;
  reducts_.resize(nc);
  cand_fact_.assign(n, 0);
  cand_obl_.assign(n, 0);
  cand_conj_.assign(nc, 0);
}

inline void Run::enqueue_lit(std::vector<char>& flags, std::vector<std::uint32_t>& list, std::uint32_t x) {
  if (!flags[x]) {
    flags[x] = 1;
    list.push_back(x);
  }
}

inline void Run::mark_dirty(std::uint32_t r) {
  const auto& cr = cp_.rules[r];
  for (auto h : cr.head) {
    if (cr.prescriptive) {
      enqueue_lit(cand_obl_, list_obl_, h);
      enqueue_lit(cand_obl_, list_obl_, h ^ 1);
    } else {
      enqueue_lit(cand_fact_, list_fact_, h);
      enqueue_lit(cand_fact_, list_fact_, h ^ 1);
    }
  }
}

inline void Run::advance(std::uint32_t r) {
  auto& st = rs_[r];
  auto m = static_cast<std::uint32_t>(cp_.rules[r].head.size());
  auto before = st.first_unsat;
  while (st.first_unsat <= m && chain_sat(r, st.first_unsat)) ++st.first_unsat;
  if (st.first_unsat != before) mark_dirty(r);
}

// Updates rule states after `x` joined `set`.
inline void Run::apply(SetTag set, std::uint32_t x) {
  auto satisfy = [&](std::uint32_t r) {
    if (!active(r)) return;
    --rs_[r].pending;
    mark_dirty(r);
  };
  auto discard = [&](std::uint32_t r) {
    if (!active(r) || rs_[r].discarded) return;
    rs_[r].discarded = true;
    mark_dirty(r);
  };
  auto chain_advance = [&](const std::vector<HeadOcc>& occs) {
    for (const auto& o : occs)
      if (active(o.rule) && o.pos == rs_[o.rule].first_unsat) advance(o.rule);
  };
  auto chain_bad_at = [&](const std::vector<HeadOcc>& occs) {
    for (const auto& o : occs) {
      if (!active(o.rule) || o.pos >= rs_[o.rule].first_bad) continue;
      rs_[o.rule].first_bad = o.pos;
      mark_dirty(o.rule);
    }
  };
  auto touch_conj = [&]() {
    for (auto c : cp_.conj_of_lit[x])
      if (sol_.conj_active[c]) enqueue_lit(cand_conj_, list_conj_, c);
  };
  switch (set) {
    case SetTag::FactualPos:
      for (auto r : cp_.body_plain[x]) satisfy(r);
      chain_advance(cp_.head_o[x ^ 1]);
      break;
    case SetTag::FactualNeg:
      for (auto r : cp_.body_plain[x]) discard(r);
      chain_bad_at(cp_.head_o[x ^ 1]);
      break;
    case SetTag::OblPos:
      for (auto r : cp_.body_obl[x]) satisfy(r);
      for (auto r : cp_.body_neg_obl[x]) discard(r);
      chain_advance(cp_.head_o[x]);
      touch_conj();
      break;
    case SetTag::OblNeg:
      for (auto r : cp_.body_obl[x]) discard(r);
      for (auto r : cp_.body_neg_obl[x]) satisfy(r);
      chain_bad_at(cp_.head_o[x]);
      touch_conj();
      break;
    case SetTag::ConjPos:
      for (auto r : cp_.conj_rules[x]) satisfy(r);
      break;
    case SetTag::ConjNeg:
      for (auto r : cp_.conj_rules[x]) discard(r);
      break;
  }
}

// Codes: 1 fact complement, 2 no live supporting rule, 3 defeated by attacker.

inline Run::Why Run::eval_fact_pos(std::uint32_t q) const {
  if (fact_here_[q ^ 1]) return {};
  Why w;
  for (const auto& o : cp_.head_c[q]) {
    if (active(o.rule) && cp_.rules[o.rule].defeasible && applicable(o.rule, 1)) {
      w = {true, o.rule, 1, 0};
      break;
    }
  }
  if (!w.ok) return {};
  for (const auto& s : cp_.head_c[q ^ 1]) {
    if (!active(s.rule) || discarded(s.rule, 1)) continue;
    bool beaten = false;
    for (auto t : cp_.rules[s.rule].superiors) {
      const auto& ct = cp_.rules[t];
      if (active(t) && !ct.prescriptive && ct.head[0] == q && applicable(t, 1)) {
        beaten = true;
        break;
      }
    }
    if (!beaten) return {};
  }
  return w;
}

inline Run::Why Run::eval_fact_neg(std::uint32_t q) const {
  if (fact_here_[q]) return {};
  if (fact_here_[q ^ 1]) return {true, kNone, 0, 1};
  bool all_discarded = true;
  for (const auto& o : cp_.head_c[q]) {
    if (active(o.rule) && cp_.rules[o.rule].defeasible && !discarded(o.rule, 1)) {
      all_discarded = false;
      break;
    }
  }
  if (all_discarded) return {true, kNone, 0, 2};
  for (const auto& s : cp_.head_c[q ^ 1]) {
    if (!active(s.rule) || !applicable(s.rule, 1)) continue;
    bool stands = true;
    for (const auto& t : cp_.head_c[q]) {
      if (active(t.rule) && !discarded(t.rule, 1) && cp_.superior(t.rule, s.rule)) {
        stands = false;
        break;
      }
    }
    if (stands) return {true, s.rule, 1, 3};
  }
  return {};
}

inline Run::Why Run::eval_obl_pos(std::uint32_t q) const {
  Why w;
  for (const auto& o : cp_.head_o[q]) {
    if (active(o.rule) && cp_.rules[o.rule].defeasible && applicable(o.rule, o.pos)) {
      w = {true, o.rule, o.pos, 0};
      break;
    }
  }
  if (!w.ok) return {};
  for (const auto& s : cp_.head_o[q ^ 1]) {
    if (!active(s.rule) || discarded(s.rule, s.pos)) continue;
    bool beaten = false;
    for (auto t : cp_.rules[s.rule].superiors) {
      const auto& ct = cp_.rules[t];
      if (!active(t) || !ct.prescriptive) continue;
      for (std::uint32_t m = 1; m <= ct.head.size() && !beaten; ++m)
        beaten = ct.head[m - 1] == q && applicable(t, m);
      if (beaten) break;
    }
    if (!beaten) return {};
  }
  return w;
}

inline Run::Why Run::eval_obl_neg(std::uint32_t q) const {
  bool all_discarded = true;
  for (const auto& o : cp_.head_o[q]) {
    if (active(o.rule) && cp_.rules[o.rule].defeasible && !discarded(o.rule, o.pos)) {
      all_discarded = false;
      break;
    }
  }
  if (all_discarded) return {true, kNone, 0, 2};
  for (const auto& s : cp_.head_o[q ^ 1]) {
    if (!active(s.rule) || !applicable(s.rule, s.pos)) continue;
    bool stands = true;
    for (const auto& t : cp_.head_o[q]) {
      if (active(t.rule) && !discarded(t.rule, t.pos) && cp_.superior(t.rule, s.rule)) {
        stands = false;
        break;
      }
    }
    if (stands) return {true, s.rule, s.pos, 3};
  }
  return {};
}

inline const std::vector<Run::MemberReduct>& Run::member_reducts(std::uint32_t c) {
  auto& slot = reducts_[c];
  if (slot) return *slot;
  std::vector<MemberReduct> out;
  const auto& members = cp_.conj_members[c];
  for (auto x : members) {
    MemberReduct mr;
    for (auto y : members)
      if (y != x) mr.removed.push_back(y ^ 1);
    auto k = eng_.reduct_key(key_, mr.removed);
    if (k == key_) {
      mr.self = true;
    } else {
      mr.sol = eng_.solve(eng_.cone_key(k, x), stack_);
    }
    out.push_back(std::move(mr));
  }
  slot = std::move(out);
  return *slot;
}

// Codes for conjunctions: positive 4; negative 5 conjunct refuted, 6 not independent.
// `pos` carries the deciding member index.
inline std::pair<Run::Why, Run::Why> Run::eval_conj(std::uint32_t c) {
  const auto& members = cp_.conj_members[c];
  const auto& red = member_reducts(c);
  Why pos{true, kNone, 0, 4};
  Why neg;
  for (std::uint32_t i = 0; i < members.size(); ++i) {
    auto x = members[i];
    bool op = sol_.obl_st[x] & kPos;
    bool on = sol_.obl_st[x] & kNeg;
    bool rp = red[i].self ? op : (red[i].sol->obl_st[x] & kPos) != 0;
    bool rn = red[i].self ? on : !rp;
    if (!(op && rp)) pos.ok = false;
    if (!neg.ok && on) neg = {true, kNone, i, 5};
    if (!neg.ok && rn) neg = {true, kNone, i, 6};
  }
  return {pos, neg};
}

inline std::string Run::justify(const Addition& a) const {
  auto label = [&](std::uint32_t r, std::uint32_t pos) {
    std::string s = cp_.labels[r];
    if (cp_.rules[r].head.size() > 1) s += " at " + std::to_string(pos);
    return s;
  };
  const auto& w = a.why;
  switch (a.set) {
    case SetTag::FactualPos:
    case SetTag::OblPos:
      return "supported by " + label(w.rule, w.pos);
    case SetTag::FactualNeg:
    case SetTag::OblNeg:
      if (w.code == 1) return "complement is a fact";
      if (w.code == 2) return "no supporting rule survives";
      return "attacked by " + label(w.rule, w.pos) + " and not overridden";
    case SetTag::ConjPos:
      return "every conjunct independent of the other violations";
    case SetTag::ConjNeg: {
      auto x = cp_.literal(cp_.conj_members[a.id][w.pos]).str();
      if (w.code == 5) return "conjunct " + x + " refuted";
      if (w.code == 6) return "conjunct " + x + " not independent of the other violations";
      return "conjunct " + x + " not provable in its reduct";
    }
  }
  return {};
}

inline Solution Run::execute(std::vector<std::vector<StageEntry>>* deltas,
                             std::vector<CycleDiagnostic>& cycles) {
  auto record = [&](const std::vector<Addition>& adds) {
    if (!deltas) return;
    std::vector<StageEntry> entries;
    for (const auto& a : adds) {
      StageEntry e;
      e.set = a.set;
      if (a.set == SetTag::ConjPos || a.set == SetTag::ConjNeg)
        e.target = cp_.conj_values[a.id];
      else
        e.target = cp_.literal(a.id);
      e.justification = justify(a);
      entries.push_back(std::move(e));
    }
    deltas->push_back(std::move(entries));
  };

  // E_0: the facts.
  for (std::uint32_t x = 0; x < fact_here_.size(); ++x) {
    if (!fact_here_[x]) continue;
    sol_.fact_st[x] |= kPos;
    apply(SetTag::FactualPos, x);
  }
  list_fact_.clear();
  list_obl_.clear();
  list_conj_.clear();
  std::fill(cand_fact_.begin(), cand_fact_.end(), 0);
  std::fill(cand_obl_.begin(), cand_obl_.end(), 0);
  std::fill(cand_conj_.begin(), cand_conj_.end(), 0);
  for (std::uint32_t x = 0; x < cp_.literal_count(); ++x) {
    enqueue_lit(cand_fact_, list_fact_, x);
    enqueue_lit(cand_obl_, list_obl_, x);
  }
  for (std::uint32_t c = 0; c < cp_.conj_values.size(); ++c)
    if (sol_.conj_active[c]) enqueue_lit(cand_conj_, list_conj_, c);

  for (;;) {
    std::vector<Addition> adds;
    auto take = [](std::vector<char>& flags, std::vector<std::uint32_t>& list) {
      std::vector<std::uint32_t> out;
      out.swap(list);
      std::sort(out.begin(), out.end());
      for (auto x : out) flags[x] = 0;
      return out;
    };
    for (auto q : take(cand_fact_, list_fact_)) {
      if (sol_.fact_st[q]) continue;
      if (auto w = eval_fact_pos(q); w.ok) adds.push_back({SetTag::FactualPos, q, w});
      else if (auto n = eval_fact_neg(q); n.ok) adds.push_back({SetTag::FactualNeg, q, n});
    }
    for (auto q : take(cand_obl_, list_obl_)) {
      if (sol_.obl_st[q]) continue;
      if (auto w = eval_obl_pos(q); w.ok) adds.push_back({SetTag::OblPos, q, w});
      else if (auto n = eval_obl_neg(q); n.ok) adds.push_back({SetTag::OblNeg, q, n});
    }
    for (auto c : take(cand_conj_, list_conj_)) {
      if (sol_.conj_st[c]) continue;
      auto [p, n] = eval_conj(c);
      if (p.ok) adds.push_back({SetTag::ConjPos, c, p});
      else if (n.ok) adds.push_back({SetTag::ConjNeg, c, n});
    }
    if (adds.empty()) break;
    for (const auto& a : adds) {
      switch (a.set) {
        case SetTag::FactualPos: sol_.fact_st[a.id] |= kPos; break;
        case SetTag::FactualNeg: sol_.fact_st[a.id] |= kNeg; break;
        case SetTag::OblPos: sol_.obl_st[a.id] |= kPos; break;
        case SetTag::OblNeg: sol_.obl_st[a.id] |= kNeg; break;
        case SetTag::ConjPos: sol_.conj_st[a.id] |= kPos; break;
        case SetTag::ConjNeg: sol_.conj_st[a.id] |= kNeg; break;
      }
    }
    for (const auto& a : adds) apply(a.set, a.id);
    record(adds);
  }

  // Conjunctions left open because a conjunct's reduct is this very theory and
  // the conjunct itself is still open. Outside rule bodies nothing depends on
  // them, so the final statuses settle them; inside bodies we report a cycle.
  std::vector<Addition> late;
  for (std::uint32_t c = 0; c < cp_.conj_values.size(); ++c) {
    if (!sol_.conj_active[c] || sol_.conj_st[c]) continue;
    const auto& members = cp_.conj_members[c];
    const auto& red = member_reducts(c);
    std::optional<std::uint32_t> open_self;
    for (std::uint32_t i = 0; i < members.size(); ++i)
      if (red[i].self && !sol_.obl_st[members[i]]) open_self = i;
    if (!open_self) continue;
    bool in_body = false;
    for (auto r : cp_.conj_rules[c]) in_body = in_body || active(r);
    if (in_body) {
      CycleDiagnostic d{cp_.conj_values[c], cp_.literal(members[*open_self]), {}};
      for (auto l : red[*open_self].removed) d.removed.insert(cp_.literal(l));
      cycles.push_back(std::move(d));
      continue;
    }
    Why pos{true, kNone, 0, 4};
    Why neg;
    for (std::uint32_t i = 0; i < members.size(); ++i) {
      auto x = members[i];
      bool op = sol_.obl_st[x] & kPos;
      bool on = sol_.obl_st[x] & kNeg;
      bool rp = red[i].self ? op : (red[i].sol->obl_st[x] & kPos) != 0;
      if (!(op && rp)) pos.ok = false;
      if (!neg.ok && on) neg = {true, kNone, i, 5};
      if (!neg.ok && !rp) neg = {true, kNone, i, 7};
    }
    if (pos.ok) late.push_back({SetTag::ConjPos, c, pos});
    else if (neg.ok) late.push_back({SetTag::ConjNeg, c, neg});
  }
  if (!late.empty()) {
    for (const auto& a : late) sol_.conj_st[a.id] |= a.set == SetTag::ConjPos ? kPos : kNeg;
    record(late);
  }
  return std::move(sol_);
}

inline Extension to_extension(const Compiled& cp, const Solution& s) {
  Extension e;
  for (std::uint32_t x = 0; x < cp.literal_count(); ++x) {
    auto l = cp.literal(x);
    if (s.fact_st[x] & kPos) e.factual_pos.insert(l);
    if (s.fact_st[x] & kNeg) e.factual_neg.insert(l);
    if (s.obl_st[x] & kPos) e.obligation_pos.insert(l);
    if (s.obl_st[x] & kNeg) e.obligation_neg.insert(l);
  }
  for (std::uint32_t c = 0; c < cp.conj_values.size(); ++c) {
    if (s.conj_st[c] & kPos) e.conj_pos.insert(cp.conj_values[c]);
    if (s.conj_st[c] & kNeg) e.conj_neg.insert(cp.conj_values[c]);
  }
  return e;
}

}  // namespace detail

/// One of the six tagged forms `+d a`, `-d a`, `+dO a`, `-dO a`, `+dO a & b`,
/// `-dO a & b`. Used both as a derivation step and as a query goal.
struct TaggedExpression {
  bool positive = true;
  bool deontic = false;  // dO rather than d
  Target target;

  /// Parses `[+|-]d <lit>` or `[+|-]dO <lit or conjunction>`; the sign defaults to +.
  static TaggedExpression parse(std::string_view text) {
    auto trim = [](std::string_view s) {
      auto b = s.find_first_not_of(" \t\r\n");
      if (b == std::string_view::npos) return std::string_view{};
      auto e = s.find_last_not_of(" \t\r\n");
      return s.substr(b, e - b + 1);
    };
    auto s = trim(text);
    TaggedExpression q;
    if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
      q.positive = s[0] == '+';
      s.remove_prefix(1);
    }
    if (s.rfind("dO", 0) == 0) {
      q.deontic = true;
      s.remove_prefix(2);
    } else if (s.rfind("d", 0) == 0) {
      s.remove_prefix(1);
    } else {
      throw std::invalid_argument("goal must start with d or dO");
    }
    if (!s.empty() && s[0] != ' ' && s[0] != '\t') throw std::invalid_argument("missing space after tag");
    s = trim(s);
    if (s.empty()) throw std::invalid_argument("goal has no target");
    auto valid = [](std::string_view lit) {
      if (!lit.empty() && lit[0] == '~') lit.remove_prefix(1);
      if (lit.empty() || !(std::isalpha(static_cast<unsigned char>(lit[0])) || lit[0] == '_')) return false;
      for (char ch : lit)
        if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_')) return false;
      return true;
    };
    if (s.find('&') != std::string_view::npos) {
      if (!q.deontic) throw std::invalid_argument("conjunctions take the dO tag");
      auto c = Conjunction::from(s);
      for (const auto& l : c.conjuncts())
        if (!valid(l.str())) throw std::invalid_argument("malformed literal " + l.str());
      if (c.size() == 1) q.target = c.conjuncts().front();
      else q.target = c;
    } else {
      if (!valid(s)) throw std::invalid_argument("malformed literal " + std::string(s));
      q.target = Literal::from(s);
    }
    return q;
  }

  [[nodiscard]] std::string str() const {
    return std::string(positive ? "+" : "-") + (deontic ? "dO " : "d ") + target_str(target);
  }

  [[nodiscard]] bool is_conjunction() const { return std::holds_alternative<Conjunction>(target); }

  bool operator==(const TaggedExpression&) const = default;
};

using Query = TaggedExpression;

/// Computes and caches the extension of one theory together with the reduct
/// fixpoints its conjunctive obligations need. Not safe for concurrent
/// mutation of the memoization switch; queries may share the reduct cache.
class Reasoner {
 public:
  explicit Reasoner(Theory t) : theory_(std::move(t)), engine_(std::make_unique<detail::Engine>(theory_)) {}

  [[nodiscard]] const Theory& theory() const { return theory_; }

  const ExtensionResult& result() {
    if (!result_) {
      std::vector<std::vector<StageEntry>> deltas;
      std::vector<CycleDiagnostic> cycles;
      auto sol = engine_->solve_root(deltas, cycles);
      ExtensionResult r;
      r.extension = detail::to_extension(engine_->compiled(), sol);
      r.trace = StageTrace(initial_extension(theory_), std::move(deltas));
      std::set<CycleDiagnostic> all(cycles.begin(), cycles.end());
      auto nested = engine_->nested_cycles();
      all.insert(nested.begin(), nested.end());
      r.cycles.assign(all.begin(), all.end());
      root_solution_ = std::make_shared<const detail::Solution>(std::move(sol));
      result_ = std::move(r);
    }
    return *result_;
  }

  const Extension& extension() { return result().extension; }
  const StageTrace& trace() { return result().trace; }

  void set_memoization(bool on) { engine_->set_memoization(on); }

  /// Number of reduct fixpoints computed so far (cache hits excluded).
  [[nodiscard]] std::size_t reduct_evaluations() const { return engine_->evaluations(); }

  /// Extension of red(T, L) over the literal universe of that reduct.
  Extension reduct_extension(const std::set<Literal>& removed) {
    auto ids = known(removed);
    auto key = engine_->reduct_key(engine_->root_key(), ids);
    std::vector<detail::ViewKey> stack{engine_->root_key()};
    Extension full;
    if (key == engine_->root_key()) {
      full = result().extension;
      full.conj_pos.clear();
      full.conj_neg.clear();
      for (const auto& c : result().extension.conj_pos)
        if (in_body(c)) full.conj_pos.insert(c);
      for (const auto& c : result().extension.conj_neg)
        if (in_body(c)) full.conj_neg.insert(c);
    } else {
      full = detail::to_extension(engine_->compiled(), *engine_->solve(key, stack));
    }
    auto u = universe(reduct(theory_, removed));
    auto keep = [](auto& s, const auto& allowed) {
      for (auto it = s.begin(); it != s.end();) it = allowed.count(*it) ? std::next(it) : s.erase(it);
    };
    keep(full.factual_pos, u.literals);
    keep(full.factual_neg, u.literals);
    keep(full.obligation_pos, u.literals);
    keep(full.obligation_neg, u.literals);
    keep(full.conj_pos, u.conjunctions);
    keep(full.conj_neg, u.conjunctions);
    return full;
  }

  /// m in +dO of red(T, L).
  bool reduct_obligation(const Literal& m, const std::set<Literal>& removed) {
    auto id = engine_->compiled().find(m);
    if (!id) return false;
    auto key = engine_->reduct_key(engine_->root_key(), known(removed));
    if (key == engine_->root_key()) return extension().obligation_pos.count(m) != 0;
    std::vector<detail::ViewKey> stack{engine_->root_key()};
    return (engine_->solve(engine_->cone_key(key, *id), stack)->obl_st[*id] & detail::kPos) != 0;
  }

  /// m is provable as an obligation both in T and in red(T, L).
  bool independent(const Literal& m, const std::set<Literal>& removed) {
    return extension().obligation_pos.count(m) && reduct_obligation(m, removed);
  }

  EvaluationVerdict evaluate(const Conjunction& c) { return evaluate(c, extension()); }

  /// Evaluates `c` reading obligation statuses from `e` and independence from
  /// the reduct fixpoints. When a conjunct's reduct is the theory itself its
  /// independence is read from `e` as well.
  EvaluationVerdict evaluate(const Conjunction& c, const Extension& e) {
    EvaluationVerdict v;
    v.target = c;
    std::vector<std::uint32_t> ids;
    for (const auto& x : c.conjuncts()) {
      ConjunctRecord rec;
      rec.conjunct = x;
      auto id = engine_->compiled().find(x);
      rec.obligation_pos = e.obligation_pos.count(x) != 0;
      // A literal outside the universe has no rules and is refuted outright.
      rec.obligation_neg = id ? e.obligation_neg.count(x) != 0 : true;
      std::set<Literal> removed;
      for (const auto& y : c.conjuncts())
        if (y != x) removed.insert(y.complement());
      auto key = engine_->reduct_key(engine_->root_key(), known(removed));
      if (!id) {
        rec.in_reduct = false;
      } else if (key == engine_->root_key()) {
        rec.reduct_is_self = true;
        if (rec.obligation_pos) rec.in_reduct = true;
        else if (rec.obligation_neg) rec.in_reduct = false;
      } else {
        std::vector<detail::ViewKey> stack{engine_->root_key()};
        rec.in_reduct = (engine_->solve(engine_->cone_key(key, *id), stack)->obl_st[*id] & detail::kPos) != 0;
      }
      v.conjuncts.push_back(std::move(rec));
    }
    bool all = true;
    for (const auto& r : v.conjuncts) all = all && r.obligation_pos && r.in_reduct.value_or(false);
    if (all) {
      v.verdict = Verdict::Proven;
      v.reason = VerdictReason::AllIndependent;
      return v;
    }
    for (const auto& r : v.conjuncts) {
      if (r.obligation_neg) return decide(v, Verdict::Refuted, VerdictReason::ConjunctRefuted, r.conjunct);
      if (r.in_reduct == false) return decide(v, Verdict::Refuted, VerdictReason::NotIndependent, r.conjunct);
    }
    for (const auto& r : v.conjuncts) {
      if (!r.reduct_is_self || r.in_reduct) continue;
      if (in_body(c)) return decide(v, Verdict::Undetermined, VerdictReason::DependencyCycle, r.conjunct);
      // Nothing depends on this conjunction: settle it on the final statuses.
      if (!r.obligation_pos) return decide(v, Verdict::Refuted, VerdictReason::NotIndependent, r.conjunct);
    }
    for (const auto& r : v.conjuncts)
      if (!r.obligation_pos || !r.in_reduct.value_or(false)) return decide(v, Verdict::Undetermined, VerdictReason::ConjunctUndecided, r.conjunct);
    return v;
  }

  /// One application of the stage operator to `en`, evaluated directly from
  /// the rule definitions over the literal universe.
  Extension step(const Extension& en) {
    const auto& t = theory_;
    auto u = universe(t);
    Extension out = en;
    auto rules_of = [&](const Literal& q, KindFilter k) { return t.rules_for(q, std::nullopt, k); };
    for (const auto& q : u.literals) {
      // +d
      if (!t.is_fact(q.complement())) {
        bool support = false;
        for (const auto* r : rules_of(q, KindFilter::Constitutive))
          support = support || (r->defeasible() && body_applicable(*r, en));
        bool ok = support;
        for (const auto* s : rules_of(q.complement(), KindFilter::Constitutive)) {
          if (!ok) break;
          if (body_discarded(*s, en)) continue;
          bool beaten = false;
          for (const auto* tr : rules_of(q, KindFilter::Constitutive))
            beaten = beaten || (t.stronger(tr->label, s->label) && body_applicable(*tr, en));
          ok = beaten;
        }
        if (ok) out.factual_pos.insert(q);
      }
      // -d
      if (!t.is_fact(q)) {
        bool ok = t.is_fact(q.complement());
        if (!ok) {
          ok = true;
          for (const auto* r : rules_of(q, KindFilter::Constitutive))
            if (r->defeasible() && !body_discarded(*r, en)) ok = false;
        }
        if (!ok) {
          for (const auto* s : rules_of(q.complement(), KindFilter::Constitutive)) {
            if (!body_applicable(*s, en)) continue;
            bool stands = true;
            for (const auto* tr : rules_of(q, KindFilter::Constitutive))
              if (!body_discarded(*tr, en) && t.stronger(tr->label, s->label)) stands = false;
            ok = ok || stands;
          }
        }
        if (ok) out.factual_neg.insert(q);
      }
      // +dO
      {
        bool ok = false;
        for (const auto* r : rules_of(q, KindFilter::Prescriptive))
          for (auto j : r->head.indexes_of(q))
            ok = ok || (r->defeasible() && applicable_at(*r, q, j, en));
        for (const auto* s : rules_of(q.complement(), KindFilter::Prescriptive)) {
          if (!ok) break;
          for (auto k : s->head.indexes_of(q.complement())) {
            if (discarded_at(*s, q.complement(), k, en)) continue;
            bool beaten = false;
            for (const auto* tr : rules_of(q, KindFilter::Prescriptive))
              for (auto m : tr->head.indexes_of(q))
                beaten = beaten || (t.stronger(tr->label, s->label) && applicable_at(*tr, q, m, en));
            if (!beaten) ok = false;
          }
        }
        if (ok) out.obligation_pos.insert(q);
      }
      // -dO
      {
        bool ok = true;
        for (const auto* r : rules_of(q, KindFilter::Prescriptive))
          for (auto j : r->head.indexes_of(q))
            if (r->defeasible() && !discarded_at(*r, q, j, en)) ok = false;
        if (!ok) {
          for (const auto* s : rules_of(q.complement(), KindFilter::Prescriptive)) {
            for (auto k : s->head.indexes_of(q.complement())) {
              if (!applicable_at(*s, q.complement(), k, en)) continue;
              bool stands = true;
              for (const auto* tr : rules_of(q, KindFilter::Prescriptive))
                for (auto m : tr->head.indexes_of(q))
                  if (!discarded_at(*tr, q, m, en) && t.stronger(tr->label, s->label)) stands = false;
              ok = ok || stands;
            }
          }
        }
        if (ok) out.obligation_neg.insert(q);
      }
    }
    for (const auto& c : u.conjunctions) {
      bool pos = true;
      bool neg = false;
      for (const auto& x : c.conjuncts()) {
        std::set<Literal> removed;
        for (const auto& y : c.conjuncts())
          if (y != x) removed.insert(y.complement());
        bool self = engine_->reduct_key(engine_->root_key(), known(removed)) == engine_->root_key();
        bool op = en.obligation_pos.count(x) != 0;
        bool on = en.obligation_neg.count(x) != 0;
        bool rp = self ? op : reduct_obligation(x, removed);
        bool rn = self ? on : !rp;
        pos = pos && op && rp;
        neg = neg || on || rn;
      }
      if (pos) out.conj_pos.insert(c);
      else if (neg) out.conj_neg.insert(c);
    }
    return out;
  }

  /// Membership of a goal in the extension. Conjunctions outside the
  /// syntactic universe are evaluated on demand; unknown atoms have no rules.
  bool query(const Query& q) {
    const auto& e = extension();
    if (const auto* c = std::get_if<Conjunction>(&q.target)) {
      bool pos, neg;
      if (e.conj_pos.count(*c) || e.conj_neg.count(*c)) {
        pos = e.conj_pos.count(*c) != 0;
        neg = e.conj_neg.count(*c) != 0;
      } else {
        auto v = evaluate(*c);
        pos = v.verdict == Verdict::Proven;
        neg = v.verdict == Verdict::Refuted;
      }
      return q.positive ? pos : neg;
    }
    const auto& l = std::get<Literal>(q.target);
    if (!engine_->compiled().find(l)) return !q.positive;
    if (q.deontic) return q.positive ? e.obligation_pos.count(l) != 0 : e.obligation_neg.count(l) != 0;
    return q.positive ? e.factual_pos.count(l) != 0 : e.factual_neg.count(l) != 0;
  }

 private:
  static EvaluationVerdict decide(EvaluationVerdict v, Verdict verdict, VerdictReason reason, const Literal& who) {
    v.verdict = verdict;
    v.reason = reason;
    v.deciding = who;
    return v;
  }

  bool in_body(const Conjunction& c) const {
    const auto& cp = engine_->compiled();
    auto it = cp.conj_ids.find(c);
    return it != cp.conj_ids.end() && !cp.conj_rules[it->second].empty();
  }

  std::vector<std::uint32_t> known(const std::set<Literal>& ls) const {
    std::vector<std::uint32_t> out;
    for (const auto& l : ls)
      if (auto id = engine_->compiled().find(l)) out.push_back(*id);
    return out;
  }

  Theory theory_;
  std::unique_ptr<detail::Engine> engine_;
  std::optional<ExtensionResult> result_;
  std::shared_ptr<const detail::Solution> root_solution_;
};

inline ExtensionResult compute_extension(const Theory& t) {
  Reasoner r(t);
  return r.result();
}

inline Extension step(const Theory& t, const Extension& en) {
  Reasoner r(t);
  return r.step(en);
}

inline bool query(const Theory& t, const Query& goal) {
  Reasoner r(t);
  return r.query(goal);
}

inline bool independent(const Theory& t, const Literal& m, const std::set<Literal>& removed) {
  Reasoner r(t);
  return r.independent(m, removed);
}

inline EvaluationVerdict evaluate_conjunction(const Theory& t, const Extension& e, const Conjunction& c) {
  Reasoner r(t);
  return r.evaluate(c, e);
}

}  // namespace ddl
