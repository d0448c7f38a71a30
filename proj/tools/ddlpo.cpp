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

// Command-line front end: compute extensions, answer queries, check
// derivations, print reducts, generate theories and time the engine.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ddl/ddl.hpp"

namespace {

enum Exit { kOk = 0, kFalse = 1, kMalformed = 2, kStrict = 3, kCycle = 4, kWitness = 5 };

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

// Parses the theory file; on failure prints diagnostics and returns an exit code.
int load(const std::string& path, bool strict, std::optional<ddl::Theory>& out) {
  std::string text;
  if (!read_file(path, text)) {
    std::cerr << path << ": cannot read file\n";
    return kMalformed;
  }
  auto res = ddl::parse_theory(text);
  for (const auto& d : res.diagnostics) std::cerr << path << ":" << d.str() << "\n";
  if (!res.ok()) return kMalformed;
  if (strict && res.has_warnings()) return kStrict;
  out = std::move(res.theory);
  return kOk;
}

ddl::Format format_of(const std::string& f) { return f == "text" ? ddl::Format::Text : ddl::Format::Json; }

nlohmann::ordered_json trace_json(const ddl::StageTrace& t) {
  auto arr = nlohmann::ordered_json::array();
  for (std::size_t i = 1; i < t.size(); ++i) {
    for (const auto& e : t.delta(i)) {
      nlohmann::ordered_json j;
      j["stage"] = i;
      j["tag"] = ddl::set_tag_name(e.set);
      j["target"] = ddl::target_str(e.target);
      j["why"] = e.justification;
      arr.push_back(j);
    }
  }
  return arr;
}

int report_cycles(const ddl::ExtensionResult& r) {
  for (const auto& c : r.cycles) std::cerr << "dependency cycle: " << c.message() << "\n";
  return r.cycles.empty() ? kOk : kCycle;
}

int cmd_extension(const std::string& path, const std::string& fmt, bool strict, bool trace) {
  std::optional<ddl::Theory> t;
  if (int rc = load(path, strict, t)) return rc;
  auto res = ddl::compute_extension(*t);
  if (trace) {
    if (fmt == "text") {
      std::cout << ddl::emit_extension(res.extension, ddl::Format::Text);
      for (std::size_t i = 1; i < res.trace.size(); ++i)
        for (const auto& e : res.trace.delta(i))
          std::cout << "stage " << i << ": " << ddl::set_tag_name(e.set) << " " << ddl::target_str(e.target)
                    << "  (" << e.justification << ")\n";
    } else {
      nlohmann::ordered_json j;
      j["extension"] = ddl::extension_json(res.extension);
      j["trace"] = trace_json(res.trace);
      std::cout << j.dump(2) << "\n";
    }
  } else {
    std::cout << ddl::emit_extension(res.extension, format_of(fmt));
  }
  return report_cycles(res);
}

// Goal syntax: optional sign, then `d` (factual) or `O`/`dO` (obligation), then the target.
std::optional<ddl::TaggedExpression> parse_goal(std::string g, std::string& err) {
  auto b = g.find_first_not_of(" \t");
  if (b == std::string::npos) {
    err = "empty goal";
    return std::nullopt;
  }
  g = g.substr(b);
  std::string sign;
  if (g[0] == '+' || g[0] == '-') {
    sign = g.substr(0, 1);
    g = g.substr(1);
  }
  if (g.rfind("O ", 0) == 0 || g.rfind("O\t", 0) == 0) g = "dO" + g.substr(1);
  try {
    return ddl::TaggedExpression::parse(sign + g);
  } catch (const std::exception& e) {
    err = e.what();
    return std::nullopt;
  }
}

int cmd_query(const std::string& path, const std::string& goal_text, bool strict, bool witness) {
  std::string err;
  auto goal = parse_goal(goal_text, err);
  if (!goal) {
    std::cerr << "malformed goal: " << err << "\n";
    return kMalformed;
  }
  std::optional<ddl::Theory> t;
  if (int rc = load(path, strict, t)) return rc;
  ddl::Reasoner r(*t);
  const auto& res = r.result();
  auto pos = *goal;
  pos.positive = true;
  auto neg = *goal;
  neg.positive = false;
  bool known = true;
  if (!goal->is_conjunction()) {
    const auto& l = std::get<ddl::Literal>(goal->target);
    known = ddl::universe(*t).literals.count(l) != 0;
  }
  bool proven = r.query(pos);
  bool refuted = r.query(neg);
  std::string status = proven ? "proven" : refuted ? "refuted" : "undetermined";
  if (!known) status += " (no rules)";
  std::cout << status << "\n";
  bool holds = goal->positive ? proven : refuted;
  if (witness && holds) {
    try {
      auto d = ddl::witness_derivation(*t, res.trace, *goal);
      std::cout << d.str();
    } catch (const std::exception& e) {
      std::cerr << "witness: " << e.what() << "\n";
      return kWitness;
    }
  }
  if (int rc = report_cycles(res)) return rc;
  return holds ? kOk : kFalse;
}

int cmd_check(const std::string& path, const std::string& deriv_path, const std::string& fmt, bool strict) {
  std::optional<ddl::Theory> t;
  if (int rc = load(path, strict, t)) return rc;
  std::string text;
  if (!read_file(deriv_path, text)) {
    std::cerr << deriv_path << ": cannot read file\n";
    return kMalformed;
  }
  auto parsed = ddl::parse_derivation(text);
  for (const auto& e : parsed.errors) std::cerr << deriv_path << ":" << e << "\n";
  if (!parsed.derivation) return kMalformed;
  auto rep = ddl::check_derivation(*t, *parsed.derivation);
  if (fmt == "text") std::cout << rep.str();
  else std::cout << rep.json().dump(2) << "\n";
  return rep.accepted ? kOk : kFalse;
}

int cmd_reduct(const std::string& path, const std::vector<std::string>& lits, bool strict) {
  std::optional<ddl::Theory> t;
  if (int rc = load(path, strict, t)) return rc;
  std::set<ddl::Literal> removed;
  for (const auto& s : lits) {
    auto l = ddl::Literal::from(s);
    if (l.atom.empty()) {
      std::cerr << "malformed literal '" << s << "'\n";
      return kMalformed;
    }
    removed.insert(l);
  }
  std::cout << ddl::serialize_theory(ddl::reduct(*t, removed));
  return kOk;
}

std::vector<std::size_t> parse_sizes(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoul(item));
  return out;
}

int cmd_bench(const std::vector<std::string>& families, const std::string& sizes, std::size_t m, std::size_t k,
              std::size_t reps, std::uint64_t seed) {
  std::cout << "family,n,r,m,k,median_ms\n";
  for (const auto& fam : families) {
    std::vector<std::pair<double, double>> points;
    for (auto size : parse_sizes(sizes)) {
      ddl::FamilySpec spec;
      spec.family = fam;
      spec.seed = seed;
      spec.m = m;
      spec.k = k;
      if (fam == "layered") {
        spec.r = size;
        spec.n = std::max<std::size_t>(size / 2, 2);
      } else if (fam == "chain-ctd") {
        spec.n = size;
      } else {
        spec.m = size;
      }
      auto t = ddl::generate(spec);
      double ms = ddl::time_extension(t, std::max<std::size_t>(reps, 5));
      points.emplace_back(static_cast<double>(t.rules().size()), ms);
      std::cout << fam << "," << spec.n << "," << t.rules().size() << "," << spec.m << "," << spec.k << ","
                << ms << "\n";
    }
    std::cerr << fam << ": fitted exponent " << ddl::fitted_exponent(points) << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Defeasible deontic logic engine with conjunctive obligations"};
  app.require_subcommand(1);

  std::string format = "json";
  bool strict = false;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "text"}));
    sub->add_flag("--strict", strict, "Treat validation warnings as errors (exit 3)");
  };

  std::string theory_path;
  bool trace = false;
  auto* ext = app.add_subcommand("extension", "Compute and print the extension of a theory");
  ext->add_option("theory", theory_path, "Theory file")->required();
  ext->add_flag("--trace", trace, "Include the stage-by-stage additions");
  add_common(ext);

  std::string goal;
  bool witness = false;
  auto* qry = app.add_subcommand("query", "Answer a membership query such as \"O a & b\" or \"-d a\"");
  qry->add_option("theory", theory_path, "Theory file")->required();
  qry->add_option("goal", goal, "Goal: [+|-](d|O) target")->required();
  qry->add_flag("--witness", witness, "Print a derivation for a positive answer");
  add_common(qry);

  std::string deriv_path;
  auto* chk = app.add_subcommand("check", "Check a derivation step by step");
  chk->add_option("theory", theory_path, "Theory file")->required();
  chk->add_option("derivation", deriv_path, "Derivation file, one tagged step per line")->required();
  add_common(chk);

  std::vector<std::string> removed;
  auto* red = app.add_subcommand("reduct", "Print the reduct of a theory by a set of literals");
  red->add_option("theory", theory_path, "Theory file")->required();
  red->add_option("literals", removed, "Literals to remove, e.g. ~a");
  add_common(red);

  ddl::FamilySpec spec;
  auto* gen = app.add_subcommand("gen", "Generate a theory");
  gen->add_option("family", spec.family, "Family")->required()->check(CLI::IsMember(ddl::family_names()));
  gen->add_option("--n", spec.n, "Atom count (chain length for chain-ctd)");
  gen->add_option("--r", spec.r, "Rule count (layered)");
  gen->add_option("--m", spec.m, "Conjunction count");
  gen->add_option("--k", spec.k, "Conjunct width");
  gen->add_option("--seed", spec.seed, "Random seed");

  std::vector<std::string> families{"layered"};
  std::string sizes = "100,200,400,800";
  std::size_t bm = 0, bk = 0, reps = 5;
  std::uint64_t bseed = 1;
  auto* bench = app.add_subcommand("bench", "Time extension computation over generated theories (CSV)");
  bench->add_option("--family", families, "Families to run")->check(CLI::IsMember(ddl::family_names()));
  bench->add_option("--sizes", sizes, "Comma-separated sizes");
  bench->add_option("--m", bm, "Conjunction count");
  bench->add_option("--k", bk, "Conjunct width");
  bench->add_option("--reps", reps, "Repetitions per size (at least 5)");
  bench->add_option("--seed", bseed, "Random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kMalformed;
  }

  try {
    if (*ext) return cmd_extension(theory_path, format, strict, trace);
    if (*qry) return cmd_query(theory_path, goal, strict, witness);
    if (*chk) return cmd_check(theory_path, deriv_path, format, strict);
    if (*red) return cmd_reduct(theory_path, removed, strict);
    if (*gen) {
      std::cout << ddl::serialize_theory(ddl::generate(spec));
      return kOk;
    }
    if (*bench) return cmd_bench(families, sizes, bm, bk, reps, bseed);
  } catch (const ddl::DependencyCycle& e) {
    std::cerr << "dependency cycle: " << e.what() << "\n";
    return kCycle;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kMalformed;
  }
  return kOk;
}
