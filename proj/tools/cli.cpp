#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "church_two.hpp"
#include "coill/equations.hpp"
#include "coill/prob.hpp"
#include "coill/reduce.hpp"

namespace coill::cli {

namespace {

using Json = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

bool has_suffix(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// A derivation given as a file name or inline script text.
Derivation load_derivation(const std::string& arg) {
  if (!std::filesystem::exists(arg) && !arg.empty() && arg.front() == '(') {
    return elaborate_script(arg);
  }
  return elaborate_script(read_file(arg));
}

// `.drv` files contribute the context of their conclusion.
ComputationalContext load_context(const std::string& arg) {
  bool inline_script = !arg.empty() && arg.front() == '(' && !std::filesystem::exists(arg);
  if (has_suffix(arg, ".drv") || inline_script) return load_derivation(arg).sequent().context();
  if (!std::filesystem::exists(arg) && arg.rfind("context", 0) == 0) return parse_context(arg);
  return parse_context(read_file(arg));
}

Json site_json(const Site& s) {
  return Json{{"boxes", s.boxes}, {"component", s.component}, {"path", s.path}};
}

Json issues_json(const CheckReport& r) {
  Json a = Json::array();
  for (const CheckIssue& i : r.issues) a.push_back({{"code", i.code}, {"path", i.path}, {"message", i.message}});
  return a;
}

std::vector<std::size_t> parse_choices(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stoul(item));
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "bad choice '" + item + "'");
    }
  }
  return out;
}

struct Options {
  bool json = false;
  std::string file;
  std::string other;
  bool step = false;
  std::size_t choose = 0;
  bool trace = false;
  std::size_t fuel = kDefaultFuel;
  std::string strategy = "leftmost";
  std::string choices;
  unsigned universe = 5;
  unsigned universe_max = 0;
  std::uint64_t seed = 42;
  std::size_t trials = 200;
  unsigned jobs = 1;
  std::string evt;
  std::string split = "left";
  std::string demo;
};

int cmd_parse(const Options& o, std::ostream& out) {
  std::string text = std::filesystem::exists(o.file) ? read_file(o.file) : o.file;
  std::string canonical;
  std::string kind;
  if (has_suffix(o.file, ".drv") || (!text.empty() && text.find_first_not_of(" \t\r\n") != std::string::npos &&
                                     text[text.find_first_not_of(" \t\r\n")] == '(')) {
    kind = "derivation";
    canonical = print_script(parse_script(text));
  } else if (has_suffix(o.file, ".ctx") || text.find("context") != std::string::npos) {
    kind = "context";
    canonical = print_context(parse_context(text));
  } else {
    kind = "term";
    canonical = print_term(parse_term(text));
  }
  if (o.json) {
    out << Json{{"kind", kind}, {"canonical", canonical}}.dump() << "\n";
  } else {
    out << canonical << "\n";
  }
  return 0;
}

int cmd_validate(const Options& o, std::ostream& out) {
  ValidationReport r = validate(load_context(o.file));
  if (o.json) {
    Json v = Json::array();
    for (const Violation& x : r.violations) {
      v.push_back({{"axiom", x.axiom}, {"path", x.path}, {"message", x.message}});
    }
    out << Json{{"ok", r.ok()}, {"violations", v}}.dump() << "\n";
  } else {
    out << (r.ok() ? "ok" : r.to_string()) << "\n";
  }
  return r.ok() ? 0 : 1;
}

int cmd_typecheck(const Options& o, std::ostream& out) {
  Derivation d = load_derivation(o.file);
  CheckReport r = check(d);
  if (o.json) {
    out << Json{{"ok", r.ok()}, {"sequent", print_sequent(d.sequent())}, {"issues", issues_json(r)}}.dump()
        << "\n";
  } else {
    out << print_sequent(d.sequent()) << "\n";
    if (!r.ok()) out << r.to_string() << "\n";
  }
  return r.ok() ? 0 : 1;
}

int cmd_reduce(const Options& o, std::ostream& out) {
  ComputationalContext c = load_context(o.file);
  std::vector<Redex> rs = find_redexes(c);
  if (!o.step) {
    if (o.json) {
      Json a = Json::array();
      for (const Redex& r : rs) a.push_back({{"kind", redex_kind_name(r.kind)}, {"site", site_json(r.site)}});
      out << a.dump() << "\n";
    } else {
      for (std::size_t i = 0; i < rs.size(); ++i) {
        out << i << ": " << redex_kind_name(rs[i].kind) << " at " << print_site(rs[i].site) << "\n";
      }
      if (rs.empty()) out << "no redexes\n";
    }
    return 0;
  }
  if (rs.empty()) throw Error(ErrorCode::StaleRedex, "no redex to reduce");
  if (o.choose >= rs.size()) {
    throw Error(ErrorCode::IndexOutOfRange, "redex " + std::to_string(o.choose) + " of " +
                                                std::to_string(rs.size()));
  }
  Trace t{{rs[o.choose], c, reduce_once(c, rs[o.choose])}};
  out << trace_to_jsonl(t);
  return 0;
}

int cmd_normalize(const Options& o, std::ostream& out, std::ostream& err) {
  ComputationalContext c = load_context(o.file);
  RedexChooser strategy;
  if (o.strategy == "leftmost") {
    strategy = leftmost_strategy();
  } else {
    strategy = scripted_strategy(parse_choices(o.choices));
  }
  try {
    NormalizeResult r = normalize(c, o.fuel, strategy);
    if (o.json) {
      Json trace = Json::array();
      std::istringstream lines(trace_to_jsonl(r.trace));
      for (std::string line; std::getline(lines, line);) trace.push_back(Json::parse(line));
      Json j{{"steps", r.trace.size()}, {"normal_form", print_context(r.context)}};
      if (o.trace) j["trace"] = trace;
      out << j.dump() << "\n";
      return 0;
    }
    if (o.trace) out << trace_to_jsonl(r.trace);
    out << r.trace.size() << (r.trace.size() == 1 ? " step" : " steps") << "\n"
        << print_context(r.context) << "\n";
    return 0;
  } catch (const FuelExhausted& e) {
    if (o.trace) out << trace_to_jsonl(e.trace());
    err << "error: FuelExhausted: " << e.what() << "\n";
    return 1;
  }
}

int cmd_eq(const Options& o, std::ostream& out) {
  Comparison c = compare_mod_theory(load_derivation(o.file), load_derivation(o.other));
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (const std::string& x : v) s += (s.empty() ? "" : ", ") + x;
    return s.empty() ? std::string("none") : s;
  };
  if (o.json) {
    out << Json{{"equal", c.equal},
                {"left", print_sequent(c.left.sequent)},
                {"right", print_sequent(c.right.sequent)},
                {"left_provenance", c.left.provenance},
                {"right_provenance", c.right.provenance}}
               .dump()
        << "\n";
  } else {
    out << (c.equal ? "equal" : "unequal") << "\n"
        << "left:  " << print_sequent(c.left.sequent) << "\n"
        << "right: " << print_sequent(c.right.sequent) << "\n"
        << "provenance: " << join(c.left.provenance) << " | " << join(c.right.provenance) << "\n";
  }
  return c.equal ? 0 : 1;
}

int cmd_laws(const Options& o, std::ostream& out) {
  std::vector<LawResult> rs = verify_builtin_laws();
  std::size_t passed = 0;
  for (const LawResult& r : rs) passed += r.pass ? 1 : 0;
  if (o.json) {
    out << laws_to_json(rs) << "\n";
  } else {
    for (const LawResult& r : rs) {
      out << (r.pass ? "pass " : "FAIL ") << r.name << "\n";
      if (!r.pass) {
        if (!r.error.empty()) out << "  error: " << r.error << "\n";
        if (!r.lhs.empty()) out << "  lhs: " << r.lhs << "\n  rhs: " << r.rhs << "\n";
      }
    }
    out << passed << "/" << rs.size() << " laws hold\n";
  }
  return passed == rs.size() ? 0 : 1;
}

int cmd_probcheck(const Options& o, std::ostream& out) {
  Derivation d = load_derivation(o.file);
  ParSplit split = o.split == "right" ? ParSplit::KeepRight : ParSplit::KeepLeft;
  if (!o.evt.empty()) {
    Assignment a = assignment_from_json(read_file(o.evt));
    CheckReport r = check_assignment(d, a);
    if (!r.ok()) {
      if (o.json) {
        out << Json{{"ok", false}, {"issues", issues_json(r)}}.dump() << "\n";
      } else {
        out << r.to_string() << "\n";
      }
      return 1;
    }
    std::vector<Event> parts = decompose(d, a, split);
    bool ok = verify_decomposition(d, a, split);
    if (o.json) {
      Json p = Json::array();
      for (Event e : parts) p.push_back(e.points());
      out << Json{{"ok", ok}, {"decomposition", p}}.dump() << "\n";
    } else {
      out << "decomposition:";
      for (Event e : parts) out << " " << print_event(e);
      out << "\n" << (ok ? "verified" : "NOT verified") << "\n";
    }
    return ok ? 0 : 1;
  }
  unsigned hi = std::max(o.universe, o.universe_max);
  SweepResult r = sweep(d, o.universe, hi, o.seed, o.trials, o.jobs);
  if (o.json) {
    out << Json{{"trials", r.trials}, {"passed", r.passed}, {"failing_seeds", r.failing_seeds}}.dump() << "\n";
  } else {
    out << r.passed << "/" << r.trials << " random assignments verified\n";
    for (std::uint64_t s : r.failing_seeds) out << "  failing seed " << s << "\n";
  }
  return r.passed == r.trials ? 0 : 1;
}

int cmd_translate(const Options& o, std::ostream& out) {
  std::string text = std::filesystem::exists(o.file) ? read_file(o.file) : o.file;
  std::string result;
  if (text.find("|-") != std::string::npos) {
    result = print_dual_sequent(girard_dual(parse_plain_sequent(text)));
  } else {
    result = print_formula(girard_dual(parse_plain_formula(text)));
  }
  if (o.json) {
    out << Json{{"input", text}, {"dual", result}}.dump() << "\n";
  } else {
    out << result << "\n";
  }
  return 0;
}

int cmd_demo(const Options& o, std::ostream& out) {
  if (o.demo != "church-two") {
    throw Error(ErrorCode::InvalidArgument, "unknown demo '" + o.demo + "'");
  }
  Derivation before = elaborate_script(kChurchTwoBefore);
  Derivation after = elaborate_script(kChurchTwoAfter);
  ComputationalContext c = before.sequent().context();
  out << "start: " << print_sequent(before.sequent()) << "\n";
  const RedexKind plan[] = {RedexKind::PostpMkc, RedexKind::StoreContraction};
  for (std::size_t i = 0; i < 2; ++i) {
    std::vector<Redex> rs = find_redexes(c);
    auto it = std::find_if(rs.begin(), rs.end(), [&](const Redex& r) { return r.kind == plan[i]; });
    if (it == rs.end()) {
      throw Error(ErrorCode::StaleRedex, "no " + std::string(redex_kind_name(plan[i])) + " redex");
    }
    c = reduce_once(c, *it);
    out << "step " << i + 1 << ": " << redex_kind_name(it->kind) << " at " << print_site(it->site) << "\n";
  }
  bool matches = alpha_equal(c, after.sequent().context());
  out << "matches expected two-step result: " << (matches ? "yes" : "no") << "\n";
  NormalizeResult r = normalize(c, 500);
  out << "normal form reached after " << r.trace.size() << " further steps\n"
      << print_context(r.context) << "\n";
  return matches ? 0 : 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kernel for co-intuitionistic linear logic", "coill"};
  app.require_subcommand(1);
  Options o;
  app.add_flag("--json", o.json, "JSON output");

  auto* parse = app.add_subcommand("parse", "Echo a term, context or script in canonical form");
  parse->add_option("input", o.file, "file or inline text")->required();

  auto* validate_cmd = app.add_subcommand("validate", "Check the correctness axioms of a context");
  validate_cmd->add_option("file", o.file)->required();

  auto* typecheck = app.add_subcommand("typecheck", "Elaborate and check a derivation script");
  typecheck->add_option("file", o.file)->required();

  auto* reduce = app.add_subcommand("reduce", "List redexes, or contract one with --step");
  reduce->add_option("file", o.file)->required();
  reduce->add_flag("--step", o.step, "contract one redex and print the trace");
  reduce->add_option("--choose", o.choose, "index of the redex to contract");

  auto* norm = app.add_subcommand("normalize", "Reduce to normal form");
  norm->add_option("file", o.file)->required();
  norm->add_flag("--trace", o.trace, "print a JSON line per step");
  norm->add_option("--fuel", o.fuel, "maximum number of steps");
  norm->add_option("--strategy", o.strategy)->check(CLI::IsMember({"leftmost", "interactive-script"}));
  norm->add_option("--choices", o.choices, "comma-separated redex indices for interactive-script");

  auto* eq = app.add_subcommand("eq", "Compare two derivations modulo the equational theory");
  eq->add_option("left", o.file)->required();
  eq->add_option("right", o.other)->required();

  app.add_subcommand("laws", "Verify the built-in equational laws");

  auto* prob = app.add_subcommand("probcheck", "Check the decomposition property");
  prob->add_option("file", o.file)->required();
  prob->add_option("--evt", o.evt, "assignment file to check instead of random ones");
  prob->add_option("--universe", o.universe, "universe size")->check(CLI::Range(1u, kMaxUniverse));
  prob->add_option("--universe-max", o.universe_max, "cycle universe sizes up to this bound")
      ->check(CLI::Range(1u, kMaxUniverse));
  prob->add_option("--seed", o.seed);
  prob->add_option("--trials", o.trials);
  prob->add_option("--jobs", o.jobs)->check(CLI::Range(1u, 64u));
  prob->add_option("--par-split", o.split)->check(CLI::IsMember({"left", "right"}));

  auto* translate = app.add_subcommand("translate", "Dual Girard translation of a formula or sequent");
  translate->add_option("input", o.file)->required();

  auto* demo = app.add_subcommand("demo", "Replay a worked example");
  demo->add_option("name", o.demo)->required()->check(CLI::IsMember({"church-two"}));

  for (auto* sub : app.get_subcommands({})) sub->add_flag("--json", o.json, "JSON output");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (parse->parsed()) return cmd_parse(o, out);
    if (validate_cmd->parsed()) return cmd_validate(o, out);
    if (typecheck->parsed()) return cmd_typecheck(o, out);
    if (reduce->parsed()) return cmd_reduce(o, out);
    if (norm->parsed()) return cmd_normalize(o, out, err);
    if (eq->parsed()) return cmd_eq(o, out);
    if (prob->parsed()) return cmd_probcheck(o, out);
    if (translate->parsed()) return cmd_translate(o, out);
    if (demo->parsed()) return cmd_demo(o, out);
    return cmd_laws(o, out);
  } catch (const Error& e) {
    err << "error: " << error_code_name(e.code()) << ": " << e.what() << "\n";
    return 1;
  }
}

}  // namespace coill::cli
