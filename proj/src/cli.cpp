#include "omega_cube/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "omega_cube/acceptance.hpp"
#include "omega_cube/congruence.hpp"
#include "omega_cube/contraction.hpp"
#include "omega_cube/examples.hpp"
#include "omega_cube/presentation.hpp"
#include "omega_cube/strict.hpp"
#include "omega_cube/term.hpp"

namespace omega_cube {

TruncationConfig RunConfig::resolve(TruncationConfig base) const {
  if (max_dim) base.max_dim = *max_dim;
  if (dirs) base.dir_universe = *dirs;
  if (depth) base.term_depth = *depth;
  if (budget) base.saturation_budget = *budget;
  base.validate();
  return base;
}

json RunConfig::to_json() const {
  json j{{"subcommand", subcommand}, {"inputs", inputs}, {"seed", seed}};
  if (!term1.empty()) j["t1"] = term1;
  if (!term2.empty()) j["t2"] = term2;
  if (!separator_path.empty()) j["separator"] = separator_path;
  if (!assign_path.empty()) j["assign"] = assign_path;
  return j;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw LoadError(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) throw LoadError("write failed: " + path);
}

namespace {

/// Collected output of one subcommand.
struct Outcome {
  json report;
  std::vector<std::string> lines;
  bool ok = true;
  json artifact;  // written to --out when present, else the report is
};

json header(const RunConfig& rc, const TruncationConfig& cfg) {
  json j = rc.to_json();
  j["config"] = cfg.to_json();
  return j;
}

std::string config_line(const RunConfig& rc, const TruncationConfig& cfg) {
  std::ostringstream s;
  s << "omega-cube " << rc.subcommand << ": max_dim=" << cfg.max_dim << " dirs=" << cfg.dir_universe
    << " depth=" << cfg.term_depth << " budget=" << cfg.saturation_budget << " seed=" << rc.seed;
  return s.str();
}

void describe(const Report& r, Outcome& o) {
  std::ostringstream s;
  s << "  " << r.name << ": ";
  if (r.ok()) {
    s << "ok (" << r.checked << " checks)";
  } else {
    s << r.violations.size() << " violation(s) over " << r.checked << " checks";
  }
  o.lines.push_back(s.str());
  for (std::size_t i = 0; i < r.violations.size() && i < 5; ++i) {
    const Violation& v = r.violations[i];
    std::string w;
    for (const auto& x : v.witnesses) w += (w.empty() ? "" : ", ") + x;
    o.lines.push_back("    [" + v.tag + "] " + v.message + (w.empty() ? "" : " {" + w + "}"));
  }
  if (!r.ok()) o.ok = false;
}

void add_reports(const std::vector<Report>& reports, Outcome& o) {
  json list = json::array();
  for (const auto& r : reports) {
    list.push_back(r.to_json());
    describe(r, o);
  }
  o.report["reports"] = std::move(list);
}

/// Loads a presentation and replaces its config by the resolved one.
PresentationPtr load_presentation(const std::string& path, const RunConfig& rc) {
  Presentation p = Presentation::from_json(read_json_file(path));
  p.set_config(rc.resolve(p.config()));
  return std::make_shared<const Presentation>(std::move(p));
}

Report truncation_report(const Presentation& p, const TruncationConfig& cfg) {
  Report r;
  r.name = "truncation";
  for (DirectionSet dirs : p.levels()) {
    ++r.checked;
    if (dirs.size() > cfg.max_dim)
      r.add("max-dim", "level " + level_key(dirs) + " exceeds max_dim " + std::to_string(cfg.max_dim));
    if (!dirs.subset_of(cfg.universe()))
      r.add("dir-universe", "level " + level_key(dirs) + " leaves the direction universe");
  }
  return r;
}

std::string document_kind(const json& j) {
  if (j.is_object() && j.contains("arrows")) return "category";
  if (j.is_object() && (j.contains("refl") || j.contains("dual") || j.contains("comp"))) return "strict";
  return "presentation";
}

Outcome cmd_validate(const RunConfig& rc) {
  Outcome o;
  const std::string& path = rc.inputs.at(0);
  json doc = read_json_file(path);
  std::string kind = document_kind(doc);
  std::vector<Report> reports;
  TruncationConfig cfg;
  if (kind == "category") {
    cfg = rc.resolve(cfg);
    reports.push_back(validate_one_category(InvolutiveOneCategory::from_json(doc)));
  } else if (kind == "strict") {
    StrictCategoryTable table = StrictCategoryTable::from_json(doc);
    cfg = rc.resolve(table.config());
    reports.push_back(truncation_report(table.cells(), cfg));
    reports.push_back(validate_quiver(table.cells()));
    reports.push_back(validate_cubical_axioms(table.cells()));
    reports.push_back(validate_strict(table));
    reports.push_back(validate_involutive(table));
  } else {
    Presentation p = Presentation::from_json(doc);
    cfg = rc.resolve(p.config());
    reports.push_back(truncation_report(p, cfg));
    reports.push_back(validate_quiver(p));
    reports.push_back(validate_cubical_axioms(p));
  }
  o.report = header(rc, cfg);
  o.report["kind"] = kind;
  o.lines.push_back(config_line(rc, cfg));
  o.lines.push_back("  input " + path + " (" + kind + ")");
  add_reports(reports, o);
  o.report["ok"] = o.ok;
  return o;
}

Outcome cmd_enumerate(const RunConfig& rc) {
  Outcome o;
  PresentationPtr p = load_presentation(rc.inputs.at(0), rc);
  const TruncationConfig& cfg = p->config();
  auto store = std::make_shared<TermStore>(p);
  TermUniverse u = enumerate_free_magma(store, cfg);
  o.report = header(rc, cfg);
  o.report["universe_size"] = u.size();
  o.report["truncated"] = u.truncated();
  o.report["level_counts"] = u.level_counts();
  o.lines.push_back(config_line(rc, cfg));
  o.lines.push_back("  " + std::to_string(u.size()) + " terms" + (u.truncated() ? " (truncated)" : ""));
  for (const auto& [key, n] : u.level_counts()) o.lines.push_back("    " + key + ": " + std::to_string(n));
  add_reports({check_cubical_on_terms(u)}, o);
  json terms = json::array();
  for (TermId t : u.terms()) terms.push_back(store->print(t));
  o.artifact = json{{"config", cfg.to_json()}, {"level_counts", u.level_counts()}, {"terms", std::move(terms)}};
  if (rc.verbosity > 0)
    for (TermId t : u.terms()) o.lines.push_back("    " + store->print(t));
  o.report["ok"] = o.ok;
  return o;
}

/// Assignment files hold {"map": {...}}; eval inputs also carry the source "presentation".
std::shared_ptr<const GeneratorAssignment> load_assignment(const json& doc, PresentationPtr source,
                                                           StrictTablePtr target) {
  SetMorphism m = SetMorphism::from_json(doc, source, target->cells_ptr());
  return std::make_shared<const GeneratorAssignment>(std::move(m), std::move(target));
}

bool word_separator_applies(const Presentation& p) {
  int directions = 0;
  for (DirectionSet dirs : p.levels()) {
    if (dirs.size() > 1) return false;
    if (dirs.size() == 1) ++directions;
  }
  return directions <= 1;
}

Outcome cmd_decide(const RunConfig& rc) {
  if (rc.term1.empty() || rc.term2.empty()) throw UsageError("decide needs --t1 and --t2");
  Outcome o;
  PresentationPtr p = load_presentation(rc.inputs.at(0), rc);
  const TruncationConfig& cfg = p->config();
  auto store = std::make_shared<TermStore>(p);
  TermId t1 = parse_term(*store, rc.term1);
  TermId t2 = parse_term(*store, rc.term2);
  TermUniverse u = enumerate_free_magma(store, cfg);
  u.insert(t1);
  u.insert(t2);
  u.sort();

  CongruenceSession session(store);
  session.add_universe(u);
  session.seed(instantiate_relations(u, RelationMode::strict));
  SaturationStats stats = session.saturate(cfg.saturation_budget);

  std::vector<Separator> separators;
  if (!rc.separator_path.empty()) {
    json sep = read_json_file(rc.separator_path);
    auto table = std::make_shared<const StrictCategoryTable>(StrictCategoryTable::from_json(sep));
    json assign;
    if (!rc.assign_path.empty()) {
      assign = read_json_file(rc.assign_path);
    } else if (sep.contains("assign")) {
      assign = sep.at("assign");
    } else {
      throw UsageError("--separator needs --assign or an \"assign\" object in the separator file");
    }
    separators.push_back(make_separator(*store, load_assignment(assign, p, table), rc.separator_path));
  }
  if (word_separator_applies(*p)) separators.push_back(make_word_separator(*store, static_cast<int>(u.max_size())));

  Decision d = decide_equal(session, t1, t2, separators);
  Report audit = session.audit();
  o.report = header(rc, cfg);
  o.report["universe_size"] = u.size();
  o.report["saturation"] = stats.to_json();
  o.report["separators"] = separators.size();
  o.report["decision"] = decision_to_json(d, *store);
  o.lines.push_back(config_line(rc, cfg));
  o.lines.push_back("  " + store->print(t1) + "  vs  " + store->print(t2));
  o.lines.push_back(std::string("  verdict: ") + verdict_name(d.verdict));
  if (d.verdict == Verdict::equal) {
    for (const auto& step : d.trace)
      o.lines.push_back("    " + store->print(step.from) + " ~ " + store->print(step.to) + "  (" + step.reason + ")");
  } else if (d.verdict == Verdict::not_equal) {
    o.lines.push_back("    separated by " + d.separator + ": " + d.left_image + " != " + d.right_image);
  } else if (!d.note.empty()) {
    o.lines.push_back("    " + d.note);
  }
  add_reports({audit}, o);
  o.report["ok"] = o.ok;
  return o;
}

Outcome cmd_product(const RunConfig& rc) {
  Outcome o;
  std::vector<InvolutiveOneCategory> factors;
  for (const auto& path : rc.inputs) factors.push_back(InvolutiveOneCategory::from_json(read_json_file(path)));
  TruncationConfig base;
  base.dir_universe = static_cast<int>(factors.size());
  base.max_dim = std::min(2, base.dir_universe);
  TruncationConfig cfg = rc.resolve(base);
  ProductTable product = build_product(factors, cfg);
  const StrictCategoryTable& table = *product.table();
  o.report = header(rc, cfg);
  json names = json::array();
  for (const auto& f : factors) names.push_back(f.name);
  o.report["factors"] = std::move(names);
  o.report["cells"] = table.cells().size();
  o.lines.push_back(config_line(rc, cfg));
  o.lines.push_back("  " + std::to_string(factors.size()) + " factors, " + std::to_string(table.cells().size()) +
                    " cells");
  add_reports({validate_quiver(table.cells()), validate_cubical_axioms(table.cells()), validate_strict(table),
               validate_involutive(table)},
              o);
  o.artifact = table.to_json();
  o.report["ok"] = o.ok;
  return o;
}

Outcome cmd_contract(const RunConfig& rc, std::ostream& err) {
  Outcome o;
  PresentationPtr p = load_presentation(rc.inputs.at(0), rc);
  const TruncationConfig& cfg = p->config();
  ContractionData cd = build_free_contraction(p, cfg);
  if (rc.verbosity > 0)
    for (const auto& line : cd.log()) err << line << '\n';
  o.report = header(rc, cfg);
  json stages = json::array();
  for (const auto& s : cd.stages()) stages.push_back(s.to_json());
  o.report["stages"] = std::move(stages);
  o.report["complete"] = cd.complete();
  o.report["kappa_entries"] = cd.kappa_table().size();
  o.lines.push_back(config_line(rc, cfg));
  for (const auto& s : cd.stages()) {
    o.lines.push_back("  stage " + std::to_string(s.dim) + ": " + std::to_string(s.universe_size) + " terms, " +
                      std::to_string(s.kappa_entries) + " kappa entries, " + std::to_string(s.excluded_pairs) +
                      " excluded pairs" + (s.complete() ? "" : " (incomplete)"));
  }
  add_reports({validate_contraction(cd)}, o);
  o.artifact = cd.to_json();
  o.report["ok"] = o.ok;
  return o;
}

Outcome cmd_eval(const RunConfig& rc) {
  if (rc.assign_path.empty() || rc.term1.empty()) throw UsageError("eval needs --assign and --term");
  Outcome o;
  auto table = std::make_shared<const StrictCategoryTable>(StrictCategoryTable::from_json(read_json_file(rc.inputs.at(0))));
  json assign = read_json_file(rc.assign_path);
  if (!assign.contains("presentation")) throw LoadError("assignment needs a \"presentation\" object");
  Presentation source = Presentation::from_json(assign.at("presentation"));
  TruncationConfig cfg = rc.resolve(source.config());
  source.set_config(cfg);
  auto source_ptr = std::make_shared<const Presentation>(std::move(source));
  auto assignment = load_assignment(assign, source_ptr, table);
  auto store = std::make_shared<TermStore>(source_ptr);
  TermId t = parse_term(*store, rc.term1);
  o.report = header(rc, cfg);
  o.report["term"] = store->print(t);
  o.lines.push_back(config_line(rc, cfg));
  try {
    CellId v = eval_term(*store, t, *assignment);
    o.report["value"] = table->cells().qualified_name(v);
    o.report["level"] = level_key(table->cells().cell(v).dirs);
    o.lines.push_back("  " + store->print(t) + " = " + table->cells().qualified_name(v));
  } catch (const DomainError& e) {
    o.ok = false;
    o.report["error"] = e.what();
    o.lines.push_back(std::string("  evaluation failed: ") + e.what());
  }
  o.report["ok"] = o.ok;
  return o;
}

Outcome cmd_oracle(const RunConfig& rc) {
  Outcome o;
  PresentationPtr p = load_presentation(rc.inputs.at(0), rc);
  const TruncationConfig& cfg = p->config();
  if (!word_separator_applies(*p)) throw UsageError("oracle needs a presentation of dimension at most 1 in one direction");
  OracleResult res = oracle_compare(p, cfg);
  o.report = header(rc, cfg);
  o.report["oracle"] = res.to_json();
  o.lines.push_back(config_line(rc, cfg));
  o.lines.push_back("  " + std::to_string(res.pairs) + " pairs: " + std::to_string(res.equal) + " equal, " +
                    std::to_string(res.not_equal) + " not equal, " + std::to_string(res.unknown) + " unknown");
  describe(res.report, o);
  o.report["ok"] = o.ok;
  return o;
}

Outcome cmd_check_all(const RunConfig& rc) {
  Outcome o;
  AcceptanceOptions opts;
  opts.seed = rc.seed;
  if (rc.budget) opts.budget = *rc.budget;
  AcceptanceReport rep = run_acceptance(opts);
  o.report = rc.to_json();
  o.report["acceptance"] = rep.to_json();
  o.ok = rep.all_pass();
  o.report["ok"] = o.ok;
  o.lines.push_back("omega-cube check-all: seed=" + std::to_string(rc.seed) + " budget=" + std::to_string(opts.budget));
  for (const auto& c : rep.criteria) {
    std::ostringstream s;
    s << (c.pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.title << ": " << c.summary;
    o.lines.push_back(s.str());
  }
  return o;
}

void add_common(CLI::App* sub, RunConfig& rc) {
  sub->add_option("--max-dim", rc.max_dim, "Maximum cell dimension");
  sub->add_option("--dirs", rc.dirs, "Size of the direction universe {1..K}");
  sub->add_option("--depth", rc.depth, "Term depth (terms have at most depth+1 nodes)");
  sub->add_option("--budget", rc.budget, "Saturation node budget");
  sub->add_option("--seed", rc.seed, "Seed for randomized checks")->capture_default_str();
  sub->add_option("--out", rc.out_path, "Write the JSON artifact or report to this file");
  sub->add_flag("--json", rc.json_output, "Print the JSON report instead of the summary");
  sub->add_flag("-v,--verbose", rc.verbosity, "More output");
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  RunConfig rc;
  rc.seed = kDefaultSeed;
  CLI::App app{"Truncated involutive cubical omega-categories: models, word problems and free contractions",
               "omega-cube"};
  app.require_subcommand(1, 1);

  auto* validate = app.add_subcommand("validate", "Validate a presentation, strict table or 1-category");
  validate->add_option("file", rc.inputs, "JSON document")->required()->expected(1);
  auto* enumerate = app.add_subcommand("enumerate", "Enumerate the free magma up to the term depth");
  enumerate->add_option("presentation", rc.inputs, "Presentation JSON")->required()->expected(1);
  auto* decide = app.add_subcommand("decide", "Decide equality of two terms in the free strict category");
  decide->add_option("presentation", rc.inputs, "Presentation JSON")->required()->expected(1);
  decide->add_option("--t1", rc.term1, "First term")->required();
  decide->add_option("--t2", rc.term2, "Second term")->required();
  decide->add_option("--separator", rc.separator_path, "Strict table used as a separating model");
  decide->add_option("--assign", rc.assign_path, "Generator assignment into the separator");
  auto* product = app.add_subcommand("product", "Build and validate the product of involutive 1-categories");
  product->add_option("categories", rc.inputs, "Factor JSON files, one per direction")->required();
  auto* contract = app.add_subcommand("contract", "Build and validate the free contraction");
  contract->add_option("presentation", rc.inputs, "Presentation JSON")->required()->expected(1);
  auto* eval = app.add_subcommand("eval", "Evaluate a term in a strict table");
  eval->add_option("table", rc.inputs, "Strict table JSON")->required()->expected(1);
  eval->add_option("--assign", rc.assign_path, "Generator assignment JSON")->required();
  eval->add_option("--term", rc.term1, "Term to evaluate")->required();
  auto* oracle = app.add_subcommand("oracle", "Compare congruence verdicts with dimension-1 normal forms");
  oracle->add_option("quiver", rc.inputs, "Presentation JSON")->required()->expected(1);
  auto* check_all = app.add_subcommand("check-all", "Run the acceptance suite");
  for (auto* sub : {validate, enumerate, decide, product, contract, eval, oracle, check_all}) add_common(sub, rc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  rc.subcommand = app.get_subcommands().front()->get_name();

  Outcome o;
  try {
    if (rc.subcommand == "validate") o = cmd_validate(rc);
    else if (rc.subcommand == "enumerate") o = cmd_enumerate(rc);
    else if (rc.subcommand == "decide") o = cmd_decide(rc);
    else if (rc.subcommand == "product") o = cmd_product(rc);
    else if (rc.subcommand == "contract") o = cmd_contract(rc, err);
    else if (rc.subcommand == "eval") o = cmd_eval(rc);
    else if (rc.subcommand == "oracle") o = cmd_oracle(rc);
    else o = cmd_check_all(rc);

    if (!rc.out_path.empty()) write_json_file(rc.out_path, o.artifact.is_null() ? o.report : o.artifact);
  } catch (const Error& e) {
    err << "omega-cube " << rc.subcommand << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const json::exception& e) {
    err << "omega-cube " << rc.subcommand << ": bad JSON: " << e.what() << '\n';
    return kExitUsage;
  }

  if (rc.json_output) {
    out << o.report.dump(2) << '\n';
  } else {
    for (const auto& line : o.lines) out << line << '\n';
    out << (o.ok ? "ok" : "FAILED") << '\n';
  }
  return o.ok ? kExitOk : kExitChecksFailed;
}

}  // namespace omega_cube
