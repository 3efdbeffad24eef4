#pragma once

// Command drivers behind the CLI.  The verify lane exercises the module
// pipeline (witness build, Gram check, defect, bridge) while the oracle
// lane only ever calls the counting reimplementation, so the two never
// share a witness or defect code path and their agreement stays evidence.

#include <cstdint>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "asymptotic.hpp"
#include "config.hpp"
#include "corona.hpp"
#include "group.hpp"
#include "oracle.hpp"
#include "report.hpp"
#include "witness.hpp"

namespace treewitness {

// Canonical probe vertex on the outer sphere of the window, pushed out
// past gamma1 so both distance constraints of the far region hold.
inline std::optional<Vertex> far_basepoint(const GroupAction& action, std::int64_t i,
                                           std::int64_t n, const GroupElement& g1) {
  TreeGeometry tree = action.tree();
  Vertex o = tree.basepoint();
  Vertex g1o = action.apply(g1, o);
  Vertex probe;
  if (action.family() == GroupFamily::free_group) {
    Word w = std::get<Word>(g1o);
    while (static_cast<std::int64_t>(w.length()) < 2 * n) {
      std::int8_t last = w.empty() ? std::int8_t(0) : w.letter(w.length() - 1);
      std::int8_t next = 0;
      for (int g = 1; g <= tree.rank() && next == 0; ++g) {
        if (last != static_cast<std::int8_t>(-g)) next = static_cast<std::int8_t>(g);
        else next = static_cast<std::int8_t>(-g);
      }
      w.push_reduced(next);
    }
    probe = w;
  } else {
    std::int64_t side = std::get<LinePoint>(g1o).pos >= 0 ? 1 : -1;
    probe = LinePoint{side * 2 * n};
  }
  std::int64_t d1 = tree.distance(o, probe);
  std::int64_t d2 = tree.distance(g1o, probe);
  if (d1 < i || d1 > 2 * n || d2 < i || d2 > 2 * n) return std::nullopt;
  return probe;
}

// Witness columns are scaled indicators, so nonnegativity should hold at
// every vertex; checked densely on small windows and on one vertex per
// distance class otherwise.
inline bool positivity_check(const GroupAction& action, std::int64_t i, std::int64_t n) {
  TreeGeometry tree = action.tree();
  auto nonneg_at = [&](const Vertex& t) {
    for (const GroupElement& g : orbit_geodesic_set(action, i, t))
      if (witness_value(action, i, n, g, t).sign() < 0) return false;
    return true;
  };
  if (tree.ball_size(2 * n) <= Integer(dense_vertex_limit)) {
    for (const Vertex& t : tree.ball(tree.basepoint(), 2 * n))
      if (!nonneg_at(t)) return false;
    return true;
  }
  for (std::int64_t d = 0; d <= 2 * n; ++d)
    if (!nonneg_at(distance_representative(tree, d))) return false;
  return true;
}

struct VerifyCell {
  std::string family;
  std::string gamma1;
  std::int64_t k = 0;
  std::int64_t i = 0;
  std::int64_t n = 0;
  std::optional<bool> positivity;
  std::optional<bool> gram;
  std::optional<DefectValue> defect;
  std::optional<bool> stability;
  std::optional<AlgebraicReal> l1;
  std::optional<bool> bridge;
  bool bridge_skipped = false;  // no canonical far basepoint under an explicit n
  bool pass = true;
};

inline VerifyCell verify_cell(const GroupAction& action, const RunConfig& config,
                              const GroupElement& g1, std::int64_t i) {
  VerifyCell cell;
  cell.family = action.name();
  cell.gamma1 = action.element_str(g1);
  cell.k = action.displacement(g1);
  cell.i = i;
  cell.n = config.window_n ? *config.window_n : i + cell.k + 2;
  if (config.enabled("positivity")) cell.positivity = positivity_check(action, i, cell.n);
  if (config.enabled("gram")) cell.gram = gram_check(action, i, cell.n).ok;
  if (config.enabled("defect") || config.enabled("stability") || config.enabled("bridge"))
    cell.defect = defect_sq(action, i, cell.n, g1);
  if (config.enabled("stability")) {
    auto rows = defect_sweep(action, i, g1, cell.n, cell.n + config.stability_span);
    cell.stability = defect_stable(rows);
  }
  if (config.enabled("bridge")) {
    std::optional<Vertex> probe = far_basepoint(action, i, cell.n, g1);
    if (probe) {
      cell.l1 = l1_defect(action, i, cell.n, g1, *probe);
      AlgebraicReal margin =
          AlgebraicReal(4) * cell.defect->value - *cell.l1 * *cell.l1;
      cell.bridge = margin.sign() >= 0;
    } else {
      cell.bridge_skipped = true;
    }
  }
  for (const std::optional<bool>& flag :
       {cell.positivity, cell.gram, cell.stability, cell.bridge})
    if (flag && !*flag) cell.pass = false;
  return cell;
}

inline std::string flag_str(const std::optional<bool>& flag) {
  if (!flag) return "-";
  return *flag ? "true" : "false";
}

struct RunOutput {
  int exit_code = 0;
  std::string summary;
  std::vector<ReportFile> files;
};

template <typename Result, typename Worker>
std::vector<Result> run_cells(std::size_t count, int jobs, Worker worker) {
  std::vector<Result> out(count);
  if (jobs <= 1) {
    for (std::size_t c = 0; c < count; ++c) out[c] = worker(c);
    return out;
  }
  for (std::size_t base = 0; base < count; base += static_cast<std::size_t>(jobs)) {
    std::size_t stop = std::min(count, base + static_cast<std::size_t>(jobs));
    std::vector<std::future<Result>> wave;
    for (std::size_t c = base; c < stop; ++c)
      wave.push_back(std::async(std::launch::async, worker, c));
    for (std::size_t c = base; c < stop; ++c) out[c] = wave[c - base].get();
  }
  return out;
}

struct CellPlan {
  GroupElement g1;
  std::int64_t i = 0;
};

inline std::vector<CellPlan> plan_cells(const GroupAction& action,
                                        const RunConfig& config) {
  std::vector<CellPlan> plan;
  for (const std::string& text : config.gamma1)
    for (std::int64_t i : config.i_values)
      plan.push_back(CellPlan{action.parse_element(text), i});
  return plan;
}

inline RunOutput run_verify(const RunConfig& config) {
  GroupAction action = GroupAction::from_name(config.group);
  std::vector<CellPlan> plan = plan_cells(action, config);
  std::vector<VerifyCell> cells = run_cells<VerifyCell>(
      plan.size(), config.jobs,
      [&](std::size_t c) { return verify_cell(action, config, plan[c].g1, plan[c].i); });

  bool all_pass = true;
  Table table;
  table.header = {"family", "gamma1", "k", "i", "n", "positivity", "gram",
                  "region_size", "defect_sq_exact", "defect_sq_float", "stability",
                  "l1_exact", "l1_float", "bridge_ok", "pass"};
  nlohmann::ordered_json cells_doc = nlohmann::ordered_json::array();
  std::string lines;
  for (const VerifyCell& cell : cells) {
    all_pass = all_pass && cell.pass;
    std::string region = cell.defect ? cell.defect->region_size.str() : "-";
    std::string defect_exact = cell.defect ? cell.defect->value.str() : "-";
    std::string defect_float = cell.defect ? float_str(cell.defect->value.to_float().value) : "-";
    std::string bridge = cell.bridge_skipped ? "skipped" : flag_str(cell.bridge);
    table.add_row({cell.family, cell.gamma1, std::to_string(cell.k),
                   std::to_string(cell.i), std::to_string(cell.n),
                   flag_str(cell.positivity), flag_str(cell.gram), region, defect_exact,
                   defect_float, flag_str(cell.stability),
                   cell.l1 ? cell.l1->str() : "-",
                   cell.l1 ? float_str(cell.l1->to_float().value) : "-", bridge,
                   cell.pass ? "true" : "false"});

    nlohmann::ordered_json doc;
    doc["family"] = cell.family;
    doc["gamma1"] = cell.gamma1;
    doc["k"] = cell.k;
    doc["i"] = cell.i;
    doc["n"] = cell.n;
    if (cell.positivity) doc["positivity"] = *cell.positivity;
    if (cell.gram) doc["gram"] = *cell.gram;
    if (cell.defect) {
      doc["region_size"] = cell.defect->region_size.str();
      doc["region_empty"] = cell.defect->region_empty;
      doc["lane"] = cell.defect->dense_lane ? "dense" : "classes";
      doc["defect_sq_exact"] = cell.defect->value.str();
      doc["defect_sq_float"] = cell.defect->value.to_float().value;
    }
    if (cell.stability) doc["stability"] = *cell.stability;
    if (cell.l1) {
      doc["l1_exact"] = cell.l1->str();
      doc["l1_float"] = cell.l1->to_float().value;
    }
    if (cell.bridge_skipped) doc["bridge"] = "skipped";
    else if (cell.bridge) doc["bridge"] = *cell.bridge;
    doc["pass"] = cell.pass;
    cells_doc.push_back(doc);

    lines += cell.family + " gamma1=" + cell.gamma1 + " i=" + std::to_string(cell.i) +
             " n=" + std::to_string(cell.n) + " defect_sq=" + defect_exact +
             (cell.pass ? " ok" : " FAIL") + "\n";
  }

  RunOutput out;
  out.exit_code = all_pass ? 0 : 1;
  out.summary = lines + (all_pass ? "verify: all checks passed\n"
                                  : "verify: some checks failed\n");
  if (config.format == "csv") {
    out.files.push_back({"verify_report.csv", table.csv()});
  } else {
    nlohmann::ordered_json doc;
    doc["config"] = config_echo(config);
    doc["cells"] = cells_doc;
    doc["all_pass"] = all_pass;
    out.files.push_back({"verify_report.json", doc.dump(2) + "\n"});
  }
  return out;
}

struct OracleCell {
  std::string family;
  std::string gamma1;
  std::int64_t k = 0;
  std::int64_t i = 0;
  std::int64_t n = 0;
  std::string probe;
  std::uint64_t support_measured = 0;
  Integer support_stated;
  std::uint64_t shared_measured = 0;
  Integer shared_stated;
  AlgebraicReal cross;
  oracle::OracleDefect defect;
  AlgebraicReal closed_form;
  AlgebraicReal stated_defect;
  bool support_match = false;
  bool shared_match = false;
  bool closed_match = false;
  bool stated_match = false;
};

inline OracleCell oracle_cell(const GroupAction& action, const RunConfig& config,
                              const GroupElement& g1, std::int64_t i) {
  OracleCell cell;
  cell.family = action.name();
  cell.gamma1 = action.element_str(g1);
  cell.k = action.displacement(g1);
  cell.i = i;
  cell.n = config.window_n ? *config.window_n : i + cell.k + 2;
  std::optional<Vertex> probe = far_basepoint(action, i, cell.n, g1);
  if (!probe)
    throw std::length_error("oracle: window holds no far probe vertex for i=" +
                            std::to_string(i) + " n=" + std::to_string(cell.n));
  cell.probe = vertex_str(*probe);
  int m = static_cast<int>(oracle::orbit_multiplicity(action));
  std::int64_t d = action.tree().distance(action.tree().basepoint(), *probe);

  cell.support_measured = oracle::support_count(action, i, *probe);
  cell.support_stated = oracle::proposed_support_count(i, d, m);
  cell.support_match = Integer(cell.support_measured) == cell.support_stated;

  cell.shared_measured = oracle::shared_count(action, i, g1, *probe);
  cell.shared_stated = oracle::proposed_shared_count(i, cell.k);
  cell.shared_match = Integer(cell.shared_measured) == cell.shared_stated;

  cell.cross = oracle::cross_value(action, i, cell.n, g1, *probe);
  cell.defect = oracle::defect_sq(action, i, cell.n, g1);
  cell.closed_form = oracle::closed_form_defect_sq(i, cell.k);
  cell.closed_match = compare(cell.defect.value, cell.closed_form) == 0;
  cell.stated_defect = oracle::proposed_defect_sq(i, cell.k, m);
  cell.stated_match = compare(cell.defect.value, cell.stated_defect) == 0;
  return cell;
}

inline RunOutput run_oracle(const RunConfig& config) {
  GroupAction action = GroupAction::from_name(config.group);
  std::vector<CellPlan> plan = plan_cells(action, config);
  std::vector<OracleCell> cells = run_cells<OracleCell>(
      plan.size(), config.jobs,
      [&](std::size_t c) { return oracle_cell(action, config, plan[c].g1, plan[c].i); });

  Table table;
  table.header = {"family", "gamma1", "k", "i", "n", "probe", "support_measured",
                  "support_stated", "support_match", "shared_measured", "shared_stated",
                  "shared_match", "cross_exact", "region_size", "defect_sq_exact",
                  "defect_sq_float", "closed_form_exact", "closed_form_match",
                  "stated_defect_exact", "stated_defect_match"};
  nlohmann::ordered_json cells_doc = nlohmann::ordered_json::array();
  std::string lines;
  for (const OracleCell& cell : cells) {
    table.add_row({cell.family, cell.gamma1, std::to_string(cell.k),
                   std::to_string(cell.i), std::to_string(cell.n), cell.probe,
                   std::to_string(cell.support_measured), cell.support_stated.str(),
                   cell.support_match ? "true" : "false",
                   std::to_string(cell.shared_measured), cell.shared_stated.str(),
                   cell.shared_match ? "true" : "false", cell.cross.str(),
                   cell.defect.region_size.str(), cell.defect.value.str(),
                   float_str(cell.defect.value.to_float().value), cell.closed_form.str(),
                   cell.closed_match ? "true" : "false", cell.stated_defect.str(),
                   cell.stated_match ? "true" : "false"});

    nlohmann::ordered_json doc;
    doc["family"] = cell.family;
    doc["gamma1"] = cell.gamma1;
    doc["k"] = cell.k;
    doc["i"] = cell.i;
    doc["n"] = cell.n;
    doc["probe"] = cell.probe;
    doc["support_measured"] = cell.support_measured;
    doc["support_stated"] = cell.support_stated.str();
    doc["support_match"] = cell.support_match;
    doc["shared_measured"] = cell.shared_measured;
    doc["shared_stated"] = cell.shared_stated.str();
    doc["shared_match"] = cell.shared_match;
    doc["cross_exact"] = cell.cross.str();
    doc["region_size"] = cell.defect.region_size.str();
    doc["region_empty"] = cell.defect.region_empty;
    doc["defect_sq_exact"] = cell.defect.value.str();
    doc["defect_sq_float"] = cell.defect.value.to_float().value;
    doc["closed_form_exact"] = cell.closed_form.str();
    doc["closed_form_match"] = cell.closed_match;
    doc["stated_defect_exact"] = cell.stated_defect.str();
    doc["stated_defect_match"] = cell.stated_match;
    cells_doc.push_back(doc);

    lines += cell.family + " gamma1=" + cell.gamma1 + " i=" + std::to_string(cell.i) +
             " oracle_defect_sq=" + cell.defect.value.str() +
             (cell.closed_match ? " closed-form-match" : " closed-form-miss") + "\n";
  }

  RunOutput out;
  out.summary = lines + "oracle: measurements reported\n";
  if (config.format == "csv") {
    out.files.push_back({"oracle_report.csv", table.csv()});
  } else {
    nlohmann::ordered_json doc;
    doc["config"] = config_echo(config);
    doc["cells"] = cells_doc;
    out.files.push_back({"oracle_report.json", doc.dump(2) + "\n"});
  }
  return out;
}

// Comparison table between the pipeline defect, the oracle, and the stated
// closed form; the paper_formula_value column name is part of the report
// contract consumed downstream.
inline RunOutput run_defect_table(const RunConfig& config) {
  GroupAction action = GroupAction::from_name(config.group);
  std::vector<CellPlan> plan = plan_cells(action, config);

  struct Row {
    VerifyCell cell;
    oracle::OracleDefect check;
    AlgebraicReal stated;
  };
  RunConfig defect_only = config;
  defect_only.checks = {"defect", "stability"};
  std::vector<Row> rows = run_cells<Row>(plan.size(), config.jobs, [&](std::size_t c) {
    Row row;
    row.cell = verify_cell(action, defect_only, plan[c].g1, plan[c].i);
    row.check = oracle::defect_sq(action, plan[c].i, row.cell.n, plan[c].g1);
    row.stated = oracle::proposed_defect_sq(plan[c].i, row.cell.k,
                                            static_cast<int>(oracle::orbit_multiplicity(action)));
    return row;
  });

  Table table;
  table.header = {"family", "gamma1", "k", "i", "n", "region_size", "defect_sq_exact",
                  "defect_sq_float", "oracle_defect_sq_exact", "paper_formula_value",
                  "match_oracle", "stability"};
  std::string lines;
  bool all_match = true;
  for (const Row& row : rows) {
    const DefectValue& defect = *row.cell.defect;
    bool match = compare(defect.value, row.check.value) == 0 &&
                 defect.region_size == row.check.region_size;
    all_match = all_match && match && row.cell.stability.value_or(false);
    table.add_row({row.cell.family, row.cell.gamma1, std::to_string(row.cell.k),
                   std::to_string(row.cell.i), std::to_string(row.cell.n),
                   defect.region_size.str(), defect.value.str(),
                   float_str(defect.value.to_float().value), row.check.value.str(),
                   row.stated.str(), match ? "true" : "false",
                   row.cell.stability.value_or(false) ? "stable" : "unstable"});
    lines += row.cell.family + " gamma1=" + row.cell.gamma1 +
             " i=" + std::to_string(row.cell.i) + " defect_sq=" + defect.value.str() +
             (match ? " oracle-match" : " ORACLE-MISS") + "\n";
  }

  RunOutput out;
  out.exit_code = all_match ? 0 : 1;
  out.summary = lines + (all_match ? "defect-table: oracle agreement on every row\n"
                                   : "defect-table: disagreement found\n");
  out.files.push_back({"defect_table.csv", table.csv()});
  return out;
}

inline RunOutput run_corona_demo(const RunConfig& config) {
  DiscretizedSpace seg = DiscretizedSpace::integer_segment(40);
  const std::size_t stages = 20;
  std::vector<std::pair<std::string, FunctionSequence>> suite;
  suite.emplace_back("bump", bump_family(seg, stages));
  suite.emplace_back("reciprocal", reciprocal_family(seg, stages));
  suite.emplace_back("product", stage_product(bump_family(seg, stages),
                                              reciprocal_family(seg, stages)));
  suite.emplace_back("sum", stage_sum(bump_family(seg, stages),
                                      reciprocal_family(seg, stages)));
  suite.emplace_back("random_tail", random_tail_family(seg, stages, 7));

  Table table;
  table.header = {"sequence", "stages", "ideal_accepted", "cutoff_bound",
                  "final_level", "final_radius", "tail_seminorm_r10"};
  std::string lines;
  bool ok = true;
  for (const auto& [name, seq] : suite) {
    CutoffProjection proj = cutoff_project(seq);
    bool bound = cutoff_bound_holds(seq, proj);
    ok = ok && bound;
    IdealWitness w = ideal_witness(proj.trimmed, 0.0);
    std::optional<double> last = w.radii.back();
    table.add_row({name, std::to_string(stages), w.accepted ? "true" : "false",
                   bound ? "true" : "false", std::to_string(proj.levels.back()),
                   last ? float_str(*last) : "-",
                   float_str(corona_seminorm(seq, 10.0,
                                             static_cast<std::int64_t>(stages / 2)))});
    lines += name + ": cutoff bound " + (bound ? "holds" : "FAILS") + "\n";
  }

  std::vector<double> f = compact_indicator(seg, 6);
  FunctionSequence embedded = embed_bounded(seg, f, stages);
  FunctionSequence diff = stage_difference(embedded, constant_sequence(seg, f, stages));
  double residue = corona_seminorm(diff, 0.0, 6);
  ok = ok && residue == 0.0;
  table.add_row({"embedded_indicator", std::to_string(stages), "-", "-", "-", "-",
                 float_str(residue)});
  lines += std::string("embedding residue past the support: ") + float_str(residue) + "\n";

  RunOutput out;
  out.exit_code = ok ? 0 : 1;
  out.summary = lines + (ok ? "corona-demo: all bounds hold\n"
                            : "corona-demo: a bound failed\n");
  out.files.push_back({"corona_demo.csv", table.csv()});
  (void)config;
  return out;
}

inline RunOutput run_selftest() {
  struct Probe {
    std::string name;
    bool ok;
  };
  std::vector<Probe> probes;
  GroupAction line = GroupAction::line();
  GroupAction dihedral = GroupAction::infinite_dihedral();
  GroupAction free2 = GroupAction::free_group(2);
  GroupElement shift = line.parse_element("t^1");

  {
    AlgebraicReal u = AlgebraicReal::inv_sqrt(2);
    probes.push_back({"scalar ring", compare(u * u, AlgebraicReal::rational(Rational(1, 2))) == 0});
  }
  probes.push_back({"gram identity line", gram_check(line, 3, 5).ok});
  probes.push_back({"gram identity free rank 2", gram_check(free2, 2, 3).ok});
  DefectValue base = defect_sq(line, 4, 7, shift);
  probes.push_back({"defect line value",
                    compare(base.value, AlgebraicReal::rational(Rational(2, 5))) == 0});
  probes.push_back({"defect closed form",
                    compare(oracle::closed_form_defect_sq(4, 1), base.value) == 0});
  probes.push_back({"defect oracle agreement",
                    compare(oracle::defect_sq(line, 4, 7, shift).value, base.value) == 0});
  probes.push_back(
      {"defect reflection invariance",
       compare(defect_sq(dihedral, 4, 7, dihedral.parse_element("t^1·s")).value,
               base.value) == 0});
  probes.push_back({"defect lane agreement",
                    compare(defect_sq(free2, 2, 3, free2.parse_element("ab")).value,
                            oracle::defect_sq(free2, 2, 3, free2.parse_element("ab")).value) == 0});
  {
    std::optional<Vertex> probe = far_basepoint(line, 4, 7, shift);
    bool ok = probe.has_value();
    if (ok) {
      AlgebraicReal l1 = l1_defect(line, 4, 7, shift, *probe);
      AlgebraicReal margin = AlgebraicReal(4) * base.value - l1 * l1;
      ok = margin.sign() >= 0;
    }
    probes.push_back({"one-norm bridge", ok});
  }

  RunOutput out;
  bool all = true;
  for (const Probe& probe : probes) {
    all = all && probe.ok;
    out.summary += std::string(probe.ok ? "[PASS] " : "[FAIL] ") + probe.name + "\n";
  }
  out.summary += all ? "selftest: ok\n" : "selftest: failures\n";
  out.exit_code = all ? 0 : 1;
  return out;
}

}  // namespace treewitness
