/// @file run.hpp
/// @brief End-to-end runs: feature tree, per-leaf behavior elicitation, graph
/// construction and healing, Gherkin drafting and review.
///
/// Output layout, relative to the configured output directory:
///
///     <project>/feature_tree.json
///     <project>/<feature>/user_behavior.txt ... review_report.json
///     <project>/report.json
///     <project>/manifest.json
///     aggregate_report.json            (dataset runs only)
///
/// Manifest paths are relative to the project directory. Everything except
/// the "timing" object is a pure function of the inputs when the oracle is.
#pragma once

#include <atomic>
#include <chrono>
#include <ctime>
#include <exception>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "requireceg/ceg/graph.hpp"
#include "requireceg/elicitation/agents.hpp"
#include "requireceg/elicitation/feature_tree.hpp"
#include "requireceg/gherkin/parser.hpp"
#include "requireceg/gherkin/writer.hpp"
#include "requireceg/intervention/heal.hpp"
#include "requireceg/lint/lint.hpp"
#include "requireceg/metrics/report.hpp"
#include "requireceg/pipeline/config.hpp"
#include "requireceg/review/review.hpp"

namespace requireceg::pipeline {

namespace fs = std::filesystem;

/// Canonical artifact names, in manifest order.
inline const std::vector<std::pair<std::string, std::string>>& artifact_files() {
  static const std::vector<std::pair<std::string, std::string>> a{
      {"user_behavior", "user_behavior.txt"}, {"system_behavior", "system_behavior.txt"},
      {"atoms", "atoms.json"},                {"ceg", "ceg.ceg"},
      {"healing_log", "healing_log.json"},    {"draft.feature", "draft.feature"},
      {"reviewed.feature", "reviewed.feature"}, {"review_report", "review_report.json"}};
  return a;
}

enum class FeatureStatus { Ok, Residual, Failed };

inline const char* status_name(FeatureStatus s) noexcept {
  switch (s) {
    case FeatureStatus::Ok: return "ok";
    case FeatureStatus::Residual: return "residual";
    case FeatureStatus::Failed: return "failed";
  }
  return "failed";
}

struct FeatureOutcome {
  std::string slug;
  std::string name;
  std::string path;  // "L1 > L2 > leaf"
  FeatureStatus status = FeatureStatus::Ok;
  std::string error;  // "<stage>: <message>" for failures
  std::vector<std::pair<std::string, std::string>> artifacts;
  std::vector<std::string> log;
  std::size_t residual_issues = 0;
  bool healing_converged = false;
  std::size_t reconstructions = 0;
  std::size_t modifications = 0;
  std::size_t lint_findings = 0;
  metrics::ReviewSummary review;

  // kept in memory for reports, not serialized
  std::optional<gherkin::GherkinDocument> reviewed;
  std::string reviewed_source;
};

struct RunManifest {
  std::string project_id;
  std::string project_slug;
  json config;
  std::string feature_tree;  // path, empty when the tree step failed
  std::vector<FeatureOutcome> features;
  std::string report;  // path, empty when there was nothing to measure
  std::string error;   // project-level failure
  std::vector<std::string> log;
  json report_json;    // the project report, kept for aggregation
  std::string started_at;
  double elapsed_ms = 0.0;

  bool failed() const { return !error.empty(); }
  bool partial() const {
    for (const auto& f : features)
      if (f.status != FeatureStatus::Ok || f.lint_findings > 0) return true;
    return false;
  }
};

namespace detail {

inline std::string utc_now() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

inline json atoms_json(const elicitation::AtomsResult& a) {
  json conds = json::array(), effects = json::array();
  for (const auto& n : a.atoms) {
    json e{{"id", n.id}, {"description", n.description}};
    if (n.kind == ceg::NodeKind::Condition) {
      e["trigger"] = n.trigger;
      conds.push_back(e);
    } else {
      effects.push_back(e);
    }
  }
  return {{"conditions", conds}, {"effects", effects}, {"log", a.log}};
}

/// Runs Phases I-III for one leaf and writes its artifacts. Errors are caught
/// and recorded; transport failures are recorded too, since retries already
/// happened inside the oracle call.
inline FeatureOutcome process_feature(const elicitation::LeafRef& leaf, const std::string& narrative,
                                      oracle::Oracle& oracle, const PipelineConfig& cfg, const fs::path& project_dir) {
  FeatureOutcome out;
  out.slug = leaf.slug;
  out.name = leaf.node->name;
  out.path = leaf.path_text();
  const fs::path dir = project_dir / leaf.slug;
  std::string stage = "user_behavior";
  auto put = [&](const std::string& key, const std::string& content) {
    std::string file;
    for (const auto& [k, f] : artifact_files())
      if (k == key) file = f;
    write_text_file(dir / file, content);
    out.artifacts.push_back({key, leaf.slug + "/" + file});
  };
  try {
    std::string user = elicitation::elicit_user_behavior(leaf, narrative, oracle);
    put("user_behavior", user + "\n");

    stage = "system_behavior";
    std::string sys = elicitation::elicit_system_behavior(user, oracle, leaf.path_text());
    for (auto& w : elicitation::trigger_coverage_warnings(user, sys)) out.log.push_back(std::move(w));
    put("system_behavior", sys + "\n");

    stage = "atoms";
    auto atoms = elicitation::identify_atoms(sys, oracle);
    for (const auto& l : atoms.log) out.log.push_back(l);
    put("atoms", atoms_json(atoms).dump(2) + "\n");

    stage = "build_ceg";
    auto built = elicitation::build_ceg(atoms.atoms, sys, oracle);
    for (const auto& l : built.log) out.log.push_back(l);

    stage = "heal";
    intervention::HealResult healed;
    try {
      healed = intervention::heal(sys, atoms.atoms, built.raw_statements, oracle, cfg.max_iters, cfg.enumeration_cap);
    } catch (const FormalLoopExhausted&) {
      put("ceg", ceg::serialize(built.assembled.graph));
      throw;
    }
    put("ceg", ceg::serialize(healed.graph));
    put("healing_log", intervention::to_json_value(healed.log).dump(2) + "\n");
    out.healing_converged = healed.log.converged;
    out.residual_issues = healed.log.residual_issues.size();
    out.reconstructions = healed.log.reconstructions();
    out.modifications = healed.log.modifications();

    stage = "draft";
    auto draft = elicitation::draft_gherkin(sys, *leaf.node, oracle);
    put("draft.feature", gherkin::serialize(draft));

    stage = "review";
    review::ReviewOptions ro;
    ro.max_rounds = cfg.review_rounds;
    ro.synthesize = cfg.synthesize;
    ro.reword = cfg.reword;
    ro.cap = cfg.enumeration_cap;
    auto rv = review::review(draft, healed.graph, cfg.review_uses_oracle ? &oracle : nullptr, ro);
    out.reviewed_source = gherkin::serialize(rv.revised);
    out.reviewed = rv.revised;
    put("reviewed.feature", out.reviewed_source);
    put("review_report", review::to_json_value(rv.report).dump(2) + "\n");
    out.review = metrics::summarize(rv.report);
    out.lint_findings = lint::lint(out.reviewed_source).size();
    if (out.lint_findings) out.log.push_back("reviewed feature has " + std::to_string(out.lint_findings) + " lint findings");
    if (out.residual_issues) out.status = FeatureStatus::Residual;
  } catch (const std::exception& e) {
    out.status = FeatureStatus::Failed;
    out.error = stage + ": " + e.what();
    out.reviewed.reset();
  }
  return out;
}

}  // namespace detail

inline json to_json_value(const FeatureOutcome& f) {
  json artifacts = json::object();
  for (const auto& [k, p] : f.artifacts) artifacts[k] = p;
  json j{{"slug", f.slug},
         {"name", f.name},
         {"path", f.path},
         {"status", status_name(f.status)},
         {"artifacts", artifacts},
         {"healing",
          {{"converged", f.healing_converged},
           {"reconstructions", f.reconstructions},
           {"modifications", f.modifications},
           {"residual_issues", f.residual_issues}}},
         {"review", metrics::to_json_value(f.review)},
         {"lint_findings", f.lint_findings},
         {"log", f.log}};
  if (!f.error.empty()) j["error"] = f.error;
  return j;
}

inline json to_json_value(const RunManifest& m) {
  json feats = json::array();
  for (const auto& f : m.features) feats.push_back(to_json_value(f));
  json j{{"project_id", m.project_id},
         {"config", m.config},
         {"feature_tree", m.feature_tree},
         {"features", feats},
         {"report", m.report},
         {"log", m.log},
         {"timing", {{"started_at", m.started_at}, {"elapsed_ms", m.elapsed_ms}}}};
  if (!m.error.empty()) j["error"] = m.error;
  return j;
}

/// Runs one narrative. Failures of a single feature are recorded in its
/// outcome; a failure to build the feature tree is recorded on the manifest,
/// except transport failures, which are rethrown because no later call could
/// succeed either.
inline RunManifest run_pipeline(const std::string& narrative, const PipelineConfig& cfg, oracle::Oracle& oracle,
                                const std::string& project_id = "narrative") {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  RunManifest m;
  m.project_id = project_id;
  m.project_slug = text::slugify(project_id);
  if (m.project_slug.empty()) m.project_slug = "project";
  m.config = to_json_value(cfg);
  m.started_at = detail::utc_now();
  const fs::path dir = cfg.output_dir / m.project_slug;
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto finish = [&] {
    m.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    write_text_file(dir / "manifest.json", to_json_value(m).dump(2) + "\n");
  };

  elicitation::FeatureTree tree;
  try {
    tree = elicitation::generate_feature_tree(narrative, oracle);
  } catch (const OracleFailure& e) {
    if (e.reason() == OracleFailure::Reason::Transport || e.reason() == OracleFailure::Reason::Timeout) throw;
    m.error = std::string("feature_tree: ") + e.what();
    finish();
    return m;
  } catch (const Error& e) {
    m.error = std::string("feature_tree: ") + e.what();
    finish();
    return m;
  }
  write_text_file(dir / "feature_tree.json", elicitation::to_json_value(tree).dump(2) + "\n");
  m.feature_tree = "feature_tree.json";

  const auto leaves = elicitation::leaves(tree);
  m.features.resize(leaves.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < leaves.size(); i = next++)
      m.features[i] = detail::process_feature(leaves[i], narrative, oracle, cfg, dir);
  };
  std::size_t n = std::min(cfg.per_feature_parallelism, leaves.size());
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < n; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::vector<gherkin::GherkinDocument> docs;
  std::vector<std::string> sources;
  std::vector<metrics::ReviewSummary> reviews;
  for (const auto& f : m.features) {
    if (!f.reviewed) continue;
    docs.push_back(*f.reviewed);
    sources.push_back(f.reviewed_source);
    reviews.push_back(f.review);
  }
  if (docs.empty()) {
    m.log.push_back("no reviewed features; project report skipped");
  } else {
    try {
      m.report_json = metrics::to_json_value(metrics::project_report(docs, sources, reviews, &oracle));
    } catch (const Error& e) {
      m.log.push_back(std::string("diversity skipped: ") + e.what());
      m.report_json = metrics::to_json_value(metrics::project_report(docs, sources, reviews, nullptr));
    }
    write_text_file(dir / "report.json", m.report_json.dump(2) + "\n");
    m.report = "report.json";
  }
  finish();
  return m;
}

struct DatasetRun {
  std::vector<RunManifest> manifests;
  std::vector<SkippedEntry> skipped;
  json aggregate;
};

/// Means over projects of the Table-style figures: features per project,
/// syntax accuracy, readability and diversity.
inline json aggregate_report(const std::vector<RunManifest>& ms, const std::vector<SkippedEntry>& skipped) {
  std::vector<double> f_num, acc, fog, lin, ent;
  std::size_t clean = 0, total = 0;
  metrics::ReviewSummary rs;
  std::size_t failed_features = 0, residual_features = 0;
  for (const auto& m : ms) {
    for (const auto& f : m.features) {
      failed_features += f.status == FeatureStatus::Failed;
      residual_features += f.status == FeatureStatus::Residual;
    }
    if (m.report_json.is_null()) continue;
    const json& r = m.report_json;
    f_num.push_back(r["keyword_stats"]["f_num"].get<double>());
    acc.push_back(r["acc_syn"]["value"].get<double>());
    clean += r["acc_syn"]["clean_files"].get<std::size_t>();
    total += r["acc_syn"]["total_files"].get<std::size_t>();
    fog.push_back(r["readability_per_feature"]["gunning_fog"]["mean"].get<double>());
    lin.push_back(r["readability_per_feature"]["linsear_write"]["mean"].get<double>());
    if (!r["diversity"].is_null()) ent.push_back(r["diversity"]["entropy"].get<double>());
    rs += metrics::summary_from_json({{"summary", r["review_summary"]}});
  }
  json skipped_j = json::array();
  for (const auto& s : skipped) skipped_j.push_back({{"index", s.index}, {"reason", s.reason}});
  json failed_projects = json::array();
  for (const auto& m : ms)
    if (m.failed()) failed_projects.push_back({{"project_id", m.project_id}, {"error", m.error}});
  return {{"schema_version", metrics::kReportSchemaVersion},
          {"projects", ms.size()},
          {"measured_projects", f_num.size()},
          {"f_num", metrics::to_json_value(metrics::mean_std(f_num))},
          {"acc_syn", {{"mean", metrics::mean_std(acc).mean}, {"clean_files", clean}, {"total_files", total}}},
          {"gunning_fog", metrics::to_json_value(metrics::mean_std(fog))},
          {"linsear_write", metrics::to_json_value(metrics::mean_std(lin))},
          {"fundiv", ent.empty() ? json(nullptr) : metrics::to_json_value(metrics::mean_std(ent))},
          {"review_summary", metrics::to_json_value(rs)},
          {"failed_features", failed_features},
          {"residual_features", residual_features},
          {"failed_projects", failed_projects},
          {"skipped_entries", skipped_j}};
}

inline DatasetRun run_dataset(const Dataset& ds, const PipelineConfig& cfg, oracle::Oracle& oracle) {
  DatasetRun r;
  r.skipped = ds.skipped;
  for (const auto& e : ds.entries) r.manifests.push_back(run_pipeline(e.narrative, cfg, oracle, e.project_id));
  r.aggregate = aggregate_report(r.manifests, r.skipped);
  write_text_file(cfg.output_dir / "aggregate_report.json", r.aggregate.dump(2) + "\n");
  return r;
}

inline DatasetRun run_dataset(const fs::path& path, const PipelineConfig& cfg, oracle::Oracle& oracle) {
  return run_dataset(load_dataset(path), cfg, oracle);
}

/// 0: everything converged and linted clean; 1: some feature failed, kept
/// residual issues, or an entry was skipped; 2: nothing usable came out.
inline int exit_code(const std::vector<RunManifest>& ms, std::size_t skipped = 0) {
  if (ms.empty()) return 2;
  bool all_failed = true, partial = skipped > 0;
  for (const auto& m : ms) {
    bool any_ok = false;
    for (const auto& f : m.features) any_ok = any_ok || f.status != FeatureStatus::Failed;
    if (!m.failed() && any_ok) all_failed = false;
    if (m.failed() || m.partial()) partial = true;
  }
  if (all_failed) return 2;
  return partial ? 1 : 0;
}

}  // namespace requireceg::pipeline
