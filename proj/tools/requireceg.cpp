// requireceg command line: run the pipeline, lint and measure feature files,
// review a feature against a graph, check graphs, score coverage labels.
#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "requireceg/requireceg.hpp"

namespace fs = std::filesystem;
using namespace requireceg;
using nlohmann::json;

namespace {

constexpr int kOk = 0, kPartial = 1, kFailure = 2;

std::vector<fs::path> feature_files(const std::vector<std::string>& paths) {
  std::vector<fs::path> out;
  for (const auto& p : paths) {
    if (fs::is_directory(p)) {
      for (const auto& e : fs::recursive_directory_iterator(p))
        if (e.is_regular_file() && e.path().extension() == ".feature") out.push_back(e.path());
    } else {
      out.push_back(p);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

void emit(const json& j, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") std::cout << j.dump(2) << "\n";
  else pipeline::write_text_file(out_path, j.dump(2) + "\n");
}

int cmd_run(const std::string& narrative, const std::string& dataset, const std::string& config_path,
            std::optional<std::size_t> max_iters, const std::string& out_dir, const std::string& project) {
  pipeline::PipelineConfig cfg = pipeline::load_config(config_path);
  if (max_iters) cfg.max_iters = *max_iters;
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  cfg.validate();
  auto oracle = oracle::make_oracle(oracle::load_profile(cfg.oracle_profile));

  std::vector<pipeline::RunManifest> ms;
  std::size_t skipped = 0;
  if (!narrative.empty()) {
    ms.push_back(pipeline::run_pipeline(pipeline::read_text_file(narrative), cfg, *oracle, project));
  } else {
    auto ds = pipeline::load_dataset(dataset);
    for (const auto& s : ds.skipped) std::cerr << "skipped entry " << s.index << ": " << s.reason << "\n";
    skipped = ds.skipped.size();
    ms = pipeline::run_dataset(ds, cfg, *oracle).manifests;
  }
  for (const auto& m : ms) {
    if (m.failed()) std::cerr << m.project_id << ": " << m.error << "\n";
    for (const auto& f : m.features) {
      std::cout << m.project_slug << "/" << f.slug << ": " << pipeline::status_name(f.status);
      if (!f.error.empty()) std::cout << " (" << f.error << ")";
      std::cout << "\n";
    }
  }
  return pipeline::exit_code(ms, skipped);
}

int cmd_lint(const std::vector<std::string>& paths, const std::string& format) {
  bool clean = true;
  json all = json::object();
  for (const auto& p : feature_files(paths)) {
    std::string src = pipeline::read_text_file(p);
    auto findings = lint::lint(src);
    clean = clean && findings.empty();
    if (format == "json") all[p.string()] = findings;
    else std::cout << lint::format_text(p.string(), findings);
  }
  if (format == "json") std::cout << all.dump(2) << "\n";
  return clean ? kOk : kPartial;
}

int cmd_measure(const std::string& dir, const std::string& report_path, const std::string& oracle_profile) {
  std::vector<std::string> all_sources, sources;
  std::vector<gherkin::GherkinDocument> docs;
  for (const auto& p : feature_files({dir})) {
    std::string src = pipeline::read_text_file(p);
    all_sources.push_back(src);
    try {
      docs.push_back(gherkin::parse_feature(src, p.string()));
      sources.push_back(src);
    } catch (const ParseError& e) {
      std::cerr << p.string() << ": " << e.what() << "\n";
    }
  }
  if (all_sources.empty()) throw EmptyCorpus();
  std::vector<metrics::ReviewSummary> reviews;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().filename() == "review_report.json")
      reviews.push_back(metrics::summary_from_json(json::parse(pipeline::read_text_file(e.path()))));
  std::unique_ptr<oracle::Oracle> o;
  if (!oracle_profile.empty()) o = oracle::make_oracle(oracle::load_profile(oracle_profile));
  json j;
  if (docs.empty()) {
    j = {{"schema_version", metrics::kReportSchemaVersion}, {"acc_syn", lint::acc_syn(all_sources)}};
  } else {
    auto r = metrics::project_report(docs, sources, reviews, o.get());
    r.acc_syn = lint::acc_syn(all_sources);  // unparseable files count against it too
    j = metrics::to_json_value(r);
  }
  emit(j, report_path);
  return kOk;
}

int cmd_review(const std::string& feature, const std::string& ceg_path, const std::string& oracle_profile,
               const std::string& out, const std::string& revised_out, bool synthesize) {
  auto doc = gherkin::parse_feature(pipeline::read_text_file(feature), feature);
  auto g = ceg::parse_ceg(pipeline::read_text_file(ceg_path));
  std::unique_ptr<oracle::Oracle> o;
  if (!oracle_profile.empty()) o = oracle::make_oracle(oracle::load_profile(oracle_profile));
  review::ReviewOptions opt;
  opt.synthesize = synthesize;
  auto r = review::review(doc, g, o.get(), opt);
  std::string revised = gherkin::serialize(r.revised);
  json j = review::to_json_value(r.report);
  j["revised_feature"] = revised;
  emit(j, out);
  if (!revised_out.empty()) pipeline::write_text_file(revised_out, revised);
  else if (!out.empty() && out != "-") std::cout << revised;
  return r.report.unbindable.empty() && r.report.unresolved.empty() ? kOk : kPartial;
}

int cmd_ceg_check(const std::string& path, bool canonical, bool uncovered, const std::string& patterns) {
  auto res = ceg::parse_ceg_detailed(pipeline::read_text_file(path));
  for (const auto& e : res.errors) std::cout << path << ": " << ceg::to_string(e) << "\n";
  if (canonical) std::cout << ceg::serialize(res.graph);
  if (uncovered)
    for (const auto& a : ceg::find_uncovered_conditions(res.graph)) std::cout << "uncovered: " << ceg::to_string(a) << "\n";
  bool missing = false;
  if (!patterns.empty()) {
    for (const auto& p : ceg::diff_constraint_coverage(res.graph, ceg::parse_patterns(pipeline::read_text_file(patterns)))) {
      std::cout << "missing constraint: " << ceg::to_string(p) << "\n";
      missing = true;
    }
  }
  return res.errors.empty() && !missing ? kOk : kPartial;
}

int cmd_coverage(const std::string& labels, const std::string& manifest_path) {
  if (!fs::is_regular_file(labels)) throw LabelFileMissing(labels);
  json lj = json::parse(pipeline::read_text_file(labels), nullptr, false);
  if (lj.is_discarded()) throw ConfigError("label file is not valid JSON: " + labels);
  pipeline::CoverageSummary c;
  if (!manifest_path.empty()) {
    json mj = json::parse(pipeline::read_text_file(manifest_path));
    pipeline::RunManifest m;
    m.project_id = mj.value("project_id", "");
    for (const auto& f : mj.value("features", json::array())) {
      pipeline::FeatureOutcome fo;
      fo.slug = f.value("slug", "");
      m.features.push_back(fo);
    }
    c = pipeline::compare_against_reference(m, labels);
  } else {
    c = pipeline::coverage_from_labels(lj);
  }
  std::cout << pipeline::to_json_value(c).dump(2) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RequireCEG: requirements elicitation and review with cause-effect graphs"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run the full pipeline over a narrative or a dataset");
  std::string narrative, dataset, config, out_dir, project = "narrative";
  std::optional<std::size_t> max_iters;
  auto* o_narr = run->add_option("--narrative", narrative, "Narrative text file")->check(CLI::ExistingFile);
  auto* o_ds = run->add_option("--dataset", dataset, "Dataset JSON file")->check(CLI::ExistingFile);
  o_narr->excludes(o_ds);
  run->add_option("--config", config, "Pipeline config JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--max-iters", max_iters, "Healing iteration cap")->check(CLI::PositiveNumber);
  run->add_option("--out", out_dir, "Output directory (overrides the config)");
  run->add_option("--project", project, "Project id for --narrative runs");

  auto* lint_cmd = app.add_subcommand("lint", "Lint feature files");
  std::vector<std::string> lint_paths;
  std::string format = "text";
  lint_cmd->add_option("paths", lint_paths, "Files or directories")->required();
  lint_cmd->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));

  auto* measure = app.add_subcommand("measure", "Keyword, syntax, readability and diversity metrics");
  std::string measure_dir, report_path, measure_oracle;
  measure->add_option("dir", measure_dir, "Directory of feature files")->required()->check(CLI::ExistingDirectory);
  measure->add_option("--report", report_path, "Write the report here instead of stdout");
  measure->add_option("--oracle", measure_oracle, "Oracle profile for FURPS classification")->check(CLI::ExistingFile);

  auto* rev = app.add_subcommand("review", "Review a feature file against a cause-effect graph");
  std::string rev_feature, rev_ceg, rev_oracle, rev_out, rev_revised;
  bool no_synth = false;
  rev->add_option("--feature", rev_feature, "Feature file")->required()->check(CLI::ExistingFile);
  rev->add_option("--ceg", rev_ceg, "Graph in the CEG DSL")->required()->check(CLI::ExistingFile);
  rev->add_option("--oracle", rev_oracle, "Oracle profile for binding and rewording")->check(CLI::ExistingFile);
  rev->add_option("--out", rev_out, "Report path (default stdout)");
  rev->add_option("--revised", rev_revised, "Write the revised feature here");
  rev->add_flag("--no-synthesize", no_synth, "Do not add scenarios for uncovered branches");

  auto* check = app.add_subcommand("ceg-check", "Formal check of a CEG file");
  std::string check_path, patterns;
  bool canonical = false, uncovered = false;
  check->add_option("file", check_path, "CEG DSL file")->required()->check(CLI::ExistingFile);
  check->add_flag("--canonical", canonical, "Print the canonical form");
  check->add_flag("--uncovered", uncovered, "List consistent assignments that fire no effect");
  check->add_option("--patterns", patterns, "Required constraint patterns")->check(CLI::ExistingFile);

  auto* cov = app.add_subcommand("coverage", "Cover@Our and Cover@Real_Func from a label file");
  std::string labels, manifest;
  cov->add_option("--labels", labels, "Label file")->required();
  cov->add_option("--manifest", manifest, "Run manifest, to list unlabeled features")->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      if (narrative.empty() == dataset.empty()) {
        std::cerr << "run needs exactly one of --narrative or --dataset\n";
        return kFailure;
      }
      return cmd_run(narrative, dataset, config, max_iters, out_dir, project);
    }
    if (*lint_cmd) return cmd_lint(lint_paths, format);
    if (*measure) return cmd_measure(measure_dir, report_path, measure_oracle);
    if (*rev) return cmd_review(rev_feature, rev_ceg, rev_oracle, rev_out, rev_revised, !no_synth);
    if (*check) return cmd_ceg_check(check_path, canonical, uncovered, patterns);
    if (*cov) return cmd_coverage(labels, manifest);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}
