/// @file feature_tree.hpp
/// @brief Product feature tree: up to three levels of capabilities below the
/// product root, leaves being concrete components.
#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "requireceg/errors.hpp"
#include "requireceg/oracle/prompts.hpp"
#include "requireceg/text.hpp"

namespace requireceg::elicitation {

using json = nlohmann::json;

enum class Level { L1 = 1, L2 = 2, L3 = 3 };

enum class Kano { MustBe, OneDimensional, Attractive, Indifferent, Unlabeled };

inline const char* kano_name(Kano k) noexcept {
  switch (k) {
    case Kano::MustBe: return "MustBe";
    case Kano::OneDimensional: return "OneDimensional";
    case Kano::Attractive: return "Attractive";
    case Kano::Indifferent: return "Indifferent";
    case Kano::Unlabeled: return "Unlabeled";
  }
  return "Unlabeled";
}

/// Case, spaces and hyphens are ignored: "Must-be" reads as MustBe.
inline std::optional<Kano> kano_from(std::string_view s) {
  auto squash = [](std::string_view v) {
    std::string out;
    for (char c : v)
      if (std::isalnum(static_cast<unsigned char>(c))) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
  };
  for (Kano k : {Kano::MustBe, Kano::OneDimensional, Kano::Attractive, Kano::Indifferent, Kano::Unlabeled})
    if (squash(s) == squash(kano_name(k))) return k;
  return std::nullopt;
}

struct FeatureNode {
  std::string name;
  Level level = Level::L1;
  Kano kano = Kano::Unlabeled;
  std::optional<std::string> narrative_span;
  std::vector<FeatureNode> children;

  bool is_leaf() const noexcept { return children.empty(); }
  bool operator==(const FeatureNode&) const = default;
};

struct FeatureTree {
  std::string product_name;
  std::vector<FeatureNode> features;  // L1 nodes

  bool operator==(const FeatureTree&) const = default;
};

/// A leaf together with the names on the way down to it.
struct LeafRef {
  const FeatureNode* node = nullptr;
  std::vector<std::string> path;  // L1 name first, leaf name last
  std::string slug;               // unique within the tree

  std::string path_text() const { return text::join(path, " > "); }
};

inline std::vector<LeafRef> leaves(const FeatureTree& tree) {
  std::vector<LeafRef> out;
  std::vector<std::string> path;
  auto walk = [&](auto&& self, const FeatureNode& n) -> void {
    path.push_back(n.name);
    if (n.is_leaf()) out.push_back({&n, path, {}});
    for (const auto& c : n.children) self(self, c);
    path.pop_back();
  };
  for (const auto& f : tree.features) walk(walk, f);
  std::vector<std::string> used;
  for (auto& l : out) {
    std::string base = text::slugify(l.node->name);
    if (base.empty()) base = "feature";
    std::string s = base;
    for (int i = 2; std::find(used.begin(), used.end(), s) != used.end(); ++i) s = base + "-" + std::to_string(i);
    used.push_back(s);
    l.slug = s;
  }
  return out;
}

inline std::size_t depth(const FeatureNode& n) {
  std::size_t d = 0;
  for (const auto& c : n.children) d = std::max(d, depth(c));
  return d + 1;
}

namespace detail {

inline void parse_node(const json& j, int level, const std::string& where, FeatureNode& out,
                       std::vector<std::string>& problems) {
  if (!j.is_object()) {
    problems.push_back(where + ": node must be an object");
    return;
  }
  std::string name = j.value("name", "");
  if (text::trim(name).empty()) problems.push_back(where + ": node needs a non-empty name");
  out.name = text::trim(name);
  if (level > 3) {
    problems.push_back(where + " '" + out.name + "': depth " + std::to_string(level) + " exceeds the three-level limit");
    return;
  }
  out.level = static_cast<Level>(level);
  if (j.contains("level")) {
    std::string want = "L" + std::to_string(level);
    if (!j["level"].is_string() || j["level"].get<std::string>() != want)
      problems.push_back(where + " '" + out.name + "': level should be " + want);
  }
  if (j.contains("kano") && !j["kano"].is_null()) {
    auto k = j["kano"].is_string() ? kano_from(j["kano"].get<std::string>()) : std::nullopt;
    if (!k) problems.push_back(where + " '" + out.name + "': unknown kano label");
    else out.kano = *k;
  }
  if (j.contains("narrative_span") && j["narrative_span"].is_string()) {
    std::string span = text::trim(j["narrative_span"].get<std::string>());
    if (!span.empty()) out.narrative_span = span;
  }
  if (j.contains("children")) {
    if (!j["children"].is_array()) {
      problems.push_back(where + " '" + out.name + "': children must be a list");
      return;
    }
    for (std::size_t i = 0; i < j["children"].size(); ++i) {
      FeatureNode c;
      parse_node(j["children"][i], level + 1, where + "." + std::to_string(i + 1), c, problems);
      out.children.push_back(std::move(c));
    }
  }
}

}  // namespace detail

/// Reads a tree answer. Every invariant violation is collected in `problems`;
/// the tree is only meaningful when that list stays empty.
inline FeatureTree tree_from_json(const json& j, std::vector<std::string>& problems) {
  FeatureTree t;
  t.product_name = text::trim(j.value("product", ""));
  if (t.product_name.empty()) problems.push_back("tree needs a non-empty 'product'");
  if (!j.contains("features") || !j["features"].is_array() || j["features"].empty()) {
    problems.push_back("tree needs a non-empty 'features' list");
    return t;
  }
  for (std::size_t i = 0; i < j["features"].size(); ++i) {
    FeatureNode n;
    detail::parse_node(j["features"][i], 1, "feature " + std::to_string(i + 1), n, problems);
    t.features.push_back(std::move(n));
  }
  return t;
}

inline json to_json_value(const FeatureNode& n) {
  json j{{"name", n.name}, {"level", "L" + std::to_string(static_cast<int>(n.level))}, {"kano", kano_name(n.kano)}};
  if (n.narrative_span) j["narrative_span"] = *n.narrative_span;
  j["children"] = json::array();
  for (const auto& c : n.children) j["children"].push_back(to_json_value(c));
  return j;
}

inline json to_json_value(const FeatureTree& t) {
  json j{{"product", t.product_name}, {"features", json::array()}};
  for (const auto& f : t.features) j["features"].push_back(to_json_value(f));
  return j;
}

/// Asks the FeatureTreeGenerator agent. An answer that breaks the tree rules
/// gets one reprompt listing the problems; a second bad answer throws.
inline FeatureTree generate_feature_tree(const std::string& narrative, oracle::Oracle& oracle) {
  if (text::trim_view(narrative).empty()) throw PreconditionViolation("narrative is empty");
  std::vector<std::string> problems;
  for (int attempt = 0; attempt < 2; ++attempt) {
    json answer = oracle::ask_agent(oracle, "FeatureTreeGenerator",
                                    {{"narrative", narrative}, {"feedback", oracle::feedback_block(problems)}});
    problems.clear();
    FeatureTree t = tree_from_json(answer, problems);
    if (problems.empty()) return t;
  }
  throw ValidationFailure(ValidationFailure::Stage::FeatureTree, text::join(problems, "; "));
}

}  // namespace requireceg::elicitation
