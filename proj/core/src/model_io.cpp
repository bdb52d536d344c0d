#include "gbcert/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gbcert/commit.hpp"

namespace gbcert {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string dec(std::int64_t v) { return std::to_string(v); }

std::int64_t parse_i64(const json& j) {
  if (j.is_number_integer()) return j.get<std::int64_t>();
  return std::stoll(j.get<std::string>());
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << text;
}

ordered_json tree_to_json(const Tree& t) {
  ordered_json jt;
  jt["f"] = t.split_feature;
  ordered_json thresh = ordered_json::array();
  for (std::int64_t v : t.threshold) thresh.push_back(dec(v));
  jt["t"] = thresh;
  ordered_json weights = ordered_json::array();
  for (std::int64_t v : t.leaf_weight) weights.push_back(dec(v));
  jt["w"] = weights;
  return jt;
}

Tree tree_from_json(const json& jt, int depth) {
  Tree t;
  t.depth = depth;
  for (const auto& v : jt.at("f")) t.split_feature.push_back(v.get<std::int32_t>());
  for (const auto& v : jt.at("t")) t.threshold.push_back(parse_i64(v));
  for (const auto& v : jt.at("w")) t.leaf_weight.push_back(parse_i64(v));
  const std::size_t leaves = std::size_t{1} << depth;
  if (t.split_feature.size() != leaves - 1 || t.threshold.size() != leaves - 1 ||
      t.leaf_weight.size() != leaves)
    throw std::runtime_error("tree arrays inconsistent with depth");
  return t;
}

}  // namespace

std::string model_to_json(const Model& model) {
  ordered_json j;
  j["format"] = "gbcert-model";
  j["version"] = 1;
  j["frac_bits"] = model.cfg.frac_bits;
  ordered_json hp;
  hp["trees"] = model.hp.trees;
  hp["depth"] = model.hp.depth;
  hp["bins"] = model.hp.bins;
  hp["eta"] = dec(model.hp.eta.raw);
  hp["lambda"] = dec(model.hp.lambda.raw);
  hp["gamma"] = dec(model.hp.gamma.raw);
  hp["p_min"] = dec(model.hp.p_min.raw);
  j["hyperparams"] = hp;
  j["z0"] = dec(model.base_score);
  ordered_json trees = ordered_json::array();
  for (const Tree& t : model.trees) trees.push_back(tree_to_json(t));
  j["trees"] = trees;
  return j.dump(2) + "\n";
}

Model model_from_json(const std::string& text) {
  json j = json::parse(text);
  if (j.at("format") != "gbcert-model")
    throw std::runtime_error("not a gbcert model file");
  Model model;
  model.cfg.frac_bits = j.at("frac_bits").get<int>();
  const json& hp = j.at("hyperparams");
  model.hp.trees = hp.at("trees").get<int>();
  model.hp.depth = hp.at("depth").get<int>();
  model.hp.bins = hp.at("bins").get<int>();
  model.hp.eta = Fxp{parse_i64(hp.at("eta"))};
  model.hp.lambda = Fxp{parse_i64(hp.at("lambda"))};
  model.hp.gamma = Fxp{parse_i64(hp.at("gamma"))};
  model.hp.p_min = Fxp{parse_i64(hp.at("p_min"))};
  model.base_score = parse_i64(j.at("z0"));
  for (const auto& jt : j.at("trees"))
    model.trees.push_back(tree_from_json(jt, model.hp.depth));
  return model;
}

void save_model(const Model& model, const std::string& path) {
  spit(path, model_to_json(model));
}

Model load_model(const std::string& path) { return model_from_json(slurp(path)); }

std::string assignment_to_json(const LeafAssignment& la) {
  ordered_json j;
  j["format"] = "gbcert-leaves";
  j["version"] = 1;
  j["rows"] = la.rows;
  j["trees"] = la.trees;
  j["leaf"] = la.leaf;
  ordered_json scores = ordered_json::array();
  for (std::int64_t v : la.score) scores.push_back(dec(v));
  j["score"] = scores;
  return j.dump() + "\n";
}

LeafAssignment assignment_from_json(const std::string& text) {
  json j = json::parse(text);
  if (j.at("format") != "gbcert-leaves")
    throw std::runtime_error("not a gbcert leaf-assignment file");
  LeafAssignment la;
  la.rows = j.at("rows").get<std::size_t>();
  la.trees = j.at("trees").get<int>();
  for (const auto& v : j.at("leaf")) la.leaf.push_back(v.get<std::uint32_t>());
  for (const auto& v : j.at("score")) la.score.push_back(parse_i64(v));
  if (la.leaf.size() != la.rows * la.trees ||
      la.score.size() != la.rows * (la.trees + 1))
    throw std::runtime_error("leaf-assignment arrays inconsistent");
  return la;
}

void save_assignment(const LeafAssignment& la, const std::string& path) {
  spit(path, assignment_to_json(la));
}

LeafAssignment load_assignment(const std::string& path) {
  return assignment_from_json(slurp(path));
}

std::string forest_to_json(const ForestModel& model) {
  ordered_json j;
  j["format"] = "gbcert-forest";
  j["version"] = 1;
  j["frac_bits"] = model.cfg.frac_bits;
  j["depth"] = model.depth;
  j["bins"] = model.bins;
  ordered_json trees = ordered_json::array();
  for (const Tree& t : model.trees) trees.push_back(tree_to_json(t));
  j["trees"] = trees;
  ordered_json digests = ordered_json::array();
  for (const auto& dg : model.index_digests) digests.push_back(hex(dg));
  j["index_digests"] = digests;
  return j.dump(2) + "\n";
}

ForestModel forest_from_json(const std::string& text) {
  json j = json::parse(text);
  if (j.at("format") != "gbcert-forest")
    throw std::runtime_error("not a gbcert forest file");
  ForestModel model;
  model.cfg.frac_bits = j.at("frac_bits").get<int>();
  model.depth = j.at("depth").get<int>();
  model.bins = j.at("bins").get<int>();
  for (const auto& jt : j.at("trees"))
    model.trees.push_back(tree_from_json(jt, model.depth));
  for (const auto& v : j.at("index_digests"))
    model.index_digests.push_back(from_hex(v.get<std::string>()));
  return model;
}

void save_forest(const ForestModel& model, const std::string& path) {
  spit(path, forest_to_json(model));
}

ForestModel load_forest(const std::string& path) {
  return forest_from_json(slurp(path));
}

std::string spec_to_json(const ForestSpec& spec) {
  ordered_json j;
  j["format"] = "gbcert-forest-spec";
  j["version"] = 1;
  j["trees"] = spec.trees;
  j["depth"] = spec.depth;
  j["bins"] = spec.bins;
  j["seed"] = spec.seed;
  j["index_sets"] = spec.index_sets;
  return j.dump() + "\n";
}

ForestSpec spec_from_json(const std::string& text) {
  json j = json::parse(text);
  if (j.at("format") != "gbcert-forest-spec")
    throw std::runtime_error("not a gbcert forest-spec file");
  ForestSpec spec;
  spec.trees = j.at("trees").get<int>();
  spec.depth = j.at("depth").get<int>();
  spec.bins = j.at("bins").get<int>();
  spec.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& set : j.at("index_sets"))
    spec.index_sets.push_back(set.get<std::vector<std::uint32_t>>());
  return spec;
}

void save_spec(const ForestSpec& spec, const std::string& path) {
  spit(path, spec_to_json(spec));
}

ForestSpec load_spec(const std::string& path) {
  return spec_from_json(slurp(path));
}

std::string report_to_json(const CertReport& report) {
  ordered_json j;
  j["accepted"] = report.accepted;
  ordered_json fails = ordered_json::array();
  for (const CertFailure& f : report.failures) {
    ordered_json jf;
    jf["tree"] = f.tree;
    jf["check"] = f.check;
    jf["index"] = f.index;
    fails.push_back(jf);
  }
  j["failures"] = fails;
  j["notes"] = report.notes;
  return j.dump(2) + "\n";
}

}  // namespace gbcert
