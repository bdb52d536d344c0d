#pragma once

#include <string>

#include "gbcert/cert.hpp"
#include "gbcert/forest.hpp"
#include "gbcert/train.hpp"

namespace gbcert {

/// JSON model format: raw fixed-point integers as decimal strings, feature
/// indices 0-based, tree arrays in heap order. Key order is fixed so a model
/// round-trips byte-identically.

std::string model_to_json(const Model& model);
Model model_from_json(const std::string& text);

void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

std::string assignment_to_json(const LeafAssignment& la);
LeafAssignment assignment_from_json(const std::string& text);
void save_assignment(const LeafAssignment& la, const std::string& path);
LeafAssignment load_assignment(const std::string& path);

std::string forest_to_json(const ForestModel& model);
ForestModel forest_from_json(const std::string& text);
void save_forest(const ForestModel& model, const std::string& path);
ForestModel load_forest(const std::string& path);

std::string spec_to_json(const ForestSpec& spec);
ForestSpec spec_from_json(const std::string& text);
void save_spec(const ForestSpec& spec, const std::string& path);
ForestSpec load_spec(const std::string& path);

std::string report_to_json(const CertReport& report);

}  // namespace gbcert
