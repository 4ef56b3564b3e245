#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "phmm/model.hpp"
#include "phmm/side_info.hpp"

namespace phmm::io {

nlohmann::json model_to_json(const HmmModel& model);

/// Parses and validates; InvalidInput on schema errors, InvalidModel on
/// probability violations.
HmmModel model_from_json(const nlohmann::json& doc);

HmmModel load_model(const std::filesystem::path& path);
void save_model(const HmmModel& model, const std::filesystem::path& path);

/// Integer sequence given either as whitespace-separated integers or as a
/// JSON array.
std::vector<int> parse_sequence(const std::string& text);
std::vector<int> load_sequence(const std::filesystem::path& path);

/// One token per line: a state index or `_` for an unobserved step.
LabelSequence parse_labels(const std::string& text);
LabelSequence load_labels(const std::filesystem::path& path);

std::string format_sequence(const std::vector<int>& seq);
std::string format_labels(const LabelSequence& labels);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace phmm::io
