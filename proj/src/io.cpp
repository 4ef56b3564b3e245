#include "phmm/io.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "phmm/errors.hpp"

namespace phmm::io {
namespace {

using nlohmann::json;

Eigen::MatrixXd matrix_from_json(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_array()) {
    throw InvalidInput(std::string("model field '") + key +
                       "' must be an array of arrays");
  }
  const auto& rows = doc[key];
  const auto num_rows = static_cast<Eigen::Index>(rows.size());
  if (num_rows == 0 || !rows[0].is_array()) {
    throw InvalidInput(std::string("model field '") + key + "' is empty");
  }
  const auto num_cols = static_cast<Eigen::Index>(rows[0].size());
  Eigen::MatrixXd m(num_rows, num_cols);
  for (Eigen::Index i = 0; i < num_rows; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != num_cols) {
      throw InvalidInput(std::string("model field '") + key +
                         "' has ragged rows");
    }
    for (Eigen::Index j = 0; j < num_cols; ++j) {
      const auto& v = row[static_cast<std::size_t>(j)];
      if (!v.is_number()) {
        throw InvalidInput(std::string("model field '") + key +
                           "' has a non-numeric entry");
      }
      m(i, j) = v.get<double>();
    }
  }
  return m;
}

std::vector<std::string> tokens(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

int parse_int(const std::string& tok) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(tok, &used);
  } catch (const std::exception&) {
    throw InvalidInput("not an integer: '" + tok + "'");
  }
  if (used != tok.size()) throw InvalidInput("not an integer: '" + tok + "'");
  return v;
}

}  // namespace

json model_to_json(const HmmModel& model) {
  json doc;
  doc["num_states"] = model.num_states();
  doc["num_symbols"] = model.num_symbols();
  doc["pi"] = std::vector<double>(model.pi.data(),
                                  model.pi.data() + model.pi.size());
  auto rows = [](const Eigen::MatrixXd& m) {
    json out = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
      out.push_back(std::move(row));
    }
    return out;
  };
  doc["A"] = rows(model.A);
  doc["B"] = rows(model.B);
  return doc;
}

HmmModel model_from_json(const json& doc) {
  if (!doc.is_object()) throw InvalidInput("model document must be an object");
  for (const char* key : {"num_states", "num_symbols", "pi", "A", "B"}) {
    if (!doc.contains(key)) {
      throw InvalidInput(std::string("model is missing field '") + key + "'");
    }
  }
  if (!doc["num_states"].is_number_integer() ||
      !doc["num_symbols"].is_number_integer()) {
    throw InvalidInput("num_states and num_symbols must be integers");
  }
  const int n = doc["num_states"].get<int>();
  const int v = doc["num_symbols"].get<int>();
  if (!doc["pi"].is_array()) throw InvalidInput("model field 'pi' must be an array");

  HmmModel model;
  model.pi.resize(static_cast<Eigen::Index>(doc["pi"].size()));
  for (std::size_t i = 0; i < doc["pi"].size(); ++i) {
    if (!doc["pi"][i].is_number()) throw InvalidInput("pi has a non-numeric entry");
    model.pi(static_cast<Eigen::Index>(i)) = doc["pi"][i].get<double>();
  }
  model.A = matrix_from_json(doc, "A");
  model.B = matrix_from_json(doc, "B");
  if (model.num_states() != n || model.num_symbols() != v) {
    throw InvalidModel("declared sizes (" + std::to_string(n) + ", " +
                       std::to_string(v) + ") do not match the arrays");
  }
  validate_model(model);
  return model;
}

HmmModel load_model(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
  return model_from_json(doc);
}

void save_model(const HmmModel& model, const std::filesystem::path& path) {
  write_text(path, model_to_json(model).dump(2) + "\n");
}

std::vector<int> parse_sequence(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '[') {
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      throw InvalidInput(std::string("sequence: ") + e.what());
    }
    std::vector<int> out;
    for (const auto& v : doc) {
      if (!v.is_number_integer()) throw InvalidInput("sequence entries must be integers");
      out.push_back(v.get<int>());
    }
    return out;
  }
  std::vector<int> out;
  for (const auto& tok : tokens(text)) out.push_back(parse_int(tok));
  return out;
}

std::vector<int> load_sequence(const std::filesystem::path& path) {
  return parse_sequence(read_text(path));
}

LabelSequence parse_labels(const std::string& text) {
  LabelSequence out;
  for (const auto& tok : tokens(text)) {
    if (tok == "_") {
      out.push_back(kUnobserved);
    } else {
      const int v = parse_int(tok);
      if (v < 0) throw InvalidInput("label must be a state index or '_': " + tok);
      out.push_back(v);
    }
  }
  return out;
}

LabelSequence load_labels(const std::filesystem::path& path) {
  return parse_labels(read_text(path));
}

std::string format_sequence(const std::vector<int>& seq) {
  std::string out;
  for (int v : seq) {
    out += std::to_string(v);
    out += '\n';
  }
  return out;
}

std::string format_labels(const LabelSequence& labels) {
  std::string out;
  for (int v : labels) {
    out += v == kUnobserved ? std::string("_") : std::to_string(v);
    out += '\n';
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out << text;
  if (!out) throw InvalidInput("failed writing " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace phmm::io
