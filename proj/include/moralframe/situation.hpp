#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "io.hpp"
#include "ontology.hpp"

namespace moralframe {

// A sentence span and the role that classifies it.
struct Fragment {
  std::string text;
  std::string role;

  friend bool operator==(const Fragment&, const Fragment&) = default;
};

// A sentence together with its role-classified fragments.
struct Situation {
  std::string id;
  std::string sentence;
  std::vector<Fragment> fragments;
  std::optional<std::string> seed_value;

  friend bool operator==(const Situation&, const Situation&) = default;
};

using Dataset = std::vector<Situation>;

inline void validate_fragments(const std::vector<Fragment>& fragments, const Ontology& ontology) {
  if (fragments.empty()) throw ValidationError("situation has no fragments");
  for (const Fragment& f : fragments) {
    if (f.text.empty()) throw ValidationError("fragment with empty text");
    if (!ontology.has_role(f.role)) throw ValidationError("unknown role \"" + f.role + "\"");
  }
}

inline void validate_situation(const Situation& s, const Ontology& ontology) {
  try {
    validate_fragments(s.fragments, ontology);
  } catch (const ValidationError& e) {
    throw ValidationError("situation " + s.id + ": " + e.what());
  }
}

inline nlohmann::ordered_json fragments_to_json(const std::vector<Fragment>& fragments) {
  auto arr = nlohmann::ordered_json::array();
  for (const Fragment& f : fragments) arr.push_back({{"text", f.text}, {"role", f.role}});
  return arr;
}

inline std::vector<Fragment> fragments_from_json(const nlohmann::json& arr) {
  if (!arr.is_array()) throw ValidationError("\"fragments\" must be an array");
  std::vector<Fragment> out;
  for (const auto& jf : arr) {
    if (!jf.is_object() || !jf.contains("text") || !jf.contains("role") || !jf["text"].is_string() ||
        !jf["role"].is_string())
      throw ValidationError("fragment must be an object with string \"text\" and \"role\"");
    out.push_back({jf["text"].get<std::string>(), jf["role"].get<std::string>()});
  }
  return out;
}

inline nlohmann::ordered_json situation_to_json(const Situation& s) {
  nlohmann::ordered_json j;
  j["id"] = s.id;
  j["sentence"] = s.sentence;
  j["seed_value"] = s.seed_value ? nlohmann::ordered_json(*s.seed_value) : nlohmann::ordered_json(nullptr);
  j["fragments"] = fragments_to_json(s.fragments);
  return j;
}

inline Situation situation_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("situation must be a JSON object");
  Situation s;
  if (!j.contains("id") || !j.contains("sentence")) throw ValidationError("situation needs \"id\" and \"sentence\"");
  if (j["id"].is_string())
    s.id = j["id"].get<std::string>();
  else if (j["id"].is_number_integer())
    s.id = std::to_string(j["id"].get<long long>());
  else
    throw ValidationError("situation \"id\" must be a string");
  if (!j["sentence"].is_string()) throw ValidationError("situation " + s.id + ": \"sentence\" must be a string");
  s.sentence = j["sentence"].get<std::string>();
  if (auto it = j.find("seed_value"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw ValidationError("situation " + s.id + ": \"seed_value\" must be a string");
    s.seed_value = it->get<std::string>();
  }
  if (!j.contains("fragments")) throw ValidationError("situation " + s.id + ": missing \"fragments\"");
  s.fragments = fragments_from_json(j["fragments"]);
  return s;
}

// JSON lines, one situation per line.
inline std::string dataset_to_jsonl(const Dataset& data) {
  std::string out;
  for (const Situation& s : data) {
    out += situation_to_json(s).dump();
    out += '\n';
  }
  return out;
}

inline Dataset dataset_from_jsonl(const std::string& text, const std::string& source = "<string>") {
  Dataset data;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    try {
      data.push_back(situation_from_json(nlohmann::json::parse(lines[i])));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(source + ":" + std::to_string(i + 1) + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError(source + ":" + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return data;
}

inline Dataset load_dataset(const std::filesystem::path& path) {
  return dataset_from_jsonl(read_text_file(path), path.string());
}

} // namespace moralframe
