#pragma once

// Offline stand-in for a generative model: fills per-value sentence
// templates with noun phrases and appends extra randomly requested roles.

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "../error.hpp"
#include "../io.hpp"
#include "../ontology.hpp"
#include "../random.hpp"
#include "../situation.hpp"
#include "prompt.hpp"

namespace moralframe::corpus {

// Slots are written {0}, {1}, ... and refer to positions in `roles`.
struct Template {
  std::string text;
  std::vector<std::string> roles;
};

struct ValueTemplates {
  std::string value;
  std::vector<Template> templates;
};

struct TemplateBank {
  std::vector<std::string> fillers;
  std::vector<std::string> connectors;
  std::vector<ValueTemplates> values;
};

namespace detail {

// Splits template text into literal pieces and slot indices.
struct TemplatePiece {
  std::string literal;
  int slot = -1;
};

inline std::vector<TemplatePiece> split_template(const Template& t) {
  std::vector<TemplatePiece> pieces;
  std::vector<int> uses(t.roles.size(), 0);
  std::string literal;
  for (std::size_t i = 0; i < t.text.size(); ++i) {
    if (t.text[i] != '{') {
      literal += t.text[i];
      continue;
    }
    const std::size_t close = t.text.find('}', i);
    if (close == std::string::npos) throw ValidationError("unterminated slot in template \"" + t.text + "\"");
    const std::string index = t.text.substr(i + 1, close - i - 1);
    if (index.empty() || index.find_first_not_of("0123456789") != std::string::npos)
      throw ValidationError("bad slot {" + index + "} in template \"" + t.text + "\"");
    const int slot = std::stoi(index);
    if (slot >= static_cast<int>(t.roles.size()))
      throw ValidationError("slot {" + index + "} has no role in template \"" + t.text + "\"");
    ++uses[static_cast<std::size_t>(slot)];
    if (!literal.empty()) pieces.push_back({std::move(literal), -1});
    literal.clear();
    pieces.push_back({"", slot});
    i = close;
  }
  if (!literal.empty()) pieces.push_back({std::move(literal), -1});
  for (std::size_t r = 0; r < uses.size(); ++r)
    if (uses[r] != 1) throw ValidationError("role slot {" + std::to_string(r) + "} must appear exactly once in \"" + t.text + "\"");
  return pieces;
}

inline std::vector<std::string> string_array(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array()) throw ValidationError(where + ": expected an array of strings");
  std::vector<std::string> out;
  for (const auto& e : j) {
    if (!e.is_string()) throw ValidationError(where + ": expected an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

} // namespace detail

// Bank file layout:
//   {"fillers": [...], "connectors": [...],
//    "shared_frames": ["{0} ... {1} ... {2}", ...],
//    "values": {"<value>": {"templates": [{"text": ..., "roles": [...]}],
//                           "signatures": [[role, ...], ...]}}}
// Each shared frame is combined with every signature of matching arity, so
// values can share wording while differing only in roles.
inline TemplateBank template_bank_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ValidationError("template bank: top level must be an object");
  TemplateBank bank;
  bank.fillers = detail::string_array(doc.value("fillers", nlohmann::json::array()), "fillers");
  bank.connectors = detail::string_array(doc.value("connectors", nlohmann::json::array()), "connectors");
  const auto frames = detail::string_array(doc.value("shared_frames", nlohmann::json::array()), "shared_frames");
  if (bank.fillers.empty()) throw ValidationError("template bank: no fillers");
  for (const auto& f : bank.fillers)
    if (trim(f).empty()) throw ValidationError("template bank: empty filler");
  if (bank.connectors.empty()) throw ValidationError("template bank: no connectors");
  if (!doc.contains("values") || !doc["values"].is_object()) throw ValidationError("template bank: \"values\" must be an object");

  for (auto it = doc["values"].begin(); it != doc["values"].end(); ++it) {
    ValueTemplates vt{it.key(), {}};
    const auto& jv = it.value();
    for (const auto& jt : jv.value("templates", nlohmann::json::array())) {
      if (!jt.is_object() || !jt.contains("text") || !jt["text"].is_string())
        throw ValidationError("template bank: " + vt.value + ": template needs a \"text\" string");
      vt.templates.push_back({jt["text"].get<std::string>(),
                              detail::string_array(jt.value("roles", nlohmann::json::array()), vt.value + ".roles")});
    }
    for (const auto& js : jv.value("signatures", nlohmann::json::array())) {
      const auto roles = detail::string_array(js, vt.value + ".signatures");
      for (const std::string& frame : frames) {
        Template t{frame, roles};
        bool fits = true;
        try {
          detail::split_template(t);
        } catch (const ValidationError&) {
          fits = false;
        }
        if (fits) vt.templates.push_back(std::move(t));
      }
    }
    for (const Template& t : vt.templates) detail::split_template(t);
    bank.values.push_back(std::move(vt));
  }
  return bank;
}

inline TemplateBank load_template_bank(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return template_bank_from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

inline Dataset generate_synthetic(const TemplateBank& bank, const GeneratorConfig& config, const Ontology& ontology,
                                  Rng& rng) {
  validate(config, ontology);
  if (bank.values.empty()) throw ValidationError("template bank is empty");
  for (const ValueTemplates& vt : bank.values) {
    if (vt.templates.empty()) throw ValidationError("no templates for \"" + vt.value + "\"");
    if (!ontology.description_position(vt.value))
      throw ValidationError("template value \"" + vt.value + "\" is not an ontology description");
    for (const Template& t : vt.templates)
      for (const std::string& r : t.roles)
        if (!ontology.has_role(r)) throw ValidationError("template for \"" + vt.value + "\" uses unknown role \"" + r + "\"");
  }

  Dataset out;
  out.reserve(bank.values.size() * static_cast<std::size_t>(config.target_per_value));
  for (const ValueTemplates& vt : bank.values) {
    for (int n = 0; n < config.target_per_value; ++n) {
      const Template& t = vt.templates[uniform_index(rng, vt.templates.size())];
      const GenerationRequest request = sample_generation_request(config, ontology, rng);

      Situation s;
      char id[16];
      std::snprintf(id, sizeof id, "-%05d", n + 1);
      s.id = vt.value + id;
      s.seed_value = vt.value;

      std::vector<std::string> slot_text(t.roles.size());
      for (auto& text : slot_text) text = bank.fillers[uniform_index(rng, bank.fillers.size())];
      const auto pieces = detail::split_template(t);
      if (!pieces.empty() && pieces.front().slot >= 0) {
        std::string& first = slot_text[static_cast<std::size_t>(pieces.front().slot)];
        first[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(first[0])));
      }
      for (const auto& piece : pieces)
        s.sentence += piece.slot < 0 ? piece.literal : slot_text[static_cast<std::size_t>(piece.slot)];
      for (std::size_t r = 0; r < t.roles.size(); ++r) s.fragments.push_back({slot_text[r], t.roles[r]});

      for (const std::string& role : request.sampled_roles) {
        if (std::find(t.roles.begin(), t.roles.end(), role) != t.roles.end()) continue;
        const std::string& connector = bank.connectors[uniform_index(rng, bank.connectors.size())];
        const std::string& filler = bank.fillers[uniform_index(rng, bank.fillers.size())];
        s.sentence += " " + connector + " " + filler;
        s.fragments.push_back({filler, role});
      }
      s.sentence += '.';
      out.push_back(std::move(s));
    }
  }
  return out;
}

} // namespace moralframe::corpus
