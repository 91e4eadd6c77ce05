#pragma once

// Generation requests and prompt text for an external sentence generator.
// The prompt instructs the generator (role play), shows a few structured
// examples (few-shot) and ends on an open SENTENCE slot (cloze). It never
// mentions moral values, so the word is rejected anywhere in its inputs.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <string>
#include <vector>

#include "../error.hpp"
#include "../ontology.hpp"
#include "../random.hpp"
#include "../situation.hpp"
#include "record_format.hpp"

namespace moralframe::corpus {

struct GeneratorConfig {
  int roles_min = 2;
  int roles_max = 15;
  double temperature_min = 0.01;
  double temperature_max = 1.0;
  int few_shot_count = 3;
  std::uint64_t seed = 0;
  int target_per_value = 100;
};

// Roles are drawn from the union of description roles, so that is the bound.
inline void validate(const GeneratorConfig& c, const Ontology& o) {
  const auto pool = o.description_role_union().size();
  if (c.roles_min < 1 || c.roles_min > c.roles_max || static_cast<std::size_t>(c.roles_max) > pool)
    throw ValidationError("role range [" + std::to_string(c.roles_min) + ", " + std::to_string(c.roles_max) +
                          "] must satisfy 1 <= min <= max <= " + std::to_string(pool));
  if (!(c.temperature_min > 0.0) || c.temperature_min > c.temperature_max)
    throw ValidationError("temperature range must satisfy 0 < min <= max");
  if (c.few_shot_count < 0) throw ValidationError("few_shot_count must be non-negative");
  if (c.target_per_value < 0) throw ValidationError("target_per_value must be non-negative");
}

struct GenerationRequest {
  std::vector<std::string> sampled_roles;
  double temperature = 0.0;
};

inline GenerationRequest sample_generation_request(const GeneratorConfig& c, const Ontology& o, Rng& rng) {
  const auto pool = o.description_role_union();
  GenerationRequest req;
  const int size = uniform_int(rng, c.roles_min, std::min<int>(c.roles_max, static_cast<int>(pool.size())));
  for (std::size_t pos : sample_without_replacement(rng, pool.size(), static_cast<std::size_t>(size)))
    req.sampled_roles.push_back(o.role_name(pool[pos]));
  req.temperature = uniform_real(rng, c.temperature_min, c.temperature_max);
  if (req.temperature > c.temperature_max) req.temperature = c.temperature_max;
  return req;
}

inline bool contains_value_word(std::string_view text) {
  static constexpr std::string_view needle = "value";
  if (text.size() < needle.size()) return false;
  for (std::size_t i = 0; i + needle.size() <= text.size(); ++i) {
    bool hit = true;
    for (std::size_t k = 0; k < needle.size() && hit; ++k)
      hit = std::tolower(static_cast<unsigned char>(text[i + k])) == needle[k];
    if (hit) return true;
  }
  return false;
}

inline std::string build_prompt(const GeneratorConfig& c, const std::vector<Situation>& few_shots,
                                const std::vector<std::string>& sampled_roles) {
  const auto n = static_cast<int>(sampled_roles.size());
  if (n < c.roles_min || n > c.roles_max)
    throw ValidationError("requested " + std::to_string(n) + " roles, expected between " + std::to_string(c.roles_min) +
                          " and " + std::to_string(c.roles_max));
  if (static_cast<int>(few_shots.size()) != c.few_shot_count)
    throw ValidationError("expected " + std::to_string(c.few_shot_count) + " examples, got " +
                          std::to_string(few_shots.size()));

  std::string prompt =
      "You are a structured sentence generator. You write one English sentence and annotate its fragments "
      "with the semantic roles they play.\n"
      "Each answer has the sentence on a SENTENCE line, then a ROLES line, then one line per fragment in the "
      "form \"- <fragment> :: <Role>\".\n\n";
  for (std::size_t i = 0; i < few_shots.size(); ++i) {
    prompt += "Example " + std::to_string(i + 1) + ":\n";
    prompt += serialize_record(few_shots[i]);
    prompt += '\n';
  }
  prompt += "Now write a new sentence that involves the following roles: ";
  for (std::size_t i = 0; i < sampled_roles.size(); ++i) {
    if (i > 0) prompt += ", ";
    prompt += sampled_roles[i];
  }
  prompt += ".\nAnswer in exactly the same format as the examples and end the sentence with a full stop.\nSENTENCE:";

  if (contains_value_word(prompt))
    throw ValidationError("prompt inputs must not mention the word \"value\"");
  return prompt;
}

} // namespace moralframe::corpus
