#pragma once

#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "../error.hpp"
#include "../ontology.hpp"
#include "../random.hpp"
#include "../situation.hpp"
#include "completion_client.hpp"
#include "prompt.hpp"
#include "record_format.hpp"

namespace moralframe::corpus {

struct RemoteGeneration {
  std::string raw;  // every completed record, in request order
  Dataset situations;
  ParseReport report;
};

// The prompt ends on an open "SENTENCE:" slot, so a completion usually starts
// mid-record. Restore the keyword unless the generator repeated it.
inline std::string complete_record(const std::string& completion) {
  for (const std::string& line : split_lines(completion)) {
    if (trim(line).empty()) continue;
    if (detail::keyword_rest(line, "SENTENCE")) return completion;
    break;
  }
  return "SENTENCE:" + completion;
}

// For each value with enough labeled examples, issues target_per_value
// requests whose few-shot examples all carry that value. Accepted records
// inherit the value of their examples.
inline RemoteGeneration generate_remote(const Dataset& examples, const GeneratorConfig& config,
                                        const Ontology& ontology, const CompletionClient& client, Rng& rng) {
  validate(config, ontology);
  std::map<std::string, std::vector<const Situation*>> by_value;
  for (const Situation& s : examples)
    if (s.seed_value) by_value[*s.seed_value].push_back(&s);

  std::vector<CompletionClient::Request> requests;
  std::vector<std::string> request_values;
  for (const Description& d : ontology.descriptions()) {
    const auto it = by_value.find(d.name);
    if (it == by_value.end() || it->second.size() < static_cast<std::size_t>(config.few_shot_count)) continue;
    for (int n = 0; n < config.target_per_value; ++n) {
      const GenerationRequest req = sample_generation_request(config, ontology, rng);
      std::vector<Situation> shots;
      for (std::size_t pos : sample_without_replacement(rng, it->second.size(), static_cast<std::size_t>(config.few_shot_count)))
        shots.push_back(*it->second[pos]);
      char id[16];
      std::snprintf(id, sizeof id, "-%05d", n + 1);
      requests.push_back({build_prompt(config, shots, req.sampled_roles), req.temperature, d.name + id});
      request_values.push_back(d.name);
    }
  }
  if (requests.empty()) throw ValidationError("no value has enough labeled examples for few-shot prompting");

  const auto completions = client.fetch_all(requests);
  RemoteGeneration out;
  for (std::size_t i = 0; i < completions.size(); ++i) {
    const std::string record = complete_record(completions[i]);
    if (i > 0) out.raw += '\n';
    out.raw += record;
    if (record.back() != '\n') out.raw += '\n';

    ParseResult parsed = parse_structured_output(record, ontology, requests[i].request_id);
    out.report.total += parsed.report.total;
    out.report.accepted += parsed.report.accepted;
    out.report.hallucinated += parsed.report.hallucinated;
    out.report.malformed += parsed.report.malformed;
    for (Situation& s : parsed.situations) {
      s.seed_value = request_values[i];
      out.situations.push_back(std::move(s));
    }
  }
  return out;
}

} // namespace moralframe::corpus
