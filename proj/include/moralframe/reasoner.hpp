#pragma once

// Satisfaction of descriptions by situations. A situation satisfies a
// description (crisp) when every role of the description classifies at least
// one fragment. Two graded scorers relax this to [0,1]:
//   coverage   - fraction of the description's roles present in the situation
//   projection - length of the unit role-count vector restricted to the
//                description's role coordinates

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "io.hpp"
#include "ontology.hpp"
#include "situation.hpp"

namespace moralframe {

enum class Scorer { coverage, projection };

inline std::string_view to_string(Scorer s) { return s == Scorer::coverage ? "coverage" : "projection"; }

inline Scorer parse_scorer(std::string_view name) {
  if (name == "coverage") return Scorer::coverage;
  if (name == "projection") return Scorer::projection;
  throw ValidationError("unknown scorer \"" + std::string(name) + "\" (expected coverage or projection)");
}

struct ReasonerOptions {
  Scorer scorer = Scorer::coverage;
  bool use_hierarchy = false;
};

struct SatisfactionVector {
  std::vector<double> scores;
  std::vector<double> probabilities;
};

// Per-role fragment counts, indexed by role id.
inline std::vector<std::size_t> encode_situation(const Situation& s, const Ontology& o, bool use_hierarchy = false) {
  std::vector<std::size_t> counts(o.role_count(), 0);
  for (const Fragment& f : s.fragments) {
    const RoleId id = o.role_id(f.role);
    if (use_hierarchy) {
      for (RoleId r : o.closure_ids(id)) ++counts[r];
    } else {
      ++counts[id];
    }
  }
  return counts;
}

namespace detail {

inline std::vector<char> present_roles(const Situation& s, const Ontology& o, bool use_hierarchy) {
  std::vector<char> present(o.role_count(), 0);
  for (const Fragment& f : s.fragments) {
    const RoleId id = o.role_id(f.role);
    if (use_hierarchy) {
      for (RoleId r : o.closure_ids(id)) present[r] = 1;
    } else {
      present[id] = 1;
    }
  }
  return present;
}

inline std::size_t covered(const Description& d, const std::vector<char>& present) {
  std::size_t hits = 0;
  for (RoleId r : d.role_ids) hits += present[r] ? 1 : 0;
  return hits;
}

inline double coverage_from_presence(const Description& d, const std::vector<char>& present) {
  if (d.role_ids.empty()) throw ValidationError("description \"" + d.name + "\" has no roles");
  return static_cast<double>(covered(d, present)) / static_cast<double>(d.role_ids.size());
}

inline double projection_from_counts(const Description& d, const std::vector<std::size_t>& counts) {
  double total = 0.0;
  for (std::size_t c : counts) total += static_cast<double>(c) * static_cast<double>(c);
  if (total == 0.0) throw ValidationError("situation encodes to the zero vector");
  double inside = 0.0;
  for (RoleId r : d.role_ids) inside += static_cast<double>(counts[r]) * static_cast<double>(counts[r]);
  return std::min(1.0, std::sqrt(inside / total));
}

} // namespace detail

inline bool crisp_satisfies(const Situation& s, const Description& d, const Ontology& o, bool use_hierarchy = false) {
  const auto present = detail::present_roles(s, o, use_hierarchy);
  return detail::covered(d, present) == d.role_ids.size();
}

inline double coverage_score(const Situation& s, const Description& d, const Ontology& o, bool use_hierarchy = false) {
  return detail::coverage_from_presence(d, detail::present_roles(s, o, use_hierarchy));
}

inline double projection_score(const Situation& s, const Description& d, const Ontology& o,
                               bool use_hierarchy = false) {
  if (s.fragments.empty()) throw ValidationError("situation " + s.id + " has no fragments");
  return detail::projection_from_counts(d, encode_situation(s, o, use_hierarchy));
}

// L1-normalized scores; uniform when every score is zero.
inline std::vector<double> normalize_scores(const std::vector<double>& scores) {
  std::vector<double> p(scores.size(), 0.0);
  if (scores.empty()) return p;
  double sum = 0.0;
  for (double v : scores) sum += v;
  if (sum <= 0.0) {
    std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(scores.size()));
    return p;
  }
  for (std::size_t i = 0; i < scores.size(); ++i) p[i] = scores[i] / sum;
  return p;
}

inline SatisfactionVector satisfaction_vector(const Situation& s, const Ontology& o, ReasonerOptions opts = {}) {
  validate_situation(s, o);
  SatisfactionVector v;
  v.scores.reserve(o.description_count());
  if (opts.scorer == Scorer::coverage) {
    const auto present = detail::present_roles(s, o, opts.use_hierarchy);
    for (const Description& d : o.descriptions()) v.scores.push_back(detail::coverage_from_presence(d, present));
  } else {
    const auto counts = encode_situation(s, o, opts.use_hierarchy);
    for (const Description& d : o.descriptions()) v.scores.push_back(detail::projection_from_counts(d, counts));
  }
  v.probabilities = normalize_scores(v.scores);
  return v;
}

// Position of the highest score; first wins on ties.
inline std::size_t predominant_index(const std::vector<double>& scores) {
  if (scores.empty()) throw ValidationError("empty satisfaction vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i)
    if (scores[i] > scores[best]) best = i;
  return best;
}

inline const std::string& predominant_description(const SatisfactionVector& v, const Ontology& o) {
  if (v.scores.size() != o.description_count())
    throw ValidationError("satisfaction vector has " + std::to_string(v.scores.size()) + " entries, ontology has " +
                          std::to_string(o.description_count()) + " descriptions");
  return o.descriptions()[predominant_index(v.scores)].name;
}

struct BatchInference {
  std::vector<std::string> ids;
  std::vector<SatisfactionVector> rows;
  std::optional<double> predominance_rate;  // over situations with a seed value

  std::size_t size() const noexcept { return rows.size(); }

  std::vector<std::vector<double>> probability_matrix() const {
    std::vector<std::vector<double>> m;
    m.reserve(rows.size());
    for (const auto& r : rows) m.push_back(r.probabilities);
    return m;
  }
};

inline BatchInference batch_infer(const Dataset& data, const Ontology& o, ReasonerOptions opts = {}) {
  BatchInference out;
  out.ids.resize(data.size());
  out.rows.resize(data.size());

  // Rows are independent; each worker fills a contiguous slice so the output
  // order never depends on scheduling.
  const std::size_t workers =
      data.size() < 2048 ? 1 : std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), 8));
  std::vector<std::string> failures(workers);
  auto work = [&](std::size_t w) {
    const std::size_t begin = data.size() * w / workers, end = data.size() * (w + 1) / workers;
    for (std::size_t i = begin; i < end; ++i) {
      try {
        out.ids[i] = data[i].id;
        out.rows[i] = satisfaction_vector(data[i], o, opts);
      } catch (const ValidationError& e) {
        failures[w] = e.what();
        return;
      }
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  for (const auto& f : failures)
    if (!f.empty()) throw ValidationError(f);

  std::size_t labeled = 0, hits = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!data[i].seed_value) continue;
    ++labeled;
    if (o.descriptions()[predominant_index(out.rows[i].scores)].name == *data[i].seed_value) ++hits;
  }
  if (labeled > 0) out.predominance_rate = static_cast<double>(hits) / static_cast<double>(labeled);
  return out;
}

// "id,<description names...>" then one row of probabilities per situation.
inline std::string satisfaction_csv(const BatchInference& b, const Ontology& o) {
  std::string out = "id";
  for (const auto& d : o.descriptions()) out += "," + d.name;
  out += '\n';
  for (std::size_t i = 0; i < b.size(); ++i) {
    out += b.ids[i];
    for (double p : b.rows[i].probabilities) out += "," + format_fixed(p, 9);
    out += '\n';
  }
  return out;
}

inline std::string satisfaction_jsonl(const BatchInference& b) {
  std::string out;
  for (std::size_t i = 0; i < b.size(); ++i) {
    nlohmann::ordered_json j;
    j["id"] = b.ids[i];
    j["scores"] = b.rows[i].scores;
    j["probabilities"] = b.rows[i].probabilities;
    out += j.dump();
    out += '\n';
  }
  return out;
}

} // namespace moralframe
