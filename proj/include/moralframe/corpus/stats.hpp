#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "../error.hpp"
#include "../situation.hpp"

namespace moralframe::corpus {

using RoleCount = std::pair<std::string, std::size_t>;

struct CorpusStats {
  std::map<std::string, std::size_t> role_frequencies;
  double rank_frequency_slope = 0.0;
  std::map<std::string, std::size_t> per_value_counts;
  std::map<std::string, std::vector<RoleCount>> top_roles_per_value;
};

// Descending count, then name.
inline std::vector<RoleCount> ranked(const std::map<std::string, std::size_t>& counts) {
  std::vector<RoleCount> out(counts.begin(), counts.end());
  std::stable_sort(out.begin(), out.end(), [](const RoleCount& a, const RoleCount& b) { return a.second > b.second; });
  return out;
}

// Least-squares slope of log(frequency) against log(rank). Fewer than two
// ranks has no slope; 0 is reported.
inline double rank_frequency_slope(const std::map<std::string, std::size_t>& counts) {
  const auto r = ranked(counts);
  if (r.size() < 2) return 0.0;
  const double n = static_cast<double>(r.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    sx += std::log(static_cast<double>(i + 1));
    sy += std::log(static_cast<double>(r[i].second));
  }
  const double mx = sx / n, my = sy / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double dx = std::log(static_cast<double>(i + 1)) - mx;
    sxy += dx * (std::log(static_cast<double>(r[i].second)) - my);
    sxx += dx * dx;
  }
  return sxx == 0.0 ? 0.0 : sxy / sxx;
}

inline CorpusStats corpus_stats(const Dataset& data, std::size_t top_k = 10) {
  if (data.empty()) throw ValidationError("corpus statistics need a non-empty dataset");
  CorpusStats stats;
  std::map<std::string, std::map<std::string, std::size_t>> per_value_roles;
  for (const Situation& s : data) {
    for (const Fragment& f : s.fragments) ++stats.role_frequencies[f.role];
    if (s.seed_value) {
      ++stats.per_value_counts[*s.seed_value];
      auto& roles = per_value_roles[*s.seed_value];
      for (const Fragment& f : s.fragments) ++roles[f.role];
    }
  }
  stats.rank_frequency_slope = rank_frequency_slope(stats.role_frequencies);
  for (const auto& [value, roles] : per_value_roles) {
    auto top = ranked(roles);
    if (top.size() > top_k) top.resize(top_k);
    stats.top_roles_per_value[value] = std::move(top);
  }
  return stats;
}

inline nlohmann::ordered_json to_json(const CorpusStats& s) {
  nlohmann::ordered_json j;
  j["role_frequencies"] = nlohmann::ordered_json::object();
  for (const auto& [role, count] : ranked(s.role_frequencies)) j["role_frequencies"][role] = count;
  j["rank_frequency_slope"] = s.rank_frequency_slope;
  j["per_value_counts"] = s.per_value_counts;
  j["top_roles_per_value"] = nlohmann::ordered_json::object();
  for (const auto& [value, top] : s.top_roles_per_value) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& [role, count] : top) arr.push_back({{"role", role}, {"count", count}});
    j["top_roles_per_value"][value] = std::move(arr);
  }
  return j;
}

} // namespace moralframe::corpus
