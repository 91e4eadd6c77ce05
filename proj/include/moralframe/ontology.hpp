#pragma once

// Flat export of a Descriptions-and-Situations value module: named roles with
// an optional single-parent hierarchy, and descriptions defined as role sets.

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "io.hpp"

namespace moralframe {

using RoleId = std::size_t;

struct Role {
  std::string name;
  std::optional<std::string> parent;
};

struct Description {
  std::string name;
  std::vector<std::string> roles;  // sorted, unique
  std::vector<RoleId> role_ids;    // same order as roles
};

struct OntologyStats {
  std::size_t role_count = 0;
  std::size_t description_count = 0;
  double mean_roles_per_description = 0.0;
};

class Ontology {
public:
  Ontology() = default;

  // Validates and indexes. Roles are re-ordered by name; descriptions keep
  // their given order.
  Ontology(std::vector<Role> roles, std::vector<Description> descriptions) {
    std::sort(roles.begin(), roles.end(), [](const Role& a, const Role& b) { return a.name < b.name; });
    roles_ = std::move(roles);
    for (std::size_t i = 0; i < roles_.size(); ++i) {
      if (roles_[i].name.empty()) throw ValidationError("role name must be non-empty");
      if (!role_index_.emplace(roles_[i].name, i).second)
        throw ValidationError("duplicate role name \"" + roles_[i].name + "\"");
    }
    for (const Role& r : roles_) {
      if (r.parent && !role_index_.count(*r.parent))
        throw ValidationError("role \"" + r.name + "\" has unknown parent \"" + *r.parent + "\"");
    }
    build_closures();

    std::set<std::string> seen;
    for (Description& d : descriptions) {
      if (d.name.empty()) throw ValidationError("description name must be non-empty");
      if (!seen.insert(d.name).second) throw ValidationError("duplicate description name \"" + d.name + "\"");
      if (d.roles.empty()) throw ValidationError("description \"" + d.name + "\" has no roles");
      std::set<std::string> unique;
      for (const std::string& r : d.roles) {
        if (!role_index_.count(r))
          throw ValidationError("description \"" + d.name + "\" references unknown role \"" + r + "\"");
        if (!unique.insert(r).second)
          throw ValidationError("description \"" + d.name + "\" lists role \"" + r + "\" twice");
      }
      d.roles.assign(unique.begin(), unique.end());
      d.role_ids.clear();
      for (const std::string& r : d.roles) d.role_ids.push_back(role_index_.at(r));
      description_index_.emplace(d.name, description_index_.size());
    }
    descriptions_ = std::move(descriptions);
  }

  const std::vector<Role>& roles() const noexcept { return roles_; }
  const std::vector<Description>& descriptions() const noexcept { return descriptions_; }
  std::size_t role_count() const noexcept { return roles_.size(); }
  std::size_t description_count() const noexcept { return descriptions_.size(); }

  bool has_role(const std::string& name) const { return role_index_.count(name) != 0; }

  RoleId role_id(const std::string& name) const {
    auto it = role_index_.find(name);
    if (it == role_index_.end()) throw ValidationError("unknown role \"" + name + "\"");
    return it->second;
  }

  const std::string& role_name(RoleId id) const { return roles_.at(id).name; }

  std::optional<std::size_t> description_position(const std::string& name) const {
    auto it = description_index_.find(name);
    if (it == description_index_.end()) return std::nullopt;
    return it->second;
  }

  const Description& description(const std::string& name) const {
    auto pos = description_position(name);
    if (!pos) throw ValidationError("unknown description \"" + name + "\"");
    return descriptions_[*pos];
  }

  std::vector<std::string> description_names() const {
    std::vector<std::string> names;
    names.reserve(descriptions_.size());
    for (const auto& d : descriptions_) names.push_back(d.name);
    return names;
  }

  // The role itself plus every ancestor, as sorted role ids.
  const std::vector<RoleId>& closure_ids(RoleId id) const { return closures_.at(id); }

  std::set<std::string> role_closure(const std::string& role) const {
    std::set<std::string> out;
    for (RoleId id : closure_ids(role_id(role))) out.insert(roles_[id].name);
    return out;
  }

  // Every role referenced by some description, sorted by role id.
  std::vector<RoleId> description_role_union() const {
    std::set<RoleId> all;
    for (const auto& d : descriptions_) all.insert(d.role_ids.begin(), d.role_ids.end());
    return {all.begin(), all.end()};
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json doc;
    doc["roles"] = nlohmann::ordered_json::array();
    for (const Role& r : roles_) {
      nlohmann::ordered_json jr;
      jr["name"] = r.name;
      jr["parent"] = r.parent ? nlohmann::ordered_json(*r.parent) : nlohmann::ordered_json(nullptr);
      doc["roles"].push_back(std::move(jr));
    }
    doc["descriptions"] = nlohmann::ordered_json::array();
    for (const Description& d : descriptions_) {
      nlohmann::ordered_json jd;
      jd["name"] = d.name;
      jd["roles"] = d.roles;
      doc["descriptions"].push_back(std::move(jd));
    }
    return doc;
  }

private:
  void build_closures() {
    closures_.assign(roles_.size(), {});
    for (RoleId start = 0; start < roles_.size(); ++start) {
      std::set<RoleId> visited{start};
      RoleId cur = start;
      while (roles_[cur].parent) {
        const RoleId next = role_index_.at(*roles_[cur].parent);
        if (!visited.insert(next).second)
          throw ValidationError("role hierarchy cycle through \"" + roles_[start].name + "\"");
        cur = next;
      }
      closures_[start].assign(visited.begin(), visited.end());
    }
  }

  std::vector<Role> roles_;
  std::vector<Description> descriptions_;
  std::unordered_map<std::string, RoleId> role_index_;
  std::unordered_map<std::string, std::size_t> description_index_;
  std::vector<std::vector<RoleId>> closures_;
};

namespace detail {

inline std::size_t line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

inline void reject_unknown_keys(const nlohmann::json& obj, std::initializer_list<const char*> allowed,
                                const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; }))
      throw ValidationError(where + ": unknown key \"" + it.key() + "\"");
  }
}

inline const std::string& require_string(const nlohmann::json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(where + ": missing \"" + key + "\"");
  if (!it->is_string()) throw ValidationError(where + "." + key + ": expected a string");
  return it->get_ref<const std::string&>();
}

} // namespace detail

inline Ontology ontology_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ValidationError("ontology: top level must be an object");
  detail::reject_unknown_keys(doc, {"roles", "descriptions"}, "ontology");
  if (!doc.contains("roles") || !doc["roles"].is_array()) throw ValidationError("ontology: \"roles\" must be an array");
  if (!doc.contains("descriptions") || !doc["descriptions"].is_array())
    throw ValidationError("ontology: \"descriptions\" must be an array");

  std::vector<Role> roles;
  for (std::size_t i = 0; i < doc["roles"].size(); ++i) {
    const auto& jr = doc["roles"][i];
    const std::string where = "roles[" + std::to_string(i) + "]";
    if (!jr.is_object()) throw ValidationError(where + ": expected an object");
    detail::reject_unknown_keys(jr, {"name", "parent"}, where);
    Role r;
    r.name = detail::require_string(jr, "name", where);
    if (r.name.empty()) throw ValidationError(where + ".name: must be non-empty");
    if (auto p = jr.find("parent"); p != jr.end() && !p->is_null()) {
      if (!p->is_string()) throw ValidationError(where + ".parent: expected a string or null");
      r.parent = p->get<std::string>();
    }
    roles.push_back(std::move(r));
  }

  std::vector<Description> descriptions;
  for (std::size_t i = 0; i < doc["descriptions"].size(); ++i) {
    const auto& jd = doc["descriptions"][i];
    const std::string where = "descriptions[" + std::to_string(i) + "]";
    if (!jd.is_object()) throw ValidationError(where + ": expected an object");
    detail::reject_unknown_keys(jd, {"name", "roles"}, where);
    Description d;
    d.name = detail::require_string(jd, "name", where);
    if (!jd.contains("roles") || !jd["roles"].is_array()) throw ValidationError(where + ".roles: expected an array");
    for (std::size_t k = 0; k < jd["roles"].size(); ++k) {
      if (!jd["roles"][k].is_string())
        throw ValidationError(where + ".roles[" + std::to_string(k) + "]: expected a string");
      d.roles.push_back(jd["roles"][k].get<std::string>());
    }
    descriptions.push_back(std::move(d));
  }

  try {
    return Ontology(std::move(roles), std::move(descriptions));
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("ontology: ") + e.what());
  }
}

inline Ontology ontology_from_string(const std::string& text, const std::string& source = "<string>") {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(source + ":" + std::to_string(detail::line_of_offset(text, e.byte)) +
                          ": malformed JSON: " + e.what());
  }
  try {
    return ontology_from_json(doc);
  } catch (const ValidationError& e) {
    throw ValidationError(source + ": " + e.what());
  }
}

inline Ontology load_ontology(const std::filesystem::path& path) {
  return ontology_from_string(read_text_file(path), path.string());
}

inline OntologyStats ontology_stats(const Ontology& o) {
  OntologyStats s;
  s.role_count = o.role_count();
  s.description_count = o.description_count();
  if (s.description_count > 0) {
    std::size_t total = 0;
    for (const auto& d : o.descriptions()) total += d.roles.size();
    s.mean_roles_per_description = static_cast<double>(total) / static_cast<double>(s.description_count);
  }
  return s;
}

} // namespace moralframe
