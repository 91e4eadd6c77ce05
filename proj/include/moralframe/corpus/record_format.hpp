#pragma once

// Structured sentence records as exchanged with a text generator:
//
//   SENTENCE: The man was taken to prison on fraud charges.
//   ROLES:
//   - The man :: Suspect
//   - fraud charges :: Charges
//
// Records are separated by a blank line. The writer emits exactly this form.
// The reader is lenient: keywords are case-insensitive, blank lines may
// appear before the first fragment, and prose around records is skipped.
// A record starts at every SENTENCE line and is then classified as
// accepted, hallucinated (parses, but names a role the ontology lacks) or
// malformed (anything structurally wrong, including a sentence that does not
// end with a full stop).

#include <cctype>
#include <cstddef>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "../error.hpp"
#include "../io.hpp"
#include "../ontology.hpp"
#include "../situation.hpp"

namespace moralframe::corpus {

struct ParseReport {
  std::size_t total = 0;
  std::size_t accepted = 0;
  std::size_t hallucinated = 0;
  std::size_t malformed = 0;

  friend bool operator==(const ParseReport&, const ParseReport&) = default;
};

inline std::string to_string(const ParseReport& r) {
  return std::to_string(r.total) + "/" + std::to_string(r.accepted) + "/" + std::to_string(r.hallucinated) + "/" +
         std::to_string(r.malformed);
}

struct ParseResult {
  Dataset situations;
  ParseReport report;
};

inline void append_record(std::string& out, std::string_view sentence, const std::vector<Fragment>& fragments) {
  auto reject_newline = [](std::string_view s) {
    if (s.find('\n') != std::string_view::npos || s.find('\r') != std::string_view::npos)
      throw ValidationError("record text must be a single line: \"" + std::string(s) + "\"");
  };
  reject_newline(sentence);
  out += "SENTENCE: ";
  out += sentence;
  out += "\nROLES:\n";
  for (const Fragment& f : fragments) {
    reject_newline(f.text);
    reject_newline(f.role);
    out += "- ";
    out += f.text;
    out += " :: ";
    out += f.role;
    out += '\n';
  }
}

inline std::string serialize_record(const Situation& s) {
  std::string out;
  append_record(out, s.sentence, s.fragments);
  return out;
}

inline std::string serialize_records(const Dataset& data) {
  std::string out;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (i > 0) out += '\n';
    append_record(out, data[i].sentence, data[i].fragments);
  }
  return out;
}

namespace detail {

// Returns the text after "<keyword>:" when the line starts with it.
inline std::optional<std::string_view> keyword_rest(std::string_view line, std::string_view keyword) {
  line = trim(line);
  if (line.size() <= keyword.size() || line[keyword.size()] != ':') return std::nullopt;
  for (std::size_t i = 0; i < keyword.size(); ++i) {
    if (std::toupper(static_cast<unsigned char>(line[i])) != keyword[i]) return std::nullopt;
  }
  return trim(line.substr(keyword.size() + 1));
}

inline bool is_fragment_line(std::string_view line) {
  line = trim(line);
  return !line.empty() && line.front() == '-';
}

inline std::optional<Fragment> parse_fragment_line(std::string_view line) {
  line = trim(line);
  line.remove_prefix(1);
  const std::size_t sep = line.rfind("::");
  if (sep == std::string_view::npos) return std::nullopt;
  Fragment f{std::string(trim(line.substr(0, sep))), std::string(trim(line.substr(sep + 2)))};
  if (f.text.empty() || f.role.empty()) return std::nullopt;
  return f;
}

enum class Verdict { accepted, hallucinated, malformed };

} // namespace detail

inline ParseResult parse_structured_output(std::string_view raw, const Ontology& ontology,
                                           std::string_view id_prefix = "rec") {
  ParseResult result;
  const auto lines = split_lines(raw);
  std::size_t i = 0;
  while (i < lines.size()) {
    const auto sentence = detail::keyword_rest(lines[i], "SENTENCE");
    if (!sentence) {
      ++i;  // prose
      continue;
    }
    ++result.report.total;
    ++i;
    bool structural_ok = !sentence->empty() && sentence->back() == '.';

    while (i < lines.size() && trim(lines[i]).empty()) ++i;
    const auto roles_header = i < lines.size() ? detail::keyword_rest(lines[i], "ROLES") : std::nullopt;
    if (roles_header && roles_header->empty()) {
      ++i;
    } else {
      structural_ok = false;
    }

    std::vector<Fragment> fragments;
    if (structural_ok) {
      while (i < lines.size() && trim(lines[i]).empty()) ++i;
      while (i < lines.size() && detail::is_fragment_line(lines[i])) {
        if (auto f = detail::parse_fragment_line(lines[i])) {
          fragments.push_back(std::move(*f));
        } else {
          structural_ok = false;
        }
        ++i;
      }
      if (fragments.empty()) structural_ok = false;
    }

    detail::Verdict verdict = detail::Verdict::malformed;
    if (structural_ok) {
      verdict = detail::Verdict::accepted;
      for (const Fragment& f : fragments)
        if (!ontology.has_role(f.role)) verdict = detail::Verdict::hallucinated;
    }

    switch (verdict) {
    case detail::Verdict::accepted: {
      ++result.report.accepted;
      char id[32];
      std::snprintf(id, sizeof id, "-%06zu", result.report.total);
      result.situations.push_back({std::string(id_prefix) + id, std::string(*sentence), std::move(fragments), std::nullopt});
      break;
    }
    case detail::Verdict::hallucinated: ++result.report.hallucinated; break;
    case detail::Verdict::malformed: ++result.report.malformed; break;
    }
  }
  return result;
}

} // namespace moralframe::corpus
