#pragma once

// Lexicon-average emotion polarity with windowed negation.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "../error.hpp"
#include "../io.hpp"
#include "../situation.hpp"

namespace moralframe {

struct PolarityLexicon {
  std::unordered_map<std::string, double> entries;
  std::set<std::string> negators{"not", "no", "never", "n't"};
};

inline PolarityLexicon parse_lexicon(std::string_view text, const std::string& source = "<string>") {
  PolarityLexicon lex;
  const auto lines = split_lines(text);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const std::string_view line = trim(lines[ln]);
    if (line.empty() || line.front() == '#') continue;
    const std::string where = source + ":" + std::to_string(ln + 1);
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) throw ValidationError(where + ": expected token<TAB>valence");
    std::string token(trim(line.substr(0, tab)));
    const std::string_view num = trim(line.substr(tab + 1));
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), v);
    if (ec != std::errc() || ptr != num.data() + num.size()) throw ValidationError(where + ": unparseable valence");
    if (v < -1.0 || v > 1.0) throw ValidationError(where + ": valence outside [-1,1]");
    std::transform(token.begin(), token.end(), token.begin(), [](unsigned char c) { return std::tolower(c); });
    if (token.empty()) throw ValidationError(where + ": empty token");
    if (!lex.entries.emplace(token, v).second) throw ValidationError(where + ": duplicate token \"" + token + "\"");
  }
  return lex;
}

inline PolarityLexicon load_lexicon(const std::filesystem::path& path) {
  return parse_lexicon(read_text_file(path), path.string());
}

// Lowercase words; an apostrophe inside a word stays, and a trailing "n't"
// is split off as its own token ("didn't" -> "did", "n't").
inline std::vector<std::string> polarity_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    while (!cur.empty() && cur.back() == '\'') cur.pop_back();
    if (cur.size() > 3 && cur.ends_with("n't")) {
      out.push_back(cur.substr(0, cur.size() - 3));
      out.push_back("n't");
    } else if (!cur.empty()) {
      out.push_back(cur);
    }
    cur.clear();
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c >= 0x80 || (c == '\'' && !cur.empty()))
      cur += static_cast<char>(std::tolower(c));
    else
      flush();
  }
  flush();
  return out;
}

// Mean valence of lexicon tokens, each flipped when a negator appears among
// the 3 preceding tokens; 0 without matches.
inline double polarity(std::string_view sentence, const PolarityLexicon& lex) {
  const auto tokens = polarity_tokens(sentence);
  double sum = 0.0;
  std::size_t matched = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto it = lex.entries.find(tokens[i]);
    if (it == lex.entries.end()) continue;
    bool negated = false;
    for (std::size_t back = 1; back <= 3 && back <= i; ++back)
      if (lex.negators.count(tokens[i - back])) negated = true;
    sum += negated ? -it->second : it->second;
    ++matched;
  }
  if (matched == 0) return 0.0;
  return std::clamp(sum / static_cast<double>(matched), -1.0, 1.0);
}

inline std::map<std::string, double> mean_polarity_by_value(const Dataset& data, const PolarityLexicon& lex) {
  std::map<std::string, std::pair<double, std::size_t>> acc;
  for (const auto& s : data) {
    if (!s.seed_value) continue;
    auto& [sum, n] = acc[*s.seed_value];
    sum += polarity(s.sentence, lex);
    ++n;
  }
  std::map<std::string, double> out;
  for (const auto& [value, a] : acc) out[value] = a.first / static_cast<double>(a.second);
  return out;
}

} // namespace moralframe
