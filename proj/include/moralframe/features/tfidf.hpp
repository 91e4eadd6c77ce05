#pragma once

// TF-IDF with smoothed inverse document frequency
//   idf(t) = ln((1 + n) / (1 + df(t))) + 1
// and raw term counts, rows scaled to unit Euclidean length.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "../error.hpp"
#include "matrix.hpp"

namespace moralframe {

// Lowercase, split on anything that is not an ASCII letter or digit. Bytes
// above 0x7f stay inside tokens so UTF-8 sequences are never cut.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c >= 0x80) {
      cur += static_cast<char>(std::tolower(c));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

using SparseRow = std::vector<std::pair<std::size_t, double>>;  // sorted by column

class TfidfModel {
public:
  TfidfModel() = default;
  TfidfModel(std::vector<std::string> vocabulary, std::vector<double> idf, std::size_t documents)
      : vocabulary_(std::move(vocabulary)), idf_(std::move(idf)), documents_(documents) {
    if (vocabulary_.size() != idf_.size()) throw ValidationError("vocabulary and idf sizes differ");
    for (std::size_t i = 0; i < vocabulary_.size(); ++i) {
      if (idf_[i] < 0.0) throw ValidationError("negative idf for \"" + vocabulary_[i] + "\"");
      if (!index_.emplace(vocabulary_[i], i).second) throw ValidationError("duplicate token \"" + vocabulary_[i] + "\"");
    }
  }

  const std::vector<std::string>& vocabulary() const noexcept { return vocabulary_; }
  const std::vector<double>& idf() const noexcept { return idf_; }
  std::size_t size() const noexcept { return vocabulary_.size(); }
  std::size_t documents() const noexcept { return documents_; }

  std::optional<std::size_t> column(const std::string& token) const {
    auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  SparseRow transform(std::string_view sentence) const {
    std::map<std::size_t, double> counts;
    for (const std::string& t : tokenize(sentence))
      if (auto col = column(t)) counts[*col] += 1.0;
    SparseRow row;
    double norm2 = 0.0;
    for (const auto& [col, count] : counts) {
      const double w = count * idf_[col];
      row.emplace_back(col, w);
      norm2 += w * w;
    }
    if (norm2 > 0.0) {
      const double inv = 1.0 / std::sqrt(norm2);
      for (auto& e : row) e.second *= inv;
    }
    return row;
  }

  nlohmann::json to_json() const { return {{"vocabulary", vocabulary_}, {"idf", idf_}, {"documents", documents_}}; }

  static TfidfModel from_json(const nlohmann::json& j) {
    return TfidfModel(j.at("vocabulary").get<std::vector<std::string>>(), j.at("idf").get<std::vector<double>>(),
                      j.at("documents").get<std::size_t>());
  }

private:
  std::vector<std::string> vocabulary_;  // sorted
  std::vector<double> idf_;
  std::size_t documents_ = 0;
  std::unordered_map<std::string, std::size_t> index_;
};

inline TfidfModel fit_tfidf(const std::vector<std::string>& corpus) {
  if (corpus.empty()) throw ValidationError("TF-IDF needs a non-empty corpus");
  std::map<std::string, std::size_t> df;
  for (const std::string& doc : corpus) {
    const auto tokens = tokenize(doc);
    for (const std::string& t : std::set<std::string>(tokens.begin(), tokens.end())) ++df[t];
  }
  std::vector<std::string> vocab;
  std::vector<double> idf;
  const double n = static_cast<double>(corpus.size());
  for (const auto& [token, count] : df) {
    vocab.push_back(token);
    idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
  }
  return TfidfModel(std::move(vocab), std::move(idf), corpus.size());
}

inline SparseRow transform_tfidf(const TfidfModel& model, std::string_view sentence) {
  return model.transform(sentence);
}

inline FeatureBlock tfidf_block(const TfidfModel& model, const std::vector<std::string>& sentences) {
  FeatureBlock b{"tfidf", DenseMatrix(sentences.size(), model.size()), {}};
  for (std::size_t i = 0; i < sentences.size(); ++i)
    for (const auto& [col, w] : model.transform(sentences[i])) b.values(i, col) = w;
  b.column_names.reserve(model.size());
  for (const std::string& t : model.vocabulary()) b.column_names.push_back("tfidf:" + t);
  return b;
}

} // namespace moralframe
