#pragma once

// Sentence embeddings. Pretrained vectors are only ever read from a file
// ("id<TAB>v1 v2 ... vk" per line); pseudo_embedding is a deterministic
// bag-of-tokens stand-in for offline use.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "../error.hpp"
#include "../io.hpp"
#include "../random.hpp"
#include "matrix.hpp"
#include "tfidf.hpp"

namespace moralframe {

struct EmbeddingTable {
  std::size_t dim = 0;
  std::map<std::string, std::vector<double>> vectors;

  friend bool operator==(const EmbeddingTable&, const EmbeddingTable&) = default;
};

inline EmbeddingTable parse_embeddings(std::string_view text, const std::string& source = "<string>") {
  EmbeddingTable table;
  const auto lines = split_lines(text);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const std::string where = source + ":" + std::to_string(ln + 1);
    const std::string_view line = lines[ln];
    if (trim(line).empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0) throw ValidationError(where + ": expected \"id<TAB>values\"");
    std::string id(line.substr(0, tab));
    std::vector<double> v;
    std::string_view rest = line.substr(tab + 1);
    while (true) {
      while (!rest.empty() && (rest.front() == ' ' || rest.front() == '\t')) rest.remove_prefix(1);
      if (rest.empty()) break;
      double x = 0.0;
      const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), x);
      if (ec != std::errc() || (ptr != rest.data() + rest.size() && *ptr != ' ' && *ptr != '\t'))
        throw ValidationError(where + ": unparseable number near \"" + std::string(rest.substr(0, 16)) + "\"");
      v.push_back(x);
      rest.remove_prefix(static_cast<std::size_t>(ptr - rest.data()));
    }
    if (v.empty()) throw ValidationError(where + ": no values for \"" + id + "\"");
    if (table.vectors.empty()) {
      table.dim = v.size();
    } else if (v.size() != table.dim) {
      throw ValidationError(where + ": dimension " + std::to_string(v.size()) + " differs from " +
                            std::to_string(table.dim));
    }
    if (!table.vectors.emplace(std::move(id), std::move(v)).second)
      throw ValidationError(where + ": duplicate id \"" + std::string(line.substr(0, tab)) + "\"");
  }
  return table;
}

inline EmbeddingTable load_embeddings(const std::filesystem::path& path) {
  return parse_embeddings(read_text_file(path), path.string());
}

namespace detail {

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

} // namespace detail

// Sum of per-token unit vectors drawn from a generator seeded by the token
// hash, then scaled to unit length. No tokens gives the zero vector.
inline std::vector<double> pseudo_embedding(std::string_view sentence, std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw ValidationError("embedding dimension must be at least 1");
  std::vector<double> sum(dim, 0.0);
  const auto tokens = tokenize(sentence);
  if (tokens.empty()) return sum;
  std::vector<double> v(dim);
  for (const std::string& t : tokens) {
    Rng rng(mix_seed(seed, detail::fnv1a64(t)));
    double norm2 = 0.0;
    for (double& x : v) {
      x = standard_normal(rng);
      norm2 += x * x;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (std::size_t k = 0; k < dim; ++k) sum[k] += v[k] * inv;
  }
  double norm2 = 0.0;
  for (double x : sum) norm2 += x * x;
  if (norm2 > 0.0) {
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& x : sum) x *= inv;
  }
  return sum;
}

// Where sentence vectors come from when a recipe asks for embeddings.
struct EmbeddingSource {
  const EmbeddingTable* table = nullptr;  // looked up by situation id when set
  std::size_t pseudo_dim = 64;
  std::uint64_t pseudo_seed = 0;
};

inline FeatureBlock embedding_block(const std::vector<std::string>& ids, const std::vector<std::string>& sentences,
                                    const EmbeddingSource& source) {
  const std::size_t dim = source.table ? source.table->dim : source.pseudo_dim;
  FeatureBlock b{"emb", DenseMatrix(ids.size(), dim), {}};
  for (std::size_t i = 0; i < ids.size(); ++i) {
    std::vector<double> v;
    if (source.table) {
      auto it = source.table->vectors.find(ids[i]);
      if (it == source.table->vectors.end()) throw ValidationError("no embedding for situation \"" + ids[i] + "\"");
      v = it->second;
    } else {
      v = pseudo_embedding(sentences[i], dim, source.pseudo_seed);
    }
    std::copy(v.begin(), v.end(), b.values.row(i).begin());
  }
  for (std::size_t k = 0; k < dim; ++k) b.column_names.push_back("emb:" + std::to_string(k));
  return b;
}

} // namespace moralframe
