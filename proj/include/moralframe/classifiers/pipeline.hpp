#pragma once

// Feature recipes (which blocks feed a classifier), the Table-1 style
// benchmark grid, and a self-contained pipeline that featurizes and classifies
// single situations.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "../features/embeddings.hpp"
#include "../features/matrix.hpp"
#include "../features/tfidf.hpp"
#include "../io.hpp"
#include "../reasoner.hpp"
#include "model.hpp"
#include "split.hpp"

namespace moralframe::classifiers {

enum class Recipe { sandra, tfidf, tfidf_sandra, emb, emb_sandra };

inline constexpr std::array<Recipe, 5> all_recipes{Recipe::sandra, Recipe::tfidf, Recipe::tfidf_sandra, Recipe::emb,
                                                   Recipe::emb_sandra};

inline std::string_view to_string(Recipe r) {
  switch (r) {
  case Recipe::sandra: return "sandra";
  case Recipe::tfidf: return "tfidf";
  case Recipe::tfidf_sandra: return "tfidf+sandra";
  case Recipe::emb: return "emb";
  case Recipe::emb_sandra: return "emb+sandra";
  }
  return "?";
}

inline Recipe parse_recipe(std::string_view name) {
  for (Recipe r : all_recipes)
    if (to_string(r) == name) return r;
  throw ValidationError("unknown feature recipe \"" + std::string(name) + "\"");
}

inline bool uses_tfidf(Recipe r) { return r == Recipe::tfidf || r == Recipe::tfidf_sandra; }
inline bool uses_embeddings(Recipe r) { return r == Recipe::emb || r == Recipe::emb_sandra; }
inline bool uses_sandra(Recipe r) { return r == Recipe::sandra || r == Recipe::tfidf_sandra || r == Recipe::emb_sandra; }

// Satisfaction probabilities as a block; columns "sandra:<description>".
inline FeatureBlock sandra_block(const Dataset& data, const Ontology& o, ReasonerOptions opts) {
  const BatchInference b = batch_infer(data, o, opts);
  FeatureBlock block{"sandra", DenseMatrix(data.size(), o.description_count()), {}};
  for (std::size_t i = 0; i < data.size(); ++i)
    std::copy(b.rows[i].probabilities.begin(), b.rows[i].probabilities.end(), block.values.row(i).begin());
  for (const auto& d : o.descriptions()) block.column_names.push_back("sandra:" + d.name);
  return block;
}

// Text block first, satisfaction block second.
inline FeatureMatrix build_features(Recipe recipe, const Dataset& data, const Ontology& o, ReasonerOptions opts,
                                    const TfidfModel* tfidf, const EmbeddingSource& emb) {
  std::vector<std::string> ids, sentences;
  for (const auto& s : data) {
    ids.push_back(s.id);
    sentences.push_back(s.sentence);
  }
  std::vector<FeatureBlock> blocks;
  if (uses_tfidf(recipe)) {
    if (!tfidf) throw ValidationError("recipe " + std::string(to_string(recipe)) + " needs a fitted TF-IDF model");
    blocks.push_back(tfidf_block(*tfidf, sentences));
  }
  if (uses_embeddings(recipe)) blocks.push_back(embedding_block(ids, sentences, emb));
  if (uses_sandra(recipe)) blocks.push_back(sandra_block(data, o, opts));
  return fuse_features(blocks);
}

inline std::vector<std::string> seed_labels(const Dataset& data) {
  std::vector<std::string> y;
  y.reserve(data.size());
  for (const auto& s : data) {
    if (!s.seed_value) throw ValidationError("situation \"" + s.id + "\" has no seed value label");
    y.push_back(*s.seed_value);
  }
  return y;
}

inline Dataset subset(const Dataset& data, const std::vector<std::size_t>& idx) {
  Dataset out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(data[i]);
  return out;
}

inline std::uint64_t cell_seed(std::uint64_t seed, ModelKind kind, Recipe recipe) {
  return mix_seed(seed, moralframe::detail::fnv1a64(std::string(to_string(kind)) + "/" + std::string(to_string(recipe))));
}

// ---------------------------------------------------------------------------
// Benchmark

struct BenchmarkOptions {
  std::vector<ModelKind> kinds{all_kinds.begin(), all_kinds.end()};
  std::vector<Recipe> recipes{all_recipes.begin(), all_recipes.end()};
  SplitSpec split;
  ReasonerOptions reasoner;
  TrainConfig config;
  const EmbeddingTable* embeddings = nullptr;  // pseudo embeddings when null
  std::size_t pseudo_dim = 64;
};

struct BenchmarkTable {
  std::vector<ModelKind> kinds;
  std::vector<Recipe> recipes;
  std::vector<std::vector<double>> accuracy;  // kinds x recipes

  double at(ModelKind k, Recipe r) const {
    const auto ki = static_cast<std::size_t>(std::find(kinds.begin(), kinds.end(), k) - kinds.begin());
    const auto ri = static_cast<std::size_t>(std::find(recipes.begin(), recipes.end(), r) - recipes.begin());
    if (ki >= kinds.size() || ri >= recipes.size()) throw ValidationError("benchmark cell not computed");
    return accuracy[ki][ri];
  }

  std::string to_csv() const {
    std::string out = "model";
    for (Recipe r : recipes) out += "," + std::string(to_string(r));
    out += '\n';
    for (std::size_t k = 0; k < kinds.size(); ++k) {
      out += std::string(to_string(kinds[k]));
      for (double a : accuracy[k]) out += "," + format_fixed(a, 2);
      out += '\n';
    }
    return out;
  }
};

// TF-IDF is fitted on the training sentences only.
inline BenchmarkTable benchmark(const Dataset& data, const Ontology& o, const BenchmarkOptions& opts) {
  const std::vector<std::string> labels = seed_labels(data);
  const Split sp = split(data.size(), opts.split);
  const Dataset train_set = subset(data, sp.train), test_set = subset(data, sp.test);
  std::vector<std::string> y_train, y_test;
  for (std::size_t i : sp.train) y_train.push_back(labels[i]);
  for (std::size_t i : sp.test) y_test.push_back(labels[i]);

  std::vector<std::string> train_sentences;
  for (const auto& s : train_set) train_sentences.push_back(s.sentence);
  const TfidfModel tfidf = fit_tfidf(train_sentences);
  const EmbeddingSource emb{opts.embeddings, opts.pseudo_dim, mix_seed(opts.split.seed, moralframe::detail::fnv1a64("emb"))};

  BenchmarkTable table{opts.kinds, opts.recipes, std::vector<std::vector<double>>(opts.kinds.size())};
  for (std::size_t r = 0; r < opts.recipes.size(); ++r) {
    const FeatureMatrix X_train = build_features(opts.recipes[r], train_set, o, opts.reasoner, &tfidf, emb);
    const FeatureMatrix X_test = build_features(opts.recipes[r], test_set, o, opts.reasoner, &tfidf, emb);
    for (std::size_t k = 0; k < opts.kinds.size(); ++k) {
      const TrainedModel model =
          train(opts.kinds[k], X_train, y_train, opts.config, cell_seed(opts.split.seed, opts.kinds[k], opts.recipes[r]));
      table.accuracy[k].push_back(evaluate(model, X_test, y_test));
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// Single-situation pipeline

struct ClassifyPipeline {
  Recipe recipe = Recipe::tfidf_sandra;
  ReasonerOptions reasoner;
  std::optional<TfidfModel> tfidf;
  bool file_embeddings = false;  // trained on an embedding file, cannot featurize new text
  std::size_t pseudo_dim = 64;
  std::uint64_t pseudo_seed = 0;
  TrainedModel model;

  FeatureMatrix featurize(const Dataset& data, const Ontology& o) const {
    if (uses_embeddings(recipe) && file_embeddings)
      throw ValidationError("model was trained on file embeddings and cannot featurize new sentences");
    return build_features(recipe, data, o, reasoner, tfidf ? &*tfidf : nullptr,
                          EmbeddingSource{nullptr, pseudo_dim, pseudo_seed});
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["recipe"] = to_string(recipe);
    j["scorer"] = moralframe::to_string(reasoner.scorer);
    j["use_hierarchy"] = reasoner.use_hierarchy;
    j["tfidf"] = tfidf ? nlohmann::json(tfidf->to_json()) : nlohmann::json(nullptr);
    j["file_embeddings"] = file_embeddings;
    j["pseudo_dim"] = pseudo_dim;
    j["pseudo_seed"] = pseudo_seed;
    j["model"] = model_to_json(model);
    return j;
  }

  static ClassifyPipeline from_json(const nlohmann::json& j) {
    try {
      ClassifyPipeline p;
      p.recipe = parse_recipe(j.at("recipe").get<std::string>());
      p.reasoner.scorer = parse_scorer(j.at("scorer").get<std::string>());
      p.reasoner.use_hierarchy = j.at("use_hierarchy");
      if (!j.at("tfidf").is_null()) p.tfidf = TfidfModel::from_json(j.at("tfidf"));
      p.file_embeddings = j.at("file_embeddings");
      p.pseudo_dim = j.at("pseudo_dim");
      p.pseudo_seed = j.at("pseudo_seed");
      p.model = model_from_json(j.at("model"));
      if (uses_tfidf(p.recipe) && !p.tfidf) throw ValidationError("pipeline recipe needs a TF-IDF model");
      return p;
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(std::string("malformed model file: ") + e.what());
    }
  }
};

inline ClassifyPipeline load_pipeline(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return ClassifyPipeline::from_json(j);
}

struct PipelineOptions {
  Recipe recipe = Recipe::tfidf_sandra;
  ModelKind kind = ModelKind::logistic_regression;
  ReasonerOptions reasoner;
  TrainConfig config;
  std::uint64_t seed = 0;
  const EmbeddingTable* embeddings = nullptr;
  std::size_t pseudo_dim = 64;
};

// Fits every stage on the whole dataset.
inline ClassifyPipeline train_pipeline(const Dataset& data, const Ontology& o, const PipelineOptions& opts,
                                       TrainLog* log = nullptr) {
  ClassifyPipeline p;
  p.recipe = opts.recipe;
  p.reasoner = opts.reasoner;
  p.file_embeddings = opts.embeddings != nullptr;
  p.pseudo_dim = opts.pseudo_dim;
  p.pseudo_seed = mix_seed(opts.seed, moralframe::detail::fnv1a64("emb"));
  if (uses_tfidf(opts.recipe)) {
    std::vector<std::string> sentences;
    for (const auto& s : data) sentences.push_back(s.sentence);
    p.tfidf = fit_tfidf(sentences);
  }
  const FeatureMatrix X = build_features(opts.recipe, data, o, opts.reasoner, p.tfidf ? &*p.tfidf : nullptr,
                                         EmbeddingSource{opts.embeddings, opts.pseudo_dim, p.pseudo_seed});
  p.model = train(opts.kind, X, seed_labels(data), opts.config, opts.seed, log);
  return p;
}

struct Classification {
  std::string label;
  std::optional<std::vector<double>> probabilities;
  std::vector<FeatureWeight> top_features;  // important features active in the input
};

// Top-k important features restricted to the ones nonzero in the input row.
// Linear kinds use the predicted class's list; kinds without an importance
// measure return none.
inline Classification classify(const ClassifyPipeline& p, const Situation& s, const Ontology& o, std::size_t k = 10) {
  const FeatureMatrix X = p.featurize(Dataset{s}, o);
  const Prediction pred = predict(p.model, X);
  Classification c;
  c.label = pred.labels.front();
  if (pred.probabilities) c.probabilities = pred.probabilities->front();
  try {
    const ImportanceReport report = feature_importance(p.model, k);
    const auto it = report.per_class.count(c.label) ? report.per_class.find(c.label) : report.per_class.find("all");
    if (it != report.per_class.end()) {
      std::map<std::string, std::size_t> column;
      for (std::size_t f = 0; f < X.column_names.size(); ++f) column.emplace(X.column_names[f], f);
      for (const auto& fw : it->second)
        if (X.values(0, column.at(fw.feature)) != 0.0) c.top_features.push_back(fw);
    }
  } catch (const NotExplainableError&) {
  }
  return c;
}

} // namespace moralframe::classifiers
