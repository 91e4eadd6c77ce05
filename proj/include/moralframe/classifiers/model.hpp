#pragma once

// Kind-independent train / predict / evaluate / explain / persist.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "boosting.hpp"
#include "common.hpp"
#include "forest.hpp"
#include "knn.hpp"
#include "linear.hpp"
#include "mlp.hpp"
#include "naive_bayes.hpp"
#include "tree.hpp"

namespace moralframe::classifiers {

inline constexpr int model_format_version = 1;

using ModelState = std::variant<LinearWeights, Tree, Forest, BoostedTrees, Mlp, NaiveBayes, Knn>;

struct TrainedModel {
  ModelKind kind = ModelKind::logistic_regression;
  TrainConfig config;
  std::uint64_t seed = 0;
  std::vector<std::string> class_names;
  std::vector<std::string> feature_names;
  std::vector<ColumnBlock> blocks;
  ModelState state;

  std::size_t features() const noexcept { return feature_names.size(); }
};

// Per-kind diagnostics collected during training.
struct TrainLog {
  std::vector<double> loss_history;  // logistic regression: per epoch; boosting: per round
};

inline TrainedModel train(ModelKind kind, const FeatureMatrix& X, const std::vector<std::string>& labels,
                          const TrainConfig& config, std::uint64_t seed, TrainLog* log = nullptr) {
  if (X.rows() != labels.size())
    throw ValidationError("feature matrix has " + std::to_string(X.rows()) + " rows but " +
                          std::to_string(labels.size()) + " labels were given");
  if (X.rows() == 0) throw ValidationError("cannot train on an empty dataset");
  require_finite(X.values);
  const EncodedLabels enc = encode_labels(labels);
  if (enc.class_names.size() < 2) throw ValidationError("training needs at least 2 classes, got 1");

  TrainedModel model;
  model.kind = kind;
  model.config = config;
  model.seed = seed;
  model.class_names = enc.class_names;
  model.feature_names = X.column_names;
  model.blocks = X.blocks;
  const std::size_t K = enc.class_names.size(), m = X.cols();
  std::vector<double>* history = log ? &log->loss_history : nullptr;

  switch (kind) {
  case ModelKind::logistic_regression: model.state = train_logistic(to_csr(X.values), enc.y, K, m, config, history); break;
  case ModelKind::linear_svm: model.state = train_linear_svm(to_csr(X.values), enc.y, K, m, config, seed); break;
  case ModelKind::decision_tree:
    model.state = train_decision_tree(X.values, ColumnIndex(X.values), enc.y, K, config, seed);
    break;
  case ModelKind::random_forest:
    model.state = train_random_forest(X.values, ColumnIndex(X.values), enc.y, K, config, seed);
    break;
  case ModelKind::gradient_boosted_trees:
    model.state = train_boosted_trees(X.values, ColumnIndex(X.values), enc.y, K, config, seed, history);
    break;
  case ModelKind::mlp: model.state = train_mlp(X.values, to_csr(X.values), enc.y, K, config, seed); break;
  case ModelKind::naive_bayes: model.state = train_naive_bayes(X.values, enc.y, K, config); break;
  case ModelKind::knn: model.state = train_knn(X.values, enc.y, K, config); break;
  }
  return model;
}

// Raw per-class output for one row: probabilities for every kind except the
// SVM, whose margins are returned instead.
inline std::vector<double> class_outputs(const TrainedModel& model, std::span<const double> row) {
  return std::visit(
      [&](const auto& s) -> std::vector<double> {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, LinearWeights>) {
          std::vector<double> z = s.logits(row);
          if (model.kind == ModelKind::logistic_regression) softmax_inplace(z);
          return z;
        } else if constexpr (std::is_same_v<S, Tree>) {
          return s.leaf_for(row).value;
        } else if constexpr (std::is_same_v<S, Forest> || std::is_same_v<S, Knn>) {
          return s.vote_fractions(row);
        } else if constexpr (std::is_same_v<S, BoostedTrees>) {
          std::vector<double> z = s.raw_scores(row);
          softmax_inplace(z);
          return z;
        } else {
          return s.probabilities(row);
        }
      },
      model.state);
}

inline bool has_probabilities(ModelKind kind) { return kind != ModelKind::linear_svm; }

struct Prediction {
  std::vector<std::string> labels;
  std::vector<int> label_index;
  std::optional<std::vector<std::vector<double>>> probabilities;
};

inline void check_columns(const TrainedModel& model, std::size_t cols) {
  if (cols != model.features())
    throw ValidationError("model expects " + std::to_string(model.features()) + " features, got " + std::to_string(cols));
}

inline Prediction predict(const TrainedModel& model, const DenseMatrix& X) {
  check_columns(model, X.cols());
  Prediction p;
  const bool probs = has_probabilities(model.kind);
  if (probs) p.probabilities.emplace();
  for (std::size_t i = 0; i < X.rows(); ++i) {
    std::vector<double> out = class_outputs(model, X.row(i));
    const int label = argmax(out);
    p.label_index.push_back(label);
    p.labels.push_back(model.class_names[static_cast<std::size_t>(label)]);
    if (probs) p.probabilities->push_back(std::move(out));
  }
  return p;
}

inline Prediction predict(const TrainedModel& model, const FeatureMatrix& X) { return predict(model, X.values); }

inline double accuracy(const std::vector<std::string>& predicted, const std::vector<std::string>& truth) {
  if (truth.empty()) throw ValidationError("cannot evaluate on an empty test set");
  if (predicted.size() != truth.size()) throw ValidationError("prediction and label counts differ");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

inline double evaluate(const TrainedModel& model, const FeatureMatrix& X, const std::vector<std::string>& y) {
  if (X.rows() == 0) throw ValidationError("cannot evaluate on an empty test set");
  return accuracy(predict(model, X).labels, y);
}

// ---------------------------------------------------------------------------
// Explanation

enum class ImportanceMethod { coefficient, split_gain };

inline std::string_view to_string(ImportanceMethod m) { return m == ImportanceMethod::coefficient ? "coefficient" : "split_gain"; }

struct FeatureWeight {
  std::string feature;
  double weight = 0.0;
};

struct ImportanceReport {
  ImportanceMethod method = ImportanceMethod::coefficient;
  std::map<std::string, std::vector<FeatureWeight>> per_class;  // tree kinds use the single key "all"

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["method"] = to_string(method);
    nlohmann::ordered_json classes = nlohmann::ordered_json::object();
    for (const auto& [name, list] : per_class) {
      nlohmann::ordered_json arr = nlohmann::ordered_json::array();
      for (const auto& fw : list) arr.push_back({{"feature", fw.feature}, {"weight", fw.weight}});
      classes[name] = arr;
    }
    j["per_class"] = classes;
    return j;
  }
};

// Indices of the k largest |weight|, ties by feature index.
inline std::vector<std::size_t> top_k_by_magnitude(const std::vector<double>& w, std::size_t k, bool skip_zero) {
  std::vector<std::size_t> idx;
  for (std::size_t f = 0; f < w.size(); ++f)
    if (!skip_zero || w[f] != 0.0) idx.push_back(f);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return std::abs(w[a]) > std::abs(w[b]); });
  if (idx.size() > k) idx.resize(k);
  return idx;
}

inline ImportanceReport feature_importance(const TrainedModel& model, std::size_t k = 10) {
  ImportanceReport report;
  auto entry = [&](std::size_t f, double w) { return FeatureWeight{model.feature_names[f], w}; };

  if (const auto* lin = std::get_if<LinearWeights>(&model.state)) {
    report.method = ImportanceMethod::coefficient;
    for (std::size_t c = 0; c < lin->classes; ++c) {
      std::vector<double> w(lin->weights.begin() + static_cast<std::ptrdiff_t>(c * lin->features),
                            lin->weights.begin() + static_cast<std::ptrdiff_t>((c + 1) * lin->features));
      auto& list = report.per_class[model.class_names[c]];
      for (std::size_t f : top_k_by_magnitude(w, k, false)) list.push_back(entry(f, w[f]));
    }
    return report;
  }

  std::vector<double> gain(model.features(), 0.0);
  if (const auto* tree = std::get_if<Tree>(&model.state)) {
    tree->add_importance(gain);
  } else if (const auto* forest = std::get_if<Forest>(&model.state)) {
    for (const Tree& t : forest->trees) t.add_importance(gain);
  } else if (const auto* boosted = std::get_if<BoostedTrees>(&model.state)) {
    for (const Tree& t : boosted->trees) t.add_importance(gain);
  } else {
    throw NotExplainableError("model kind " + std::string(to_string(model.kind)) + " has no feature importance");
  }
  report.method = ImportanceMethod::split_gain;
  auto& list = report.per_class["all"];
  for (std::size_t f : top_k_by_magnitude(gain, k, true)) list.push_back(entry(f, gain[f]));
  return report;
}

// ---------------------------------------------------------------------------
// Persistence

inline nlohmann::ordered_json model_to_json(const TrainedModel& model) {
  nlohmann::ordered_json j;
  j["format_version"] = model_format_version;
  j["kind"] = to_string(model.kind);
  j["hyperparameters"] = to_json(model.config);
  j["seed"] = model.seed;
  j["class_names"] = model.class_names;
  j["feature_names"] = model.feature_names;
  nlohmann::ordered_json blocks = nlohmann::ordered_json::array();
  for (const auto& b : model.blocks) blocks.push_back({{"name", b.name}, {"begin", b.begin}, {"end", b.end}});
  j["blocks"] = blocks;
  j["state"] = std::visit([](const auto& s) { return nlohmann::json(s.to_json()); }, model.state);
  return j;
}

inline TrainedModel model_from_json(const nlohmann::json& j) {
  try {
    const int version = j.at("format_version");
    if (version != model_format_version)
      throw ValidationError("unsupported model format version " + std::to_string(version));
    TrainedModel m;
    m.kind = parse_kind(j.at("kind").get<std::string>());
    m.config = train_config_from_json(j.at("hyperparameters"));
    m.seed = j.at("seed");
    m.class_names = j.at("class_names").get<std::vector<std::string>>();
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    for (const auto& b : j.at("blocks")) m.blocks.push_back({b.at("name"), b.at("begin"), b.at("end")});
    const auto& s = j.at("state");
    switch (m.kind) {
    case ModelKind::logistic_regression:
    case ModelKind::linear_svm: m.state = LinearWeights::from_json(s); break;
    case ModelKind::decision_tree: m.state = Tree::from_json(s); break;
    case ModelKind::random_forest: m.state = Forest::from_json(s); break;
    case ModelKind::gradient_boosted_trees: m.state = BoostedTrees::from_json(s); break;
    case ModelKind::mlp: m.state = Mlp::from_json(s); break;
    case ModelKind::naive_bayes: m.state = NaiveBayes::from_json(s); break;
    case ModelKind::knn: m.state = Knn::from_json(s); break;
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed model file: ") + e.what());
  }
}

} // namespace moralframe::classifiers
