#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include <moralframe/classifiers/model.hpp>
#include <moralframe/classifiers/pipeline.hpp>
#include <moralframe/classifiers/split.hpp>
#include <moralframe/corpus/simulator.hpp>

#include "oracles.hpp"
#include "support.hpp"

using namespace moralframe;
using namespace moralframe::classifiers;

namespace {

TrainConfig fast_config() {
  TrainConfig c;
  c.lr_epochs = 200;
  c.svm_epochs = 30;
  c.forest_trees = 15;
  c.gbt_rounds = 15;
  c.gbt_max_depth = 3;
  c.mlp_epochs = 30;
  c.mlp_hidden = 16;
  return c;
}

const Ontology& mft() {
  static const Ontology o = load_ontology(support::data_path("mft_ontology.json"));
  return o;
}

Dataset small_corpus(int per_value, std::uint64_t seed) {
  corpus::GeneratorConfig c;
  c.target_per_value = per_value;
  Rng rng(seed);
  return corpus::generate_synthetic(corpus::load_template_bank(support::data_path("templates.json")), c, mft(), rng);
}

std::vector<std::string> labels_of(const TrainedModel& m, const Prediction& p) {
  std::vector<std::string> out;
  for (int i : p.label_index) out.push_back(m.class_names.at(static_cast<std::size_t>(i)));
  return out;
}

} // namespace

TEST(Split, ArithmeticDeterminismAndPartition) {
  const Split s = split(9, {2.0 / 3.0, 1});
  EXPECT_EQ(s.train.size(), 6u);
  EXPECT_EQ(s.test.size(), 3u);
  const Split again = split(9, {2.0 / 3.0, 1});
  EXPECT_EQ(s.train, again.train);
  EXPECT_EQ(s.test, again.test);
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const Split p = split(100, {2.0 / 3.0, seed});
    ASSERT_EQ(p.train.size(), 67u);
    std::set<std::size_t> all(p.train.begin(), p.train.end());
    for (std::size_t i : p.test) ASSERT_TRUE(all.insert(i).second) << "overlap at seed " << seed;
    ASSERT_EQ(all.size(), 100u);
    ASSERT_EQ(*all.rbegin(), 99u);
  }
  EXPECT_THROW(split(2, {}), ValidationError);
  EXPECT_THROW(split(10, {1.0, 0}), ValidationError);
}

TEST(Labels, EncodedInSortedOrder) {
  const auto e = encode_labels({"b", "a", "c", "a"});
  EXPECT_EQ(e.class_names, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(e.y, (std::vector<int>{1, 0, 2, 0}));
}

TEST(Logistic, GradientMatchesFiniteDifferences) {
  Rng rng(77);
  for (int t = 0; t < 20; ++t) EXPECT_LE(oracles::logistic_gradient_error(rng), 1e-4);
}

TEST(Logistic, SeparableBlobsAndMonotoneLoss) {
  Rng rng(1);
  const auto d = oracles::blobs(rng, 40, 2, 2, 8.0);
  TrainLog log;
  const TrainedModel m = train(ModelKind::logistic_regression, d.X, d.y, TrainConfig{}, 0, &log);
  EXPECT_EQ(evaluate(m, d.X, d.y), 1.0);
  ASSERT_EQ(log.loss_history.size(), 501u);
  for (std::size_t i = 1; i < log.loss_history.size(); ++i) EXPECT_LE(log.loss_history[i], log.loss_history[i - 1] + 1e-15);
}

TEST(Logistic, ZeroRowGivesSoftmaxOfBiasAndShiftInvariance) {
  Rng rng(2);
  const auto d = oracles::blobs(rng, 60, 4, 3, 3.0);
  const TrainedModel m = train(ModelKind::logistic_regression, d.X, d.y, fast_config(), 0);
  const auto& w = std::get<LinearWeights>(m.state);
  const auto p = predict(m, DenseMatrix(1, 4)).probabilities->front();
  const double mx = *std::max_element(w.bias.begin(), w.bias.end());
  double sum = 0;
  for (double b : w.bias) sum += std::exp(b - mx);
  for (std::size_t c = 0; c < 3; ++c) EXPECT_NEAR(p[c], std::exp(w.bias[c] - mx) / sum, 1e-12);

  for (std::size_t i = 0; i < d.X.rows(); ++i) {
    auto z = w.logits(d.X.values.row(i));
    const int before = argmax(z);
    for (double& v : z) v += 123.5;
    ASSERT_EQ(argmax(z), before);
  }
}

TEST(Sanity, KnnOneAndUnlimitedTreeFitTrainingData) {
  Rng rng(3);
  for (int t = 0; t < 5; ++t) {
    const auto d = oracles::blobs(rng, 90, 5, 4, 0.5);  // heavily overlapping, rows unique
    TrainConfig c;
    c.knn_k = 1;
    EXPECT_EQ(evaluate(train(ModelKind::knn, d.X, d.y, c, 0), d.X, d.y), 1.0);
    EXPECT_EQ(evaluate(train(ModelKind::decision_tree, d.X, d.y, c, 0), d.X, d.y), 1.0);
  }
}

TEST(Sanity, TreeFitsDataNeedingZeroGainSplits) {
  // XOR: no single split reduces Gini impurity at the root.
  const DenseMatrix X = DenseMatrix::from_rows({{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  const FeatureMatrix fm = fuse_features({{"x", X, {}}});
  const std::vector<std::string> y{"a", "b", "b", "a"};
  EXPECT_EQ(evaluate(train(ModelKind::decision_tree, fm, y, {}, 0), fm, y), 1.0);
}

TEST(Sanity, KnnOnTrainingRowReturnsItsLabel) {
  Rng rng(4);
  const auto d = oracles::blobs(rng, 30, 3, 3, 1.0);
  TrainConfig c;
  c.knn_k = 1;
  const TrainedModel m = train(ModelKind::knn, d.X, d.y, c, 0);
  for (std::size_t i = 0; i < 30; ++i) EXPECT_EQ(predict(m, d.X.values.select_rows({i})).labels[0], d.y[i]);
}

TEST(Boosting, LossNonIncreasingPerRound) {
  Rng rng(5);
  const auto d = oracles::blobs(rng, 120, 6, 4, 1.5);
  TrainConfig c;
  c.gbt_rounds = 40;
  TrainLog log;
  train(ModelKind::gradient_boosted_trees, d.X, d.y, c, 0, &log);
  ASSERT_EQ(log.loss_history.size(), 41u);
  EXPECT_NEAR(log.loss_history[0], std::log(4.0), 1e-12);  // balanced log prior
  for (std::size_t i = 1; i < log.loss_history.size(); ++i) EXPECT_LE(log.loss_history[i], log.loss_history[i - 1] + 1e-12);
  EXPECT_LT(log.loss_history.back(), log.loss_history.front());
}

TEST(Forest, PredictionIsMajorityOfTrees) {
  Rng rng(6);
  const auto d = oracles::blobs(rng, 90, 5, 3, 1.0);
  const TrainedModel m = train(ModelKind::random_forest, d.X, d.y, fast_config(), 9);
  const auto& f = std::get<Forest>(m.state);
  ASSERT_EQ(f.trees.size(), 15u);
  const Prediction p = predict(m, d.X);
  for (std::size_t i = 0; i < d.X.rows(); ++i) {
    std::vector<int> votes(3, 0);
    for (const Tree& t : f.trees) {
      const auto& leaf = t.leaf_for(d.X.values.row(i)).value;
      ++votes[static_cast<std::size_t>(std::max_element(leaf.begin(), leaf.end()) - leaf.begin())];
    }
    const int majority = static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
    ASSERT_EQ(p.label_index[i], majority);
  }
}

TEST(AllKinds, ContractsReproducibilityAndPersistence) {
  Rng rng(7);
  const auto d = oracles::blobs(rng, 60, 5, 3, 2.0);
  const std::set<std::string> names(d.y.begin(), d.y.end());
  TrainConfig cfg = fast_config();
  cfg.mlp_epochs = 200;
  for (ModelKind kind : all_kinds) {
    SCOPED_TRACE(std::string(to_string(kind)));
    const TrainedModel a = train(kind, d.X, d.y, cfg, 42);
    const TrainedModel b = train(kind, d.X, d.y, cfg, 42);
    const std::string ja = model_to_json(a).dump();
    EXPECT_EQ(ja, model_to_json(b).dump());

    const Prediction p = predict(a, d.X);
    for (const auto& l : p.labels) EXPECT_TRUE(names.count(l));
    EXPECT_EQ(p.labels, labels_of(a, p));
    EXPECT_EQ(p.probabilities.has_value(), kind != ModelKind::linear_svm);
    if (p.probabilities)
      for (const auto& row : *p.probabilities) {
        for (double v : row) EXPECT_GE(v, 0.0);
        EXPECT_NEAR(std::accumulate(row.begin(), row.end(), 0.0), 1.0, 1e-9);
      }

    std::size_t hits = 0;
    for (std::size_t i = 0; i < d.y.size(); ++i) hits += p.labels[i] == d.y[i];
    EXPECT_DOUBLE_EQ(evaluate(a, d.X, d.y), static_cast<double>(hits) / static_cast<double>(d.y.size()));
    EXPECT_GT(evaluate(a, d.X, d.y), 0.6);

    const TrainedModel loaded = model_from_json(nlohmann::json::parse(ja));
    EXPECT_EQ(model_to_json(loaded).dump(), ja);
    const Prediction q = predict(loaded, d.X);
    EXPECT_EQ(q.labels, p.labels);
    if (p.probabilities) EXPECT_EQ(*q.probabilities, *p.probabilities);
  }
}

TEST(Train, Errors) {
  Rng rng(8);
  auto d = oracles::blobs(rng, 20, 3, 2, 1.0);
  EXPECT_THROW(train(ModelKind::knn, d.X, std::vector<std::string>(20, "only"), {}, 0), ValidationError);
  EXPECT_THROW(train(ModelKind::knn, d.X, std::vector<std::string>(19, "x"), {}, 0), ValidationError);
  const TrainedModel m = train(ModelKind::naive_bayes, d.X, d.y, {}, 0);
  EXPECT_THROW(predict(m, DenseMatrix(1, 4)), ValidationError);
  d.X.values(3, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(train(ModelKind::knn, d.X, d.y, {}, 0), ValidationError);
  EXPECT_THROW(accuracy({}, {}), ValidationError);
  EXPECT_THROW(parse_kind("lightgbm"), ValidationError);
  EXPECT_THROW(model_from_json(nlohmann::json::parse(R"({"format_version": 99})")), ValidationError);
}

TEST(Evaluate, ConstantPredictorIsAtChance) {
  std::vector<std::string> truth;
  for (int i = 0; i < 1000; ++i) truth.push_back("v" + std::to_string(i % 10));
  EXPECT_DOUBLE_EQ(accuracy(std::vector<std::string>(1000, "v3"), truth), 0.1);
  EXPECT_DOUBLE_EQ(accuracy(truth, truth), 1.0);
}

TEST(Importance, HandSetLogisticWeights) {
  TrainedModel m;
  m.kind = ModelKind::logistic_regression;
  m.class_names = {"authority", "care"};
  m.feature_names = {"tfidf:a", "sandra:authority", "sandra:care"};
  LinearWeights w(2, 3);
  w.weights = {0.2, 0.9, -0.3, 0.5, 0.0, -0.7};
  m.state = w;
  const auto r = feature_importance(m, 2);
  EXPECT_EQ(r.method, ImportanceMethod::coefficient);
  ASSERT_EQ(r.per_class.at("authority").size(), 2u);
  EXPECT_EQ(r.per_class.at("authority")[0].feature, "sandra:authority");
  EXPECT_EQ(r.per_class.at("authority")[1].feature, "sandra:care");
  EXPECT_EQ(r.per_class.at("care")[0].feature, "sandra:care");
  EXPECT_DOUBLE_EQ(r.per_class.at("care")[0].weight, -0.7);
  EXPECT_EQ(top_k_by_magnitude({1, -1, 1}, 3, false), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(Importance, StumpPutsAllMassOnItsFeature) {
  const DenseMatrix X = DenseMatrix::from_rows({{5, 0, 1}, {3, 1, 1}, {4, 0, 2}, {1, 1, 2}, {2, 0, 1}, {6, 1, 2}});
  const std::vector<std::string> y{"a", "b", "a", "b", "a", "b"};
  TrainConfig c;
  c.tree_max_depth = 1;
  const TrainedModel m = train(ModelKind::decision_tree, fuse_features({{"f", X, {}}}), y, c, 0);
  const auto r = feature_importance(m);
  EXPECT_EQ(r.method, ImportanceMethod::split_gain);
  ASSERT_EQ(r.per_class.size(), 1u);
  ASSERT_EQ(r.per_class.at("all").size(), 1u);
  EXPECT_EQ(r.per_class.at("all")[0].feature, "f:1");
  EXPECT_GT(r.per_class.at("all")[0].weight, 0.0);
}

TEST(Importance, SortedAndUnsupportedKinds) {
  Rng rng(9);
  const auto d = oracles::blobs(rng, 60, 12, 3, 2.0);
  for (ModelKind kind : all_kinds) {
    SCOPED_TRACE(std::string(to_string(kind)));
    const TrainedModel m = train(kind, d.X, d.y, fast_config(), 1);
    if (kind == ModelKind::mlp || kind == ModelKind::naive_bayes || kind == ModelKind::knn) {
      EXPECT_THROW(feature_importance(m), NotExplainableError);
      continue;
    }
    const auto r = feature_importance(m, 10);
    for (const auto& [cls, list] : r.per_class) {
      EXPECT_LE(list.size(), 10u);
      for (std::size_t i = 1; i < list.size(); ++i) EXPECT_GE(std::abs(list[i - 1].weight), std::abs(list[i].weight));
      for (const auto& fw : list)
        EXPECT_NE(std::find(d.X.column_names.begin(), d.X.column_names.end(), fw.feature), d.X.column_names.end());
    }
  }
}

TEST(Recipes, NamesAndBlocks) {
  for (Recipe r : all_recipes) EXPECT_EQ(parse_recipe(to_string(r)), r);
  EXPECT_EQ(to_string(Recipe::tfidf_sandra), "tfidf+sandra");
  EXPECT_THROW(parse_recipe("bert"), ValidationError);
}

TEST(Benchmark, GridShapeBoundsAndDeterminism) {
  const Dataset data = small_corpus(15, 3);
  BenchmarkOptions opts;
  opts.config = fast_config();
  opts.split.seed = 7;
  opts.pseudo_dim = 16;
  const BenchmarkTable t = benchmark(data, mft(), opts);
  const std::string csv = t.to_csv();
  EXPECT_TRUE(csv.starts_with("model,sandra,tfidf,tfidf+sandra,emb,emb+sandra\n"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 9);
  for (const auto& row : t.accuracy) {
    ASSERT_EQ(row.size(), 5u);
    for (double a : row) {
      EXPECT_GE(a, 0.0);
      EXPECT_LE(a, 1.0);
    }
  }
  EXPECT_EQ(benchmark(data, mft(), opts).to_csv(), csv);
  EXPECT_GT(t.at(ModelKind::logistic_regression, Recipe::sandra), 0.1);
}

TEST(Pipeline, TrainSaveLoadClassify) {
  const Dataset data = small_corpus(15, 4);
  PipelineOptions opts;
  opts.config = fast_config();
  opts.seed = 3;
  const ClassifyPipeline p = train_pipeline(data, mft(), opts);
  const auto dir = support::temp_dir("pipeline");
  write_text_file_atomic(dir / "model.json", p.to_json().dump());
  const ClassifyPipeline loaded = load_pipeline(dir / "model.json");
  EXPECT_EQ(loaded.to_json().dump(), p.to_json().dump());

  const Classification c = classify(loaded, data[0], mft(), 10);
  EXPECT_NE(std::find(loaded.model.class_names.begin(), loaded.model.class_names.end(), c.label),
            loaded.model.class_names.end());
  ASSERT_TRUE(c.probabilities);
  EXPECT_NEAR(std::accumulate(c.probabilities->begin(), c.probabilities->end(), 0.0), 1.0, 1e-9);
  const FeatureMatrix X = loaded.featurize({data[0]}, mft());
  for (const auto& fw : c.top_features) {
    const auto col = std::find(X.column_names.begin(), X.column_names.end(), fw.feature) - X.column_names.begin();
    EXPECT_NE(X.values(0, static_cast<std::size_t>(col)), 0.0);
  }

  write_text_file_atomic(dir / "bad.json", "{\"recipe\": 1}");
  EXPECT_THROW(load_pipeline(dir / "bad.json"), ValidationError);
}

TEST(Pipeline, FileEmbeddingModelsCannotFeaturizeNewText) {
  const Dataset data = small_corpus(5, 5);
  std::string tsv;
  for (const auto& s : data) tsv += s.id + "\t1 " + std::to_string(s.sentence.size()) + "\n";
  const EmbeddingTable t = parse_embeddings(tsv);
  PipelineOptions opts;
  opts.recipe = Recipe::emb;
  opts.kind = ModelKind::naive_bayes;
  opts.embeddings = &t;
  const ClassifyPipeline p = train_pipeline(data, mft(), opts);
  EXPECT_THROW(classify(p, data[0], mft()), ValidationError);
}
