#pragma once

// The `moralframe` command line. `run` is the whole program minus process
// setup, so tests can drive it in-process.

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <moralframe/moralframe.hpp>
#include <moralframe/service/server.hpp>

namespace moralframe::cli {

inline constexpr const char* tool_version = "0.1.0";

enum ExitCode { ok = 0, validation_failure = 1, io_failure = 2 };

inline std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) throw Error("SHA-256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

// Inputs and resolved options of one run, for the manifest.
struct RunRecord {
  std::string subcommand;
  nlohmann::ordered_json options = nlohmann::ordered_json::object();
  std::vector<std::string> inputs;
  std::vector<std::string> config_inputs;  // --config files
  std::optional<std::uint64_t> seed;
};

inline void write_manifest(const std::filesystem::path& out, const RunRecord& run) {
  nlohmann::ordered_json m;
  m["subcommand"] = run.subcommand;
  m["config_hash"] = sha256_hex(run.options.dump());
  m["options"] = run.options;
  nlohmann::ordered_json digests = nlohmann::ordered_json::object();
  for (const auto& path : run.config_inputs) digests[path] = sha256_hex(read_text_file(path));
  for (const auto& path : run.inputs) digests[path] = sha256_hex(read_text_file(path));
  m["input_digests"] = digests;
  m["seed"] = run.seed ? nlohmann::ordered_json(*run.seed) : nlohmann::ordered_json(nullptr);
  m["tool_version"] = tool_version;
  m["timestamp"] = utc_timestamp();
  write_text_file_atomic(out.string() + ".manifest.json", m.dump(2) + "\n");
}

inline void write_output(const std::filesystem::path& out, std::string_view content, const RunRecord& run) {
  write_text_file_atomic(out, content);
  write_manifest(out, run);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!trim(item).empty()) out.emplace_back(trim(item));
  return out;
}

inline nlohmann::json read_json_file(const std::string& path) {
  try {
    return nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

// Inserts keys of a --config JSON object as flags unless the command line
// already sets them. Booleans become bare flags, arrays repeat the flag.
inline std::vector<std::string> apply_config(std::vector<std::string> args, std::vector<std::string>& inputs) {
  auto it = std::find(args.begin(), args.end(), "--config");
  std::string path;
  if (it != args.end()) {
    if (it + 1 == args.end()) throw CLI::ArgumentMismatch("--config needs a file path");
    path = *(it + 1);
    args.erase(it, it + 2);
  } else {
    for (auto a = args.begin(); a != args.end(); ++a)
      if (a->rfind("--config=", 0) == 0) {
        path = a->substr(9);
        args.erase(a);
        break;
      }
  }
  if (path.empty()) return args;
  inputs.push_back(path);
  const nlohmann::json cfg = read_json_file(path);
  if (!cfg.is_object()) throw ValidationError(path + ": config must be a JSON object");
  auto present = [&](const std::string& flag) {
    return std::any_of(args.begin(), args.end(),
                       [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
  };
  for (auto e = cfg.begin(); e != cfg.end(); ++e) {
    const std::string flag = "--" + e.key();
    if (present(flag)) continue;
    auto scalar = [&](const nlohmann::json& v) {
      if (v.is_string()) return v.get<std::string>();
      if (v.is_number() || v.is_boolean()) return v.dump();
      throw ValidationError(path + ": \"" + e.key() + "\" must be a string, number, boolean or array");
    };
    if (e->is_boolean()) {
      if (e->get<bool>()) args.push_back(flag);
    } else if (e->is_array()) {
      for (const auto& v : *e) {
        args.push_back(flag);
        args.push_back(scalar(v));
      }
    } else {
      args.push_back(flag);
      args.push_back(scalar(*e));
    }
  }
  return args;
}

inline int run(const std::vector<std::string>& argv_in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Moral-value reasoning, corpus, classification and annotation toolkit", "moralframe"};
  app.set_version_flag("--version", tool_version);
  app.require_subcommand(1);

  RunRecord run;
  std::function<void()> action;

  // Shared option holders.
  std::string ontology_path, input_path, out_path, scorer_name = "coverage", format = "csv";
  bool hierarchy = false;
  std::uint64_t seed = 0;

  auto add_ontology = [&](CLI::App* c) { c->add_option("--ontology", ontology_path, "Ontology JSON file")->required(); };
  auto add_reasoner = [&](CLI::App* c) {
    c->add_option("--scorer", scorer_name, "coverage or projection")
        ->check(CLI::IsMember({"coverage", "projection"}))
        ->capture_default_str();
    c->add_flag("--hierarchy", hierarchy, "Expand fragment roles to their ancestors");
  };
  auto reasoner_options = [&] { return ReasonerOptions{parse_scorer(scorer_name), hierarchy}; };
  auto reasoner_json = [&] { return nlohmann::ordered_json{{"scorer", scorer_name}, {"hierarchy", hierarchy}}; };

  // generate -----------------------------------------------------------------
  corpus::GeneratorConfig gen;
  std::string templates_path, examples_path, raw_out;
  bool remote = false;
  auto* generate = app.add_subcommand("generate", "Generate a labeled corpus (template simulator or remote endpoint)");
  add_ontology(generate);
  generate->add_option("--templates", templates_path, "Template bank JSON (simulator)");
  generate->add_flag("--remote", remote, "Use the completion endpoint configured by environment variables");
  generate->add_option("--examples", examples_path, "Labeled JSONL corpus supplying few-shot examples (remote)");
  generate->add_option("--raw-out", raw_out, "Also save raw completions (remote)");
  generate->add_option("--seed", seed, "RNG seed")->required();
  generate->add_option("--per-value", gen.target_per_value, "Situations per value")->capture_default_str();
  generate->add_option("--roles-min", gen.roles_min)->capture_default_str();
  generate->add_option("--roles-max", gen.roles_max)->capture_default_str();
  generate->add_option("--temperature-min", gen.temperature_min)->capture_default_str();
  generate->add_option("--temperature-max", gen.temperature_max)->capture_default_str();
  generate->add_option("--few-shot", gen.few_shot_count)->capture_default_str();
  generate->add_option("--out", out_path, "Output corpus JSONL")->required();
  generate->callback([&] {
    action = [&] {
      if (remote != templates_path.empty())
        throw ValidationError("give exactly one of --templates or --remote");
      if (remote && examples_path.empty()) throw ValidationError("--remote needs --examples");
      gen.seed = seed;
      const Ontology o = load_ontology(ontology_path);
      Rng rng(seed);
      run.inputs = {ontology_path};
      Dataset data;
      if (remote) {
        run.inputs.push_back(examples_path);
        const corpus::CompletionClient client(corpus::completion_config_from_env());
        const auto result = corpus::generate_remote(load_dataset(examples_path), gen, o, client, rng);
        if (!raw_out.empty()) write_text_file_atomic(raw_out, result.raw);
        err << "parse report (total/accepted/hallucinated/malformed): " << corpus::to_string(result.report) << "\n";
        data = result.situations;
      } else {
        run.inputs.push_back(templates_path);
        data = corpus::generate_synthetic(corpus::load_template_bank(templates_path), gen, o, rng);
      }
      run.options = {{"source", remote ? "remote" : "templates"}, {"per_value", gen.target_per_value},
                     {"roles_min", gen.roles_min},              {"roles_max", gen.roles_max},
                     {"temperature_min", gen.temperature_min},  {"temperature_max", gen.temperature_max},
                     {"few_shot", gen.few_shot_count}};
      run.seed = seed;
      write_output(out_path, dataset_to_jsonl(data), run);
      out << "wrote " << data.size() << " situations to " << out_path << "\n";
    };
  });

  // parse --------------------------------------------------------------------
  std::string raw_path, id_prefix = "rec";
  auto* parse = app.add_subcommand("parse", "Parse structured model output into a corpus");
  add_ontology(parse);
  parse->add_option("--raw", raw_path, "Raw structured text")->required();
  parse->add_option("--id-prefix", id_prefix)->capture_default_str();
  parse->add_option("--out", out_path, "Output corpus JSONL")->required();
  parse->callback([&] {
    action = [&] {
      const Ontology o = load_ontology(ontology_path);
      const auto result = corpus::parse_structured_output(read_text_file(raw_path), o, id_prefix);
      run.inputs = {ontology_path, raw_path};
      run.options = {{"id_prefix", id_prefix}};
      write_output(out_path, dataset_to_jsonl(result.situations), run);
      out << corpus::to_string(result.report) << "\n";
    };
  });

  // stats --------------------------------------------------------------------
  std::size_t top_k = 10;
  auto* stats = app.add_subcommand("stats", "Role frequencies, rank-frequency slope and per-value counts");
  stats->add_option("--input", input_path, "Corpus JSONL")->required();
  stats->add_option("--top-k", top_k)->capture_default_str();
  stats->add_option("--out", out_path, "Output JSON")->required();
  stats->callback([&] {
    action = [&] {
      const auto s = corpus::corpus_stats(load_dataset(input_path), top_k);
      run.inputs = {input_path};
      run.options = {{"top_k", top_k}};
      write_output(out_path, corpus::to_json(s).dump(2) + "\n", run);
      out << "rank-frequency slope " << format_fixed(s.rank_frequency_slope, 4) << "\n";
    };
  });

  // infer --------------------------------------------------------------------
  auto* infer = app.add_subcommand("infer", "Satisfaction probabilities for every situation");
  add_ontology(infer);
  infer->add_option("--input", input_path, "Corpus JSONL")->required();
  add_reasoner(infer);
  infer->add_option("--format", format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}))->capture_default_str();
  infer->add_option("--out", out_path, "Output file")->required();
  infer->callback([&] {
    action = [&] {
      const Ontology o = load_ontology(ontology_path);
      const auto b = batch_infer(load_dataset(input_path), o, reasoner_options());
      run.inputs = {ontology_path, input_path};
      run.options = reasoner_json();
      run.options["format"] = format;
      write_output(out_path, format == "csv" ? satisfaction_csv(b, o) : satisfaction_jsonl(b), run);
      out << "inferred " << b.size() << " situations";
      if (b.predominance_rate) out << ", predominance rate " << format_fixed(*b.predominance_rate, 4);
      out << "\n";
    };
  });

  // correlate / project --------------------------------------------------------
  auto satisfaction_matrix = [&](const Ontology& o, const Dataset& data) {
    const auto b = batch_infer(data, o, reasoner_options());
    DenseMatrix m(b.size(), o.description_count());
    for (std::size_t i = 0; i < b.size(); ++i)
      std::copy(b.rows[i].probabilities.begin(), b.rows[i].probabilities.end(), m.row(i).begin());
    return m;
  };
  auto* correlate = app.add_subcommand("correlate", "Pearson correlation between description satisfactions");
  add_ontology(correlate);
  correlate->add_option("--input", input_path, "Corpus JSONL")->required();
  add_reasoner(correlate);
  correlate->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  correlate->add_option("--out", out_path, "Output file")->required();
  correlate->callback([&] {
    action = [&] {
      const Ontology o = load_ontology(ontology_path);
      const auto c = pearson_matrix(satisfaction_matrix(o, load_dataset(input_path)), o.description_names());
      run.inputs = {ontology_path, input_path};
      run.options = reasoner_json();
      run.options["format"] = format;
      write_output(out_path, format == "csv" ? c.to_csv() : c.to_json().dump(2) + "\n", run);
    };
  });

  auto* project = app.add_subcommand("project", "Two-dimensional principal-components projection");
  add_ontology(project);
  project->add_option("--input", input_path, "Corpus JSONL")->required();
  add_reasoner(project);
  project->add_option("--out", out_path, "Output CSV")->required();
  project->callback([&] {
    action = [&] {
      const Ontology o = load_ontology(ontology_path);
      const Dataset data = load_dataset(input_path);
      const auto p = project_2d(satisfaction_matrix(o, data));
      std::vector<std::string> ids, labels;
      bool all_labeled = true;
      for (const auto& s : data) {
        ids.push_back(s.id);
        labels.push_back(s.seed_value.value_or(""));
        all_labeled = all_labeled && s.seed_value;
      }
      run.inputs = {ontology_path, input_path};
      run.options = reasoner_json();
      write_output(out_path, p.to_csv(ids, all_labeled ? labels : std::vector<std::string>{}), run);
      out << "variance captured " << format_fixed(p.variance_captured, 6) << " of " << format_fixed(p.total_variance, 6)
          << "\n";
    };
  });

  // polarity -------------------------------------------------------------------
  std::string lexicon_path, sentence;
  auto* pol = app.add_subcommand("polarity", "Lexicon emotion polarity of a sentence or a corpus");
  pol->add_option("--lexicon", lexicon_path, "token<TAB>valence file")->required();
  auto* sentence_opt = pol->add_option("--sentence", sentence, "Score one sentence and print {\"polarity\": x}");
  auto* input_opt = pol->add_option("--input", input_path, "Corpus JSONL");
  pol->add_option("--out", out_path, "Per-situation CSV (with --input)");
  sentence_opt->excludes(input_opt);
  pol->callback([&] {
    action = [&] {
      if (input_path.empty() == sentence_opt->empty())
        throw ValidationError("give exactly one of --sentence or --input");
      const PolarityLexicon lex = load_lexicon(lexicon_path);
      if (!sentence_opt->empty()) {
        nlohmann::ordered_json j;
        j["polarity"] = polarity(sentence, lex);
        out << j.dump() << "\n";
        return;
      }
      if (out_path.empty()) throw ValidationError("--input needs --out");
      const Dataset data = load_dataset(input_path);
      std::string csv = "id,seed_value,polarity\n";
      for (const auto& s : data) csv += s.id + "," + s.seed_value.value_or("") + "," + format_fixed(polarity(s.sentence, lex), 9) + "\n";
      run.inputs = {lexicon_path, input_path};
      write_output(out_path, csv, run);
      for (const auto& [value, mean] : mean_polarity_by_value(data, lex)) out << value << " " << format_fixed(mean, 4) << "\n";
    };
  });

  // features -------------------------------------------------------------------
  std::string recipe_name = "tfidf+sandra", embeddings_path;
  std::size_t emb_dim = 64;
  auto add_features = [&](CLI::App* c) {
    c->add_option("--embeddings", embeddings_path, "Sentence embeddings TSV keyed by situation id");
    c->add_option("--emb-dim", emb_dim, "Pseudo-embedding width when no file is given")->capture_default_str();
  };
  auto* features = app.add_subcommand("features", "Fused feature rows as JSON lines");
  add_ontology(features);
  features->add_option("--input", input_path, "Corpus JSONL")->required();
  features->add_option("--recipe", recipe_name)
      ->check(CLI::IsMember({"sandra", "tfidf", "tfidf+sandra", "emb", "emb+sandra"}))
      ->capture_default_str();
  add_reasoner(features);
  add_features(features);
  features->add_option("--seed", seed, "RNG seed")->required();
  features->add_option("--out", out_path, "Output JSONL")->required();
  features->callback([&] {
    action = [&] {
      const auto recipe = classifiers::parse_recipe(recipe_name);
      const Ontology o = load_ontology(ontology_path);
      const Dataset data = load_dataset(input_path);
      run.inputs = {ontology_path, input_path};
      std::optional<EmbeddingTable> table;
      if (!embeddings_path.empty()) {
        table = load_embeddings(embeddings_path);
        run.inputs.push_back(embeddings_path);
      }
      std::optional<TfidfModel> tfidf;
      if (classifiers::uses_tfidf(recipe)) {
        std::vector<std::string> sentences;
        for (const auto& s : data) sentences.push_back(s.sentence);
        tfidf = fit_tfidf(sentences);
      }
      const EmbeddingSource emb{table ? &*table : nullptr, emb_dim, mix_seed(seed, moralframe::detail::fnv1a64("emb"))};
      const FeatureMatrix m = classifiers::build_features(recipe, data, o, reasoner_options(), tfidf ? &*tfidf : nullptr, emb);
      std::vector<std::string> ids;
      for (const auto& s : data) ids.push_back(s.id);
      run.options = reasoner_json();
      run.options["recipe"] = recipe_name;
      run.options["emb_dim"] = emb_dim;
      run.seed = seed;
      write_output(out_path, feature_matrix_jsonl(m, ids), run);
      out << m.rows() << " rows x " << m.cols() << " columns\n";
    };
  });

  // train ----------------------------------------------------------------------
  std::string kind_name = "logistic_regression", hyper_path, corpus_path;
  auto load_config = [&] {
    if (hyper_path.empty()) return classifiers::TrainConfig{};
    run.inputs.push_back(hyper_path);
    return classifiers::train_config_from_json(read_json_file(hyper_path));
  };
  auto kind_names = [] {
    std::vector<std::string> v;
    for (auto k : classifiers::all_kinds) v.emplace_back(classifiers::to_string(k));
    return v;
  }();
  auto* train = app.add_subcommand("train", "Train a classifier pipeline on a labeled corpus");
  add_ontology(train);
  train->add_option("--corpus", corpus_path, "Labeled corpus JSONL")->required();
  train->add_option("--kind", kind_name)->check(CLI::IsMember(kind_names))->capture_default_str();
  train->add_option("--recipe", recipe_name)
      ->check(CLI::IsMember({"sandra", "tfidf", "tfidf+sandra", "emb", "emb+sandra"}))
      ->capture_default_str();
  train->add_option("--hyperparameters", hyper_path, "JSON object overriding hyperparameter defaults");
  add_reasoner(train);
  add_features(train);
  train->add_option("--seed", seed, "RNG seed")->required();
  train->add_option("--out", out_path, "Output model JSON")->required();
  train->callback([&] {
    action = [&] {
      classifiers::PipelineOptions opts;
      opts.recipe = classifiers::parse_recipe(recipe_name);
      opts.kind = classifiers::parse_kind(kind_name);
      opts.reasoner = reasoner_options();
      opts.seed = seed;
      opts.pseudo_dim = emb_dim;
      run.inputs = {ontology_path, corpus_path};
      opts.config = load_config();
      std::optional<EmbeddingTable> table;
      if (!embeddings_path.empty()) {
        table = load_embeddings(embeddings_path);
        run.inputs.push_back(embeddings_path);
        opts.embeddings = &*table;
      }
      const Ontology o = load_ontology(ontology_path);
      const Dataset data = load_dataset(corpus_path);
      const auto p = classifiers::train_pipeline(data, o, opts);
      run.options = reasoner_json();
      run.options["kind"] = kind_name;
      run.options["recipe"] = recipe_name;
      run.options["hyperparameters"] = classifiers::to_json(opts.config);
      run.seed = seed;
      write_output(out_path, p.to_json().dump() + "\n", run);
      out << "trained " << kind_name << " on " << data.size() << " situations\n";
    };
  });

  // benchmark --------------------------------------------------------------------
  std::string kinds_list, recipes_list;
  double train_fraction = 2.0 / 3.0;
  auto* bench = app.add_subcommand("benchmark", "Accuracy grid of classifier kinds x feature recipes");
  add_ontology(bench);
  bench->add_option("--corpus", corpus_path, "Labeled corpus JSONL")->required();
  bench->add_option("--kinds", kinds_list, "Comma-separated kinds (default: all)");
  bench->add_option("--recipes", recipes_list, "Comma-separated recipes (default: all)");
  bench->add_option("--train-fraction", train_fraction)->capture_default_str();
  bench->add_option("--hyperparameters", hyper_path, "JSON object overriding hyperparameter defaults");
  add_reasoner(bench);
  add_features(bench);
  bench->add_option("--seed", seed, "RNG seed")->required();
  bench->add_option("--out", out_path, "Output CSV")->required();
  bench->callback([&] {
    action = [&] {
      classifiers::BenchmarkOptions opts;
      if (!kinds_list.empty()) {
        opts.kinds.clear();
        for (const auto& k : split_list(kinds_list)) opts.kinds.push_back(classifiers::parse_kind(k));
      }
      if (!recipes_list.empty()) {
        opts.recipes.clear();
        for (const auto& r : split_list(recipes_list)) opts.recipes.push_back(classifiers::parse_recipe(r));
      }
      opts.split = {train_fraction, seed};
      opts.reasoner = reasoner_options();
      opts.pseudo_dim = emb_dim;
      run.inputs = {ontology_path, corpus_path};
      opts.config = load_config();
      std::optional<EmbeddingTable> table;
      if (!embeddings_path.empty()) {
        table = load_embeddings(embeddings_path);
        run.inputs.push_back(embeddings_path);
        opts.embeddings = &*table;
      }
      const Ontology o = load_ontology(ontology_path);
      const auto t = classifiers::benchmark(load_dataset(corpus_path), o, opts);
      run.options = reasoner_json();
      run.options["kinds"] = kinds_list;
      run.options["recipes"] = recipes_list;
      run.options["train_fraction"] = train_fraction;
      run.options["hyperparameters"] = classifiers::to_json(opts.config);
      run.seed = seed;
      const std::string csv = t.to_csv();
      write_output(out_path, csv, run);
      out << csv;
    };
  });

  // explain ------------------------------------------------------------------------
  std::string model_path;
  auto* explain = app.add_subcommand("explain", "Ranked feature importances of a trained model");
  explain->add_option("--model", model_path, "Model JSON written by train")->required();
  explain->add_option("--top-k", top_k)->capture_default_str();
  explain->add_option("--out", out_path, "Output JSON")->required();
  explain->callback([&] {
    action = [&] {
      const auto p = classifiers::load_pipeline(model_path);
      const auto report = classifiers::feature_importance(p.model, top_k);
      run.inputs = {model_path};
      run.options = {{"top_k", top_k}};
      write_output(out_path, report.to_json().dump(2) + "\n", run);
    };
  });

  // serve ----------------------------------------------------------------------------
  std::string host = "127.0.0.1", annotations_path = "annotations.jsonl", cors = "*";
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "HTTP API for inference, sentiment, classification and annotations");
  add_ontology(serve);
  serve->add_option("--lexicon", lexicon_path, "token<TAB>valence file")->required();
  serve->add_option("--model", model_path, "Model JSON written by train (enables /classify)");
  serve->add_option("--annotations", annotations_path, "Annotation store (JSON lines)")->capture_default_str();
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--port", port)->check(CLI::Range(0, 65535))->capture_default_str();
  serve->add_option("--cors-origin", cors)->capture_default_str();
  add_reasoner(serve);
  serve->callback([&] {
    action = [&] {
      ServiceConfig config;
      config.reasoner = reasoner_options();
      config.annotation_path = annotations_path;
      config.cors_origin = cors;
      if (!model_path.empty()) config.pipeline = classifiers::load_pipeline(model_path);
      Service service(load_ontology(ontology_path), load_lexicon(lexicon_path), std::move(config));
      httplib::Server server;
      service.mount(server);
      if (!server.bind_to_port(host, port)) throw IoError("cannot bind " + host + ":" + std::to_string(port));
      out << "listening on " << host << ":" << port << std::endl;
      server.listen_after_bind();
    };
  });

  try {
    std::vector<std::string> args(argv_in.begin() + (argv_in.empty() ? 0 : 1), argv_in.end());
    args = apply_config(std::move(args), run.config_inputs);
    std::reverse(args.begin(), args.end());
    try {
      app.parse(args);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? ok : validation_failure;
    }
    run.subcommand = app.get_subcommands().front()->get_name();
    action();
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return validation_failure;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return validation_failure;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return io_failure;
  } catch (const NetworkError& e) {
    err << "error: " << e.what() << "\n";
    return io_failure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return validation_failure;
  }
}

} // namespace moralframe::cli
