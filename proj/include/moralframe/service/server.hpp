#pragma once

// HTTP API over the reasoner, polarity scorer, classifier pipeline and the
// annotation store. Handlers are plain member functions returning
// (status, body) so they can be exercised without a socket.

#include <atomic>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "../analysis/polarity.hpp"
#include "../classifiers/pipeline.hpp"
#include "../ontology.hpp"
#include "../reasoner.hpp"
#include "annotation_store.hpp"

namespace moralframe {

struct ApiResponse {
  int status = 200;
  std::string body;
};

struct ServiceConfig {
  ReasonerOptions reasoner;                               // default scorer for /infer
  std::optional<classifiers::ClassifyPipeline> pipeline;  // /classify answers 503 without one
  std::filesystem::path annotation_path = "annotations.jsonl";
  std::string cors_origin = "*";
};

class Service {
public:
  Service(Ontology ontology, PolarityLexicon lexicon, ServiceConfig config)
      : ontology_(std::move(ontology)), lexicon_(std::move(lexicon)), config_(std::move(config)),
        store_(config_.annotation_path), ontology_body_(ontology_.to_json().dump()) {}

  const Ontology& ontology() const noexcept { return ontology_; }

  ApiResponse get_ontology() const { return {200, ontology_body_}; }

  ApiResponse infer(const std::string& body) const {
    return guarded([&] {
      const nlohmann::json j = parse_body(body, {"sentence", "fragments", "scorer", "use_hierarchy"});
      Situation s = situation_from_body(j);
      ReasonerOptions opts = config_.reasoner;
      if (j.contains("scorer")) opts.scorer = parse_scorer(string_field(j, "scorer"));
      if (j.contains("use_hierarchy")) {
        if (!j["use_hierarchy"].is_boolean()) throw ValidationError("\"use_hierarchy\" must be a boolean");
        opts.use_hierarchy = j["use_hierarchy"];
      }
      const SatisfactionVector v = satisfaction_vector(s, ontology_, opts);
      nlohmann::ordered_json out;
      out["descriptions"] = ontology_.description_names();
      out["scorer"] = to_string(opts.scorer);
      out["scores"] = v.scores;
      out["probabilities"] = v.probabilities;
      out["predominant"] = predominant_description(v, ontology_);
      return ApiResponse{200, out.dump()};
    });
  }

  ApiResponse sentiment(const std::string& body) const {
    return guarded([&] {
      const nlohmann::json j = parse_body(body, {"sentence"});
      nlohmann::ordered_json out;
      out["polarity"] = polarity(string_field(j, "sentence"), lexicon_);
      return ApiResponse{200, out.dump()};
    });
  }

  ApiResponse classify(const std::string& body) const {
    if (!config_.pipeline) return error(503, "no_model", "no classification model loaded");
    return guarded([&] {
      const nlohmann::json j = parse_body(body, {"sentence", "fragments"});
      const Situation s = situation_from_body(j);
      const classifiers::Classification c = classifiers::classify(*config_.pipeline, s, ontology_);
      nlohmann::ordered_json out;
      out["predicted"] = c.label;
      out["class_names"] = config_.pipeline->model.class_names;
      out["probabilities"] = c.probabilities ? nlohmann::ordered_json(*c.probabilities) : nlohmann::ordered_json(nullptr);
      nlohmann::ordered_json top = nlohmann::ordered_json::array();
      for (const auto& fw : c.top_features) top.push_back({{"feature", fw.feature}, {"weight", fw.weight}});
      out["top_features"] = top;
      return ApiResponse{200, out.dump()};
    });
  }

  ApiResponse post_annotation(const std::string& body) {
    return guarded([&] {
      const nlohmann::json j = parse_body(body, {"id", "sentence", "fragments", "author"});
      const Situation s = situation_from_body(j);
      std::optional<std::string> id;
      if (j.contains("id") && !j["id"].is_null()) id = string_field(j, "id");
      const std::string author = j.contains("author") ? string_field(j, "author") : std::string();
      const AnnotationRecord r = store_.append(id, s.sentence, s.fragments, author);
      return ApiResponse{201, r.to_json().dump()};
    });
  }

  ApiResponse get_annotations(const std::string& id) const {
    const auto history = store_.history(id);
    if (history.empty()) return error(404, "not_found", "no annotation with id \"" + id + "\"");
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : history) arr.push_back(r.to_json());
    nlohmann::ordered_json out;
    out["id"] = id;
    out["revisions"] = arr;
    return {200, out.dump()};
  }

  // Routes every endpoint onto `server`.
  void mount(httplib::Server& server) {
    auto reply = [this](httplib::Response& res, const ApiResponse& r) {
      res.status = r.status;
      res.set_content(r.body, "application/json");
      res.set_header("Access-Control-Allow-Origin", config_.cors_origin);
    };
    server.Options(".*", [this](const httplib::Request&, httplib::Response& res) {
      res.status = 204;
      res.set_header("Access-Control-Allow-Origin", config_.cors_origin);
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
    });
    server.Get("/ontology", [=, this](const httplib::Request&, httplib::Response& res) { reply(res, get_ontology()); });
    server.Post("/infer", [=, this](const httplib::Request& req, httplib::Response& res) { reply(res, infer(req.body)); });
    server.Post("/sentiment",
                [=, this](const httplib::Request& req, httplib::Response& res) { reply(res, sentiment(req.body)); });
    server.Post("/classify",
                [=, this](const httplib::Request& req, httplib::Response& res) { reply(res, classify(req.body)); });
    server.Post("/annotations",
                [=, this](const httplib::Request& req, httplib::Response& res) { reply(res, post_annotation(req.body)); });
    server.Get(R"(/annotations/([^/]+))", [=, this](const httplib::Request& req, httplib::Response& res) {
      reply(res, get_annotations(req.matches[1].str()));
    });
    server.set_error_handler([this](const httplib::Request&, httplib::Response& res) {
      if (!res.body.empty()) return;
      const ApiResponse r = error(res.status, res.status == 404 ? "not_found" : "http_error", "no such endpoint");
      res.set_content(r.body, "application/json");
      res.set_header("Access-Control-Allow-Origin", config_.cors_origin);
    });
    server.set_exception_handler([this](const httplib::Request&, httplib::Response& res, std::exception_ptr) {
      const ApiResponse r = error(500, "internal", "internal error");
      res.status = r.status;
      res.set_content(r.body, "application/json");
    });
  }

  static ApiResponse error(int status, const std::string& code, const std::string& message) {
    nlohmann::ordered_json j;
    j["code"] = code;
    j["message"] = message;
    return {status, j.dump()};
  }

private:
  template <typename F>
  static ApiResponse guarded(F&& f) {
    try {
      return f();
    } catch (const RequestError& e) {
      return error(400, e.code, e.what());
    } catch (const ValidationError& e) {
      return error(400, "invalid_request", e.what());
    } catch (const IoError& e) {
      return error(500, "storage", e.what());
    } catch (const std::exception&) {
      return error(500, "internal", "internal error");
    }
  }

  struct RequestError : ValidationError {
    RequestError(std::string c, const std::string& message) : ValidationError(message), code(std::move(c)) {}
    std::string code;
  };

  static nlohmann::json parse_body(const std::string& body, std::initializer_list<const char*> allowed) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error&) {
      throw RequestError("bad_json", "request body is not valid JSON");
    }
    if (!j.is_object()) throw RequestError("bad_json", "request body must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
      bool known = false;
      for (const char* a : allowed) known = known || it.key() == a;
      if (!known) throw RequestError("unknown_field", "unknown field \"" + it.key() + "\"");
    }
    return j;
  }

  static std::string string_field(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) throw RequestError("missing_field", std::string("missing \"") + key + "\"");
    if (!j[key].is_string()) throw RequestError("invalid_field", std::string("\"") + key + "\" must be a string");
    return j[key].get<std::string>();
  }

  Situation situation_from_body(const nlohmann::json& j) const {
    Situation s;
    s.id = "request";
    s.sentence = string_field(j, "sentence");
    if (!j.contains("fragments")) throw RequestError("missing_field", "missing \"fragments\"");
    s.fragments = fragments_from_json(j["fragments"]);
    if (s.fragments.empty()) throw RequestError("empty_fragments", "at least one fragment is required");
    for (const Fragment& f : s.fragments) {
      if (f.text.empty()) throw RequestError("invalid_fragment", "fragment with empty text");
      if (!ontology_.has_role(f.role)) throw RequestError("unknown_role", "unknown role \"" + f.role + "\"");
    }
    return s;
  }

  Ontology ontology_;
  PolarityLexicon lexicon_;
  ServiceConfig config_;
  AnnotationStore store_;
  std::string ontology_body_;
};

} // namespace moralframe
