#include <gtest/gtest.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include <httplib.h>

#include <moralframe/corpus/completion_client.hpp>
#include <moralframe/corpus/prompt.hpp>
#include <moralframe/corpus/record_format.hpp>
#include <moralframe/corpus/remote_generation.hpp>
#include <moralframe/corpus/simulator.hpp>
#include <moralframe/corpus/stats.hpp>

#include "support.hpp"

using namespace moralframe;
using namespace moralframe::corpus;

namespace {

const Ontology& mft() {
  static const Ontology o = load_ontology(support::data_path("mft_ontology.json"));
  return o;
}

Situation record(std::string sentence, std::vector<Fragment> fragments) {
  return {"x", std::move(sentence), std::move(fragments), std::nullopt};
}

std::vector<Situation> three_examples() {
  return {record("The judge heard the case.", {{"The judge", "Judge"}, {"the case", "Charges"}}),
          record("A leader spoke at dawn.", {{"A leader", "Leader"}, {"at dawn", "Time"}}),
          record("The crowd gathered in the square.", {{"The crowd", "Agent"}, {"in the square", "Place"}})};
}

Dataset synthetic(std::uint64_t seed, int per_value = 100) {
  GeneratorConfig c;
  c.target_per_value = per_value;
  Rng rng(seed);
  return generate_synthetic(load_template_bank(support::data_path("templates.json")), c, mft(), rng);
}

// Local HTTP server on an ephemeral port, stopped on destruction.
class StubServer {
public:
  explicit StubServer(std::function<void(const httplib::Request&, httplib::Response&)> handler) {
    server_.Post("/complete", std::move(handler));
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/complete"; }

private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

CompletionClientConfig client_config(const std::string& url) {
  CompletionClientConfig c;
  c.url = url;
  c.timeout_seconds = 2.0;
  c.initial_backoff_seconds = 0.01;
  return c;
}

} // namespace

TEST(Prompt, ContainsRolesAndExamplesVerbatim) {
  GeneratorConfig c;
  const auto shots = three_examples();
  const std::string p = build_prompt(c, shots, {"Agent", "Suspect"});
  EXPECT_NE(p.find("Agent, Suspect"), std::string::npos);
  for (const auto& s : shots) EXPECT_NE(p.find(serialize_record(s)), std::string::npos);
  EXPECT_EQ(p, build_prompt(c, shots, {"Agent", "Suspect"}));
  EXPECT_TRUE(p.ends_with("SENTENCE:"));
}

TEST(Prompt, Preconditions) {
  GeneratorConfig c;
  EXPECT_THROW(build_prompt(c, three_examples(), {"Agent"}), ValidationError);
  EXPECT_THROW(build_prompt(c, {three_examples()[0]}, {"Agent", "Suspect"}), ValidationError);
  auto shots = three_examples();
  shots[0].sentence = "The Value of honesty is clear.";
  EXPECT_THROW(build_prompt(c, shots, {"Agent", "Suspect"}), ValidationError);
}

TEST(Prompt, ThousandPromptsNeverMentionTheWord) {
  const Dataset data = synthetic(11, 10);
  GeneratorConfig c;
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const auto req = sample_generation_request(c, mft(), rng);
    std::vector<Situation> shots;
    for (std::size_t pos : sample_without_replacement(rng, data.size(), 3)) shots.push_back(data[pos]);
    std::string p = build_prompt(c, shots, req.sampled_roles);
    for (char& ch : p) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    ASSERT_EQ(p.find("value"), std::string::npos);
  }
}

TEST(GeneratorConfig, Validation) {
  GeneratorConfig c;
  EXPECT_NO_THROW(validate(c, mft()));
  c.roles_min = 0;
  EXPECT_THROW(validate(c, mft()), ValidationError);
  c = {};
  c.roles_max = static_cast<int>(mft().description_role_union().size()) + 1;
  EXPECT_THROW(validate(c, mft()), ValidationError);
  c = {};
  c.temperature_min = 0.0;
  EXPECT_THROW(validate(c, mft()), ValidationError);
  c = {};
  c.temperature_min = 0.5;
  c.temperature_max = 0.4;
  EXPECT_THROW(validate(c, mft()), ValidationError);
}

TEST(Sampling, SizeHistogramWithinFiveSigmaAndTemperatureRange) {
  GeneratorConfig c;
  Rng rng(42);
  const int draws = 10000;
  std::vector<int> hist(16, 0);
  double tmin = 1e9, tmax = -1e9;
  const auto pool = mft().description_role_union();
  for (int i = 0; i < draws; ++i) {
    const auto req = sample_generation_request(c, mft(), rng);
    const std::set<std::string> distinct(req.sampled_roles.begin(), req.sampled_roles.end());
    ASSERT_EQ(distinct.size(), req.sampled_roles.size());
    for (const auto& r : req.sampled_roles)
      ASSERT_NE(std::find(pool.begin(), pool.end(), mft().role_id(r)), pool.end()) << r;
    ++hist.at(req.sampled_roles.size());
    tmin = std::min(tmin, req.temperature);
    tmax = std::max(tmax, req.temperature);
  }
  const double p = 1.0 / 14.0;
  const double expected = draws * p, sigma = std::sqrt(draws * p * (1 - p));
  for (int k = 2; k <= 15; ++k) EXPECT_LE(std::abs(hist[k] - expected), 5 * sigma) << "size " << k;
  EXPECT_EQ(hist[0] + hist[1], 0);
  EXPECT_GE(tmin, 0.01);
  EXPECT_LE(tmax, 1.0);
}

TEST(Sampling, SeededDeterminism) {
  GeneratorConfig c;
  Rng a(5), b(5);
  for (int i = 0; i < 100; ++i) {
    const auto x = sample_generation_request(c, mft(), a);
    const auto y = sample_generation_request(c, mft(), b);
    ASSERT_EQ(x.sampled_roles, y.sampled_roles);
    ASSERT_EQ(x.temperature, y.temperature);
  }
}

TEST(Parser, HappyPathAndHallucination) {
  const auto ok = parse_structured_output("SENTENCE: The man was charged.\nROLES:\n- The man :: Suspect\n", mft());
  EXPECT_EQ(ok.report, (ParseReport{1, 1, 0, 0}));
  ASSERT_EQ(ok.situations.size(), 1u);
  EXPECT_EQ(ok.situations[0].fragments, (std::vector<Fragment>{{"The man", "Suspect"}}));
  EXPECT_EQ(ok.situations[0].id, "rec-000001");

  const auto bad = parse_structured_output("SENTENCE: A ship flew.\nROLES:\n- A ship :: Starship\n", mft());
  EXPECT_EQ(bad.report, (ParseReport{1, 0, 1, 0}));
  EXPECT_TRUE(bad.situations.empty());
}

TEST(Parser, LenientReader) {
  const std::string raw =
      "Here you go:\n\nsentence: The judge ruled.\n\n  roles:\n\n  - The judge :: Judge  \n\nThanks!\n";
  const auto r = parse_structured_output(raw, mft());
  EXPECT_EQ(r.report, (ParseReport{1, 1, 0, 0}));
  EXPECT_EQ(r.situations.at(0).sentence, "The judge ruled.");
}

TEST(Parser, StructuralFailuresAreMalformed) {
  for (const char* raw : {"SENTENCE: No stop\nROLES:\n- x :: Agent\n", "SENTENCE: No header.\n- x :: Agent\n",
                          "SENTENCE: No fragments.\nROLES:\n", "SENTENCE: Bad line.\nROLES:\n- x Agent\n",
                          "SENTENCE: Starship but broken\nROLES:\n- x :: Starship\n", "SENTENCE:\nROLES:\n- x :: Agent\n"}) {
    EXPECT_EQ(parse_structured_output(raw, mft()).report, (ParseReport{1, 0, 0, 1})) << raw;
  }
  EXPECT_EQ(parse_structured_output("", mft()).report, ParseReport{});
}

TEST(Parser, ConstructedTenThousandStream) {
  Rng rng(2024);
  const std::string raw = support::constructed_stream(rng, mft(), 10000, 1166, 2300);
  const auto r = parse_structured_output(raw, mft());
  EXPECT_EQ(r.report, (ParseReport{10000, 6534, 1166, 2300}));
  for (const auto& s : r.situations) ASSERT_NO_THROW(validate_situation(s, mft()));
}

TEST(Parser, PartitionHoldsOnArbitraryText) {
  Rng rng(8);
  const std::vector<std::string> pieces{"SENTENCE: a.", "SENTENCE: b", "ROLES:", "- x :: Agent", "- y :: Ghost",
                                        "- broken", "", "prose", "roles:", "-  :: Agent"};
  for (int t = 0; t < 2000; ++t) {
    std::string raw;
    const int n = uniform_int(rng, 0, 30);
    for (int i = 0; i < n; ++i) raw += pieces[uniform_index(rng, pieces.size())] + "\n";
    const auto r = parse_structured_output(raw, mft());
    ASSERT_EQ(r.report.accepted + r.report.hallucinated + r.report.malformed, r.report.total) << raw;
    ASSERT_EQ(r.situations.size(), r.report.accepted);
    for (const auto& s : r.situations) ASSERT_NO_THROW(validate_situation(s, mft()));
  }
}

TEST(Parser, RoundTripIsFixedPoint) {
  const Dataset data = synthetic(3, 20);
  const std::string once = serialize_records(data);
  const auto parsed = parse_structured_output(once, mft());
  EXPECT_EQ(parsed.report.accepted, data.size());
  EXPECT_EQ(serialize_records(parsed.situations), once);
}

TEST(Records, WriterRejectsMultilineText) {
  EXPECT_THROW(serialize_record(record("two\nlines.", {{"x", "Agent"}})), ValidationError);
}

TEST(Synthetic, CountsDeterminismAndSlope) {
  const Dataset data = synthetic(7);
  ASSERT_EQ(data.size(), 1000u);
  const auto stats = corpus_stats(data);
  EXPECT_EQ(stats.per_value_counts.size(), 10u);
  std::size_t total = 0;
  for (const auto& [v, n] : stats.per_value_counts) {
    EXPECT_EQ(n, 100u) << v;
    total += n;
  }
  EXPECT_EQ(total, data.size());
  EXPECT_LT(stats.rank_frequency_slope, 0.0);
  for (const auto& [v, top] : stats.top_roles_per_value) {
    EXPECT_LE(top.size(), 10u);
    for (std::size_t i = 1; i < top.size(); ++i) EXPECT_GE(top[i - 1].second, top[i].second);
  }
  EXPECT_EQ(dataset_to_jsonl(data), dataset_to_jsonl(synthetic(7)));
  EXPECT_EQ(to_json(stats).dump(), to_json(corpus_stats(synthetic(7))).dump());
  EXPECT_NE(dataset_to_jsonl(data), dataset_to_jsonl(synthetic(8)));
  for (const auto& s : data) {
    ASSERT_NO_THROW(validate_situation(s, mft()));
    ASSERT_TRUE(s.sentence.ends_with("."));
  }
}

TEST(Synthetic, EmptyBankThrows) {
  TemplateBank bank;
  Rng rng(1);
  EXPECT_THROW(generate_synthetic(bank, GeneratorConfig{}, mft(), rng), ValidationError);
}

TEST(Stats, SingleRankAndClosedFormSlope) {
  Dataset data;
  for (int i = 0; i < 5; ++i) data.push_back(record("s.", {{"x", "A"}}));
  const auto one = corpus_stats(data);
  EXPECT_EQ(one.role_frequencies, (std::map<std::string, std::size_t>{{"A", 5}}));
  EXPECT_EQ(one.rank_frequency_slope, 0.0);

  // Regression of log(8,4,2,1) on log(1..4), computed independently.
  const double x[4] = {0.0, std::log(2.0), std::log(3.0), std::log(4.0)};
  const double y[4] = {std::log(8.0), std::log(4.0), std::log(2.0), 0.0};
  double mx = 0, my = 0;
  for (int i = 0; i < 4; ++i) mx += x[i] / 4, my += y[i] / 4;
  double num = 0, den = 0;
  for (int i = 0; i < 4; ++i) num += (x[i] - mx) * (y[i] - my), den += (x[i] - mx) * (x[i] - mx);
  const double slope = rank_frequency_slope({{"A", 8}, {"B", 4}, {"C", 2}, {"D", 1}});
  EXPECT_NEAR(slope, num / den, 1e-12);
  EXPECT_NEAR(slope, -1.5, 0.15);
  EXPECT_THROW(corpus_stats({}), ValidationError);
}

TEST(CompletionClient, EchoesStubRecord) {
  const std::string rec = "SENTENCE: The man was charged.\nROLES:\n- The man :: Suspect\n";
  std::string seen_id, seen_auth;
  StubServer stub([&](const httplib::Request& req, httplib::Response& res) {
    seen_id = req.get_header_value("X-Request-Id");
    seen_auth = req.get_header_value("Authorization");
    const auto body = nlohmann::json::parse(req.body);
    EXPECT_EQ(body["prompt"], "p");
    res.set_content(nlohmann::json{{"completion", rec}}.dump(), "application/json");
  });
  auto cfg = client_config(stub.url());
  cfg.api_key = "secret";
  EXPECT_EQ(fetch_completion(cfg, "p", 0.5, "req-9"), rec);
  EXPECT_EQ(seen_id, "req-9");
  EXPECT_EQ(seen_auth, "Bearer secret");
}

TEST(CompletionClient, PlainTextBodyIsReturnedVerbatim) {
  StubServer stub([](const httplib::Request&, httplib::Response& res) { res.set_content("{\"completion\":1}", "text/plain"); });
  EXPECT_EQ(fetch_completion(client_config(stub.url()), "p", 0.5), "{\"completion\":1}");
}

TEST(CompletionClient, ServerErrorsRetryThreeTimes) {
  std::atomic<int> hits{0};
  StubServer stub([&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 500;
  });
  try {
    fetch_completion(client_config(stub.url()), "p", 0.5, "req-500");
    FAIL() << "expected TransportError";
  } catch (const TransportError& e) {
    EXPECT_EQ(e.request_id(), "req-500");
    EXPECT_NE(std::string(e.what()).find("3 attempts"), std::string::npos);
  }
  EXPECT_EQ(hits.load(), 3);
}

TEST(CompletionClient, ClientErrorIsNotRetried) {
  std::atomic<int> hits{0};
  StubServer stub([&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 403;
  });
  try {
    fetch_completion(client_config(stub.url()), "p", 0.5, "req-403");
    FAIL() << "expected StatusError";
  } catch (const StatusError& e) {
    EXPECT_EQ(e.status(), 403);
    EXPECT_EQ(e.request_id(), "req-403");
  }
  EXPECT_EQ(hits.load(), 1);
}

TEST(CompletionClient, SlowEndpointTimesOut) {
  StubServer stub([](const httplib::Request&, httplib::Response& res) {
    std::this_thread::sleep_for(std::chrono::milliseconds(1500));
    res.set_content("late", "text/plain");
  });
  auto cfg = client_config(stub.url());
  cfg.timeout_seconds = 0.3;
  EXPECT_THROW(fetch_completion(cfg, "p", 0.5, "req-slow"), TimeoutError);
}

TEST(CompletionClient, UnreachableEndpointIsTransportError) {
  const int port = support::unused_port();
  EXPECT_THROW(fetch_completion(client_config("http://127.0.0.1:" + std::to_string(port) + "/x"), "p", 0.5),
               TransportError);
}

TEST(CompletionClient, ConfigErrors) {
  EXPECT_THROW(CompletionClient(CompletionClientConfig{}), ValidationError);
  EXPECT_THROW(CompletionClient(client_config("ftp://host/x")), ValidationError);
}

TEST(CompletionClient, FetchAllKeepsRequestOrder) {
  StubServer stub([](const httplib::Request& req, httplib::Response& res) {
    const auto id = nlohmann::json::parse(req.body)["request_id"].get<std::string>();
    // Earlier requests answer later.
    std::this_thread::sleep_for(std::chrono::milliseconds(5 * (20 - std::stoi(id))));
    res.set_content(id, "text/plain");
  });
  std::vector<CompletionClient::Request> reqs;
  for (int i = 0; i < 20; ++i) reqs.push_back({"p", 0.5, std::to_string(i)});
  const auto out = CompletionClient(client_config(stub.url())).fetch_all(reqs);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(out[i], std::to_string(i));
}

TEST(RemoteGeneration, CompletesOpenSlotAndLabelsByFewShotValue) {
  std::atomic<int> calls{0};
  StubServer stub([&](const httplib::Request& req, httplib::Response& res) {
    const auto prompt = nlohmann::json::parse(req.body)["prompt"].get<std::string>();
    EXPECT_TRUE(prompt.ends_with("SENTENCE:"));
    // Alternate between continuing the slot and restating the keyword.
    res.set_content(calls++ % 2 == 0 ? " The judge ruled on the case.\nROLES:\n- The judge :: Judge\n"
                                     : "SENTENCE: A ship flew.\nROLES:\n- A ship :: Starship\n",
                    "text/plain");
  });
  const Dataset examples = synthetic(9, 5);
  GeneratorConfig c;
  c.target_per_value = 2;
  c.seed = 4;
  Rng rng(4);
  auto cfg = client_config(stub.url());
  cfg.max_concurrency = 1;
  const auto gen = generate_remote(examples, c, mft(), CompletionClient(cfg), rng);
  EXPECT_EQ(gen.report, (ParseReport{20, 10, 10, 0}));
  ASSERT_EQ(gen.situations.size(), 10u);
  std::set<std::string> values;
  for (const auto& s : gen.situations) values.insert(*s.seed_value);
  EXPECT_EQ(values.size(), 10u);
  EXPECT_EQ(parse_structured_output(gen.raw, mft()).report, gen.report);
}

TEST(RemoteGeneration, NeedsEnoughExamples) {
  StubServer stub([](const httplib::Request&, httplib::Response& res) { res.set_content("", "text/plain"); });
  Rng rng(1);
  EXPECT_THROW(generate_remote({}, GeneratorConfig{}, mft(), CompletionClient(client_config(stub.url())), rng),
               ValidationError);
}
