#include "necorr/llm.hpp"

#include <doctest.h>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <atomic>
#include <filesystem>
#include <thread>

#include "necorr/denoising.hpp"
#include "necorr/errors.hpp"
#include "necorr/rng.hpp"

using namespace necorr;

namespace {

Candidate cand(const std::string& surface, double ps) {
  Candidate c;
  c.record.surface = surface;
  c.ps = ps;
  return c;
}

TaskContext mcq_context(std::vector<std::pair<char, Candidate>> options,
                        std::optional<char> gold = std::nullopt) {
  TaskContext ctx;
  ctx.kind = TaskContext::Kind::mcq_select;
  ctx.key = "s1:0:mcq";
  ctx.options = std::move(options);
  ctx.gold_letter = gold;
  return ctx;
}

ChatRequest dummy_request() {
  ChatRequest req;
  req.messages.push_back({"user", "prompt"});
  return req;
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) {
    path = (std::filesystem::temp_directory_path() / name).string();
  }
  ~TempFile() { std::filesystem::remove(path); }
};

}  // namespace

TEST_CASE("heuristic backend") {
  auto backend = make_backend(BackendSpec{});

  SUBCASE("mcq reply picks the highest ps with the fixed rationale") {
    auto ctx = mcq_context({{'A', cand("one", 0.3)}, {'B', cand("two", 0.9)}, {'C', cand("three", 0.5)}});
    CHECK(backend->complete(dummy_request(), ctx) ==
          "<think>fallback: highest phonetic score</think> <answer>B: two</answer>");
  }

  SUBCASE("gec reply splices the selection into h1") {
    TaskContext ctx;
    ctx.kind = TaskContext::Kind::gec;
    ctx.key = "s1:0:gec";
    ctx.h1 = "play songs by adel";
    ctx.span = EntitySpan{3, 4, "adel"};
    ctx.replacement = "Adele";
    CHECK(backend->complete(dummy_request(), ctx) == "play songs by Adele");
  }

  SUBCASE("gec reply without a selection returns h1") {
    TaskContext ctx;
    ctx.kind = TaskContext::Kind::gec;
    ctx.h1 = "play songs by adel";
    CHECK(backend->complete(dummy_request(), ctx) == "play songs by adel");
  }
}

TEST_CASE("oracle backend") {
  BackendSpec spec;
  spec.kind = BackendKind::oracle;
  auto backend = make_backend(spec);

  SUBCASE("selects the gold letter") {
    auto ctx = mcq_context({{'A', cand("one", 0.9)}, {'B', cand("two", 0.8)}, {'C', cand("three", 0.7)}},
                           'C');
    std::string reply = backend->complete(dummy_request(), ctx);
    CHECK(reply.find("<answer>C: three</answer>") != std::string::npos);
  }

  SUBCASE("gec returns the reference") {
    TaskContext ctx;
    ctx.kind = TaskContext::Kind::gec;
    ctx.reference = "the ground truth";
    CHECK(backend->complete(dummy_request(), ctx) == "the ground truth");
  }

  SUBCASE("missing gold is an error") {
    auto ctx = mcq_context({{'A', cand("one", 0.9)}});
    CHECK_THROWS_AS(backend->complete(dummy_request(), ctx), BackendError);
  }
}

TEST_CASE("scripted backend") {
  TempFile file("necorr_transcript.jsonl");
  write_transcript(file.path, {{"s1:0:mcq", "<think>x</think> <answer>A: one</answer>"},
                               {"s1:0:gec", "corrected text"}});
  BackendSpec spec;
  spec.kind = BackendKind::scripted;
  spec.transcript_path = file.path;
  auto backend = make_backend(spec);

  SUBCASE("replays recorded replies deterministically") {
    auto ctx = mcq_context({{'A', cand("one", 0.9)}});
    std::string first = backend->complete(dummy_request(), ctx);
    std::string second = backend->complete(dummy_request(), ctx);
    CHECK(first == "<think>x</think> <answer>A: one</answer>");
    CHECK(first == second);
  }

  SUBCASE("missing key is an error naming the key") {
    TaskContext ctx;
    ctx.kind = TaskContext::Kind::gec;
    ctx.key = "unknown:7:gec";
    CHECK_THROWS_WITH_AS(backend->complete(dummy_request(), ctx),
                         doctest::Contains("unknown:7:gec"), BackendError);
  }

  SUBCASE("missing transcript file is an error") {
    BackendSpec bad;
    bad.kind = BackendKind::scripted;
    bad.transcript_path = "/nonexistent/path.jsonl";
    CHECK_THROWS_AS(make_backend(bad), BackendError);
  }
}

TEST_CASE("local backend mcq replies always parse") {
  SeededRng rng(31337);
  auto heuristic = make_backend(BackendSpec{});
  BackendSpec ospec;
  ospec.kind = BackendKind::oracle;
  auto oracle = make_backend(ospec);

  for (int trial = 0; trial < 50; ++trial) {
    size_t n = 1 + rng.below(8);
    std::vector<Candidate> cands;
    for (size_t i = 0; i < n; ++i)
      cands.push_back(cand("opt" + std::to_string(i), rng.unit()));
    McqItem mcq = build_mcq("find [BLANK] now", cands);
    mcq.gold_letter = static_cast<char>('A' + rng.below(n));

    auto ctx = mcq_context(mcq.options, mcq.gold_letter);
    for (const LlmBackend* backend : {heuristic.get(), oracle.get()}) {
      RationaleAnswer answer = parse_rationale_answer(backend->complete(dummy_request(), ctx), mcq);
      CHECK(!answer.entity.empty());
    }
    ctx.kind = TaskContext::Kind::rationale_synth;
    RationaleAnswer synth = parse_rationale_answer(oracle->complete(dummy_request(), ctx), mcq);
    CHECK(synth.letter == *mcq.gold_letter);
  }
}

TEST_CASE("http backend") {
  httplib::Server server;
  std::atomic<int> hits{0};
  std::atomic<int> fail_first{0};
  nlohmann::json last_body;
  std::string last_auth;

  server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    ++hits;
    last_body = nlohmann::json::parse(req.body);
    last_auth = req.get_header_value("Authorization");
    if (fail_first.load() > 0) {
      --fail_first;
      res.status = 503;
      return;
    }
    nlohmann::json reply = {
        {"choices", {{{"message", {{"role", "assistant"}, {"content", "hello there"}}}}}}};
    res.set_content(reply.dump(), "application/json");
  });
  server.Post("/auth-fail", [&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 401;
  });
  server.Post("/rate-limit", [&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    if (hits.load() < 2) {
      res.status = 429;
      return;
    }
    nlohmann::json reply = {
        {"choices", {{{"message", {{"role", "assistant"}, {"content", "after backoff"}}}}}}};
    res.set_content(reply.dump(), "application/json");
  });
  server.Post("/garbage", [&](const httplib::Request&, httplib::Response& res) {
    res.set_content("not json", "text/plain");
  });

  int port = server.bind_to_any_port("127.0.0.1");
  std::thread server_thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  const std::string base = "http://127.0.0.1:" + std::to_string(port);

  BackendSpec spec;
  spec.kind = BackendKind::http;
  spec.endpoint = base + "/v1/chat/completions";
  spec.model = "test-model";
  spec.backoff_base_ms = 1;
  spec.max_attempts = 3;
  spec.credential_env = "NECORR_TEST_KEY";

  TaskContext ctx;
  ctx.kind = TaskContext::Kind::gec;
  ctx.key = "s:0:gec";

  SUBCASE("sends the chat-completions wire format") {
    setenv("NECORR_TEST_KEY", "sk-test", 1);
    auto backend = make_backend(spec);
    ChatRequest req;
    req.messages.push_back({"system", "be brief"});
    req.messages.push_back({"user", "fix this"});
    req.temperature = 0.0;
    req.max_tokens = 64;
    CHECK(backend->complete(req, ctx) == "hello there");
    CHECK(last_body["model"] == "test-model");
    CHECK(last_body["messages"].size() == 2);
    CHECK(last_body["messages"][1]["content"] == "fix this");
    CHECK(last_body["temperature"] == 0.0);
    CHECK(last_body["max_tokens"] == 64);
    CHECK(last_auth == "Bearer sk-test");
    unsetenv("NECORR_TEST_KEY");
  }

  SUBCASE("retries 5xx with backoff then succeeds") {
    hits = 0;
    fail_first = 2;
    auto backend = make_backend(spec);
    CHECK(backend->complete(dummy_request(), ctx) == "hello there");
    CHECK(hits.load() == 3);
  }

  SUBCASE("gives up after the attempt cap") {
    hits = 0;
    fail_first = 100;
    auto backend = make_backend(spec);
    CHECK_THROWS_AS(backend->complete(dummy_request(), ctx), TransportError);
    CHECK(hits.load() == 3);
  }

  SUBCASE("never retries a 4xx auth failure") {
    hits = 0;
    BackendSpec auth = spec;
    auth.endpoint = base + "/auth-fail";
    auto backend = make_backend(auth);
    CHECK_THROWS_WITH_AS(backend->complete(dummy_request(), ctx), doctest::Contains("401"),
                         TransportError);
    CHECK(hits.load() == 1);
  }

  SUBCASE("retries 429 rate limits") {
    hits = 0;
    BackendSpec rl = spec;
    rl.endpoint = base + "/rate-limit";
    auto backend = make_backend(rl);
    CHECK(backend->complete(dummy_request(), ctx) == "after backoff");
    CHECK(hits.load() == 2);
  }

  SUBCASE("malformed body is a transport error") {
    BackendSpec bad = spec;
    bad.endpoint = base + "/garbage";
    auto backend = make_backend(bad);
    CHECK_THROWS_WITH_AS(backend->complete(dummy_request(), ctx),
                         doctest::Contains("malformed"), TransportError);
  }

  server.stop();
  server_thread.join();
}
