#include "necorr/llm.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <thread>
#include <unordered_map>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "inflight_limit.hpp"
#include "necorr/correction.hpp"
#include "necorr/errors.hpp"

namespace necorr {

namespace {

using nlohmann::json;

std::string format_ps(double ps) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%.2f", ps);
  return buf;
}

const std::pair<char, Candidate>* argmax_option(
    const std::vector<std::pair<char, Candidate>>& options) {
  const std::pair<char, Candidate>* best = nullptr;
  for (const auto& opt : options) {
    if (!best || opt.second.ps > best->second.ps ||
        (opt.second.ps == best->second.ps && opt.second.record.surface < best->second.record.surface))
      best = &opt;
  }
  return best;
}

class HeuristicBackend : public LlmBackend {
public:
  std::string complete(const ChatRequest&, const TaskContext& ctx) const override {
    switch (ctx.kind) {
      case TaskContext::Kind::mcq_select:
      case TaskContext::Kind::rationale_synth:
        return heuristic_mcq_reply(ctx.options);
      case TaskContext::Kind::gec:
        if (ctx.span && ctx.replacement) return splice_correct(ctx.h1, *ctx.span, *ctx.replacement);
        return ctx.h1;
    }
    throw BackendError("heuristic backend: unknown task kind");
  }
};

class OracleBackend : public LlmBackend {
public:
  std::string complete(const ChatRequest&, const TaskContext& ctx) const override {
    switch (ctx.kind) {
      case TaskContext::Kind::mcq_select:
      case TaskContext::Kind::rationale_synth: {
        if (!ctx.gold_letter)
          throw BackendError("oracle backend: context for " + ctx.key + " carries no gold letter");
        for (const auto& [letter, cand] : ctx.options) {
          if (letter == *ctx.gold_letter) {
            std::string reply = "<think>Option " + std::string(1, letter) + " (" +
                                cand.record.surface + ", phonetic score " + format_ps(cand.ps) +
                                ") matches the reference entity for the blank.</think> <answer>" +
                                std::string(1, letter) + ": " + cand.record.surface + "</answer>";
            return reply;
          }
        }
        throw BackendError("oracle backend: gold letter not among options for " + ctx.key);
      }
      case TaskContext::Kind::gec:
        if (!ctx.reference)
          throw BackendError("oracle backend: context for " + ctx.key + " carries no reference");
        return *ctx.reference;
    }
    throw BackendError("oracle backend: unknown task kind");
  }
};

class ScriptedBackend : public LlmBackend {
public:
  explicit ScriptedBackend(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw BackendError("scripted backend: cannot open transcript " + path);
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      json j;
      try {
        j = json::parse(line);
      } catch (const json::exception& e) {
        throw BackendError("scripted backend: " + path + " line " + std::to_string(line_no) +
                           ": " + e.what());
      }
      if (!j.contains("key") || !j.contains("reply"))
        throw BackendError("scripted backend: " + path + " line " + std::to_string(line_no) +
                           ": entries need \"key\" and \"reply\"");
      replies_[j["key"].get<std::string>()] = j["reply"].get<std::string>();
    }
    path_ = path;
  }

  std::string complete(const ChatRequest&, const TaskContext& ctx) const override {
    auto it = replies_.find(ctx.key);
    if (it == replies_.end())
      throw BackendError("scripted backend: no transcript entry for key '" + ctx.key + "' in " +
                         path_);
    return it->second;
  }

private:
  std::unordered_map<std::string, std::string> replies_;
  std::string path_;
};

class HttpBackend : public LlmBackend {
public:
  explicit HttpBackend(BackendSpec spec) : spec_(std::move(spec)) {
    if (spec_.endpoint.empty()) throw DataError("http backend: endpoint required");
    auto scheme_end = spec_.endpoint.find("://");
    if (scheme_end == std::string::npos)
      throw DataError("http backend: endpoint must be a full URL: " + spec_.endpoint);
    auto path_start = spec_.endpoint.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
      host_ = spec_.endpoint;
      path_ = "/v1/chat/completions";
    } else {
      host_ = spec_.endpoint.substr(0, path_start);
      path_ = spec_.endpoint.substr(path_start);
    }
    if (const char* key = std::getenv(spec_.credential_env.c_str())) api_key_ = key;
    in_flight_ = std::make_unique<detail::InFlightLimit>(spec_.max_in_flight);
  }

  std::string complete(const ChatRequest& request, const TaskContext& ctx) const override {
    detail::InFlightLimit::Guard guard(*in_flight_);
    json body;
    body["model"] = spec_.model;
    body["messages"] = json::array();
    for (const auto& m : request.messages)
      body["messages"].push_back({{"role", m.role}, {"content", m.content}});
    body["temperature"] = request.temperature;
    body["max_tokens"] = request.max_tokens;
    const std::string payload = body.dump();

    std::string last_error;
    for (int attempt = 0; attempt < spec_.max_attempts; ++attempt) {
      if (attempt > 0) {
        auto delay = std::chrono::milliseconds(spec_.backoff_base_ms) * (1 << (attempt - 1));
        std::this_thread::sleep_for(delay);
      }
      httplib::Client client(host_);
      client.set_connection_timeout(spec_.timeout_ms / 1000, (spec_.timeout_ms % 1000) * 1000);
      client.set_read_timeout(spec_.timeout_ms / 1000, (spec_.timeout_ms % 1000) * 1000);
      httplib::Headers headers;
      if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

      auto res = client.Post(path_, headers, payload, "application/json");
      if (!res) {
        last_error = "transport failure: " + httplib::to_string(res.error());
        continue;  // connection errors and timeouts are retried up to the cap
      }
      if (res->status == 429 || res->status >= 500) {
        last_error = "status " + std::to_string(res->status);
        continue;
      }
      if (res->status < 200 || res->status >= 300) {
        // Other 4xx (auth, bad request) will not improve on retry: fail fast.
        throw TransportError("http backend: " + spec_.endpoint + " returned status " +
                             std::to_string(res->status) + " for " + ctx.key);
      }
      return extract_content(res->body, ctx);
    }
    throw TransportError("http backend: " + spec_.endpoint + " failed after " +
                         std::to_string(spec_.max_attempts) + " attempts (" + last_error +
                         ") for " + ctx.key);
  }

private:
  std::string extract_content(const std::string& body, const TaskContext& ctx) const {
    json j;
    try {
      j = json::parse(body);
    } catch (const json::exception& e) {
      throw TransportError("http backend: malformed response body for " + ctx.key + ": " +
                           e.what());
    }
    if (!j.contains("choices") || !j["choices"].is_array() || j["choices"].empty() ||
        !j["choices"][0].contains("message") || !j["choices"][0]["message"].contains("content"))
      throw TransportError("http backend: response for " + ctx.key +
                           " lacks choices[0].message.content");
    return j["choices"][0]["message"]["content"].get<std::string>();
  }

  BackendSpec spec_;
  std::string host_;
  std::string path_;
  std::string api_key_;
  std::unique_ptr<detail::InFlightLimit> in_flight_;
};

}  // namespace

BackendKind parse_backend_kind(const std::string& name) {
  if (name == "http") return BackendKind::http;
  if (name == "oracle") return BackendKind::oracle;
  if (name == "scripted") return BackendKind::scripted;
  if (name == "heuristic") return BackendKind::heuristic;
  throw DataError("unknown backend kind '" + name + "' (expected http|oracle|scripted|heuristic)");
}

std::string heuristic_mcq_reply(const std::vector<std::pair<char, Candidate>>& options) {
  const auto* best = argmax_option(options);
  if (!best) throw BackendError("heuristic backend: MCQ context has no options");
  return "<think>fallback: highest phonetic score</think> <answer>" + std::string(1, best->first) +
         ": " + best->second.record.surface + "</answer>";
}

std::unique_ptr<LlmBackend> make_backend(const BackendSpec& spec) {
  switch (spec.kind) {
    case BackendKind::heuristic:
      return std::make_unique<HeuristicBackend>();
    case BackendKind::oracle:
      return std::make_unique<OracleBackend>();
    case BackendKind::scripted:
      return std::make_unique<ScriptedBackend>(spec.transcript_path);
    case BackendKind::http:
      return std::make_unique<HttpBackend>(spec);
  }
  throw DataError("unknown backend kind");
}

void write_transcript(const std::string& path,
                      const std::vector<std::pair<std::string, std::string>>& entries) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("transcript: cannot write " + path);
  for (const auto& [key, reply] : entries) {
    nlohmann::ordered_json j;
    j["key"] = key;
    j["reply"] = reply;
    out << j.dump() << '\n';
  }
}

}  // namespace necorr
