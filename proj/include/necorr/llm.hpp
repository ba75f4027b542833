#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "necorr/ne_index.hpp"
#include "necorr/tagging.hpp"

namespace necorr {

struct ChatMessage {
  std::string role;  // system | user | assistant
  std::string content;
};

struct ChatRequest {
  std::vector<ChatMessage> messages;  // at least one user message
  double temperature = 0.0;
  int max_tokens = 1024;
};

enum class BackendKind { http, oracle, scripted, heuristic };

struct BackendSpec {
  BackendKind kind = BackendKind::heuristic;
  // http
  std::string endpoint;
  std::string model;
  std::string credential_env = "NECORR_API_KEY";
  int max_attempts = 3;
  int backoff_base_ms = 250;
  int timeout_ms = 60000;
  int max_in_flight = 4;
  // scripted
  std::string transcript_path;
};

BackendKind parse_backend_kind(const std::string& name);

/// Structured task payload passed alongside every completion request. The
/// deterministic local backends act on this instead of parsing the prompt;
/// the http backend ignores it apart from logging keys.
struct TaskContext {
  enum class Kind { mcq_select, rationale_synth, gec };

  Kind kind = Kind::gec;
  std::string key;  // "{sample-id}:{span-index}:{task}"

  // MCQ-shaped tasks.
  std::vector<std::pair<char, Candidate>> options;
  std::optional<char> gold_letter;  // evaluation runs only

  // GEC tasks.
  std::string h1;
  std::optional<EntitySpan> span;            // located in h1
  std::optional<std::string> replacement;    // selected entity surface
  std::optional<std::string> reference;      // evaluation runs only
};

/// One generation backend. Implementations are shareable read-only handles;
/// concurrent complete() calls are allowed.
///
///   http      - chat-completions wire protocol with retry + backoff
///   oracle    - consults gold fields in the context (upper-bound runs)
///   scripted  - replays a recorded transcript file keyed by context.key
///   heuristic - argmax-ps option for MCQs, span splice for GEC
class LlmBackend {
public:
  virtual ~LlmBackend() = default;
  virtual std::string complete(const ChatRequest& request, const TaskContext& context) const = 0;
};

std::unique_ptr<LlmBackend> make_backend(const BackendSpec& spec);

/// The heuristic backend's MCQ reply for a given option list; exposed so
/// fallback paths produce identical strings.
std::string heuristic_mcq_reply(const std::vector<std::pair<char, Candidate>>& options);

/// Scripted transcript file entry: JSONL {"key": str, "reply": str}.
void write_transcript(const std::string& path,
                      const std::vector<std::pair<std::string, std::string>>& entries);

}  // namespace necorr
