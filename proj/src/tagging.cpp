#include "necorr/tagging.hpp"

#include <algorithm>
#include <cctype>
#include <condition_variable>
#include <fstream>
#include <mutex>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "inflight_limit.hpp"
#include "necorr/errors.hpp"

namespace necorr {

namespace {

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

std::vector<std::string> whitespace_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    size_t start = pos;
    while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos > start) tokens.emplace_back(text.substr(start, pos - start));
  }
  return tokens;
}

std::string join(const std::vector<std::string>& words, size_t begin, size_t end) {
  std::string out;
  for (size_t i = begin; i < end; ++i) {
    if (i > begin) out += ' ';
    out += words[i];
  }
  return out;
}

}  // namespace

GazetteerTagger::GazetteerTagger(const std::vector<std::string>& surfaces) {
  for (const auto& s : surfaces) {
    auto words = whitespace_tokens(lower_ascii(s));
    if (words.empty()) continue;
    max_words_ = std::max(max_words_, words.size());
    phrases_.insert(join(words, 0, words.size()));
  }
}

GazetteerTagger GazetteerTagger::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("tagger surfaces: cannot open " + path);
  std::vector<std::string> surfaces;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) surfaces.push_back(line);
  }
  return GazetteerTagger(surfaces);
}

std::vector<EntitySpan> GazetteerTagger::tag(std::string_view text) const {
  std::vector<EntitySpan> spans;
  auto words = whitespace_tokens(text);
  std::vector<std::string> lowered;
  lowered.reserve(words.size());
  for (const auto& w : words) lowered.push_back(lower_ascii(w));

  size_t i = 0;
  while (i < words.size()) {
    size_t longest = 0;
    size_t limit = std::min(max_words_, words.size() - i);
    for (size_t len = limit; len >= 1; --len) {
      if (phrases_.count(join(lowered, i, i + len))) {
        longest = len;
        break;
      }
    }
    if (longest == 0) {
      ++i;
      continue;
    }
    spans.push_back({static_cast<int>(i), static_cast<int>(i + longest),
                     join(words, i, i + longest)});
    i += longest;
  }
  return spans;
}

struct RemoteTagger::Impl {
  Options options;
  std::string host;
  std::string path;
  mutable detail::InFlightLimit limit{4};

  explicit Impl(Options opts) : options(std::move(opts)), limit(options.max_in_flight) {
    // Split "http://host:port/path" into client base and request path.
    std::string url = options.endpoint;
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
      throw DataError("remote tagger: endpoint must be an http URL: " + url);
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
      host = url;
      path = "/";
    } else {
      host = url.substr(0, path_start);
      path = url.substr(path_start);
    }
  }
};

RemoteTagger::RemoteTagger(Options options) : impl_(std::make_unique<Impl>(std::move(options))) {}
RemoteTagger::~RemoteTagger() = default;

std::vector<EntitySpan> RemoteTagger::tag(std::string_view text) const {
  nlohmann::json body;
  body["text"] = std::string(text);
  body["labels"] = impl_->options.labels;

  detail::InFlightLimit::Guard guard(impl_->limit);

  httplib::Client client(impl_->host);
  client.set_connection_timeout(0, impl_->options.timeout_ms * 1000);
  client.set_read_timeout(impl_->options.timeout_ms / 1000,
                          (impl_->options.timeout_ms % 1000) * 1000);
  auto res = client.Post(impl_->path, body.dump(), "application/json");
  if (!res)
    throw TransportError("remote tagger: request to " + impl_->options.endpoint +
                         " failed: " + httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300)
    throw TransportError("remote tagger: " + impl_->options.endpoint + " returned status " +
                         std::to_string(res->status));

  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw TransportError("remote tagger: " + impl_->options.endpoint +
                         " returned malformed JSON: " + e.what());
  }
  if (!reply.contains("entities") || !reply["entities"].is_array())
    throw TransportError("remote tagger: " + impl_->options.endpoint +
                         " reply lacks an \"entities\" array");

  std::vector<EntitySpan> spans;
  for (const auto& ent : reply["entities"]) {
    EntitySpan span;
    span.start_word = ent.value("start_word", 0);
    span.end_word = ent.value("end_word", 0);
    span.surface = ent.value("surface", std::string());
    spans.push_back(std::move(span));
  }
  std::sort(spans.begin(), spans.end(),
            [](const EntitySpan& a, const EntitySpan& b) { return a.start_word < b.start_word; });
  return spans;
}

}  // namespace necorr
