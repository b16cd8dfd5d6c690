#include "stancegraph/llm/gateway.hpp"

#include <algorithm>
#include <cstdio>
#include <thread>

#include "stancegraph/core/digest.hpp"
#include "stancegraph/core/json_io.hpp"

namespace stancegraph::llm {
namespace {

json to_record_json(const CompletionRecord& r) {
  return json{{"digest", r.digest},
              {"template", r.template_name},
              {"response", r.response},
              {"provider", r.provider_id},
              {"latency_ms", r.latency_ms},
              {"attempts", r.attempts},
              {"context_truncated", r.context_truncated}};
}

CompletionRecord from_record_json(const json& j) {
  CompletionRecord r;
  r.digest = j.at("digest").get<std::string>();
  r.template_name = j.value("template", "");
  r.response = j.at("response").get<std::string>();
  r.provider_id = j.value("provider", "");
  r.latency_ms = j.value("latency_ms", 0.0);
  r.attempts = j.value("attempts", 1);
  r.context_truncated = j.value("context_truncated", false);
  return r;
}

/// Tracks the in-flight count for the lifetime of one provider call.
class InFlight {
 public:
  InFlight(std::counting_semaphore<>& slots, std::atomic<std::size_t>& current, std::atomic<std::size_t>& peak)
      : slots_(slots), current_(current) {
    slots_.acquire();
    const std::size_t now = ++current_;
    std::size_t prev = peak.load();
    while (prev < now && !peak.compare_exchange_weak(prev, now)) {
    }
  }
  ~InFlight() {
    --current_;
    slots_.release();
  }
  InFlight(const InFlight&) = delete;
  InFlight& operator=(const InFlight&) = delete;

 private:
  std::counting_semaphore<>& slots_;
  std::atomic<std::size_t>& current_;
};

}  // namespace

std::string request_digest(const CompletionRequest& request) {
  char params[96];
  std::snprintf(params, sizeof params, "temperature=%.17g\nmax_tokens=%d\nattempt=%d\n", request.params.temperature,
                request.params.max_tokens, request.params.attempt);
  std::string key = "stancegraph-completion/v1\n";
  key += params;
  key += "--system--\n";
  key += request.prompt.system;
  key += "\n--user--\n";
  key += request.prompt.user;
  return sha256_hex(key);
}

std::shared_ptr<ReplayArchive> ReplayArchive::open(const std::filesystem::path& path) {
  auto archive = std::make_shared<ReplayArchive>();
  archive->path_ = path;
  if (std::ifstream in(path, std::ios::binary); in) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      try {
        auto record = from_record_json(json::parse(line));
        if (archive->by_digest_.emplace(record.digest, record).second) archive->order_.push_back(record.digest);
      } catch (const std::exception& e) {
        throw Error("replay archive '" + path.string() + "' line " + std::to_string(line_no) + ": " + e.what());
      }
    }
  }
  return archive;
}

std::optional<std::string> ReplayArchive::find(const std::string& digest) const {
  std::lock_guard lock(mutex_);
  auto it = by_digest_.find(digest);
  if (it == by_digest_.end()) return std::nullopt;
  return it->second.response;
}

bool ReplayArchive::append(const CompletionRecord& record) {
  std::lock_guard lock(mutex_);
  if (!by_digest_.emplace(record.digest, record).second) return false;
  order_.push_back(record.digest);
  if (path_) {
    if (!sink_.is_open()) {
      if (path_->has_parent_path()) std::filesystem::create_directories(path_->parent_path());
      sink_.open(*path_, std::ios::binary | std::ios::app);
      if (!sink_) throw Error("cannot append to replay archive '" + path_->string() + "'");
    }
    sink_ << to_record_json(record).dump() << '\n';
    sink_.flush();
  }
  return true;
}

std::size_t ReplayArchive::size() const {
  std::lock_guard lock(mutex_);
  return by_digest_.size();
}

std::vector<CompletionRecord> ReplayArchive::records() const {
  std::lock_guard lock(mutex_);
  std::vector<CompletionRecord> out;
  for (const auto& d : order_) out.push_back(by_digest_.at(d));
  return out;
}

std::string_view to_string(LlmMode mode) {
  switch (mode) {
    case LlmMode::live: return "live";
    case LlmMode::record: return "record";
    case LlmMode::replay: return "replay";
  }
  return "?";
}

LlmMode parse_llm_mode(std::string_view s) {
  if (s == "live") return LlmMode::live;
  if (s == "record") return LlmMode::record;
  if (s == "replay") return LlmMode::replay;
  throw ValidationError("llm mode must be live, record or replay, got '" + std::string(s) + "'");
}

LlmGateway::LlmGateway(GatewayOptions options, TemplateLibrary templates, std::shared_ptr<CompletionProvider> provider,
                       std::shared_ptr<ReplayArchive> archive)
    : options_(options),
      templates_(std::move(templates)),
      provider_(std::move(provider)),
      archive_(std::move(archive)),
      slots_(static_cast<std::ptrdiff_t>(std::max<std::size_t>(1, options.parallelism))) {
  if (options_.max_attempts < 1) throw ValidationError("max_attempts must be at least 1");
  if (options_.mode != LlmMode::live && !archive_) throw ValidationError("record and replay modes need an archive");
  if (options_.mode != LlmMode::replay && !provider_) throw ValidationError("live and record modes need a provider");
}

CompletionRequest LlmGateway::prepare(TemplateName name, const Variables& variables, DecodingParams params) const {
  return CompletionRequest{name, templates_.render(name, variables), params, false};
}

std::string LlmGateway::complete(const CompletionRequest& request) {
  ++calls_;
  const std::string digest = request_digest(request);
  if (options_.mode == LlmMode::replay) {
    if (auto hit = archive_->find(digest)) {
      ++replay_hits_;
      return *hit;
    }
    throw ReplayMissError(digest);
  }
  if (options_.mode == LlmMode::record) {
    if (auto hit = archive_->find(digest)) {
      ++replay_hits_;
      return *hit;
    }
  }
  return call_provider(request, digest);
}

std::string LlmGateway::call_provider(const CompletionRequest& request, const std::string& digest) {
  auto backoff = options_.base_backoff;
  for (int attempt = 1;; ++attempt) {
    const auto start = std::chrono::steady_clock::now();
    try {
      std::string response;
      {
        InFlight guard(slots_, in_flight_, max_in_flight_);
        ++provider_calls_;
        response = provider_->complete(request);
      }
      if (options_.mode == LlmMode::record) {
        const std::chrono::duration<double, std::milli> latency = std::chrono::steady_clock::now() - start;
        archive_->append(CompletionRecord{digest, std::string(to_string(request.template_name)), response,
                                          provider_->id(), latency.count(), attempt, request.context_truncated});
      }
      return response;
    } catch (const TransportError& e) {
      if (!e.retryable() || attempt >= options_.max_attempts) {
        throw TransportError(std::string(e.what()) + " (after " + std::to_string(attempt) + " attempt" +
                                 (attempt == 1 ? "" : "s") + ")",
                             e.retryable());
      }
      ++retries_;
      std::this_thread::sleep_for(backoff);
      backoff = std::min(backoff * 2, options_.max_backoff);
    }
  }
}

GatewayStats LlmGateway::stats() const {
  return {calls_.load(), provider_calls_.load(), retries_.load(), replay_hits_.load(), max_in_flight_.load()};
}

OpenAiProviderOptions provider_options_from_env() {
  OpenAiProviderOptions o;
  if (const char* v = std::getenv("STANCEGRAPH_LLM_ENDPOINT")) o.endpoint = v;
  if (const char* v = std::getenv("STANCEGRAPH_LLM_API_KEY")) o.api_key = v;
  if (const char* v = std::getenv("STANCEGRAPH_LLM_MODEL")) o.model = v;
  return o;
}

}  // namespace stancegraph::llm
