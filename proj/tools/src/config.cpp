#include "bargain/cli/config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "bargain/error.hpp"
#include "bargain/hash.hpp"

namespace bargain::cli {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& why) {
  throw Error(Errc::ConfigError, path + ": " + why);
}

std::string join_path(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, _] : obj.items()) {
    if (key != "api_key_env" && key.find("api_key") != std::string::npos) {
      fail(join_path(path, key), "secrets are not accepted in config files; name an environment "
                                 "variable with api_key_env instead");
    }
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) fail(join_path(path, key), "unknown field");
  }
}

const json* find(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

template <typename T>
T number(const json& obj, const char* key, const std::string& path, T fallback) {
  const auto* v = find(obj, key);
  if (!v) return fallback;
  const auto where = join_path(path, key);
  if constexpr (std::is_floating_point_v<T>) {
    if (!v->is_number()) fail(where, "expected a number");
    return v->get<T>();
  } else if constexpr (std::is_unsigned_v<T>) {
    if (!v->is_number_unsigned()) fail(where, "expected a non-negative integer");
    return v->get<T>();
  } else {
    if (!v->is_number_integer()) fail(where, "expected an integer");
    const auto wide = v->get<long long>();
    if (wide < std::numeric_limits<T>::min() || wide > std::numeric_limits<T>::max()) {
      fail(where, "integer out of range");
    }
    return static_cast<T>(wide);
  }
}

bool boolean(const json& obj, const char* key, const std::string& path, bool fallback) {
  const auto* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_boolean()) fail(join_path(path, key), "expected true or false");
  return v->get<bool>();
}

std::string text(const json& obj, const char* key, const std::string& path,
                 std::optional<std::string> fallback = std::nullopt) {
  const auto* v = find(obj, key);
  if (!v) {
    if (!fallback) fail(join_path(path, key), "required field is missing");
    return *fallback;
  }
  if (!v->is_string()) fail(join_path(path, key), "expected a string");
  return v->get<std::string>();
}

// Re-raises an object validator's error under the field path.
template <typename F>
void validated(const std::string& path, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    if (e.code() == Errc::ConfigError) throw;
    fail(path, e.what());
  }
}

RoundConfig parse_round(const json& doc) {
  RoundConfig r;
  const auto* node = find(doc, "round");
  if (!node) return r;
  const std::string path = "round";
  if (!node->is_object()) fail(path, "expected an object");
  reject_unknown(*node, path,
                 {"item_name", "currency_name", "seller_cost", "buyer_limit", "win_baseline",
                  "max_turns", "price_min", "price_max"});
  r.item_name = text(*node, "item_name", path, r.item_name);
  r.currency_name = text(*node, "currency_name", path, r.currency_name);
  r.seller_cost = number(*node, "seller_cost", path, r.seller_cost);
  r.buyer_limit = number(*node, "buyer_limit", path, r.buyer_limit);
  r.win_baseline = number(*node, "win_baseline", path, r.win_baseline);
  r.max_turns = number(*node, "max_turns", path, r.max_turns);
  r.price_min = number(*node, "price_min", path, r.price_min);
  r.price_max = number(*node, "price_max", path, r.price_max);
  validated(path, [&] { r.validate(); });
  return r;
}

AgentDescriptor parse_model(const json& node, const std::string& path) {
  if (!node.is_object()) fail(path, "expected an object");
  AgentDescriptor a;
  a.label = text(node, "label", path);
  const auto kind = text(node, "kind", path, "scripted");
  if (kind == "scripted") {
    reject_unknown(node, path, {"label", "kind", "anchor_offset", "jitter"});
    a.kind = AgentDescriptor::Kind::Scripted;
    a.variant.anchor_offset = number(node, "anchor_offset", path, 0);
    a.variant.jitter = number(node, "jitter", path, a.variant.jitter);
  } else if (kind == "llm") {
    reject_unknown(node, path,
                   {"label", "kind", "base_url", "model_id", "api_key_env", "temperature",
                    "max_reply_tokens", "timeout_ms", "rate_limit_per_minute", "retry_budget",
                    "persona_mode"});
    a.kind = AgentDescriptor::Kind::Llm;
    ModelEndpoint ep;
    ep.base_url = text(node, "base_url", path, ep.base_url);
    ep.model_id = text(node, "model_id", path);
    ep.api_key_env = text(node, "api_key_env", path, "");
    ep.temperature = number(node, "temperature", path, ep.temperature);
    ep.max_reply_tokens = number(node, "max_reply_tokens", path, ep.max_reply_tokens);
    ep.timeout = std::chrono::milliseconds(
        number<long long>(node, "timeout_ms", path, ep.timeout.count()));
    ep.rate_limit_per_minute = number(node, "rate_limit_per_minute", path, ep.rate_limit_per_minute);
    a.endpoint = ep;
    a.retry_budget = number(node, "retry_budget", path, a.retry_budget);
    const auto mode_text = text(node, "persona_mode", path, "all");
    const auto mode = parse_prompt_mode(mode_text);
    if (!mode) fail(join_path(path, "persona_mode"), "expected \"all\" or \"rotate\"");
    a.persona_mode = *mode;
  } else {
    fail(join_path(path, "kind"), "expected \"scripted\" or \"llm\", found \"" + kind + "\"");
  }
  validated(path, [&] { a.validate(); });
  return a;
}

std::vector<Persona> parse_personas(const json& doc) {
  const auto* node = find(doc, "personas");
  if (!node || (node->is_string() && node->get<std::string>() == "all")) {
    return {kAllPersonas.begin(), kAllPersonas.end()};
  }
  if (!node->is_array()) fail("personas", "expected \"all\" or a list of persona names");
  if (node->empty()) fail("personas", "list is empty");
  std::vector<Persona> out;
  std::set<Persona> seen;
  for (std::size_t i = 0; i < node->size(); ++i) {
    const auto path = "personas[" + std::to_string(i) + "]";
    const auto& item = (*node)[i];
    if (!item.is_string()) fail(path, "expected a persona name");
    const auto name = item.get<std::string>();
    const auto p = parse_persona(name);
    if (!p) {
      std::string known;
      for (auto k : kAllPersonas) known += (known.empty() ? "" : ", ") + std::string(to_string(k));
      fail(path, "unknown persona \"" + name + "\" (known: " + known + ")");
    }
    if (!seen.insert(*p).second) fail(path, "duplicate persona \"" + name + "\"");
    out.push_back(*p);
  }
  return out;
}

}  // namespace

RunConfig parse_run_config(std::string_view input) {
  json doc;
  try {
    doc = json::parse(input, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw Error(Errc::ConfigError, std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("(root)", "expected an object");
  reject_unknown(doc, "",
                 {"output_dir", "seed", "repetitions", "parallelism", "personas", "persona_dir",
                  "round", "models", "gateway", "analysis"});

  RunConfig c;
  c.output_dir = text(doc, "output_dir", "");
  if (c.output_dir.empty()) fail("output_dir", "must not be empty");
  c.seed = number<std::uint64_t>(doc, "seed", "", 0);
  c.repetitions = number(doc, "repetitions", "", 1);
  if (c.repetitions < 1) fail("repetitions", "must be >= 1");
  c.parallelism = number(doc, "parallelism", "", 1);
  if (c.parallelism < 1) fail("parallelism", "must be >= 1");
  if (find(doc, "persona_dir")) c.persona_dir = text(doc, "persona_dir", "");
  c.personas = parse_personas(doc);
  c.round = parse_round(doc);

  const auto* models = find(doc, "models");
  if (!models) fail("models", "required field is missing");
  if (!models->is_array() || models->empty()) fail("models", "expected a non-empty list");
  std::set<std::string> labels;
  for (std::size_t i = 0; i < models->size(); ++i) {
    const auto path = "models[" + std::to_string(i) + "]";
    auto a = parse_model((*models)[i], path);
    if (!labels.insert(a.label).second) fail(path + ".label", "duplicate label \"" + a.label + "\"");
    c.models.push_back(std::move(a));
  }

  if (const auto* g = find(doc, "gateway")) {
    if (!g->is_object()) fail("gateway", "expected an object");
    reject_unknown(*g, "gateway",
                   {"max_attempts", "initial_backoff_ms", "backoff_multiplier", "max_backoff_ms",
                    "log"});
    c.retry.max_attempts = number(*g, "max_attempts", "gateway", c.retry.max_attempts);
    if (c.retry.max_attempts < 1) fail("gateway.max_attempts", "must be >= 1");
    c.retry.initial_backoff = std::chrono::milliseconds(
        number<long long>(*g, "initial_backoff_ms", "gateway", c.retry.initial_backoff.count()));
    c.retry.multiplier = number(*g, "backoff_multiplier", "gateway", c.retry.multiplier);
    if (!(c.retry.multiplier >= 1.0)) fail("gateway.backoff_multiplier", "must be >= 1");
    c.retry.max_backoff = std::chrono::milliseconds(
        number<long long>(*g, "max_backoff_ms", "gateway", c.retry.max_backoff.count()));
    c.gateway_log = text(*g, "log", "gateway", c.gateway_log);
  }

  if (const auto* a = find(doc, "analysis")) {
    if (!a->is_object()) fail("analysis", "expected an object");
    reject_unknown(*a, "analysis",
                   {"enabled", "attribution", "n_trees", "max_depth", "learning_rate",
                    "min_samples_leaf"});
    c.analyze = boolean(*a, "enabled", "analysis", true);
    auto& o = c.analysis;
    o.attribution = boolean(*a, "attribution", "analysis", true);
    o.gbt.n_trees = number(*a, "n_trees", "analysis", o.gbt.n_trees);
    o.gbt.max_depth = number(*a, "max_depth", "analysis", o.gbt.max_depth);
    o.gbt.learning_rate = number(*a, "learning_rate", "analysis", o.gbt.learning_rate);
    o.gbt.min_samples_leaf = number(*a, "min_samples_leaf", "analysis", o.gbt.min_samples_leaf);
    validated("analysis", [&] { o.gbt.validate(); });
  }

  c.fingerprint = to_hex(fnv1a64(doc.dump()));
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::ConfigError, "cannot read config file " + path.string());
  const std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_run_config(body);
}

void ensure_writable_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(Errc::ConfigError, "output_dir: cannot create " + dir.string() + ": " + ec.message());
  const auto probe = dir / ".write-probe";
  {
    std::ofstream out(probe);
    if (!out) throw Error(Errc::ConfigError, "output_dir: " + dir.string() + " is not writable");
  }
  std::filesystem::remove(probe, ec);
}

}  // namespace bargain::cli
