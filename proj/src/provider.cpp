#include "sld/provider.hpp"

#include <cstdlib>
#include <cstring>
#include <httplib.h>
#include <json.hpp>

#include "sld/text.hpp"

namespace sld::tts {

using json = nlohmann::json;

ProviderConfig ProviderConfig::from_env() {
  ProviderConfig c;
  if (const char* v = std::getenv("SLD_TTS_APIKEY")) c.api_key = v;
  if (const char* v = std::getenv("SLD_TTS_URL")) c.base_url = v;
  if (const char* v = std::getenv("SLD_TTS_VOICE"); v && *v) c.voice_id = v;
  return c;
}

std::string_view RequestSpec::header(std::string_view name) const {
  for (const auto& [k, v] : headers) {
    if (k.size() == name.size() && strncasecmp(k.data(), name.data(), k.size()) == 0) return v;
  }
  return {};
}

std::string request_body(std::string_view text) {
  // Matches the documented curl form {"text": "..."}, including the space after the colon.
  return "{\"text\": " + json(std::string(text)).dump() + "}";
}

std::string decode_request_text(std::string_view body) {
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object() || j.size() != 1 || !j.contains("text") || !j["text"].is_string()) {
    throw ProviderError(ProviderErrorKind::BadRequest, "request body is not {\"text\": <string>}");
  }
  return j["text"].get<std::string>();
}

namespace {

struct UrlParts {
  std::string origin;  // scheme://host[:port]
  std::string host;    // host[:port]
  std::string path;    // may be empty
};

UrlParts split_url(std::string_view url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) throw Error(Errc::InvalidArgument, "URL without scheme: " + std::string(url));
  auto host_begin = scheme_end + 3;
  auto path_begin = url.find('/', host_begin);
  UrlParts p;
  p.origin = std::string(url.substr(0, path_begin));
  p.host = std::string(url.substr(host_begin, path_begin == std::string_view::npos ? std::string_view::npos
                                                                                 : path_begin - host_begin));
  if (path_begin != std::string_view::npos) p.path = std::string(url.substr(path_begin));
  if (p.host.empty()) throw Error(Errc::InvalidArgument, "URL without host: " + std::string(url));
  return p;
}

}  // namespace

RequestSpec build_request(const ProviderConfig& config, std::string_view text) {
  if (config.api_key.empty()) throw Error(Errc::EmptyKey, "no API key configured (SLD_TTS_APIKEY)");
  if (text.empty()) throw Error(Errc::EmptyText, "nothing to synthesize");
  std::string base = config.base_url;
  while (!base.empty() && base.back() == '/') base.pop_back();
  auto parts = split_url(base);

  RequestSpec spec;
  spec.method = "POST";
  spec.target = parts.path + "/v1/synthesize?voice=" + config.voice_id;
  spec.url = parts.origin + spec.target;
  spec.headers = {{"Content-Type", "application/json"}, {"Accept", "audio/wav"}};
  spec.username = std::string(kAuthUser);
  spec.password = config.api_key;
  spec.body = request_body(text);
  return spec;
}

std::string render_request(const RequestSpec& spec) {
  auto parts = split_url(spec.url);
  std::string out;
  out += spec.method + " " + spec.target + " HTTP/1.1\r\n";
  out += "Host: " + parts.host + "\r\n";
  out += "Authorization: Basic " + httplib::detail::base64_encode(spec.username + ":" + spec.password) + "\r\n";
  for (const auto& [k, v] : spec.headers) out += k + ": " + v + "\r\n";
  out += "Content-Length: " + std::to_string(spec.body.size()) + "\r\n\r\n";
  out += spec.body;
  return out;
}

std::string_view provider_error_name(ProviderErrorKind kind) noexcept {
  switch (kind) {
    case ProviderErrorKind::Auth: return "auth";
    case ProviderErrorKind::QuotaExceeded: return "quota_exceeded";
    case ProviderErrorKind::Network: return "network";
    case ProviderErrorKind::BadRequest: return "bad_request";
  }
  return "";
}

namespace {

Errc errc_for(ProviderErrorKind kind) {
  switch (kind) {
    case ProviderErrorKind::Auth: return Errc::ProviderAuth;
    case ProviderErrorKind::QuotaExceeded: return Errc::ProviderQuotaExceeded;
    case ProviderErrorKind::Network: return Errc::ProviderNetwork;
    case ProviderErrorKind::BadRequest: return Errc::ProviderBadRequest;
  }
  return Errc::ProviderNetwork;
}

}  // namespace

ProviderError::ProviderError(ProviderErrorKind kind, const std::string& message)
    : Error(errc_for(kind), message), kind_(kind) {}

std::optional<ProviderErrorKind> classify_status(int status) {
  if (status == 200) return std::nullopt;
  if (status == 401 || status == 403) return ProviderErrorKind::Auth;
  if (status == 402 || status == 429) return ProviderErrorKind::QuotaExceeded;
  if (status >= 400 && status < 500) return ProviderErrorKind::BadRequest;
  return ProviderErrorKind::Network;
}

// ---- WAV ----

namespace {

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>(v >> 8));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(std::string_view b, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[at + i]);
  return v;
}

std::uint16_t get_u16(std::string_view b, std::size_t at) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(b[at]) | (static_cast<unsigned char>(b[at + 1]) << 8));
}

}  // namespace

std::string silent_wav(std::uint32_t data_bytes) {
  constexpr std::uint16_t channels = 1;
  constexpr std::uint32_t rate = 22050;
  constexpr std::uint16_t bits = 16;
  std::string out;
  out.reserve(kWavHeaderBytes + data_bytes);
  out += "RIFF";
  put_u32(out, 36 + data_bytes);
  out += "WAVE";
  out += "fmt ";
  put_u32(out, 16);
  put_u16(out, 1);  // PCM
  put_u16(out, channels);
  put_u32(out, rate);
  put_u32(out, rate * channels * bits / 8);
  put_u16(out, channels * bits / 8);
  put_u16(out, bits);
  out += "data";
  put_u32(out, data_bytes);
  out.append(data_bytes, '\0');
  return out;
}

std::optional<WavInfo> parse_wav(std::string_view b) {
  if (b.size() < kWavHeaderBytes) return std::nullopt;
  if (b.substr(0, 4) != "RIFF" || b.substr(8, 4) != "WAVE") return std::nullopt;
  if (get_u32(b, 4) != b.size() - 8) return std::nullopt;
  WavInfo info;
  bool have_fmt = false;
  std::size_t at = 12;
  while (at + 8 <= b.size()) {
    auto id = b.substr(at, 4);
    std::uint64_t size = get_u32(b, at + 4);
    if (at + 8 + size > b.size()) return std::nullopt;
    if (id == "fmt ") {
      if (size < 16) return std::nullopt;
      info.channels = get_u16(b, at + 10);
      info.sample_rate = get_u32(b, at + 12);
      info.bits_per_sample = get_u16(b, at + 22);
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) return std::nullopt;
      info.data_bytes = static_cast<std::uint32_t>(size);
      return info;
    }
    at += 8 + size + (size & 1);
  }
  return std::nullopt;
}

std::string mock_wav(std::size_t char_count) {
  return silent_wav(static_cast<std::uint32_t>(kMockBytesPerChar * char_count));
}

std::string MockProvider::synthesize(const RequestSpec& request) {
  ++calls_;
  if (request.username != kAuthUser || request.password.empty()) {
    throw ProviderError(ProviderErrorKind::Auth, "basic auth user must be 'apikey' with a key");
  }
  if (request.method != "POST" || request.header("Content-Type") != "application/json" ||
      request.header("Accept") != "audio/wav" || request.target.find("/v1/synthesize?voice=") == std::string::npos) {
    throw ProviderError(ProviderErrorKind::BadRequest, "request does not follow the synthesize protocol");
  }
  auto text_value = decode_request_text(request.body);
  return mock_wav(text::count_scalars(text_value));
}

std::string HttpProvider::synthesize(const RequestSpec& request) {
  auto parts = split_url(request.url);
  httplib::Client client(parts.origin);
  client.set_connection_timeout(timeout_seconds_, 0);
  client.set_read_timeout(timeout_seconds_, 0);
  client.set_write_timeout(timeout_seconds_, 0);
  client.set_basic_auth(request.username, request.password);

  httplib::Headers headers;
  std::string content_type = "application/json";
  for (const auto& [k, v] : request.headers) {
    if (strcasecmp(k.c_str(), "Content-Type") == 0) {
      content_type = v;
    } else {
      headers.emplace(k, v);
    }
  }
  auto res = client.Post(request.target, headers, request.body, content_type);
  if (!res) {
    throw ProviderError(ProviderErrorKind::Network, "request failed: " + httplib::to_string(res.error()));
  }
  if (auto kind = classify_status(res->status)) {
    // Never echo the request; it carries the key.
    throw ProviderError(*kind, "provider answered HTTP " + std::to_string(res->status));
  }
  return std::move(res->body);
}

}  // namespace sld::tts
