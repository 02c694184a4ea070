#pragma once

// Speech provider wire protocol: one POST per utterance, basic auth with the
// literal user "apikey", JSON body {"text": ...}, WAV audio back.

#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sld/error.hpp"

namespace sld::tts {

inline constexpr std::string_view kDefaultVoice = "en-US_MichaelV3Voice";
inline constexpr std::string_view kAuthUser = "apikey";

struct ProviderConfig {
  std::string base_url;  // e.g. https://api.us-south.text-to-speech.watson.cloud.ibm.com/instances/<id>
  std::string voice_id = std::string(kDefaultVoice);
  std::string api_key;

  /// SLD_TTS_APIKEY, SLD_TTS_URL and optional SLD_TTS_VOICE.
  static ProviderConfig from_env();
};

struct RequestSpec {
  std::string method;  // always "POST"
  std::string url;     // base_url + target
  std::string target;  // path and query relative to the host, e.g. /v1/synthesize?voice=...
  std::vector<std::pair<std::string, std::string>> headers;
  std::string username;
  std::string password;
  std::string body;

  std::string_view header(std::string_view name) const;
};

/// The JSON body for `text`: {"text": "<escaped>"}.
std::string request_body(std::string_view text);

/// Recovers the text field from a request body. Throws ProviderBadRequest on anything else.
std::string decode_request_text(std::string_view body);

RequestSpec build_request(const ProviderConfig& config, std::string_view text);

/// HTTP/1.1 request bytes as they go on the wire (CRLF line breaks, Basic credentials).
std::string render_request(const RequestSpec& spec);

enum class ProviderErrorKind : std::uint8_t { Auth, QuotaExceeded, Network, BadRequest };

std::string_view provider_error_name(ProviderErrorKind kind) noexcept;

class ProviderError : public Error {
 public:
  ProviderError(ProviderErrorKind kind, const std::string& message);
  ProviderErrorKind kind() const noexcept { return kind_; }

 private:
  ProviderErrorKind kind_;
};

/// Maps an HTTP status from the synthesis endpoint to an error kind (nullopt for 200).
std::optional<ProviderErrorKind> classify_status(int status);

/// Synthesizes one request into WAV bytes or throws ProviderError.
class ProviderClient {
 public:
  virtual ~ProviderClient() = default;
  virtual std::string synthesize(const RequestSpec& request) = 0;
};

// ---- WAV ----

inline constexpr std::size_t kWavHeaderBytes = 44;
inline constexpr std::size_t kMockBytesPerChar = 2124;

struct WavInfo {
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits_per_sample = 0;
  std::uint32_t data_bytes = 0;
};

/// Canonical 44-byte PCM header followed by `data_bytes` of silence (mono, 16-bit, 22050 Hz).
std::string silent_wav(std::uint32_t data_bytes);

/// Checks RIFF/WAVE magic, the fmt chunk and that the declared sizes agree with the buffer.
std::optional<WavInfo> parse_wav(std::string_view bytes);

/// Deterministic stand-in audio: 44 + 2124 * char_count bytes.
std::string mock_wav(std::size_t char_count);

/// Offline provider. Validates the request like the real service would and answers with mock_wav.
class MockProvider : public ProviderClient {
 public:
  std::string synthesize(const RequestSpec& request) override;
  std::size_t calls() const noexcept { return calls_.load(); }

 private:
  std::atomic<std::size_t> calls_{0};
};

/// Real provider over HTTP(S).
class HttpProvider : public ProviderClient {
 public:
  explicit HttpProvider(int timeout_seconds = 60) : timeout_seconds_(timeout_seconds) {}
  std::string synthesize(const RequestSpec& request) override;

 private:
  int timeout_seconds_;
};

}  // namespace sld::tts
