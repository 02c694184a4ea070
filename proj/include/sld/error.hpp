#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sld {

enum class Errc {
  // wordnet
  MalformedLine,
  CountMismatch,
  PosMismatch,
  EmptyFile,
  DanglingPointer,
  // store
  UnknownEntry,
  UnknownActor,
  DuplicateActor,
  AlreadyReviewed,
  EmptyText,
  SelfReview,
  InsufficientRank,
  NotCaptured,
  WorkflowConflict,
  MissingFile,
  SizeMismatch,
  InvalidAsset,
  InvalidLanguage,
  StepOrder,
  CorruptRecord,
  MissingManifest,
  // tts
  EmptyGloss,
  ZeroBudget,
  EmptyKey,
  NoCompletedJobs,
  OutputDirUnwritable,
  OverBudget,
  ProviderAuth,
  ProviderQuotaExceeded,
  ProviderNetwork,
  ProviderBadRequest,
  // generic
  InvalidArgument,
  Io,
};

/// Stable snake_case name, used in service error bodies.
std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Parse failures carry where in the input they happened (1-based line, 0-based byte column).
class ParseError : public Error {
 public:
  ParseError(Errc code, const std::string& message, std::size_t column, std::size_t line = 0);

  std::size_t column() const noexcept { return column_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t column_;
  std::size_t line_;
};

}  // namespace sld
