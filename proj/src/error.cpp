#include "sld/error.hpp"

namespace sld {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::MalformedLine: return "malformed_line";
    case Errc::CountMismatch: return "count_mismatch";
    case Errc::PosMismatch: return "pos_mismatch";
    case Errc::EmptyFile: return "empty_file";
    case Errc::DanglingPointer: return "dangling_pointer";
    case Errc::UnknownEntry: return "unknown_entry";
    case Errc::UnknownActor: return "unknown_actor";
    case Errc::DuplicateActor: return "duplicate_actor";
    case Errc::AlreadyReviewed: return "already_reviewed";
    case Errc::EmptyText: return "empty_text";
    case Errc::SelfReview: return "self_review";
    case Errc::InsufficientRank: return "insufficient_rank";
    case Errc::NotCaptured: return "not_captured";
    case Errc::WorkflowConflict: return "workflow_conflict";
    case Errc::MissingFile: return "missing_file";
    case Errc::SizeMismatch: return "size_mismatch";
    case Errc::InvalidAsset: return "invalid_asset";
    case Errc::InvalidLanguage: return "invalid_language";
    case Errc::StepOrder: return "step_order";
    case Errc::CorruptRecord: return "corrupt_record";
    case Errc::MissingManifest: return "missing_manifest";
    case Errc::EmptyGloss: return "empty_gloss";
    case Errc::ZeroBudget: return "zero_budget";
    case Errc::EmptyKey: return "empty_key";
    case Errc::NoCompletedJobs: return "no_completed_jobs";
    case Errc::OutputDirUnwritable: return "output_dir_unwritable";
    case Errc::OverBudget: return "over_budget";
    case Errc::ProviderAuth: return "provider_auth";
    case Errc::ProviderQuotaExceeded: return "provider_quota_exceeded";
    case Errc::ProviderNetwork: return "provider_network";
    case Errc::ProviderBadRequest: return "provider_bad_request";
    case Errc::InvalidArgument: return "invalid_argument";
    case Errc::Io: return "io";
  }
  return "unknown";
}

Error::Error(Errc code, const std::string& message) : std::runtime_error(message), code_(code) {}

ParseError::ParseError(Errc code, const std::string& message, std::size_t column, std::size_t line)
    : Error(code, message), column_(column), line_(line) {}

}  // namespace sld
