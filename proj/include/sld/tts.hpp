#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sld/provider.hpp"
#include "sld/store.hpp"

namespace sld::tts {

enum class ExportKind : std::uint8_t { LemmaOnly, LemmaWithDefinition };

std::string_view export_kind_name(ExportKind kind) noexcept;  // "lemma", "definition"
std::optional<ExportKind> export_kind_from_name(std::string_view name) noexcept;
store::AssetKind asset_kind_for(ExportKind kind) noexcept;

struct ExportRecord {
  std::string entry_id;
  ExportKind kind = ExportKind::LemmaOnly;
  std::string text;
  std::size_t char_count = 0;
  // Where the audio goes, relative to the output directory ("noun/entity.wav").
  std::string output_name;

  /// "<entry_id>:<kind>", the identity used for quota accounting.
  std::string job_id() const;
  bool operator==(const ExportRecord&) const = default;
};

/// Unicode scalar values in `text`, before any wire escaping.
std::size_t count_characters(std::string_view text) noexcept;

/// LemmaWithDefinition: "<lemma>| <gloss>". LemmaOnly: the lemma with underscores as spaces.
ExportRecord export_record(const store::LexicalEntry& entry, ExportKind kind);

/// export_record with the store's collision-free output name.
ExportRecord export_record(const store::Store& store, const store::LexicalEntry& entry, ExportKind kind);

/// Records still lacking English audio of `kind`, in store order. Gloss-less entries are skipped for definitions.
std::vector<ExportRecord> pending_records(const store::Store& store, ExportKind kind,
                                          std::optional<wn::PartOfSpeech> pos = std::nullopt);

struct MonthsRequired {
  std::uint64_t floor = 0;
  std::uint64_t ceil = 0;
  bool operator==(const MonthsRequired&) const = default;
};

MonthsRequired months_required(std::uint64_t total_chars, std::uint64_t budget_chars);

inline constexpr std::uint64_t kDefaultBudget = 10'000;

struct QuotaLedger {
  std::string month;  // YYYY-MM
  std::uint64_t budget_chars = kDefaultBudget;
  std::uint64_t used_chars = 0;
  std::vector<std::string> jobs;

  std::uint64_t remaining() const noexcept { return budget_chars - used_chars; }
  bool charged(std::string_view job_id) const;
  /// Throws OverBudget if `chars` does not fit.
  void charge(std::string job_id, std::uint64_t chars);

  bool operator==(const QuotaLedger&) const = default;
};

/// Validates "YYYY-MM".
bool valid_month(std::string_view month);

enum class JobState : std::uint8_t { Pending, Done, Failed };
std::string_view job_state_name(JobState state) noexcept;
std::optional<JobState> job_state_from_name(std::string_view name) noexcept;

struct SynthesisJob {
  ExportRecord record;
  std::string voice_id = std::string(kDefaultVoice);
  JobState state = JobState::Pending;
  std::optional<std::uint64_t> result_bytes;
  std::string error;  // last failure message, empty when none

  bool operator==(const SynthesisJob&) const = default;
};

struct MonthPlan {
  std::string month;
  std::vector<SynthesisJob> jobs;
  std::uint64_t total_chars = 0;
  std::size_t skipped = 0;  // records that did not fit the remaining budget

  bool operator==(const MonthPlan&) const = default;
};

/// Greedy-with-skip: walks `records` in order and admits every record that still fits the
/// ledger's remaining budget. Records already charged in the ledger are left out.
MonthPlan plan_month(std::span<const ExportRecord> records, const QuotaLedger& ledger,
                     std::string_view voice_id = kDefaultVoice);

struct ExecuteOptions {
  std::filesystem::path out_dir;
  ProviderConfig provider;
  std::size_t concurrency = 1;
  // When set, successful jobs register their audio in this store, with paths relative to store_root.
  store::Store* store = nullptr;
  std::filesystem::path store_root;
};

struct ExecutionReport {
  std::size_t done = 0;     // jobs of the plan in Done state after the run
  std::size_t written = 0;  // files produced by this run
  std::size_t failed = 0;
  std::size_t pending = 0;
  std::size_t provider_calls = 0;
  std::uint64_t bytes_total = 0;
  std::chrono::duration<double> elapsed{0};
  std::optional<ProviderErrorKind> halted_by;
};

/// Runs the plan's non-Done jobs in order. Failures are recorded on the jobs; QuotaExceeded
/// or Auth halts the run and leaves the remaining jobs Pending.
ExecutionReport execute_plan(MonthPlan& plan, ProviderClient& client, const ExecuteOptions& options,
                             QuotaLedger& ledger);

struct CoverageRow {
  wn::PartOfSpeech pos = wn::PartOfSpeech::Noun;
  std::size_t voiced = 0;
  std::size_t total = 0;
  double fraction = 0.0;
  bool ready = false;
  std::uint64_t months_remaining = 0;
};

inline constexpr double kReadinessThreshold = 0.30;

CoverageRow coverage_row(wn::PartOfSpeech pos, std::size_t voiced, std::size_t total, std::uint64_t unvoiced_chars,
                         std::uint64_t budget_chars = kDefaultBudget, double threshold = kReadinessThreshold);

/// Per data file. An entry counts as voiced once its English definition audio exists;
/// months_remaining is the ceiling month count for the un-voiced definition text.
std::vector<CoverageRow> coverage_report(const store::Store& store, double threshold = kReadinessThreshold,
                                         std::uint64_t budget_chars = kDefaultBudget);

struct Throughput {
  double files_per_minute = 0.0;
  double mean_bytes_per_file = 0.0;
};

/// Ratios rounded to two decimals.
Throughput throughput_report(const ExecutionReport& report);

// ---- files ----

/// Header line {"month","budget","total_chars","skipped","jobs"} followed by one job per line.
void write_plan_file(const std::filesystem::path& path, const MonthPlan& plan);
MonthPlan read_plan_file(const std::filesystem::path& path);

/// One ledger object per line, keyed by month. A missing file reads as empty.
std::map<std::string, QuotaLedger> read_ledgers(const std::filesystem::path& path);
void write_ledgers(const std::filesystem::path& path, const std::map<std::string, QuotaLedger>& ledgers);

}  // namespace sld::tts
