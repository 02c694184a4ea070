#include "sld/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <sstream>

#include "sld/corpus.hpp"
#include "sld/service.hpp"
#include "sld/store.hpp"
#include "sld/tts.hpp"
#include "sld/wordnet.hpp"

namespace sld::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Config {
  std::string store_dir = "store";
  bool as_json = false;
  std::uint64_t budget = tts::kDefaultBudget;
  std::string voice = std::string(tts::kDefaultVoice);
};

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::ProviderAuth:
    case Errc::ProviderQuotaExceeded:
    case Errc::ProviderNetwork:
    case Errc::ProviderBadRequest:
      return kProvider;
    case Errc::Io:
    case Errc::MissingFile:
    case Errc::MissingManifest:
    case Errc::CorruptRecord:
    case Errc::OutputDirUnwritable:
      return kIo;
    default:
      return kValidation;
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::MissingFile, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

store::Store open_store(const Config& cfg) {
  return store::load_store(cfg.store_dir);
}

store::Store open_or_create_store(const Config& cfg) {
  if (fs::exists(fs::path(cfg.store_dir) / "manifest.json")) return store::load_store(cfg.store_dir);
  return {};
}

fs::path ledger_path(const Config& cfg) { return fs::path(cfg.store_dir) / "ledger.jsonl"; }

std::vector<wn::PartOfSpeech> parse_pos_list(const std::string& name) {
  if (name == "all") return {wn::kFilePos.begin(), wn::kFilePos.end()};
  auto pos = wn::pos_from_name(name);
  if (!pos) throw Error(Errc::InvalidArgument, "unknown pos '" + name + "'");
  return {wn::file_pos(*pos)};
}

std::optional<wn::PartOfSpeech> parse_pos_filter(const std::string& name) {
  if (name.empty() || name == "all") return std::nullopt;
  auto pos = wn::pos_from_name(name);
  if (!pos) throw Error(Errc::InvalidArgument, "unknown pos '" + name + "'");
  return wn::file_pos(*pos);
}

tts::ExportKind parse_kind(const std::string& name) {
  auto kind = tts::export_kind_from_name(name);
  if (!kind) throw Error(Errc::InvalidArgument, "kind must be lemma or definition");
  return *kind;
}

std::string fixed2(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << v;
  return s.str();
}

// ---- subcommands ----

int import_wordnet(const Config& cfg, const std::string& dict_dir, const std::string& pos_name, std::ostream& out) {
  auto which = parse_pos_list(pos_name);
  auto db = wn::load_dict(dict_dir, which);
  auto st = open_or_create_store(cfg);
  auto entries = store::build_entries(db);
  const auto imported = entries.size();
  st.upsert_entries(std::move(entries));
  store::save_store(st, cfg.store_dir);

  auto counts = wn::count_report(db);
  if (cfg.as_json) {
    json rows = json::array();
    for (const auto& c : counts) {
      if (!db.loaded(c.pos)) continue;
      rows.push_back({{"pos", wn::file_suffix(c.pos)}, {"synsets", c.synsets}, {"senses", c.senses}, {"lines", c.lines}});
    }
    out << json{{"imported", imported}, {"store_entries", st.size()}, {"files", rows}}.dump() << "\n";
  } else {
    out << std::left << std::setw(6) << "pos" << std::right << std::setw(10) << "synsets" << std::setw(10) << "senses"
        << std::setw(10) << "lines" << "\n";
    for (const auto& c : counts) {
      if (!db.loaded(c.pos)) continue;
      out << std::left << std::setw(6) << wn::file_suffix(c.pos) << std::right << std::setw(10) << c.synsets
          << std::setw(10) << c.senses << std::setw(10) << c.lines << "\n";
    }
    out << "imported " << imported << " entries; store holds " << st.size() << "\n";
  }
  return kOk;
}

int export_cmd(const Config& cfg, const std::string& pos_name, const std::string& kind_name, const std::string& out_path,
               std::ostream& out) {
  auto st = open_store(cfg);
  auto pos = parse_pos_filter(pos_name);
  auto kind = parse_kind(kind_name);
  std::string lines;
  std::size_t written = 0, skipped = 0;
  std::uint64_t chars = 0;
  for (const auto& e : st.entries()) {
    if (pos && wn::file_index(e.pos) != wn::file_index(*pos)) continue;
    if (kind == tts::ExportKind::LemmaWithDefinition && e.gloss.empty()) {
      ++skipped;
      continue;
    }
    auto rec = tts::export_record(e, kind);
    lines += rec.text;
    lines += '\n';
    chars += rec.char_count;
    ++written;
  }
  if (out_path == "-") {
    out << lines;
    return kOk;
  }
  std::ofstream f(out_path, std::ios::binary | std::ios::trunc);
  if (!f || !f.write(lines.data(), static_cast<std::streamsize>(lines.size())) || !f.flush()) {
    throw Error(Errc::Io, "cannot write " + out_path);
  }
  if (cfg.as_json) {
    out << json{{"file", out_path}, {"lines", written}, {"chars", chars}, {"skipped", skipped}}.dump() << "\n";
  } else {
    out << "wrote " << written << " lines (" << chars << " chars) to " << out_path << "\n";
  }
  return kOk;
}

int plan_cmd(const Config& cfg, const std::string& month, const std::string& kind_name, const std::string& pos_name,
             std::string plan_out, bool budget_given, std::ostream& out) {
  if (!tts::valid_month(month)) throw Error(Errc::InvalidArgument, "month must be YYYY-MM");
  if (cfg.budget == 0) throw Error(Errc::ZeroBudget, "budget must be positive");
  auto st = open_store(cfg);
  auto kind = parse_kind(kind_name);
  auto pos = parse_pos_filter(pos_name);

  auto ledgers = tts::read_ledgers(ledger_path(cfg));
  auto [it, fresh] = ledgers.try_emplace(month, tts::QuotaLedger{month, cfg.budget, 0, {}});
  auto& ledger = it->second;
  if (!fresh && budget_given) {
    if (cfg.budget < ledger.used_chars) throw Error(Errc::OverBudget, "budget is below what the month already used");
    ledger.budget_chars = cfg.budget;
  }

  auto records = tts::pending_records(st, kind, pos);
  std::uint64_t pending_chars = 0;
  for (const auto& r : records) pending_chars += r.char_count;
  auto plan = tts::plan_month(records, ledger, cfg.voice);
  auto months = tts::months_required(pending_chars, ledger.budget_chars);

  if (plan_out.empty()) plan_out = (fs::path(cfg.store_dir) / "plans" / (month + ".jsonl")).string();
  fs::create_directories(fs::path(plan_out).parent_path());
  tts::write_plan_file(plan_out, plan);
  tts::write_ledgers(ledger_path(cfg), ledgers);

  if (cfg.as_json) {
    out << json{{"plan", plan_out},
                {"month", month},
                {"budget_chars", ledger.budget_chars},
                {"remaining_chars", ledger.remaining()},
                {"jobs", plan.jobs.size()},
                {"total_chars", plan.total_chars},
                {"skipped", plan.skipped},
                {"pending_records", records.size()},
                {"pending_chars", pending_chars},
                {"months_required", {{"floor", months.floor}, {"ceil", months.ceil}}}}
               .dump()
        << "\n";
  } else {
    out << "plan " << plan_out << "\n"
        << "month " << month << ": " << plan.jobs.size() << " jobs, " << plan.total_chars << " of "
        << ledger.remaining() << " remaining chars, " << plan.skipped << " skipped\n"
        << "pending " << records.size() << " records, " << pending_chars << " chars\n"
        << "months required: floor " << months.floor << ", ceil " << months.ceil << " at " << ledger.budget_chars
        << " chars/month\n";
  }
  return kOk;
}

int synthesize_cmd(const Config& cfg, const std::string& plan_path, const std::string& provider_name,
                   std::string out_dir, std::size_t concurrency, std::ostream& out) {
  auto plan = tts::read_plan_file(plan_path);
  auto st = open_store(cfg);
  if (out_dir.empty()) out_dir = (fs::path(cfg.store_dir) / "assets").string();

  std::unique_ptr<tts::ProviderClient> client;
  tts::ProviderConfig provider;
  if (provider_name == "mock") {
    client = std::make_unique<tts::MockProvider>();
    provider.base_url = "http://mock.invalid";
    provider.api_key = "mock";
  } else if (provider_name == "http") {
    provider = tts::ProviderConfig::from_env();
    if (provider.api_key.empty()) throw Error(Errc::EmptyKey, "SLD_TTS_APIKEY is not set");
    if (provider.base_url.empty()) throw Error(Errc::InvalidArgument, "SLD_TTS_URL is not set");
    client = std::make_unique<tts::HttpProvider>();
  } else {
    throw Error(Errc::InvalidArgument, "provider must be mock or http");
  }

  auto ledgers = tts::read_ledgers(ledger_path(cfg));
  auto& ledger = ledgers.try_emplace(plan.month, tts::QuotaLedger{plan.month, cfg.budget, 0, {}}).first->second;

  tts::ExecuteOptions opts;
  opts.out_dir = out_dir;
  opts.provider = provider;
  opts.concurrency = std::max<std::size_t>(1, concurrency);
  opts.store = &st;
  opts.store_root = cfg.store_dir;
  auto report = tts::execute_plan(plan, *client, opts, ledger);

  // Persist progress before reporting, so a halted run resumes where it stopped.
  tts::write_plan_file(plan_path, plan);
  tts::write_ledgers(ledger_path(cfg), ledgers);
  store::save_store(st, cfg.store_dir);

  std::optional<tts::Throughput> rate;
  if (report.written > 0) {
    auto this_run = report;
    this_run.done = report.written;
    rate = tts::throughput_report(this_run);
  }
  std::string first_error;
  for (const auto& j : plan.jobs) {
    if (!j.error.empty()) {
      first_error = j.error;
      break;
    }
  }

  if (cfg.as_json) {
    json j = {{"done", report.done},
              {"failed", report.failed},
              {"pending", report.pending},
              {"written", report.written},
              {"provider_calls", report.provider_calls},
              {"bytes_total", report.bytes_total},
              {"elapsed_seconds", report.elapsed.count()},
              {"used_chars", ledger.used_chars},
              {"remaining_chars", ledger.remaining()}};
    j["halted_by"] = report.halted_by ? json(tts::provider_error_name(*report.halted_by)) : json(nullptr);
    j["files_per_minute"] = rate ? json(rate->files_per_minute) : json(nullptr);
    j["mean_bytes_per_file"] = rate ? json(rate->mean_bytes_per_file) : json(nullptr);
    out << j.dump() << "\n";
  } else {
    out << "done " << report.done << ", failed " << report.failed << ", pending " << report.pending
        << ", provider calls " << report.provider_calls << ", written " << report.written << "\n"
        << "bytes " << report.bytes_total << " in " << fixed2(report.elapsed.count()) << " s\n";
    if (rate) {
      out << "throughput " << fixed2(rate->files_per_minute) << " files/min, " << fixed2(rate->mean_bytes_per_file)
          << " bytes/file\n";
    }
    out << "ledger " << plan.month << ": " << ledger.used_chars << "/" << ledger.budget_chars << " chars\n";
    if (report.halted_by) out << "halted: " << tts::provider_error_name(*report.halted_by) << "\n";
  }

  if (report.halted_by) {
    throw Error(report.halted_by == tts::ProviderErrorKind::Auth ? Errc::ProviderAuth : Errc::ProviderQuotaExceeded,
                first_error.empty() ? "provider halted the run" : first_error);
  }
  if (report.failed > 0) {
    throw Error(Errc::ProviderBadRequest, std::to_string(report.failed) + " job(s) failed: " + first_error);
  }
  return kOk;
}

int stats_cmd(const Config& cfg, double threshold, std::ostream& out) {
  auto st = open_store(cfg);
  auto rows = tts::coverage_report(st, threshold, cfg.budget);
  if (cfg.as_json) {
    json j = json::array();
    for (const auto& r : rows) {
      j.push_back({{"pos", wn::file_suffix(r.pos)},
                   {"voiced", r.voiced},
                   {"total", r.total},
                   {"fraction", r.fraction},
                   {"ready", r.ready},
                   {"months_remaining", r.months_remaining}});
    }
    out << json{{"threshold", threshold}, {"coverage", j}}.dump() << "\n";
    return kOk;
  }
  out << std::left << std::setw(6) << "pos" << std::right << std::setw(10) << "voiced" << std::setw(10) << "total"
      << std::setw(10) << "fraction" << std::setw(8) << "ready" << std::setw(10) << "months" << "\n";
  for (const auto& r : rows) {
    out << std::left << std::setw(6) << wn::file_suffix(r.pos) << std::right << std::setw(10) << r.voiced
        << std::setw(10) << r.total << std::setw(10) << fixed2(r.fraction) << std::setw(8) << (r.ready ? "yes" : "no")
        << std::setw(10) << r.months_remaining << "\n";
  }
  return kOk;
}

int ingest_cmd(const Config& cfg, const std::string& file, std::string source, const std::string& report_path,
               std::ostream& out) {
  auto st = open_store(cfg);
  auto text = read_file(file);
  if (source.empty()) source = fs::path(file).filename().string();
  auto lexicon = corpus::Lexicon::from_store(st);
  auto report = corpus::classify(corpus::tokenize(text, &lexicon), st, source);
  auto proposals = corpus::propose_candidates(report);
  auto added = st.add_candidates(proposals, source);
  store::save_store(st, cfg.store_dir);
  if (!report_path.empty()) {
    std::ofstream f(report_path, std::ios::binary | std::ios::trunc);
    auto body = corpus::report_to_jsonl(report);
    if (!f || !f.write(body.data(), static_cast<std::streamsize>(body.size()))) {
      throw Error(Errc::Io, "cannot write " + report_path);
    }
  }
  if (cfg.as_json) {
    json top = json::array();
    for (std::size_t i = 0; i < proposals.size() && i < 20; ++i) {
      top.push_back({{"lemma", proposals[i].lemma}, {"count", proposals[i].count}});
    }
    out << json{{"source", source},
                {"known", report.known.size()},
                {"unknown", report.unknown.size()},
                {"new_candidates", added},
                {"top", top}}
               .dump()
        << "\n";
  } else {
    out << source << ": " << report.known.size() << " known, " << report.unknown.size() << " unknown, " << added
        << " new candidates\n";
    for (std::size_t i = 0; i < proposals.size() && i < 20; ++i) {
      out << std::setw(8) << proposals[i].count << "  " << proposals[i].lemma << "\n";
    }
  }
  return kOk;
}

int add_actor_cmd(const Config& cfg, const std::string& id, const std::string& name, const std::string& role_name,
                  std::ostream& out) {
  auto st = open_or_create_store(cfg);
  auto role = store::role_from_name(role_name);
  if (!role) throw Error(Errc::InvalidArgument, "unknown role '" + role_name + "'");
  st.add_actor({id, name.empty() ? id : name, *role});
  store::save_store(st, cfg.store_dir);
  if (cfg.as_json) {
    out << json{{"id", id}, {"role", store::role_name(*role)}, {"rank", store::rank(*role)}}.dump() << "\n";
  } else {
    out << "added " << id << " (" << store::role_name(*role) << ")\n";
  }
  return kOk;
}

int serve_cmd(const Config& cfg, const std::string& host, int port, const std::string& cors, std::ostream& out) {
  service::ServiceOptions opts;
  opts.store_dir = cfg.store_dir;
  opts.ledger_path = ledger_path(cfg);
  opts.cors_origin = cors;
  opts.budget_chars = cfg.budget;
  service::Service svc(open_store(cfg), opts);
  int bound = svc.bind(host, port);
  out << "listening on http://" << host << ":" << bound << std::endl;
  svc.run();
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config cfg;
  CLI::App app{"Lexical store, voice planning and capture service for WordNet data", "sld"};
  app.require_subcommand(1);
  app.add_option("--store", cfg.store_dir, "Store directory")->capture_default_str();
  app.add_flag("--json", cfg.as_json, "Machine-readable output");
  auto* budget_opt = app.add_option("--budget", cfg.budget, "Characters per month")->capture_default_str();
  app.add_option("--voice", cfg.voice, "Voice id for planned jobs")->capture_default_str();

  std::string dict_dir, pos_name = "all", kind_name = "definition", out_path, month, plan_path, provider_name,
                        out_dir, file, source, report_path, host = "127.0.0.1", cors = "*", actor_id, actor_name,
                        role_name;
  std::size_t concurrency = 1;
  int port = 8080;
  double threshold = tts::kReadinessThreshold;

  auto* import_cmd = app.add_subcommand("import-wordnet", "Parse data.* files into the store");
  import_cmd->add_option("--dict-dir", dict_dir, "WordNet dict directory")->required();
  import_cmd->add_option("--pos", pos_name, "noun|verb|adj|adv|all")->capture_default_str();

  auto* export_sub = app.add_subcommand("export", "Write speakable text, one line per entry");
  export_sub->add_option("--pos", pos_name, "noun|verb|adj|adv|all")->capture_default_str();
  export_sub->add_option("--kind", kind_name, "lemma|definition")->capture_default_str();
  export_sub->add_option("--out", out_path, "Output file ('-' for stdout)")->required();

  std::string plan_pos = "all", plan_kind = "definition";
  auto* plan_sub = app.add_subcommand("plan", "Pack pending audio into a month's budget");
  plan_sub->add_option("--month", month, "YYYY-MM")->required();
  plan_sub->add_option("--kind", plan_kind, "lemma|definition")->capture_default_str();
  plan_sub->add_option("--pos", plan_pos, "noun|verb|adj|adv|all")->capture_default_str();
  plan_sub->add_option("--out", out_path, "Plan file (default <store>/plans/<month>.jsonl)");

  auto* synth_sub = app.add_subcommand("synthesize", "Run a plan against a provider");
  synth_sub->add_option("--plan", plan_path, "Plan file")->required();
  synth_sub->add_option("--provider", provider_name, "mock|http")->required();
  synth_sub->add_option("--out-dir", out_dir, "Audio directory (default <store>/assets)");
  synth_sub->add_option("--concurrency", concurrency, "Parallel requests")->capture_default_str();

  auto* stats_sub = app.add_subcommand("stats", "Voice coverage per part of speech");
  stats_sub->add_option("--threshold", threshold, "Readiness fraction")->capture_default_str();

  auto* ingest_sub = app.add_subcommand("ingest", "Find unknown words in a text and queue them");
  ingest_sub->add_option("--file", file, "UTF-8 text file")->required();
  ingest_sub->add_option("--source", source, "Source name (default: file name)");
  ingest_sub->add_option("--report", report_path, "Write the known/unknown report as JSONL");

  auto* serve_sub = app.add_subcommand("serve", "Run the HTTP service");
  serve_sub->add_option("--port", port, "Port (0 picks a free one)")->capture_default_str();
  serve_sub->add_option("--host", host, "Bind address")->capture_default_str();
  serve_sub->add_option("--cors-origin", cors, "Allowed UI origin")->capture_default_str();

  auto* actor_sub = app.add_subcommand("add-actor", "Register a participant");
  actor_sub->add_option("--id", actor_id, "Actor id")->required();
  actor_sub->add_option("--name", actor_name, "Display name");
  actor_sub->add_option("--role", role_name, "solver_participant|creative_expert|technical_expert|organizer")
      ->required();

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  if (argv.empty()) argv.push_back("sld");

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kValidation;
  }

  try {
    if (*import_cmd) return import_wordnet(cfg, dict_dir, pos_name, out);
    if (*export_sub) return export_cmd(cfg, pos_name, kind_name, out_path, out);
    if (*plan_sub) return plan_cmd(cfg, month, plan_kind, plan_pos, out_path, budget_opt->count() > 0, out);
    if (*synth_sub) return synthesize_cmd(cfg, plan_path, provider_name, out_dir, concurrency, out);
    if (*stats_sub) return stats_cmd(cfg, threshold, out);
    if (*ingest_sub) return ingest_cmd(cfg, file, source, report_path, out);
    if (*serve_sub) return serve_cmd(cfg, host, port, cors, out);
    if (*actor_sub) return add_actor_cmd(cfg, actor_id, actor_name, role_name, out);
  } catch (const Error& e) {
    err << "error: " << errc_name(e.code()) << ": " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    err << "error: io: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  }
  return kValidation;
}

}  // namespace sld::cli
