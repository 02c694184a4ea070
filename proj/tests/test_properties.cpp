#include <doctest.h>

#include <algorithm>
#include <json.hpp>
#include <set>

#include "generators.hpp"
#include "sld/corpus.hpp"
#include "sld/provider.hpp"
#include "sld/text.hpp"
#include "support.hpp"
#include "workflow_model.hpp"

using namespace sld;
using gen::Rng;

TEST_CASE("random synsets survive serialize and parse") {
  Rng rng(20240601);
  for (auto file : wn::kFilePos) {
    for (int i = 0; i < 1500; ++i) {
      auto s = gen::synset(rng, file);
      auto line = wn::serialize_data_line(s);
      auto back = wn::parse_data_line(line, file);
      REQUIRE_MESSAGE(back == s, line);
      REQUIRE(wn::serialize_data_line(back) == line);
    }
  }
}

TEST_CASE("whole random files round-trip with CRLF and headers") {
  Rng rng(77);
  for (int f = 0; f < 20; ++f) {
    std::string body = "  1 header\n  2 more header\n";
    std::vector<wn::Synset> expect;
    for (int i = 0; i < 50; ++i) {
      auto s = gen::synset(rng, wn::PartOfSpeech::Verb);
      body += wn::serialize_data_line(s) + (f % 2 ? "\r\n" : "\n");
      expect.push_back(std::move(s));
    }
    auto parsed = wn::parse_data_file(body, wn::PartOfSpeech::Verb);
    CHECK(parsed.header_count == 2);
    CHECK(parsed.line_count == 52);
    CHECK(parsed.synsets == expect);
  }
}

TEST_CASE("months required brackets the exact quotient") {
  Rng rng(5);
  for (int i = 0; i < 10000; ++i) {
    const auto total = gen::uniform(rng, 0, i % 3 ? 10'000'000 : 40'000);
    const auto budget = gen::uniform(rng, 1, i % 5 ? 20'000 : 3);
    auto m = tts::months_required(total, budget);
    const long double exact = static_cast<long double>(total) / static_cast<long double>(budget);
    REQUIRE(m.floor <= m.ceil);
    REQUIRE(m.ceil <= m.floor + 1);
    REQUIRE(budget * m.floor <= total);
    REQUIRE(total <= budget * m.ceil);
    REQUIRE(static_cast<long double>(m.floor) <= exact);
    REQUIRE(exact < static_cast<long double>(m.floor + 1));
    REQUIRE((m.floor == m.ceil) == (total % budget == 0));
  }
  CHECK_THROWS_AS(tts::months_required(5, 0), Error);
}

TEST_CASE("planner never overspends, never splits and is deterministic") {
  Rng rng(11);
  for (int trial = 0; trial < 3000; ++trial) {
    const auto budget = gen::uniform(rng, 1, 10'000);
    auto recs = gen::records(rng, gen::uniform(rng, 0, 60), gen::coin(rng) ? budget : budget / 3 + 1);
    tts::QuotaLedger ledger{"2026-10", budget, 0, {}};
    if (gen::coin(rng, 0.3) && !recs.empty()) {
      const auto& pre = recs[gen::uniform(rng, 0, recs.size() - 1)];
      if (pre.char_count <= budget) ledger.charge(pre.job_id(), pre.char_count);
    }

    auto plan = tts::plan_month(recs, ledger);
    REQUIRE(plan.total_chars <= ledger.remaining());
    REQUIRE(plan == tts::plan_month(recs, ledger));

    // Independent greedy walk.
    std::uint64_t left = ledger.remaining(), sum = 0;
    std::size_t skipped = 0;
    std::vector<std::string> expect;
    for (const auto& r : recs) {
      if (ledger.charged(r.job_id())) continue;
      if (r.char_count <= left) {
        left -= r.char_count;
        expect.push_back(r.entry_id);
      } else {
        ++skipped;
      }
    }
    std::vector<std::string> got;
    for (const auto& j : plan.jobs) {
      got.push_back(j.record.entry_id);
      sum += j.record.char_count;
      REQUIRE(j.record.text.size() == j.record.char_count);
      REQUIRE(j.state == tts::JobState::Pending);
    }
    REQUIRE(got == expect);
    REQUIRE(plan.skipped == skipped);
    REQUIRE(plan.total_chars == sum);
  }
}

TEST_CASE("consecutive months never plan a record twice") {
  Rng rng(12);
  for (int trial = 0; trial < 300; ++trial) {
    const auto budget = gen::uniform(rng, 50, 2'000);
    auto all = gen::records(rng, gen::uniform(rng, 1, 80), budget);
    std::uint64_t total = 0;
    for (const auto& r : all) total += r.char_count;

    std::set<std::string> done;
    int months = 0;
    while (done.size() < all.size()) {
      REQUIRE(months < 200);
      std::vector<tts::ExportRecord> pending;
      for (const auto& r : all) {
        if (!done.count(r.entry_id)) pending.push_back(r);
      }
      tts::QuotaLedger ledger{"m" + std::to_string(months), budget, 0, {}};
      // Split each month into two runs: the second plan resumes against the charged ledger.
      for (int run = 0; run < 2; ++run) {
        auto plan = tts::plan_month(pending, ledger);
        std::size_t take = run == 0 ? plan.jobs.size() / 2 : plan.jobs.size();
        for (std::size_t k = 0; k < take; ++k) {
          const auto& rec = plan.jobs[k].record;
          REQUIRE(done.insert(rec.entry_id).second);
          ledger.charge(rec.job_id(), rec.char_count);
        }
        REQUIRE(ledger.used_chars <= ledger.budget_chars);
      }
      ++months;
    }
    auto bound = tts::months_required(total, budget);
    REQUIRE(static_cast<std::uint64_t>(months) >= bound.ceil);
  }
}

TEST_CASE("random workflow sequences match the reference model") {
  Rng rng(99);
  for (int trial = 0; trial < 400; ++trial) {
    store::Store final_store;
    auto failure = gen::workflow_trial(rng, 60, &final_store);
    REQUIRE_MESSAGE(failure.empty(), failure);
    if (trial % 40 == 0) {
      testing::TempDir dir;
      store::save_store(final_store, dir.path());
      REQUIRE(store::load_store(dir.path()) == final_store);
    }
  }
}

TEST_CASE("request bodies round-trip arbitrary text") {
  Rng rng(3);
  tts::ProviderConfig cfg{"https://tts.example.test/instances/x", std::string(tts::kDefaultVoice), "k"};
  for (int i = 0; i < 5000; ++i) {
    auto t = gen::text(rng);
    auto body = tts::request_body(t);
    REQUIRE(tts::decode_request_text(body) == t);
    auto j = nlohmann::json::parse(body);
    REQUIRE(j.size() == 1);
    REQUIRE(j["text"] == t);
    REQUIRE(body.find('\n') == std::string::npos);

    // Scalars: every byte that is not a UTF-8 continuation byte starts one.
    std::size_t leads = std::count_if(t.begin(), t.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; });
    REQUIRE(tts::count_characters(t) == leads);

    auto req = tts::build_request(cfg, t);
    REQUIRE(req.body == body);
    REQUIRE(tts::render_request(req).ends_with("Content-Length: " + std::to_string(body.size()) + "\r\n\r\n" + body));
  }
}

TEST_CASE("tokenizing normalized output is stable") {
  Rng rng(8);
  for (int i = 0; i < 3000; ++i) {
    auto tokens = corpus::tokenize(gen::text(rng, 200));
    std::string joined;
    std::vector<std::string> norm;
    for (const auto& t : tokens) {
      REQUIRE(!t.normalized.empty());
      REQUIRE(t.normalized.find(' ') == std::string::npos);
      REQUIRE(text::fold_case(t.normalized) == t.normalized);
      norm.push_back(t.normalized);
      joined += t.normalized + " ";
    }
    std::vector<std::string> again;
    for (const auto& t : corpus::tokenize(joined)) again.push_back(t.normalized);
    REQUIRE(again == norm);
  }
}
