#pragma once

// Reference model of the capture/review workflow, checked against Store step by step.

#include <map>
#include <optional>
#include <string>
#include <utility>

#include "generators.hpp"
#include "sld/store.hpp"

namespace sld::gen {

struct ModelRecord {
  store::TranslationState state = store::TranslationState::Draft;
  std::string captured_by;
  std::optional<std::string> reviewed_by;
};

inline store::Store workflow_store(std::size_t entries) {
  store::Store st;
  std::vector<store::LexicalEntry> es;
  for (std::size_t i = 0; i < entries; ++i) {
    store::LexicalEntry e;
    e.offset = static_cast<std::uint32_t>(1000 + i);
    e.id = store::entry_id(wn::PartOfSpeech::Noun, e.offset);
    e.lemma = "w" + std::to_string(i);
    e.gloss = "gloss " + std::to_string(i);
    es.push_back(std::move(e));
  }
  st.upsert_entries(std::move(es));
  using store::ActorRole;
  st.add_actor({"s1", "s1", ActorRole::SolverParticipant});
  st.add_actor({"s2", "s2", ActorRole::SolverParticipant});
  st.add_actor({"c", "c", ActorRole::CreativeExpert});
  st.add_actor({"t", "t", ActorRole::TechnicalExpert});
  st.add_actor({"o", "o", ActorRole::Organizer});
  return st;
}

/// Runs `steps` random actions against a fresh store and the model. Returns a description
/// of the first divergence, or an empty string when store and model agree throughout.
inline std::string workflow_trial(Rng& rng, std::size_t steps, store::Store* final_store = nullptr) {
  using store::Language;
  using store::TranslationState;
  const std::vector<std::string> actors = {"s1", "s2", "c", "t", "o", "ghost"};
  const std::map<std::string, int> ranks = {{"s1", 1}, {"s2", 1}, {"c", 2}, {"t", 2}, {"o", 3}};
  const std::size_t n_entries = 3;
  auto st = workflow_store(n_entries);
  std::map<std::pair<std::string, Language>, ModelRecord> model;

  for (std::size_t step = 0; step < steps; ++step) {
    const auto& id = st.entries()[uniform(rng, 0, n_entries - 1)].id;
    const Language lang = coin(rng) ? Language::ES : Language::FR;
    const std::string& actor = pick(rng, actors);
    const auto action = uniform(rng, 0, 2);
    auto key = std::make_pair(id, lang);
    auto it = model.find(key);

    std::optional<Errc> expected;
    std::optional<ModelRecord> next;
    std::string text = coin(rng, 0.1) ? std::string(" \t") : "t" + std::to_string(step);

    if (!ranks.count(actor)) {
      expected = Errc::UnknownActor;
    } else if (action == 0) {  // draft
      if (it != model.end() && it->second.state == TranslationState::Reviewed) expected = Errc::AlreadyReviewed;
      else if (it != model.end() && it->second.state == TranslationState::Captured) expected = Errc::WorkflowConflict;
      else next = ModelRecord{TranslationState::Draft, actor, std::nullopt};
    } else if (action == 1) {  // capture
      if (text.find('t') == std::string::npos) expected = Errc::EmptyText;
      else if (it != model.end() && it->second.state == TranslationState::Reviewed) expected = Errc::AlreadyReviewed;
      else next = ModelRecord{TranslationState::Captured, actor, std::nullopt};
    } else {  // review
      if (it == model.end() || it->second.state != TranslationState::Captured) expected = Errc::NotCaptured;
      else if (it->second.captured_by == actor) expected = Errc::SelfReview;
      else if (ranks.at(actor) <= 1) expected = Errc::InsufficientRank;
      else next = ModelRecord{coin(rng) ? TranslationState::Reviewed : TranslationState::Rejected,
                              it->second.captured_by, actor};
    }

    std::optional<Errc> got;
    try {
      if (action == 0) st.save_draft(id, lang, text, std::nullopt, actor);
      else if (action == 1) st.capture_translation(id, lang, text, std::nullopt, actor);
      else {
        auto verdict = next && next->state == TranslationState::Rejected ? store::Verdict::Reject : store::Verdict::Approve;
        st.review_translation(id, lang, actor, verdict);
      }
    } catch (const Error& e) {
      got = e.code();
    }

    const std::string where = "step " + std::to_string(step) + " action " + std::to_string(action) + " by " + actor;
    if (got != expected) {
      return where + ": expected " + (expected ? std::string(errc_name(*expected)) : "success") + ", got " +
             (got ? std::string(errc_name(*got)) : "success");
    }
    if (next) model[key] = *next;

    const auto* rec = st.find(id)->translation(lang);
    auto m = model.find(key);
    if ((rec == nullptr) != (m == model.end())) return where + ": record presence differs";
    if (rec && (rec->state != m->second.state || rec->captured_by != m->second.captured_by ||
                rec->reviewed_by != m->second.reviewed_by)) {
      return where + ": record differs from model";
    }
    try {
      st.check_invariants();
    } catch (const Error& e) {
      return where + ": " + e.what();
    }
  }
  if (final_store) *final_store = std::move(st);
  return {};
}

}  // namespace sld::gen
