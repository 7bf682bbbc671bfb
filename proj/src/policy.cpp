#include "speechlen/policy.hpp"

#include <json.hpp>

#include "speechlen/error.hpp"

namespace speechlen {

using nlohmann::json;

void PolicyConfig::check() const {
  if (!(0 < min_words && min_words <= hold_floor_words &&
        hold_floor_words <= response_saturation_words)) {
    throw Error("policy config: need 0 < min_words <= hold_floor_words <= saturation");
  }
  if (session_budget_words < response_saturation_words) {
    throw Error("policy config: session budget must be at least the response saturation");
  }
  if (max_questions < 1) throw Error("policy config: max_questions must be at least 1");
}

PolicyConfig PolicyConfig::system1_preset() {
  PolicyConfig config;
  config.min_words = 50;
  config.hold_floor_words = 80;
  config.response_saturation_words = 120;
  return config;
}

std::string policy_config_to_json(const PolicyConfig& config) {
  json obj;
  obj["min_words"] = config.min_words;
  obj["hold_floor_words"] = config.hold_floor_words;
  obj["response_saturation_words"] = config.response_saturation_words;
  obj["session_budget_words"] = config.session_budget_words;
  obj["max_questions"] = config.max_questions;
  obj["defer_to_pause"] = config.defer_to_pause;
  return obj.dump(2) + "\n";
}

PolicyConfig policy_config_from_json_text(const std::string& text) {
  json obj;
  try {
    obj = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("policy config: parse error: ") + e.what());
  }
  if (!obj.is_object()) throw Error("policy config must be a JSON object");
  PolicyConfig config;
  try {
    for (const auto& [key, value] : obj.items()) {
      if (key == "min_words") config.min_words = value.get<int>();
      else if (key == "hold_floor_words") config.hold_floor_words = value.get<int>();
      else if (key == "response_saturation_words") config.response_saturation_words = value.get<int>();
      else if (key == "session_budget_words") config.session_budget_words = value.get<int>();
      else if (key == "max_questions") config.max_questions = value.get<int>();
      else if (key == "defer_to_pause") config.defer_to_pause = value.get<bool>();
      else throw Error("policy config: unknown key \"" + key + "\"");
    }
  } catch (const json::exception& e) {
    throw Error(std::string("policy config: ") + e.what());
  }
  config.check();
  return config;
}

const char* to_string(Decision decision) {
  switch (decision) {
    case Decision::CONTINUE_LISTENING: return "continue_listening";
    case Decision::ENCOURAGE_MORE: return "encourage_more";
    case Decision::PROMPT_NEW_QUESTION: return "prompt_new_question";
    case Decision::END_SESSION: return "end_session";
  }
  return "continue_listening";
}

const char* to_string(PolicyEvent event) {
  return event == PolicyEvent::PAUSE_DETECTED ? "pause_detected" : "words_updated";
}

PolicyDecision decide(const SessionState& state, const PolicyConfig& config) {
  config.check();
  const bool paused = state.last_event == PolicyEvent::PAUSE_DETECTED;
  const bool last_question = state.question_index >= config.max_questions;

  if (state.session_total_words >= config.session_budget_words &&
      state.current_response_words >= config.min_words) {
    return {Decision::END_SESSION, "session_budget_reached"};
  }
  if (state.current_response_words >= config.response_saturation_words &&
      (!config.defer_to_pause || paused)) {
    if (last_question) return {Decision::END_SESSION, "response_saturated_last_question"};
    return {Decision::PROMPT_NEW_QUESTION, "response_saturated"};
  }
  if (paused) {
    if (state.current_response_words < config.min_words) {
      return {Decision::ENCOURAGE_MORE, "below_min_words"};
    }
    if (state.current_response_words < config.hold_floor_words) {
      return {Decision::CONTINUE_LISTENING, "inside_hold_window"};
    }
    if (last_question) return {Decision::END_SESSION, "pause_past_hold_last_question"};
    return {Decision::PROMPT_NEW_QUESTION, "pause_past_hold"};
  }
  return {Decision::CONTINUE_LISTENING, "keep_listening"};
}

SessionState step(SessionState state, int words_delta) {
  if (words_delta < 0) throw Error("words_delta must be nonnegative");
  state.current_response_words += words_delta;
  state.session_total_words += words_delta;
  state.last_event = PolicyEvent::WORDS_UPDATED;
  return state;
}

SessionState pause(SessionState state) {
  state.last_event = PolicyEvent::PAUSE_DETECTED;
  return state;
}

SessionState advance_question(SessionState state) {
  ++state.question_index;
  state.current_response_words = 0;
  state.last_event = PolicyEvent::WORDS_UPDATED;
  return state;
}

ReplayResult simulate_replay(const Session& session, const PolicyConfig& config,
                             const Scorer& scorer) {
  config.check();
  if (!scorer.scores_tokens()) {
    throw Error("replay simulation needs a token-based scorer, not a score table");
  }

  ReplayResult result;
  std::vector<std::string> full_stream;
  for (const auto& r : session.responses) {
    full_stream.insert(full_stream.end(), r.tokens.begin(), r.tokens.end());
  }
  result.full_words = full_stream.size();

  SessionState state;
  std::size_t event_index = 0;
  bool ended = false;

  auto consult = [&](const SessionState& now) {
    const PolicyDecision d = decide(now, config);
    result.trace.push_back({event_index++, now, d.decision, d.reason});
    return d.decision;
  };

  for (const auto& response : session.responses) {
    if (ended) break;
    bool truncated = false;
    for (const auto& token : response.tokens) {
      state = step(state, 1);
      result.elicited_tokens.push_back(token);
      const Decision d = consult(state);
      if (d == Decision::PROMPT_NEW_QUESTION) {
        state = advance_question(state);
        truncated = true;  // rest of this recorded response is never heard
        break;
      }
      if (d == Decision::END_SESSION) {
        ended = true;
        break;
      }
    }
    if (ended || truncated) continue;
    // Natural end of the recorded response.
    state = pause(state);
    const Decision d = consult(state);
    if (d == Decision::END_SESSION) {
      ended = true;
    } else if (d == Decision::PROMPT_NEW_QUESTION) {
      state = advance_question(state);
    }
    // CONTINUE_LISTENING and ENCOURAGE_MORE leave the question open: the next
    // recorded response's words keep extending the current response.
  }

  result.elicited_words = result.elicited_tokens.size();
  result.score_full = scorer.score(session.session_id, full_stream,
                                   static_cast<int>(full_stream.size()));
  result.score_elicited = scorer.score(session.session_id, result.elicited_tokens,
                                       static_cast<int>(result.elicited_tokens.size()));
  return result;
}

}  // namespace speechlen
