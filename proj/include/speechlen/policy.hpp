#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "speechlen/corpus.hpp"
#include "speechlen/scorer.hpp"

namespace speechlen {

// Elicitation thresholds, in words. Defaults suit a strong scorer; the
// system1_preset suits a weaker one that saturates earlier.
struct PolicyConfig {
  int min_words = 50;                  // below this a response is too short to trust
  int hold_floor_words = 150;          // never cut a response off before this
  int response_saturation_words = 200; // past this, more words add little
  int session_budget_words = 1000;     // total words after which the session may end
  int max_questions = 6;
  // When true, a saturated response is only cut at the next pause rather than
  // immediately.
  bool defer_to_pause = false;

  void check() const;  // throws on invariant violations

  static PolicyConfig system1_preset();  // min 50, hold 80, saturation 120
};

std::string policy_config_to_json(const PolicyConfig& config);
PolicyConfig policy_config_from_json_text(const std::string& text);

enum class PolicyEvent { WORDS_UPDATED, PAUSE_DETECTED };

struct SessionState {
  int question_index = 1;  // 1-based
  int current_response_words = 0;
  int session_total_words = 0;
  PolicyEvent last_event = PolicyEvent::WORDS_UPDATED;
};

enum class Decision { CONTINUE_LISTENING, ENCOURAGE_MORE, PROMPT_NEW_QUESTION, END_SESSION };

const char* to_string(Decision decision);
const char* to_string(PolicyEvent event);

struct PolicyDecision {
  Decision decision = Decision::CONTINUE_LISTENING;
  std::string reason;  // stable reason code
};

// Pure function of (state, config). Rules in strict priority order:
//   1. total >= budget and response >= min        -> END_SESSION
//   2. response >= saturation                     -> PROMPT_NEW_QUESTION,
//      or END_SESSION on the last question        (skipped until a pause when
//                                                  defer_to_pause is set)
//   3. on a pause: response < min                 -> ENCOURAGE_MORE
//                  response < hold floor          -> CONTINUE_LISTENING
//                  otherwise                      -> PROMPT_NEW_QUESTION /
//                                                    END_SESSION on last question
//   4. otherwise                                  -> CONTINUE_LISTENING
PolicyDecision decide(const SessionState& state, const PolicyConfig& config);

// words_delta more words heard on the current response.
SessionState step(SessionState state, int words_delta);

// The speaker went quiet; only last_event changes.
SessionState pause(SessionState state);

// Caller applies a PROMPT_NEW_QUESTION decision: next question, fresh
// response counter, session total untouched.
SessionState advance_question(SessionState state);

struct ReplayStep {
  std::size_t event_index = 0;
  SessionState state;
  Decision decision = Decision::CONTINUE_LISTENING;
  std::string reason;
};

struct ReplayResult {
  std::vector<ReplayStep> trace;  // one entry per decision consulted
  std::size_t full_words = 0;
  std::size_t elicited_words = 0;
  std::vector<std::string> elicited_tokens;
  double score_full = 0.0;      // scorer on the complete recorded stream
  double score_elicited = 0.0;  // scorer on the policy-elicited stream
};

// Replays a recorded session against the policy, word by word with a pause at
// each response's natural end. PROMPT truncates the current response and the
// following recorded words answer the next question; CONTINUE/ENCOURAGE at a
// pause lets the next recorded words keep extending the current response;
// END stops the replay. Needs a token-based scorer.
ReplayResult simulate_replay(const Session& session, const PolicyConfig& config,
                             const Scorer& scorer);

}  // namespace speechlen
