#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mca/forcing.hpp"
#include "mca/stepdyn.hpp"

namespace mca {

enum class Answer { kYes, kNo, kUnknown };
const char* to_string(Answer answer);

struct DecideParams {
  RateParams rates;
  int k_max = 8;
  int workers = 1;
};

struct RateCitation {
  State a = 0;
  State b = 0;
  Edge edge = Edge::kLeft;
  RateEstimate estimate;
};

struct Verdict {
  Answer answer = Answer::kUnknown;
  std::vector<RateCitation> rates;
  std::optional<ShrinkingCertificate> forcing;
  std::vector<State> chain;
  std::vector<Verdict> edges;  // per chain edge, for stable-eroder verdicts
  std::string note;            // budget report or reason
};

// Decides a,b-shrinking for quiescent a < b from forcing certificates and
// rate brackets; the two routes are cross-checked when both decide.
Verdict is_shrinking(const LocalRule& rule, State a, State b, const DecideParams& params = {},
                     const RateTable* table = nullptr);

Verdict is_eroder(const LocalRule& rule, const DecideParams& params = {},
                  const RateTable* table = nullptr);

Verdict is_stable_eroder(const LocalRule& rule, const DecideParams& params = {},
                         const RateTable* table = nullptr);

// Re-checks the certificate attached to a yes/no verdict from scratch.
bool revalidate_shrinking(const LocalRule& rule, State a, State b, const Verdict& verdict);
bool revalidate_stable(const LocalRule& rule, const Verdict& verdict);

struct BinaryReport {
  Answer eroder = Answer::kUnknown;
  Answer stable = Answer::kUnknown;
  Answer shrinking = Answer::kUnknown;
  Answer tau_empty = Answer::kUnknown;
  bool agree = true;  // all decided conditions coincide
};

BinaryReport binary_equivalence_check(const LocalRule& rule, const DecideParams& params = {});

}  // namespace mca
