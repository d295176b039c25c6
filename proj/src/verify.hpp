#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "learner.hpp"
#include "sampling.hpp"
#include "strips.hpp"
#include "trace_graph.hpp"

namespace sift {

struct Witness {
    NodeId node = 0;
    GroundAction action;
    std::string detail;  // violated precondition, or why a probe failed

    auto operator<=>(const Witness&) const = default;
};

struct CheckReport {
    std::size_t obligations = 0;   // evaluated preconditions, or inapplicable probes
    std::size_t failures = 0;
    std::size_t incomparable = 0;  // edges whose action has no learned schema
    std::vector<Witness> witnesses;  // the smallest few, sorted

    bool passed() const noexcept { return failures == 0; }
};

/// No false positives: fails where a learned precondition of an executed
/// action is defined and false at its pre-state, or where propagation conflicts.
CheckReport check_compatibility(const LearnedModel& model, const TraceGraph& test, std::size_t workers = 1);

/// No false negatives: for each trace, each of its prefixes and each action of
/// that trace the hidden task rejects at the prefix end, some learned
/// precondition must be defined and false there.
CheckReport check_inapplicability(const LearnedModel& model, const GroundTask& hidden, const Sample& test,
                                  std::size_t workers = 1);

struct InputReport {
    std::string name;
    CheckReport compatibility;
    CheckReport inapplicability;

    bool passed() const noexcept { return compatibility.passed() && inapplicability.passed(); }
};

struct VerificationReport {
    std::vector<InputReport> inputs;

    bool passed() const noexcept;
    std::string to_json() const;
};

struct NamedSample {
    std::string name;
    Sample sample;
};

VerificationReport verify(const LearnedModel& model, const GroundTask& hidden, std::span<const NamedSample> tests,
                          std::size_t workers = 1);

/// Fraction of passing runs. Throws EmptyInputError for zero runs.
double verification_rate(std::span<const bool> runs);

struct ReplayResult {
    bool ok = true;
    std::size_t failed_step = 0;  // meaningful when !ok
    std::string reason;
};

/// Three-valued execution in the learned instance: atoms absent from the
/// initial state are unknown, and only a known-false precondition blocks.
ReplayResult replay(const LearnedModel& model, std::span<const GroundAction> trace);

}  // namespace sift
