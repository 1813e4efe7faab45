#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "panto/lang.hpp"

namespace panto {

enum class RuleId : uint8_t {
    PropagateDown,
    PropagateUp,
    PropagateVarDown1,
    PropagateVarDown2,
    InsertAbsDown,
    DeleteAbsDown,
    DeleteAbsUp,
    InsertAppUp,
    DisplaceAppUp,
    DeleteAppDown,
    LocalToFree,
    FreeToLocal,
    IdentityDown,
    IdentityUp,
    Interchange1,
    Interchange2,
    NeutralErrorDown,
    NeutralErrorUp,
    FallthroughErrorDown,
    FallthroughErrorUp,
};

std::string toString(RuleId r);
std::optional<RuleId> parseRuleId(std::string_view s);
const std::vector<RuleId>& allRules();

struct SchedulerConfig {
    enum class Mode { LeftmostOutermost, SeededRandom };
    Mode mode = Mode::LeftmostOutermost;
    uint64_t seed = 0;
    size_t stepCap = 100000;
    // Check the termination metric and the invariant monitors after every step.
    bool checkInvariants = false;

    // Default config with stepCap taken from PANTO_STEP_CAP when set.
    static SchedulerConfig fromEnv();
    static SchedulerConfig seeded(uint64_t seed);
};

struct TraceEntry {
    TermPath path;
    RuleId rule;
    std::string hash;  // of the program after the step
};
using StepTrace = std::vector<TraceEntry>;

// FNV-1a over the printed program, as 16 hex digits.
std::string programHash(const Term& program);
// {"path":[...],"rule":"...","hash":"..."}
std::string traceLine(const TraceEntry& e);

// Splits pattern = C[s'] at `focus` (child indices from the root of the pattern) so that
// the incoming diff is the identity on C and equals sigma applied to s'.
struct Unifier {
    std::vector<size_t> focus;
    DiffSubst sigma;
};
std::optional<Unifier> unifyDiff(const Tree& pattern, const Diff& incoming, const MetaSubst& instance);

// Variables and cons, applied (or ghost-applied) to any arguments, under any boundaries.
bool isNeutral(const Term& t);
// The node at site is neutral and is not the function of an application, looking through boundaries.
bool isMaximalNeutral(const Term& program, const TermPath& site);

// Addresses of every boundary, in pre-order.
std::vector<TermPath> boundarySites(const Term& program);

std::optional<RuleId> applicableRule(const Term& program, const TermPath& site);
// Applies one specific rule at site, bypassing precedence; nullopt when it does not match.
std::optional<Term> applyRule(const Term& program, const TermPath& site, RuleId rule);

struct StepResult {
    Term program;
    TraceEntry entry;
};

class Scheduler {
public:
    explicit Scheduler(SchedulerConfig cfg);
    std::optional<StepResult> step(const Term& program);
    const SchedulerConfig& config() const { return cfg_; }

private:
    SchedulerConfig cfg_;
    std::mt19937_64 rng_;
};

std::optional<StepResult> stepOnce(const Term& program, const SchedulerConfig& cfg = {});

struct EngineError : std::runtime_error {
    StepTrace trace;
    EngineError(const std::string& msg, StepTrace t);
};

struct NormalizeResult {
    Term program;
    std::optional<Diff> finalTypeChange;
    StepTrace trace;
};

// Steps until no boundary remains, stripping a residual top-level up boundary.
// Throws EngineError when the step cap is hit, a state is stuck, or a check fails.
NormalizeResult normalize(const Term& program, const SchedulerConfig& cfg = {});

struct BoundaryMetric {
    int udClass = 0;  // 1 = up-like
    size_t distance = 0;
    size_t count = 0;
    auto operator<=>(const BoundaryMetric&) const = default;
};
using Metric = std::vector<BoundaryMetric>;

Metric metric(const Term& program);
// Strict Dershowitz-Manna decrease from before to after.
bool metricDecreases(const Metric& before, const Metric& after);
// Rules exempt from the decrease check: the variable rules turn a down boundary into an up.
bool metricExempt(RuleId r);

struct InvariantViolation {
    std::string property;  // "uplemma", "oneup" or "noaround"
    TermPath path;
    std::string detail;
};
std::vector<InvariantViolation> monitorInvariants(const Term& program);

}  // namespace panto
