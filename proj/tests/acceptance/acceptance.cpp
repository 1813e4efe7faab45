// One PASS/FAIL line per acceptance criterion; exit status 1 when any fails.
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "../common/gen_edits.hpp"
#include "panto/session.hpp"

using namespace panto;
using namespace panto::testgen;

namespace {

int failures = 0;

void report(const std::string& name, bool ok, const std::string& detail) {
    if (!ok) ++failures;
    std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
}

std::string slurp(const std::string& rel) {
    std::ifstream in(std::string(PANTO_TEST_DATA) + "/" + rel, std::ios::binary);
    if (!in) throw std::runtime_error("missing test data " + rel);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double secondsSince(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void categoryLaws() {
    auto t0 = std::chrono::steady_clock::now();
    Rng rng(1001);
    size_t idFail = 0, assocFail = 0, endpointFail = 0;
    for (int i = 0; i < 10000; ++i) {
        Diff d = randomDiff(rng, 6);
        if (!(compose(identity(left(d)), d) == d) || !(compose(d, identity(right(d))) == d)) ++idFail;
    }
    for (int i = 0; i < 10000; ++i) {
        Diff d = randomDiff(rng, 6);
        Diff e = randomDiffFrom(rng, right(d), 6);
        Diff f = randomDiffFrom(rng, right(e), 6);
        Diff l = compose(compose(d, e), f);
        Diff r = compose(d, compose(e, f));
        if (!(l == r)) ++assocFail;
        if (endpoints(l) != endpoints(r)) ++endpointFail;
    }
    double secs = secondsSince(t0);
    std::ostringstream s;
    s << "identity failures " << idFail << "/10000, associativity failures " << assocFail
      << "/10000 (endpoint mismatches " << endpointFail << "), " << secs << " s";
    report("diff category laws", idFail == 0 && assocFail == 0 && secs < 10, s.str());
}

void flipLaws() {
    Rng rng(1002);
    size_t bad = 0;
    for (int i = 0; i < 10000; ++i) {
        Diff d = randomDiff(rng, 6);
        Diff f = flip(d);
        if (!(flip(f) == d) || !(left(f) == right(d)) || !(right(f) == left(d))) ++bad;
    }
    report("flip laws", bad == 0, std::to_string(bad) + "/10000 failures");
}

void walkthrough() {
    Term start = parseTerm(slurp("walkthrough/start.pt"));
    auto r = normalize(start);
    std::string trace;
    for (const auto& e : r.trace) trace += traceLine(e) + "\n";
    std::vector<std::string> rules;
    for (const auto& e : r.trace) rules.push_back(toString(e.rule));
    bool sequence = rules == std::vector<std::string>{"PropagateUp", "PropagateDown", "PropagateVarDown1",
                                                      "InsertAppUp", "IdentityUp"} &&
                    r.trace[0].path == TermPath{1} && r.trace[1].path == TermPath{0};
    bool traceGolden = trace == slurp("walkthrough/trace.jsonl");
    bool programGolden = toString(r.program) + "\n" == slurp("walkthrough/after.pt");
    report("walkthrough trace", sequence && traceGolden && programGolden,
           std::to_string(r.trace.size()) + " steps, rule sequence " + (sequence ? "matches" : "differs") +
               ", trace golden " + (traceGolden ? "matches" : "differs") + ", program " + toString(r.program));
}

std::string replayFigure(const std::string& fig) {
    EditState st{parseTerm(slurp("figures/" + fig + "_before.pt")), std::nullopt};
    std::optional<Diff> change;
    try {
        for (const auto& a : parseEditScript(slurp("figures/" + fig + "_edit.ps"))) {
            auto out = applyEdit(st, a);
            if (out.finalTypeChange) change = change ? compose(*change, *out.finalTypeChange) : *out.finalTypeChange;
        }
    } catch (const EditError& e) {
        return std::string("rejected: ") + e.what();
    }
    std::string s = toString(st.program) + "\n";
    if (change && !isIdentity(*change)) s += "; type change: " + toString(*change) + "\n";
    return s;
}

void figures() {
    std::vector<std::string> bad;
    const char* figs[] = {"fig1", "fig5a", "fig5b", "fig5c", "fig5d", "fig5e", "fig6", "fig7", "fig8", "fig9", "fig10"};
    for (const char* fig : figs) {
        size_t actions = parseEditScript(slurp(std::string("figures/") + fig + "_edit.ps")).size();
        if (actions != 1 || replayFigure(fig) != slurp(std::string("figures/") + fig + "_after.pt")) bad.push_back(fig);
    }
    std::string detail = std::to_string(std::size(figs) - bad.size()) + "/" + std::to_string(std::size(figs)) +
                         " reproduced byte-exactly";
    if (!bad.empty()) {
        detail += "; differing:";
        for (const auto& b : bad) detail += " " + b;
    }
    report("figures corpus", bad.empty(), detail);
}

struct FuzzCase {
    Term before;
    std::string edit;
    EditOutcome outcome;
};

struct Corpus {
    std::vector<FuzzCase> cases;
    size_t rejected = 0;
    size_t engineFailures = 0;
    std::vector<std::string> failureNotes;
};

Corpus buildCorpus(size_t n) {
    Corpus c;
    Rng rng(1003);
    while (c.cases.size() + c.engineFailures < n) {
        Term p = randomProgram(rng, 12, 40);
        for (int attempt = 0; attempt < 100; ++attempt) {
            GeneratedEdit e = randomEdit(rng, p);
            try {
                c.cases.push_back({p, e.what, e.run(p, {})});
                break;
            } catch (const PropagationFailure& f) {
                ++c.engineFailures;
                if (c.failureNotes.size() < 3) c.failureNotes.push_back(toString(p) + " / " + e.what + ": " + f.what());
                break;
            } catch (const EditError&) {
                ++c.rejected;
            }
        }
    }
    return c;
}

void preservation(const Corpus& c) {
    size_t bad = 0;
    std::string example;
    for (const auto& fc : c.cases) {
        const Term& after = fc.outcome.program;
        bool ok = !typeCheck({}, after) && boundarySites(after).empty();
        if (ok) {
            Ty before = infer({}, fc.before), now = infer({}, after);
            const auto& d = fc.outcome.finalTypeChange;
            ok = d ? left(*d) == before && right(*d) == now : before == now;
        }
        if (!ok) {
            ++bad;
            if (example.empty()) example = "; first: " + toString(fc.before) + " / " + fc.edit;
        }
    }
    std::string detail = std::to_string(c.cases.size()) + " edits applied (" + std::to_string(c.rejected) +
                         " rejected proposals redrawn), " + std::to_string(bad) + " ill-typed or mismatched results, " +
                         std::to_string(c.engineFailures) + " engine failures" + example;
    for (const auto& note : c.failureNotes) detail += "; " + note;
    report("preservation fuzz", bad == 0 && c.engineFailures == 0 && c.cases.size() >= 1000, detail);
}

struct ReplayStats {
    size_t steps = 0;
    size_t nonDecreasing = 0;        // every rule
    size_t nonDecreasingVar = 0;     // of which variable rules
    size_t monitorViolations = 0;    // uplemma and oneup
    size_t noAround = 0;
    std::string firstViolation;
    bool capped = false;
    Term final;
};

// Steps a configuration the way normalize does, checking the metric and monitors on every state.
ReplayStats replay(const Term& setup, const SchedulerConfig& cfg) {
    ReplayStats st;
    Scheduler sched(cfg);
    Term t = setup;
    auto monitor = [&](const Term& u) {
        for (const auto& v : monitorInvariants(u)) {
            if (v.property == "noaround") {
                ++st.noAround;
                continue;
            }
            ++st.monitorViolations;
            if (st.firstViolation.empty()) st.firstViolation = v.property + " at " + toString(v.path) + ": " + v.detail;
        }
    };
    monitor(t);
    for (;;) {
        if (st.steps >= cfg.stepCap) {
            st.capped = true;
            break;
        }
        if (auto s = sched.step(t)) {
            ++st.steps;
            if (!metricDecreases(metric(t), metric(s->program))) {
                ++st.nonDecreasing;
                if (metricExempt(s->entry.rule)) ++st.nonDecreasingVar;
            }
            t = std::move(s->program);
            monitor(t);
            continue;
        }
        if (t.kind == TermKind::Up) {
            Term body = std::move(t.kids[0]);
            t = std::move(body);
            continue;
        }
        break;
    }
    st.final = std::move(t);
    return st;
}

void terminationAndMonitors(const Corpus& c) {
    size_t steps = 0, nonDec = 0, nonDecVar = 0, capped = 0, mismatched = 0, violations = 0, noAround = 0;
    std::string firstViolation;
    for (const auto& fc : c.cases) {
        ReplayStats st = replay(fc.outcome.setup, {});
        steps += st.steps;
        nonDec += st.nonDecreasing;
        nonDecVar += st.nonDecreasingVar;
        capped += st.capped;
        violations += st.monitorViolations;
        noAround += st.noAround;
        if (firstViolation.empty() && !st.firstViolation.empty()) firstViolation = "; first: " + st.firstViolation;
        if (!(st.final == fc.outcome.program)) ++mismatched;
    }
    std::ostringstream t;
    t << c.cases.size() << " configurations, " << steps << " steps, " << capped << " hit the step cap, " << nonDec
      << " steps without strict metric decrease (" << nonDecVar << " of them variable rules, " << nonDec - nonDecVar
      << " other)";
    if (mismatched) t << ", " << mismatched << " replays disagree with the edit result";
    report("termination fuzz", capped == 0 && nonDec == 0 && mismatched == 0, t.str());
    report("invariant monitors", violations == 0,
           std::to_string(violations) + " up-shape or one-up-like violations over " +
               std::to_string(steps + c.cases.size()) + " states (" + std::to_string(noAround) +
               " states with a boundary above the up-like one, not part of this check)" + firstViolation);
}

void confluence(const Corpus& c) {
    size_t cases = std::min<size_t>(200, c.cases.size()), diverged = 0, errors = 0;
    std::string example;
    for (size_t i = 0; i < cases; ++i) {
        const auto& fc = c.cases[i];
        for (uint64_t seed = 0; seed < 20; ++seed) {
            try {
                auto r = normalize(fc.outcome.setup, SchedulerConfig::seeded(seed));
                if (!(r.program == fc.outcome.program) || r.finalTypeChange != fc.outcome.finalTypeChange) {
                    ++diverged;
                    if (example.empty())
                        example = "; first: " + fc.edit + " seed " + std::to_string(seed) + " gives " +
                                  toString(r.program) + " instead of " + toString(fc.outcome.program);
                }
            } catch (const EngineError&) {
                ++errors;
            }
        }
    }

    Ctx g{{"f", parseType("(-> Int (-> Bool Bool))")}};
    const char* text = "(down (|- (id (ext f empty (-> Int (-> Bool Bool)))) (+ (-> Int @) (id (-> Bool Bool)))) "
                       "(up (|- (id (ext f empty (-> Int (-> Bool Bool)))) (+ (-> Int @) (id (-> Bool Bool)))) (var f)))";
    Term wrapped = mkLam("f", g[0].ty, parseTerm(text, g));
    Term expected = parseTerm("(lam f (-> Int (-> Bool Bool)) (var f))");
    bool first = normalize(wrapped).program == expected;
    auto other = applyRule(wrapped, {0}, RuleId::InsertAbsDown);
    bool second = other && normalize(*other).program == expected;

    std::string detail = std::to_string(cases) + " cases x 20 seeds: " + std::to_string(diverged) + " divergent, " +
                         std::to_string(errors) + " engine errors; commuting example " +
                         (first && second ? "reaches f under both orders" : "does not reach f under both orders") +
                         example;
    report("confluence fuzz", cases == 200 && diverged == 0 && errors == 0 && first && second, detail);
}

void zipper() {
    Rng rng(1004);
    size_t roundTrips = 0, roundFail = 0, rejected = 0, unreducedNet = 0;
    std::string example;
    while (roundTrips + roundFail < 1000) {
        Term p = randomProgram(rng, 12, 40);
        Selection sel{randomPath(rng, p), {}};
        sel.middle = randomDescent(rng, subterm(p, sel.outer), 3);
        CutResult c;
        try {
            c = cut(p, sel);
        } catch (const PropagationFailure&) {
            ++roundFail;
            continue;
        } catch (const EditError&) {
            ++rejected;
            continue;
        }
        bool ok = false;
        try {
            auto back = paste(c.outcome.program, sel.outer, c.clip);
            std::optional<Diff> net = c.outcome.finalTypeChange;
            if (back.finalTypeChange) net = net ? compose(*net, *back.finalTypeChange) : *back.finalTypeChange;
            ok = back.program == p && (!net || left(*net) == right(*net));
            if (ok && net && !isIdentity(*net)) ++unreducedNet;
        } catch (const EditError&) {
        }
        if (ok) {
            ++roundTrips;
        } else {
            ++roundFail;
            if (example.empty()) example = "; first: " + toString(p) + " outer " + toString(sel.outer) + " middle " + toString(sel.middle);
        }
    }

    size_t agree = 0, disagree = 0;
    std::string pdExample;
    while (agree + disagree < 1000) {
        Term p = randomProgram(rng, 12, 40);
        TermPath outer = randomPath(rng, p);
        TermPath middle = randomDescent(rng, subterm(p, outer), 5);
        if (middle.empty()) continue;
        NodeJudgement top = judgementAt(p, outer);
        TermContext c = contextAlong(subterm(p, outer), middle);
        Ty innerTy = judgementAt(p, [&] {
                         TermPath q = outer;
                         q.insert(q.end(), middle.begin(), middle.end());
                         return q;
                     }()).ty;
        // Tooth i (innermost first) sits at outer + middle[0 .. n-1-i].
        std::optional<JudgementDiff> composed;
        Ty ty = innerTy;
        for (size_t i = 0; i < c.size(); ++i) {
            TermPath at = outer;
            at.insert(at.end(), middle.begin(), middle.end() - static_cast<long>(i) - 1);
            Ctx ctx = judgementAt(p, at).ctx;
            JudgementDiff d = toothDiff(c[i], ctx, ty);
            ty = toothTyping(c[i], ctx, ty).outerTy;
            composed = composed ? compose(*composed, d) : d;
        }
        if (pathDiff(c, top.ctx, innerTy) == collapseNoOpReplaces(*composed)) {
            ++agree;
        } else {
            ++disagree;
            if (pdExample.empty()) pdExample = "; first: " + toString(c, top.ctx);
        }
    }
    report("zipper round-trips", roundFail == 0 && disagree == 0,
           std::to_string(roundTrips) + "/1000 cut-then-paste identities (" + std::to_string(rejected) +
               " rejected selections redrawn; " + std::to_string(unreducedNet) +
               " of them report a net type change that returns to its start without composing to an identity), "
               "pathDiff agrees with composed tooth diffs on " + std::to_string(agree) +
               "/1000 paths" + example + pdExample);
}

void protocolDeterminism() {
    std::string log = slurp("session/log50.jsonl");
    auto run = [&] {
        SessionState s;
        std::istringstream in(log);
        std::string line, all, last;
        size_t n = 0;
        while (std::getline(in, line)) {
            last = handleLine(s, line);
            all += last + "\n";
            ++n;
        }
        return std::make_tuple(n, all, nlohmann::json::parse(last)["snapshot"].dump() + "\n");
    };
    auto [n1, all1, snap1] = run();
    auto [n2, all2, snap2] = run();
    bool golden = snap1 == slurp("session/final_snapshot.json");
    report("protocol determinism", n1 == 50 && all1 == all2 && golden,
           std::to_string(n1) + " requests; responses " + (all1 == all2 ? "identical" : "differ") +
               " across replays; final snapshot " + (golden ? "matches" : "differs from") +
               " the recorded golden; built without any web UI component");
}

}  // namespace

int main() {
    categoryLaws();
    flipLaws();
    walkthrough();
    figures();
    Corpus corpus = buildCorpus(1000);
    preservation(corpus);
    terminationAndMonitors(corpus);
    confluence(corpus);
    zipper();
    protocolDeterminism();
    return failures == 0 ? 0 : 1;
}
