#include "doctest.h"

#include "panto/propagate.hpp"

using namespace panto;

namespace {

Term P(const char* s) { return parseTerm(s); }

std::vector<std::string> ruleNames(const StepTrace& t) {
    std::vector<std::string> out;
    for (const auto& e : t) out.push_back(toString(e.rule));
    return out;
}

SchedulerConfig checked() {
    SchedulerConfig c;
    c.checkInvariants = true;
    return c;
}

}  // namespace

TEST_CASE("rule names round-trip") {
    CHECK(allRules().size() == 20);
    for (RuleId r : allRules()) CHECK(parseRuleId(toString(r)) == r);
    CHECK(!parseRuleId("StepInside"));
}

TEST_CASE("unifyDiff decompositions") {
    MetaSubst inst{{kMetaA, tInt()}};
    Diff d = parseDiff("(+ (-> Bool @) (id Int))");
    auto u = unifyDiff(tMeta(kMetaA), d, inst);
    REQUIRE(u);
    CHECK(u->focus.empty());
    CHECK(u->sigma.at(kMetaA) == d);

    Term let = P("(let x Int (lit 1) (var x))");
    TypingRule r = ruleFor(let);
    MetaSubst li = ruleInstance(let, {});
    Diff jd = parseJudgementDiff(readOne("(|- (id (ext x empty Int)) (+ (-> Bool @) (id Int)))")).asDiff();
    // The context entry and the type both mention A, but only the type changes.
    auto v = unifyDiff(r.premises[0], jd, li);
    REQUIRE(v);
    CHECK(v->focus == std::vector<size_t>{1});
    CHECK(v->sigma.size() == 1);

    Term lit = P("(lit 1)");
    Diff clash = parseJudgementDiff(readOne("(|- (id empty) (replace Int Bool))")).asDiff();
    CHECK(!unifyDiff(ruleFor(lit).conclusion, clash, ruleInstance(lit, {})));

    Term cons = P("(cons Int)");
    Diff twice = parseJudgementDiff(readOne("(|- (id empty) (congr -> (replace Int Bool) (congr -> (congr List (replace "
                                            "Int Bool)) (congr List (replace Int Bool)))))"))
                     .asDiff();
    auto w = unifyDiff(ruleFor(cons).conclusion, twice, ruleInstance(cons, {}));
    REQUIRE(w);
    CHECK(w->focus == std::vector<size_t>{1});

    Diff unequal = parseJudgementDiff(readOne("(|- (id empty) (congr -> (replace Int Bool) (congr -> (congr List (replace "
                                              "Int Int)) (congr List (replace Int Bool)))))"))
                       .asDiff();
    CHECK(!unifyDiff(ruleFor(cons).conclusion, unequal, ruleInstance(cons, {})));
}

TEST_CASE("neutral forms") {
    CHECK(isNeutral(P("(lam f (-> Int Int) (var f))").kids[0]));
    CHECK(isNeutral(P("(app (app (cons Int) (lit 1)) (nil Int))")));
    CHECK(!isNeutral(P("(lam x Int (var x))")));
    CHECK(!isNeutral(P("(app (lam x Int (var x)) (lit 1))")));
    Term t = P("(lam f (-> Int Int) (app (var f) (lit 1)))");
    CHECK(!isMaximalNeutral(t, {0, 0}));
    CHECK(isMaximalNeutral(t, {0}));
    // A boundary between the head and its application does not make the head maximal.
    Term b = P("(lam f (-> Int Int) (app (down (|- (congr (ext f) (congr empty) (congr -> (congr Int) (congr Int))) "
               "(congr -> (congr Int) (congr Int))) (var f)) (lit 1)))");
    CHECK(!isMaximalNeutral(b, {0, 0, 0}));
}

TEST_CASE("walkthrough trace") {
    Term start = P(
        "(app (lam x Int (var x)) (up (|- (congr empty) (+ (-> Bool @) (congr Int))) (lam y Bool (lit 10))))");
    CHECK(applicableRule(start, {1}) == RuleId::PropagateUp);
    auto r = normalize(start, checked());
    CHECK(ruleNames(r.trace) ==
          std::vector<std::string>{"PropagateUp", "PropagateDown", "PropagateVarDown1", "InsertAppUp", "IdentityUp"});
    CHECK(r.trace[0].path == TermPath{1});
    CHECK(r.trace[1].path == TermPath{0});
    CHECK(r.trace[2].path == TermPath{0, 0});
    CHECK(toString(r.program) == "(app (lam x (-> Bool Int) (app (var x) (hole Bool))) (lam y Bool (lit 10)))");
    CHECK(!r.finalTypeChange);
    CHECK(r.trace.back().hash == programHash(r.program));
}

TEST_CASE("both orders of the commuting example reach f") {
    Ctx g{{"f", parseType("(-> Int (-> Bool Bool))")}};
    const char* text = "(down (|- (id (ext f empty (-> Int (-> Bool Bool)))) (+ (-> Int @) (id (-> Bool Bool)))) "
                       "(up (|- (id (ext f empty (-> Int (-> Bool Bool)))) (+ (-> Int @) (id (-> Bool Bool)))) (var f)))";
    Term wrapped = mkLam("f", g[0].ty, parseTerm(text, g));
    Term expected = P("(lam f (-> Int (-> Bool Bool)) (var f))");
    REQUIRE(!typeCheck({}, wrapped));

    // Hand-built: a down boundary above an up one is not an edit-reachable shape, so no metric checks.
    auto a = normalize(wrapped);
    CHECK(a.program == expected);
    CHECK(ruleNames(a.trace).front() == "InsertAppUp");

    // The other order starts by wrapping a lambda around the down boundary's body.
    auto b0 = applyRule(wrapped, {0}, RuleId::InsertAbsDown);
    REQUIRE(b0);
    CHECK(!typeCheck({}, *b0));
    auto b = normalize(*b0);
    CHECK(b.program == expected);
    std::vector<std::string> names = ruleNames(b.trace);
    CHECK(names.front() == "Interchange1");
    CHECK(std::find(names.begin(), names.end(), "DeleteAbsUp") != names.end());

    for (uint64_t seed = 0; seed < 10; ++seed) CHECK(normalize(wrapped, SchedulerConfig::seeded(seed)).program == expected);
}

TEST_CASE("applicable rule examples") {
    Term t = P("(down (|- (id empty) (+ (-> Bool @) (id Int))) (app (free g (-> Bool Int)) (hole Bool)))");
    REQUIRE(!typeCheck({}, t));
    CHECK(applicableRule(t, {}) == RuleId::DeleteAppDown);
    Term id = P("(down (|- (id empty) (id Int)) (lit 1))");
    CHECK(applicableRule(id, {}) == RuleId::IdentityDown);
    Term top = P("(up (|- (id empty) (+ (-> Bool @) (id Int))) (lam y Bool (lit 1)))");
    CHECK(!applicableRule(top, {}));
}

TEST_CASE("variable rules") {
    Term del = P("(lam y Int (down (|- (- (ext x @ Bool) (id (ext y empty Int))) (id Bool)) (var x)))");
    REQUIRE(!typeCheck({}, del));
    CHECK(applicableRule(del, {0}) == RuleId::LocalToFree);
    CHECK(toString(normalize(del).program) == "(lam y Int (free x Bool))");

    Term add = P("(lam y Int (lam x Bool (down (|- (+ (ext x @ Bool) (id (ext y empty Int))) (id Bool)) (free x "
                 "Bool))))");
    REQUIRE(!typeCheck({}, add));
    CHECK(applicableRule(add, {0, 0}) == RuleId::FreeToLocal);
    CHECK(toString(normalize(add).program) == "(lam y Int (lam x Bool (var x)))");

    Term reindex = P("(lam y Int (lam z Bool (down (|- (+ (ext z @ Bool) (id (ext y empty Int))) (id Int)) (var "
                     "y))))");
    REQUIRE(!typeCheck({}, reindex));
    auto r = normalize(reindex);
    CHECK(toString(r.program) == "(lam y Int (lam z Bool (var y)))");
    CHECK(subterm(r.program, {0, 0}).index == 1);
}

TEST_CASE("neutral error keeps a type change local") {
    // f is used at Int but its argument changed to a Bool.
    Term t = P("(lam f (-> Int Int) (app (var f) (down (|- (id (ext f empty (-> Int Int))) (replace Bool Int)) "
               "(true))))");
    REQUIRE(!typeCheck({}, t));
    auto r = normalize(t, checked());
    CHECK(!typeCheck({}, r.program));
    CHECK(ruleNames(r.trace) == std::vector<std::string>{"FallthroughErrorDown"});
    CHECK(toString(r.program) == "(lam f (-> Int Int) (app (var f) (err Bool Int (true))))");
}

TEST_CASE("nonlinear conclusion reflects upward") {
    // Changing the element type at cons pushes the change out to the list positions.
    Term t = P("(down (|- (id empty) (congr -> (replace Int Bool) (id (-> (List Int) (List Int))))) (cons Int))");
    REQUIRE(!typeCheck({}, t));
    auto s = stepOnce(t);
    REQUIRE(s);
    CHECK(s->entry.rule == RuleId::NeutralErrorDown);
    Term head = P("(app (down (|- (id empty) (congr -> (replace Int Bool) (id (-> (List Int) (List Int))))) (cons "
                  "Int)) (true))");
    CHECK(applicableRule(head, {0}) == RuleId::PropagateDown);
    auto h = applyRule(head, {0}, RuleId::PropagateDown);
    REQUIRE(h);
    CHECK(toString(*h) ==
          "(app (up (|- (congr empty) (congr -> (congr Bool) (congr -> (congr List (replace Int Bool)) (congr List "
          "(replace Int Bool))))) (cons Bool)) (true))");
}

TEST_CASE("metric ordering") {
    CHECK(metric(P("(lit 1)")).empty());
    Metric big{{1, 3, 0}}, small{{1, 2, 5}, {0, 9, 9}};
    CHECK(metricDecreases(big, small));
    CHECK(!metricDecreases(small, big));
    CHECK(!metricDecreases(big, big));
    CHECK(metricDecreases(big, {}));
}

TEST_CASE("invariant monitors") {
    CHECK(monitorInvariants(P("(lit 1)")).empty());
    Term bad = P("(down (|- (id empty) (replace Int Bool)) (app (up (|- (id empty) (+ (-> Bool @) "
                 "(id (-> Int Int)))) (lam b Bool (lam x Int (var x)))) (lit 1)))");
    REQUIRE(!typeCheck({}, bad));
    auto v = monitorInvariants(bad);
    CHECK(!v.empty());
}
