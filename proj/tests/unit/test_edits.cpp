#include "doctest.h"

#include <fstream>
#include <sstream>

#include "panto/edits.hpp"

using namespace panto;

namespace {

Term P(const char* s) { return parseTerm(s); }

JudgementDiff J(const char* s) { return parseJudgementDiff(readOne(s)); }

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string figure(const std::string& name) { return slurp(std::string(PANTO_TEST_DATA) + "/figures/" + name); }

// Replays a figure's script and prints like `panto-cli run`.
std::string replay(const std::string& fig) {
    EditState st{parseTerm(figure(fig + "_before.pt")), std::nullopt};
    std::optional<Diff> change;
    for (const auto& a : parseEditScript(figure(fig + "_edit.ps"))) {
        auto out = applyEdit(st, a);
        if (out.finalTypeChange) change = change ? compose(*change, *out.finalTypeChange) : *out.finalTypeChange;
    }
    std::string s = toString(st.program) + "\n";
    if (change && !isIdentity(*change)) s += "; type change: " + toString(*change) + "\n";
    return s;
}

}  // namespace

TEST_CASE("term contexts plug and concatenate") {
    TermContext outer = parseTermContext("(app (var f) @)", {{"f", tArrow(tInt(), tInt())}});
    TermContext inner = parseTermContext("(lam x Bool @)");
    Term t = P("(lit 3)");
    CHECK(plug(termContextConcat(outer, inner), t) == plug(outer, plug(inner, t)));
    CHECK(toString(termContextConcat(outer, inner), {{"f", tArrow(tInt(), tInt())}}) == "(app (var f) (lam x Bool @))");

    Term prog = P("(lam y Int (app (lam x Int (var x)) (var y)))");
    TermContext along = contextAlong(prog, {0, 0});
    CHECK(along.size() == 2);
    CHECK(plug(along, subterm(prog, {0, 0})) == prog);
}

TEST_CASE("tooth diffs") {
    CHECK(toothDiff(parseTermContext("(lam x Int @)")[0], {}, tBool()) ==
          J("(|- (- (ext x @ Int) (id empty)) (+ (-> Int @) (id Bool)))"));

    Ctx g{{"f", parseType("(-> Int Bool)")}};
    CHECK(toothDiff(parseTermContext("(app @ (lit 1))", g)[0], g, parseType("(-> Int Bool)")) ==
          J("(|- (id (ext f empty (-> Int Bool))) (- (-> Int @) (id Bool)))"));
    CHECK(toothDiff(parseTermContext("(app (var f) @)", g)[0], g, tInt()) ==
          J("(|- (id (ext f empty (-> Int Bool))) (replace Int Bool))"));
    CHECK_THROWS_AS(toothDiff(parseTermContext("(app (var f) @)", g)[0], g, tBool()), EditError);

    // The let body sees the binder; the definition's type must match the annotation.
    CHECK(toothDiff(parseTermContext("(let x Int (lit 1) @)")[0], {}, tBool()) ==
          J("(|- (- (ext x @ Int) (id empty)) (id Bool))"));
    CHECK_THROWS_AS(toothDiff(parseTermContext("(let x Int (true) @)")[0], {}, tBool()), EditError);

    CHECK(toothDiff(parseTermContext("(err Int Bool @)")[0], {}, tInt()) == J("(|- (id empty) (replace Int Bool))"));
}

TEST_CASE("path diff composes tooth diffs innermost first") {
    Ctx g{{"f", parseType("(-> (-> Int Int) Bool)")}};
    TermContext c = parseTermContext("(app (var f) (lam x Int @))", g);
    REQUIRE(c.size() == 2);
    JudgementDiff inner = toothDiff(c[0], toothTyping(c[1], g, tArrow(tInt(), tInt())).innerCtx, tInt());
    JudgementDiff outer = toothDiff(c[1], g, tArrow(tInt(), tInt()));
    CHECK(pathDiff(c, g, tInt()) == compose(inner, outer));

    JudgementDiff none = pathDiff({}, g, tInt());
    CHECK(none.isIdentity());
    CHECK(right(none.ty) == tInt());
}

TEST_CASE("inserting an empty path changes nothing") {
    Term p = P("(app (lam x Int (var x)) (lit 10))");
    auto out = insertPath(p, {1}, {});
    CHECK(out.program == p);
    CHECK(!out.finalTypeChange);
}

TEST_CASE("inserting a lambda at an argument retypes the function") {
    Term p = P("(app (lam x Int (var x)) (lit 10))");
    auto out = insertPath(p, {1}, parseTermContext("(lam y Bool @)"));
    CHECK(toString(out.program) == "(app (lam x (-> Bool Int) (app (var x) (hole Bool))) (lam y Bool (lit 10)))");
    CHECK(!out.finalTypeChange);
    CHECK(!typeCheck({}, out.program));
}

TEST_CASE("fill and dig are inverse") {
    Term p = P("(lam x Int (app (lam y Int (var y)) (hole Int)))");
    Term filled = fillHole(p, {0, 1}, parseTerm("(var x)", {{"x", tInt()}}));
    CHECK(toString(filled) == "(lam x Int (app (lam y Int (var y)) (var x)))");
    CHECK(dig(filled, {0, 1}) == p);
    CHECK_THROWS_AS(fillHole(p, {0, 1}, P("(true)")), EditError);
    CHECK_THROWS_AS(fillHole(p, {0, 0}, P("(lit 1)")), EditError);
}

TEST_CASE("deleting a binder leaves a free variable") {
    Term p = P("(lam x Int (lam y Bool (var x)))");
    auto out = deleteSelection(p, {{}, {0}});
    CHECK(toString(out.program) == "(lam y Bool (free x Int))");
    REQUIRE(out.finalTypeChange);
    CHECK(left(*out.finalTypeChange) == parseType("(-> Int (-> Bool Int))"));
    CHECK(right(*out.finalTypeChange) == parseType("(-> Bool Int)"));
}

TEST_CASE("cut then paste at the same place restores the program") {
    Term p = parseTerm(figure("fig1_before.pt"));
    Selection sel{{0, 0, 0, 0, 0, 1}, {0, 1}};
    auto c = cut(p, sel);
    CHECK(c.outcome.program != p);
    auto back = paste(c.outcome.program, sel.outer, c.clip);
    CHECK(back.program == p);
    CHECK(!back.finalTypeChange);

    // Empty middle: the term goes to the clipboard and a hole is left.
    auto t = cut(p, {{0, 0, 0, 0, 0, 1, 1}, {}});
    CHECK(subterm(t.outcome.program, {0, 0, 0, 0, 0, 1, 1}).kind == TermKind::Hole);
    CHECK(paste(t.outcome.program, {0, 0, 0, 0, 0, 1, 1}, t.clip).program == p);
}

TEST_CASE("paste rejects a clip that does not fit") {
    Term p = P("(app (lam x Int (var x)) (hole Int))");
    Clipboard b = TermClip{P("(true)"), {}, tBool()};
    CHECK_THROWS_AS(paste(p, {1}, b), EditError);
    // Terms only go into holes.
    Clipboard i = TermClip{P("(lit 2)"), {}, tInt()};
    CHECK_THROWS_AS(paste(p, {0}, i), EditError);
    CHECK(toString(paste(p, {1}, i).program) == "(app (lam x Int (var x)) (lit 2))");
    // A variable the cursor cannot see.
    Clipboard v = TermClip{parseTerm("(var z)", {{"z", tInt()}}), {{"z", tInt()}}, tInt()};
    CHECK_THROWS_AS(paste(p, {1}, v), EditError);
}

TEST_CASE("pasted variables are rebound by name") {
    Term p = P("(lam a Int (lam b Int (app (app (cons Int) (var a)) (app (app (cons Int) (var b)) (nil Int)))))");
    Clipboard clip = copy(p, {{0, 0, 0, 1}, {}});
    Term q = dig(p, {0, 0, 0, 1});
    Term r = paste(q, {0, 0, 0, 1}, clip).program;
    CHECK(r == p);
}

TEST_CASE("edit script syntax round-trips") {
    const char* text = "(insert (0 1) (lam f (-> Bool Bool) @))\n"
                       "(delete (0) (0 0))\n"
                       "(annotate-lam (0 0) (+ (-> Int @) (congr -> (congr Bool) (congr Bool))))\n"
                       "(annotate-let (0) (replace Int Bool))\n"
                       "(fill (1) (lit 3))\n"
                       "(dig ())\n"
                       "(cut (0) (1))\n"
                       "(copy (0) ())\n"
                       "(paste (2 0))\n"
                       "(move (0) (1) (0 1))\n";
    auto actions = parseEditScript(text);
    REQUIRE(actions.size() == 10);
    std::string again;
    for (const auto& a : actions) again += toString(a) + "\n";
    CHECK(again == text);
    CHECK_THROWS_AS(parseEditScript("(frobnicate ())"), ParseError);
}

TEST_CASE("query menu") {
    Term ten = P("(lit 10)");
    auto lam = enumerateEdits(ten, {}, "lam", 0);
    REQUIRE(lam.size() == 1);
    EditState st{ten, std::nullopt};
    auto out = applyEdit(st, lam[0]);
    CHECK(toString(out.program) == "(lam x (? 0) (lit 10))");
    REQUIRE(out.finalTypeChange);
    CHECK(toString(*out.finalTypeChange) == "(+ (-> (? 0) @) (congr Int))");

    Term hole = P("(lam n Int (hole Int))");
    std::vector<std::string> labels;
    for (const auto& a : enumerateEdits(hole, {0}, "", nextTypeHole(hole))) labels.push_back(a.label);
    CHECK(labels == std::vector<std::string>{"lam", "let", "n", "lit"});
    CHECK(enumerateEdits(hole, {0}, "zzz", 0).empty());
    CHECK(nextTypeHole(P("(lam x (? 4) (hole (-> (? 1) Int)))")) == 5);
}

TEST_CASE("figure goldens") {
    for (const char* fig : {"fig1", "fig5a", "fig5b", "fig5c", "fig5d", "fig5e", "fig6", "fig7", "fig8", "fig9"}) {
        CAPTURE(fig);
        CHECK(replay(fig) == figure(std::string(fig) + "_after.pt"));
    }
}
