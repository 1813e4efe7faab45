#include "panto/edits.hpp"

#include <algorithm>
#include <functional>

namespace panto {

namespace {

Term placeholder() { return mkHole(Ty{}); }

// Child slot of form `h` that holds item i of its S-expression, if that item is a term.
std::optional<size_t> childForItem(const std::string& h, size_t i) {
    if (h == "lam" && i == 3) return 0;
    if ((h == "app" || h == "ghost-app") && (i == 1 || i == 2)) return i - 1;
    if (h == "let" && (i == 3 || i == 4)) return i - 3;
    if (h == "match") {
        if (i == 1 || i == 2) return i - 1;
        if (i == 5) return 2;
    }
    if (h == "err" && i == 3) return 0;
    return std::nullopt;
}

bool containsHoleMarker(const SExpr& e) {
    if (e.isAtom) return e.atom == "@";
    return std::any_of(e.items.begin(), e.items.end(), containsHoleMarker);
}

Ctx ctxAt(const Term& root, const TermPath& p, const Ctx& rootCtx = {}) {
    Ctx ctx = rootCtx;
    const Term* cur = &root;
    for (size_t i : p) {
        if (i >= cur->kids.size()) throw EditError("path " + toString(p) + " does not address a term");
        ctx = childCtx(ctx, *cur, i);
        cur = &cur->kids[i];
    }
    return ctx;
}

const Term& at(const Term& root, const TermPath& p) {
    const Term* cur = &root;
    for (size_t i : p) {
        if (i >= cur->kids.size()) throw EditError("path " + toString(p) + " does not address a term");
        cur = &cur->kids[i];
    }
    return *cur;
}

Ty inferOrReject(const Ctx& ctx, const Term& t, const std::string& what) {
    try {
        return infer(ctx, t);
    } catch (const TypeError& e) {
        throw EditError(what + ": " + e.what());
    }
}

void requireType(const Ty& expected, const Ty& actual, const std::string& what) {
    if (!(expected == actual))
        throw EditError(what + ": expected " + toString(expected) + ", got " + toString(actual));
}

Ctx extend(Ctx c, const std::string& x, const Ty& a) {
    c.push_back({x, a});
    return c;
}

Diff dropBinding(const std::string& x, const Ty& a, Diff inner) {
    return minus(Tooth{Label::ctxExtend(x), 0, {a}}, std::move(inner));
}

bool hasBoundary(const Term& t) {
    if (isBoundary(t)) return true;
    return std::any_of(t.kids.begin(), t.kids.end(), hasBoundary);
}

void requireBoundaryFree(const Term& program) {
    if (hasBoundary(program)) throw EditError("the program still contains diff boundaries");
}

EditOutcome finish(const Term& configured, const SchedulerConfig& cfg) {
    try {
        NormalizeResult r = normalize(configured, cfg);
        return {std::move(r.program), std::move(r.finalTypeChange), std::move(r.trace), configured};
    } catch (const EngineError& e) {
        throw PropagationFailure(std::string("propagation failed: ") + e.what());
    }
}

Term replaceAt(const Term& program, const TermPath& p, Term t) {
    Term out = program;
    subterm(out, p) = std::move(t);
    return out;
}

// Maps variables free in t from `from` to the same-named bindings in `to`, keeping the
// position among equally named bindings so that shadowed references survive.
Term rebind(const Term& t, const Ctx& from, const Ctx& to) {
    if (from == to) return t;
    std::function<Term(const Term&, size_t)> go = [&](const Term& u, size_t depth) -> Term {
        Term out = u;
        if (u.kind == TermKind::Var && u.index >= depth) {
            size_t k = u.index - depth;
            if (k >= from.size()) throw EditError("variable " + u.name + " is out of scope");
            size_t pos = from.size() - 1 - k;
            const Binding& b = from[pos];
            size_t shadows = 0;
            for (size_t j = pos + 1; j < from.size(); ++j) shadows += from[j].name == b.name;
            for (size_t j = to.size(); j-- > 0;) {
                if (to[j].name != b.name) continue;
                if (shadows-- > 0) continue;
                if (!(to[j].ty == b.ty))
                    throw EditError("variable " + b.name + " has type " + toString(to[j].ty) + " here, not " +
                                    toString(b.ty));
                out.index = depth + (to.size() - 1 - j);
                return out;
            }
            throw EditError("variable " + b.name + " is not bound here");
        }
        for (size_t i = 0; i < u.kids.size(); ++i) {
            size_t added = 0;
            if (binds(u, i)) added = u.kind == TermKind::Match ? 2 : 1;
            out.kids[i] = go(u.kids[i], depth + added);
        }
        return out;
    };
    return go(t, 0);
}

TermPath holePositions(const TermContext& c) {
    TermPath p;
    for (size_t i = c.size(); i-- > 0;) p.push_back(c[i].hole);
    return p;
}

TermContext rebindContext(const TermContext& c, const Ctx& from, const Ctx& to) {
    if (from == to) return c;
    return contextAlong(rebind(plug(c, placeholder()), from, to), holePositions(c));
}

TermPath parsePathList(const SExpr& e) {
    if (e.isAtom) e.fail("expected a path such as (0 1)");
    TermPath p;
    for (const auto& it : e.items) {
        if (!it.isAtom || it.atom.empty() || !std::all_of(it.atom.begin(), it.atom.end(), ::isdigit))
            it.fail("expected a child index");
        p.push_back(std::stoul(it.atom));
    }
    return p;
}

std::optional<Diff> composeChanges(const std::optional<Diff>& a, const std::optional<Diff>& b) {
    if (!a || !b) {
        const auto& d = a ? a : b;
        return d && !isIdentity(*d) ? d : std::nullopt;
    }
    Diff d = collapseNoOpReplaces(compose(*a, *b));
    if (isIdentity(d)) return std::nullopt;
    return d;
}

}  // namespace

Term plug(const TermTooth& c, Term t) {
    Term out = c.node;
    out.kids.at(c.hole) = std::move(t);
    return out;
}

Term plug(const TermContext& c, Term t) {
    for (const auto& tooth : c) t = plug(tooth, std::move(t));
    return t;
}

TermContext termContextConcat(const TermContext& outer, const TermContext& inner) {
    TermContext out = inner;
    out.insert(out.end(), outer.begin(), outer.end());
    return out;
}

TermContext contextAlong(const Term& t, const TermPath& middle) {
    TermContext out;
    const Term* cur = &t;
    for (size_t i : middle) {
        if (i >= cur->kids.size()) throw EditError("path " + toString(middle) + " does not address a term");
        TermTooth c{*cur, i};
        c.node.kids[i] = placeholder();
        out.push_back(std::move(c));
        cur = &cur->kids[i];
    }
    std::reverse(out.begin(), out.end());
    return out;
}

TermContext parseTermContext(const SExpr& e, const Ctx& ctx) {
    TermContext outerFirst;
    Ctx cur = ctx;
    const SExpr* node = &e;
    while (!node->isAtomEq("@")) {
        std::string h = node->head();
        if (h.empty()) node->fail("expected a path containing '@'");
        std::optional<size_t> slot;
        size_t item = 0;
        for (size_t i = 1; i < node->items.size(); ++i) {
            if (!containsHoleMarker(node->items[i])) continue;
            if (slot) node->fail("a path has exactly one '@'");
            slot = childForItem(h, i);
            if (!slot) node->items[i].fail("'@' must stand for a term");
            item = i;
        }
        if (!slot) node->fail("expected a path containing '@'");
        SExpr filled = *node;
        filled.items[item] = readOne("(hole Int)");
        TermTooth tooth{parseTerm(filled, cur), *slot};
        tooth.node.kids[*slot] = placeholder();
        try {
            cur = childCtx(cur, tooth.node, *slot);
        } catch (const TypeError& err) {
            node->fail(err.what());
        }
        outerFirst.push_back(std::move(tooth));
        node = &node->items[item];
    }
    std::reverse(outerFirst.begin(), outerFirst.end());
    return outerFirst;
}

TermContext parseTermContext(std::string_view text, const Ctx& ctx) { return parseTermContext(readOne(text), ctx); }

std::string toString(const TermContext& c, const Ctx& ctx) {
    // Print with a marker hole and swap it for '@'.
    const std::string marker = "(hole (? 4294967295))";
    Term t = plug(c, mkHole(tHole(4294967295u)));
    std::string s = toString(t, ctx);
    size_t pos = s.find(marker);
    if (pos != std::string::npos) s.replace(pos, marker.size(), "@");
    return s;
}

ToothTyping toothTyping(const TermTooth& c, const Ctx& outerCtx, const Ty& innerTy) {
    const Term& n = c.node;
    Diff ctxId = identity(ctxToTree(outerCtx));
    ToothTyping r;
    r.innerCtx = outerCtx;
    r.jd.ctx = ctxId;
    auto kid = [&](size_t i, const Ctx& ctx) { return inferOrReject(ctx, n.kids[i], "sibling term"); };
    switch (n.kind) {
        case TermKind::Lam:
            r.innerCtx = extend(outerCtx, n.name, n.ty);
            r.outerTy = tArrow(n.ty, innerTy);
            r.jd.ctx = dropBinding(n.name, n.ty, ctxId);
            r.jd.ty = plus(Tooth{Label::arrow(), 1, {n.ty}}, identity(innerTy));
            return r;
        case TermKind::App:
            if (c.hole == 0) {
                Ty a = kid(1, outerCtx);
                if (innerTy.label.kind != LabelKind::Arrow || !(innerTy.kids[0] == a))
                    throw EditError("applied to an argument of type " + toString(a) + ", the hole needs a function "
                                    "from it, not " + toString(innerTy));
                r.outerTy = innerTy.kids[1];
                r.jd.ty = minus(Tooth{Label::arrow(), 1, {a}}, identity(r.outerTy));
            } else {
                Ty f = kid(0, outerCtx);
                if (f.label.kind != LabelKind::Arrow) throw EditError("applying a non-function of type " + toString(f));
                requireType(f.kids[0], innerTy, "argument");
                r.outerTy = f.kids[1];
                r.jd.ty = replace(innerTy, r.outerTy);
            }
            return r;
        case TermKind::Let: {
            r.innerCtx = extend(outerCtx, n.name, n.ty);
            r.jd.ctx = dropBinding(n.name, n.ty, ctxId);
            if (c.hole == 0) {
                requireType(n.ty, innerTy, "definition");
                r.outerTy = kid(1, r.innerCtx);
                r.jd.ty = replace(innerTy, r.outerTy);
            } else {
                requireType(n.ty, kid(0, r.innerCtx), "definition");
                r.outerTy = innerTy;
                r.jd.ty = identity(innerTy);
            }
            return r;
        }
        case TermKind::Match: {
            if (c.hole == 0) {
                if (innerTy.label.kind != LabelKind::List) throw EditError("matching on a non-list " + toString(innerTy));
                Ty nil = kid(1, outerCtx);
                Ctx inner = extend(extend(outerCtx, n.name, innerTy.kids[0]), n.name2, innerTy);
                requireType(nil, kid(2, inner), "cons branch");
                r.outerTy = nil;
                r.jd.ty = replace(innerTy, nil);
                return r;
            }
            Ty s = kid(0, outerCtx);
            if (s.label.kind != LabelKind::List) throw EditError("matching on a non-list " + toString(s));
            Ctx inner = extend(extend(outerCtx, n.name, s.kids[0]), n.name2, s);
            if (c.hole == 1) {
                requireType(innerTy, kid(2, inner), "cons branch");
            } else {
                requireType(innerTy, kid(1, outerCtx), "nil branch");
                r.innerCtx = inner;
                r.jd.ctx = dropBinding(n.name2, s, dropBinding(n.name, s.kids[0], ctxId));
            }
            r.outerTy = innerTy;
            r.jd.ty = identity(innerTy);
            return r;
        }
        case TermKind::GhostApp:
            if (c.hole == 0) {
                kid(1, outerCtx);
                r.outerTy = innerTy;
                r.jd.ty = identity(innerTy);
            } else {
                r.outerTy = kid(0, outerCtx);
                r.jd.ty = replace(innerTy, r.outerTy);
            }
            return r;
        case TermKind::Err:
            requireType(n.ty, innerTy, "error boundary body");
            r.outerTy = n.ty2;
            r.jd.ty = replace(innerTy, n.ty2);
            return r;
        default: throw EditError(formName(n.kind) + " has no term children to select through");
    }
}

JudgementDiff toothDiff(const TermTooth& c, const Ctx& outerCtx, const Ty& innerTy) {
    return toothTyping(c, outerCtx, innerTy).jd;
}

JudgementDiff pathDiff(const TermContext& c, const Ctx& outerCtx, const Ty& innerTy) {
    // Contexts flow inward from the outermost tooth; types flow outward from the hole.
    std::vector<Ctx> outside(c.size());
    Ctx cur = outerCtx;
    for (size_t i = c.size(); i-- > 0;) {
        outside[i] = cur;
        try {
            cur = childCtx(cur, c[i].node, c[i].hole);
        } catch (const TypeError& e) {
            throw EditError(e.what());
        }
    }
    JudgementDiff jd{identity(ctxToTree(cur)), identity(innerTy)};
    Ty ty = innerTy;
    for (size_t i = 0; i < c.size(); ++i) {
        ToothTyping t = toothTyping(c[i], outside[i], ty);
        jd = compose(jd, t.jd);
        ty = t.outerTy;
    }
    return collapseNoOpReplaces(jd);
}

EditOutcome insertPath(const Term& program, const TermPath& cursor, const TermContext& path,
                       const SchedulerConfig& cfg) {
    requireBoundaryFree(program);
    Ctx ctx = ctxAt(program, cursor);
    const Term& t = at(program, cursor);
    Ty ty = inferOrReject(ctx, t, "term at the cursor");
    JudgementDiff jd = pathDiff(path, ctx, ty);
    Tree ctxTree = ctxToTree(ctx);
    if (!(right(jd.ctx) == ctxTree))
        throw EditError("the path expects context " + toString(right(jd.ctx)) + " outside, the cursor has " +
                        toString(ctxTree));
    Term inner = mkDown({flip(jd.ctx), identity(ty)}, t);
    Term configured = mkUp({identity(ctxTree), jd.ty}, plug(path, std::move(inner)));
    return finish(replaceAt(program, cursor, std::move(configured)), cfg);
}

EditOutcome deleteSelection(const Term& program, const Selection& sel, const SchedulerConfig& cfg) {
    requireBoundaryFree(program);
    Ctx ctx = ctxAt(program, sel.outer);
    const Term& top = at(program, sel.outer);
    TermContext middle = contextAlong(top, sel.middle);
    const Term& t = at(top, sel.middle);
    Ctx innerCtx = ctxAt(top, sel.middle, ctx);
    Ty ty = inferOrReject(innerCtx, t, "selected term");
    JudgementDiff jd = pathDiff(middle, ctx, ty);
    Term configured = mkUp({identity(ctxToTree(ctx)), flip(jd.ty)}, mkDown({jd.ctx, identity(ty)}, t));
    return finish(replaceAt(program, sel.outer, std::move(configured)), cfg);
}

EditOutcome annotateLam(const Term& program, const TermPath& site, const Diff& delta, const SchedulerConfig& cfg) {
    requireBoundaryFree(program);
    const Term& lam = at(program, site);
    if (lam.kind != TermKind::Lam) throw EditError("no lambda at " + toString(site));
    requireType(lam.ty, left(delta), "annotation change starting point");
    if (!isType(right(delta))) throw EditError("the changed annotation is not a type");
    Ctx ctx = ctxAt(program, site);
    Ty body = inferOrReject(extend(ctx, lam.name, lam.ty), lam.kids[0], "lambda body");
    Diff ctxId = identity(ctxToTree(ctx));
    Term inner = mkDown({congr(Label::ctxExtend(lam.name), {ctxId, delta}), identity(body)}, lam.kids[0]);
    Term configured = mkUp({ctxId, congr(Label::arrow(), {delta, identity(body)})},
                           mkLam(lam.name, right(delta), std::move(inner)));
    return finish(replaceAt(program, site, std::move(configured)), cfg);
}

EditOutcome annotateLet(const Term& program, const TermPath& site, const Diff& delta, const SchedulerConfig& cfg) {
    requireBoundaryFree(program);
    const Term& let = at(program, site);
    if (let.kind != TermKind::Let) throw EditError("no let at " + toString(site));
    requireType(let.ty, left(delta), "annotation change starting point");
    if (!isType(right(delta))) throw EditError("the changed annotation is not a type");
    Ctx ctx = ctxAt(program, site);
    Ctx inner = extend(ctx, let.name, let.ty);
    Ty body = inferOrReject(inner, let.kids[1], "let body");
    Diff bound = congr(Label::ctxExtend(let.name), {identity(ctxToTree(ctx)), delta});
    Term configured = mkLet(let.name, right(delta), mkDown({bound, delta}, let.kids[0]),
                            mkDown({bound, identity(body)}, let.kids[1]));
    return finish(replaceAt(program, site, std::move(configured)), cfg);
}

Term fillHole(const Term& program, const TermPath& cursor, const Term& t) {
    const Term& h = at(program, cursor);
    if (h.kind != TermKind::Hole) throw EditError("no hole at " + toString(cursor));
    Ctx ctx = ctxAt(program, cursor);
    if (hasBoundary(t)) throw EditError("a filling cannot contain diff boundaries");
    requireType(h.ty, inferOrReject(ctx, t, "filling"), "filling");
    return replaceAt(program, cursor, t);
}

Term dig(const Term& program, const TermPath& cursor) {
    Ctx ctx = ctxAt(program, cursor);
    Ty ty = inferOrReject(ctx, at(program, cursor), "term at the cursor");
    return replaceAt(program, cursor, mkHole(ty));
}

Clipboard copy(const Term& program, const Selection& sel) {
    Ctx ctx = ctxAt(program, sel.outer);
    const Term& top = at(program, sel.outer);
    if (sel.middle.empty()) return TermClip{top, ctx, inferOrReject(ctx, top, "selected term")};
    TermContext middle = contextAlong(top, sel.middle);
    Ty ty = inferOrReject(ctxAt(top, sel.middle, ctx), at(top, sel.middle), "selected term");
    return PathClip{middle, ctx, ty, pathDiff(middle, ctx, ty)};
}

CutResult cut(const Term& program, const Selection& sel, const SchedulerConfig& cfg) {
    requireBoundaryFree(program);
    Clipboard clip = copy(program, sel);
    if (sel.middle.empty()) {
        Term t = dig(program, sel.outer);
        return {EditOutcome{t, std::nullopt, {}, t}, std::move(clip)};
    }
    return {deleteSelection(program, sel, cfg), std::move(clip)};
}

EditOutcome paste(const Term& program, const TermPath& cursor, const Clipboard& clip, const SchedulerConfig& cfg) {
    requireBoundaryFree(program);
    Ctx ctx = ctxAt(program, cursor);
    if (const auto* tc = std::get_if<TermClip>(&clip)) {
        const Term& h = at(program, cursor);
        if (h.kind != TermKind::Hole) throw EditError("a term can only be pasted into a hole");
        requireType(h.ty, tc->ty, "pasted term");
        Term t = replaceAt(program, cursor, rebind(tc->term, tc->ctx, ctx));
        return {t, std::nullopt, {}, t};
    }
    const auto& pc = std::get<PathClip>(clip);
    return insertPath(program, cursor, rebindContext(pc.path, pc.ctx, ctx), cfg);
}

EditAction parseEditAction(const SExpr& e) {
    std::string h = e.head();
    EditAction a;
    auto need = [&](size_t n) {
        if (e.items.size() != n) e.fail("(" + h + " ...) takes " + std::to_string(n - 1) + " arguments");
    };
    if (h == "insert") {
        need(3);
        a.kind = EditAction::Kind::Insert;
        a.at = parsePathList(e.items[1]);
        a.path = e.items[2];
    } else if (h == "delete" || h == "cut" || h == "copy") {
        need(3);
        a.kind = h == "delete" ? EditAction::Kind::Delete : h == "cut" ? EditAction::Kind::Cut : EditAction::Kind::Copy;
        a.at = parsePathList(e.items[1]);
        a.middle = parsePathList(e.items[2]);
    } else if (h == "move") {
        need(4);
        a.kind = EditAction::Kind::Move;
        a.at = parsePathList(e.items[1]);
        a.middle = parsePathList(e.items[2]);
        a.target = parsePathList(e.items[3]);
    } else if (h == "annotate-lam" || h == "annotate-let") {
        need(3);
        a.kind = h == "annotate-lam" ? EditAction::Kind::AnnotateLam : EditAction::Kind::AnnotateLet;
        a.at = parsePathList(e.items[1]);
        a.delta = parseDiff(e.items[2]);
    } else if (h == "fill") {
        need(3);
        a.kind = EditAction::Kind::Fill;
        a.at = parsePathList(e.items[1]);
        a.term = e.items[2];
    } else if (h == "dig" || h == "paste") {
        need(2);
        a.kind = h == "dig" ? EditAction::Kind::Dig : EditAction::Kind::Paste;
        a.at = parsePathList(e.items[1]);
    } else {
        e.fail("unknown edit action '" + h + "'");
    }
    return a;
}

std::vector<EditAction> parseEditScript(std::string_view text) {
    std::vector<EditAction> out;
    for (const auto& e : readAll(text)) out.push_back(parseEditAction(e));
    return out;
}

std::string toString(const EditAction& a) {
    using K = EditAction::Kind;
    std::string p = toString(a.at);
    switch (a.kind) {
        case K::Insert: return "(insert " + p + " " + toString(*a.path) + ")";
        case K::Delete: return "(delete " + p + " " + toString(a.middle) + ")";
        case K::Cut: return "(cut " + p + " " + toString(a.middle) + ")";
        case K::Copy: return "(copy " + p + " " + toString(a.middle) + ")";
        case K::Move: return "(move " + p + " " + toString(a.middle) + " " + toString(a.target) + ")";
        case K::AnnotateLam: return "(annotate-lam " + p + " " + toString(*a.delta) + ")";
        case K::AnnotateLet: return "(annotate-let " + p + " " + toString(*a.delta) + ")";
        case K::Fill: return "(fill " + p + " " + toString(*a.term) + ")";
        case K::Dig: return "(dig " + p + ")";
        case K::Paste: return "(paste " + p + ")";
    }
    return "";
}

EditOutcome applyEdit(EditState& state, const EditAction& a, const SchedulerConfig& cfg) {
    using K = EditAction::Kind;
    const Term& prog = state.program;
    auto readIn = [&](const SExpr& e, const Ctx& ctx) {
        try {
            return parseTerm(e, ctx);
        } catch (const ParseError& err) {
            throw EditError(err.what());
        }
    };
    EditOutcome out;
    switch (a.kind) {
        case K::Insert: {
            Ctx ctx = ctxAt(prog, a.at);
            TermContext path;
            try {
                path = parseTermContext(*a.path, ctx);
            } catch (const ParseError& err) {
                throw EditError(err.what());
            }
            out = insertPath(prog, a.at, path, cfg);
            break;
        }
        case K::Delete: out = deleteSelection(prog, {a.at, a.middle}, cfg); break;
        case K::AnnotateLam: out = annotateLam(prog, a.at, *a.delta, cfg); break;
        case K::AnnotateLet: out = annotateLet(prog, a.at, *a.delta, cfg); break;
        case K::Fill: {
            Term t = fillHole(prog, a.at, readIn(*a.term, ctxAt(prog, a.at)));
            out = {t, std::nullopt, {}, t};
            break;
        }
        case K::Dig: {
            Term t = dig(prog, a.at);
            out = {t, std::nullopt, {}, t};
            break;
        }
        case K::Copy:
            state.clipboard = copy(prog, {a.at, a.middle});
            return {prog, std::nullopt, {}, prog};
        case K::Cut: {
            CutResult r = cut(prog, {a.at, a.middle}, cfg);
            state.clipboard = std::move(r.clip);
            out = std::move(r.outcome);
            break;
        }
        case K::Paste:
            if (!state.clipboard) throw EditError("the clipboard is empty");
            out = paste(prog, a.at, *state.clipboard, cfg);
            break;
        case K::Move: {
            CutResult r = cut(prog, {a.at, a.middle}, cfg);
            EditOutcome second = paste(r.outcome.program, a.target, r.clip, cfg);
            second.finalTypeChange = composeChanges(r.outcome.finalTypeChange, second.finalTypeChange);
            r.outcome.trace.insert(r.outcome.trace.end(), second.trace.begin(), second.trace.end());
            second.trace = std::move(r.outcome.trace);
            state.clipboard = std::move(r.clip);
            out = std::move(second);
            break;
        }
    }
    state.program = out.program;
    return out;
}

uint32_t nextTypeHole(const Term& program) {
    uint32_t next = 0;
    std::function<void(const Tree&)> scanTy = [&](const Tree& t) {
        if (t.label.kind == LabelKind::TyHole) next = std::max(next, t.label.id + 1);
        for (const auto& k : t.kids) scanTy(k);
    };
    std::function<void(const Term&)> scan = [&](const Term& t) {
        scanTy(t.ty);
        scanTy(t.ty2);
        for (const auto& k : t.kids) scan(k);
    };
    scan(program);
    return next;
}

std::vector<EditAction> enumerateEdits(const Term& program, const TermPath& cursor, const std::string& query,
                                       uint32_t firstTypeHole) {
    std::vector<EditAction> candidates;
    Ctx ctx = ctxAt(program, cursor);
    const Term& t = at(program, cursor);
    Ty ty = inferOrReject(ctx, t, "term at the cursor");
    std::string fresh = toString(tHole(firstTypeHole));
    auto wrap = [&](const std::string& label, const std::string& path) {
        EditAction a;
        a.kind = EditAction::Kind::Insert;
        a.at = cursor;
        a.path = readOne(path);
        a.label = label;
        candidates.push_back(std::move(a));
    };
    auto fill = [&](const std::string& label, const Term& term) {
        EditAction a;
        a.kind = EditAction::Kind::Fill;
        a.at = cursor;
        a.term = readOne(toString(term, ctx));
        a.label = label;
        candidates.push_back(std::move(a));
    };
    std::string x = freshName("x", ctx, program);
    wrap("lam", "(lam " + x + " " + fresh + " @)");
    wrap("let", "(let " + x + " " + fresh + " (hole " + fresh + ") @)");
    if (ty.label.kind == LabelKind::Arrow) wrap("app", "(app @ (hole " + toString(ty.kids[0]) + "))");
    if (t.kind == TermKind::Hole) {
        for (size_t j = ctx.size(); j-- > 0;) {
            const Binding& b = ctx[j];
            bool shadowed = false;
            for (size_t k = j + 1; k < ctx.size(); ++k) shadowed |= ctx[k].name == b.name;
            if (!shadowed && b.ty == ty) fill(b.name, mkVar(b.name, ctx.size() - 1 - j));
        }
        if (ty == tInt()) fill("lit", mkInt("0"));
        if (ty == tBool()) {
            fill("true", mkBool(true));
            fill("false", mkBool(false));
        }
        if (ty.label.kind == LabelKind::List) fill("nil", mkNil(ty.kids[0]));
        if (ty.label.kind == LabelKind::Arrow) {
            Term body = mkHole(ty.kids[1]);
            fill("lam", mkLam(x, ty.kids[0], body));
            const Ty& e = ty.kids[0];
            if (ty.kids[1] == tArrow(tList(e), tList(e))) fill("cons", mkCons(e));
        }
    } else {
        EditAction a;
        a.kind = EditAction::Kind::Dig;
        a.at = cursor;
        a.label = "dig";
        candidates.push_back(std::move(a));
    }
    std::vector<EditAction> out;
    for (auto& a : candidates) {
        if (a.label.rfind(query, 0) != 0) continue;
        EditState probe{program, std::nullopt};
        try {
            applyEdit(probe, a);
        } catch (const EditError&) {
            continue;
        }
        out.push_back(std::move(a));
    }
    return out;
}

}  // namespace panto
