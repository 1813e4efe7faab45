#include "panto/lang.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace panto {

bool isType(const Tree& t) {
    switch (t.label.kind) {
        case LabelKind::Int:
        case LabelKind::Bool:
        case LabelKind::TyHole: return true;
        case LabelKind::Arrow:
        case LabelKind::List:
            return std::all_of(t.kids.begin(), t.kids.end(), [](const Tree& k) { return isType(k); });
        default: return false;
    }
}

Tree ctxToTree(const Ctx& ctx) {
    Tree t(Label::emptyCtx());
    for (const auto& b : ctx) t = Tree(Label::ctxExtend(b.name), {std::move(t), b.ty});
    return t;
}

Ctx ctxFromTree(const Tree& t) {
    Ctx out;
    const Tree* cur = &t;
    while (cur->label.kind == LabelKind::CtxExtend) {
        if (!isType(cur->kids[1])) throw StructuralError("context entry is not a type: " + toString(cur->kids[1]));
        out.push_back({cur->label.name, cur->kids[1]});
        cur = &cur->kids[0];
    }
    if (cur->label.kind != LabelKind::EmptyCtx) throw StructuralError("not a context: " + toString(t));
    std::reverse(out.begin(), out.end());
    return out;
}

Tree toJudgementTree(const Ctx& ctx, const Ty& ty) { return Tree(Label::turnstile(), {ctxToTree(ctx), ty}); }

std::pair<Ctx, Ty> fromJudgementTree(const Tree& t) {
    if (t.label.kind != LabelKind::Turnstile) throw StructuralError("not a judgement: " + toString(t));
    if (!isType(t.kids[1])) throw StructuralError("judgement type is not a type: " + toString(t.kids[1]));
    return {ctxFromTree(t.kids[0]), t.kids[1]};
}

size_t Term::size() const {
    size_t n = 1;
    for (const auto& k : kids) n += k.size();
    return n;
}

size_t Term::depth() const {
    size_t d = 0;
    for (const auto& k : kids) d = std::max(d, k.depth());
    return d + 1;
}

namespace {

Term node(TermKind k) {
    Term t;
    t.kind = k;
    return t;
}

}  // namespace

Term mkLam(std::string x, Ty a, Term body) {
    Term t = node(TermKind::Lam);
    t.name = std::move(x);
    t.ty = std::move(a);
    t.kids.push_back(std::move(body));
    return t;
}

Term mkApp(Term f, Term a) {
    Term t = node(TermKind::App);
    t.kids = {std::move(f), std::move(a)};
    return t;
}

Term mkVar(std::string x, size_t index) {
    Term t = node(TermKind::Var);
    t.name = std::move(x);
    t.index = index;
    return t;
}

Term mkLet(std::string x, Ty a, Term def, Term body) {
    Term t = node(TermKind::Let);
    t.name = std::move(x);
    t.ty = std::move(a);
    t.kids = {std::move(def), std::move(body)};
    return t;
}

Term mkMatch(Term scrut, Term nilBranch, std::string h, std::string tl, Term consBranch) {
    Term t = node(TermKind::Match);
    t.name = std::move(h);
    t.name2 = std::move(tl);
    t.kids = {std::move(scrut), std::move(nilBranch), std::move(consBranch)};
    return t;
}

Term mkHole(Ty a) {
    Term t = node(TermKind::Hole);
    t.ty = std::move(a);
    return t;
}

Term mkInt(std::string digits) {
    Term t = node(TermKind::LitInt);
    t.lit = normalizeIntLiteral(digits);
    return t;
}

Term mkBool(bool b) {
    Term t = node(TermKind::LitBool);
    t.boolValue = b;
    return t;
}

Term mkNil(Ty a) {
    Term t = node(TermKind::Nil);
    t.ty = std::move(a);
    return t;
}

Term mkCons(Ty a) {
    Term t = node(TermKind::Cons);
    t.ty = std::move(a);
    return t;
}

Term mkGhostApp(Term f, Term a) {
    Term t = node(TermKind::GhostApp);
    t.kids = {std::move(f), std::move(a)};
    return t;
}

Term mkFree(std::string x, Ty a) {
    Term t = node(TermKind::FreeVar);
    t.name = std::move(x);
    t.ty = std::move(a);
    return t;
}

Term mkErr(Ty inner, Ty outer, Term body) {
    Term t = node(TermKind::Err);
    t.ty = std::move(inner);
    t.ty2 = std::move(outer);
    t.kids.push_back(std::move(body));
    return t;
}

Term mkDown(JudgementDiff jd, Term body) {
    Term t = node(TermKind::Down);
    t.jd = std::move(jd);
    t.kids.push_back(std::move(body));
    return t;
}

Term mkUp(JudgementDiff jd, Term body) {
    Term t = node(TermKind::Up);
    t.jd = std::move(jd);
    t.kids.push_back(std::move(body));
    return t;
}

const Term& subterm(const Term& t, const TermPath& p) {
    const Term* cur = &t;
    for (size_t i : p) {
        if (i >= cur->kids.size()) throw StructuralError("path " + toString(p) + " leaves the term");
        cur = &cur->kids[i];
    }
    return *cur;
}

Term& subterm(Term& t, const TermPath& p) {
    return const_cast<Term&>(subterm(static_cast<const Term&>(t), p));
}

std::string toString(const TermPath& p) {
    std::string s = "(";
    for (size_t i = 0; i < p.size(); ++i) s += (i ? " " : "") + std::to_string(p[i]);
    return s + ")";
}

bool binds(const Term& t, size_t child) {
    switch (t.kind) {
        case TermKind::Lam:
        case TermKind::Let: return true;
        case TermKind::Match: return child == 2;
        default: return false;
    }
}

bool isBoundary(const Term& t) { return t.kind == TermKind::Down || t.kind == TermKind::Up; }

TypeError::TypeError(TermPath p, const std::string& msg)
    : std::runtime_error("type error at " + toString(p) + ": " + msg), path(std::move(p)) {}

namespace {

std::string show(const Ty& t) { return toString(t); }

// Synthesizes types bottom-up, recording every local violation; a node whose children failed
// reports nothing of its own.
struct Checker {
    std::vector<TypeError> errors;
    TermPath path;

    void fail(const std::string& msg) { errors.emplace_back(path, msg); }

    std::optional<Ty> kid(const Ctx& ctx, const Term& t, size_t i) {
        path.push_back(i);
        auto r = go(ctx, t.kids[i]);
        path.pop_back();
        return r;
    }

    static Ctx extend(Ctx ctx, const std::string& x, const Ty& a) {
        ctx.push_back({x, a});
        return ctx;
    }

    std::optional<Ctx> decodeCtx(const Tree& t) {
        try {
            return ctxFromTree(t);
        } catch (const StructuralError& e) {
            fail(e.what());
            return std::nullopt;
        }
    }

    std::optional<Ty> go(const Ctx& ctx, const Term& t) {
        switch (t.kind) {
            case TermKind::Lam: {
                auto b = kid(extend(ctx, t.name, t.ty), t, 0);
                if (!b) return std::nullopt;
                return tArrow(t.ty, *b);
            }
            case TermKind::App: {
                auto f = kid(ctx, t, 0);
                auto a = kid(ctx, t, 1);
                if (!f || !a) return std::nullopt;
                if (f->label.kind != LabelKind::Arrow) {
                    fail("applying a non-function of type " + show(*f));
                    return std::nullopt;
                }
                if (!(f->kids[0] == *a)) {
                    fail("argument has type " + show(*a) + " but the function expects " + show(f->kids[0]));
                    return std::nullopt;
                }
                return f->kids[1];
            }
            case TermKind::Var: {
                if (t.index >= ctx.size()) {
                    fail("variable " + t.name + " is out of scope");
                    return std::nullopt;
                }
                const Binding& b = ctx[ctx.size() - 1 - t.index];
                if (b.name != t.name) {
                    fail("variable " + t.name + " refers to binding " + b.name);
                    return std::nullopt;
                }
                return b.ty;
            }
            case TermKind::Let: {
                Ctx inner = extend(ctx, t.name, t.ty);
                auto d = kid(inner, t, 0);
                auto b = kid(inner, t, 1);
                if (!d || !b) return std::nullopt;
                if (!(*d == t.ty)) {
                    fail("definition has type " + show(*d) + " but is annotated " + show(t.ty));
                    return std::nullopt;
                }
                return b;
            }
            case TermKind::Match: {
                auto s = kid(ctx, t, 0);
                auto n = kid(ctx, t, 1);
                if (!s) return std::nullopt;
                if (s->label.kind != LabelKind::List) {
                    fail("matching on a non-list of type " + show(*s));
                    return std::nullopt;
                }
                auto c = kid(extend(extend(ctx, t.name, s->kids[0]), t.name2, *s), t, 2);
                if (!n || !c) return std::nullopt;
                if (!(*n == *c)) {
                    fail("match branches have types " + show(*n) + " and " + show(*c));
                    return std::nullopt;
                }
                return n;
            }
            case TermKind::Hole:
            case TermKind::FreeVar: return t.ty;
            case TermKind::LitInt: return tInt();
            case TermKind::LitBool: return tBool();
            case TermKind::Nil: return tList(t.ty);
            case TermKind::Cons: return tArrow(t.ty, tArrow(tList(t.ty), tList(t.ty)));
            case TermKind::GhostApp: {
                auto f = kid(ctx, t, 0);
                auto a = kid(ctx, t, 1);
                if (!f || !a) return std::nullopt;
                return f;
            }
            case TermKind::Err: {
                auto b = kid(ctx, t, 0);
                if (!b) return std::nullopt;
                if (!(*b == t.ty)) {
                    fail("error boundary expects inner type " + show(t.ty) + " but body has " + show(*b));
                    return std::nullopt;
                }
                return t.ty2;
            }
            case TermKind::Down:
            case TermKind::Up: {
                bool down = t.kind == TermKind::Down;
                Tree outerCtx = down ? right(t.jd.ctx) : left(t.jd.ctx);
                Tree innerCtx = down ? left(t.jd.ctx) : right(t.jd.ctx);
                Ty innerTy = down ? left(t.jd.ty) : right(t.jd.ty);
                Ty outerTy = down ? right(t.jd.ty) : left(t.jd.ty);
                if (!(outerCtx == ctxToTree(ctx))) {
                    fail("boundary context " + toString(outerCtx) + " does not match " + toString(ctxToTree(ctx)));
                    return std::nullopt;
                }
                auto ic = decodeCtx(innerCtx);
                if (!ic) return std::nullopt;
                auto b = kid(*ic, t, 0);
                if (!b) return std::nullopt;
                if (!(*b == innerTy)) {
                    fail("boundary expects body type " + show(innerTy) + " but body has " + show(*b));
                    return std::nullopt;
                }
                return outerTy;
            }
        }
        return std::nullopt;
    }
};

}  // namespace

std::optional<TypeError> typeCheck(const Ctx& ctx, const Term& t) {
    Checker c;
    c.go(ctx, t);
    if (c.errors.empty()) return std::nullopt;
    return *std::min_element(c.errors.begin(), c.errors.end(),
                             [](const TypeError& a, const TypeError& b) { return a.path < b.path; });
}

Ty infer(const Ctx& ctx, const Term& t) {
    Checker c;
    auto r = c.go(ctx, t);
    if (!c.errors.empty())
        throw *std::min_element(c.errors.begin(), c.errors.end(),
                                [](const TypeError& a, const TypeError& b) { return a.path < b.path; });
    return *r;
}

Ctx childCtx(const Ctx& ctx, const Term& t, size_t i) {
    Ctx out = ctx;
    switch (t.kind) {
        case TermKind::Lam:
        case TermKind::Let: out.push_back({t.name, t.ty}); break;
        case TermKind::Match:
            if (i == 2) {
                Ty s = infer(ctx, t.kids[0]);
                if (s.label.kind != LabelKind::List) throw TypeError({0}, "matching on a non-list");
                out.push_back({t.name, s.kids[0]});
                out.push_back({t.name2, s});
            }
            break;
        case TermKind::Down: return ctxFromTree(left(t.jd.ctx));
        case TermKind::Up: return ctxFromTree(right(t.jd.ctx));
        default: break;
    }
    return out;
}

NodeJudgement judgementAt(const Term& root, const TermPath& p, const Ctx& rootCtx) {
    Ctx ctx = rootCtx;
    const Term* cur = &root;
    for (size_t i : p) {
        ctx = childCtx(ctx, *cur, i);
        cur = &cur->kids.at(i);
    }
    Ty ty = infer(ctx, *cur);
    return {std::move(ctx), std::move(ty)};
}

namespace {

Tree M(uint32_t n) { return tMeta(n); }
Tree J(Tree ctx, Tree ty) { return Tree(Label::turnstile(), {std::move(ctx), std::move(ty)}); }
Tree Ext(const std::string& x, Tree ctx, Tree ty) {
    return Tree(Label::ctxExtend(x), {std::move(ctx), std::move(ty)});
}

}  // namespace

TypingRule ruleFor(const Term& t) {
    const Tree G = M(kMetaCtx), A = M(kMetaA), B = M(kMetaB);
    switch (t.kind) {
        case TermKind::Lam: return {"lam", {J(Ext(t.name, G, A), B)}, J(G, tArrow(A, B)), {}};
        case TermKind::App: return {"app", {J(G, tArrow(A, B)), J(G, A)}, J(G, B), {}};
        case TermKind::Var: return {"var", {}, J(Ext(t.name, G, A), A), {kMetaA}};
        case TermKind::Let: return {"let", {J(Ext(t.name, G, A), A), J(Ext(t.name, G, A), B)}, J(G, B), {kMetaA}};
        case TermKind::Match:
            return {"match",
                    {J(G, tList(A)), J(G, B), J(Ext(t.name2, Ext(t.name, G, A), tList(A)), B)},
                    J(G, B),
                    {kMetaB}};
        case TermKind::Hole: return {"hole", {}, J(G, A), {}};
        case TermKind::LitInt: return {"int", {}, J(G, tInt()), {}};
        case TermKind::LitBool: return {"bool", {}, J(G, tBool()), {}};
        case TermKind::Nil: return {"nil", {}, J(G, tList(A)), {}};
        case TermKind::Cons: return {"cons", {}, J(G, tArrow(A, tArrow(tList(A), tList(A)))), {kMetaA}};
        case TermKind::GhostApp: return {"ghost-app", {J(G, A), J(G, B)}, J(G, A), {kMetaA}};
        case TermKind::FreeVar: return {"free-var", {}, J(G, A), {}};
        case TermKind::Err: return {"error-boundary", {J(G, A)}, J(G, B), {}};
        case TermKind::Down:
        case TermKind::Up: break;
    }
    throw StructuralError("boundaries have no typing rule");
}

std::vector<TypingRule> ruleTable() {
    Term dummy = mkHole(tInt());
    std::vector<TypingRule> out;
    for (auto k : {TermKind::Lam, TermKind::App, TermKind::Var, TermKind::Let, TermKind::Match, TermKind::Hole,
                   TermKind::LitInt, TermKind::LitBool, TermKind::Nil, TermKind::Cons, TermKind::GhostApp,
                   TermKind::FreeVar, TermKind::Err}) {
        Term t;
        t.kind = k;
        t.name = k == TermKind::Match ? "h" : "x";
        t.name2 = "t";
        out.push_back(ruleFor(t));
    }
    return out;
}

MetaSubst ruleInstance(const Term& t, const Ctx& ctx) {
    MetaSubst m;
    m[kMetaCtx] = ctxToTree(ctx);
    auto kidTy = [&](size_t i) { return infer(childCtx(ctx, t, i), t.kids[i]); };
    switch (t.kind) {
        case TermKind::Lam:
            m[kMetaA] = t.ty;
            m[kMetaB] = kidTy(0);
            break;
        case TermKind::App: {
            Ty f = kidTy(0);
            m[kMetaA] = f.kids.at(0);
            m[kMetaB] = f.kids.at(1);
            break;
        }
        case TermKind::Var: {
            Ctx rest(ctx.begin(), ctx.end() - 1);
            m[kMetaCtx] = ctxToTree(rest);
            m[kMetaA] = ctx.back().ty;
            break;
        }
        case TermKind::Let:
            m[kMetaA] = t.ty;
            m[kMetaB] = kidTy(1);
            break;
        case TermKind::Match:
            m[kMetaA] = kidTy(0).kids.at(0);
            m[kMetaB] = kidTy(1);
            break;
        case TermKind::Hole:
        case TermKind::Nil:
        case TermKind::Cons:
        case TermKind::FreeVar: m[kMetaA] = t.ty; break;
        case TermKind::GhostApp:
            m[kMetaA] = kidTy(0);
            m[kMetaB] = kidTy(1);
            break;
        case TermKind::Err:
            m[kMetaA] = t.ty;
            m[kMetaB] = t.ty2;
            break;
        default: break;
    }
    return m;
}

std::string formName(TermKind k) {
    switch (k) {
        case TermKind::Lam: return "lam";
        case TermKind::App: return "app";
        case TermKind::Var: return "var";
        case TermKind::Let: return "let";
        case TermKind::Match: return "match";
        case TermKind::Hole: return "hole";
        case TermKind::LitInt: return "lit";
        case TermKind::LitBool: return "bool";
        case TermKind::Nil: return "nil";
        case TermKind::Cons: return "cons";
        case TermKind::GhostApp: return "ghost-app";
        case TermKind::FreeVar: return "free";
        case TermKind::Err: return "err";
        case TermKind::Down: return "down";
        case TermKind::Up: return "up";
    }
    return "?";
}

namespace {

using Scope = std::vector<std::string>;

Scope scopeOf(const Ctx& ctx) {
    Scope s;
    for (const auto& b : ctx) s.push_back(b.name);
    return s;
}

Scope scopeOfCtxTree(const Tree& t) {
    try {
        return scopeOf(ctxFromTree(t));
    } catch (const StructuralError&) {
        return {};
    }
}

void print(const Term& t, Scope& scope, std::string& out) {
    auto kid = [&](size_t i) {
        out += ' ';
        print(t.kids[i], scope, out);
    };
    auto bound = [&](size_t i, std::initializer_list<std::string> names) {
        for (const auto& n : names) scope.push_back(n);
        kid(i);
        scope.resize(scope.size() - names.size());
    };
    switch (t.kind) {
        case TermKind::Lam:
            out += "(lam " + t.name + " " + toString(t.ty);
            bound(0, {t.name});
            break;
        case TermKind::App:
            out += "(app";
            kid(0);
            kid(1);
            break;
        case TermKind::Var: {
            out += "(var " + t.name;
            size_t innermost = scope.size();
            for (size_t j = scope.size(); j-- > 0;)
                if (scope[j] == t.name) {
                    innermost = scope.size() - 1 - j;
                    break;
                }
            if (innermost != t.index) out += " " + std::to_string(t.index);
            break;
        }
        case TermKind::Let:
            out += "(let " + t.name + " " + toString(t.ty);
            bound(0, {t.name});
            bound(1, {t.name});
            break;
        case TermKind::Match:
            out += "(match";
            kid(0);
            kid(1);
            out += " " + t.name + " " + t.name2;
            bound(2, {t.name, t.name2});
            break;
        case TermKind::Hole: out += "(hole " + toString(t.ty); break;
        case TermKind::LitInt: out += "(lit " + t.lit; break;
        case TermKind::LitBool: out += t.boolValue ? "(true" : "(false"; break;
        case TermKind::Nil: out += "(nil " + toString(t.ty); break;
        case TermKind::Cons: out += "(cons " + toString(t.ty); break;
        case TermKind::GhostApp:
            out += "(ghost-app";
            kid(0);
            kid(1);
            break;
        case TermKind::FreeVar: out += "(free " + t.name + " " + toString(t.ty); break;
        case TermKind::Err:
            out += "(err " + toString(t.ty) + " " + toString(t.ty2);
            kid(0);
            break;
        case TermKind::Down:
        case TermKind::Up: {
            out += t.kind == TermKind::Down ? "(down " : "(up ";
            out += toString(t.jd);
            Scope inner = scopeOfCtxTree(t.kind == TermKind::Down ? left(t.jd.ctx) : right(t.jd.ctx));
            out += ' ';
            print(t.kids[0], inner, out);
            break;
        }
    }
    out += ')';
}

std::string binderName(const SExpr& e) {
    static const std::set<std::string> reserved = {"@", "lam", "app", "var", "let", "match", "hole", "lit",
                                                   "true", "false", "nil", "cons", "ghost-app", "free", "err",
                                                   "down", "up"};
    if (!e.isAtom) e.fail("expected a name");
    if (e.atom.empty() || reserved.count(e.atom) || std::isdigit(static_cast<unsigned char>(e.atom[0])) ||
        e.atom[0] == '-' || e.atom[0] == '?' || e.atom[0] == '$' || e.atom[0] == '|')
        e.fail("'" + e.atom + "' is not a valid name");
    return e.atom;
}

Term parse(const SExpr& e, Scope& scope) {
    std::string h = e.head();
    if (h.empty()) e.fail("expected a term");
    auto need = [&](size_t n) {
        if (e.items.size() != n)
            e.fail("(" + h + " ...) takes " + std::to_string(n - 1) + " argument" + (n == 2 ? "" : "s"));
    };
    auto sub = [&](size_t i) { return parse(e.items[i], scope); };
    auto bound = [&](size_t i, std::initializer_list<std::string> names) {
        for (const auto& n : names) scope.push_back(n);
        Term t = parse(e.items[i], scope);
        scope.resize(scope.size() - names.size());
        return t;
    };
    if (h == "lam") {
        need(4);
        std::string x = binderName(e.items[1]);
        Ty a = parseType(e.items[2]);
        return mkLam(x, a, bound(3, {x}));
    }
    if (h == "app") {
        need(3);
        return mkApp(sub(1), sub(2));
    }
    if (h == "var") {
        if (e.items.size() != 2 && e.items.size() != 3) e.fail("expected (var <name>) or (var <name> <index>)");
        std::string x = binderName(e.items[1]);
        if (e.items.size() == 3) {
            const SExpr& ix = e.items[2];
            if (!ix.isAtom || ix.atom.empty() || !std::all_of(ix.atom.begin(), ix.atom.end(), ::isdigit))
                ix.fail("expected a variable index");
            size_t k = std::stoul(ix.atom);
            if (k >= scope.size() || scope[scope.size() - 1 - k] != x)
                ix.fail("index " + ix.atom + " does not refer to a binding named " + x);
            return mkVar(x, k);
        }
        for (size_t j = scope.size(); j-- > 0;)
            if (scope[j] == x) return mkVar(x, scope.size() - 1 - j);
        e.fail("unbound variable '" + x + "'; write (free " + x + " <type>) for a free variable");
    }
    if (h == "let") {
        need(5);
        std::string x = binderName(e.items[1]);
        Ty a = parseType(e.items[2]);
        Term d = bound(3, {x});
        return mkLet(x, a, std::move(d), bound(4, {x}));
    }
    if (h == "match") {
        need(6);
        Term s = sub(1);
        Term n = sub(2);
        std::string hd = binderName(e.items[3]);
        std::string tl = binderName(e.items[4]);
        return mkMatch(std::move(s), std::move(n), hd, tl, bound(5, {hd, tl}));
    }
    if (h == "hole") {
        need(2);
        return mkHole(parseType(e.items[1]));
    }
    if (h == "lit") {
        need(2);
        if (!e.items[1].isAtom) e.items[1].fail("expected an integer literal");
        try {
            return mkInt(e.items[1].atom);
        } catch (const StructuralError& err) {
            e.items[1].fail(err.what());
        }
    }
    if (h == "true" || h == "false") {
        need(1);
        return mkBool(h == "true");
    }
    if (h == "nil") {
        need(2);
        return mkNil(parseType(e.items[1]));
    }
    if (h == "cons") {
        need(2);
        return mkCons(parseType(e.items[1]));
    }
    if (h == "ghost-app") {
        need(3);
        return mkGhostApp(sub(1), sub(2));
    }
    if (h == "free") {
        need(3);
        return mkFree(binderName(e.items[1]), parseType(e.items[2]));
    }
    if (h == "err") {
        need(4);
        Ty a = parseType(e.items[1]);
        Ty b = parseType(e.items[2]);
        return mkErr(a, b, sub(3));
    }
    if (h == "down" || h == "up") {
        need(3);
        JudgementDiff jd = parseJudgementDiff(e.items[1]);
        Tree innerCtx = h == "down" ? left(jd.ctx) : right(jd.ctx);
        Scope inner;
        try {
            inner = scopeOf(ctxFromTree(innerCtx));
        } catch (const StructuralError& err) {
            e.items[1].fail(err.what());
        }
        Term body = parse(e.items[2], inner);
        return h == "down" ? mkDown(jd, std::move(body)) : mkUp(jd, std::move(body));
    }
    e.fail("unknown term form '" + h + "'");
}

}  // namespace

std::string toString(const Term& t, const Ctx& ctx) {
    Scope scope = scopeOf(ctx);
    std::string out;
    print(t, scope, out);
    return out;
}

Term parseTerm(const SExpr& e, const Ctx& ctx) {
    Scope scope = scopeOf(ctx);
    return parse(e, scope);
}

Term parseTerm(std::string_view text, const Ctx& ctx) { return parseTerm(readOne(text), ctx); }

Ty parseType(const SExpr& e) {
    Tree t = parseTree(e);
    if (!isType(t)) e.fail("expected a type");
    return t;
}

Ty parseType(std::string_view text) { return parseType(readOne(text)); }

std::string normalizeIntLiteral(std::string_view s) {
    bool neg = !s.empty() && s[0] == '-';
    std::string_view digits = neg ? s.substr(1) : s;
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit))
        throw StructuralError("'" + std::string(s) + "' is not an integer literal");
    size_t nz = digits.find_first_not_of('0');
    if (nz == std::string_view::npos) return "0";
    return (neg ? "-" : "") + std::string(digits.substr(nz));
}

std::string freshName(const std::string& base, const Ctx& ctx, const Term& t) {
    std::set<std::string> used;
    for (const auto& b : ctx) used.insert(b.name);
    std::function<void(const Term&)> walk = [&](const Term& u) {
        if (!u.name.empty()) used.insert(u.name);
        if (!u.name2.empty()) used.insert(u.name2);
        if (isBoundary(u)) {
            for (const auto& b : scopeOfCtxTree(left(u.jd.ctx))) used.insert(b);
            for (const auto& b : scopeOfCtxTree(right(u.jd.ctx))) used.insert(b);
        }
        for (const auto& k : u.kids) walk(k);
    };
    walk(t);
    if (!used.count(base)) return base;
    for (size_t i = 1;; ++i) {
        std::string cand = base + std::to_string(i);
        if (!used.count(cand)) return cand;
    }
}

}  // namespace panto
