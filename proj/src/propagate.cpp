#include "panto/propagate.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "json.hpp"

namespace panto {

namespace {

struct RuleName {
    RuleId id;
    const char* name;
};

constexpr RuleName kRuleNames[] = {
    {RuleId::PropagateDown, "PropagateDown"},
    {RuleId::PropagateUp, "PropagateUp"},
    {RuleId::PropagateVarDown1, "PropagateVarDown1"},
    {RuleId::PropagateVarDown2, "PropagateVarDown2"},
    {RuleId::InsertAbsDown, "InsertAbsDown"},
    {RuleId::DeleteAbsDown, "DeleteAbsDown"},
    {RuleId::DeleteAbsUp, "DeleteAbsUp"},
    {RuleId::InsertAppUp, "InsertAppUp"},
    {RuleId::DisplaceAppUp, "DisplaceAppUp"},
    {RuleId::DeleteAppDown, "DeleteAppDown"},
    {RuleId::LocalToFree, "LocalToFree"},
    {RuleId::FreeToLocal, "FreeToLocal"},
    {RuleId::IdentityDown, "IdentityDown"},
    {RuleId::IdentityUp, "IdentityUp"},
    {RuleId::Interchange1, "Interchange1"},
    {RuleId::Interchange2, "Interchange2"},
    {RuleId::NeutralErrorDown, "NeutralErrorDown"},
    {RuleId::NeutralErrorUp, "NeutralErrorUp"},
    {RuleId::FallthroughErrorDown, "FallthroughErrorDown"},
    {RuleId::FallthroughErrorUp, "FallthroughErrorUp"},
};

}  // namespace

std::string toString(RuleId r) {
    for (const auto& n : kRuleNames)
        if (n.id == r) return n.name;
    return "?";
}

std::optional<RuleId> parseRuleId(std::string_view s) {
    for (const auto& n : kRuleNames)
        if (s == n.name) return n.id;
    return std::nullopt;
}

const std::vector<RuleId>& allRules() {
    static const std::vector<RuleId> rules = [] {
        std::vector<RuleId> v;
        for (const auto& n : kRuleNames) v.push_back(n.id);
        return v;
    }();
    return rules;
}

SchedulerConfig SchedulerConfig::fromEnv() {
    SchedulerConfig c;
    if (const char* cap = std::getenv("PANTO_STEP_CAP")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(cap, &end, 10);
        if (end != cap && *end == '\0' && v > 0) c.stepCap = static_cast<size_t>(v);
    }
    return c;
}

SchedulerConfig SchedulerConfig::seeded(uint64_t seed) {
    SchedulerConfig c = fromEnv();
    c.mode = Mode::SeededRandom;
    c.seed = seed;
    return c;
}

std::string programHash(const Term& program) {
    uint64_t h = 14695981039346656037ull;
    for (unsigned char c : toString(program)) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string traceLine(const TraceEntry& e) {
    nlohmann::ordered_json j;
    j["path"] = e.path;
    j["rule"] = toString(e.rule);
    j["hash"] = e.hash;
    return j.dump();
}

// ---------------------------------------------------------------------------------------------
// Diff unification

namespace {

void nonIdentityPositions(const Tree& p, const Diff& d, std::vector<size_t>& at, std::vector<std::vector<size_t>>& out) {
    if (p.label.kind == LabelKind::Meta) {
        if (!isIdentity(d)) out.push_back(at);
        return;
    }
    if (d.kind == DiffKind::Congruence && d.label == p.label && d.kids.size() == p.kids.size()) {
        for (size_t i = 0; i < p.kids.size(); ++i) {
            at.push_back(i);
            nonIdentityPositions(p.kids[i], d.kids[i], at, out);
            at.pop_back();
        }
        return;
    }
    out.push_back(at);
}

bool unifyAt(const Tree& p, const Diff& d, DiffSubst& sigma) {
    if (p.label.kind == LabelKind::Meta) {
        auto [it, fresh] = sigma.emplace(p.label.id, d);
        return fresh || it->second == d;
    }
    if (d.kind != DiffKind::Congruence || !(d.label == p.label) || d.kids.size() != p.kids.size()) return false;
    for (size_t i = 0; i < p.kids.size(); ++i)
        if (!unifyAt(p.kids[i], d.kids[i], sigma)) return false;
    return true;
}

const Tree& patternAt(const Tree& p, const std::vector<size_t>& focus) {
    const Tree* cur = &p;
    for (size_t i : focus) cur = &cur->kids[i];
    return *cur;
}

const Diff& diffAt(const Diff& d, const std::vector<size_t>& focus) {
    const Diff* cur = &d;
    for (size_t i : focus) cur = &cur->kids[i];
    return *cur;
}

// (sigma C)[id of (sigma s').2]
Diff aroundFocus(const Tree& p, const std::vector<size_t>& focus, size_t at, const DiffSubst& sigma,
                 const MetaSubst& inst) {
    if (at == focus.size()) return identity(right(applyDiffSubst(sigma, p, inst)));
    std::vector<Diff> kids;
    for (size_t j = 0; j < p.kids.size(); ++j)
        kids.push_back(j == focus[at] ? aroundFocus(p.kids[j], focus, at + 1, sigma, inst)
                                      : applyDiffSubst(sigma, p.kids[j], inst));
    return congr(p.label, std::move(kids));
}

}  // namespace

std::optional<Unifier> unifyDiff(const Tree& pattern, const Diff& incoming, const MetaSubst& instance) {
    std::vector<size_t> at;
    std::vector<std::vector<size_t>> positions;
    nonIdentityPositions(pattern, incoming, at, positions);
    Unifier u;
    if (positions.empty()) return u;
    u.focus = positions.front();
    for (const auto& p : positions) {
        size_t n = 0;
        while (n < u.focus.size() && n < p.size() && u.focus[n] == p[n]) ++n;
        u.focus.resize(n);
    }
    if (!unifyAt(patternAt(pattern, u.focus), diffAt(incoming, u.focus), u.sigma)) return std::nullopt;
    for (const auto& [m, d] : u.sigma) {
        auto it = instance.find(m);
        if (it != instance.end() && !(left(d) == it->second)) return std::nullopt;
    }
    return u;
}

// ---------------------------------------------------------------------------------------------
// Neutral forms

namespace {

const Term& stripBoundaries(const Term& t) {
    const Term* cur = &t;
    while (isBoundary(*cur)) cur = &cur->kids[0];
    return *cur;
}

bool isAppHead(const Term& program, const TermPath& site) {
    if (site.empty() || site.back() != 0) return false;
    TermPath parent(site.begin(), site.end() - 1);
    return subterm(program, parent).kind == TermKind::App;
}

// Like isAppHead, but a stack of boundaries around the site counts as part of the site.
bool isAppHeadThroughBoundaries(const Term& program, TermPath site) {
    while (!site.empty()) {
        size_t i = site.back();
        site.pop_back();
        const Term& p = subterm(program, site);
        if (isBoundary(p)) continue;
        return p.kind == TermKind::App && i == 0;
    }
    return false;
}

// Number of arguments applied along the head spine of a neutral form.
size_t spineArgs(const Term& t) {
    size_t n = 0;
    const Term* cur = &stripBoundaries(t);
    while (cur->kind == TermKind::App || cur->kind == TermKind::GhostApp) {
        ++n;
        cur = &stripBoundaries(cur->kids[0]);
    }
    return n;
}

}  // namespace

bool isNeutral(const Term& t) {
    const Term& s = stripBoundaries(t);
    switch (s.kind) {
        case TermKind::Var:
        case TermKind::Cons: return true;
        case TermKind::App:
        case TermKind::GhostApp: return isNeutral(s.kids[0]);
        default: return false;
    }
}

bool isMaximalNeutral(const Term& program, const TermPath& site) {
    return isNeutral(subterm(program, site)) && !isAppHeadThroughBoundaries(program, site);
}

std::vector<TermPath> boundarySites(const Term& program) {
    std::vector<TermPath> out;
    TermPath at;
    auto go = [&](auto&& self, const Term& t) -> void {
        if (isBoundary(t)) out.push_back(at);
        for (size_t i = 0; i < t.kids.size(); ++i) {
            at.push_back(i);
            self(self, t.kids[i]);
            at.pop_back();
        }
    };
    go(go, program);
    return out;
}

// ---------------------------------------------------------------------------------------------
// Rules

namespace {

struct Rewrite {
    TermPath at;
    Term replacement;
};

struct Env {
    const Term& program;
    TermPath site;
    const Term& node;  // the boundary at site
    Ctx ctx;           // context of the boundary node
    const Term* parent = nullptr;
    TermPath parentPath;
    Ctx parentCtx;

    const Term& body() const { return node.kids[0]; }
    const Diff& ctxDiff() const { return node.jd.ctx; }
    const Diff& tyDiff() const { return node.jd.ty; }
    size_t childIndex() const { return site.back(); }
};

Ctx ctxAt(const Term& program, const TermPath& path) {
    Ctx ctx;
    const Term* cur = &program;
    for (size_t i : path) {
        ctx = childCtx(ctx, *cur, i);
        cur = &cur->kids[i];
    }
    return ctx;
}

Env makeEnv(const Term& program, const TermPath& site) {
    const Term& node = subterm(program, site);
    if (!isBoundary(node)) throw StructuralError("site " + toString(site) + " is not a boundary");
    Env e{program, site, node, {}, nullptr, {}, {}};
    if (!site.empty()) {
        e.parentPath.assign(site.begin(), site.end() - 1);
        e.parent = &subterm(program, e.parentPath);
        e.parentCtx = ctxAt(program, e.parentPath);
        e.ctx = childCtx(e.parentCtx, *e.parent, site.back());
    }
    return e;
}

Term wrapDown(const Diff& ctx, const Diff& ty, Term t) {
    JudgementDiff jd{ctx, ty};
    if (jd.isIdentity()) return t;
    return mkDown(std::move(jd), std::move(t));
}

Term wrapUp(const Diff& ctx, const Diff& ty, Term t) {
    JudgementDiff jd{ctx, ty};
    if (jd.isIdentity()) return t;
    return mkUp(std::move(jd), std::move(t));
}

Term wrapDown(const Diff& judgement, Term t) {
    JudgementDiff jd = JudgementDiff::fromDiff(judgement);
    return wrapDown(jd.ctx, jd.ty, std::move(t));
}

Term wrapUp(const Diff& judgement, Term t) {
    JudgementDiff jd = JudgementDiff::fromDiff(judgement);
    return wrapUp(jd.ctx, jd.ty, std::move(t));
}

// +A->[d] or -A->[d]: the arrow tooth whose argument is fixed.
const Tree* arrowArg(const Diff& d, DiffKind kind) {
    if (d.kind != kind || d.tooth.label.kind != LabelKind::Arrow || d.tooth.hole != 1 || d.tooth.others.size() != 1)
        return nullptr;
    return &d.tooth.others[0];
}

Tooth binderTooth(const std::string& x, const Ty& a) { return Tooth{Label::ctxExtend(x), 0, {a}}; }

bool isBinderTooth(const Tooth& c) {
    return c.label.kind == LabelKind::CtxExtend && c.hole == 0 && c.others.size() == 1;
}

void setAnnotations(Term& t, const MetaSubst& inst) {
    auto get = [&](uint32_t m) { return inst.at(m); };
    switch (t.kind) {
        case TermKind::Lam:
        case TermKind::Let:
        case TermKind::Hole:
        case TermKind::Nil:
        case TermKind::Cons:
        case TermKind::FreeVar: t.ty = get(kMetaA); break;
        case TermKind::Err:
            t.ty = get(kMetaA);
            t.ty2 = get(kMetaB);
            break;
        default: break;
    }
}

MetaSubst updatedInstance(MetaSubst inst, const DiffSubst& sigma) {
    for (const auto& [m, d] : sigma) inst[m] = right(d);
    return inst;
}

struct VarLookup {
    enum Kind { Fail, Found, Removed } kind = Fail;
    size_t index = 0;
    Diff ty;        // Found: change to the binding's type
    Tree removedTy;  // Removed: the binding's type
    std::string name;
};

// Follows de Bruijn index k of the old context through a context diff.
VarLookup lookupVar(const Diff& d, size_t k) {
    VarLookup r;
    size_t n = 0;
    const Diff* cur = &d;
    for (;;) {
        switch (cur->kind) {
            case DiffKind::Congruence:
                if (cur->label.kind != LabelKind::CtxExtend) return r;
                if (k == 0) {
                    r.kind = VarLookup::Found;
                    r.index = n;
                    r.ty = cur->kids[1];
                    r.name = cur->label.name;
                    return r;
                }
                --k;
                ++n;
                cur = &cur->kids[0];
                break;
            case DiffKind::Plus:
                if (!isBinderTooth(cur->tooth)) return r;
                ++n;
                cur = &cur->inner();
                break;
            case DiffKind::Minus:
                if (!isBinderTooth(cur->tooth)) return r;
                if (k == 0) {
                    r.kind = VarLookup::Removed;
                    r.removedTy = cur->tooth.others[0];
                    r.name = cur->tooth.label.name;
                    return r;
                }
                --k;
                cur = &cur->inner();
                break;
            case DiffKind::Replace: return r;
        }
    }
}

// Index in the new context of the innermost binding named x, when a Plus of type a introduced it.
std::optional<size_t> lookupAdded(const Diff& d, const std::string& x, const Ty& a) {
    size_t n = 0;
    const Diff* cur = &d;
    for (;;) {
        switch (cur->kind) {
            case DiffKind::Congruence:
                if (cur->label.kind != LabelKind::CtxExtend || cur->label.name == x) return std::nullopt;
                ++n;
                cur = &cur->kids[0];
                break;
            case DiffKind::Plus:
                if (!isBinderTooth(cur->tooth)) return std::nullopt;
                if (cur->tooth.label.name == x) {
                    if (cur->tooth.others[0] == a) return n;
                    return std::nullopt;
                }
                ++n;
                cur = &cur->inner();
                break;
            case DiffKind::Minus:
                if (!isBinderTooth(cur->tooth)) return std::nullopt;
                cur = &cur->inner();
                break;
            case DiffKind::Replace: return std::nullopt;
        }
    }
}

// Identity on the context tree except binding k, whose type changes by d.
Diff changeBinding(const Tree& ctx, size_t k, const Diff& d) {
    if (ctx.label.kind != LabelKind::CtxExtend) throw StructuralError("variable index out of context");
    if (k == 0) return congr(ctx.label, {identity(ctx.kids[0]), d});
    return congr(ctx.label, {changeBinding(ctx.kids[0], k - 1, d), identity(ctx.kids[1])});
}

using Result = std::optional<Rewrite>;

Result at(const Env& e, Term t) { return Rewrite{e.site, std::move(t)}; }
Result atParent(const Env& e, Term t) { return Rewrite{e.parentPath, std::move(t)}; }

// -- boundary rules

Result identityDown(const Env& e) {
    if (e.node.kind != TermKind::Down || !e.node.jd.isIdentity()) return std::nullopt;
    return at(e, e.body());
}

Result identityUp(const Env& e) {
    if (e.node.kind != TermKind::Up || !e.node.jd.isIdentity()) return std::nullopt;
    return at(e, e.body());
}

Result interchange1(const Env& e) {
    if (e.node.kind != TermKind::Down || e.body().kind != TermKind::Up) return std::nullopt;
    const Term& up = e.body();
    if (!isIdentity(e.tyDiff()) || !isIdentity(up.jd.ctx)) return std::nullopt;
    Term inner = mkDown({e.ctxDiff(), identity(right(up.jd.ty))}, up.kids[0]);
    return at(e, mkUp({identity(right(e.ctxDiff())), up.jd.ty}, std::move(inner)));
}

Result interchange2(const Env& e) {
    if (e.node.kind != TermKind::Down || e.body().kind != TermKind::Up) return std::nullopt;
    const Term& up = e.body();
    if (!isIdentity(e.ctxDiff()) || !isIdentity(up.jd.ty)) return std::nullopt;
    Term inner = mkDown({identity(right(up.jd.ctx)), e.tyDiff()}, up.kids[0]);
    return at(e, mkUp({up.jd.ctx, identity(right(e.tyDiff()))}, std::move(inner)));
}

Term errorBelowDown(const Env& e) {
    const Diff& d = e.tyDiff();
    return mkErr(left(d), right(d), wrapDown(e.ctxDiff(), identity(left(d)), e.body()));
}

Term errorBelowUp(const Env& e) {
    const Diff& d = e.tyDiff();
    return wrapUp(e.ctxDiff(), identity(left(d)), mkErr(right(d), left(d), e.body()));
}

Result neutralErrorDown(const Env& e) {
    if (e.node.kind != TermKind::Down || isIdentity(e.tyDiff())) return std::nullopt;
    if (!isNeutral(e.body()) || isAppHead(e.program, e.site)) return std::nullopt;
    return at(e, errorBelowDown(e));
}

Result neutralErrorUp(const Env& e) {
    if (e.node.kind != TermKind::Up || isIdentity(e.tyDiff())) return std::nullopt;
    if (!isNeutral(e.body()) || isAppHead(e.program, e.site)) return std::nullopt;
    return at(e, errorBelowUp(e));
}

Result fallthroughDown(const Env& e) {
    if (e.node.kind != TermKind::Down || isIdentity(e.tyDiff())) return std::nullopt;
    return at(e, errorBelowDown(e));
}

Result fallthroughUp(const Env& e) {
    if (e.node.kind != TermKind::Up || isIdentity(e.tyDiff())) return std::nullopt;
    return at(e, errorBelowUp(e));
}

// -- alteration rules

Result insertAbsDown(const Env& e) {
    if (e.node.kind != TermKind::Down) return std::nullopt;
    const Tree* a = arrowArg(e.tyDiff(), DiffKind::Plus);
    if (!a) return std::nullopt;
    if (isNeutral(e.body()) && isAppHead(e.program, e.site)) return std::nullopt;
    std::string x = freshName("x", ctxFromTree(right(e.ctxDiff())), e.body());
    Term inner = mkDown({plus(binderTooth(x, *a), e.ctxDiff()), e.tyDiff().inner()}, e.body());
    return at(e, mkLam(x, *a, std::move(inner)));
}

Result deleteAbsDown(const Env& e) {
    if (e.node.kind != TermKind::Down || e.body().kind != TermKind::Lam) return std::nullopt;
    const Tree* a = arrowArg(e.tyDiff(), DiffKind::Minus);
    const Term& lam = e.body();
    if (!a || !(*a == lam.ty)) return std::nullopt;
    return at(e, mkDown({minus(binderTooth(lam.name, lam.ty), e.ctxDiff()), e.tyDiff().inner()}, lam.kids[0]));
}

Result deleteAppDown(const Env& e) {
    if (e.node.kind != TermKind::Down || e.body().kind != TermKind::App) return std::nullopt;
    const Tree* a = arrowArg(e.tyDiff(), DiffKind::Plus);
    const Term& app = e.body();
    if (!a || app.kids[1].kind != TermKind::Hole || !(app.kids[1].ty == *a)) return std::nullopt;
    Diff ty = congr(Label::arrow(), {identity(*a), e.tyDiff().inner()});
    return at(e, mkDown({e.ctxDiff(), std::move(ty)}, app.kids[0]));
}

Result deleteAbsUp(const Env& e) {
    if (e.node.kind != TermKind::Up || !e.parent || e.parent->kind != TermKind::Lam) return std::nullopt;
    const Term& lam = *e.parent;
    const Tree* a = arrowArg(e.tyDiff(), DiffKind::Plus);
    const Diff& c = e.ctxDiff();
    if (!a || !(*a == lam.ty)) return std::nullopt;
    if (c.kind != DiffKind::Congruence || !(c.label == Label::ctxExtend(lam.name)) || !isIdentity(c.kids[1]))
        return std::nullopt;
    const Diff& delta = c.kids[0];
    const Diff& rest = e.tyDiff().inner();
    Term inner = mkDown({minus(binderTooth(lam.name, lam.ty), identity(right(delta))), identity(right(e.tyDiff()))},
                        e.body());
    return atParent(e, mkUp({delta, congr(Label::arrow(), {identity(*a), rest})}, std::move(inner)));
}

Result insertAppUp(const Env& e) {
    if (e.node.kind != TermKind::Up) return std::nullopt;
    const Tree* a = arrowArg(e.tyDiff(), DiffKind::Plus);
    if (!a) return std::nullopt;
    return at(e, mkUp({e.ctxDiff(), e.tyDiff().inner()}, mkApp(e.body(), mkHole(*a))));
}

Result displaceAppUp(const Env& e) {
    if (e.node.kind != TermKind::Up || !isAppHead(e.program, e.site)) return std::nullopt;
    const Tree* a = arrowArg(e.tyDiff(), DiffKind::Minus);
    if (!a) return std::nullopt;
    Term arg = mkDown({e.ctxDiff(), identity(*a)}, e.parent->kids[1]);
    return atParent(e, mkUp({e.ctxDiff(), e.tyDiff().inner()}, mkGhostApp(e.body(), std::move(arg))));
}

Result localToFree(const Env& e) {
    if (e.node.kind != TermKind::Down || e.body().kind != TermKind::Var || !isIdentity(e.tyDiff()))
        return std::nullopt;
    VarLookup v = lookupVar(e.ctxDiff(), e.body().index);
    if (v.kind != VarLookup::Removed) return std::nullopt;
    return at(e, mkFree(e.body().name, v.removedTy));
}

Result freeToLocal(const Env& e) {
    if (e.node.kind != TermKind::Down || e.body().kind != TermKind::FreeVar || !isIdentity(e.tyDiff()))
        return std::nullopt;
    auto n = lookupAdded(e.ctxDiff(), e.body().name, e.body().ty);
    if (!n) return std::nullopt;
    return at(e, mkVar(e.body().name, *n));
}

// -- propagation rules

Result propagateVarDown1(const Env& e) {
    if (e.node.kind != TermKind::Down || e.body().kind != TermKind::Var || !isIdentity(e.tyDiff()))
        return std::nullopt;
    VarLookup v = lookupVar(e.ctxDiff(), e.body().index);
    if (v.kind != VarLookup::Found || v.name != e.body().name) return std::nullopt;
    Term x = mkVar(e.body().name, v.index);
    return at(e, wrapUp(identity(right(e.ctxDiff())), v.ty, std::move(x)));
}

Result propagateVarDown2(const Env& e) {
    if (e.node.kind != TermKind::Down || e.body().kind != TermKind::Var) return std::nullopt;
    if (!isIdentity(e.ctxDiff()) || isIdentity(e.tyDiff())) return std::nullopt;
    Diff ctx = changeBinding(right(e.ctxDiff()), e.body().index, e.tyDiff());
    return at(e, mkUp({std::move(ctx), identity(right(e.tyDiff()))}, e.body()));
}

Result propagateDown(const Env& e) {
    if (e.node.kind != TermKind::Down) return std::nullopt;
    const Term& b = e.body();
    if (isBoundary(b) || b.kind == TermKind::Var) return std::nullopt;
    Ctx bodyCtx = ctxFromTree(left(e.ctxDiff()));
    TypingRule rule = ruleFor(b);
    MetaSubst inst = ruleInstance(b, bodyCtx);
    auto u = unifyDiff(rule.conclusion, e.node.jd.asDiff(), inst);
    if (!u) return std::nullopt;
    Term out = b;
    setAnnotations(out, updatedInstance(inst, u->sigma));
    for (size_t i = 0; i < out.kids.size(); ++i)
        out.kids[i] = wrapDown(applyDiffSubst(u->sigma, rule.premises[i], inst), std::move(out.kids[i]));
    return at(e, wrapUp(aroundFocus(rule.conclusion, u->focus, 0, u->sigma, inst), std::move(out)));
}

Result propagateUp(const Env& e) {
    if (e.node.kind != TermKind::Up || !e.parent || isBoundary(*e.parent)) return std::nullopt;
    const Term& p = *e.parent;
    size_t i = e.childIndex();
    TypingRule rule = ruleFor(p);
    MetaSubst inst = ruleInstance(p, e.parentCtx);
    auto u = unifyDiff(rule.premises[i], e.node.jd.asDiff(), inst);
    if (!u) return std::nullopt;
    Term out = p;
    setAnnotations(out, updatedInstance(inst, u->sigma));
    for (size_t j = 0; j < out.kids.size(); ++j) {
        if (j == i)
            out.kids[j] = wrapDown(aroundFocus(rule.premises[i], u->focus, 0, u->sigma, inst), e.body());
        else
            out.kids[j] = wrapDown(applyDiffSubst(u->sigma, rule.premises[j], inst), std::move(out.kids[j]));
    }
    return atParent(e, wrapUp(applyDiffSubst(u->sigma, rule.conclusion, inst), std::move(out)));
}

using RuleFn = Result (*)(const Env&);

RuleFn ruleFn(RuleId r) {
    switch (r) {
        case RuleId::PropagateDown: return propagateDown;
        case RuleId::PropagateUp: return propagateUp;
        case RuleId::PropagateVarDown1: return propagateVarDown1;
        case RuleId::PropagateVarDown2: return propagateVarDown2;
        case RuleId::InsertAbsDown: return insertAbsDown;
        case RuleId::DeleteAbsDown: return deleteAbsDown;
        case RuleId::DeleteAbsUp: return deleteAbsUp;
        case RuleId::InsertAppUp: return insertAppUp;
        case RuleId::DisplaceAppUp: return displaceAppUp;
        case RuleId::DeleteAppDown: return deleteAppDown;
        case RuleId::LocalToFree: return localToFree;
        case RuleId::FreeToLocal: return freeToLocal;
        case RuleId::IdentityDown: return identityDown;
        case RuleId::IdentityUp: return identityUp;
        case RuleId::Interchange1: return interchange1;
        case RuleId::Interchange2: return interchange2;
        case RuleId::NeutralErrorDown: return neutralErrorDown;
        case RuleId::NeutralErrorUp: return neutralErrorUp;
        case RuleId::FallthroughErrorDown: return fallthroughDown;
        case RuleId::FallthroughErrorUp: return fallthroughUp;
    }
    return nullptr;
}

using R = RuleId;

// Candidate rules at a site, highest precedence first.
std::vector<RuleId> candidates(const Env& e) {
    if (e.node.kind == TermKind::Down) {
        if (e.node.jd.isIdentity()) return {R::IdentityDown};
        // A down boundary waits for a boundary directly below it, unless the two commute.
        if (e.body().kind == TermKind::Down) return {};
        if (e.body().kind == TermKind::Up) return {R::Interchange1, R::Interchange2};
        return {R::DeleteAppDown,     R::InsertAbsDown,     R::DeleteAbsDown, R::LocalToFree,
                R::FreeToLocal,       R::NeutralErrorDown,  R::PropagateVarDown1,
                R::PropagateVarDown2, R::PropagateDown,     R::FallthroughErrorDown};
    }
    if (e.site.empty()) return {};
    if (e.node.jd.isIdentity()) return {R::IdentityUp};
    if (e.parent->kind == TermKind::Up) return {};
    if (e.parent->kind == TermKind::Down) {
        Env pe = makeEnv(e.program, e.parentPath);
        if (interchange1(pe) || interchange2(pe)) return {};
    }
    if (isNeutral(e.body()))
        return {R::DeleteAbsUp, R::InsertAppUp, R::DisplaceAppUp, R::NeutralErrorUp, R::PropagateUp,
                R::FallthroughErrorUp};
    return {R::PropagateUp, R::DeleteAbsUp, R::InsertAppUp, R::DisplaceAppUp, R::FallthroughErrorUp};
}

struct Chosen {
    RuleId rule;
    Rewrite rewrite;
};

std::optional<Chosen> choose(const Term& program, const TermPath& site) {
    Env e = makeEnv(program, site);
    for (RuleId r : candidates(e))
        if (auto rw = ruleFn(r)(e)) return Chosen{r, std::move(*rw)};
    return std::nullopt;
}

Term applyRewrite(const Term& program, const Rewrite& rw) {
    Term out = program;
    subterm(out, rw.at) = rw.replacement;
    return out;
}

}  // namespace

std::optional<RuleId> applicableRule(const Term& program, const TermPath& site) {
    auto c = choose(program, site);
    if (!c) return std::nullopt;
    return c->rule;
}

std::optional<Term> applyRule(const Term& program, const TermPath& site, RuleId rule) {
    Env e = makeEnv(program, site);
    auto rw = ruleFn(rule)(e);
    if (!rw) return std::nullopt;
    return applyRewrite(program, *rw);
}

Scheduler::Scheduler(SchedulerConfig cfg) : cfg_(cfg), rng_(cfg.seed) {}

std::optional<StepResult> Scheduler::step(const Term& program) {
    std::optional<std::pair<TermPath, Chosen>> pick;
    if (cfg_.mode == SchedulerConfig::Mode::LeftmostOutermost) {
        for (const TermPath& site : boundarySites(program))
            if (auto c = choose(program, site)) {
                pick.emplace(site, std::move(*c));
                break;
            }
    } else {
        std::vector<std::pair<TermPath, Chosen>> all;
        for (const TermPath& site : boundarySites(program))
            if (auto c = choose(program, site)) all.emplace_back(site, std::move(*c));
        if (!all.empty()) {
            std::uniform_int_distribution<size_t> dist(0, all.size() - 1);
            pick = std::move(all[dist(rng_)]);
        }
    }
    if (!pick) return std::nullopt;
    Term next = applyRewrite(program, pick->second.rewrite);
    TraceEntry entry{pick->first, pick->second.rule, programHash(next)};
    return StepResult{std::move(next), std::move(entry)};
}

std::optional<StepResult> stepOnce(const Term& program, const SchedulerConfig& cfg) {
    Scheduler s(cfg);
    return s.step(program);
}

EngineError::EngineError(const std::string& msg, StepTrace t) : std::runtime_error(msg), trace(std::move(t)) {}

namespace {

std::string dump(const std::string& msg, const Term& program, const StepTrace& trace) {
    std::ostringstream os;
    os << msg << "\nprogram: " << toString(program) << "\ntrace:";
    for (const auto& e : trace) os << "\n  " << traceLine(e);
    return os.str();
}

void checkStep(const Term& before, const Term& after, const TraceEntry& entry, const StepTrace& trace) {
    if (!metricExempt(entry.rule) && !metricDecreases(metric(before), metric(after)))
        throw EngineError(dump("metric did not decrease at " + toString(entry.rule), after, trace), trace);
    auto v = monitorInvariants(after);
    if (!v.empty())
        throw EngineError(dump("invariant " + v.front().property + " violated at " + toString(v.front().path) + ": " +
                                   v.front().detail,
                               after, trace),
                          trace);
}

}  // namespace

NormalizeResult normalize(const Term& program, const SchedulerConfig& cfg) {
    NormalizeResult r{program, std::nullopt, {}};
    Scheduler sched(cfg);
    for (;;) {
        if (r.trace.size() >= cfg.stepCap)
            throw EngineError(dump("step cap exceeded", r.program, r.trace), r.trace);
        if (auto s = sched.step(r.program)) {
            if (cfg.checkInvariants) {
                r.trace.push_back(s->entry);
                checkStep(r.program, s->program, s->entry, r.trace);
            } else {
                r.trace.push_back(std::move(s->entry));
            }
            r.program = std::move(s->program);
            continue;
        }
        if (r.program.kind == TermKind::Up) {
            if (!isIdentity(r.program.jd.ctx))
                throw EngineError(dump("top-level boundary changes the context", r.program, r.trace), r.trace);
            Diff change = r.finalTypeChange ? collapseNoOpReplaces(compose(*r.finalTypeChange, r.program.jd.ty)) : r.program.jd.ty;
            r.finalTypeChange = isIdentity(change) ? std::nullopt : std::optional<Diff>(std::move(change));
            Term body = std::move(r.program.kids[0]);
            r.program = std::move(body);
            continue;
        }
        if (!boundarySites(r.program).empty())
            throw EngineError(dump("no rule applies", r.program, r.trace), r.trace);
        return r;
    }
}

// ---------------------------------------------------------------------------------------------
// Termination metric

namespace {

// Context length, where an argument position of a neutral head with n earlier arguments counts 2(n+1).
size_t contextLength(const Term& program, const TermPath& site) {
    size_t len = 0;
    const Term* cur = &program;
    for (size_t i : site) {
        if (cur->kind == TermKind::App && i == 1 && isNeutral(cur->kids[0]))
            len += 2 * (spineArgs(cur->kids[0]) + 1);
        else
            len += 1;
        cur = &cur->kids[i];
    }
    return len;
}

bool typeOnly(const JudgementDiff& jd) { return isIdentity(jd.ctx); }

}  // namespace

Metric metric(const Term& program) {
    Metric m;
    for (const TermPath& site : boundarySites(program)) {
        const Term& b = subterm(program, site);
        const Term& body = b.kids[0];
        bool up = b.kind == TermKind::Up;
        bool inNeutral = up ? isNeutral(body) : isNeutral(body) && isAppHeadThroughBoundaries(program, site);
        BoundaryMetric bm;
        bm.count = arrowCount(b.jd.ctx) + arrowCount(b.jd.ty);
        if (inNeutral && typeOnly(b.jd)) {
            bm.udClass = up ? 0 : 1;
            if (up) {
                // Arguments still applied to the boundary from outside.
                size_t n = 0, deepest = 0;
                TermPath at = site;
                while (!at.empty()) {
                    size_t i = at.back();
                    at.pop_back();
                    const Term& p = subterm(program, at);
                    if (isBoundary(p)) continue;
                    if (p.kind != TermKind::App || i != 0) break;
                    ++n;
                    deepest = std::max(deepest, p.kids[1].depth());
                }
                bm.distance = n + deepest;
            } else {
                bm.distance = 2 * spineArgs(body) + contextLength(program, site);
            }
        } else {
            bm.udClass = up ? 1 : 0;
            bm.distance = up ? contextLength(program, site) : body.depth();
        }
        m.push_back(bm);
    }
    return m;
}

bool metricDecreases(const Metric& before, const Metric& after) {
    Metric a = before, b = after;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    Metric onlyBefore, onlyAfter;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(onlyBefore));
    std::set_difference(b.begin(), b.end(), a.begin(), a.end(), std::back_inserter(onlyAfter));
    if (onlyBefore.empty() && onlyAfter.empty()) return false;
    for (const auto& y : onlyAfter)
        if (std::none_of(onlyBefore.begin(), onlyBefore.end(), [&](const BoundaryMetric& x) { return y < x; }))
            return false;
    return true;
}

bool metricExempt(RuleId r) {
    return r == RuleId::PropagateVarDown1 || r == RuleId::PropagateVarDown2 || r == RuleId::LocalToFree ||
           r == RuleId::FreeToLocal;
}

// ---------------------------------------------------------------------------------------------
// Invariant monitors

namespace {

// Identity except for the type of exactly one binding.
bool changesOneVariable(const Diff& d) {
    size_t changed = 0;
    const Diff* cur = &d;
    while (cur->kind == DiffKind::Congruence && cur->label.kind == LabelKind::CtxExtend) {
        if (!isIdentity(cur->kids[1])) ++changed;
        cur = &cur->kids[0];
    }
    return cur->kind == DiffKind::Congruence && cur->label.kind == LabelKind::EmptyCtx && changed == 1;
}

}  // namespace

std::vector<InvariantViolation> monitorInvariants(const Term& program) {
    std::vector<InvariantViolation> out;
    std::vector<TermPath> sites = boundarySites(program);
    Metric m = metric(program);
    std::vector<TermPath> upLike;
    for (size_t k = 0; k < sites.size(); ++k) {
        const Term& b = subterm(program, sites[k]);
        if (b.kind == TermKind::Up && !isIdentity(b.jd.ctx) && !(isIdentity(b.jd.ty) && changesOneVariable(b.jd.ctx)))
            out.push_back({"uplemma", sites[k], toString(b.jd)});
        if (m[k].udClass == 1) upLike.push_back(sites[k]);
    }
    if (upLike.size() > 1) {
        std::string paths;
        for (const auto& p : upLike) paths += toString(p);
        out.push_back({"oneup", upLike[1], paths});
    }
    if (upLike.size() == 1) {
        const TermPath& p = upLike.front();
        for (const TermPath& s : sites)
            if (s.size() < p.size() && std::equal(s.begin(), s.end(), p.begin()))
                out.push_back({"noaround", s, "boundary above the up-like boundary at " + toString(p)});
    }
    return out;
}

}  // namespace panto
