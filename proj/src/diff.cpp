#include "panto/diff.hpp"

#include <algorithm>

namespace panto {

CompositionError::CompositionError(Tree l, Tree r)
    : std::runtime_error("cannot compose: right endpoint " + toString(l) + " differs from left endpoint " +
                         toString(r)),
      leftTree(std::move(l)),
      rightTree(std::move(r)) {}

Diff congr(Label l, std::vector<Diff> kids) {
    if (kids.size() != l.arity()) throw StructuralError("congruence arity mismatch for " + toString(l));
    Diff d;
    d.kind = DiffKind::Congruence;
    d.label = std::move(l);
    d.kids = std::move(kids);
    return d;
}

Diff plus(Tooth c, Diff inner) {
    Diff d;
    d.kind = DiffKind::Plus;
    d.tooth = std::move(c);
    d.kids.push_back(std::move(inner));
    return d;
}

Diff minus(Tooth c, Diff inner) {
    Diff d;
    d.kind = DiffKind::Minus;
    d.tooth = std::move(c);
    d.kids.push_back(std::move(inner));
    return d;
}

namespace {

Diff rawReplace(Tree a, Tree b) {
    Diff d;
    d.kind = DiffKind::Replace;
    d.from = std::move(a);
    d.to = std::move(b);
    return d;
}

}  // namespace

Diff replace(Tree a, Tree b) {
    if (a == b) return identity(a);
    Diff d;
    d.kind = DiffKind::Replace;
    d.from = std::move(a);
    d.to = std::move(b);
    return d;
}

Diff identity(const Tree& s) {
    std::vector<Diff> kids;
    kids.reserve(s.kids.size());
    for (const auto& k : s.kids) kids.push_back(identity(k));
    return congr(s.label, std::move(kids));
}

Tree left(const Diff& d) {
    switch (d.kind) {
        case DiffKind::Congruence: {
            std::vector<Tree> kids;
            for (const auto& k : d.kids) kids.push_back(left(k));
            return Tree(d.label, std::move(kids));
        }
        case DiffKind::Plus: return left(d.inner());
        case DiffKind::Minus: return plug(d.tooth, left(d.inner()));
        case DiffKind::Replace: return d.from;
    }
    return {};
}

Tree right(const Diff& d) {
    switch (d.kind) {
        case DiffKind::Congruence: {
            std::vector<Tree> kids;
            for (const auto& k : d.kids) kids.push_back(right(k));
            return Tree(d.label, std::move(kids));
        }
        case DiffKind::Plus: return plug(d.tooth, right(d.inner()));
        case DiffKind::Minus: return right(d.inner());
        case DiffKind::Replace: return d.to;
    }
    return {};
}

std::pair<Tree, Tree> endpoints(const Diff& d) { return {left(d), right(d)}; }

bool isIdentity(const Diff& d) {
    if (d.kind != DiffKind::Congruence) return false;
    return std::all_of(d.kids.begin(), d.kids.end(), [](const Diff& k) { return isIdentity(k); });
}

namespace {

// Tooth for `label` with hole at `hole`, whose other children are the chosen endpoints of `kids`.
Tooth toothFromSiblings(const Label& label, size_t hole, const std::vector<Diff>& kids, bool useRight) {
    Tooth c{label, hole, {}};
    for (size_t i = 0; i < kids.size(); ++i)
        if (i != hole) c.others.push_back(useRight ? right(kids[i]) : left(kids[i]));
    return c;
}

// Endpoints are assumed to match; checked once by the public entry point.
Diff composeRec(const Diff& a, const Diff& b) {
    if (a.kind == DiffKind::Congruence && b.kind == DiffKind::Congruence && a.label == b.label) {
        std::vector<Diff> kids;
        kids.reserve(a.kids.size());
        for (size_t i = 0; i < a.kids.size(); ++i) kids.push_back(composeRec(a.kids[i], b.kids[i]));
        return congr(a.label, std::move(kids));
    }
    if (a.kind == DiffKind::Plus && b.kind == DiffKind::Minus && a.tooth == b.tooth)
        return composeRec(a.inner(), b.inner());
    if (b.kind == DiffKind::Plus) return plus(b.tooth, composeRec(a, b.inner()));
    if (a.kind == DiffKind::Minus && b.kind != DiffKind::Replace) return minus(a.tooth, composeRec(a.inner(), b));
    if (a.kind == DiffKind::Plus && b.kind == DiffKind::Congruence && b.label == a.tooth.label) {
        size_t h = a.tooth.hole;
        return plus(toothFromSiblings(b.label, h, b.kids, true), composeRec(a.inner(), b.kids[h]));
    }
    if (a.kind == DiffKind::Congruence && b.kind == DiffKind::Minus && a.label == b.tooth.label) {
        size_t h = b.tooth.hole;
        return minus(toothFromSiblings(a.label, h, a.kids, false), composeRec(a.kids[h], b.inner()));
    }
    return rawReplace(left(a), right(b));
}

}  // namespace

Diff compose(const Diff& d1, const Diff& d2) {
    Tree r = right(d1);
    Tree l = left(d2);
    if (!(r == l)) throw CompositionError(std::move(r), std::move(l));
    return composeRec(d1, d2);
}

Diff flip(const Diff& d) {
    switch (d.kind) {
        case DiffKind::Congruence: {
            std::vector<Diff> kids;
            for (const auto& k : d.kids) kids.push_back(flip(k));
            return congr(d.label, std::move(kids));
        }
        case DiffKind::Plus: return minus(d.tooth, flip(d.inner()));
        case DiffKind::Minus: return plus(d.tooth, flip(d.inner()));
        case DiffKind::Replace: return replace(d.to, d.from);
    }
    return {};
}

size_t arrowCount(const Diff& d) {
    size_t n = (d.kind == DiffKind::Plus || d.kind == DiffKind::Minus) && d.tooth.label.kind == LabelKind::Arrow;
    for (const auto& k : d.kids) n += arrowCount(k);
    return n;
}

size_t diffDepth(const Diff& d) {
    if (d.kind == DiffKind::Replace) return std::max(d.from.depth(), d.to.depth());
    size_t m = 0;
    for (const auto& k : d.kids) m = std::max(m, diffDepth(k));
    return m + 1;
}

Diff applyDiffSubst(const DiffSubst& sigma, const Tree& pattern, const MetaSubst& instance) {
    if (pattern.label.kind == LabelKind::Meta) {
        if (auto it = sigma.find(pattern.label.id); it != sigma.end()) return it->second;
        if (auto it = instance.find(pattern.label.id); it != instance.end()) return identity(it->second);
        throw StructuralError("metavariable $" + std::to_string(pattern.label.id) + " has no binding");
    }
    std::vector<Diff> kids;
    kids.reserve(pattern.kids.size());
    for (const auto& k : pattern.kids) kids.push_back(applyDiffSubst(sigma, k, instance));
    return congr(pattern.label, std::move(kids));
}

std::string toString(const Diff& d) {
    switch (d.kind) {
        case DiffKind::Congruence: {
            std::string s = "(congr " + toString(d.label);
            for (const auto& k : d.kids) s += " " + toString(k);
            return s + ")";
        }
        case DiffKind::Plus: return "(+ " + toString(d.tooth) + " " + toString(d.inner()) + ")";
        case DiffKind::Minus: return "(- " + toString(d.tooth) + " " + toString(d.inner()) + ")";
        case DiffKind::Replace: return "(replace " + toString(d.from) + " " + toString(d.to) + ")";
    }
    return {};
}

Diff parseDiff(const SExpr& e) {
    std::string h = e.head();
    auto need = [&](size_t n) {
        if (e.items.size() != n) e.fail("wrong number of items in (" + h + " ...)");
    };
    if (h == "congr") {
        if (e.items.size() < 2) e.fail("expected (congr <label> <diff>...)");
        Label l = parseLabel(e.items[1]);
        std::vector<Diff> kids;
        for (size_t i = 2; i < e.items.size(); ++i) kids.push_back(parseDiff(e.items[i]));
        if (kids.size() != l.arity()) e.fail("congruence on " + toString(l) + " needs " + std::to_string(l.arity()) + " diffs");
        return congr(l, std::move(kids));
    }
    if (h == "+" || h == "-") {
        need(3);
        Tooth c = parseTooth(e.items[1]);
        Diff inner = parseDiff(e.items[2]);
        return h == "+" ? plus(std::move(c), std::move(inner)) : minus(std::move(c), std::move(inner));
    }
    if (h == "replace") {
        need(3);
        return replace(parseTree(e.items[1]), parseTree(e.items[2]));
    }
    if (h == "id") {
        need(2);
        return identity(parseTree(e.items[1]));
    }
    e.fail("expected a diff form (congr, +, -, replace, id)");
}

Diff parseDiff(std::string_view text) { return parseDiff(readOne(text)); }

JudgementDiff JudgementDiff::fromDiff(const Diff& d) {
    if (d.kind != DiffKind::Congruence || d.label.kind != LabelKind::Turnstile)
        throw StructuralError("judgement diff must be a congruence on |-");
    return {d.kids[0], d.kids[1]};
}

JudgementDiff compose(const JudgementDiff& a, const JudgementDiff& b) {
    return {compose(a.ctx, b.ctx), compose(a.ty, b.ty)};
}

Diff collapseNoOpReplaces(const Diff& d) {
    switch (d.kind) {
        case DiffKind::Congruence: {
            std::vector<Diff> kids;
            for (const auto& k : d.kids) kids.push_back(collapseNoOpReplaces(k));
            return congr(d.label, std::move(kids));
        }
        case DiffKind::Plus: return plus(d.tooth, collapseNoOpReplaces(d.inner()));
        case DiffKind::Minus: return minus(d.tooth, collapseNoOpReplaces(d.inner()));
        case DiffKind::Replace: return replace(d.from, d.to);
    }
    return d;
}

JudgementDiff collapseNoOpReplaces(const JudgementDiff& j) { return {collapseNoOpReplaces(j.ctx), collapseNoOpReplaces(j.ty)}; }

JudgementDiff flip(const JudgementDiff& j) { return {flip(j.ctx), flip(j.ty)}; }

std::string toString(const JudgementDiff& j) { return "(|- " + toString(j.ctx) + " " + toString(j.ty) + ")"; }

JudgementDiff parseJudgementDiff(const SExpr& e) {
    if (e.head() != "|-" || e.items.size() != 3) e.fail("expected (|- <ctx-diff> <type-diff>)");
    return {parseDiff(e.items[1]), parseDiff(e.items[2])};
}

}  // namespace panto
