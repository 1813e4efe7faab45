#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "panto/tree.hpp"

namespace panto {

enum class DiffKind : uint8_t { Congruence, Plus, Minus, Replace };

// A change from one tree to another. Congruence keeps the label and changes each child;
// Plus wraps the change in a new tooth; Minus strips a tooth; Replace swaps whole trees.
struct Diff {
    DiffKind kind = DiffKind::Congruence;
    Label label;             // Congruence
    std::vector<Diff> kids;  // Congruence children, or the single inner diff of Plus/Minus
    Tooth tooth;             // Plus, Minus
    Tree from, to;           // Replace

    bool operator==(const Diff&) const = default;

    const Diff& inner() const { return kids.front(); }
};

struct CompositionError : std::runtime_error {
    Tree leftTree;
    Tree rightTree;
    CompositionError(Tree l, Tree r);
};

Diff congr(Label l, std::vector<Diff> kids);
Diff plus(Tooth c, Diff d);
Diff minus(Tooth c, Diff d);
// Replace(s, s) collapses to identity(s).
Diff replace(Tree a, Tree b);
Diff identity(const Tree& s);

Tree left(const Diff& d);
Tree right(const Diff& d);
std::pair<Tree, Tree> endpoints(const Diff& d);

bool isIdentity(const Diff& d);
// Requires right(d1) == left(d2); throws CompositionError otherwise.
Diff compose(const Diff& d1, const Diff& d2);
Diff flip(const Diff& d);
// Rewrites every replace whose two endpoints agree into the identity on that tree.
Diff collapseNoOpReplaces(const Diff& d);
// Number of Plus/Minus steps whose tooth is an arrow.
size_t arrowCount(const Diff& d);
size_t diffDepth(const Diff& d);

using DiffSubst = std::map<uint32_t, Diff>;

// Metavariables outside sigma's domain become the identity of their instance tree.
Diff applyDiffSubst(const DiffSubst& sigma, const Tree& pattern, const MetaSubst& instance = {});

std::string toString(const Diff& d);
Diff parseDiff(const SExpr& e);
Diff parseDiff(std::string_view text);

// A context diff paired with a type diff.
struct JudgementDiff {
    Diff ctx;
    Diff ty;

    bool operator==(const JudgementDiff&) const = default;
    bool isIdentity() const { return panto::isIdentity(ctx) && panto::isIdentity(ty); }
    // As a single diff over turnstile trees.
    Diff asDiff() const { return congr(Label::turnstile(), {ctx, ty}); }
    static JudgementDiff fromDiff(const Diff& d);
};

JudgementDiff compose(const JudgementDiff& a, const JudgementDiff& b);
JudgementDiff flip(const JudgementDiff& j);
JudgementDiff collapseNoOpReplaces(const JudgementDiff& j);
std::string toString(const JudgementDiff& j);
JudgementDiff parseJudgementDiff(const SExpr& e);

}  // namespace panto
