#pragma once

#include <optional>
#include <string>
#include <vector>

#include "panto/diff.hpp"

namespace panto {

// Types are trees over Int, Bool, ->, List and (? n).
using Ty = Tree;

bool isType(const Tree& t);

struct Binding {
    std::string name;
    Ty ty;
    bool operator==(const Binding&) const = default;
};

// Innermost binding last.
using Ctx = std::vector<Binding>;

Tree ctxToTree(const Ctx& ctx);
// Throws StructuralError on trees that are not contexts.
Ctx ctxFromTree(const Tree& t);
Tree toJudgementTree(const Ctx& ctx, const Ty& ty);
std::pair<Ctx, Ty> fromJudgementTree(const Tree& t);

enum class TermKind : uint8_t {
    Lam,
    App,
    Var,
    Let,
    Match,
    Hole,
    LitInt,
    LitBool,
    Nil,
    Cons,
    GhostApp,
    FreeVar,
    Err,
    Down,
    Up,
};

// Children by kind:
//   Lam [body]; App [fn, arg]; Let [def, body]; Match [scrutinee, nil branch, cons branch];
//   GhostApp [fn, arg]; Err [body]; Down/Up [body].
struct Term {
    TermKind kind = TermKind::Hole;
    std::string name;   // Lam/Let binder, Var display name, FreeVar name, Match head name
    std::string name2;  // Match tail name
    Ty ty;              // Lam/Let annotation, Hole, Nil/Cons element, FreeVar, Err inner type
    Ty ty2;             // Err outer type
    std::vector<Term> kids;
    size_t index = 0;        // Var (de Bruijn, 0 = innermost)
    std::string lit;         // LitInt, normalized decimal
    bool boolValue = false;  // LitBool
    JudgementDiff jd;        // Down/Up

    bool operator==(const Term&) const = default;
    size_t size() const;
    size_t depth() const;
};

Term mkLam(std::string x, Ty a, Term body);
Term mkApp(Term f, Term a);
Term mkVar(std::string x, size_t index);
Term mkLet(std::string x, Ty a, Term def, Term body);
Term mkMatch(Term scrut, Term nilBranch, std::string h, std::string t, Term consBranch);
Term mkHole(Ty a);
Term mkInt(std::string digits);
Term mkBool(bool b);
Term mkNil(Ty a);
Term mkCons(Ty a);
Term mkGhostApp(Term f, Term a);
Term mkFree(std::string x, Ty a);
Term mkErr(Ty inner, Ty outer, Term body);
Term mkDown(JudgementDiff jd, Term body);
Term mkUp(JudgementDiff jd, Term body);

// Child-index path from the root.
using TermPath = std::vector<size_t>;

const Term& subterm(const Term& t, const TermPath& p);
Term& subterm(Term& t, const TermPath& p);
std::string toString(const TermPath& p);

bool binds(const Term& t, size_t child);
bool isBoundary(const Term& t);

struct TypeError : std::runtime_error {
    TermPath path;
    TypeError(TermPath p, const std::string& msg);
};

// Throws TypeError for the first violating node in pre-order.
Ty infer(const Ctx& ctx, const Term& t);
std::optional<TypeError> typeCheck(const Ctx& ctx, const Term& t);

// Context of child i, given the node's own context.
Ctx childCtx(const Ctx& ctx, const Term& t, size_t i);

struct NodeJudgement {
    Ctx ctx;
    Ty ty;
};
// Context and type at the node reached by p; the whole term must type-check.
NodeJudgement judgementAt(const Term& root, const TermPath& p, const Ctx& rootCtx = {});

// Intrinsic typing rule of a form, instantiated with the node's binder names.
// Metavariable 0 is the context; the others are per-form.
struct TypingRule {
    std::string form;
    std::vector<Tree> premises;
    Tree conclusion;
    std::vector<uint32_t> nonlinear;
};

inline constexpr uint32_t kMetaCtx = 0;
inline constexpr uint32_t kMetaA = 1;
inline constexpr uint32_t kMetaB = 2;

TypingRule ruleFor(const Term& t);
std::vector<TypingRule> ruleTable();
// Binds the rule's metavariables from the node's context and its children's types.
MetaSubst ruleInstance(const Term& t, const Ctx& ctx);

std::string formName(TermKind k);

// A variable whose binder is shadowed by a same-named inner binder prints as (var x k).
std::string toString(const Term& t, const Ctx& ctx = {});
Term parseTerm(const SExpr& e, const Ctx& ctx = {});
Term parseTerm(std::string_view text, const Ctx& ctx = {});
Ty parseType(const SExpr& e);
Ty parseType(std::string_view text);

std::string normalizeIntLiteral(std::string_view s);

// A binder name not bound in ctx and not used anywhere in t.
std::string freshName(const std::string& base, const Ctx& ctx, const Term& t);

}  // namespace panto
