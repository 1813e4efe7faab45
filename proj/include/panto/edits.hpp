#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "panto/propagate.hpp"

namespace panto {

// A rejected edit leaves the program unchanged.
struct EditError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The edit was well-formed but the engine could not settle its configuration.
struct PropagationFailure : EditError {
    using EditError::EditError;
};

// A term node with child `hole` left open (the child slot holds a placeholder).
struct TermTooth {
    Term node;
    size_t hole = 0;
    bool operator==(const TermTooth&) const = default;
};

// Innermost tooth first, like tree paths.
using TermContext = std::vector<TermTooth>;

Term plug(const TermTooth& c, Term t);
Term plug(const TermContext& c, Term t);
// plug(termContextConcat(outer, inner), t) == plug(outer, plug(inner, t))
TermContext termContextConcat(const TermContext& outer, const TermContext& inner);

// The teeth passed through when walking `middle` down from t.
TermContext contextAlong(const Term& t, const TermPath& middle);

// Paths are written as terms with a single '@' where the hole goes; ctx is the context outside.
TermContext parseTermContext(const SExpr& e, const Ctx& ctx = {});
TermContext parseTermContext(std::string_view text, const Ctx& ctx = {});
std::string toString(const TermContext& c, const Ctx& ctx = {});

struct ToothTyping {
    JudgementDiff jd;  // inside to outside
    Ctx innerCtx;
    Ty outerTy;
};

// Types one tooth whose hole holds a term of type innerTy. Throws EditError when the
// tooth's other children do not fit.
ToothTyping toothTyping(const TermTooth& c, const Ctx& outerCtx, const Ty& innerTy);
JudgementDiff toothDiff(const TermTooth& c, const Ctx& outerCtx, const Ty& innerTy);
// Composition of the tooth diffs, innermost first; identities for the empty path.
JudgementDiff pathDiff(const TermContext& c, const Ctx& outerCtx, const Ty& innerTy);

struct Selection {
    TermPath outer;
    TermPath middle;
    bool operator==(const Selection&) const = default;
};

struct TermClip {
    Term term;
    Ctx ctx;
    Ty ty;
};
struct PathClip {
    TermContext path;
    Ctx ctx;    // outside the path where it was cut
    Ty innerTy;
    JudgementDiff jd;
};
using Clipboard = std::variant<TermClip, PathClip>;

struct EditOutcome {
    Term program;
    std::optional<Diff> finalTypeChange;
    StepTrace trace;
    Term setup;  // the configuration handed to the engine; for Move, the paste's
};

EditOutcome insertPath(const Term& program, const TermPath& cursor, const TermContext& path,
                       const SchedulerConfig& cfg = {});
EditOutcome deleteSelection(const Term& program, const Selection& sel, const SchedulerConfig& cfg = {});
EditOutcome annotateLam(const Term& program, const TermPath& site, const Diff& delta, const SchedulerConfig& cfg = {});
EditOutcome annotateLet(const Term& program, const TermPath& site, const Diff& delta, const SchedulerConfig& cfg = {});
// t is read in the context at the hole.
Term fillHole(const Term& program, const TermPath& cursor, const Term& t);
Term dig(const Term& program, const TermPath& cursor);

struct CutResult {
    EditOutcome outcome;
    Clipboard clip;
};
// An empty middle path cuts the term itself and leaves a hole.
CutResult cut(const Term& program, const Selection& sel, const SchedulerConfig& cfg = {});
Clipboard copy(const Term& program, const Selection& sel);
// Variables free in the clip are rebound by name at the cursor and must keep their types.
EditOutcome paste(const Term& program, const TermPath& cursor, const Clipboard& clip, const SchedulerConfig& cfg = {});

struct EditAction {
    enum class Kind { Insert, Delete, AnnotateLam, AnnotateLet, Fill, Dig, Cut, Copy, Paste, Move };
    Kind kind = Kind::Dig;
    TermPath at;            // cursor, or the outer path of a selection
    TermPath middle;        // Delete, Cut, Copy, Move
    TermPath target;        // Move: the paste cursor, addressed after the cut
    std::optional<SExpr> path;  // Insert: the path text, read in the cursor's context
    std::optional<Diff> delta;  // Annotate*
    std::optional<SExpr> term;  // Fill: read in the hole's context
    std::string label;      // menu text for enumerated actions
};

EditAction parseEditAction(const SExpr& e);
std::vector<EditAction> parseEditScript(std::string_view text);
std::string toString(const EditAction& a);

struct EditState {
    Term program;
    std::optional<Clipboard> clipboard;
};

// Applies one action; the clipboard is updated by cut and copy.
EditOutcome applyEdit(EditState& state, const EditAction& a, const SchedulerConfig& cfg = {});

// Largest type-hole id in the program plus one.
uint32_t nextTypeHole(const Term& program);

// Actions at the cursor whose label starts with query, each already checked to apply.
std::vector<EditAction> enumerateEdits(const Term& program, const TermPath& cursor, const std::string& query,
                                       uint32_t firstTypeHole);

}  // namespace panto
