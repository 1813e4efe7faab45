#include "panto/session.hpp"

#include <algorithm>

namespace panto {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "panto-session";
constexpr int kVersion = 1;

TermPath pathFrom(const json& j) {
    if (!j.is_array()) throw SessionError("path must be an array of child indices");
    TermPath p;
    for (const auto& k : j) {
        if (!k.is_number_integer() || k.get<int64_t>() < 0)
            throw SessionError("path entries must be non-negative integers");
        p.push_back(k.get<size_t>());
    }
    return p;
}

bool validPath(const Term& t, const TermPath& p) {
    const Term* cur = &t;
    for (size_t i : p) {
        if (i >= cur->kids.size()) return false;
        cur = &cur->kids[i];
    }
    return true;
}

// Longest prefix of p that still addresses a node.
TermPath clampPath(const Term& t, const TermPath& p) {
    TermPath out;
    const Term* cur = &t;
    for (size_t i : p) {
        if (i >= cur->kids.size()) break;
        out.push_back(i);
        cur = &cur->kids[i];
    }
    return out;
}

TermPath concat(TermPath a, const TermPath& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

std::string nodeLabel(const Term& t) {
    switch (t.kind) {
        case TermKind::Lam:
        case TermKind::Let:
        case TermKind::Var:
        case TermKind::FreeVar: return t.name;
        case TermKind::Match: return t.name + " " + t.name2;
        case TermKind::LitInt: return t.lit;
        case TermKind::LitBool: return t.boolValue ? "true" : "false";
        case TermKind::Hole:
        case TermKind::Nil:
        case TermKind::Cons: return toString(t.ty);
        case TermKind::Err: return toString(t.ty) + " " + toString(t.ty2);
        case TermKind::Down:
        case TermKind::Up: return toString(t.jd);
        default: return "";
    }
}

json nodeJson(const Term& t, const Ctx& ctx) {
    json kids = json::array();
    for (size_t i = 0; i < t.kids.size(); ++i) kids.push_back(nodeJson(t.kids[i], childCtx(ctx, t, i)));
    return {{"form", formName(t.kind)}, {"label", nodeLabel(t)}, {"type", toString(infer(ctx, t))}, {"kids", kids}};
}

json pathJson(const TermPath& p) { return json(p); }

json ctxJson(const Ctx& ctx) { return toString(ctxToTree(ctx)); }

Ctx ctxFrom(const json& j) { return ctxFromTree(parseTree(j.get<std::string>())); }

json clipJson(const Clipboard& c) {
    if (const auto* t = std::get_if<TermClip>(&c))
        return {{"kind", "term"}, {"ctx", ctxJson(t->ctx)}, {"term", toString(t->term, t->ctx)}, {"type", toString(t->ty)}};
    const auto& p = std::get<PathClip>(c);
    return {{"kind", "path"},
            {"ctx", ctxJson(p.ctx)},
            {"path", toString(p.path, p.ctx)},
            {"innerType", toString(p.innerTy)},
            {"diff", toString(p.jd)}};
}

Clipboard clipFrom(const json& j) {
    Ctx ctx = ctxFrom(j.at("ctx"));
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "term") {
        Term t = parseTerm(j.at("term").get<std::string>(), ctx);
        Ty ty = parseType(j.at("type").get<std::string>());
        if (infer(ctx, t) != ty) throw SessionError("clipboard term does not have its recorded type");
        return TermClip{std::move(t), std::move(ctx), std::move(ty)};
    }
    if (kind == "path") {
        TermContext path = parseTermContext(j.at("path").get<std::string>(), ctx);
        Ty inner = parseType(j.at("innerType").get<std::string>());
        JudgementDiff jd = parseJudgementDiff(readOne(j.at("diff").get<std::string>()));
        return PathClip{std::move(path), std::move(ctx), std::move(inner), std::move(jd)};
    }
    throw SessionError("unknown clipboard kind " + kind);
}

json selectionJson(const std::optional<Selection>& s) {
    if (!s) return nullptr;
    return {{"outer", pathJson(s->outer)}, {"middle", pathJson(s->middle)}};
}

Selection selectionFrom(const Term& program, const json& j) {
    Selection s{pathFrom(j.at("outer")), pathFrom(j.at("middle"))};
    if (!validPath(program, concat(s.outer, s.middle))) throw SessionError("selection does not address a node");
    return s;
}

SessionFrame frame(const SessionState& s) { return {s.program, s.cursor, s.selection, s.lastTypeChange}; }

void restoreFrame(SessionState& s, SessionFrame f) {
    s.program = std::move(f.program);
    s.cursor = std::move(f.cursor);
    s.selection = std::move(f.selection);
    s.lastTypeChange = std::move(f.lastTypeChange);
}

void requireProgram(const Term& t) {
    if (auto err = typeCheck({}, t)) throw SessionError(std::string("program does not type-check: ") + err->what());
    if (!boundarySites(t).empty()) throw SessionError("program contains diff boundaries");
}

TermPath moveInDirection(const Term& program, const TermPath& cursor, const std::string& dir) {
    TermPath p = cursor;
    const Term& here = subterm(program, cursor);
    if (dir == "up") {
        if (p.empty()) throw SessionError("cursor is at the root");
        p.pop_back();
    } else if (dir == "down") {
        if (here.kids.empty()) throw SessionError("cursor is at a leaf");
        p.push_back(0);
    } else if (dir == "left" || dir == "right") {
        if (p.empty()) throw SessionError("the root has no siblings");
        const Term& parent = subterm(program, TermPath(p.begin(), p.end() - 1));
        size_t i = p.back();
        if (dir == "left") {
            if (i == 0) throw SessionError("no sibling to the left");
            p.back() = i - 1;
        } else {
            if (i + 1 >= parent.kids.size()) throw SessionError("no sibling to the right");
            p.back() = i + 1;
        }
    } else {
        throw SessionError("unknown direction " + dir);
    }
    return p;
}

// Runs an edit against a copy of the state and commits it as one undo step.
void commitEdit(SessionState& s, const EditAction& a) {
    EditState es{s.program, s.clipboard};
    EditOutcome out = applyEdit(es, a, s.scheduler);
    requireProgram(out.program);
    s.undoStack.push_back(frame(s));
    s.redoStack.clear();
    s.program = std::move(out.program);
    s.clipboard = std::move(es.clipboard);
    s.lastTypeChange = std::move(out.finalTypeChange);
    s.selection.reset();
    s.cursor = clampPath(s.program, a.kind == EditAction::Kind::Move ? a.target : a.at);
    s.nextTypeHoleId = std::max(s.nextTypeHoleId, nextTypeHole(s.program));
}

EditAction selectionAction(const SessionState& s, EditAction::Kind k) {
    EditAction a;
    a.kind = k;
    if (s.selection) {
        a.at = s.selection->outer;
        a.middle = s.selection->middle;
    } else {
        a.at = s.cursor;
    }
    return a;
}

// Returns the response payload. `s` is a scratch copy, so a throw discards partial changes.
json dispatch(SessionState& s, const std::string& op, const json& req) {
    auto mutated = [&s] {
        ++s.revision;
        return json{{"snapshot", snapshot(s)}};
    };
    if (op == "load") {
        SessionState next;
        if (req.contains("session")) {
            next = restore(req.at("session").get<std::string>());
        } else {
            next.program = parseTerm(req.at("program").get<std::string>());
            requireProgram(next.program);
            next.nextTypeHoleId = nextTypeHole(next.program);
        }
        next.scheduler = s.scheduler;
        next.revision = std::max(s.revision, next.revision);
        s = std::move(next);
        return mutated();
    }
    if (op == "save") return {{"session", persist(s)}, {"program", toString(s.program)}};
    if (op == "getState") return {{"snapshot", snapshot(s)}};
    if (op == "moveCursor") {
        TermPath p = req.contains("path") ? pathFrom(req.at("path"))
                                          : moveInDirection(s.program, s.cursor, req.at("direction").get<std::string>());
        if (!validPath(s.program, p)) throw SessionError("cursor path does not address a node");
        s.cursor = std::move(p);
        return mutated();
    }
    if (op == "setSelection") {
        if (!req.contains("outer") || req.at("outer").is_null()) {
            s.selection.reset();
        } else {
            s.selection = selectionFrom(s.program, req);
        }
        return mutated();
    }
    if (op == "query") {
        std::string text = req.value("text", "");
        s.menu = enumerateEdits(s.program, s.cursor, text, s.nextTypeHoleId);
        json items = json::array();
        for (size_t i = 0; i < s.menu.size(); ++i)
            items.push_back({{"index", i}, {"label", s.menu[i].label}, {"action", toString(s.menu[i])}});
        return {{"menu", items}};
    }
    if (op == "applyEdit") {
        EditAction a;
        if (req.contains("index")) {
            size_t i = req.at("index").get<size_t>();
            if (i >= s.menu.size()) throw SessionError("no menu entry " + std::to_string(i));
            a = s.menu[i];
        } else {
            a = parseEditAction(readOne(req.at("action").get<std::string>()));
        }
        commitEdit(s, a);
        s.menu.clear();
        return mutated();
    }
    if (op == "cut" || op == "copy") {
        EditAction a = selectionAction(s, op == "cut" ? EditAction::Kind::Cut : EditAction::Kind::Copy);
        if (op == "copy") {
            s.clipboard = copy(s.program, {a.at, a.middle});
        } else {
            commitEdit(s, a);
        }
        return mutated();
    }
    if (op == "paste") {
        if (!s.clipboard) throw SessionError("the clipboard is empty");
        EditAction a;
        a.kind = EditAction::Kind::Paste;
        a.at = s.cursor;
        commitEdit(s, a);
        return mutated();
    }
    if (op == "undo" || op == "redo") {
        auto& from = op == "undo" ? s.undoStack : s.redoStack;
        auto& to = op == "undo" ? s.redoStack : s.undoStack;
        if (from.empty()) throw SessionError("nothing to " + op);
        to.push_back(frame(s));
        restoreFrame(s, std::move(from.back()));
        from.pop_back();
        return mutated();
    }
    throw SessionError("unknown op " + op);
}

}  // namespace

json snapshot(const SessionState& s) {
    return {{"revision", s.revision},
            {"program", toString(s.program)},
            {"tree", nodeJson(s.program, {})},
            {"cursor", pathJson(s.cursor)},
            {"selection", selectionJson(s.selection)},
            {"clipboard", s.clipboard ? clipJson(*s.clipboard) : json(nullptr)},
            {"finalTypeChange", s.lastTypeChange ? json(toString(*s.lastTypeChange)) : json(nullptr)},
            {"canUndo", !s.undoStack.empty()},
            {"canRedo", !s.redoStack.empty()}};
}

json handle(SessionState& state, const json& request) {
    json id = request.is_object() && request.contains("id") ? request.at("id") : json(nullptr);
    try {
        if (!request.is_object()) throw SessionError("request must be a JSON object");
        if (!request.contains("op") || !request.at("op").is_string()) throw SessionError("request needs a string op");
        SessionState work = state;
        json body = dispatch(work, request.at("op").get<std::string>(), request);
        state = std::move(work);
        body["id"] = id;
        body["ok"] = true;
        return body;
    } catch (const std::exception& e) {
        return {{"id", id}, {"ok", false}, {"error", e.what()}};
    }
}

std::string handleLine(SessionState& state, const std::string& line) {
    json req;
    try {
        req = json::parse(line);
    } catch (const json::parse_error& e) {
        return json{{"id", nullptr}, {"ok", false}, {"error", std::string("malformed JSON: ") + e.what()}}.dump();
    }
    return handle(state, req).dump();
}

std::string persist(const SessionState& s) {
    json j{{"format", kFormat},
           {"version", kVersion},
           {"program", toString(s.program)},
           {"cursor", pathJson(s.cursor)},
           {"selection", selectionJson(s.selection)},
           {"clipboard", s.clipboard ? clipJson(*s.clipboard) : json(nullptr)},
           {"nextTypeHoleId", s.nextTypeHoleId},
           {"revision", s.revision}};
    return j.dump(2) + "\n";
}

SessionState restore(const std::string& text) {
    try {
        json j = json::parse(text);
        if (j.value("format", "") != kFormat || j.value("version", 0) != kVersion)
            throw SessionError("not a version " + std::to_string(kVersion) + " session file");
        SessionState s;
        s.program = parseTerm(j.at("program").get<std::string>());
        requireProgram(s.program);
        s.cursor = pathFrom(j.at("cursor"));
        if (!validPath(s.program, s.cursor)) throw SessionError("cursor does not address a node");
        if (!j.at("selection").is_null()) s.selection = selectionFrom(s.program, j.at("selection"));
        if (!j.at("clipboard").is_null()) s.clipboard = clipFrom(j.at("clipboard"));
        s.nextTypeHoleId = std::max(j.at("nextTypeHoleId").get<uint32_t>(), nextTypeHole(s.program));
        s.revision = j.at("revision").get<uint64_t>();
        return s;
    } catch (const SessionError&) {
        throw;
    } catch (const std::exception& e) {
        throw SessionError(std::string("corrupt session file: ") + e.what());
    }
}

}  // namespace panto
