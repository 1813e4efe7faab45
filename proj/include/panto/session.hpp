#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "panto/edits.hpp"

namespace panto {

struct SessionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// What undo brings back; the clipboard is deliberately not part of it.
struct SessionFrame {
    Term program;
    TermPath cursor;
    std::optional<Selection> selection;
    std::optional<Diff> lastTypeChange;
};

struct SessionState {
    Term program = mkHole(tInt());
    TermPath cursor;
    std::optional<Selection> selection;
    std::optional<Clipboard> clipboard;
    std::vector<SessionFrame> undoStack;
    std::vector<SessionFrame> redoStack;
    uint32_t nextTypeHoleId = 0;
    uint64_t revision = 0;
    std::optional<Diff> lastTypeChange;  // of the most recent edit, for the snapshot
    std::vector<EditAction> menu;        // result of the last query
    SchedulerConfig scheduler;
};

// One request, one response. Failed requests leave the state untouched.
nlohmann::json handle(SessionState& state, const nlohmann::json& request);
// Same, for one JSON line in and one out; malformed JSON gets an error response with a null id.
std::string handleLine(SessionState& state, const std::string& line);

nlohmann::json snapshot(const SessionState& state);

// Program, cursor, selection, clipboard, type-hole counter and revision; no undo history.
std::string persist(const SessionState& state);
// Throws SessionError on malformed input or a program that does not type-check.
SessionState restore(const std::string& text);

}  // namespace panto
