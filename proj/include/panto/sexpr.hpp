#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace panto {

struct ParseError : std::runtime_error {
    int line;
    int col;
    ParseError(const std::string& msg, int line, int col);
};

// A parsed S-expression: either an atom or a parenthesized list.
struct SExpr {
    bool isAtom = true;
    std::string atom;
    std::vector<SExpr> items;
    int line = 1;
    int col = 1;

    bool isAtomEq(std::string_view s) const { return isAtom && atom == s; }
    // Head symbol of a list, or empty when not a list headed by an atom.
    std::string head() const;
    [[noreturn]] void fail(const std::string& msg) const;
};

// Reads every top-level expression. Comments start with ';' and run to end of line.
std::vector<SExpr> readAll(std::string_view text);
// Reads exactly one expression.
SExpr readOne(std::string_view text);

std::string toString(const SExpr& e);

}  // namespace panto
