#include "panto/sexpr.hpp"

namespace panto {

ParseError::ParseError(const std::string& msg, int line, int col)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
      line(line),
      col(col) {}

std::string SExpr::head() const {
    if (isAtom || items.empty() || !items[0].isAtom) return {};
    return items[0].atom;
}

void SExpr::fail(const std::string& msg) const { throw ParseError(msg, line, col); }

namespace {

class Reader {
public:
    explicit Reader(std::string_view text) : text_(text) {}

    bool atEnd() {
        skipSpace();
        return pos_ >= text_.size();
    }

    SExpr read() {
        skipSpace();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of input", line_, col_);
        SExpr e;
        e.line = line_;
        e.col = col_;
        char c = text_[pos_];
        if (c == ')') throw ParseError("unexpected ')'", line_, col_);
        if (c == '(') {
            advance();
            e.isAtom = false;
            for (;;) {
                skipSpace();
                if (pos_ >= text_.size()) throw ParseError("unclosed '('", e.line, e.col);
                if (text_[pos_] == ')') {
                    advance();
                    break;
                }
                e.items.push_back(read());
            }
            return e;
        }
        while (pos_ < text_.size() && !isDelim(text_[pos_])) {
            e.atom.push_back(text_[pos_]);
            advance();
        }
        return e;
    }

private:
    static bool isDelim(char c) {
        return c == '(' || c == ')' || c == ';' || c == ' ' || c == '\t' || c == '\n' || c == '\r';
    }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skipSpace() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == ';') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
                advance();
            } else {
                break;
            }
        }
    }

    std::string_view text_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

}  // namespace

std::vector<SExpr> readAll(std::string_view text) {
    Reader r(text);
    std::vector<SExpr> out;
    while (!r.atEnd()) out.push_back(r.read());
    return out;
}

SExpr readOne(std::string_view text) {
    Reader r(text);
    SExpr e = r.read();
    if (!r.atEnd()) {
        auto rest = r.read();
        throw ParseError("trailing input after expression", rest.line, rest.col);
    }
    return e;
}

std::string toString(const SExpr& e) {
    if (e.isAtom) return e.atom;
    std::string s = "(";
    for (size_t i = 0; i < e.items.size(); ++i) {
        if (i) s += ' ';
        s += toString(e.items[i]);
    }
    return s + ")";
}

}  // namespace panto
