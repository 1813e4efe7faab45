#include "panto/tree.hpp"

#include <algorithm>
#include <charconv>

namespace panto {

size_t Label::arity() const {
    switch (kind) {
        case LabelKind::Arrow: return 2;
        case LabelKind::List: return 1;
        case LabelKind::CtxExtend: return 2;
        case LabelKind::Turnstile: return 2;
        default: return 0;
    }
}

Tree::Tree(Label l, std::vector<Tree> k) : label(std::move(l)), kids(std::move(k)) {
    if (kids.size() != label.arity())
        throw StructuralError("arity mismatch for label " + toString(label) + ": expected " +
                              std::to_string(label.arity()) + ", got " + std::to_string(kids.size()));
}

size_t Tree::depth() const {
    size_t d = 0;
    for (const auto& k : kids) d = std::max(d, k.depth());
    return d + 1;
}

size_t Tree::size() const {
    size_t n = 1;
    for (const auto& k : kids) n += k.size();
    return n;
}

bool Tree::hasMeta() const {
    if (label.kind == LabelKind::Meta) return true;
    return std::any_of(kids.begin(), kids.end(), [](const Tree& k) { return k.hasMeta(); });
}

Tree plug(const Tooth& c, Tree t) {
    if (c.hole >= c.label.arity() || c.others.size() + 1 != c.label.arity())
        throw StructuralError("malformed tooth " + toString(c));
    std::vector<Tree> kids;
    kids.reserve(c.label.arity());
    for (size_t i = 0, j = 0; i < c.label.arity(); ++i) kids.push_back(i == c.hole ? std::move(t) : c.others[j++]);
    return Tree(c.label, std::move(kids));
}

Tree plug(const Path& p, Tree t) {
    for (const auto& c : p) t = plug(c, std::move(t));
    return t;
}

Path pathConcat(const Path& outer, const Path& inner) {
    Path out = inner;
    out.insert(out.end(), outer.begin(), outer.end());
    return out;
}

Tooth toothAt(const Tree& t, size_t i) {
    if (i >= t.kids.size()) throw StructuralError("no child " + std::to_string(i) + " in " + toString(t));
    Tooth c{t.label, i, {}};
    for (size_t j = 0; j < t.kids.size(); ++j)
        if (j != i) c.others.push_back(t.kids[j]);
    return c;
}

Tree substMeta(const Tree& pattern, const MetaSubst& sigma) {
    if (pattern.label.kind == LabelKind::Meta) {
        auto it = sigma.find(pattern.label.id);
        if (it == sigma.end()) throw StructuralError("unbound metavariable $" + std::to_string(pattern.label.id));
        return it->second;
    }
    std::vector<Tree> kids;
    kids.reserve(pattern.kids.size());
    for (const auto& k : pattern.kids) kids.push_back(substMeta(k, sigma));
    return Tree(pattern.label, std::move(kids));
}

Tooth substMeta(const Tooth& c, const MetaSubst& sigma) {
    Tooth out{c.label, c.hole, {}};
    for (const auto& o : c.others) out.others.push_back(substMeta(o, sigma));
    return out;
}

Path substMeta(const Path& p, const MetaSubst& sigma) {
    Path out;
    for (const auto& c : p) out.push_back(substMeta(c, sigma));
    return out;
}

Tree tInt() { return Tree(Label::intL()); }
Tree tBool() { return Tree(Label::boolL()); }
Tree tArrow(Tree a, Tree b) { return Tree(Label::arrow(), {std::move(a), std::move(b)}); }
Tree tList(Tree a) { return Tree(Label::list(), {std::move(a)}); }
Tree tHole(uint32_t n) { return Tree(Label::tyHole(n)); }
Tree tMeta(uint32_t n) { return Tree(Label::meta(n)); }

std::string toString(const Label& l) {
    switch (l.kind) {
        case LabelKind::Arrow: return "->";
        case LabelKind::Int: return "Int";
        case LabelKind::Bool: return "Bool";
        case LabelKind::List: return "List";
        case LabelKind::TyHole: return "(? " + std::to_string(l.id) + ")";
        case LabelKind::EmptyCtx: return "empty";
        case LabelKind::CtxExtend: return "(ext " + l.name + ")";
        case LabelKind::Turnstile: return "|-";
        case LabelKind::Meta: return "($ " + std::to_string(l.id) + ")";
    }
    return "?";
}

namespace {

// Head text used when a label starts a list form: "->", "List", "ext x", "|-".
std::string headText(const Label& l) {
    if (l.kind == LabelKind::CtxExtend) return "ext " + l.name;
    return toString(l);
}

uint32_t parseNat(const SExpr& e) {
    if (!e.isAtom) e.fail("expected a natural number");
    uint32_t n = 0;
    auto [p, ec] = std::from_chars(e.atom.data(), e.atom.data() + e.atom.size(), n);
    if (ec != std::errc() || p != e.atom.data() + e.atom.size()) e.fail("expected a natural number, got '" + e.atom + "'");
    return n;
}

// Parses the label part of a tree or tooth form and returns the index of its first child item.
Label labelOfForm(const SExpr& e, size_t& firstChild) {
    if (e.isAtom) {
        firstChild = 0;
        if (e.atom == "Int") return Label::intL();
        if (e.atom == "Bool") return Label::boolL();
        if (e.atom == "empty") return Label::emptyCtx();
        e.fail("unknown tree atom '" + e.atom + "'");
    }
    std::string h = e.head();
    firstChild = 1;
    if (h == "->") return Label::arrow();
    if (h == "List") return Label::list();
    if (h == "|-") return Label::turnstile();
    if (h == "?" || h == "$") {
        if (e.items.size() != 2) e.fail("expected (" + h + " <nat>)");
        firstChild = 2;
        return h == "?" ? Label::tyHole(parseNat(e.items[1])) : Label::meta(parseNat(e.items[1]));
    }
    if (h == "ext") {
        if (e.items.size() < 2 || !e.items[1].isAtom) e.fail("expected (ext <name> ...)");
        firstChild = 2;
        return Label::ctxExtend(e.items[1].atom);
    }
    e.fail("unknown tree form '" + h + "'");
}

}  // namespace

std::string toString(const Tree& t) {
    if (t.kids.empty()) return toString(t.label);
    std::string s = "(" + headText(t.label);
    for (const auto& k : t.kids) s += " " + toString(k);
    return s + ")";
}

std::string toString(const Tooth& c) {
    std::string s = "(" + headText(c.label);
    for (size_t i = 0, j = 0; i < c.label.arity(); ++i) s += " " + (i == c.hole ? std::string("@") : toString(c.others[j++]));
    return s + ")";
}

Label parseLabel(const SExpr& e) {
    if (e.isAtom) {
        if (e.atom == "->") return Label::arrow();
        if (e.atom == "List") return Label::list();
        if (e.atom == "|-") return Label::turnstile();
    } else if (e.head() == "ext") {
        if (e.items.size() != 2 || !e.items[1].isAtom) e.fail("expected (ext <name>)");
        return Label::ctxExtend(e.items[1].atom);
    }
    size_t first = 0;
    Label l = labelOfForm(e, first);
    if (!e.isAtom && first != e.items.size()) e.fail("label form takes no children");
    return l;
}

Tree parseTree(const SExpr& e) {
    size_t first = 0;
    Label l = labelOfForm(e, first);
    std::vector<Tree> kids;
    if (!e.isAtom)
        for (size_t i = first; i < e.items.size(); ++i) kids.push_back(parseTree(e.items[i]));
    if (kids.size() != l.arity()) e.fail("wrong number of children for " + toString(l));
    return Tree(l, std::move(kids));
}

Tree parseTree(std::string_view text) { return parseTree(readOne(text)); }

Tooth parseTooth(const SExpr& e) {
    if (e.isAtom) e.fail("a tooth must be a list form with one '@'");
    size_t first = 0;
    Label l = labelOfForm(e, first);
    Tooth c{l, 0, {}};
    size_t holes = 0;
    for (size_t i = first; i < e.items.size(); ++i) {
        if (e.items[i].isAtomEq("@")) {
            c.hole = i - first;
            ++holes;
        } else {
            c.others.push_back(parseTree(e.items[i]));
        }
    }
    if (holes != 1) e.fail("a tooth needs exactly one '@'");
    if (c.others.size() + 1 != l.arity()) e.fail("wrong number of children in tooth for " + toString(l));
    return c;
}

}  // namespace panto
