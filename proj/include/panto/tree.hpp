#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "panto/sexpr.hpp"

namespace panto {

enum class LabelKind : uint8_t { Arrow, Int, Bool, List, TyHole, EmptyCtx, CtxExtend, Turnstile, Meta };

struct Label {
    LabelKind kind = LabelKind::Int;
    uint32_t id = 0;   // TyHole and Meta
    std::string name;  // CtxExtend

    static Label arrow() { return {LabelKind::Arrow, 0, {}}; }
    static Label intL() { return {LabelKind::Int, 0, {}}; }
    static Label boolL() { return {LabelKind::Bool, 0, {}}; }
    static Label list() { return {LabelKind::List, 0, {}}; }
    static Label tyHole(uint32_t n) { return {LabelKind::TyHole, n, {}}; }
    static Label emptyCtx() { return {LabelKind::EmptyCtx, 0, {}}; }
    static Label ctxExtend(std::string x) { return {LabelKind::CtxExtend, 0, std::move(x)}; }
    static Label turnstile() { return {LabelKind::Turnstile, 0, {}}; }
    static Label meta(uint32_t n) { return {LabelKind::Meta, n, {}}; }

    size_t arity() const;
    bool operator==(const Label&) const = default;
    auto operator<=>(const Label&) const = default;
};

struct StructuralError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Tree {
    Label label;
    std::vector<Tree> kids;

    Tree() = default;
    Tree(Label l, std::vector<Tree> k = {});

    size_t depth() const;
    size_t size() const;
    bool hasMeta() const;
    bool operator==(const Tree&) const = default;
};

// One step of a one-hole context: a node with child `hole` left open.
struct Tooth {
    Label label;
    size_t hole = 0;
    std::vector<Tree> others;

    bool operator==(const Tooth&) const = default;
};

// Innermost tooth first.
using Path = std::vector<Tooth>;

using MetaSubst = std::map<uint32_t, Tree>;

Tree plug(const Tooth& c, Tree t);
Tree plug(const Path& p, Tree t);
// plug(pathConcat(outer, inner), t) == plug(outer, plug(inner, t))
Path pathConcat(const Path& outer, const Path& inner);
// Splits a node into the tooth around child i and that child.
Tooth toothAt(const Tree& t, size_t i);

Tree substMeta(const Tree& pattern, const MetaSubst& sigma);
Tooth substMeta(const Tooth& c, const MetaSubst& sigma);
Path substMeta(const Path& p, const MetaSubst& sigma);

// Type-tree shorthands.
Tree tInt();
Tree tBool();
Tree tArrow(Tree a, Tree b);
Tree tList(Tree a);
Tree tHole(uint32_t n);
Tree tMeta(uint32_t n);

std::string toString(const Label& l);
std::string toString(const Tree& t);
std::string toString(const Tooth& c);

Label parseLabel(const SExpr& e);
Tree parseTree(const SExpr& e);
Tree parseTree(std::string_view text);
// A tooth is written as its node with '@' in place of the hole.
Tooth parseTooth(const SExpr& e);

}  // namespace panto
