#pragma once

#include "gen_trees.hpp"
#include "panto/lang.hpp"

namespace panto::testgen {

inline Ty randomConcreteType(Rng& rng, size_t depth) {
    size_t choice = depth <= 1 ? pick(rng, 2) : pick(rng, 5);
    switch (choice) {
        case 0: return tInt();
        case 1: return tBool();
        case 2: return tList(randomConcreteType(rng, depth - 1));
        default: return tArrow(randomConcreteType(rng, depth - 1), randomConcreteType(rng, depth - 1));
    }
}

// Type-directed generator of well-typed, boundary-free terms. `budget` caps the node count.
struct TermGen {
    Rng& rng;
    size_t maxDepth = 12;
    long budget = 40;
    bool allowErrorForms = true;

    std::string name() {
        static const char* pool[] = {"x", "y", "z", "f", "g", "n", "l", "k"};
        return pool[pick(rng, 8)];
    }

    Term leaf(const Ctx& ctx, const Ty& ty) {
        std::vector<Term> options;
        for (size_t i = 0; i < ctx.size(); ++i) {
            const Binding& b = ctx[ctx.size() - 1 - i];
            if (b.ty == ty) options.push_back(mkVar(b.name, i));
        }
        if (ty == tInt()) options.push_back(mkInt(std::to_string(pick(rng, 100))));
        if (ty == tBool()) options.push_back(mkBool(pick(rng, 2)));
        if (ty.label.kind == LabelKind::List) options.push_back(mkNil(ty.kids[0]));
        if (ty.label.kind == LabelKind::Arrow && ty.kids[1].label.kind == LabelKind::Arrow &&
            ty.kids[1].kids[0] == tList(ty.kids[0]) && ty.kids[1].kids[1] == tList(ty.kids[0]))
            options.push_back(mkCons(ty.kids[0]));
        if (allowErrorForms && pick(rng, 8) == 0) options.push_back(mkFree(name() + "0", ty));
        options.push_back(mkHole(ty));
        return options[pick(rng, options.size())];
    }

    Term gen(const Ctx& ctx, const Ty& ty, size_t depth) {
        --budget;
        if (depth >= maxDepth || budget <= 0 || pick(rng, 5) == 0) return leaf(ctx, ty);
        auto extend = [&](const std::string& x, const Ty& a) {
            Ctx c = ctx;
            c.push_back({x, a});
            return c;
        };
        for (;;) {
            switch (pick(rng, 10)) {
                case 0:
                case 1:
                    if (ty.label.kind == LabelKind::Arrow) {
                        std::string x = name();
                        return mkLam(x, ty.kids[0], gen(extend(x, ty.kids[0]), ty.kids[1], depth + 1));
                    }
                    break;
                case 2:
                case 3: {
                    Ty a = randomConcreteType(rng, 2);
                    Term f = gen(ctx, tArrow(a, ty), depth + 1);
                    return mkApp(std::move(f), gen(ctx, a, depth + 1));
                }
                case 4: {
                    std::string x = name();
                    Ty a = randomConcreteType(rng, 2);
                    Ctx inner = extend(x, a);
                    Term d = gen(inner, a, depth + 1);
                    return mkLet(x, a, std::move(d), gen(inner, ty, depth + 1));
                }
                case 5: {
                    Ty elem = randomConcreteType(rng, 1);
                    Term s = gen(ctx, tList(elem), depth + 1);
                    Term n = gen(ctx, ty, depth + 1);
                    std::string h = name(), t = name();
                    if (t == h) t += "s";
                    Ctx inner = extend(h, elem);
                    inner.push_back({t, tList(elem)});
                    return mkMatch(std::move(s), std::move(n), h, t, gen(inner, ty, depth + 1));
                }
                case 6:
                    if (ty.label.kind == LabelKind::List) {
                        Ty e = ty.kids[0];
                        Term hd = gen(ctx, e, depth + 2);
                        Term tl = gen(ctx, ty, depth + 2);
                        return mkApp(mkApp(mkCons(e), std::move(hd)), std::move(tl));
                    }
                    break;
                case 7:
                    if (allowErrorForms && pick(rng, 3) == 0) {
                        Term f = gen(ctx, ty, depth + 1);
                        return mkGhostApp(std::move(f), gen(ctx, randomConcreteType(rng, 2), depth + 1));
                    }
                    break;
                case 8:
                    if (allowErrorForms && pick(rng, 3) == 0) {
                        Ty a = randomConcreteType(rng, 2);
                        return mkErr(a, ty, gen(ctx, a, depth + 1));
                    }
                    break;
                default: return leaf(ctx, ty);
            }
        }
    }
};

inline Term randomProgram(Rng& rng, size_t maxDepth = 12, long budget = 40) {
    TermGen g{rng, maxDepth, budget};
    return g.gen({}, randomConcreteType(rng, 3), 1);
}

}  // namespace panto::testgen
