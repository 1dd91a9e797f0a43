#include "emext/resolution.hpp"

#include <algorithm>

namespace emext {

int AcyclicClosure::unit_item() const
{
    Key k = is_tensor() ? Key{} : Key(sweights.size() * copies, 0);
    int i = find_item(k);
    if (i < 0)
        throw InternalError("closure has no unit item");
    return i;
}

int AcyclicClosure::find_item(const Key& skey) const
{
    auto it = item_index.find(skey);
    return it == item_index.end() ? -1 : it->second;
}

void mod_add_scaled(const DgaPresentation& pres, ModElt& a, const Scalar& c, const ModElt& b)
{
    for (const auto& [i, p] : b) {
        poly_add_scaled(pres, a[i], c, p);
        if (poly_is_zero(a[i]))
            a.erase(i);
    }
}

bool mod_is_zero(const ModElt& x)
{
    return x.empty();
}

ModElt closure_delta(const AcyclicClosure& C, const ModElt& x)
{
    const DgaPresentation& A = *C.base;
    const Field& F = A.field;
    ModElt out;
    for (const auto& [i, a] : x) {
        /* da (x) m_i */
        Poly da = apply_diff(A, a);
        if (!poly_is_zero(da)) {
            poly_add_scaled(A, out[i], F.one(), da);
            if (poly_is_zero(out[i]))
                out.erase(i);
        }
        /* (-1)^|a| a * delta(m_i), per homogeneous monomial of a */
        for (const auto& [k, c] : a) {
            Scalar cc = A.degree_of(k) % 2 != 0 ? F.neg(c) : c;
            for (const auto& [j, b] : C.delta[i]) {
                Poly prod = multiply(A, poly_term(k, cc), b);
                poly_add_scaled(A, out[j], F.one(), prod);
                if (poly_is_zero(out[j]))
                    out.erase(j);
            }
        }
    }
    return out;
}

namespace {

void assert_delta_squared(const AcyclicClosure& C)
{
    for (size_t i = 0; i < C.items.size(); ++i) {
        if (!mod_is_zero(closure_delta(C, C.delta[i])))
            throw InternalError("delta^2 != 0 on semibasis element #" + std::to_string(i));
    }
}

void sort_items(AcyclicClosure& C)
{
    std::vector<int> order(C.items.size());
    for (size_t i = 0; i < order.size(); ++i)
        order[i] = (int)i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (C.items[a].degree != C.items[b].degree)
            return C.items[a].degree < C.items[b].degree;
        return KeyLess{}(C.items[a].skey, C.items[b].skey);
    });
    std::vector<int> pos(order.size());
    for (size_t i = 0; i < order.size(); ++i)
        pos[order[i]] = (int)i;
    std::vector<ClosureItem> items;
    std::vector<ModElt> delta;
    items.reserve(order.size());
    delta.reserve(order.size());
    for (int o : order) {
        items.push_back(std::move(C.items[o]));
        ModElt d;
        for (auto& [j, p] : C.delta[o])
            d[pos[j]] = std::move(p);
        delta.push_back(std::move(d));
    }
    C.items = std::move(items);
    C.delta = std::move(delta);
    C.item_index.clear();
    for (size_t i = 0; i < C.items.size(); ++i)
        C.item_index[C.items[i].skey] = (int)i;
}

/* s(c * y . u) = c (-1)^|y| y (x) s(u) for a word ending in the letter u. */
ModElt ah_s(const AcyclicClosure& C, const Poly& z)
{
    const DgaPresentation& A = *C.base;
    const Field& F = A.field;
    ModElt out;
    for (const auto& [w, c] : z) {
        if (w.empty())
            continue;  // s vanishes on scalars
        Key prefix(w.begin(), w.end() - 1);
        int last = w.back();
        int pdeg = A.degree_of(prefix);
        Scalar cc = pdeg % 2 != 0 ? F.neg(c) : c;
        Key item_key{last};
        int idx = C.find_item(item_key);
        if (idx < 0)
            throw InternalError("missing s-item in tensor closure");
        poly_add_scaled(A, out[idx], cc, poly_term(prefix, F.one()));
        if (poly_is_zero(out[idx]))
            out.erase(idx);
    }
    return out;
}

}  // namespace

AcyclicClosure ah_acyclic_closure(std::shared_ptr<const DgaPresentation> pres)
{
    if (pres->flavor != Flavor::tensor)
        throw UsageError("ah_acyclic_closure requires a tensor (adams-hilton) presentation");
    AcyclicClosure C;
    C.base = pres;
    C.weight_bound = -1;
    C.items.push_back({Key{}, 0, 0});
    C.delta.push_back({});
    for (size_t i = 0; i < pres->gens.size(); ++i) {
        int deg = pres->gens[i].degree + 1;
        C.items.push_back({Key{(int)i}, deg, deg});
        C.delta.push_back({});
    }
    C.item_index.clear();
    for (size_t i = 0; i < C.items.size(); ++i)
        C.item_index[C.items[i].skey] = (int)i;

    /* delta(1 (x) sv) = v (x) 1 - s(dv); the module rule supplies the
     * dz (x) sv and sign terms on general elements. */
    const Field& F = pres->field;
    for (size_t i = 0; i < pres->gens.size(); ++i) {
        int idx = C.find_item(Key{(int)i});
        ModElt d;
        d[C.unit_item()] = poly_gen(*pres, (int)i);
        ModElt sdv = ah_s(C, pres->diff.images[i]);
        mod_add_scaled(*pres, d, F.from_int(-1), sdv);
        C.delta[idx] = std::move(d);
    }
    sort_items(C);
    assert_delta_squared(C);
    return C;
}

ModElt ah_contraction_defect(const AcyclicClosure& C, const Key& word)
{
    const DgaPresentation& A = *C.base;
    const Field& F = A.field;
    Poly z = poly_term(word, F.one());
    /* delta(s(z)) + s(dz) - z (x) 1 */
    ModElt out = closure_delta(C, ah_s(C, z));
    mod_add_scaled(A, out, F.one(), ah_s(C, apply_diff(A, z)));
    ModElt unit_part;
    unit_part[C.unit_item()] = z;
    mod_add_scaled(A, out, F.from_int(-1), unit_part);
    return out;
}

namespace {

/* Split an extended-presentation monomial into (base part, s part). The
 * extended generator list keeps every base generator before every
 * s-generator, so the canonical factor sequence splits without a sign. */
std::pair<Key, Key> split_ext_key(int n_base, size_t n_total, const Key& k)
{
    Key base(k.begin(), k.begin() + n_base);
    Key s(k.begin() + n_base, k.end());
    (void)n_total;
    return {std::move(base), std::move(s)};
}

Key join_ext_key(const Key& base, const Key& s)
{
    Key k = base;
    k.insert(k.end(), s.begin(), s.end());
    return k;
}

/* Embed a base-presentation poly into the extended presentation. */
Poly embed_poly(const DgaPresentation& ext, int n_base, const Poly& p)
{
    Poly out;
    size_t n = ext.gens.size();
    for (const auto& [k, c] : p) {
        Key kk = k;
        kk.resize(n, 0);
        (void)n_base;
        out[kk] = c;
    }
    return out;
}

ModElt mod_from_ext_poly(const AcyclicClosure& C, const Poly& p)
{
    ModElt out;
    const DgaPresentation& A = *C.base;
    for (const auto& [k, c] : p) {
        auto [bk, sk] = split_ext_key(C.n_base, C.ext->gens.size(), k);
        int idx = C.find_item(sk);
        if (idx < 0)
            throw InternalError("closure delta leaves the stored weight range");
        poly_add_scaled(A, out[idx], c, poly_term(bk, A.field.one()));
        if (poly_is_zero(out[idx]))
            out.erase(idx);
    }
    return out;
}

/* Enumerate s-monomials with weight <= bound (parity caps odd exponents). */
void enum_weighted(const DgaPresentation& ext, int n_base, const std::vector<int>& weights, size_t i, int remaining,
                   Key& cur, std::vector<Key>& out)
{
    if (i >= weights.size()) {
        out.push_back(cur);
        return;
    }
    int gi = n_base + (int)i;
    int w = weights[i];
    int emax = ext.gens[gi].odd() ? 1 : (w > 0 ? remaining / w : 0);
    for (int e = 0; e <= emax; ++e) {
        if (e * w > remaining)
            break;
        cur[i] = e;
        enum_weighted(ext, n_base, weights, i + 1, remaining - e * w, cur, out);
    }
    cur[i] = 0;
}

}  // namespace

AcyclicClosure sullivan_acyclic_closure(std::shared_ptr<const DgaPresentation> pres, int weight_bound)
{
    if (pres->flavor != Flavor::commutative)
        throw UsageError("sullivan_acyclic_closure requires a commutative (sullivan) presentation");
    if (weight_bound < 1)
        throw UsageError("weight_bound must be >= 1");

    const Field& F = pres->field;
    size_t nb = pres->gens.size();

    /* Extended presentation Lambda(V u sV); |sv| = |v| - 1. */
    auto ext = std::make_shared<DgaPresentation>();
    ext->field = F;
    ext->flavor = Flavor::commutative;
    for (const auto& g : pres->gens)
        ext->gens.push_back(g);
    for (const auto& g : pres->gens)
        ext->gens.push_back({"s(" + g.name + ")", g.degree - 1});
    ext->diff.shift = +1;
    ext->diff.images.assign(ext->gens.size(), poly_zero());
    for (size_t i = 0; i < nb; ++i)
        ext->diff.images[i] = embed_poly(*ext, (int)nb, pres->diff.images[i]);

    /* Build delta(sv) = v - c_v generator by generator. Ascending degree is
     * the natural order, but a generator whose differential needs a not yet
     * built s-generator (contractible pairs) is deferred and retried. */
    std::vector<int> order(nb);
    for (size_t i = 0; i < nb; ++i)
        order[i] = (int)i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return std::tie(pres->gens[a].degree, pres->gens[a].name) <
               std::tie(pres->gens[b].degree, pres->gens[b].name);
    });

    std::vector<bool> built(nb, false);
    std::vector<int> sweights(nb, 0);
    std::vector<int> pending = order;
    while (!pending.empty()) {
        std::vector<int> next;
        bool progress = false;
        for (int g : pending) {
            int vdeg = pres->gens[g].degree;
            Poly dv = ext->diff.images[g];

            /* Candidate monomials for c_v: degree |v|, at least one s-factor,
             * only built s-generators. Ordered so the solver prefers low
             * weights (base factor present first, then by s-weight). */
            std::vector<Key> cand;
            for (const Key& k : basis_of_degree(*ext, vdeg)) {
                int stotal = 0, sweight = 0;
                bool ok = true;
                for (size_t j = 0; j < nb; ++j) {
                    int e = k[nb + j];
                    if (e > 0 && !built[j]) {
                        ok = false;
                        break;
                    }
                    stotal += e;
                    sweight += e * sweights[j];
                }
                if (ok && stotal >= 1)
                    cand.push_back(k);
            }
            auto base_len = [&](const Key& k) {
                int n = 0;
                for (size_t j = 0; j < nb; ++j)
                    n += k[j];
                return n;
            };
            auto cand_weight = [&](const Key& k) {
                int w = 0;
                for (size_t j = 0; j < nb; ++j)
                    w += k[nb + j] * sweights[j];
                return w;
            };
            std::stable_sort(cand.begin(), cand.end(), [&](const Key& a, const Key& b) {
                int wa = cand_weight(a), wb = cand_weight(b);
                if (wa != wb)
                    return wa < wb;
                return base_len(a) > base_len(b);
            });

            std::vector<Key> target = basis_of_degree(*ext, vdeg + 1);
            SparseMat M((int)target.size(), (int)cand.size());
            for (size_t j = 0; j < cand.size(); ++j) {
                Poly dc = apply_diff(*ext, poly_term(cand[j], F.one()));
                Vec col = poly_to_vec(*ext, dc, target);
                for (const auto& [r, v] : col)
                    M.set(r, (int)j, v);
            }
            auto sol = solve_linear(F, M, poly_to_vec(*ext, dv, target));
            if (!sol) {
                next.push_back(g);
                continue;
            }
            Poly c_v;
            int w = vdeg - 1;  // |sv|
            for (const auto& [j, coef] : *sol) {
                poly_add_scaled(*ext, c_v, coef, poly_term(cand[j], F.one()));
                w = std::max(w, cand_weight(cand[j]));
            }
            Poly image = poly_gen(*ext, g);
            poly_add_scaled(*ext, image, F.from_int(-1), c_v);
            ext->diff.images[nb + g] = std::move(image);
            built[g] = true;
            sweights[g] = w;
            progress = true;
        }
        if (!progress) {
            std::string names;
            for (int g : next)
                names += (names.empty() ? "" : ", ") + pres->gens[g].name;
            throw ComputeError("cannot build acyclic closure: lifting system unsolvable for " + names +
                               " (check d^2 = 0 or raise the weight bound)");
        }
        pending = std::move(next);
    }

    if (auto viol = check_differential(*ext))
        throw InternalError("extended differential fails d^2 = 0 at " + ext->gens[viol->gen_index].name);

    AcyclicClosure C;
    C.base = pres;
    C.ext = ext;
    C.n_base = (int)nb;
    C.copies = 1;
    C.sweights = sweights;
    C.weight_bound = weight_bound;

    std::vector<Key> skeys;
    Key cur(nb, 0);
    enum_weighted(*ext, (int)nb, sweights, 0, weight_bound, cur, skeys);
    for (const Key& sk : skeys) {
        int deg = 0, w = 0;
        for (size_t j = 0; j < nb; ++j) {
            deg += sk[j] * ext->gens[nb + j].degree;
            w += sk[j] * sweights[j];
        }
        C.items.push_back({sk, deg, w});
    }
    C.delta.resize(C.items.size());
    C.item_index.clear();
    for (size_t i = 0; i < C.items.size(); ++i)
        C.item_index[C.items[i].skey] = (int)i;
    sort_items(C);

    for (size_t i = 0; i < C.items.size(); ++i) {
        Key full = join_ext_key(Key(nb, 0), C.items[i].skey);
        Poly ds = apply_diff(*ext, poly_term(full, F.one()));
        C.delta[i] = mod_from_ext_poly(C, ds);
    }
    assert_delta_squared(C);
    return C;
}

AcyclicClosure tensor_power_resolution(const AcyclicClosure& P, int n)
{
    if (P.is_tensor())
        throw UsageError("tensor_power_resolution requires a commutative closure");
    if (n < 1)
        throw UsageError("tensor power requires n >= 1");
    const DgaPresentation& base = *P.base;
    const Field& F = base.field;
    size_t nb = base.gens.size();
    size_t ns = P.sweights.size();

    auto ext = std::make_shared<DgaPresentation>();
    ext->field = F;
    ext->flavor = Flavor::commutative;
    for (const auto& g : base.gens)
        ext->gens.push_back(g);
    for (int c = 0; c < n; ++c)
        for (size_t j = 0; j < ns; ++j)
            ext->gens.push_back({P.ext->gens[nb + j].name + "#" + std::to_string(c + 1), P.ext->gens[nb + j].degree});
    ext->diff.shift = +1;
    ext->diff.images.assign(ext->gens.size(), poly_zero());

    /* Copy-c images: remap the s-part of each monomial of delta(sv) into
     * copy c; the base part is shared. */
    auto remap = [&](const Poly& p, int c) {
        Poly out;
        for (const auto& [k, v] : p) {
            Key kk(ext->gens.size(), 0);
            for (size_t j = 0; j < nb; ++j)
                kk[j] = k[j];
            for (size_t j = 0; j < ns; ++j)
                kk[nb + c * ns + j] = k[nb + j];
            out[kk] = v;
        }
        return out;
    };
    for (size_t j = 0; j < nb; ++j)
        ext->diff.images[j] = remap(P.ext->diff.images[j], 0);
    for (int c = 0; c < n; ++c)
        for (size_t j = 0; j < ns; ++j)
            ext->diff.images[nb + c * ns + j] = remap(P.ext->diff.images[nb + j], c);

    AcyclicClosure Q;
    Q.base = P.base;
    Q.ext = ext;
    Q.n_base = (int)nb;
    Q.copies = n;
    Q.sweights = P.sweights;
    Q.weight_bound = P.weight_bound;

    std::vector<int> weights;
    for (int c = 0; c < n; ++c)
        weights.insert(weights.end(), P.sweights.begin(), P.sweights.end());
    std::vector<Key> skeys;
    Key cur(ns * n, 0);
    enum_weighted(*ext, (int)nb, weights, 0, Q.weight_bound, cur, skeys);
    for (const Key& sk : skeys) {
        int deg = 0, w = 0;
        for (size_t j = 0; j < sk.size(); ++j) {
            deg += sk[j] * ext->gens[nb + j].degree;
            w += sk[j] * weights[j];
        }
        Q.items.push_back({sk, deg, w});
    }
    Q.delta.resize(Q.items.size());
    Q.item_index.clear();
    for (size_t i = 0; i < Q.items.size(); ++i)
        Q.item_index[Q.items[i].skey] = (int)i;
    sort_items(Q);

    for (size_t i = 0; i < Q.items.size(); ++i) {
        Key full = join_ext_key(Key(nb, 0), Q.items[i].skey);
        Poly ds = apply_diff(*ext, poly_term(full, F.one()));
        Q.delta[i] = mod_from_ext_poly(Q, ds);
    }
    assert_delta_squared(Q);
    return Q;
}

ClosureComplex closure_total_complex(const AcyclicClosure& C, int hi)
{
    const DgaPresentation& A = *C.base;
    ClosureComplex cc;
    cc.cx.shift = A.diff_shift();
    std::map<int, std::vector<Key>> abasis;
    for (int d = 0; d <= hi; ++d)
        abasis[d] = basis_of_degree(A, d);

    for (int ndeg = 0; ndeg <= hi; ++ndeg) {
        auto& b = cc.basis[ndeg];
        for (size_t i = 0; i < C.items.size(); ++i) {
            int ad = ndeg - C.items[i].degree;
            if (ad < 0)
                continue;
            for (const Key& k : abasis[ad])
                b.emplace_back((int)i, k);
        }
        auto& ix = cc.index[ndeg];
        for (size_t j = 0; j < b.size(); ++j)
            ix[b[j]] = (int)j;
        cc.cx.dims[ndeg] = (int)b.size();
    }

    const Field& F = A.field;
    for (int ndeg = 0; ndeg <= hi; ++ndeg) {
        int tdeg = ndeg + cc.cx.shift;
        if (tdeg < 0 || tdeg > hi || cc.basis[ndeg].empty())
            continue;
        SparseMat M((int)cc.basis[tdeg].size(), (int)cc.basis[ndeg].size());
        auto& tix = cc.index[tdeg];
        for (size_t j = 0; j < cc.basis[ndeg].size(); ++j) {
            const auto& [item, bkey] = cc.basis[ndeg][j];
            ModElt x;
            x[item] = poly_term(bkey, F.one());
            ModElt dx = closure_delta(C, x);
            for (const auto& [it, p] : dx) {
                for (const auto& [k, c] : p) {
                    auto f = tix.find({it, k});
                    if (f == tix.end())
                        throw InternalError("closure differential leaves the truncated complex");
                    M.add(F, f->second, (int)j, c);
                }
            }
        }
        cc.cx.d[ndeg] = std::move(M);
    }
    return cc;
}

AcyclicityReport verify_acyclic(const AcyclicClosure& C, int lo, int hi)
{
    const Field& F = C.base->field;
    ClosureComplex cc = closure_total_complex(C, hi + 1);
    AcyclicityReport rep;
    for (int n = std::max(lo, 0); n <= hi; ++n) {
        HomologyResult h = homology_at(F, cc.cx, n);
        int want = n == 0 ? 1 : 0;
        if (h.dim != want) {
            rep.ok = false;
            rep.counterexample_degree = n;
            rep.counterexample_dim = h.dim;
            return rep;
        }
    }
    return rep;
}

ComparisonLift lift_comparison(const AcyclicClosure& P, const AcyclicClosure& Q)
{
    if (P.base != Q.base && !(P.base->gens.size() == Q.base->gens.size() && P.base->field == Q.base->field))
        throw UsageError("lift_comparison requires closures over the same base");
    const DgaPresentation& A = *P.base;
    const Field& F = A.field;

    int maxdeg = 0;
    for (const auto& it : P.items)
        maxdeg = std::max(maxdeg, it.degree);
    ClosureComplex qc = closure_total_complex(Q, maxdeg + 1);

    /* Items in ascending degree so delta_P(m) only references solved items. */
    std::vector<int> order(P.items.size());
    for (size_t i = 0; i < order.size(); ++i)
        order[i] = (int)i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return P.items[a].degree < P.items[b].degree; });

    ComparisonLift L;
    L.values.resize(P.items.size());
    for (int i : order) {
        if (P.items[i].degree == 0) {
            ModElt u;
            u[Q.unit_item()] = poly_unit(A);
            L.values[i] = std::move(u);
            continue;
        }
        int deg = P.items[i].degree;
        /* RHS = alpha(delta_P m_i), using already-solved values. */
        ModElt rhs;
        for (const auto& [j, a] : P.delta[i]) {
            for (const auto& [k, c] : a) {
                for (const auto& [qi, qp] : L.values[j]) {
                    Poly prod = multiply(A, poly_term(k, c), qp);
                    poly_add_scaled(A, rhs[qi], F.one(), prod);
                    if (poly_is_zero(rhs[qi]))
                        rhs.erase(qi);
                }
            }
        }
        int eqdeg = deg + qc.cx.shift;
        Vec rv;
        auto& tix = qc.index[eqdeg];
        for (const auto& [qi, qp] : rhs) {
            for (const auto& [k, c] : qp) {
                auto f = tix.find({qi, k});
                if (f == tix.end())
                    throw ComputeError("lift_comparison: window too small, increase weight_bound");
                rv[f->second] = c;
            }
        }
        auto block = qc.cx.block(deg);
        if (!block)
            throw ComputeError("lift_comparison: window too small, increase weight_bound");
        auto sol = solve_linear(F, *block, rv);
        if (!sol)
            throw ComputeError("lift_comparison: no solution at semibasis degree " + std::to_string(deg) +
                               "; increase weight_bound");
        ModElt val;
        for (const auto& [col, c] : *sol) {
            const auto& [qi, k] = qc.basis[deg][col];
            poly_add_scaled(A, val[qi], c, poly_term(k, F.one()));
            if (poly_is_zero(val[qi]))
                val.erase(qi);
        }
        L.values[i] = std::move(val);
    }
    return L;
}

ModElt lift_apply(const AcyclicClosure& P, const AcyclicClosure& Q, const ComparisonLift& L, const ModElt& x)
{
    const DgaPresentation& A = *P.base;
    const Field& F = A.field;
    ModElt out;
    for (const auto& [i, a] : x) {
        for (const auto& [qi, qp] : L.values[i]) {
            Poly prod = multiply(A, a, qp);
            poly_add_scaled(A, out[qi], F.one(), prod);
            if (poly_is_zero(out[qi]))
                out.erase(qi);
        }
    }
    return out;
}

}  // namespace emext
