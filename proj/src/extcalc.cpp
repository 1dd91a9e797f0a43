#include "emext/extcalc.hpp"

#include <algorithm>

namespace emext {

int report_degree(Flavor flavor, int p)
{
    return flavor == Flavor::commutative ? p : -p;
}

int natural_degree(Flavor flavor, int r)
{
    return flavor == Flavor::commutative ? r : -r;
}

std::string stability_str(Stability s)
{
    switch (s) {
        case Stability::exact:
            return "exact";
        case Stability::stable:
            return "stable";
        case Stability::unstable:
            return "unstable";
    }
    return "";
}

std::string verdict_str(Verdict v)
{
    switch (v) {
        case Verdict::yes:
            return "yes";
        case Verdict::no:
            return "no";
        case Verdict::unknown:
            return "unknown";
    }
    return "";
}

HomComplex build_hom_complex(std::shared_ptr<const AcyclicClosure> closure, int p_lo, int p_hi)
{
    const DgaPresentation& A = *closure->base;
    const Field& F = A.field;
    HomComplex H;
    H.closure = closure;
    H.p_lo = p_lo;
    H.p_hi = p_hi;
    H.cx.shift = A.diff_shift();

    int max_adeg = 0;
    for (const auto& it : closure->items)
        max_adeg = std::max(max_adeg, it.degree + std::max(p_lo < 0 ? -p_lo : p_hi, p_hi));
    std::map<int, std::vector<Key>> abasis;
    auto base_basis = [&](int d) -> const std::vector<Key>& {
        auto it = abasis.find(d);
        if (it == abasis.end())
            it = abasis.emplace(d, basis_of_degree(A, d)).first;
        return it->second;
    };

    for (int p = p_lo; p <= p_hi; ++p) {
        auto& b = H.basis[p];
        for (size_t i = 0; i < closure->items.size(); ++i) {
            int ad = closure->items[i].degree + p;
            if (ad < 0)
                continue;
            for (const Key& k : base_basis(ad))
                b.emplace_back((int)i, k);
        }
        auto& ix = H.index[p];
        for (size_t j = 0; j < b.size(); ++j)
            ix[b[j]] = (int)j;
        H.cx.dims[p] = (int)b.size();
    }

    /* Column of D at coordinate (i, b):
     *   d(b) at item i, and for every j with delta(m_j) containing c_ji m_i,
     *   -(-1)^{p(1+|keyA|)} gamma * (keyA * b) at item j per monomial
     *   (keyA, gamma) of c_ji. */
    for (int p = p_lo; p <= p_hi; ++p) {
        int tp = p + H.cx.shift;
        if (tp < p_lo || tp > p_hi || H.basis[p].empty())
            continue;
        SparseMat M((int)H.basis[tp].size(), (int)H.basis[p].size());
        auto& tix = H.index[tp];
        auto put = [&](int item, const Poly& poly, int colj) {
            for (const auto& [k, c] : poly) {
                auto f = tix.find({item, k});
                if (f == tix.end())
                    throw InternalError("hom complex coordinate missing");
                M.add(F, f->second, colj, c);
            }
        };
        for (size_t j = 0; j < H.basis[p].size(); ++j) {
            const auto& [item, bkey] = H.basis[p][j];
            Poly db = apply_diff(A, poly_term(bkey, F.one()));
            if (!poly_is_zero(db))
                put(item, db, (int)j);
            for (size_t jt = 0; jt < closure->items.size(); ++jt) {
                auto itc = closure->delta[jt].find(item);
                if (itc == closure->delta[jt].end())
                    continue;
                for (const auto& [keyA, gamma] : itc->second) {
                    bool plus = (p % 2 != 0) && (A.degree_of(keyA) % 2 == 0);
                    Scalar coef = plus ? gamma : F.neg(gamma);
                    Poly prod = multiply(A, poly_term(keyA, coef), poly_term(bkey, F.one()));
                    if (!poly_is_zero(prod))
                        put((int)jt, prod, (int)j);
                }
            }
        }
        H.cx.d[p] = std::move(M);
    }

    /* Exact D^2 = 0 on the constructed complex. */
    for (int p = p_lo; p <= p_hi; ++p) {
        const SparseMat* d1 = H.cx.block(p);
        const SparseMat* d2 = H.cx.block(p + H.cx.shift);
        if (!d1 || !d2)
            continue;
        for (const auto& c : d1->col)
            if (!d2->apply(F, c).empty())
                throw InternalError("D^2 != 0 on the Hom complex at degree " + std::to_string(p));
    }
    return H;
}

Vec hom_to_vec(const HomComplex& H, const HomElement& f)
{
    Vec v;
    auto bi = H.index.find(f.p);
    if (bi == H.index.end())
        throw UsageError("hom element degree outside the built range");
    for (const auto& [item, poly] : f.values) {
        for (const auto& [k, c] : poly) {
            auto it = bi->second.find({item, k});
            if (it == bi->second.end())
                throw UsageError("hom element coordinate outside the built range");
            v[it->second] = c;
        }
    }
    return v;
}

HomElement hom_from_vec(const HomComplex& H, int p, const Vec& v)
{
    HomElement f;
    f.p = p;
    const auto& b = H.basis.at(p);
    const Field& F = H.closure->base->field;
    for (const auto& [j, c] : v) {
        const auto& [item, k] = b[(size_t)j];
        poly_add_scaled(*H.closure->base, f.values[item], c, poly_term(k, F.one()));
        if (poly_is_zero(f.values[item]))
            f.values.erase(item);
    }
    return f;
}

HomElement hom_apply_D(const HomComplex& H, const HomElement& f)
{
    const SparseMat* d = H.cx.block(f.p);
    Vec v = hom_to_vec(H, f);
    Vec dv = d ? d->apply(H.closure->base->field, v) : Vec{};
    return hom_from_vec(H, f.p + H.cx.shift, dv);
}

bool hom_is_cocycle(const HomComplex& H, const HomElement& f)
{
    const SparseMat* d = H.cx.block(f.p);
    if (!d)
        return true;
    return d->apply(H.closure->base->field, hom_to_vec(H, f)).empty();
}

int ExtAlgebra::total_dim() const
{
    int t = 0;
    for (const auto& [r, d] : dims)
        t += d;
    return t;
}

namespace {

int default_margin(const DgaPresentation& pres)
{
    int m = 0;
    for (const auto& g : pres.gens)
        m = std::max(m, g.degree);
    return std::max(m + 1, 3);
}

struct RunDims {
    std::map<int, int> dims;
    std::map<int, std::vector<HomElement>> reps;
    std::shared_ptr<const AcyclicClosure> closure;
    std::shared_ptr<const HomComplex> hom;
};

RunDims run_hom(std::shared_ptr<const DgaPresentation> pres, std::shared_ptr<const AcyclicClosure> closure, int lo,
                int hi)
{
    Flavor fl = pres->flavor;
    int pa = natural_degree(fl, lo), pb = natural_degree(fl, hi);
    if (pa > pb)
        std::swap(pa, pb);
    auto hom = std::make_shared<HomComplex>(build_hom_complex(closure, pa - 1, pb + 1));
    RunDims out;
    out.closure = closure;
    out.hom = hom;
    const Field& F = pres->field;
    for (int r = lo; r <= hi; ++r) {
        int p = natural_degree(fl, r);
        HomologyResult h = homology_at(F, hom->cx, p);
        out.dims[r] = h.dim;
        auto& rep = out.reps[r];
        for (const auto& v : h.reps)
            rep.push_back(hom_from_vec(*hom, p, v));
    }
    return out;
}

}  // namespace

ExtAlgebra ext_groups(std::shared_ptr<const DgaPresentation> pres, int lo, int hi, int margin)
{
    if (lo > hi)
        throw UsageError("empty degree window");
    ExtAlgebra E;
    E.pres = pres;
    E.lo = lo;
    E.hi = hi;

    if (pres->flavor == Flavor::tensor) {
        auto closure = std::make_shared<AcyclicClosure>(ah_acyclic_closure(pres));
        RunDims run = run_hom(pres, closure, lo, hi);
        E.closure = run.closure;
        E.hom = run.hom;
        E.dims = run.dims;
        E.reps = std::move(run.reps);
        for (int r = lo; r <= hi; ++r)
            E.stability[r] = Stability::exact;
        E.margin = 0;
        E.weight_bound = -1;
    }
    else {
        if (margin < 0)
            margin = default_margin(*pres);
        if (margin < 1)
            throw UsageError("margin must be >= 1");
        int D = std::max({hi, -lo, 1});
        int W = D + margin;
        auto c1 = std::make_shared<AcyclicClosure>(sullivan_acyclic_closure(pres, W));
        auto c2 = std::make_shared<AcyclicClosure>(sullivan_acyclic_closure(pres, W + 2));
        RunDims r1 = run_hom(pres, c1, lo, hi);
        RunDims r2 = run_hom(pres, c2, lo, hi);
        E.closure = r1.closure;
        E.hom = r1.hom;
        E.dims = r1.dims;
        E.reps = std::move(r1.reps);
        for (int r = lo; r <= hi; ++r)
            E.stability[r] = r1.dims[r] == r2.dims[r] ? Stability::stable : Stability::unstable;
        E.margin = margin;
        E.weight_bound = W;
    }

    /* Base homology profile for certificates and evaluation images. */
    int maxgen = 0;
    for (const auto& g : pres->gens)
        maxgen = std::max(maxgen, g.degree);
    E.base_top = std::max({hi, -lo, 1}) + maxgen + 1;
    BaseComplex bc = base_complex(*pres, 0, E.base_top);
    E.base_h_maxdeg = -1;
    for (int d = 0; d <= E.base_top; ++d) {
        HomologyResult h = homology_at(pres->field, bc.cx, d);
        if (h.dim > 0 && d > 0)
            E.base_h_maxdeg = d;
    }
    E.base_h_finite = E.base_h_maxdeg < E.base_top - maxgen;
    return E;
}

std::optional<Vec> class_coords(const ExtAlgebra& E, const HomElement& f)
{
    const HomComplex& H = *E.hom;
    const Field& F = E.pres->field;
    int r = report_degree(E.pres->flavor, f.p);
    if (r < E.lo || r > E.hi)
        return std::nullopt;
    if (!hom_is_cocycle(H, f))
        return std::nullopt;

    const auto& reps = E.reps.at(r);
    Vec fv = hom_to_vec(H, f);
    /* Solve [reps | boundaries] x = f; the rep block of x is unique. */
    const SparseMat* din = H.cx.block(f.p - H.cx.shift);
    int rows = H.cx.dim(f.p);
    SparseMat M(rows, (int)reps.size() + (din ? din->cols : 0));
    for (size_t j = 0; j < reps.size(); ++j)
        for (const auto& [i, c] : hom_to_vec(H, reps[j]))
            M.set(i, (int)j, c);
    if (din)
        for (int j = 0; j < din->cols; ++j)
            for (const auto& [i, c] : din->col[j])
                M.set(i, (int)reps.size() + j, c);
    auto sol = solve_linear(F, M, fv);
    if (!sol)
        throw InternalError("cocycle not expressible over representatives and boundaries");
    Vec coords;
    for (const auto& [j, c] : *sol)
        if (j < (int)reps.size())
            coords[j] = c;
    return coords;
}

Vec base_h_coords(const ExtAlgebra& E, const Poly& value, int degree)
{
    const DgaPresentation& A = *E.pres;
    const Field& F = A.field;
    if (degree < 0 || poly_is_zero(value))
        return {};
    BaseComplex bc = base_complex(A, std::max(0, degree - 1), degree + 1);
    HomologyResult h = homology_at(F, bc.cx, degree);
    if (h.dim == 0)
        return {};
    Vec v = poly_to_vec(A, value, bc.basis.at(degree));
    const SparseMat* din = bc.cx.block(degree - bc.cx.shift);
    SparseMat M((int)bc.basis.at(degree).size(), h.dim + (din ? din->cols : 0));
    for (int j = 0; j < h.dim; ++j)
        for (const auto& [i, c] : h.reps[j])
            M.set(i, j, c);
    if (din)
        for (int j = 0; j < din->cols; ++j)
            for (const auto& [i, c] : din->col[j])
                M.set(i, h.dim + j, c);
    auto sol = solve_linear(F, M, v);
    if (!sol)
        throw InternalError("value of a cocycle is not a cycle in the base");
    Vec coords;
    for (const auto& [j, c] : *sol)
        if (j < h.dim)
            coords[j] = c;
    return coords;
}

EvInfo evaluation_map(const ExtAlgebra& E)
{
    EvInfo info;
    int unit = E.closure->unit_item();
    for (const auto& [r, reps] : E.reps) {
        for (size_t i = 0; i < reps.size(); ++i) {
            EvClass c;
            c.report_degree = r;
            c.index = (int)i;
            auto it = reps[i].values.find(unit);
            if (it != reps[i].values.end()) {
                c.h_coords = base_h_coords(E, it->second, reps[i].p);
                c.nonzero = !c.h_coords.empty();
            }
            info.nonzero = info.nonzero || c.nonzero;
            info.classes.push_back(std::move(c));
        }
    }
    return info;
}

GorensteinResult gorenstein_test(const ExtAlgebra& E, int fd_bound)
{
    GorensteinResult g;
    int total = E.total_dim();
    if (total >= 2) {
        g.verdict = Verdict::no;
        g.reason = std::to_string(total) + " classes in the window";
        return g;
    }
    bool covered = E.lo <= -fd_bound && E.hi >= fd_bound;
    bool settled = true;
    for (const auto& [r, s] : E.stability)
        settled = settled && s != Stability::unstable;
    if (!covered) {
        g.verdict = Verdict::unknown;
        g.reason = "window does not cover [-" + std::to_string(fd_bound) + ", " + std::to_string(fd_bound) + "]";
        return g;
    }
    if (!settled) {
        g.verdict = Verdict::unknown;
        g.reason = "unstable degrees in the window";
        return g;
    }
    if (total == 1) {
        g.verdict = Verdict::yes;
        g.reason = "one class on the certified window";
    }
    else {
        g.verdict = Verdict::no;
        g.reason = "no classes on the certified window";
    }
    return g;
}

FormalDimension formal_dimension(const ExtAlgebra& E)
{
    FormalDimension fd;
    for (const auto& [r, d] : E.dims) {
        if (d > 0) {
            fd.found = true;
            fd.value = r;
        }
    }
    if (!fd.found) {
        fd.note = "no nonzero degree in the window";
        return fd;
    }
    bool above_zero = true;
    for (const auto& [r, d] : E.dims)
        if (r > fd.value)
            above_zero = above_zero && d == 0 && E.stability.at(r) != Stability::unstable;
    fd.exact = above_zero && E.base_h_finite;
    if (!E.base_h_finite)
        fd.note = "base homology not finite-dimensional within the examined range";
    else if (!above_zero)
        fd.note = "degrees above are not certified";
    return fd;
}

PowerBundle make_power_bundle(const ExtAlgebra& E, int n)
{
    if (E.pres->flavor != Flavor::commutative)
        throw UsageError("the Ext product needs a commutative (sullivan) presentation");
    PowerBundle B;
    B.n = n;
    B.Qn = std::make_shared<AcyclicClosure>(tensor_power_resolution(*E.closure, n));
    B.alpha = lift_comparison(*E.closure, *B.Qn);
    return B;
}

HomElement hom_product_n(const ExtAlgebra& E, const PowerBundle& B, const std::vector<HomElement>& fs)
{
    if ((int)fs.size() != B.n)
        throw UsageError("hom_product_n: expected " + std::to_string(B.n) + " factors");
    const DgaPresentation& A = *E.pres;
    const Field& F = A.field;
    const AcyclicClosure& P = *E.closure;
    const AcyclicClosure& Q = *B.Qn;
    size_t ns = P.sweights.size();

    HomElement out;
    out.p = 0;
    for (const auto& f : fs)
        out.p += f.p;

    for (size_t m = 0; m < P.items.size(); ++m) {
        const ModElt& am = B.alpha.values[m];
        Poly acc;
        for (const auto& [qitem, bpoly] : am) {
            const Key& sk = Q.items[qitem].skey;
            /* Split the Q semibasis monomial into per-copy factors. */
            std::vector<int> pidx(B.n);
            std::vector<int> sdeg(B.n);
            bool ok = true;
            for (int c = 0; c < B.n && ok; ++c) {
                Key chunk(sk.begin() + (long)c * ns, sk.begin() + (long)(c + 1) * ns);
                int idx = P.find_item(chunk);
                if (idx < 0) {
                    ok = false;  // outside the stored support: the factor reads as zero
                    break;
                }
                pidx[c] = idx;
                sdeg[c] = P.items[idx].degree;
            }
            if (!ok)
                continue;
            /* Values f_c(sigma_c); skip early on zero. */
            std::vector<const Poly*> vals(B.n);
            for (int c = 0; c < B.n && ok; ++c) {
                auto it = fs[c].values.find(pidx[c]);
                if (it == fs[c].values.end() || poly_is_zero(it->second))
                    ok = false;
                else
                    vals[c] = &it->second;
            }
            if (!ok)
                continue;
            for (const auto& [bk, bc] : bpoly) {
                int bdeg = A.degree_of(bk);
                /* (f1 (x) ... (x) fn)(b s1 ... sn) =
                 * (-1)^{|f1||b| + sum_{k<l} |f_l| |x_k|} b f1(s1)...fn(sn),
                 * x1 = b s1, x_k = s_k. */
                long e = (long)(fs[0].p & 1) * (bdeg & 1);
                long xdeg_sum = 0;  // sum over k<l of |x_k|, accumulated
                for (int l = 0; l < B.n; ++l) {
                    if (l > 0)
                        e += (long)(fs[l].p & 1) * (xdeg_sum & 1);
                    xdeg_sum += (l == 0 ? bdeg + sdeg[0] : sdeg[l]);
                }
                Scalar coef = (e % 2 != 0) ? F.neg(bc) : bc;
                Poly prod = poly_term(bk, coef);
                for (int c = 0; c < B.n; ++c)
                    prod = multiply(A, prod, *vals[c]);
                poly_add_scaled(A, acc, F.one(), prod);
            }
        }
        if (!poly_is_zero(acc))
            out.values[(int)m] = std::move(acc);
    }
    return out;
}

HomElement hom_product(const ExtAlgebra& E, const PowerBundle& B, const HomElement& f, const HomElement& g)
{
    return hom_product_n(E, B, {f, g});
}

UnitInfo unit_class(const ExtAlgebra& E)
{
    UnitInfo u;
    if (E.lo > 0 || E.hi < 0)
        return u;
    u.in_window = true;
    HomElement eps;
    eps.p = 0;
    eps.values[E.closure->unit_item()] = poly_unit(*E.pres);
    u.is_cocycle = hom_is_cocycle(*E.hom, eps);
    if (u.is_cocycle) {
        auto c = class_coords(E, eps);
        if (c) {
            u.coords = *c;
            u.nonzero_class = !u.coords.empty();
        }
    }
    return u;
}

ExtTable ext_algebra_table(std::shared_ptr<const DgaPresentation> pres, int lo, int hi, int margin)
{
    ExtTable T{ext_groups(pres, lo, hi, margin), {}, {}, {}, true};
    T.ev = evaluation_map(T.ext);
    T.unit = unit_class(T.ext);
    if (pres->flavor != Flavor::commutative)
        return T;

    PowerBundle B = make_power_bundle(T.ext, 2);
    const Field& F = pres->field;
    for (const auto& [rf, fs] : T.ext.reps) {
        for (const auto& [rg, gs] : T.ext.reps) {
            int rt = rf + rg;
            if (rt < lo || rt > hi)
                continue;
            for (size_t i = 0; i < fs.size(); ++i) {
                for (size_t j = 0; j < gs.size(); ++j) {
                    HomElement fg = hom_product(T.ext, B, fs[i], gs[j]);
                    auto coords = class_coords(T.ext, fg);
                    if (!coords)
                        throw InternalError("product of cocycles is not a cocycle");
                    T.products.push_back({rf, (int)i, rg, (int)j, rt, *coords});

                    /* ev(f.g) = ev(f) ev(g), coordinatewise in H(base). */
                    int unit = T.ext.closure->unit_item();
                    Poly pf = fs[i].values.count(unit) ? fs[i].values.at(unit) : poly_zero();
                    Poly pg = gs[j].values.count(unit) ? gs[j].values.at(unit) : poly_zero();
                    Poly pfg = fg.values.count(unit) ? fg.values.at(unit) : poly_zero();
                    Poly want = multiply(*pres, pf, pg);
                    Vec lhs = base_h_coords(T.ext, pfg, fg.p);
                    Vec rhs = base_h_coords(T.ext, want, fg.p);
                    Vec diff = lhs;
                    vec_add_scaled(F, diff, F.from_int(-1), rhs);
                    if (!diff.empty())
                        T.ev_is_morphism = false;
                }
            }
        }
    }
    return T;
}

}  // namespace emext
