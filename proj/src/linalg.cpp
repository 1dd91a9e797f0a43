#include "emext/linalg.hpp"

namespace emext {

void vec_add_scaled(const Field& F, Vec& a, const Scalar& c, const Vec& b)
{
    if (Field::is_zero(c))
        return;
    for (const auto& [i, v] : b) {
        auto it = a.find(i);
        if (it == a.end()) {
            a.emplace(i, F.mul(c, v));
        }
        else {
            it->second = F.add(it->second, F.mul(c, v));
            if (Field::is_zero(it->second))
                a.erase(it);
        }
    }
}

Vec vec_scale(const Field& F, const Scalar& c, const Vec& a)
{
    Vec r;
    if (Field::is_zero(c))
        return r;
    for (const auto& [i, v] : a)
        r.emplace_hint(r.end(), i, F.mul(c, v));
    return r;
}

bool vec_is_zero(const Vec& a)
{
    return a.empty();
}

void SparseMat::add(const Field& F, int r, int c, const Scalar& v)
{
    auto& column = col[c];
    auto it = column.find(r);
    if (it == column.end()) {
        if (!Field::is_zero(v))
            column.emplace(r, v);
    }
    else {
        it->second = F.add(it->second, v);
        if (Field::is_zero(it->second))
            column.erase(it);
    }
}

Vec SparseMat::apply(const Field& F, const Vec& x) const
{
    Vec r;
    for (const auto& [j, c] : x)
        vec_add_scaled(F, r, c, col[j]);
    return r;
}

SparseMat SparseMat::identity(int n)
{
    SparseMat m(n, n);
    for (int i = 0; i < n; ++i)
        m.col[i][i] = Scalar(1);
    return m;
}

Vec Span::reduce(Vec v) const
{
    for (const auto& [piv, e] : ech_) {
        auto it = v.find(piv);
        if (it != v.end())
            vec_add_scaled(*F_, v, F_->neg(it->second), e);
    }
    return v;
}

Vec Span::reduce_with_coeffs(Vec v, Vec& coeffs) const
{
    coeffs.clear();
    int k = 0;
    for (const auto& [piv, e] : ech_) {
        auto it = v.find(piv);
        if (it != v.end()) {
            Scalar c = it->second;
            coeffs[k] = c;
            vec_add_scaled(*F_, v, F_->neg(c), e);
        }
        ++k;
    }
    return v;
}

bool Span::add(Vec v)
{
    v = reduce(std::move(v));
    if (v.empty())
        return false;
    int piv = v.begin()->first;
    Scalar inv = F_->inv(v.begin()->second);
    v = vec_scale(*F_, inv, v);
    /* Keep pivots sorted so reduce() sees smaller pivots first. */
    auto pos = ech_.begin();
    while (pos != ech_.end() && pos->first < piv)
        ++pos;
    ech_.insert(pos, {piv, std::move(v)});
    return true;
}

RowReduceResult row_reduce(const Field& F, const SparseMat& A)
{
    RowReduceResult res;
    Span span(F);
    /* Transform columns: t_j expresses echelon column j over original columns,
     * kept in lockstep so zero reductions yield kernel vectors. */
    std::vector<std::pair<int, Vec>> ech;  // (pivot, column)
    std::vector<Vec> trans;
    for (int j = 0; j < A.cols; ++j) {
        Vec c = A.col[j];
        Vec t;
        t[j] = Scalar(1);
        for (size_t k = 0; k < ech.size(); ++k) {
            auto it = c.find(ech[k].first);
            if (it != c.end()) {
                Scalar f = F.neg(it->second);
                vec_add_scaled(F, c, f, ech[k].second);
                vec_add_scaled(F, t, f, trans[k]);
            }
        }
        if (c.empty()) {
            res.kernel.push_back(std::move(t));
        }
        else {
            Scalar inv = F.inv(c.begin()->second);
            int piv = c.begin()->first;
            ech.emplace_back(piv, vec_scale(F, inv, c));
            trans.push_back(vec_scale(F, inv, t));
            res.image.push_back(A.col[j]);
        }
    }
    res.rank = (int)ech.size();
    return res;
}

std::optional<Vec> solve_linear(const Field& F, const SparseMat& A, const Vec& b)
{
    if (!b.empty() && b.rbegin()->first >= A.rows)
        throw UsageError("solve_linear: right-hand side exceeds row count");
    std::vector<std::pair<int, Vec>> ech;
    std::vector<Vec> trans;
    for (int j = 0; j < A.cols; ++j) {
        Vec c = A.col[j];
        Vec t;
        t[j] = Scalar(1);
        for (size_t k = 0; k < ech.size(); ++k) {
            auto it = c.find(ech[k].first);
            if (it != c.end()) {
                Scalar f = F.neg(it->second);
                vec_add_scaled(F, c, f, ech[k].second);
                vec_add_scaled(F, t, f, trans[k]);
            }
        }
        if (!c.empty()) {
            Scalar inv = F.inv(c.begin()->second);
            ech.emplace_back(c.begin()->first, vec_scale(F, inv, c));
            trans.push_back(vec_scale(F, inv, t));
        }
    }
    Vec r = b, x;
    for (size_t k = 0; k < ech.size(); ++k) {
        auto it = r.find(ech[k].first);
        if (it != r.end()) {
            Scalar f = it->second;
            vec_add_scaled(F, r, F.neg(f), ech[k].second);
            vec_add_scaled(F, x, f, trans[k]);
        }
    }
    if (!r.empty())
        return std::nullopt;
    return x;
}

HomologyResult homology_at(const Field& F, const ChainComplex& C, int n)
{
    int dn = C.dim(n);
    HomologyResult res;
    if (dn == 0)
        return res;

    const SparseMat* out = C.block(n);
    const SparseMat* in = C.block(n - C.shift);

    /* Composition must vanish: apply `out` to each incoming column. */
    if (in && out) {
        for (int j = 0; j < in->cols; ++j) {
            if (!out->apply(F, in->col[j]).empty())
                throw InternalError("not a complex at degree " + std::to_string(n));
        }
    }

    std::vector<Vec> kernel;
    if (out) {
        kernel = row_reduce(F, *out).kernel;
    }
    else {
        kernel.reserve(dn);
        for (int i = 0; i < dn; ++i) {
            Vec e;
            e[i] = Scalar(1);
            kernel.push_back(std::move(e));
        }
    }

    Span span(F);
    if (in)
        for (const auto& c : in->col)
            span.add(c);
    int brank = span.rank();
    for (auto& k : kernel)
        if (span.add(k))
            res.reps.push_back(std::move(k));
    res.dim = span.rank() - brank;
    return res;
}

std::map<int, bool> induced_map_injective(const Field& F, const std::map<int, SparseMat>& f, const ChainComplex& src,
                                          const ChainComplex& tgt, int lo, int hi)
{
    if (src.shift != tgt.shift)
        throw UsageError("induced_map_injective: complexes have different directions");
    auto block_of = [&](int n) -> const SparseMat* {
        auto it = f.find(n);
        return it == f.end() ? nullptr : &it->second;
    };
    /* Chain-map check: f_{n+shift} ∘ d_src[n] = d_tgt[n] ∘ f_n. */
    for (int n = lo; n <= hi; ++n) {
        const SparseMat* fn = block_of(n);
        const SparseMat* fup = block_of(n + src.shift);
        const SparseMat* ds = src.block(n);
        const SparseMat* dt = tgt.block(n);
        for (int j = 0; j < src.dim(n); ++j) {
            Vec ej;
            ej[j] = Scalar(1);
            Vec lhs = ds ? (fup ? fup->apply(F, ds->apply(F, ej)) : Vec{}) : Vec{};
            Vec rhs = fn ? (dt ? dt->apply(F, fn->apply(F, ej)) : Vec{}) : Vec{};
            vec_add_scaled(F, lhs, F.from_int(-1), rhs);
            if (!lhs.empty())
                throw UsageError("induced_map_injective: input is not a chain map at degree " + std::to_string(n));
        }
    }

    std::map<int, bool> result;
    for (int n = lo; n <= hi; ++n) {
        HomologyResult hs = homology_at(F, src, n);
        if (hs.dim == 0) {
            result[n] = true;
            continue;
        }
        Span span(F);
        const SparseMat* bin = tgt.block(n - tgt.shift);
        if (bin)
            for (const auto& c : bin->col)
                span.add(c);
        const SparseMat* fn = block_of(n);
        bool ok = true;
        for (const auto& rep : hs.reps) {
            Vec img = fn ? fn->apply(F, rep) : Vec{};
            if (!span.add(img)) {
                ok = false;
                break;
            }
        }
        result[n] = ok;
    }
    return result;
}

}  // namespace emext
