#include "emext/algebra.hpp"

#include <algorithm>
#include <set>

namespace emext {

int DgaPresentation::degree_of(const Key& k) const
{
    int d = 0;
    if (flavor == Flavor::commutative) {
        for (size_t i = 0; i < k.size(); ++i)
            d += k[i] * gens[i].degree;
    }
    else {
        for (int letter : k)
            d += gens[letter].degree;
    }
    return d;
}

int DgaPresentation::word_length(const Key& k) const
{
    if (flavor == Flavor::tensor)
        return (int)k.size();
    int n = 0;
    for (int e : k)
        n += e;
    return n;
}

std::string DgaPresentation::key_str(const Key& k) const
{
    std::string s;
    if (flavor == Flavor::commutative) {
        for (size_t i = 0; i < k.size(); ++i) {
            if (k[i] == 0)
                continue;
            if (!s.empty())
                s += "*";
            s += gens[i].name;
            if (k[i] > 1)
                s += "^" + std::to_string(k[i]);
        }
    }
    else {
        for (int letter : k) {
            if (!s.empty())
                s += "*";
            s += gens[letter].name;
        }
    }
    return s.empty() ? "1" : s;
}

std::string DgaPresentation::poly_str(const Poly& p) const
{
    if (p.empty())
        return "0";
    std::string s;
    for (const auto& [k, c] : p) {
        std::string cs = field.str(c);
        if (!s.empty())
            s += " + ";
        if (cs == "1" && word_length(k) > 0)
            s += key_str(k);
        else if (word_length(k) == 0)
            s += cs;
        else
            s += cs + "*" + key_str(k);
    }
    return s;
}

Poly poly_zero()
{
    return Poly{};
}

Poly poly_unit(const DgaPresentation& pres)
{
    Poly p;
    p[pres.unit_key()] = pres.field.one();
    return p;
}

Poly poly_gen(const DgaPresentation& pres, int gen_index)
{
    Key k;
    if (pres.flavor == Flavor::commutative) {
        k.assign(pres.gens.size(), 0);
        k[gen_index] = 1;
    }
    else {
        k = {gen_index};
    }
    Poly p;
    p[k] = pres.field.one();
    return p;
}

Poly poly_term(const Key& k, const Scalar& c)
{
    Poly p;
    if (!Field::is_zero(c))
        p[k] = c;
    return p;
}

bool poly_is_zero(const Poly& p)
{
    return p.empty();
}

std::optional<int> poly_degree(const DgaPresentation& pres, const Poly& p)
{
    std::optional<int> deg;
    for (const auto& [k, c] : p) {
        int d = pres.degree_of(k);
        if (!deg)
            deg = d;
        else if (*deg != d)
            throw UsageError("inhomogeneous polynomial: degrees " + std::to_string(*deg) + " and " + std::to_string(d));
    }
    return deg;
}

void poly_add_scaled(const DgaPresentation& pres, Poly& a, const Scalar& c, const Poly& b)
{
    if (Field::is_zero(c))
        return;
    const Field& F = pres.field;
    for (const auto& [k, v] : b) {
        auto it = a.find(k);
        if (it == a.end()) {
            a.emplace(k, F.mul(c, v));
        }
        else {
            it->second = F.add(it->second, F.mul(c, v));
            if (Field::is_zero(it->second))
                a.erase(it);
        }
    }
}

Poly poly_add(const DgaPresentation& pres, const Poly& a, const Poly& b)
{
    Poly r = a;
    poly_add_scaled(pres, r, pres.field.one(), b);
    return r;
}

Poly poly_scale(const DgaPresentation& pres, const Scalar& c, const Poly& a)
{
    Poly r;
    if (Field::is_zero(c))
        return r;
    const Field& F = pres.field;
    for (const auto& [k, v] : a)
        r.emplace_hint(r.end(), k, F.mul(c, v));
    return r;
}

std::optional<std::pair<Key, int>> mul_key(const DgaPresentation& pres, const Key& a, const Key& b)
{
    if (pres.flavor == Flavor::tensor) {
        Key r = a;
        r.insert(r.end(), b.begin(), b.end());
        return std::make_pair(std::move(r), 1);
    }
    size_t n = pres.gens.size();
    Key r(n, 0);
    /* Koszul sign: each odd factor of b moves left past the odd factors of a
     * with larger generator index. */
    long swaps = 0;
    long odd_suffix = 0;  // odd factors of a at index > i, accumulated from the right
    std::vector<long> suffix(n + 1, 0);
    for (size_t i = n; i-- > 0;) {
        suffix[i] = suffix[i + 1] + (pres.gens[i].odd() ? a[i] : 0);
    }
    (void)odd_suffix;
    for (size_t i = 0; i < n; ++i) {
        int e = a[i] + b[i];
        if (pres.gens[i].odd()) {
            if (a[i] > 1 || b[i] > 1 || e > 1)
                return std::nullopt;  // odd square vanishes
            if (b[i] == 1)
                swaps += suffix[i + 1];
        }
        r[i] = e;
    }
    return std::make_pair(std::move(r), swaps % 2 == 0 ? 1 : -1);
}

Poly multiply(const DgaPresentation& pres, const Poly& p, const Poly& q)
{
    const Field& F = pres.field;
    Poly r;
    for (const auto& [ka, ca] : p) {
        for (const auto& [kb, cb] : q) {
            auto m = mul_key(pres, ka, kb);
            if (!m)
                continue;
            Scalar c = F.mul(ca, cb);
            if (m->second < 0)
                c = F.neg(c);
            auto it = r.find(m->first);
            if (it == r.end()) {
                if (!Field::is_zero(c))
                    r.emplace(m->first, c);
            }
            else {
                it->second = F.add(it->second, c);
                if (Field::is_zero(it->second))
                    r.erase(it);
            }
        }
    }
    return r;
}

namespace {

/* Expand a monomial into its ordered factor sequence of generator indices. */
std::vector<int> factor_sequence(const DgaPresentation& pres, const Key& k)
{
    std::vector<int> seq;
    if (pres.flavor == Flavor::tensor)
        return k;
    for (size_t i = 0; i < k.size(); ++i)
        for (int j = 0; j < k[i]; ++j)
            seq.push_back((int)i);
    return seq;
}

Poly key_of_sequence(const DgaPresentation& pres, const std::vector<int>& seq, size_t from, size_t to)
{
    Poly r = poly_unit(pres);
    for (size_t i = from; i < to; ++i)
        r = multiply(pres, r, poly_gen(pres, seq[i]));
    return r;
}

}  // namespace

Poly apply_derivation(const DgaPresentation& pres, const Derivation& th, const Poly& p)
{
    const Field& F = pres.field;
    bool th_odd = th.shift % 2 != 0;
    Poly result;
    for (const auto& [k, c] : p) {
        std::vector<int> seq = factor_sequence(pres, k);
        int prefix_deg = 0;
        for (size_t i = 0; i < seq.size(); ++i) {
            const Poly& img = th.images[seq[i]];
            if (!img.empty()) {
                Poly term = key_of_sequence(pres, seq, 0, i);
                term = multiply(pres, term, img);
                term = multiply(pres, term, key_of_sequence(pres, seq, i + 1, seq.size()));
                Scalar coef = c;
                if (th_odd && prefix_deg % 2 != 0)
                    coef = F.neg(coef);
                poly_add_scaled(pres, result, coef, term);
            }
            prefix_deg += pres.gens[seq[i]].degree;
        }
    }
    return result;
}

Poly apply_diff(const DgaPresentation& pres, const Poly& p)
{
    return apply_derivation(pres, pres.diff, p);
}

namespace {

void enum_commutative(const DgaPresentation& pres, size_t i, int remaining, Key& cur, std::vector<Key>& out)
{
    if (remaining == 0) {
        Key k = cur;
        k.resize(pres.gens.size(), 0);
        out.push_back(std::move(k));
        return;
    }
    if (i >= pres.gens.size())
        return;
    int d = pres.gens[i].degree;
    int emax = pres.gens[i].odd() ? 1 : remaining / d;
    for (int e = 0; e <= emax; ++e) {
        if (e * d > remaining)
            break;
        cur[i] = e;
        enum_commutative(pres, i + 1, remaining - e * d, cur, out);
    }
    cur[i] = 0;
}

void enum_words(const DgaPresentation& pres, int remaining, Key& cur, std::vector<Key>& out)
{
    if (remaining == 0) {
        out.push_back(cur);
        return;
    }
    for (size_t i = 0; i < pres.gens.size(); ++i) {
        int d = pres.gens[i].degree;
        if (d <= remaining) {
            cur.push_back((int)i);
            enum_words(pres, remaining - d, cur, out);
            cur.pop_back();
        }
    }
}

}  // namespace

std::vector<Key> basis_of_degree(const DgaPresentation& pres, int n)
{
    std::vector<Key> out;
    if (n < 0)
        return out;
    if (pres.flavor == Flavor::commutative) {
        Key cur(pres.gens.size(), 0);
        enum_commutative(pres, 0, n, cur, out);
    }
    else {
        Key cur;
        enum_words(pres, n, cur, out);
    }
    std::sort(out.begin(), out.end(), KeyLess{});
    return out;
}

std::optional<DiffViolation> check_differential(const DgaPresentation& pres)
{
    for (size_t i = 0; i < pres.gens.size(); ++i) {
        Poly dv = pres.diff.images[i];
        if (!dv.empty()) {
            auto deg = poly_degree(pres, dv);
            if (deg && *deg != pres.gens[i].degree + pres.diff_shift())
                return DiffViolation{(int)i, dv};
        }
        Poly dd = apply_diff(pres, dv);
        if (!dd.empty())
            return DiffViolation{(int)i, dd};
    }
    return std::nullopt;
}

bool is_minimal(const DgaPresentation& pres)
{
    for (size_t i = 0; i < pres.gens.size(); ++i)
        for (const auto& [k, c] : pres.diff.images[i])
            if (pres.word_length(k) < 2)
                return false;
    return true;
}

void validate_presentation(const DgaPresentation& pres, bool user_facing)
{
    std::set<std::string> names;
    for (const auto& g : pres.gens) {
        if (!names.insert(g.name).second)
            throw UsageError("duplicate generator '" + g.name + "'");
        int min_deg = pres.flavor == Flavor::commutative ? 2 : 1;
        if (user_facing && g.degree < min_deg)
            throw UsageError("generator '" + g.name + "' has degree " + std::to_string(g.degree) + " but " +
                             (pres.flavor == Flavor::commutative ? "sullivan" : "adams-hilton") +
                             " flavor requires degree >= " + std::to_string(min_deg));
        if (!user_facing && g.degree < 1)
            throw UsageError("generator degree must be >= 1");
    }
    if (pres.diff.images.size() != pres.gens.size())
        throw UsageError("differential must be given for every generator");
    if (pres.diff.shift != pres.diff_shift())
        throw UsageError("differential direction does not match flavor");
    for (size_t i = 0; i < pres.gens.size(); ++i) {
        const Poly& dv = pres.diff.images[i];
        if (dv.empty())
            continue;
        auto deg = poly_degree(pres, dv);  // throws if inhomogeneous
        if (deg && *deg != pres.gens[i].degree + pres.diff_shift())
            throw UsageError("differential of '" + pres.gens[i].name + "' has degree " + std::to_string(*deg) +
                             " but must have degree " + std::to_string(pres.gens[i].degree + pres.diff_shift()));
    }
}

Vec poly_to_vec(const DgaPresentation& pres, const Poly& p, const std::vector<Key>& basis)
{
    Vec v;
    if (p.empty())
        return v;
    std::map<Key, int, KeyLess> index;
    for (size_t i = 0; i < basis.size(); ++i)
        index[basis[i]] = (int)i;
    for (const auto& [k, c] : p) {
        auto it = index.find(k);
        if (it == index.end())
            throw UsageError("polynomial term " + pres.key_str(k) + " not in the given basis");
        v[it->second] = c;
    }
    return v;
}

Poly vec_to_poly(const Vec& v, const std::vector<Key>& basis)
{
    Poly p;
    for (const auto& [i, c] : v)
        p[basis[i]] = c;
    return p;
}

BaseComplex base_complex(const DgaPresentation& pres, int lo, int hi)
{
    BaseComplex bc;
    bc.cx.shift = pres.diff_shift();
    for (int n = std::max(lo, 0); n <= hi; ++n) {
        bc.basis[n] = basis_of_degree(pres, n);
        bc.cx.dims[n] = (int)bc.basis[n].size();
    }
    for (int n = std::max(lo, 0); n <= hi; ++n) {
        int m = n + bc.cx.shift;
        if (bc.basis.find(m) == bc.basis.end() || bc.basis[n].empty())
            continue;
        SparseMat d((int)bc.basis[m].size(), (int)bc.basis[n].size());
        for (size_t j = 0; j < bc.basis[n].size(); ++j) {
            Poly img = apply_diff(pres, poly_term(bc.basis[n][j], pres.field.one()));
            Vec col = poly_to_vec(pres, img, bc.basis[m]);
            for (const auto& [r, c] : col)
                d.set(r, (int)j, c);
        }
        bc.cx.d[n] = std::move(d);
    }
    return bc;
}

}  // namespace emext
