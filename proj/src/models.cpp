#include "emext/models.hpp"

#include <algorithm>
#include <set>

namespace emext {

namespace {

std::shared_ptr<DgaPresentation> blank(const Field& field, Flavor flavor)
{
    auto p = std::make_shared<DgaPresentation>();
    p->field = field;
    p->flavor = flavor;
    p->diff.shift = flavor == Flavor::commutative ? +1 : -1;
    return p;
}

PresPtr finish(std::shared_ptr<DgaPresentation> p)
{
    validate_presentation(*p);
    if (auto v = check_differential(*p))
        throw InternalError("built-in model fails d^2 = 0 at " + p->gens[v->gen_index].name);
    return p;
}

}  // namespace

PresPtr point_model(const Field& field, Flavor flavor)
{
    return finish(blank(field, flavor));
}

PresPtr sphere_model(int n, Flavor flavor, const Field& field)
{
    if (n < 2)
        throw UsageError("sphere dimension must be >= 2");
    auto p = blank(field, flavor);
    if (flavor == Flavor::tensor) {
        p->gens = {{"a1", n - 1}};
        p->diff.images = {poly_zero()};
        return finish(p);
    }
    if (n % 2 != 0) {
        p->gens = {{"x1", n}};
        p->diff.images = {poly_zero()};
        return finish(p);
    }
    p->gens = {{"x1", n}, {"x2", 2 * n - 1}};
    p->diff.images.resize(2);
    p->diff.images[0] = poly_zero();
    p->diff.images[1] = multiply(*p, poly_gen(*p, 0), poly_gen(*p, 0));
    return finish(p);
}

PresPtr two_cell_model(int q, long r, const Field& field)
{
    if (q < 2)
        throw UsageError("two_cell requires q >= 2");
    auto p = blank(field, Flavor::tensor);
    p->gens = {{"a", q - 1}, {"a'", q}};
    p->diff.images.resize(2);
    p->diff.images[0] = poly_zero();
    p->diff.images[1] = poly_scale(*p, field.from_int(-r), poly_gen(*p, 0));
    return finish(p);
}

PresPtr suspension_model(const std::vector<std::pair<int, int>>& betti, const Field& field)
{
    auto p = blank(field, Flavor::tensor);
    std::vector<std::pair<int, int>> sorted = betti;
    std::sort(sorted.begin(), sorted.end());
    int count = 0;
    for (const auto& [deg, rank] : sorted) {
        if (deg < 1 || rank < 1)
            throw UsageError("suspension entries need degree >= 1 and rank >= 1");
        for (int i = 0; i < rank; ++i)
            p->gens.push_back({"a" + std::to_string(++count), deg});
    }
    p->diff.images.assign(p->gens.size(), poly_zero());
    return finish(p);
}

PresPtr product_model(const PresPtr& p1, const PresPtr& p2)
{
    if (p1->flavor != Flavor::commutative || p2->flavor != Flavor::commutative)
        throw UsageError("product_model requires two sullivan presentations");
    if (p1->field != p2->field)
        throw UsageError("product_model: factors over different fields");
    auto p = blank(p1->field, Flavor::commutative);
    std::set<std::string> names;
    for (const auto& g : p1->gens) {
        p->gens.push_back(g);
        names.insert(g.name);
    }
    size_t n1 = p1->gens.size();
    std::vector<std::string> renamed;
    for (const auto& g : p2->gens) {
        std::string nm = g.name;
        while (names.count(nm))
            nm += "'";
        names.insert(nm);
        renamed.push_back(nm);
        p->gens.push_back({nm, g.degree});
    }
    p->diff.images.assign(p->gens.size(), poly_zero());
    auto pad1 = [&](const Poly& q) {
        Poly out;
        for (const auto& [k, c] : q) {
            Key kk = k;
            kk.resize(p->gens.size(), 0);
            out[kk] = c;
        }
        return out;
    };
    auto pad2 = [&](const Poly& q) {
        Poly out;
        for (const auto& [k, c] : q) {
            Key kk(p->gens.size(), 0);
            for (size_t t = 0; t < p2->gens.size(); ++t)
                kk[n1 + t] = k[t];
            out[kk] = c;
        }
        return out;
    };
    for (size_t i = 0; i < n1; ++i)
        p->diff.images[i] = pad1(p1->diff.images[i]);
    for (size_t i = 0; i < p2->gens.size(); ++i)
        p->diff.images[n1 + i] = pad2(p2->diff.images[i]);
    return finish(p);
}

PresPtr append_contractible_pair(const PresPtr& pres, int degree_u, const std::string& suffix)
{
    auto p = std::make_shared<DgaPresentation>(*pres);
    std::string su = "u" + suffix, sw = "w" + suffix;
    for (const auto& g : p->gens)
        if (g.name == su || g.name == sw)
            throw UsageError("contractible pair names collide; pass a suffix");
    int du = p->diff_shift();  // +1 sullivan, -1 tensor
    int degree_w = degree_u + du;
    if (degree_u < (p->flavor == Flavor::commutative ? 2 : 2) || degree_w < 1)
        throw UsageError("contractible pair degree too small");
    size_t iu = p->gens.size();
    p->gens.push_back({su, degree_u});
    size_t iw = p->gens.size();
    p->gens.push_back({sw, degree_w});
    if (p->flavor == Flavor::commutative) {
        for (auto& img : p->diff.images) {
            Poly padded;
            for (const auto& [k, c] : img) {
                Key kk = k;
                kk.resize(p->gens.size(), 0);
                padded[kk] = c;
            }
            img = std::move(padded);
        }
    }
    p->diff.images.resize(p->gens.size());
    p->diff.images[iu] = poly_gen(*p, (int)iw);
    p->diff.images[iw] = poly_zero();
    return finish(p);
}

const std::vector<BuiltinInfo>& builtin_models()
{
    static const std::vector<BuiltinInfo> infos = {
        {"point", "", "the ground field (empty generator list)"},
        {"sphere", "n,flavor", "S^n: sullivan Lambda(x1[,x2]) or adams-hilton T(a1)"},
        {"two_cell", "q,r", "S^q u_phi e^{q+1} with attaching degree r (adams-hilton)"},
        {"suspension", "d1xr1+d2xr2+...", "suspension with H_* ranks r_i in degrees d_i (adams-hilton)"},
        {"product", "n1,n2", "product of two sullivan spheres S^n1 x S^n2"},
    };
    return infos;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    size_t start = 0;
    while (start <= s.size()) {
        size_t e = s.find(sep, start);
        if (e == std::string::npos) {
            out.push_back(s.substr(start));
            break;
        }
        out.push_back(s.substr(start, e - start));
        start = e + 1;
    }
    return out;
}

long to_long(const std::string& s, const std::string& what)
{
    try {
        size_t pos = 0;
        long v = std::stol(s, &pos);
        if (pos != s.size())
            throw std::invalid_argument(s);
        return v;
    }
    catch (const std::exception&) {
        throw UsageError("invalid " + what + " '" + s + "'");
    }
}

}  // namespace

PresPtr builtin_model(const std::string& spec, const Field& field)
{
    std::string name = spec, params;
    if (auto colon = spec.find(':'); colon != std::string::npos) {
        name = spec.substr(0, colon);
        params = spec.substr(colon + 1);
    }
    if (name == "point") {
        std::string fl = params.empty() ? "sullivan" : params;
        if (fl == "sullivan")
            return point_model(field, Flavor::commutative);
        if (fl == "ah" || fl == "adams-hilton")
            return point_model(field, Flavor::tensor);
        throw UsageError("point flavor must be sullivan or ah");
    }
    if (name == "sphere") {
        auto parts = split(params, ',');
        if (parts.size() != 2)
            throw UsageError("sphere needs n,flavor (e.g. sphere:3,sullivan)");
        int n = (int)to_long(parts[0], "sphere dimension");
        if (parts[1] == "sullivan")
            return sphere_model(n, Flavor::commutative, field);
        if (parts[1] == "ah" || parts[1] == "adams-hilton")
            return sphere_model(n, Flavor::tensor, field);
        throw UsageError("sphere flavor must be sullivan or ah");
    }
    if (name == "two_cell") {
        auto parts = split(params, ',');
        if (parts.size() != 2)
            throw UsageError("two_cell needs q,r (e.g. two_cell:2,3)");
        return two_cell_model((int)to_long(parts[0], "q"), to_long(parts[1], "r"), field);
    }
    if (name == "suspension") {
        std::vector<std::pair<int, int>> betti;
        if (!params.empty()) {
            for (const auto& part : split(params, '+')) {
                auto dx = split(part, 'x');
                if (dx.size() != 2)
                    throw UsageError("suspension entries look like <degree>x<rank>");
                betti.emplace_back((int)to_long(dx[0], "degree"), (int)to_long(dx[1], "rank"));
            }
        }
        return suspension_model(betti, field);
    }
    if (name == "product") {
        auto parts = split(params, ',');
        if (parts.size() != 2)
            throw UsageError("product needs n1,n2 (sullivan sphere dimensions)");
        return product_model(sphere_model((int)to_long(parts[0], "n1"), Flavor::commutative, field),
                             sphere_model((int)to_long(parts[1], "n2"), Flavor::commutative, field));
    }
    throw UsageError("unknown builtin model '" + name + "' (see `models list`)");
}

}  // namespace emext
