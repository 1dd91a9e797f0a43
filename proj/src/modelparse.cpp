#include "emext/modelparse.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace emext {

namespace {

struct Cursor {
    const std::string& s;
    int line;
    size_t pos = 0;

    bool done() const { return pos >= s.size(); }
    char peek() const { return done() ? '\0' : s[pos]; }
    int col() const { return (int)pos + 1; }

    void skip_ws()
    {
        while (!done() && (s[pos] == ' ' || s[pos] == '\t'))
            ++pos;
    }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line, col(), msg); }
};

bool is_name_start(char c)
{
    return std::isalpha((unsigned char)c) || c == '_';
}
bool is_name_char(char c)
{
    return std::isalnum((unsigned char)c) || c == '_' || c == '\'';
}

std::string read_name(Cursor& c)
{
    c.skip_ws();
    if (!is_name_start(c.peek()))
        c.fail("expected a name");
    size_t start = c.pos;
    while (!c.done() && is_name_char(c.peek()))
        ++c.pos;
    return c.s.substr(start, c.pos - start);
}

long read_int(Cursor& c, const char* what)
{
    c.skip_ws();
    size_t start = c.pos;
    if (c.peek() == '-' || c.peek() == '+')
        ++c.pos;
    if (!std::isdigit((unsigned char)c.peek())) {
        c.pos = start;
        c.fail(std::string("expected ") + what);
    }
    long v = 0;
    bool neg = c.s[start] == '-';
    while (!c.done() && std::isdigit((unsigned char)c.peek())) {
        v = v * 10 + (c.peek() - '0');
        if (v > 1000000000L)
            c.fail("integer too large");
        ++c.pos;
    }
    return neg ? -v : v;
}

struct RawTerm {
    Scalar coeff;
    std::vector<std::pair<std::string, int>> factors;  // (name, exponent), order-significant
    int line, col;
};

struct RawModel {
    int format = 1;
    bool has_field = false, has_flavor = false;
    Field field = Field::rationals();
    Flavor flavor = Flavor::commutative;
    std::vector<std::pair<Generator, std::pair<int, int>>> gens;  // gen, position
    std::map<std::string, std::vector<RawTerm>> diffs;
    std::map<std::string, std::pair<int, int>> diff_pos;
};

/* expr := ['+'|'-'] term (('+'|'-') term)*
 * term := coeff ['*' factors] | factors ; factors := factor ('*' factor)* */
std::vector<RawTerm> parse_expr(Cursor& c, const Field& F)
{
    std::vector<RawTerm> terms;
    c.skip_ws();
    if (c.done())
        c.fail("expected an expression");
    bool first = true;
    while (true) {
        c.skip_ws();
        if (c.done())
            break;
        int sign = 1;
        if (c.peek() == '+' || c.peek() == '-') {
            sign = c.peek() == '-' ? -1 : 1;
            ++c.pos;
            c.skip_ws();
        }
        else if (!first) {
            c.fail("expected '+' or '-' between terms");
        }
        first = false;

        RawTerm t;
        t.line = c.line;
        t.col = c.col();
        t.coeff = F.from_int(sign);
        bool saw_factor = false, saw_coeff = false;

        if (std::isdigit((unsigned char)c.peek())) {
            saw_coeff = true;
            long num = read_int(c, "a coefficient");
            long den = 1;
            if (c.peek() == '/') {
                ++c.pos;
                den = read_int(c, "a denominator");
                if (den == 0)
                    c.fail("zero denominator");
            }
            try {
                t.coeff = F.mul(t.coeff, F.from_fraction(num, den));
            }
            catch (const EmxError& e) {
                c.fail(e.what());
            }
        }
        while (true) {
            c.skip_ws();
            if (c.peek() == '*') {
                ++c.pos;
                c.skip_ws();
            }
            else if (saw_factor || saw_coeff) {
                break;  // factors are '*'-separated after the first
            }
            if (!is_name_start(c.peek())) {
                if (saw_factor || saw_coeff)
                    c.fail("expected a factor after '*'");
                c.fail("expected a term");
            }
            std::string name = read_name(c);
            int e = 1;
            if (c.peek() == '^') {
                ++c.pos;
                e = (int)read_int(c, "an exponent");
                if (e < 0)
                    c.fail("negative exponent");
            }
            t.factors.emplace_back(name, e);
            saw_factor = true;
        }
        terms.push_back(std::move(t));
        c.skip_ws();
        if (c.done())
            break;
        if (c.peek() != '+' && c.peek() != '-')
            c.fail("unexpected trailing input");
    }
    return terms;
}

}  // namespace

DgaPresentation parse_model(const std::string& text)
{
    RawModel raw;
    std::istringstream in(text);
    std::string linebuf;
    int lineno = 0;
    while (std::getline(in, linebuf)) {
        ++lineno;
        if (auto h = linebuf.find('#'); h != std::string::npos)
            linebuf.resize(h);
        if (!linebuf.empty() && linebuf.back() == '\r')
            linebuf.pop_back();
        Cursor c{linebuf, lineno};
        c.skip_ws();
        if (c.done())
            continue;
        std::string kw = read_name(c);
        if (kw == "format") {
            long v = read_int(c, "a version number");
            if (v != 1)
                c.fail("unsupported format version " + std::to_string(v));
            raw.format = (int)v;
        }
        else if (kw == "field") {
            if (raw.has_field)
                c.fail("duplicate field statement");
            c.skip_ws();
            if (c.peek() == 'Q') {
                ++c.pos;
                raw.field = Field::rationals();
            }
            else if (c.peek() == 'F') {
                ++c.pos;
                long p = read_int(c, "a prime modulus");
                try {
                    raw.field = Field::prime(p);
                }
                catch (const EmxError& e) {
                    c.fail(e.what());
                }
            }
            else {
                c.fail("expected 'Q' or 'F <prime>'");
            }
            raw.has_field = true;
        }
        else if (kw == "flavor") {
            if (raw.has_flavor)
                c.fail("duplicate flavor statement");
            std::string fl = read_name(c);
            if (c.peek() == '-') {  // adams-hilton
                ++c.pos;
                fl += "-" + read_name(c);
            }
            if (fl == "sullivan")
                raw.flavor = Flavor::commutative;
            else if (fl == "adams-hilton")
                raw.flavor = Flavor::tensor;
            else
                c.fail("unknown flavor '" + fl + "'");
            raw.has_flavor = true;
        }
        else if (kw == "gen") {
            std::string name = read_name(c);
            long deg = read_int(c, "a degree");
            for (const auto& g : raw.gens)
                if (g.first.name == name)
                    c.fail("duplicate generator '" + name + "'");
            raw.gens.push_back({Generator{name, (int)deg}, {lineno, c.col()}});
        }
        else if (kw == "d") {
            std::string name = read_name(c);
            c.skip_ws();
            if (c.peek() != '=')
                c.fail("expected '='");
            ++c.pos;
            if (raw.diffs.count(name))
                c.fail("duplicate differential for '" + name + "'");
            raw.diff_pos[name] = {lineno, c.col()};
            c.skip_ws();
            if (c.peek() == '0' && c.pos + 1 >= c.s.size()) {
                raw.diffs[name] = {};
            }
            else {
                raw.diffs[name] = parse_expr(c, raw.field);
            }
        }
        else {
            c.fail("unknown statement '" + kw + "'");
        }
        c.skip_ws();
        if (!c.done())
            c.fail("unexpected trailing input");
    }

    if (!raw.has_field)
        throw ParseError(lineno + 1, 1, "missing 'field' statement");
    if (!raw.has_flavor)
        throw ParseError(lineno + 1, 1, "missing 'flavor' statement");

    DgaPresentation pres;
    pres.field = raw.field;
    pres.flavor = raw.flavor;
    /* Canonical generator order: (degree, name). */
    std::sort(raw.gens.begin(), raw.gens.end(), [](const auto& a, const auto& b) {
        return std::tie(a.first.degree, a.first.name) < std::tie(b.first.degree, b.first.name);
    });
    std::map<std::string, int> index;
    for (const auto& [g, pos] : raw.gens) {
        index[g.name] = (int)pres.gens.size();
        pres.gens.push_back(g);
    }

    pres.diff.shift = pres.diff_shift();
    pres.diff.images.assign(pres.gens.size(), poly_zero());
    for (const auto& [name, terms] : raw.diffs) {
        auto pos = raw.diff_pos[name];
        auto it = index.find(name);
        if (it == index.end())
            throw ParseError(pos.first, pos.second, "unknown generator '" + name + "'");
        Poly img;
        for (const RawTerm& t : terms) {
            Poly mono = poly_unit(pres);
            for (const auto& [fname, e] : t.factors) {
                auto fit = index.find(fname);
                if (fit == index.end())
                    throw ParseError(t.line, t.col, "unknown generator '" + fname + "'");
                if (pres.flavor == Flavor::commutative && pres.gens[fit->second].odd() && e > 1)
                    throw ParseError(t.line, t.col, "odd generator '" + fname + "' squared in commutative flavor");
                for (int j = 0; j < e; ++j) {
                    mono = multiply(pres, mono, poly_gen(pres, fit->second));
                    if (poly_is_zero(mono))
                        throw ParseError(t.line, t.col,
                                         "odd generator '" + fname + "' squared in commutative flavor");
                }
            }
            poly_add_scaled(pres, img, t.coeff, mono);
        }
        /* Homogeneity of the image at the declared shift. */
        for (const auto& [k, cc] : img) {
            int want = pres.gens[it->second].degree + pres.diff_shift();
            if (pres.degree_of(k) != want)
                throw ParseError(pos.first, pos.second,
                                 "differential of '" + name + "' is not homogeneous of degree " +
                                     std::to_string(want) + " (found degree " + std::to_string(pres.degree_of(k)) +
                                     ")");
        }
        pres.diff.images[it->second] = std::move(img);
    }

    validate_presentation(pres);
    if (auto viol = check_differential(pres)) {
        auto pos = raw.diff_pos.count(pres.gens[viol->gen_index].name) ? raw.diff_pos[pres.gens[viol->gen_index].name]
                                                                       : std::pair<int, int>{lineno, 1};
        throw ParseError(pos.first, pos.second, "d(d(" + pres.gens[viol->gen_index].name + ")) = " +
                                                    pres.poly_str(viol->residue) + " is nonzero");
    }
    return pres;
}

namespace {

std::string model_poly_str(const DgaPresentation& pres, const Poly& p)
{
    if (p.empty())
        return "0";
    std::string s;
    const Field& F = pres.field;
    for (const auto& [k, c] : p) {
        Scalar a = c;
        bool neg = sgn(a) < 0 && F.is_rationals();
        if (neg)
            a = -a;
        if (s.empty())
            s += neg ? "-" : "";
        else
            s += neg ? " - " : " + ";
        std::string cs = F.str(a);
        if (pres.word_length(k) == 0)
            s += cs;
        else if (cs == "1")
            s += pres.key_str(k);
        else
            s += cs + "*" + pres.key_str(k);
    }
    return s;
}

}  // namespace

std::string print_model(const DgaPresentation& pres)
{
    std::string out = "format 1\n";
    out +=
        "field " + (pres.field.is_rationals() ? std::string("Q") : "F " + std::to_string(pres.field.characteristic()));
    out += "\n";
    out += pres.flavor == Flavor::commutative ? "flavor sullivan\n" : "flavor adams-hilton\n";
    for (const auto& g : pres.gens)
        out += "gen " + g.name + " " + std::to_string(g.degree) + "\n";
    for (size_t i = 0; i < pres.gens.size(); ++i) {
        if (!poly_is_zero(pres.diff.images[i]))
            out += "d " + pres.gens[i].name + " = " + model_poly_str(pres, pres.diff.images[i]) + "\n";
    }
    return out;
}

ReportFormat report_format_of(const std::string& name)
{
    if (name == "json")
        return ReportFormat::json;
    if (name == "csv")
        return ReportFormat::csv;
    if (name == "table")
        return ReportFormat::table;
    throw UsageError("unknown output format '" + name + "' (expected json, csv or table)");
}

namespace {

bool numeric_key(const std::string& s)
{
    if (s.empty())
        return false;
    size_t i = s[0] == '-' ? 1 : 0;
    if (i == s.size())
        return false;
    for (; i < s.size(); ++i)
        if (!std::isdigit((unsigned char)s[i]))
            return false;
    return true;
}

std::vector<std::string> display_keys(const nlohmann::json& obj)
{
    std::vector<std::string> keys;
    bool all_numeric = !obj.empty();
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        keys.push_back(it.key());
        all_numeric = all_numeric && numeric_key(it.key());
    }
    if (all_numeric)
        std::sort(keys.begin(), keys.end(),
                  [](const std::string& a, const std::string& b) { return std::stol(a) < std::stol(b); });
    return keys;
}

std::string scalar_str(const nlohmann::json& v)
{
    if (v.is_string())
        return v.get<std::string>();
    return v.dump();
}

void emit_csv(const nlohmann::json& j, const std::string& prefix, std::string& out)
{
    if (j.is_object()) {
        for (const auto& k : display_keys(j))
            emit_csv(j.at(k), prefix.empty() ? k : prefix + "." + k, out);
    }
    else if (j.is_array()) {
        int i = 0;
        for (const auto& v : j)
            emit_csv(v, prefix + "[" + std::to_string(i++) + "]", out);
    }
    else {
        out += prefix + "," + scalar_str(j) + "\n";
    }
}

void emit_table(const nlohmann::json& j, int indent, std::string& out)
{
    std::string pad(indent, ' ');
    if (j.is_object()) {
        size_t width = 0;
        for (auto it = j.begin(); it != j.end(); ++it)
            width = std::max(width, it.key().size());
        for (const auto& k : display_keys(j)) {
            const auto& v = j.at(k);
            if (v.is_object() || v.is_array()) {
                out += pad + k + ":\n";
                emit_table(v, indent + 2, out);
            }
            else {
                out += pad + k + std::string(width - k.size(), ' ') + "  " + scalar_str(v) + "\n";
            }
        }
    }
    else if (j.is_array()) {
        for (const auto& v : j) {
            if (v.is_object() || v.is_array()) {
                out += pad + "-\n";
                emit_table(v, indent + 2, out);
            }
            else {
                out += pad + "- " + scalar_str(v) + "\n";
            }
        }
    }
    else {
        out += pad + scalar_str(j) + "\n";
    }
}

}  // namespace

std::string emit_report(const nlohmann::json& report, ReportFormat fmt)
{
    switch (fmt) {
        case ReportFormat::json:
            return report.dump(2) + "\n";
        case ReportFormat::csv: {
            std::string out;
            emit_csv(report, "", out);
            return out;
        }
        case ReportFormat::table: {
            std::string out;
            emit_table(report, 0, out);
            return out;
        }
    }
    return {};
}

}  // namespace emext
