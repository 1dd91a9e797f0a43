#include "emext/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "emext/extcalc.hpp"
#include "emext/modelparse.hpp"
#include "emext/models.hpp"
#include "emext/tcinv.hpp"

namespace emext {

const char* const kToolVersion = "emext 1.0.0";

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunConfig {
    std::string model_file;
    std::string builtin;
    std::string field_arg;
    std::string window_arg;
    int margin = -1;
    int n = 2;
    int m_max = 8;
    int fd_bound = -1;
    std::string format = "json";
    std::string cache_dir;
    bool no_cache = false;
};

struct LoadedModel {
    PresPtr pres;
    std::string text;  // canonical model text
};

Field parse_field(const std::string& s)
{
    if (s == "Q")
        return Field::rationals();
    if (s.size() >= 2 && s[0] == 'F')
        return Field::prime(std::stol(s.substr(1)));
    throw UsageError("field must be Q or F<p>");
}

std::pair<int, int> parse_window(const std::string& s)
{
    auto dots = s.find("..");
    if (dots == std::string::npos)
        throw UsageError("window must look like lo..hi (e.g. -4..6)");
    try {
        int lo = std::stoi(s.substr(0, dots));
        int hi = std::stoi(s.substr(dots + 2));
        if (lo > hi)
            throw UsageError("window is empty");
        return {lo, hi};
    }
    catch (const std::invalid_argument&) {
        throw UsageError("window must look like lo..hi (e.g. -4..6)");
    }
    catch (const std::out_of_range&) {
        throw UsageError("window bounds out of range");
    }
}

/* Rebuild a presentation over another field (coefficients re-reduced). */
PresPtr with_field(const PresPtr& pres, const Field& field)
{
    if (pres->field == field)
        return pres;
    auto p = std::make_shared<DgaPresentation>(*pres);
    p->field = field;
    for (auto& img : p->diff.images) {
        Poly out;
        for (const auto& [k, c] : img) {
            Scalar cc = field.reduce(c);
            if (!Field::is_zero(cc))
                out[k] = cc;
        }
        img = std::move(out);
    }
    validate_presentation(*p);
    if (auto v = check_differential(*p))
        throw UsageError("model violates d^2 = 0 over " + field.name());
    return p;
}

LoadedModel load_model(const RunConfig& cfg)
{
    if (cfg.model_file.empty() == cfg.builtin.empty())
        throw UsageError("give exactly one of --model FILE or --builtin SPEC");
    LoadedModel m;
    if (!cfg.builtin.empty()) {
        Field f = cfg.field_arg.empty() ? Field::rationals() : parse_field(cfg.field_arg);
        m.pres = builtin_model(cfg.builtin, f);
    }
    else {
        std::ifstream in(cfg.model_file);
        if (!in)
            throw UsageError("cannot open model file '" + cfg.model_file + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        m.pres = std::make_shared<DgaPresentation>(parse_model(ss.str()));
        if (!cfg.field_arg.empty())
            m.pres = with_field(m.pres, parse_field(cfg.field_arg));
    }
    m.text = print_model(*m.pres);
    return m;
}

int fd_guess(const DgaPresentation& pres)
{
    int s = 0;
    for (const auto& g : pres.gens)
        s += g.degree;
    return std::max(s, 1);
}

std::pair<int, int> window_of(const RunConfig& cfg, const DgaPresentation& pres)
{
    if (!cfg.window_arg.empty())
        return parse_window(cfg.window_arg);
    int fg = fd_guess(pres);
    return {-fg, 2 * fg};
}

int fd_bound_of(const RunConfig& cfg, const DgaPresentation& pres)
{
    return cfg.fd_bound > 0 ? cfg.fd_bound : fd_guess(pres);
}

/* Content-addressed cache: FNV-1a of the canonical request key. */
uint64_t fnv1a(const std::string& s)
{
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string cache_path(const RunConfig& cfg, const std::string& key)
{
    std::string dir = cfg.cache_dir;
    if (dir.empty()) {
        if (const char* env = std::getenv("EMEXT_CACHE_DIR"))
            dir = env;
        else
            dir = ".emext-cache";
    }
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", (unsigned long long)fnv1a(key));
    return dir + "/" + hex + ".json";
}

std::string cache_lookup(const RunConfig& cfg, const std::string& key, std::string& warn)
{
    if (cfg.no_cache)
        return {};
    std::ifstream in(cache_path(cfg, key));
    if (!in)
        return {};
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("key") || !j.contains("output") || j["key"] != key) {
        warn = "warning: ignoring unreadable cache entry " + cache_path(cfg, key) + "\n";
        return {};
    }
    return j["output"].get<std::string>();
}

void cache_store(const RunConfig& cfg, const std::string& key, const std::string& output)
{
    if (cfg.no_cache)
        return;
    fs::path path = cache_path(cfg, key);
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec)
        return;
    json j;
    j["key"] = key;
    j["output"] = output;
    j["version"] = kToolVersion;
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp);
        if (!out)
            return;
        out << j.dump();
    }
    fs::rename(tmp, path, ec);
}

json dims_json(const ExtAlgebra& E)
{
    json dims = json::object();
    for (const auto& [r, d] : E.dims)
        dims[std::to_string(r)] = d;
    return dims;
}

json stability_json(const ExtAlgebra& E)
{
    json st = json::object();
    for (const auto& [r, s] : E.stability)
        st[std::to_string(r)] = stability_str(s);
    return st;
}

json report_header(const std::string& command, const LoadedModel& m, std::pair<int, int> window)
{
    json j;
    j["format"] = 1;
    j["command"] = command;
    j["degree_convention"] = "A^{-q}=A_q";
    j["field"] = m.pres->field.name();
    j["flavor"] = m.pres->flavor == Flavor::commutative ? "sullivan" : "adams-hilton";
    j["model"] = m.text;
    j["window"] = {{"lo", window.first}, {"hi", window.second}};
    return j;
}

json ev_json(const ExtAlgebra& E, const EvInfo& ev)
{
    const Field& F = E.pres->field;
    json classes = json::array();
    for (const auto& c : ev.classes) {
        json e;
        e["degree"] = c.report_degree;
        e["index"] = c.index;
        e["nonzero"] = c.nonzero;
        json coords = json::object();
        for (const auto& [i, v] : c.h_coords)
            coords[std::to_string(i)] = F.str(v);
        e["h_coords"] = coords;
        classes.push_back(e);
    }
    json j;
    j["classes"] = classes;
    j["nonzero"] = ev.nonzero;
    return j;
}

json table_json(const ExtTable& T)
{
    const Field& F = T.ext.pres->field;
    json out = json::array();
    for (const auto& e : T.products) {
        json p;
        p["f"] = {e.deg_f, e.idx_f};
        p["g"] = {e.deg_g, e.idx_g};
        p["degree"] = e.deg_fg;
        json coords = json::object();
        for (const auto& [i, c] : e.coords)
            coords[std::to_string(i)] = F.str(c);
        p["coords"] = coords;
        out.push_back(p);
    }
    return out;
}

int cmd_check(const RunConfig& cfg, std::string& out, std::string& err)
{
    LoadedModel m = load_model(cfg);
    const DgaPresentation& pres = *m.pres;
    json j;
    j["format"] = 1;
    j["command"] = "check";
    j["field"] = pres.field.name();
    j["flavor"] = pres.flavor == Flavor::commutative ? "sullivan" : "adams-hilton";
    j["model"] = m.text;
    j["valid"] = true;
    j["minimal"] = is_minimal(pres);
    j["connectivity"] = pres.flavor == Flavor::commutative ? "1-connected (generator degrees >= 2)"
                                                           : "connected (generator degrees >= 1)";
    json notes = json::array();
    bool linear_zero = true;
    for (size_t i = 0; i < pres.gens.size(); ++i)
        for (const auto& [k, c] : pres.diff.images[i])
            if (pres.word_length(k) == 1)
                linear_zero = false;
    if (linear_zero && !pres.gens.empty())
        notes.push_back("linear part vanishes");
    if (pres.flavor == Flavor::commutative && !pres.field.is_rationals())
        notes.push_back("sullivan flavor over F" + std::to_string(pres.field.characteristic()) +
                        ": the CW-range hypothesis (dim X <= r char K) is user-asserted");
    j["notes"] = notes;
    out = emit_report(j, report_format_of(cfg.format));
    (void)err;
    return 0;
}

int cmd_ext(const RunConfig& cfg, std::string& out, std::string& err)
{
    LoadedModel m = load_model(cfg);
    auto [lo, hi] = window_of(cfg, *m.pres);
    int fdb = fd_bound_of(cfg, *m.pres);

    std::string key = std::string(kToolVersion) + "|ext|" + m.text + "|" + m.pres->field.name() + "|" +
                      std::to_string(lo) + ".." + std::to_string(hi) + "|margin=" + std::to_string(cfg.margin) +
                      "|fdb=" + std::to_string(fdb) + "|" + cfg.format;
    std::string warn;
    if (std::string cached = cache_lookup(cfg, key, warn); !cached.empty()) {
        err += warn;
        out = cached;
        return 0;
    }
    err += warn;

    ExtTable T = ext_algebra_table(m.pres, lo, hi, cfg.margin);
    GorensteinResult g = gorenstein_test(T.ext, fdb);
    FormalDimension fd = formal_dimension(T.ext);

    json j = report_header("ext", m, {lo, hi});
    if (m.pres->flavor == Flavor::commutative) {
        j["weight_margin"] = T.ext.margin;
        j["weight_bound"] = T.ext.weight_bound;
    }
    j["ext_dims"] = dims_json(T.ext);
    j["stability"] = stability_json(T.ext);
    j["gorenstein"] = verdict_str(g.verdict);
    j["gorenstein_reason"] = g.reason;
    j["fd_bound"] = fdb;
    if (fd.found) {
        j["formal_dimension"] = fd.value;
        j["formal_dimension_exact"] = fd.exact;
    }
    else {
        j["formal_dimension"] = "unknown";
        j["formal_dimension_exact"] = false;
    }
    j["ev"] = ev_json(T.ext, T.ev);
    json unit;
    unit["in_window"] = T.unit.in_window;
    unit["is_cocycle"] = T.unit.is_cocycle;
    unit["nonzero_class"] = T.unit.nonzero_class;
    j["unit_class"] = unit;
    if (m.pres->flavor == Flavor::commutative) {
        j["products"] = table_json(T);
        j["ev_is_algebra_morphism"] = T.ev_is_morphism;
    }
    if (m.pres->flavor == Flavor::commutative && !m.pres->field.is_rationals())
        j["note"] = "sullivan flavor over a prime field: CW-range hypothesis is user-asserted";

    out = emit_report(j, report_format_of(cfg.format));
    cache_store(cfg, key, out);
    return 0;
}

int cmd_invariants(const RunConfig& cfg, std::string& out, std::string& err)
{
    LoadedModel m = load_model(cfg);
    if (m.pres->flavor != Flavor::commutative)
        throw UsageError("invariants need a commutative (sullivan) model; for adams-hilton input supply the "
                         "companion sullivan model of the same space");
    if (cfg.n < 2)
        throw UsageError("n must be >= 2");
    auto [lo, hi] = window_of(cfg, *m.pres);
    int fdb = fd_bound_of(cfg, *m.pres);

    std::string key = std::string(kToolVersion) + "|invariants|" + m.text + "|" + m.pres->field.name() + "|" +
                      std::to_string(lo) + ".." + std::to_string(hi) + "|margin=" + std::to_string(cfg.margin) +
                      "|n=" + std::to_string(cfg.n) + "|m_max=" + std::to_string(cfg.m_max) +
                      "|fdb=" + std::to_string(fdb) + "|" + cfg.format;
    std::string warn;
    if (std::string cached = cache_lookup(cfg, key, warn); !cached.empty()) {
        err += warn;
        out = cached;
        return 0;
    }
    err += warn;

    ExtTable T = ext_algebra_table(m.pres, lo, hi, cfg.margin);
    GorensteinResult g = gorenstein_test(T.ext, fdb);
    BoundedValue vz = zcl(m.pres, cfg.n, hi, cfg.m_max);
    BoundedValue vh = htc_lower(m.pres, cfg.n, cfg.m_max, hi);
    BoundedValue vez = ext_zcl(T, cfg.n, cfg.m_max);
    BoundedValue veh = htc_ext(T, cfg.n, cfg.m_max);
    CriterionResult crit = thm_criterion(T, cfg.n, veh.value, fdb);

    json j = report_header("invariants", m, {lo, hi});
    j["n"] = cfg.n;
    j["m_max"] = cfg.m_max;
    j["gorenstein"] = verdict_str(g.verdict);
    auto bv = [](const BoundedValue& v) {
        json b;
        b["value"] = v.value;
        b["exact"] = v.exact;
        b["capped"] = v.capped;
        if (!v.note.empty())
            b["note"] = v.note;
        return b;
    };
    j["zcl"] = bv(vz);
    j["htc"] = bv(vh);
    j["ext_zcl"] = bv(vez);
    j["htc_ext"] = bv(veh);
    json cj;
    cj["verdict"] = criterion_str(crit.verdict);
    cj["m"] = crit.m;
    if (!crit.reason.empty())
        cj["reason"] = crit.reason;
    cj["in_kernel_power_m"] = crit.in_power_m;
    cj["in_kernel_power_m_plus_1"] = crit.in_power_m1;
    j["thm_criterion"] = cj;
    j["chain"] = "zcl=" + bounded_str(vz) + " <= HTC=" + bounded_str(vh) + "; ext_zcl=" + bounded_str(vez) +
                 " <= HTC_ext=" + bounded_str(veh) +
                 (g.verdict == Verdict::yes && T.ev.nonzero ? " <= HTC=" + bounded_str(vh) : "");

    out = emit_report(j, report_format_of(cfg.format));
    cache_store(cfg, key, out);
    return 0;
}

int cmd_models(const std::string& sub, const std::string& spec, const RunConfig& cfg, std::string& out)
{
    if (sub == "list") {
        for (const auto& b : builtin_models())
            out += b.name + (b.params.empty() ? "" : ":" + b.params) + "  --  " + b.description + "\n";
        return 0;
    }
    if (sub == "emit") {
        Field f = cfg.field_arg.empty() ? Field::rationals() : parse_field(cfg.field_arg);
        out = print_model(*builtin_model(spec, f));
        return 0;
    }
    throw UsageError("models subcommand must be list or emit");
}

int cmd_cache(const std::string& sub, const RunConfig& cfg, std::string& out)
{
    std::string dir = cfg.cache_dir;
    if (dir.empty()) {
        if (const char* env = std::getenv("EMEXT_CACHE_DIR"))
            dir = env;
        else
            dir = ".emext-cache";
    }
    if (sub == "info") {
        size_t count = 0, bytes = 0;
        if (fs::exists(dir))
            for (const auto& e : fs::directory_iterator(dir))
                if (e.is_regular_file()) {
                    ++count;
                    bytes += e.file_size();
                }
        out = "cache dir: " + dir + "\nentries: " + std::to_string(count) + "\nbytes: " + std::to_string(bytes) + "\n";
        return 0;
    }
    if (sub == "purge") {
        size_t removed = 0;
        if (fs::exists(dir))
            for (const auto& e : fs::directory_iterator(dir))
                if (e.is_regular_file() && e.path().extension() == ".json") {
                    fs::remove(e.path());
                    ++removed;
                }
        out = "removed " + std::to_string(removed) + " entries\n";
        return 0;
    }
    throw UsageError("cache subcommand must be info or purge");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::string& out, std::string& err)
{
    CLI::App app{"Eilenberg-Moore Ext calculator for sullivan / adams-hilton models"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    RunConfig cfg;
    auto add_model_opts = [&](CLI::App* c) {
        c->add_option("--model", cfg.model_file, "model-description file");
        c->add_option("--builtin", cfg.builtin, "builtin model spec (see `models list`)");
        c->add_option("--field", cfg.field_arg, "field override: Q or F<p>");
        c->add_option("--format", cfg.format, "output format: json, csv or table")->default_val("json");
    };
    auto add_calc_opts = [&](CLI::App* c) {
        c->add_option("--window", cfg.window_arg, "degree window lo..hi (default -fd_guess..2*fd_guess)");
        c->add_option("--margin", cfg.margin, "weight margin for the commutative truncation");
        c->add_option("--fd-bound", cfg.fd_bound, "formal-dimension bound for the Gorenstein certificate");
        c->add_option("--cache-dir", cfg.cache_dir, "cache directory (default $EMEXT_CACHE_DIR or .emext-cache)");
        c->add_flag("--no-cache", cfg.no_cache, "bypass the result cache");
    };

    CLI::App* check = app.add_subcommand("check", "parse and validate a model");
    add_model_opts(check);

    CLI::App* ext = app.add_subcommand("ext", "Ext dimensions, products, Gorenstein verdict");
    add_model_opts(ext);
    add_calc_opts(ext);

    CLI::App* inv = app.add_subcommand("invariants", "zcl / HTC / Ext-version invariants and the criterion");
    add_model_opts(inv);
    add_calc_opts(inv);
    inv->add_option("--n", cfg.n, "diagonal arity (n >= 2)")->default_val(2);
    inv->add_option("--m-max", cfg.m_max, "cap for ideal-power searches")->default_val(8);

    CLI::App* models = app.add_subcommand("models", "list or emit builtin models");
    std::string models_sub, models_spec;
    models->add_option("action", models_sub, "list | emit")->required();
    models->add_option("spec", models_spec, "builtin spec for emit");
    models->add_option("--field", cfg.field_arg, "field for emit: Q or F<p>");

    CLI::App* cache = app.add_subcommand("cache", "inspect or purge the result cache");
    std::string cache_sub;
    cache->add_option("action", cache_sub, "info | purge")->required();
    cache->add_option("--cache-dir", cfg.cache_dir, "cache directory");

    std::vector<const char*> argv;
    argv.push_back("emext");
    for (const auto& a : args)
        argv.push_back(a.c_str());

    try {
        app.parse((int)argv.size(), argv.data());
    }
    catch (const CLI::CallForHelp& e) {
        out = app.help();
        return 0;
    }
    catch (const CLI::CallForVersion&) {
        out = std::string(kToolVersion) + "\n";
        return 0;
    }
    catch (const CLI::ParseError& e) {
        err = std::string(e.what()) + "\n";
        return 1;
    }

    try {
        if (check->parsed())
            return cmd_check(cfg, out, err);
        if (ext->parsed())
            return cmd_ext(cfg, out, err);
        if (inv->parsed())
            return cmd_invariants(cfg, out, err);
        if (models->parsed())
            return cmd_models(models_sub, models_spec, cfg, out);
        if (cache->parsed())
            return cmd_cache(cache_sub, cfg, out);
        err = "no command\n";
        return 1;
    }
    catch (const EmxError& e) {
        err = std::string(e.what()) + "\n";
        return e.exit_code;
    }
    catch (const std::exception& e) {
        err = std::string("internal error: ") + e.what() + "\n";
        return 3;
    }
}

}  // namespace emext
