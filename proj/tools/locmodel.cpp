// locmodel: verification harness for admissible sets and local model point counts.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "locmodel/admissible.hpp"
#include "locmodel/errors.hpp"
#include "locmodel/latmod.hpp"
#include "locmodel/linalg.hpp"
#include "locmodel/matschemes.hpp"
#include "locmodel/weyl.hpp"

using nlohmann::ordered_json;
using namespace locmodel;

namespace {

enum Exit { kPass = 0, kFail = 1, kUsage = 2, kBudget = 3 };

struct Params {
    std::string group = "gl";
    int d = 2;
    int g = 1;
    int e = 1;
    std::vector<int> mu;
    std::vector<int> r;
    std::vector<int> I;
    bool iwahori = false;
    int p = 2;
    int jobs = 1;
    bool allow_wild = false;
    std::string model = "naive";  // enumerate: naive|splitting|canonical|unramified
    int l = 1;
    std::string scheme = "unitary";  // matrix: unitary|symplectic-p
    int n = 2;
    int s = 0;
    std::size_t limit = 50;
};

struct Outcome {
    ordered_json report;
    bool pass = true;
};

[[noreturn]] void usage(const std::string& msg) { throw Error(Errc::invalid_argument, msg); }

bool gsp(const Params& P) { return P.group == "gsp"; }

weyl::RootDatum datum(const Params& P) {
    if (P.group == "gl") {
        if (P.d < 1 || P.d > weyl::max_coords) usage("--d must lie in [1, 8]");
        return weyl::RootDatum::gl(P.d);
    }
    if (P.group == "gsp") {
        if (P.g < 1 || P.g + 1 > weyl::max_coords) usage("--g must lie in [1, 7]");
        return weyl::RootDatum::gsp(P.g);
    }
    usage("--group must be gl or gsp");
}

void check_prime(int p) {
    if (p < 2 || !linalg::is_prime(p) || p > linalg::Field::max_prime) usage("p must be prime >= 2 (and <= 13)");
}

weyl::ParahoricSpec spec(const Params& P) {
    const auto D = datum(P);
    if (P.iwahori) return weyl::ParahoricSpec::iwahori(D);
    if (P.I.empty()) usage("give --I or --iwahori");
    for (int i : P.I)
        if (i < 0 || i >= D.num_vertices()) usage("--I label " + std::to_string(i) + " out of range");
    return weyl::ParahoricSpec(D, P.I);
}

// --mu, or the coweight attached to --r (GL) or --e (GSp).
std::vector<int> mu(const Params& P) {
    const auto D = datum(P);
    if (!P.mu.empty()) {
        if (static_cast<int>(P.mu.size()) != D.coord_dim())
            usage("--mu needs " + std::to_string(D.coord_dim()) + " entries");
        return P.mu;
    }
    if (gsp(P)) return admissible::symplectic_mu(D, P.e);
    if (P.r.empty()) usage("give --mu or --r");
    for (int x : P.r)
        if (x < 0 || x > P.d) usage("--r entries must lie in [0, d]");
    return admissible::minuscule_sum(D, P.r);
}

latmod::ChainModel model(const Params& P) {
    check_prime(P.p);
    latmod::ModelParams M;
    M.kind = gsp(P) ? weyl::Kind::GSp : weyl::Kind::GL;
    M.n = gsp(P) ? P.g : P.d;
    M.e = P.e;
    M.I = P.iwahori ? weyl::ParahoricSpec::iwahori(datum(P)).I : P.I;
    M.p = P.p;
    M.r = P.r;
    M.allow_wild = P.allow_wild;
    if (!gsp(P) && M.r.empty()) usage("give --r");
    return latmod::build_model(M);
}

std::string join(const std::vector<int>& v, const char* sep = ",") {
    std::string s;
    for (std::size_t k = 0; k < v.size(); ++k) s += (k ? sep : "") + std::to_string(v[k]);
    return s;
}

ordered_json params_json(const Params& P, const std::string& kind) {
    ordered_json j;
    j["group"] = P.group;
    j[gsp(P) ? "g" : "d"] = gsp(P) ? P.g : P.d;
    if (kind != "adm" && kind != "perm" && kind != "compare-adm-perm" && kind != "count") j["e"] = P.e;
    if (!P.mu.empty()) j["mu"] = join(P.mu);
    if (!P.r.empty()) j["r"] = join(P.r);
    j["I"] = P.iwahori ? "iwahori" : join(P.I);
    j["p"] = P.p;
    return j;
}

ordered_json weyl_json(const weyl::WeylElement& w) {
    auto rw = weyl::reduced_word(w);
    return {{"word", rw.letters},
            {"omega", rw.omega},
            {"translation", weyl::translation_string(w)},
            {"finite", weyl::cycle_string(w)}};
}

ordered_json class_rows(const admissible::AdmissibleSet& S, std::optional<std::uint64_t> q, const char* source) {
    ordered_json rows = ordered_json::array();
    for (const auto& c : S.classes) {
        ordered_json r;
        r["w"] = weyl_json(c.min_rep());
        r["length"] = weyl::length(c.min_rep());
        r["polynomial"] = c.polynomial().str();
        if (q) r["count"] = admissible::stratum_count(c, *q);
        r["source"] = source;
        rows.push_back(r);
    }
    return rows;
}

Outcome run_adm(const Params& P, bool perm) {
    Outcome o;
    auto sp = spec(P);
    auto m = mu(P);
    ordered_json& j = o.report;
    if (perm) {
        auto res = admissible::perm_set_detailed(sp, m);
        j["rows"] = class_rows(res.set, std::nullopt, "admissible::perm_set");
        j["classes"] = res.set.classes.size();
        j["pool_size"] = res.pool_size;
        j["pool_length"] = res.pool_length;
        j["boundary_clean"] = res.boundary_clean;
        o.pass = res.boundary_clean;
    } else {
        auto S = admissible::adm_set(sp, m);
        j["rows"] = class_rows(S, std::nullopt, "admissible::adm_set");
        j["classes"] = S.classes.size();
    }
    j["mu"] = join(m);
    return o;
}

Outcome run_compare(const Params& P) {
    Outcome o;
    auto sp = spec(P);
    auto m = mu(P);
    auto A = admissible::adm_set(sp, m);
    auto R = admissible::perm_set_detailed(sp, m);
    std::set<weyl::WeylElement> a, b;
    for (const auto& w : A.min_reps()) a.insert(w);
    for (const auto& w : R.set.min_reps()) b.insert(w);
    std::set<weyl::WeylElement> all = a;
    all.insert(b.begin(), b.end());
    ordered_json rows = ordered_json::array();
    for (const auto& w : all) {
        ordered_json r;
        r["w"] = weyl_json(w);
        r["length"] = weyl::length(w);
        r["predicted"] = a.count(w) ? 1 : 0;
        r["observed"] = b.count(w) ? 1 : 0;
        r["source"] = {{"predicted", "admissible::adm_set"}, {"observed", "admissible::perm_set"}};
        rows.push_back(r);
    }
    o.report["mu"] = join(m);
    o.report["rows"] = rows;
    o.report["totals"] = {{"predicted", a.size()}, {"observed", b.size()}};
    o.report["boundary_clean"] = R.boundary_clean;
    o.pass = a == b && R.boundary_clean;
    return o;
}

Outcome run_count(const Params& P) {
    Outcome o;
    check_prime(P.p);
    auto S = admissible::adm_set(spec(P), mu(P));
    o.report["mu"] = join(mu(P));
    o.report["rows"] = class_rows(S, static_cast<std::uint64_t>(P.p), "admissible::stratum_count");
    o.report["total_polynomial"] = admissible::total_polynomial(S).str();
    o.report["total"] = admissible::total_count(S, static_cast<std::uint64_t>(P.p));
    return o;
}

ordered_json subspace_json(const linalg::Subspace& s) {
    ordered_json rows = ordered_json::array();
    for (int r = 0; r < s.dim(); ++r) {
        std::string row;
        for (int c = 0; c < s.ambient_dim(); ++c) row += static_cast<char>('0' + s.basis()(r, c));
        rows.push_back(row);
    }
    return rows;
}

ordered_json point_json(const latmod::ChainPoint& pt) {
    ordered_json j = ordered_json::array();
    for (const auto& F : pt.F) j.push_back(subspace_json(F));
    return j;
}

Outcome run_enumerate(const Params& P) {
    Outcome o;
    auto m = model(P);
    latmod::EnumOptions opt;
    opt.jobs = P.jobs;
    ordered_json pts = ordered_json::array();
    std::size_t count = 0;
    if (P.model == "splitting") {
        for (const auto& f : latmod::splitting_points(m, opt)) {
            if (count++ >= P.limit) continue;
            ordered_json lv = ordered_json::array();
            for (const auto& level : f.levels) lv.push_back(point_json({level}));
            pts.push_back(lv);
        }
    } else {
        std::vector<latmod::ChainPoint> v;
        if (P.model == "naive")
            v = latmod::naive_points(m, opt);
        else if (P.model == "canonical")
            v = latmod::canonical_points(m, opt);
        else if (P.model == "unramified")
            v = latmod::unramified_points(m, P.l, opt);
        else
            usage("--model must be naive, splitting, canonical or unramified");
        count = v.size();
        for (std::size_t k = 0; k < v.size() && k < P.limit; ++k) pts.push_back(point_json(v[k]));
    }
    o.report["model"] = P.model;
    o.report["chain"] = m.describe();
    o.report["count"] = count;
    o.report["points"] = pts;
    o.report["source"] = "latmod::" + P.model + (P.model == "splitting" ? "_points" : "_points");
    return o;
}

ordered_json strata_rows(const latmod::StratumReport& rep) {
    ordered_json rows = ordered_json::array();
    for (const auto& r : rep.rows) {
        ordered_json j;
        j["w"] = weyl_json(r.w);
        j["length"] = r.length;
        j["polynomial"] = r.poly.str();
        j["admissible"] = r.admissible;
        j["predicted"] = r.predicted;
        j["observed"] = r.observed;
        j["source"] = {{"predicted", "admissible::stratum_count"}, {"observed", "latmod::classify_strata"}};
        rows.push_back(j);
    }
    return rows;
}

Outcome run_strata(const Params& P) {
    Outcome o;
    auto m = model(P);
    latmod::EnumOptions opt;
    opt.jobs = P.jobs;
    auto naive = latmod::naive_points(m, opt);
    auto can = latmod::canonical_points(m, opt);
    auto m_mu = P.mu.empty() ? m.mu() : mu(P);
    auto adm = admissible::adm_set(m.spec(), m_mu);
    auto rep = latmod::classify_strata(m, can, adm);
    o.report["chain"] = m.describe();
    o.report["mu"] = join(m_mu);
    o.report["naive"] = naive.size();
    o.report["canonical"] = can.size();
    o.report["rows"] = strata_rows(rep);
    o.report["totals"] = {{"predicted", rep.total_predicted}, {"observed", rep.total_observed}};
    o.report["unmatched"] = rep.unmatched;
    o.report["orbit_fallback"] = rep.orbit_fallback;
    o.pass = rep.pass;
    return o;
}

Outcome run_torsor(const Params& P) {
    Outcome o;
    auto m = model(P);
    latmod::EnumOptions opt;
    opt.jobs = P.jobs;
    auto t = latmod::torsor_check(m, opt);
    ordered_json rows = ordered_json::array();
    for (std::size_t l = 0; l < t.factors.size(); ++l)
        rows.push_back({{"label", "unramified l=" + std::to_string(l + 1)},
                        {"observed", t.factors[l]},
                        {"source", "latmod::unramified_points"}});
    o.report["chain"] = m.describe();
    o.report["rows"] = rows;
    o.report["totals"] = {{"predicted", t.product}, {"observed", t.splitting}};
    o.report["splitting"] = t.splitting;
    o.pass = t.pass;
    return o;
}

Outcome run_symplectic(const Params& P) {
    if (!gsp(P)) usage("verify symplectic needs --group gsp");
    Outcome o = run_strata(P);
    auto m = model(P);
    auto adm = admissible::adm_set(m.spec(), m.mu());
    int maximal = 0;
    for (const auto& a : adm.classes) {
        bool top = true;
        for (const auto& b : adm.classes)
            if (!(a == b) && admissible::double_coset_leq(a, b)) top = false;
        maximal += top;
    }
    latmod::EnumOptions opt;
    opt.jobs = P.jobs;
    auto t = latmod::torsor_check(m, opt);
    o.report["maximal_classes"] = maximal;
    o.report["torsor"] = {{"splitting", t.splitting}, {"product", t.product}, {"pass", t.pass}};
    o.pass = o.pass && maximal == 1 && t.pass;
    return o;
}

Outcome run_matrix(const Params& P) {
    Outcome o;
    check_prime(P.p);
    ordered_json rows = ordered_json::array();
    if (P.scheme == "unitary") {
        matschemes::UnitarySchemeSpec s{P.n, P.n - P.s, P.s, P.p};
        if (!P.r.empty()) s.r = P.r[0];
        auto a = matschemes::unitary_points_direct(s, P.jobs);
        auto b = matschemes::unitary_points_stratified(s);
        for (std::size_t k = 0; k < a.by_rank.size(); ++k)
            rows.push_back({{"label", "rank " + std::to_string(k)},
                            {"predicted", b.by_rank[k]},
                            {"observed", a.by_rank[k]},
                            {"source", {{"predicted", "matschemes::unitary_points_stratified"},
                                        {"observed", "matschemes::unitary_points_direct"}}}});
        o.report["scheme"] = {{"n", s.n}, {"r", s.r}, {"s", s.s}};
        o.report["totals"] = {{"predicted", b.total}, {"observed", a.total}};
        o.report["charpoly_ok"] = a.charpoly_ok;
        o.pass = a.total == b.total && a.by_rank == b.by_rank && a.charpoly_ok;
    } else if (P.scheme == "symplectic-p") {
        matschemes::SymplecticPSpec s{P.g, P.e, P.p};
        auto a = matschemes::symplectic_P_points(s);
        auto b = matschemes::symplectic_P_points_linear(s);
        rows.push_back({{"label", "P"},
                        {"predicted", b},
                        {"observed", a},
                        {"source", {{"predicted", "matschemes::symplectic_P_points_linear"},
                                    {"observed", "matschemes::symplectic_P_points"}}}});
        o.report["scheme"] = {{"g", s.g}, {"e", s.e}};
        o.report["totals"] = {{"predicted", b}, {"observed", a}};
        o.pass = a == b;
    } else {
        usage("--scheme must be unitary or symplectic-p");
    }
    o.report["rows"] = rows;
    return o;
}

Outcome run_case(const std::string& kind, const Params& P) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    if (kind == "adm")
        o = run_adm(P, false);
    else if (kind == "perm")
        o = run_adm(P, true);
    else if (kind == "compare-adm-perm" || kind == "adm-eq-perm")
        o = run_compare(P);
    else if (kind == "count")
        o = run_count(P);
    else if (kind == "enumerate")
        o = run_enumerate(P);
    else if (kind == "strata")
        o = run_strata(P);
    else if (kind == "torsor")
        o = run_torsor(P);
    else if (kind == "symplectic" || kind == "symplectic-strata")
        o = run_symplectic(P);
    else if (kind == "matrix")
        o = run_matrix(P);
    else
        usage("unknown case kind '" + kind + "'");
    ordered_json out;
    out["case"] = kind;
    out["params"] = params_json(P, kind);
    for (auto it = o.report.begin(); it != o.report.end(); ++it) out[it.key()] = it.value();
    out["pass"] = o.pass;
    out["elapsed_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
    o.report = out;
    return o;
}

std::string cell(const ordered_json& v) {
    if (v.is_null()) return "";
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

void write_csv(std::ostream& os, const std::string& id, const ordered_json& rep) {
    os << "case,label,translation,finite,word,omega,length,polynomial,predicted,observed,source\n";
    if (!rep.contains("rows")) return;
    for (const auto& r : rep["rows"]) {
        std::vector<std::string> c{id, r.contains("label") ? cell(r["label"]) : ""};
        if (r.contains("w")) {
            const auto& w = r["w"];
            std::vector<int> word = w["word"].get<std::vector<int>>();
            c.insert(c.end(), {cell(w["translation"]), cell(w["finite"]), join(word, " "), cell(w["omega"])});
        } else {
            c.insert(c.end(), {"", "", "", ""});
        }
        for (const char* k : {"length", "polynomial"}) c.push_back(r.contains(k) ? cell(r[k]) : "");
        c.push_back(r.contains("predicted") ? cell(r["predicted"]) : (r.contains("count") ? cell(r["count"]) : ""));
        c.push_back(r.contains("observed") ? cell(r["observed"]) : "");
        c.push_back(r.contains("source") ? cell(r["source"]) : "");
        for (std::size_t k = 0; k < c.size(); ++k) os << (k ? "," : "") << csv_quote(c[k]);
        os << "\n";
    }
}

void write_text(std::ostream& os, const ordered_json& rep) {
    os << rep["case"].get<std::string>() << " " << rep["params"].dump() << "\n";
    for (auto it = rep.begin(); it != rep.end(); ++it) {
        const std::string& k = it.key();
        if (k == "case" || k == "params" || k == "rows" || k == "points" || k == "elapsed_ms") continue;
        os << "  " << k << ": " << cell(it.value()) << "\n";
    }
    if (rep.contains("rows"))
        for (const auto& r : rep["rows"]) {
            os << "  ";
            if (r.contains("w")) os << "t=(" << cell(r["w"]["translation"]) << ") " << cell(r["w"]["finite"]) << " ";
            if (r.contains("label")) os << cell(r["label"]) << " ";
            if (r.contains("length")) os << "len=" << r["length"] << " ";
            if (r.contains("polynomial")) os << "poly=" << cell(r["polynomial"]) << " ";
            if (r.contains("count")) os << "count=" << r["count"] << " ";
            if (r.contains("predicted")) os << "predicted=" << r["predicted"] << " ";
            if (r.contains("observed")) os << "observed=" << r["observed"];
            os << "\n";
        }
}

void emit(const Outcome& o, const std::string& format) {
    if (format == "json")
        std::cout << o.report.dump(2) << "\n";
    else if (format == "csv")
        write_csv(std::cout, o.report["case"].get<std::string>(), o.report);
    else
        write_text(std::cout, o.report);
}

std::vector<int> parse_ints(const std::string& s, const std::string& what) {
    std::vector<int> v;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stoi(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw Error(Errc::manifest_parse, what + ": bad integer list '" + s + "'");
        }
    }
    return v;
}

int parse_int(const std::string& s, const std::string& what) {
    auto v = parse_ints(s, what);
    if (v.size() != 1) throw Error(Errc::manifest_parse, what + ": expected one integer, got '" + s + "'");
    return v[0];
}

struct ManifestCase {
    std::string id;
    std::string kind;
    Params params;
    std::map<std::string, std::string> expect;  // dotted path -> value
    int line = 0;
};

std::vector<ManifestCase> parse_manifest(std::istream& in) {
    std::vector<ManifestCase> cases;
    std::optional<ManifestCase> cur;
    std::set<std::string> seen;
    auto flush = [&] {
        if (!cur) return;
        if (cur->kind.empty()) throw Error(Errc::manifest_parse, "line " + std::to_string(cur->line) + ": case without kind");
        if (cur->id.empty()) cur->id = "case" + std::to_string(cases.size() + 1);
        if (!seen.insert(cur->id).second) throw Error(Errc::manifest_parse, "duplicate case id '" + cur->id + "'");
        cases.push_back(*cur);
        cur.reset();
    };
    std::string line;
    int no = 0;
    while (std::getline(in, line)) {
        ++no;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) {
            flush();
            continue;
        }
        if (line[first] == '#') continue;
        auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        auto eq = line.find('=');
        if (eq == std::string::npos) throw Error(Errc::manifest_parse, "line " + std::to_string(no) + ": expected key=value");
        std::string key = line.substr(0, eq), val = line.substr(eq + 1);
        if (!cur) {
            cur.emplace();
            cur->line = no;
        }
        Params& P = cur->params;
        const std::string where = "line " + std::to_string(no);
        if (key == "case") cur->id = val;
        else if (key == "kind") cur->kind = val;
        else if (key == "group") P.group = val;
        else if (key == "d") P.d = parse_int(val, where);
        else if (key == "g") P.g = parse_int(val, where);
        else if (key == "e") P.e = parse_int(val, where);
        else if (key == "mu") P.mu = parse_ints(val, where);
        else if (key == "r") P.r = parse_ints(val, where);
        else if (key == "I") {
            if (val == "iwahori") P.iwahori = true;
            else P.I = parse_ints(val, where);
        } else if (key == "p") P.p = parse_int(val, where);
        else if (key == "jobs") P.jobs = parse_int(val, where);
        else if (key == "allow_wild") P.allow_wild = val == "true" || val == "1";
        else if (key == "model") P.model = val;
        else if (key == "l") P.l = parse_int(val, where);
        else if (key == "scheme") P.scheme = val;
        else if (key == "n") P.n = parse_int(val, where);
        else if (key == "s") P.s = parse_int(val, where);
        else if (key.rfind("expect.", 0) == 0) cur->expect[key.substr(7)] = val;
        else throw Error(Errc::manifest_parse, where + ": unknown key '" + key + "'");
    }
    flush();
    return cases;
}

const ordered_json* lookup(const ordered_json& j, const std::string& path) {
    const ordered_json* cur = &j;
    std::stringstream ss(path);
    std::string part;
    while (std::getline(ss, part, '.')) {
        if (!cur->is_object() || !cur->contains(part)) return nullptr;
        cur = &(*cur)[part];
    }
    return cur;
}

int run_suite(const std::string& file, const std::string& csv_dir, const std::string& format) {
    std::ifstream in(file);
    if (!in) throw Error(Errc::manifest_parse, "cannot open manifest '" + file + "'");
    auto cases = parse_manifest(in);
    ordered_json agg;
    agg["manifest"] = std::filesystem::path(file).filename().string();
    agg["cases"] = ordered_json::array();
    bool all = true;
    bool budget_hit = false;
    if (!csv_dir.empty()) std::filesystem::create_directories(csv_dir);
    for (const auto& c : cases) {
        ordered_json entry;
        try {
            Outcome o = run_case(c.kind, c.params);
            ordered_json golden = ordered_json::array();
            bool ok = o.pass;
            for (const auto& [path, want] : c.expect) {
                const ordered_json* got = lookup(o.report, path);
                std::string g = got ? cell(*got) : "<missing>";
                bool match = g == want;
                ok = ok && match;
                golden.push_back({{"field", path}, {"expected", want}, {"observed", g}, {"pass", match}});
            }
            entry = o.report;
            entry["case"] = c.id;
            entry["kind"] = c.kind;
            entry["golden"] = golden;
            entry["pass"] = ok;
            all = all && ok;
            if (!csv_dir.empty()) {
                std::ofstream os(std::filesystem::path(csv_dir) / (c.id + ".csv"));
                write_csv(os, c.id, entry);
            }
        } catch (const Error& e) {
            entry = {{"case", c.id}, {"kind", c.kind}, {"pass", false}, {"error", errc_name(e.code())}, {"message", e.what()}};
            budget_hit = budget_hit || e.code() == Errc::budget_exceeded;
            all = false;
        }
        agg["cases"].push_back(entry);
    }
    agg["total"] = cases.size();
    std::size_t passed = 0;
    for (const auto& e : agg["cases"]) passed += e["pass"].get<bool>();
    agg["passed"] = passed;
    agg["pass"] = all;
    if (format == "text") {
        for (const auto& e : agg["cases"])
            std::cout << (e["pass"].get<bool>() ? "PASS " : "FAIL ") << e["case"].get<std::string>() << "\n";
        std::cout << passed << "/" << cases.size() << " passed\n";
    } else {
        std::cout << agg.dump(2) << "\n";
    }
    if (all) return kPass;
    return budget_hit ? kBudget : kFail;
}

void print_error(const std::string& name, const std::string& msg) {
    ordered_json j{{"error", name}, {"message", msg}};
    std::cerr << j.dump() << "\n";
}

int exit_code(Errc c) {
    switch (c) {
        case Errc::budget_exceeded: return kBudget;
        case Errc::invalid_argument:
        case Errc::invalid_index:
        case Errc::bad_ranks:
        case Errc::wild_ramification:
        case Errc::manifest_parse:
        case Errc::incompatible_element:
        case Errc::datum_mismatch:
        case Errc::kind_mismatch:
        case Errc::dimension_mismatch: return kUsage;
        default: return kFail;
    }
}

void add_common(CLI::App* sub, Params& P, std::string& mu_s, std::string& r_s, std::string& I_s, bool lattice) {
    sub->add_option("--group", P.group, "gl or gsp")->check(CLI::IsMember({"gl", "gsp"}));
    sub->add_option("--d", P.d, "GL size");
    sub->add_option("--g", P.g, "GSp genus");
    sub->add_option("--mu", mu_s, "coweight a,b,...");
    sub->add_option("--r", r_s, "rank vector r1,r2,...");
    sub->add_option("--I", I_s, "vertex labels i0,i1,...");
    sub->add_flag("--iwahori", P.iwahori, "use all vertices");
    sub->add_option("--p", P.p, "prime");
    sub->add_option("--e", P.e, "ramification degree");
    sub->add_option("--jobs", P.jobs, "worker threads")->check(CLI::PositiveNumber);
    if (lattice) sub->add_flag("--allow-wild", P.allow_wild, "GSp with p | e: pair by the top coefficient");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Admissible sets and local model point counts"};
    app.require_subcommand(1);
    std::string format = "text";
    std::uint64_t budget_opt = 0;
    app.add_option("--format", format, "json, csv or text")->check(CLI::IsMember({"json", "csv", "text"}));
    app.add_option("--budget", budget_opt, "enumeration guard");

    Params P;
    std::string mu_s, r_s, I_s;
    std::string kind;
    std::vector<CLI::App*> plain;
    for (const char* name : {"adm", "perm", "compare-adm-perm", "count"}) {
        auto* sub = app.add_subcommand(name, name);
        add_common(sub, P, mu_s, r_s, I_s, false);
        sub->add_option("--format", format)->check(CLI::IsMember({"json", "csv", "text"}));
        sub->add_option("--budget", budget_opt);
        plain.push_back(sub);
    }
    auto* en = app.add_subcommand("enumerate", "dump naive, splitting, canonical or unramified points");
    add_common(en, P, mu_s, r_s, I_s, true);
    en->add_option("--model", P.model, "naive|splitting|canonical|unramified");
    en->add_option("--l", P.l, "embedding index for unramified");
    en->add_option("--limit", P.limit, "points to print");
    en->add_option("--format", format)->check(CLI::IsMember({"json", "csv", "text"}));
    en->add_option("--budget", budget_opt);

    auto* verify = app.add_subcommand("verify", "run one verification");
    verify->require_subcommand(1);
    std::vector<std::pair<CLI::App*, std::string>> vsubs;
    for (auto [name, k] : {std::pair{"strata", "strata"}, std::pair{"torsor", "torsor"},
                           std::pair{"symplectic", "symplectic-strata"}, std::pair{"matrix", "matrix"}}) {
        auto* sub = verify->add_subcommand(name, name);
        add_common(sub, P, mu_s, r_s, I_s, true);
        sub->add_option("--format", format)->check(CLI::IsMember({"json", "csv", "text"}));
        sub->add_option("--budget", budget_opt);
        if (std::string(name) == "matrix") {
            sub->add_option("--scheme", P.scheme, "unitary|symplectic-p");
            sub->add_option("--n", P.n, "matrix size");
            sub->add_option("--s", P.s, "second rank bound");
        }
        vsubs.push_back({sub, k});
    }
    auto* suite = app.add_subcommand("run-suite", "run every case of a manifest");
    std::string manifest, csv_dir;
    suite->add_option("manifest", manifest, "manifest file")->required();
    suite->add_option("--csv-dir", csv_dir, "write one CSV per case here");
    suite->add_option("--format", format)->check(CLI::IsMember({"json", "text"}));
    suite->add_option("--budget", budget_opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        print_error("UsageError", e.what());
        return kUsage;
    }

    try {
        if (budget_opt) set_budget(budget_opt);
        if (!mu_s.empty()) P.mu = parse_ints(mu_s, "--mu");
        if (!r_s.empty()) P.r = parse_ints(r_s, "--r");
        if (!I_s.empty()) P.I = parse_ints(I_s, "--I");
        if (suite->parsed()) return run_suite(manifest, csv_dir, format);
        for (auto* sub : plain)
            if (sub->parsed()) kind = sub->get_name();
        if (en->parsed()) kind = "enumerate";
        for (auto& [sub, k] : vsubs)
            if (sub->parsed()) kind = k;
        Outcome o = run_case(kind, P);
        emit(o, format);
        return o.pass ? kPass : kFail;
    } catch (const Error& e) {
        Errc c = e.code() == Errc::manifest_parse ? Errc::manifest_parse : e.code();
        print_error(errc_name(c), e.what());
        return exit_code(c);
    } catch (const std::exception& e) {
        print_error("InternalError", e.what());
        return kFail;
    }
}
