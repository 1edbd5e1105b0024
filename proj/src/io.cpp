#include "czkit/io.hpp"

#include <cstdio>
#include <fstream>
#include <set>

namespace czkit {

namespace {

[[noreturn]] void schema(const std::string& s) { throw Error(ErrorKind::SchemaError, s); }

double finite_number(const json& v, const char* what) {
    if (!v.is_number()) schema(std::string(what) + " must be a number");
    double x = v.get<double>();
    if (!std::isfinite(x)) schema(std::string(what) + " must be finite");
    return x;
}

}  // namespace

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        schema(path + ": " + e.what());
    }
}

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + path);
    out << j.dump(1) << '\n';
    if (!out) throw Error(ErrorKind::IoError, "write failed for " + path);
}

json measure_to_json(const DiscreteMeasure& mu) {
    json pts = json::array();
    for (std::size_t i = 0; i < mu.size(); ++i) {
        auto p = mu.point(i);
        pts.push_back(std::vector<double>(p.begin(), p.end()));
    }
    return {{"dim", mu.dim()}, {"n", mu.n()}, {"points", pts}, {"weights", mu.weights()}};
}

DiscreteMeasure measure_from_json(const json& j) {
    if (!j.is_object()) schema("measure must be an object");
    for (const char* k : {"dim", "n", "points", "weights"})
        if (!j.contains(k)) schema(std::string("measure lacks '") + k + "'");
    if (!j["dim"].is_number_integer()) schema("dim must be an integer");
    int dim = j["dim"].get<int>();
    double n = finite_number(j["n"], "n");
    const json& P = j["points"];
    const json& W = j["weights"];
    if (!P.is_array() || !W.is_array()) schema("points and weights must be arrays");
    if (P.size() != W.size()) schema("points and weights differ in length");
    if (P.empty()) throw Error(ErrorKind::EmptyMeasure, "no atoms");
    std::vector<Point> pts;
    std::vector<double> w;
    for (const auto& p : P) {
        if (!p.is_array() || static_cast<int>(p.size()) != dim) schema("point of wrong dimension");
        Point q;
        for (const auto& c : p) q.push_back(finite_number(c, "coordinate"));
        pts.push_back(std::move(q));
    }
    for (const auto& x : W) {
        double v = finite_number(x, "weight");
        if (!(v > 0.0)) schema("weights must be positive");
        w.push_back(v);
    }
    std::set<Point> seen(pts.begin(), pts.end());
    if (seen.size() != pts.size()) schema("duplicate support points");
    try {
        return DiscreteMeasure(dim, n, std::move(pts), std::move(w));
    } catch (const Error& e) {
        schema(e.what());
    }
}

DiscreteMeasure load_measure(const std::string& path) { return measure_from_json(read_json(path)); }

void save_measure(const DiscreteMeasure& mu, const std::string& path) { write_json(path, measure_to_json(mu)); }

SampledFunction function_from_json(const json& j, std::size_t expected) {
    if (!j.is_object() || !j.contains("values") || !j["values"].is_array()) schema("function needs a 'values' array");
    SampledFunction f;
    for (const auto& v : j["values"]) f.push_back(finite_number(v, "value"));
    if (expected && f.size() != expected) schema("function length does not match the measure");
    return f;
}

SampledFunction load_function(const std::string& path, std::size_t expected) {
    return function_from_json(read_json(path), expected);
}

void save_function(const SampledFunction& f, const std::string& path) { write_json(path, json{{"values", f}}); }

json cube_to_json(const Cube& q) { return {{"center", q.center}, {"side", q.side}}; }

Cube cube_from_json(const json& j) {
    if (!j.is_object() || !j.contains("center") || !j.contains("side")) schema("cube needs center and side");
    Point c;
    for (const auto& v : j["center"]) c.push_back(finite_number(v, "center"));
    return Cube(c, finite_number(j["side"], "side"));
}

json generation_to_json(const Generation& g) {
    json cubes = json::array();
    for (std::size_t i = 0; i < g.cubes.size(); ++i)
        cubes.push_back({{"center", g.cubes[i].center},
                         {"side", g.cubes[i].side},
                         {"kind", g.kind[i] == CubeKind::volume ? "volume" : "point"},
                         {"family", g.family[i]},
                         {"delta_to_2R0", g.delta_to_2R0[i]}});
    return {{"m", g.m},
            {"A", g.A},
            {"families", g.families},
            {"overlap_achieved", g.overlap_achieved},
            {"eps1_achieved", g.eps1_achieved},
            {"cubes", cubes}};
}

json cz_to_json(const CZDecomposition& dec) {
    json w = json::array();
    for (std::size_t i = 0; i < dec.whitney.cubes.size(); ++i)
        w.push_back({{"cube", cube_to_json(dec.whitney.cubes[i])},
                     {"host", cube_to_json(dec.hosts[i])},
                     {"host_power", dec.host_power[i]},
                     {"coeff", dec.coeff[i]},
                     {"a_mass", dec.a_mass[i]}});
    const auto& v = dec.inv;
    return {{"lambda", dec.lambda},
            {"g", dec.g},
            {"b", dec.b},
            {"omega", std::vector<int>(dec.omega.begin(), dec.omega.end())},
            {"whitney", w},
            {"constants",
             {{"C14", dec.C14}, {"C15", dec.C15}, {"B", dec.B}, {"C_g", dec.C_g}, {"weight_grad", dec.weight_grad_const}}},
            {"invariants",
             {{"reconstruction", v.reconstruction},
              {"g_bound", v.g_bound},
              {"supp_b", v.supp_b},
              {"supp_b_hosts", v.supp_b_hosts},
              {"cc4", v.cc4},
              {"cc45", v.cc45},
              {"cc5", v.cc5},
              {"host_rule", v.host_rule},
              {"half_mass", v.half_mass},
              {"f_off_omega", v.f_off_omega}}}};
}

json checks_to_json(const std::vector<Check>& checks) {
    json out = json::array();
    for (const auto& c : checks)
        out.push_back({{"name", c.name}, {"pass", c.pass}, {"achieved", c.achieved}, {"detail", c.detail}});
    return out;
}

json params_to_json(const MainParams& p) {
    return {{"A", p.A},         {"alpha1", p.alpha1}, {"alpha2", p.alpha2},       {"alpha3", p.alpha3},
            {"sigma", p.sigma}, {"eps1", p.eps1},     {"eps3", p.eps3},           {"cap_const", p.cap_const},
            {"enforce_chain", p.enforce_chain}};
}

MainParams params_from_json(const json& j, MainParams p) {
    if (!j.is_object()) schema("params must be an object");
    auto get = [&](const char* k, double& dst) {
        if (j.contains(k)) dst = finite_number(j[k], k);
    };
    get("A", p.A);
    get("alpha1", p.alpha1);
    get("alpha2", p.alpha2);
    get("alpha3", p.alpha3);
    get("sigma", p.sigma);
    get("eps1", p.eps1);
    get("eps3", p.eps3);
    get("cap_const", p.cap_const);
    if (j.contains("enforce_chain")) {
        if (!j["enforce_chain"].is_boolean()) schema("enforce_chain must be boolean");
        p.enforce_chain = j["enforce_chain"].get<bool>();
    }
    return p;
}

json main_to_json(const MainDecomposition& dec, const std::vector<Check>& claims, const std::vector<Check>& kernels) {
    json gens = json::array();
    for (const auto& G : dec.gens) {
        std::vector<std::size_t> good, bad;
        for (std::size_t i = 0; i < G.good.size(); ++i) {
            if (G.good[i]) good.push_back(i);
            if (G.bad[i]) bad.push_back(i);
        }
        json S = json::array();
        for (const auto& s : G.S) S.push_back(cube_to_json(s));
        json hp = json::array();
        for (std::size_t p = 0; p < G.gp.size(); ++p) {
            SampledFunction h(G.gp[p].size());
            for (std::size_t x = 0; x < h.size(); ++x) h[x] = G.gp[p][x] + G.bp[p][x];
            hp.push_back(h);
        }
        json gj = generation_to_json(G.gen);
        gj["good"] = good;
        gj["bad"] = bad;
        gj["S"] = S;
        gj["f_m"] = G.f_m;
        gj["g"] = G.g;
        gj["b"] = G.b;
        gj["U_G"] = G.UG;
        gj["U_B"] = G.UB;
        gj["h_p"] = hp;
        gens.push_back(gj);
    }
    return {{"params", params_to_json(dec.params)},
            {"R0", cube_to_json(dec.R0)},
            {"rbmo_norm", dec.norm},
            {"M", dec.M},
            {"attempts", dec.attempts},
            {"h0", dec.h0},
            {"generations", gens},
            {"ledger", dec.ledger},
            {"properties", checks_to_json(dec.properties)},
            {"claims", checks_to_json(claims)},
            {"kernels", checks_to_json(kernels)}};
}

void ConstantsLedger::record(const std::string& tag, double value, const std::string& measure,
                             const std::string& operation, const std::string& location) {
    entries_[tag] = LedgerEntry{value, measure, operation, location};
}

void ConstantsLedger::record_max(const std::string& tag, double value, const std::string& measure,
                                 const std::string& operation, const std::string& location) {
    auto it = entries_.find(tag);
    if (it == entries_.end() || value > it->second.value) record(tag, value, measure, operation, location);
}

json ConstantsLedger::to_json() const {
    json out = json::object();
    for (const auto& [k, e] : entries_)
        out[k] = {{"value", e.value}, {"measure", e.measure}, {"operation", e.operation}, {"location", e.location}};
    return out;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) throw Error(ErrorKind::IoError, "cannot write " + path);
    for (std::size_t k = 0; k < header.size(); ++k) std::fprintf(fp, "%s%s", k ? "," : "", header[k].c_str());
    std::fprintf(fp, "\n");
    for (const auto& r : rows) {
        for (std::size_t k = 0; k < r.size(); ++k) std::fprintf(fp, "%s%.17g", k ? "," : "", r[k]);
        std::fprintf(fp, "\n");
    }
    if (std::fclose(fp) != 0) throw Error(ErrorKind::IoError, "write failed for " + path);
}

}  // namespace czkit
