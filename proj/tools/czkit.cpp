#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "czkit/io.hpp"
#include "czkit/maximal.hpp"
#include "czkit/suites.hpp"

using namespace czkit;

namespace {

constexpr int kOk = 0;
constexpr int kViolated = 2;
constexpr int kIo = 3;

struct Options {
    std::string measure, function, out, params, suite = "all", op = "grand", kind = "cantor", R0 = "auto";
    std::string corpus = "corpus", calibration = "calibration/frozen.json", queries, ledger;
    std::uint64_t seed = 1;
    double lambda = 0.0, rho = 2.0;
    int depth = 5, dim = 1, points_per_axis = 4, clusters = 3, per_cluster = 16;
    double ratio = 1.0 / 3.0, n = 0.0, spread = 0.5;
    bool calibrate = false;
};

void emit(const json& j, const std::string& out) {
    if (out.empty())
        std::cout << j.dump(1) << "\n";
    else
        write_json(out, j);
}

std::vector<Point> load_queries(const std::string& path, const DiscreteMeasure& mu) {
    if (path.empty()) return mu.points();
    json j = read_json(path);
    std::vector<Point> out;
    try {
        for (const auto& p : j.at("points")) {
            Point q = p.get<Point>();
            if (static_cast<int>(q.size()) != mu.dim()) throw Error(ErrorKind::SchemaError, "query dimension");
            out.push_back(q);
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::SchemaError, std::string("queries: ") + e.what());
    }
    return out;
}

int cmd_gen(const Options& o) {
    GenParams p;
    p.dim = o.dim;
    p.depth = o.depth;
    p.points_per_axis = o.points_per_axis;
    p.ratio = o.ratio;
    p.n = o.n;
    p.clusters = o.clusters;
    p.per_cluster = o.per_cluster;
    p.spread = o.spread;
    if (!o.params.empty()) {
        json j = read_json(o.params);
        try {
            p.dim = j.value("dim", p.dim);
            p.depth = j.value("depth", p.depth);
            p.points_per_axis = j.value("points_per_axis", p.points_per_axis);
            p.ratio = j.value("ratio", p.ratio);
            p.n = j.value("n", p.n);
            p.clusters = j.value("clusters", p.clusters);
            p.per_cluster = j.value("per_cluster", p.per_cluster);
            p.spread = j.value("spread", p.spread);
        } catch (const json::exception& e) {
            throw Error(ErrorKind::SchemaError, std::string("generator params: ") + e.what());
        }
    }
    auto mu = generate_measure(parse_gen_kind(o.kind), p, o.seed);
    emit(measure_to_json(mu), o.out);
    return kOk;
}

int cmd_analyze(const Options& o) {
    auto mu = load_measure(o.measure);
    auto g = growth_constant(mu);
    auto fam = canonical_family(mu);
    std::size_t dbl = 0;
    for (char c : fam.doubling) dbl += c ? 1 : 0;
    Cube R0 = auto_R0(mu);
    auto ad = atom_deltas(mu, R0);
    json j;
    j["dim"] = mu.dim();
    j["n"] = mu.n();
    j["atoms"] = mu.size();
    j["total_mass"] = mu.total_mass();
    j["growth"] = {{"ball_constant", g.ball_constant},
                   {"cube_constant", g.cube_constant},
                   {"ball_center", g.ball_center},
                   {"ball_radius", g.ball_radius},
                   {"cube_center", g.cube_center},
                   {"cube_side", g.cube_side},
                   {"degenerate", g.degenerate}};
    j["empirical_exponent"] = empirical_growth_exponent(mu);
    j["canonical_family"] = {{"size", fam.size()}, {"doubling", dbl}};
    j["R0"] = cube_to_json(R0);
    j["atom_delta"] = ad;
    emit(j, o.out);
    return kOk;
}

int cmd_maximal(const Options& o) {
    auto mu = load_measure(o.measure);
    auto f = load_function(o.function, mu.size());
    auto qs = load_queries(o.queries, mu);
    std::vector<double> lo, up;
    if (o.op == "grand") {
        lo = maximal_field(mu, f, MaximalKind::grand_lower, qs);
        up = maximal_field(mu, f, MaximalKind::grand_upper, qs);
    } else if (o.op == "hl") {
        lo = maximal_field(mu, f, MaximalKind::hl_lower, qs, o.rho);
        up = maximal_field(mu, f, MaximalKind::hl_upper, qs, o.rho);
    } else {
        throw Error(ErrorKind::InvalidArgument, "--op must be grand or hl");
    }
    std::vector<std::string> header;
    for (int k = 0; k < mu.dim(); ++k) header.push_back(mu.dim() == 1 ? "x" : "x" + std::to_string(k));
    header.push_back("lower");
    header.push_back("upper");
    std::vector<std::vector<double>> rows;
    bool sandwich = true;
    for (std::size_t q = 0; q < qs.size(); ++q) {
        auto row = qs[q];
        row.push_back(lo[q]);
        row.push_back(up[q]);
        rows.push_back(row);
        if (o.op == "grand" && lo[q] > up[q] * (1.0 + 1e-9) + 1e-12) sandwich = false;
    }
    if (o.out.empty()) {
        for (std::size_t k = 0; k < header.size(); ++k) std::printf("%s%s", k ? "," : "", header[k].c_str());
        std::printf("\n");
        for (const auto& r : rows) {
            for (std::size_t k = 0; k < r.size(); ++k) std::printf("%s%.17g", k ? "," : "", r[k]);
            std::printf("\n");
        }
    } else {
        write_csv(o.out, header, rows);
    }
    return sandwich ? kOk : kViolated;
}

int cmd_rbmo(const Options& o) {
    auto mu = load_measure(o.measure);
    auto f = load_function(o.function, mu.size());
    auto est = rbmo_norm(mu, f);
    json j;
    j["rbmo_norm"] = est.value;
    j["def1"] = est.def1;
    j["def2"] = est.def2;
    j["witness_q"] = cube_to_json(est.witness_q);
    if (est.witness_is_pair) j["witness_r"] = cube_to_json(est.witness_r);
    j["family_size"] = est.family_size;
    j["doubling_count"] = est.doubling_count;
    double l1 = l1_norm(mu, f);
    if (std::abs(integral(mu, f)) <= 1e-10 * l1) {
        auto h = h1_upper_bound(mu, f);
        j["h1_upper_bound"] = h.bound;
        j["h1_blocks"] = h.blocks.size();
        j["h1_fallback"] = h.fallback;
    }
    if (o.lambda > 0.0) {
        auto fam = canonical_family(mu);
        std::size_t best = fam.size();
        for (std::size_t i = 0; i < fam.size(); ++i)
            if (fam.doubling[i] && (best == fam.size() || fam.side[i] > fam.side[best])) best = i;
        if (best < fam.size()) {
            Cube q = fam.cube(mu, best);
            j["z_set"] = {{"cube", cube_to_json(q)}, {"lambda", o.lambda}, {"atoms", z_set(mu, f, q, o.lambda, fam)}};
        }
    }
    emit(j, o.out);
    return kOk;
}

int cmd_czd(const Options& o) {
    auto mu = load_measure(o.measure);
    auto f = load_function(o.function, mu.size());
    auto dec = cz_decompose(mu, f, o.lambda);
    emit(cz_to_json(dec), o.out);
    return dec.inv.all_seven() && dec.inv.half_mass ? kOk : kViolated;
}

int cmd_mainlemma(const Options& o) {
    auto mu = load_measure(o.measure);
    auto f = load_function(o.function, mu.size());
    Cube R0 = o.R0 == "auto" ? auto_R0(mu) : cube_from_json(read_json(o.R0));
    auto k = instance_constants(mu, R0, o.seed);
    MainParams p = default_params(mu, k);
    if (!o.params.empty()) p = params_from_json(read_json(o.params), p);
    std::vector<Check> claims;
    auto dec = run_main_lemma(mu, f, R0, p, 3, &claims);
    auto kernels = verify_kernels(mu, dec, &dec.ledger);
    json j = main_to_json(dec, claims, kernels);
    j["instance_constants"] = {{"eps0", k.eps0}, {"eps1", k.eps1}, {"C0", k.C0}};
    emit(j, o.out);
    return all_pass(dec.properties) && all_pass(claims) && all_pass(kernels) ? kOk : kViolated;
}

int cmd_verify(const Options& o) {
    auto corpus = load_corpus(o.corpus);
    Calibration cal;
    if (!o.calibrate || std::filesystem::exists(o.calibration)) cal = Calibration::load(o.calibration);
    cal.calibrating = o.calibrate;
    SuiteRunner runner(std::move(corpus), cal);
    bool ok = true;
    Calibration fresh = cal;
    for (int id : suite_criteria(o.suite)) {
        auto r = runner.run(id);
        ok = ok && r.pass;
        std::printf("criterion %d [%s]: %s (%.1fs)\n", r.id, r.name.c_str(), r.pass ? "PASS" : "FAIL", r.seconds);
        for (const auto& n : r.notes) std::printf("    %s\n", n.c_str());
        for (auto& [key, v] : r.achieved) fresh.frozen[key] = v;
        std::fflush(stdout);
    }
    if (o.calibrate) {
        fresh.calibrating = false;
        fresh.save(o.calibration);
    }
    if (!o.ledger.empty()) write_json(o.ledger, runner.ledger().to_json());
    return ok ? kOk : kViolated;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"czkit: Calderon-Zygmund toolkit for non-doubling discrete measures"};
    app.require_subcommand(1);
    Options o;

    auto* gen = app.add_subcommand("gen", "Generate a measure");
    gen->add_option("--kind", o.kind, "grid | cantor | clustered");
    gen->add_option("--depth", o.depth, "cantor depth");
    gen->add_option("--dim", o.dim);
    gen->add_option("--points-per-axis", o.points_per_axis, "grid size");
    gen->add_option("--ratio", o.ratio, "cantor contraction");
    gen->add_option("--n", o.n, "growth exponent (0 = natural)");
    gen->add_option("--clusters", o.clusters);
    gen->add_option("--per-cluster", o.per_cluster);
    gen->add_option("--spread", o.spread);
    gen->add_option("--params", o.params, "JSON with generator fields");
    gen->add_option("--seed", o.seed);
    gen->add_option("--out", o.out);

    auto* analyze = app.add_subcommand("analyze", "Growth constants and basic statistics of a measure");
    analyze->add_option("--measure", o.measure)->required();
    analyze->add_option("--out", o.out);

    auto* maximal = app.add_subcommand("maximal", "Maximal functions at support points (CSV x, lower, upper)");
    maximal->add_option("--measure", o.measure)->required();
    maximal->add_option("--function", o.function)->required();
    maximal->add_option("--op", o.op, "grand | hl");
    maximal->add_option("--rho", o.rho);
    maximal->add_option("--queries", o.queries, "JSON {\"points\": [...]}; default: the support");
    maximal->add_option("--out", o.out);

    auto* rbmo = app.add_subcommand("rbmo", "RBMO norm, H1 upper bound and Z-set");
    rbmo->add_option("--measure", o.measure)->required();
    rbmo->add_option("--function", o.function)->required();
    rbmo->add_option("--lambda", o.lambda, "Z-set level on the largest doubling cube");
    rbmo->add_option("--out", o.out);

    auto* czd = app.add_subcommand("czd", "Calderon-Zygmund decomposition at level lambda");
    czd->add_option("--measure", o.measure)->required();
    czd->add_option("--function", o.function)->required();
    czd->add_option("--lambda", o.lambda)->required();
    czd->add_option("--out", o.out);

    auto* ml = app.add_subcommand("mainlemma", "Generation decomposition of an RBMO function");
    ml->add_option("--measure", o.measure)->required();
    ml->add_option("--function", o.function)->required();
    ml->add_option("--R0", o.R0, "auto or a cube JSON file");
    ml->add_option("--params", o.params, "JSON parameter overrides");
    ml->add_option("--seed", o.seed);
    ml->add_option("--out", o.out);

    auto* verify = app.add_subcommand("verify", "Run acceptance suites over a corpus");
    verify->add_option("--suite", o.suite, "cubes | covering | maximal | spaces | czd | mainlemma | kernels | all");
    verify->add_option("--corpus", o.corpus);
    verify->add_option("--calibration", o.calibration);
    verify->add_flag("--calibrate", o.calibrate, "rewrite the calibration file from this run");
    verify->add_option("--out", o.ledger, "constants ledger JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kIo;
    }
    try {
        if (*gen) return cmd_gen(o);
        if (*analyze) return cmd_analyze(o);
        if (*maximal) return cmd_maximal(o);
        if (*rbmo) return cmd_rbmo(o);
        if (*czd) return cmd_czd(o);
        if (*ml) return cmd_mainlemma(o);
        if (*verify) return cmd_verify(o);
    } catch (const Error& e) {
        std::fprintf(stderr, "czkit: %s\n", e.what());
        switch (e.kind()) {
        case ErrorKind::PropertyViolated:
        case ErrorKind::ConditionViolated:
        case ErrorKind::AdmissibilityViolation:
        case ErrorKind::NestingViolation: return kViolated;
        case ErrorKind::IoError:
        case ErrorKind::InvalidParams:
        case ErrorKind::SchemaError: return kIo;
        default: return 1;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "czkit: %s\n", e.what());
        return 1;
    }
    return 1;
}
