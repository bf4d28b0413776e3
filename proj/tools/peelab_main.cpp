#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "peelab/chains.hpp"
#include "peelab/enumeration.hpp"
#include "peelab/kernel.hpp"
#include "peelab/limits.hpp"
#include "peelab/mapbuild.hpp"
#include "peelab/verify.hpp"

namespace {

using nlohmann::json;
using namespace peelab;

std::filesystem::path output_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("PEELAB_OUT_DIR")) return env;
    return ".";
}

json law_summary(std::vector<double> xs) {
    json j;
    j["mean"] = mean_of(xs);
    j["sd"] = xs.size() > 1 ? stddev_of(xs) : 0.0;
    json q;
    for (double p : {0.05, 0.25, 0.5, 0.75, 0.95})
        q[std::to_string(p)] = quantile_of(xs, p);
    j["quantiles"] = q;
    return j;
}

int cmd_constants(const std::string& model_s) {
    const ModelId model = parse_model(model_s);
    const auto ct = constants(model);
    const WeightTable& wt = weight_table(model);
    std::cout << "model " << model_name(model) << "\n";
    auto line = [](const char* name, const RadicalExpr& e, double v) {
        std::cout << name << " = " << e.str() << " = ";
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.12g", v);
        std::cout << buf << "\n";
    };
    line("p ", ct.p, ct.p_d);
    line("v ", ct.v, ct.v_d);
    line("h ", ct.h, ct.h_d);
    line("h*", ct.h_star, ct.h_star_d);
    line("a ", ct.a, ct.a_d);
    if (model == ModelId::Quad) line("a*", ct.a_star, ct.a_star_d);
    line("t ", ct.t, ct.t_d);
    line("b ", ct.b, ct.b_d);
    line("c1", ct.c1, ct.c1_d);
    line("c2", ct.c2, ct.c2_d);
    std::cout << "q(-1) limit = " << nu_plus_exact(model).str() << " = "
              << nu_plus_exact(model).to_double() << "\n";
    for (long p = wt.p_min(); p < wt.p_min() + 6; ++p) {
        std::cout << "Z(" << p << ") = " << wt.z(p).str() << " = " << wt.z(p).to_double()
                  << "\n";
    }
    for (long p = std::max<long>(2, wt.p_min()); p < wt.p_min() + 6; ++p)
        std::cout << "h(" << p + 1 << ")/h(" << p << ") = " << wt.h_step(p).get_str() << "\n";
    return 0;
}

struct SimArgs {
    std::string model = "type2";
    std::string algo = "pv";
    long steps = 10000;
    long rmax = 0;
    long replicas = 1;
    std::uint64_t seed = 1;
    std::string out;
    std::string format = "csv";
    long record_every = 1;
    long exact_cutoff = 200;
    long max_hole_volume = 10'000'000;
};

int cmd_simulate(const SimArgs& a) {
    const ModelId model = parse_model(a.model);
    const auto dir = output_dir(a.out);
    std::filesystem::create_directories(dir);

    json summary;
    summary["schema"] = 1;
    summary["model"] = model_name(model);
    summary["algorithm"] = a.algo;
    summary["seed"] = a.seed;
    summary["steps"] = a.steps;
    summary["rmax"] = a.rmax;
    summary["replicas"] = a.replicas;
    summary["exact_cutoff"] = a.exact_cutoff;
    summary["max_hole_volume"] = a.max_hole_volume;
    bool truncated = false;

    std::vector<double> finalP, finalV, finalH, finalA, finalTau;
    for (long rep = 0; rep < a.replicas; ++rep) {
        Trace tr;
        std::vector<HullRecord> hulls;
        try {
            if (a.algo == "pv")
                tr = run_pv(model, a.steps, a.seed, rep, a.record_every, true,
                            a.max_hole_volume);
            else if (a.algo == "layers")
                tr = run_layers(a.steps, a.seed, rep, a.record_every, true, a.max_hole_volume);
            else if (a.algo == "dual")
                tr = run_dual_layers(a.steps, a.seed, rep, a.record_every, true,
                                     a.max_hole_volume);
            else if (a.algo == "fpp")
                tr = run_fpp(model, a.steps, a.seed, rep, a.record_every, true,
                             a.max_hole_volume);
            else if (a.algo == "boltzmann") {
                BoltzmannSizeLaw law(model, a.rmax > 0 ? a.rmax : 2);
                Rng rng(a.seed, rep);
                tr.model = model;
                tr.algorithm = "pv"; // n,P,V header; P = boundary, V = drawn size
                tr.seed = a.seed;
                tr.stream = rep;
                for (long i = 1; i <= a.steps; ++i)
                    tr.rows.push_back({i, law.boundary(), law.sample(rng), 0, 0, 0, 0, 0.0});
            } else if (a.algo == "sphere") {
                Rng rng(a.seed, rep);
                tr.model = model;
                tr.algorithm = "pv";
                tr.seed = a.seed;
                tr.stream = rep;
                for (long i = 1; i <= a.steps; ++i) {
                    HalfEdgeMap sphere = sample_boltzmann_sphere(rng, a.max_hole_volume);
                    tr.rows.push_back(
                        {i, 0, sphere.vertex_count(), 0, 0, 0, 0, 0.0});
                }
            } else if (a.algo == "map-layers") {
                MapLayerRun run(a.seed, rep, a.max_hole_volume);
                const long rmax = a.rmax > 0 ? a.rmax : 10;
                while (run.height() < rmax) run.step();
                tr.model = model;
                tr.algorithm = "map-layers";
                tr.seed = a.seed;
                tr.stream = rep;
                for (const auto& rec : run.sigma_records())
                    tr.rows.push_back({rec.r, rec.boundary, rec.volume, rec.r, 0, 0, 0, 0.0});
                if (rep == 0) {
                    std::ofstream mf(dir / "map_r000.txt");
                    run.map().export_text(mf);
                }
            } else {
                std::cerr << "unknown algorithm '" << a.algo << "'\n";
                return 2;
            }
        } catch (const ResourceError& e) {
            std::cerr << "resource guard: " << e.what() << "\n";
            truncated = true;
            tr.truncated = true;
        }

        char name[64];
        std::snprintf(name, sizeof name, "trace_r%03ld.csv", rep);
        if (a.format == "csv") {
            std::ofstream f(dir / name);
            tr.write_csv(f);
            if (tr.truncated) f << "# truncated: true\n";
        } else {
            json jt;
            jt["header"] = tr.header();
            jt["truncated"] = tr.truncated;
            json rows = json::array();
            for (const auto& r : tr.rows) {
                if (tr.algorithm == "fpp")
                    rows.push_back({r.n, r.tau, r.P, r.V});
                else if (tr.algorithm == "layers" || tr.algorithm == "dual" ||
                         tr.algorithm == "map-layers")
                    rows.push_back({r.n, r.P, r.V, r.H, r.A, r.U, r.G});
                else
                    rows.push_back({r.n, r.P, r.V});
            }
            jt["rows"] = rows;
            std::snprintf(name, sizeof name, "trace_r%03ld.json", rep);
            std::ofstream f(dir / name);
            f << jt.dump(2) << "\n";
        }
        if (!tr.rows.empty()) {
            const auto& last = tr.rows.back();
            finalP.push_back(static_cast<double>(last.P));
            finalV.push_back(static_cast<double>(last.V));
            finalH.push_back(static_cast<double>(last.H));
            finalA.push_back(static_cast<double>(last.A));
            finalTau.push_back(last.tau);
        }
    }

    summary["truncated"] = truncated;
    if (!finalP.empty()) {
        summary["final"]["P"] = law_summary(finalP);
        summary["final"]["V"] = law_summary(finalV);
        if (a.algo == "layers" || a.algo == "dual" || a.algo == "map-layers") {
            summary["final"]["H"] = law_summary(finalH);
            summary["final"]["A"] = law_summary(finalA);
        }
        if (a.algo == "fpp") summary["final"]["tau"] = law_summary(finalTau);
    }
    std::ofstream sf(dir / "summary.json");
    sf << summary.dump(2) << "\n";
    std::cout << "wrote " << a.replicas << " trace file(s) and summary.json under " << dir
              << "\n";
    return truncated ? 1 : 0;
}

int cmd_verify(const std::string& suite, std::uint64_t seed, double budget,
               const std::string& out) {
    VerifyOptions opt;
    opt.seed = seed;
    opt.budget_seconds = budget;
    opt.log = &std::cout;
    if (suite == "exact")
        opt.statistical = false;
    else if (suite == "statistical")
        opt.exact = false;
    else if (suite != "all") {
        std::cerr << "unknown suite '" << suite << "' (expected exact, statistical, all)\n";
        return 2;
    }
    const auto crits = run_verify(opt);
    bool all_pass = true, budget_hit = false;
    json rep;
    rep["schema"] = 1;
    rep["seed"] = seed;
    json arr = json::array();
    for (const auto& c : crits) {
        if (!c.ran) {
            budget_hit = true;
            continue;
        }
        all_pass = all_pass && c.pass;
        arr.push_back({{"id", c.id},
                       {"name", c.name},
                       {"pass", c.pass},
                       {"details", c.details},
                       {"seconds", c.seconds}});
    }
    rep["criteria"] = arr;
    rep["all_pass"] = all_pass;
    rep["budget_exceeded"] = budget_hit;
    if (!out.empty()) {
        std::ofstream f(out);
        f << rep.dump(2) << "\n";
    }
    if (budget_hit) return 3;
    return all_pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"peelab: Markovian exploration laboratory for infinite random planar maps"};
    app.require_subcommand(1);

    std::string model = "type2";
    auto* c_const = app.add_subcommand("constants", "print the model constant tables");
    c_const->add_option("--model", model, "type2, type1 or quad");

    SimArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "run chains or map explorations");
    c_sim->add_option("--model", sim.model, "type2, type1 or quad");
    c_sim->add_option("--algo", sim.algo, "pv, layers, dual, fpp, boltzmann, sphere, map-layers");
    c_sim->add_option("--steps", sim.steps, "steps per replica (draws for boltzmann/sphere)");
    c_sim->add_option("--rmax", sim.rmax, "target radius (map-layers) or boundary (boltzmann)");
    c_sim->add_option("--replicas", sim.replicas, "replica count");
    c_sim->add_option("--seed", sim.seed, "base seed; replica streams derive from it");
    c_sim->add_option("--out", sim.out, "output directory (default $PEELAB_OUT_DIR or .)");
    c_sim->add_option("--format", sim.format, "csv or json");
    c_sim->add_option("--record-every", sim.record_every, "trace thinning (0 = final row only)");
    c_sim->add_option("--exact-cutoff", sim.exact_cutoff,
                      "boundary size above which weights use the log-Gamma path");
    c_sim->add_option("--max-hole-volume", sim.max_hole_volume,
                      "volume guard per Boltzmann filling");

    std::string suite = "all", report_out;
    std::uint64_t vseed = 20240801;
    double budget = 1e18;
    auto* c_ver = app.add_subcommand("verify", "run the verification criteria");
    c_ver->add_option("--suite", suite, "exact, statistical or all");
    c_ver->add_option("--seed", vseed, "seed for the statistical suite");
    c_ver->add_option("--budget", budget, "time budget in seconds");
    c_ver->add_option("--out", report_out, "write a JSON report here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (c_const->parsed()) return cmd_constants(model);
        if (c_sim->parsed()) return cmd_simulate(sim);
        if (c_ver->parsed()) return cmd_verify(suite, vseed, budget, report_out);
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const IntegrityError& e) {
        std::cerr << "integrity error: " << e.what() << "\n";
        return 4;
    } catch (const ResourceError& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
