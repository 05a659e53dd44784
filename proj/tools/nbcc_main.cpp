// nbcc: census pipeline for central configurations of the n-body problem.
//
// Subcommands: gen, mv, solve, certify, classify, embed, census,
// seeded-census. Exit codes: 0 success, 1 usage error, 2 numeric failure,
// 3 budget refusal.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

#include "nbcc/acsys.hpp"
#include "nbcc/census.hpp"
#include "nbcc/certify.hpp"
#include "nbcc/classify.hpp"
#include "nbcc/embed.hpp"
#include "nbcc/mixedcells.hpp"
#include "nbcc/poly.hpp"
#include "nbcc/tracker.hpp"

using json = nlohmann::json;
using namespace nbcc;

namespace {

MassVector parse_masses(const std::string& spec, int bodies) {
    MassVector mv;
    if (spec.empty()) {
        mv = MassVector::equal(bodies);
    } else {
        std::stringstream ss(spec);
        std::string tok;
        while (std::getline(ss, tok, ',')) mv.masses.push_back(std::stod(tok));
    }
    if (bodies > 0 && mv.n() != bodies)
        throw CLI::ValidationError("--masses", "mass count does not match --bodies");
    mv.validate();
    return mv;
}

json endpoint_json(const std::vector<Complex>& pt) {
    json out = json::array();
    for (const Complex& c : pt) out.push_back({c.real(), c.imag()});
    return out;
}

std::vector<Complex> endpoint_from_json(const json& j) {
    std::vector<Complex> pt;
    for (const auto& pair : j) pt.emplace_back(pair[0].get<double>(), pair[1].get<double>());
    return pt;
}

const char* status_name(PathStatus s) {
    switch (s) {
        case PathStatus::kConverged: return "converged";
        case PathStatus::kDiverged: return "diverged";
        case PathStatus::kFailed: return "failed";
    }
    return "?";
}

json solution_set_json(const SolutionSet& set, const std::string& method,
                       std::uint64_t seed, int nvars) {
    json j;
    j["nvars"] = nvars;
    j["method"] = method;
    j["seed"] = seed;
    j["dedup_tol"] = set.dedup_tol;
    j["stats"] = {{"attempted", set.stats.attempted},
                  {"converged", set.stats.converged},
                  {"diverged", set.stats.diverged},
                  {"failed", set.stats.failed},
                  {"retracked", set.stats.retracked},
                  {"seconds", set.stats.seconds}};
    json sols = json::array();
    for (const auto& rec : set.records) {
        sols.push_back({{"endpoint", endpoint_json(rec.endpoint)},
                        {"residual", rec.residual},
                        {"condition", rec.condition},
                        {"status", status_name(rec.status)}});
    }
    j["solutions"] = std::move(sols);
    return j;
}

json class_json(const ClassEntry& entry) {
    json jc;
    jc["name"] = entry.name;
    jc["dimension"] = entry.cls.dimension;
    jc["isotropy_order"] = entry.cls.isotropy_order;
    jc["orbit_size"] = entry.cls.orbit_size;
    jc["member_count"] = entry.cls.member_count;
    jc["representative"] = entry.cls.representative;
    jc["residual"] = entry.cls.residual;
    jc["condition"] = entry.cls.condition;
    jc["certified"] = entry.cls.certified;
    jc["krawczyk_margin"] = entry.krawczyk_margin;
    jc["coordinates"] = entry.embedding.coordinates;
    jc["max_distance_error"] = entry.embedding.max_distance_error;
    return jc;
}

json report_json(const CensusReport& rep) {
    json j;
    j["bodies"] = rep.bodies;
    j["masses"] = rep.masses;
    j["method"] = rep.method;
    j["seeded"] = rep.seeded;
    j["seed"] = rep.seed;
    j["theta"] = rep.theta;
    j["certify_radius"] = rep.certify_radius;
    j["lambda_prime"] = rep.lambda_prime;
    j["rigor_mechanism"] = rep.rigor_mechanism;
    j["paths_traced"] = rep.paths_traced;
    j["stats"] = {{"attempted", rep.path_stats.attempted},
                  {"converged", rep.path_stats.converged},
                  {"diverged", rep.path_stats.diverged},
                  {"failed", rep.path_stats.failed},
                  {"retracked", rep.path_stats.retracked},
                  {"seconds", rep.path_stats.seconds}};
    j["real_count"] = rep.real_count;
    j["physical_count"] = rep.physical_count;
    j["max_residual"] = rep.max_residual;
    j["max_condition"] = rep.max_condition;
    j["all_certified"] = rep.all_certified;
    j["crossfoot_ok"] = rep.crossfoot_ok();
    json classes = json::array();
    for (const auto& entry : rep.classes) classes.push_back(class_json(entry));
    j["classes"] = std::move(classes);
    return j;
}

void write_json(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    in >> j;
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"central configuration census pipeline"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("gen", "write the distance-equation system");
    int gen_bodies = 5;
    std::string gen_masses, gen_out;
    double gen_lambda = -1.0;
    gen->add_option("--bodies", gen_bodies, "body count")->required();
    gen->add_option("--masses", gen_masses, "comma-separated masses (default equal)");
    gen->add_option("--lambda", gen_lambda, "dilation normalization lambda'");
    gen->add_option("--out", gen_out, "output system file")->required();

    auto* mv = app.add_subcommand("mv", "mixed volume of a system's supports");
    std::string mv_system, mv_cells_out;
    std::uint64_t mv_seed = 1;
    mv->add_option("--system", mv_system, "system file")->required();
    mv->add_option("--seed", mv_seed, "lifting seed");
    mv->add_option("--cells-out", mv_cells_out, "write cells (edges + volume per line)");

    auto* solve = app.add_subcommand("solve", "track all paths of a system");
    std::string so_system, so_method = "poly", so_out, so_checkpoint;
    std::uint64_t so_seed = 1;
    int so_workers = 1;
    unsigned long long so_chunk = 1024, so_budget = 4'000'000;
    bool so_resume = false, so_progress = false;
    solve->add_option("--system", so_system, "system file")->required();
    solve->add_option("--method", so_method, "td | poly")
        ->check(CLI::IsMember({"td", "poly"}));
    solve->add_option("--seed", so_seed, "gamma / lifting seed");
    solve->add_option("--out", so_out, "solutions JSON")->required();
    solve->add_option("--workers", so_workers, "worker threads");
    solve->add_option("--chunk", so_chunk, "paths per work unit");
    solve->add_option("--checkpoint", so_checkpoint, "checkpoint file");
    solve->add_flag("--resume", so_resume, "resume from checkpoint");
    solve->add_flag("--progress", so_progress, "chunk progress on stderr");
    solve->add_option("--budget", so_budget, "path budget");

    auto* cert = app.add_subcommand("certify", "Krawczyk-certify solutions");
    std::string ce_system, ce_solutions, ce_out;
    double ce_radius = 1e-8;
    cert->add_option("--system", ce_system, "system file")->required();
    cert->add_option("--solutions", ce_solutions, "solutions JSON")->required();
    cert->add_option("--radius", ce_radius, "box radius");
    cert->add_option("--out", ce_out, "certificates JSON")->required();

    auto* cls = app.add_subcommand("classify", "filter and classify solutions");
    std::string cl_solutions, cl_out, cl_masses;
    int cl_bodies = 0;
    double cl_theta = 1e-7;
    cls->add_option("--solutions", cl_solutions, "solutions JSON")->required();
    cls->add_option("--bodies", cl_bodies, "body count")->required();
    cls->add_option("--masses", cl_masses, "masses (default equal)");
    cls->add_option("--theta", cl_theta, "realness threshold");
    cls->add_option("--out", cl_out, "classes JSON")->required();

    auto* emb = app.add_subcommand("embed", "reconstruct class coordinates");
    std::string em_classes, em_out;
    emb->add_option("--classes", em_classes, "classes JSON")->required();
    emb->add_option("--out", em_out, "coordinates JSON")->required();

    auto* cen = app.add_subcommand("census", "full pipeline for one mass vector");
    int cn_bodies = 3;
    std::string cn_masses, cn_out, cn_method = "poly", cn_checkpoint;
    std::uint64_t cn_seed = 1;
    unsigned long long cn_budget = 4'000'000, cn_chunk = 1024;
    double cn_theta = 1e-7, cn_radius = 1e-8;
    int cn_workers = 1;
    bool cn_huge = false, cn_table = false, cn_progress = false, cn_resume = false;
    cen->add_option("--bodies", cn_bodies, "body count")->required();
    cen->add_option("--masses", cn_masses, "masses (default equal)");
    cen->add_option("--method", cn_method, "td | poly")
        ->check(CLI::IsMember({"td", "poly"}));
    cen->add_option("--seed", cn_seed, "solve seed");
    cen->add_option("--theta", cn_theta, "realness threshold");
    cen->add_option("--radius", cn_radius, "certification radius");
    cen->add_option("--budget", cn_budget, "path budget");
    cen->add_option("--workers", cn_workers, "worker threads");
    cen->add_option("--chunk", cn_chunk, "paths per work unit");
    cen->add_option("--checkpoint", cn_checkpoint, "checkpoint file");
    cen->add_flag("--resume", cn_resume, "resume from checkpoint");
    cen->add_flag("--progress", cn_progress, "chunk progress on stderr");
    cen->add_flag("--i-know-this-is-huge", cn_huge,
                  "allow exhaustive runs with cluster-scale path counts");
    cen->add_flag("--table", cn_table, "print the aligned table to stdout");
    cen->add_option("--out", cn_out, "report JSON")->required();

    auto* seed5 = app.add_subcommand(
        "seeded-census", "five-body census from the known class ansatze");
    std::string s5_out;
    double s5_radius = 1e-8;
    bool s5_table = false;
    seed5->add_option("--out", s5_out, "report JSON")->required();
    seed5->add_option("--radius", s5_radius, "certification radius");
    seed5->add_flag("--table", s5_table, "print the aligned table to stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            MassVector masses = parse_masses(gen_masses, gen_bodies);
            ACSystem ac = build_ac_system(masses, gen_lambda);
            save_system(ac.system, gen_out);
            std::cout << "wrote " << ac.system.size() << " equations in "
                      << ac.system.nvars() << " variables to " << gen_out << "\n";
        } else if (*mv) {
            PolySystem system = load_system(mv_system);
            MixedVolumeResult result =
                mixed_volume(system, mv_seed, !mv_cells_out.empty());
            std::cout << "mixed volume = " << result.mixed_volume
                      << " (lifting seed " << result.lifting_seed << ")\n";
            if (!mv_cells_out.empty()) {
                std::ofstream out(mv_cells_out);
                if (!out) throw std::runtime_error("cannot write " + mv_cells_out);
                for (const auto& cell : result.cells) {
                    for (const auto& [a, b] : cell.edges) out << a << "," << b << " ";
                    out << "| " << cell.volume << "\n";
                }
            }
        } else if (*solve) {
            PolySystem system = load_system(so_system);
            SolveOptions opts;
            opts.workers = so_workers;
            opts.chunk_size = so_chunk;
            opts.checkpoint_path = so_checkpoint;
            opts.resume = so_resume;
            opts.progress = so_progress;
            opts.path_budget = so_budget;
            SolveMethod method =
                so_method == "td" ? SolveMethod::kTotalDegree : SolveMethod::kPolyhedral;
            SolutionSet set = solve_all(system, method, so_seed, opts);
            write_json(solution_set_json(set, so_method, so_seed, system.nvars()),
                       so_out);
            std::cout << "paths " << set.stats.attempted << ": converged "
                      << set.stats.converged << ", diverged " << set.stats.diverged
                      << ", failed " << set.stats.failed << "; "
                      << set.records.size() << " distinct solutions -> " << so_out
                      << "\n";
        } else if (*cert) {
            PolySystem system = load_system(ce_system);
            json sols = load_json(ce_solutions);
            json results = json::array();
            int certified = 0;
            std::string mechanism;
            for (const auto& js : sols["solutions"]) {
                auto pt = endpoint_from_json(js["endpoint"]);
                double maxim = 0.0;
                for (const Complex& c : pt) maxim = std::max(maxim, std::abs(c.imag()));
                json jr;
                if (maxim > 1e-9) {
                    jr = {{"status", "not_certified"},
                          {"reason", "solution is not real"},
                          {"margin", nullptr}};
                } else {
                    std::vector<double> x;
                    for (const Complex& c : pt) x.push_back(c.real());
                    CertificationResult r = certify_solution(system, x, ce_radius);
                    mechanism = r.mechanism;
                    bool ok = r.status == CertifyStatus::kCertifiedUnique;
                    certified += ok;
                    jr = {{"status", ok ? "certified_unique" : "not_certified"},
                          {"margin", r.containment_margin}};
                    if (!ok) jr["reason"] = r.reason;
                }
                results.push_back(std::move(jr));
            }
            json out = {{"radius", ce_radius},
                        {"mechanism", mechanism},
                        {"certified", certified},
                        {"total", results.size()},
                        {"results", std::move(results)}};
            write_json(out, ce_out);
            std::cout << "certified " << certified << "/" << sols["solutions"].size()
                      << " -> " << ce_out << "\n";
        } else if (*cls) {
            MassVector masses = parse_masses(cl_masses, cl_bodies);
            ACSystem ac = build_ac_system(masses);
            json sols = load_json(cl_solutions);
            SolutionSet set;
            for (const auto& js : sols["solutions"]) {
                SolutionRecord rec;
                rec.endpoint = endpoint_from_json(js["endpoint"]);
                rec.residual = js["residual"].get<double>();
                rec.condition = js["condition"].get<double>();
                set.records.push_back(std::move(rec));
            }
            auto real = filter_real(set, ac.system, RealnessPolicy{cl_theta});
            auto physical = filter_physical(real, cl_bodies);
            for (auto& ps : physical) {
                auto refined = newton_refine(ps.distances, masses, 2e-14, 80);
                if (refined.converged) {
                    ps.distances = refined.distances;
                    ps.residual = refined.residual;
                }
            }
            auto classes = orbit_classify(physical, cl_bodies);
            json jclasses = json::array();
            for (const auto& c : classes) {
                jclasses.push_back({{"dimension", c.dimension},
                                    {"isotropy_order", c.isotropy_order},
                                    {"orbit_size", c.orbit_size},
                                    {"member_count", c.member_count},
                                    {"representative", c.representative},
                                    {"residual", c.residual},
                                    {"certified", c.certified}});
            }
            json out = {{"bodies", cl_bodies},
                        {"theta", cl_theta},
                        {"real_count", real.size()},
                        {"physical_count", physical.size()},
                        {"classes", std::move(jclasses)}};
            write_json(out, cl_out);
            std::cout << "real " << real.size() << ", physical " << physical.size()
                      << ", classes " << classes.size() << " -> " << cl_out << "\n";
        } else if (*emb) {
            json jc = load_json(em_classes);
            int bodies = jc["bodies"].get<int>();
            json out = json::array();
            for (const auto& c : jc["classes"]) {
                std::vector<double> rep = c["representative"].get<std::vector<double>>();
                int dim = c["dimension"].get<int>();
                Embedding e = reconstruct(rep, bodies, dim);
                out.push_back({{"dimension", e.dimension},
                               {"coordinates", e.coordinates},
                               {"max_distance_error", e.max_distance_error}});
            }
            write_json(json{{"bodies", bodies}, {"embeddings", std::move(out)}}, em_out);
            std::cout << "embedded " << jc["classes"].size() << " classes -> "
                      << em_out << "\n";
        } else if (*cen) {
            MassVector masses = parse_masses(cn_masses, cn_bodies);
            CensusOptions opts;
            opts.method =
                cn_method == "td" ? SolveMethod::kTotalDegree : SolveMethod::kPolyhedral;
            opts.seed = cn_seed;
            opts.theta = cn_theta;
            opts.certify_radius = cn_radius;
            opts.path_budget = cn_budget;
            opts.allow_huge = cn_huge;
            opts.workers = cn_workers;
            opts.chunk_size = cn_chunk;
            opts.checkpoint_path = cn_checkpoint;
            opts.resume = cn_resume;
            opts.progress = cn_progress;
            CensusReport rep = census(masses, opts);
            write_json(report_json(rep), cn_out);
            if (cn_table) std::cout << render_census_table(rep);
            std::cout << "census: " << rep.physical_count << " physical solutions in "
                      << rep.classes.size() << " classes -> " << cn_out << "\n";
        } else if (*seed5) {
            CensusOptions opts;
            opts.certify_radius = s5_radius;
            CensusReport rep = seeded_census_five(opts);
            write_json(report_json(rep), s5_out);
            if (s5_table) std::cout << render_census_table(rep);
            std::cout << "seeded census: " << rep.physical_count
                      << " physical solutions in " << rep.classes.size()
                      << " classes -> " << s5_out << "\n";
        }
    } catch (const BudgetRefusal& e) {
        std::cerr << "refused: " << e.what() << "\n";
        return 3;
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
