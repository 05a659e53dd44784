#include "nbcc/census.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <Eigen/Dense>

#include "nbcc/certify.hpp"
#include "nbcc/fivebody.hpp"

namespace nbcc {

bool CensusReport::crossfoot_ok() const {
    int sum = 0;
    for (const auto& entry : classes) sum += entry.cls.member_count;
    return sum == physical_count;
}

namespace {

// Distance-space polish plus certification of the full-space point; shared
// by both census modes.
struct Polished {
    std::vector<double> distances;
    std::vector<double> full_point;
    double residual = 0.0;
    double condition = 0.0;
    bool certified = false;
    double margin = 0.0;
    std::string mechanism;
};

Polished polish_and_certify(std::span<const double> distances, const ACSystem& ac,
                            const MassVector& masses, double radius) {
    Polished out;
    auto refined = newton_refine(distances, masses, 2e-14, 80, ac.lambda_prime);
    if (!refined.converged)
        throw std::runtime_error("distance refinement did not converge");
    out.distances = refined.distances;
    out.residual = refined.residual;
    out.full_point = ac.lift_distances_real(out.distances);
    CertificationResult cert = certify_solution(ac.system, out.full_point, radius);
    out.certified = cert.status == CertifyStatus::kCertifiedUnique;
    out.margin = cert.containment_margin;
    out.mechanism = cert.mechanism;
    // spectral condition of the full system at the certified point (this is
    // the convention whose maximum over the five-body classes lands at the
    // reference 3.8e2, attained by the collinear class)
    std::vector<Complex> xc(out.full_point.begin(), out.full_point.end());
    Eigen::MatrixXd jr = ac.system.jacobian_eval(xc).real();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jr);
    const auto& sv = svd.singularValues();
    out.condition = sv(0) / sv(sv.size() - 1);
    return out;
}

std::string default_class_name(const ConfigurationClass& cls, int index) {
    std::ostringstream os;
    os << "dim" << cls.dimension << "-iso" << cls.isotropy_order << "-" << index;
    return os.str();
}

}  // namespace

CensusReport census(const MassVector& masses, const CensusOptions& opts) {
    masses.validate();
    const int n = masses.n();
    if (n >= 5 && !opts.allow_huge)
        throw BudgetRefusal(
            "exhaustive census for n >= 5 traces hundreds of millions of paths; "
            "pass the explicit override to proceed");

    ACSystem ac = build_ac_system(masses, opts.lambda_prime);

    SolveOptions sopts;
    sopts.path_budget = opts.path_budget;
    sopts.workers = opts.workers;
    sopts.chunk_size = opts.chunk_size;
    sopts.checkpoint_path = opts.checkpoint_path;
    sopts.resume = opts.resume;
    sopts.progress = opts.progress;
    SolutionSet set = solve_all(ac.system, opts.method, opts.seed, sopts);

    RealnessPolicy policy{opts.theta};
    auto real = filter_real(set, ac.system, policy);
    auto physical = filter_physical(real, n);

    CensusReport report;
    report.bodies = n;
    report.masses = masses.masses;
    report.method =
        opts.method == SolveMethod::kPolyhedral ? "polyhedral" : "total-degree";
    report.seed = opts.seed;
    report.theta = opts.theta;
    report.certify_radius = opts.certify_radius;
    report.lambda_prime = opts.lambda_prime;
    report.path_stats = set.stats;
    report.paths_traced = set.stats.attempted;
    report.real_count = static_cast<int>(real.size());
    report.physical_count = static_cast<int>(physical.size());

    // polish + certify every physical solution
    report.all_certified = true;
    for (auto& ps : physical) {
        Polished pol = polish_and_certify(ps.distances, ac, masses, opts.certify_radius);
        ps.distances = pol.distances;
        ps.full_point = pol.full_point;
        ps.residual = pol.residual;
        ps.condition = pol.condition;
        ps.certified = pol.certified;
        report.rigor_mechanism = pol.mechanism;
        report.max_residual = std::max(report.max_residual, pol.residual);
        report.max_condition = std::max(report.max_condition, pol.condition);
        report.all_certified = report.all_certified && pol.certified;
    }

    auto classes = orbit_classify(physical, n);
    int index = 0;
    for (auto& cls : classes) {
        ClassEntry entry;
        entry.cls = cls;
        entry.name = default_class_name(cls, index++);
        entry.embedding = reconstruct(cls.representative, n, cls.dimension);
        // margin of the member we certified; representative is the canon
        // form of some member, so re-certify it directly
        ACSystem acr = ac;
        auto full = ac.lift_distances_real(cls.representative);
        CertificationResult cert =
            certify_solution(acr.system, full, opts.certify_radius);
        entry.krawczyk_margin = cert.containment_margin;
        entry.cls.certified = cert.status == CertifyStatus::kCertifiedUnique;
        report.classes.push_back(std::move(entry));
    }
    return report;
}

CensusReport seeded_census_five(const CensusOptions& opts) {
    MassVector masses = MassVector::equal(5);
    ACSystem ac = build_ac_system(masses, opts.lambda_prime);

    CensusReport report;
    report.bodies = 5;
    report.masses = masses.masses;
    report.method = "seeded";
    report.seeded = true;
    report.seed = opts.seed;
    report.theta = opts.theta;
    report.certify_radius = opts.certify_radius;
    report.lambda_prime = opts.lambda_prime;
    report.all_certified = true;

    std::vector<PhysicalSolution> reps;
    std::vector<FiveBodyClassSeed> seeds = five_body_class_seeds();
    for (const auto& seed : seeds) {
        Polished pol;
        try {
            pol = polish_and_certify(seed.distances, ac, masses, opts.certify_radius);
        } catch (const std::exception& e) {
            throw std::runtime_error("seeded census: class '" + seed.name +
                                     "' failed refinement: " + e.what());
        }
        if (!pol.certified)
            throw std::runtime_error("seeded census: class '" + seed.name +
                                     "' failed Krawczyk certification");
        report.rigor_mechanism = pol.mechanism;
        report.max_residual = std::max(report.max_residual, pol.residual);
        report.max_condition = std::max(report.max_condition, pol.condition);

        PhysicalSolution ps;
        ps.distances = pol.distances;
        ps.full_point = pol.full_point;
        ps.residual = pol.residual;
        ps.condition = pol.condition;
        ps.certified = pol.certified;
        reps.push_back(std::move(ps));
    }

    // classify the ten representatives; each must land in its own class with
    // the expected isotropy, dimension, and orbit size
    auto classes = orbit_classify(reps, 5);
    if (classes.size() != seeds.size())
        throw std::runtime_error("seeded census: representatives merged into " +
                                 std::to_string(classes.size()) + " classes");
    for (const auto& seed : seeds) {
        bool matched = false;
        for (auto& cls : classes) {
            if (cls.dimension != seed.expected_dimension ||
                cls.isotropy_order != seed.expected_isotropy)
                continue;
            // distinguish same-signature classes by distance to the seed
            double dist = 0.0;
            auto seed_canon = canonical_distances(seed.distances, 5);
            for (std::size_t i = 0; i < cls.representative.size(); ++i)
                dist = std::max(dist,
                                std::abs(cls.representative[i] - seed_canon[i]));
            if (dist < 1e-6) {
                if (cls.orbit_size != seed.expected_orbit)
                    throw std::runtime_error("seeded census: class '" + seed.name +
                                             "' has orbit size " +
                                             std::to_string(cls.orbit_size) +
                                             ", expected " +
                                             std::to_string(seed.expected_orbit));
                ClassEntry entry;
                entry.name = seed.name;
                entry.cls = cls;
                entry.cls.member_count = cls.orbit_size;  // full labeled count
                entry.embedding = reconstruct(cls.representative, 5, cls.dimension);
                auto full = ac.lift_distances_real(cls.representative);
                CertificationResult cert =
                    certify_solution(ac.system, full, opts.certify_radius);
                entry.krawczyk_margin = cert.containment_margin;
                entry.cls.certified =
                    cert.status == CertifyStatus::kCertifiedUnique;
                if (!entry.cls.certified)
                    throw std::runtime_error("seeded census: class '" + seed.name +
                                             "' representative failed certification");
                report.classes.push_back(std::move(entry));
                matched = true;
                break;
            }
        }
        if (!matched)
            throw std::runtime_error("seeded census: class '" + seed.name +
                                     "' not recovered by classification");
    }
    int total = 0;
    for (const auto& e : report.classes) total += e.cls.member_count;
    report.physical_count = total;
    report.real_count = total;
    return report;
}

std::string render_census_table(const CensusReport& report) {
    std::ostringstream os;
    char buf[256];
    os << "census: n=" << report.bodies << " method=" << report.method
       << " seed=" << report.seed << "\n";
    std::snprintf(buf, sizeof buf,
                  "paths=%llu converged=%llu diverged=%llu failed=%llu\n",
                  report.paths_traced, report.path_stats.converged,
                  report.path_stats.diverged, report.path_stats.failed);
    if (!report.seeded) os << buf;
    std::snprintf(buf, sizeof buf,
                  "theta=%g radius=%g lambda'=%g rigor=%s\n", report.theta,
                  report.certify_radius, report.lambda_prime,
                  report.rigor_mechanism.c_str());
    os << buf;
    std::snprintf(buf, sizeof buf,
                  "real=%d physical=%d max_residual=%.3g max_condition=%.3g\n\n",
                  report.real_count, report.physical_count, report.max_residual,
                  report.max_condition);
    os << buf;

    const char* group_names[] = {"", "collinear", "planar", "spatial",
                                 "four-dimensional"};
    for (int dim = 1; dim <= 4; ++dim) {
        bool any = false;
        for (const auto& e : report.classes)
            if (e.cls.dimension == dim) any = true;
        if (!any) continue;
        os << group_names[dim] << ":\n";
        std::snprintf(buf, sizeof buf, "  %-26s %5s %6s %8s %10s %10s %5s\n",
                      "class", "iso", "orbit", "members", "residual", "cond",
                      "cert");
        os << buf;
        for (const auto& e : report.classes) {
            if (e.cls.dimension != dim) continue;
            std::snprintf(buf, sizeof buf,
                          "  %-26s %5d %6d %8d %10.2e %10.3g %5s\n",
                          e.name.c_str(), e.cls.isotropy_order, e.cls.orbit_size,
                          e.cls.member_count, e.cls.residual, e.cls.condition,
                          e.cls.certified ? "yes" : "NO");
            os << buf;
        }
    }
    return os.str();
}

}  // namespace nbcc
