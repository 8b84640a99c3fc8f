#include "pdcert/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "pdcert/covering.hpp"
#include "pdcert/lattices.hpp"
#include "pdcert/random.hpp"
#include "pdcert/witness.hpp"
#include "pdcert/zq.hpp"

namespace pdcert {

namespace {

using Clock = std::chrono::steady_clock;

/// Collects failures; keeps the first few messages.
struct Checker {
    int failures = 0;
    int checks = 0;
    std::ostringstream notes;

    void require(bool ok, const std::string& what)
    {
        ++checks;
        if (ok) return;
        if (failures < 4) notes << (failures ? "; " : "") << what;
        ++failures;
    }

    std::string summary(const std::string& extra) const
    {
        std::ostringstream out;
        out << (checks - failures) << "/" << checks << " checks";
        if (!extra.empty()) out << ", " << extra;
        if (failures) out << "; first failures: " << notes.str();
        return out.str();
    }
};

std::string fmt(double x, int digits = 12)
{
    std::ostringstream out;
    out << std::setprecision(digits) << x;
    return out.str();
}

TilingOptions tiling_options(const ConvexBody& u, const AcceptanceOptions& options)
{
    TilingOptions t;
    if (options.grid_offset_fraction != 0.0) {
        const Eigen::VectorXd hw = inscribed_box(scale(u, 0.5)).as<Box>().half_widths;
        t.grid_offset = 2.0 * options.grid_offset_fraction * hw;
    }
    return t;
}

LatticeBoundOptions lattice_options(const AcceptanceOptions& options)
{
    LatticeBoundOptions l;
    l.count_bias = options.lattice_count_bias;
    return l;
}

Lattice integer_lattice(int n)
{
    return catalog_entry("Zn", n).lattice;
}

std::string one_d_window(const AcceptanceOptions& options, Checker& c)
{
    const ConvexBody u = ConvexBody::cube(1, 1.0);
    std::size_t audited = 0;
    for (int r = 1; r <= 20; ++r) {
        const ConvexBody v = ConvexBody::cube(1, r);
        const auto cert = tiling_cover(u, v, tiling_options(u, options));
        const std::string at = "r=" + std::to_string(r);
        c.require(cert.translate_count == static_cast<std::uint64_t>(2 * r + 1),
                  at + ": |X|=" + std::to_string(cert.translate_count) + " expected " + std::to_string(2 * r + 1));
        c.require(std::abs(cert.bound_value - (2.0 + 1.0 / r)) <= 1e-12, at + ": upper " + fmt(cert.bound_value));
        const auto audit = audit_coverage(cert, 2000, mix_seed(options.seed, static_cast<std::uint64_t>(r)));
        audited += audit.inside_k;
        c.require(audit.passed(), at + ": coverage audit found " + std::to_string(audit.uncovered) + " uncovered points");

        const auto lower = lattice_lower_bound(integer_lattice(1), u, v, lattice_options(options));
        const auto count = lower.audit.at("interior_count").get<std::int64_t>();
        c.require(count == 2 * r - 1, at + ": interior count " + std::to_string(count));
        c.require(std::abs(lower.value - (2.0 - 1.0 / r)) <= 1e-12, at + ": lower " + fmt(lower.value));
    }
    return std::to_string(audited) + " audit points covered";
}

std::string cube_sandwich(const AcceptanceOptions& options, Checker& c)
{
    double worst_ratio_margin = 0.0;
    for (int n = 1; n <= 5; ++n) {
        const ConvexBody u = ConvexBody::cube(n, 1.0);
        for (int r = 1; r <= 10; ++r) {
            const ConvexBody v = ConvexBody::cube(n, r);
            const double up = tiling_cover(u, v, tiling_options(u, options)).bound_value;
            const double lo = lattice_lower_bound(integer_lattice(n), u, v, lattice_options(options)).value;
            const std::string at = "n=" + std::to_string(n) + " r=" + std::to_string(r);
            c.require(std::abs(up - std::pow(2.0 + 1.0 / r, n)) <= 1e-9, at + ": upper " + fmt(up));
            c.require(std::abs(lo - std::pow(2.0 - 1.0 / r, n)) <= 1e-9, at + ": lower " + fmt(lo));
            c.require(lo <= up + 1e-9, at + ": sandwich inverted");
        }
        const ConvexBody v = ConvexBody::cube(n, 100.0);
        const double up = tiling_cover(u, v, tiling_options(u, options)).bound_value;
        const double lo = lattice_lower_bound(integer_lattice(n), u, v, lattice_options(options)).value;
        const double limit = std::pow(1.0 + 1.0 / 50.0, n);
        worst_ratio_margin = std::max(worst_ratio_margin, (up / lo) / limit);
        c.require(up / lo <= limit, "n=" + std::to_string(n) + " r=100: upper/lower " + fmt(up / lo));
        c.require(lo <= std::pow(2.0, n) && std::pow(2.0, n) <= up, "n=" + std::to_string(n) + " r=100: 2^n outside");
    }
    return "worst (upper/lower)/(1+1/50)^n at r=100: " + fmt(worst_ratio_margin, 6);
}

std::string witness_containment(const AcceptanceOptions& options, Checker& c)
{
    const int per_config = std::max(1, static_cast<int>(std::lround(500 * options.witness_fraction)));
    std::uint64_t evaluated = 0;
    double closest = -std::numeric_limits<double>::infinity();
    std::uint64_t stream = 0;
    for (int n = 1; n <= 3; ++n) {
        for (const bool ball : {true, false}) {
            const ConvexBody u = ball ? ConvexBody::ball(n, 1.0) : ConvexBody::cube(n, 1.0);
            for (const double r : {1.0, 2.0, 4.0}) {
                const ConvexBody v = scale(u, r);
                UpperBoundOptions uo;
                uo.tiling = tiling_options(u, options);
                const BoundEntry best = best_upper(u, v, uo);
                const std::string at = std::string(ball ? "ball" : "cube") + " n=" + std::to_string(n) + " r=" + fmt(r, 3);
                c.require(best.certified, at + ": best upper bound is not certified");
                auto check = [&](const RatioEstimate& q, const std::string& label) {
                    ++evaluated;
                    closest = std::max(closest, q.lower() - best.value);
                    c.require(q.lower() <= best.value + 1e-6,
                              at + " " + label + ": witness " + fmt(q.lower()) + " > upper " + fmt(best.value));
                };
                check(ratio(WitnessFunction::autocorrelation(u), u, v), "autocorrelation(U)");
                check(ratio(WitnessFunction::autocorrelation(scale(u, 0.5)), u, v), "autocorrelation(U/2)");
                Engine rng = make_engine(options.seed, 0xACCE55 + stream++);
                for (int i = 0; i < per_config; ++i) {
                    const int terms = 1 + static_cast<int>(uniform01(rng) * 12.0);
                    // Frequency scales spread log-uniformly over two decades around 2/diam(U).
                    const double freq_scale = (2.0 / diameter(u)) * std::pow(10.0, uniform(rng, -1.0, 1.0));
                    const auto f = sample_double_pd(n, terms, freq_scale, rng());
                    check(ratio(f, u, v), "random #" + std::to_string(i));
                }
            }
        }
    }
    return std::to_string(evaluated) + " witnesses, max(witness - upper) = " + fmt(closest, 6);
}

std::string lattice_convergence(const AcceptanceOptions& options, Checker& c)
{
    (void)options;
    const ConvexBody u = ConvexBody::cube(1, 1.0);
    const ConvexBody v = ConvexBody::cube(1, 2.0);
    const std::int64_t numerators[] = {61, 121, 241, 481};
    const std::int64_t denominators[] = {42, 82, 162, 322};
    const double radii[] = {10.0, 20.0, 40.0, 80.0};
    double previous = 0.0;
    std::ostringstream values;
    for (int i = 0; i < 4; ++i) {
        const auto lw = lattice_witness(integer_lattice(1), u, v, radii[i]);
        const std::string at = "R=" + fmt(radii[i], 3);
        // value = (|U|/|V|) W / N0 = W / (2 N0); compare as integers.
        const auto w = static_cast<std::int64_t>(lw.weighted_count);
        const auto n0 = static_cast<std::int64_t>(lw.base_count);
        c.require(w * denominators[i] == numerators[i] * 2 * n0,
                  at + ": got " + std::to_string(w) + "/" + std::to_string(2 * n0));
        c.require(lw.value > previous, at + ": not increasing");
        c.require(lw.value < 1.5 && 1.5 - lw.value <= 2.0 / radii[i], at + ": gap to 1.5 is " + fmt(1.5 - lw.value));
        previous = lw.value;
        values << (i ? ", " : "") << w << "/" << 2 * n0;
    }
    return "ratios " + values.str();
}

std::string hexagonal_asymptote(const AcceptanceOptions& options, Checker& c)
{
    const ConvexBody u = ConvexBody::ball(2, 1.0);
    const ConvexBody v = ConvexBody::ball(2, 50.0);
    const Lattice hex = normalize_to_packing(catalog_entry("A2", 2), u);
    const double density = packing_density(hex, scale(u, 0.5));
    const double target = 4.0 * std::numbers::pi / std::sqrt(12.0);
    c.require(std::abs(density - std::numbers::pi / std::sqrt(12.0)) <= 1e-9, "packing density " + fmt(density));
    const BoundEntry lower = lattice_lower_bound(hex, u, v, lattice_options(options));
    c.require(std::abs(lower.value - target) <= 0.05 * target, "lower bound " + fmt(lower.value));
    return "count " + std::to_string(lower.audit.at("interior_count").get<std::int64_t>()) + ", lower " +
           fmt(lower.value, 8) + " vs " + fmt(target, 8);
}

std::string zq_ceiling(const AcceptanceOptions& options, Checker& c)
{
    const double pi_sq = std::numbers::pi * std::numbers::pi;
    std::ostringstream out;
    for (const std::int64_t q : {128, 1024}) {
        const std::int64_t n = q / 8;
        const auto ex = zq_max_experiment(q, n, 10'000, options.seed);
        const std::string at = "q=" + std::to_string(q);
        c.require(ex.max_ratio <= pi_sq + 1e-9, at + ": max ratio " + fmt(ex.max_ratio));
        const double floor = static_cast<double>(2 * n + 1) / static_cast<double>(n + 1);
        c.require(ex.max_ratio >= floor, at + ": max ratio below constant witness");
        c.require(ex.symmetric, at + ": f(k) != f(q-k)");
        if (!std::isnan(ex.min_dft)) c.require(ex.min_dft >= -1e-9, at + ": negative DFT " + fmt(ex.min_dft));
        out << (q == 128 ? "" : ", ") << at << " max " << fmt(ex.max_ratio, 8) << " (" << ex.argmax << ")";
    }
    return out.str();
}

std::vector<BoundEntry> certified_bounds(const ConvexBody& u, const ConvexBody& v, const AcceptanceOptions& options)
{
    std::vector<BoundEntry> out;
    UpperBoundOptions uo;
    uo.tiling = tiling_options(u, options);
    for (auto& e : upper_bounds(u, v, uo)) {
        if (e.certified) out.push_back(std::move(e));
    }
    for (const auto& entry : catalog(u.dim())) {
        out.push_back(lattice_lower_bound(normalize_to_packing(entry, u), u, v, lattice_options(options)));
    }
    return out;
}

std::string homogeneity(const AcceptanceOptions& options, Checker& c)
{
    int compared = 0;
    for (int n = 1; n <= 3; ++n) {
        for (const bool ball : {true, false}) {
            const ConvexBody u = ball ? ConvexBody::ball(n, 1.0) : ConvexBody::cube(n, 1.0);
            for (const double r : {1.0, 2.0, 4.0}) {
                const ConvexBody v = scale(u, r);
                const std::string at = std::string(ball ? "ball" : "cube") + " n=" + std::to_string(n) + " r=" + fmt(r, 3);
                const auto base = certified_bounds(u, v, options);
                for (const double lambda : {0.5, 3.0}) {
                    const auto scaled = certified_bounds(scale(u, lambda), scale(v, lambda), options);
                    c.require(scaled.size() == base.size(), at + ": entry set changed under scaling");
                    for (std::size_t i = 0; i < std::min(base.size(), scaled.size()); ++i) {
                        ++compared;
                        const double a = base[i].value, b = scaled[i].value;
                        c.require(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)),
                                  at + " lambda=" + fmt(lambda, 3) + " " + std::string(to_string(base[i].method)) + ": " +
                                      fmt(a) + " vs " + fmt(b));
                    }
                }
                const Lattice lattice = normalize_to_packing(catalog(n).back(), u);
                const double l1 = lattice_lower_bound(lattice, u, v, lattice_options(options)).value;
                for (const double lambda : {1.0, 1.5, 2.0, 3.0}) {
                    const double ll = lattice_lower_bound(lattice, u, scale(v, lambda), lattice_options(options)).value;
                    c.require(ll >= std::pow(lambda, -n) * l1 - 1e-12 * l1,
                              at + " lambda=" + fmt(lambda, 3) + ": lattice bound fell by more than lambda^n");
                }
            }
        }
    }
    return std::to_string(compared) + " bound pairs compared";
}

std::string rogers_regression(const AcceptanceOptions& options, Checker& c)
{
    const ConvexBody u1 = ConvexBody::cube(1, 1.0);
    for (int r = 1; r <= 20; ++r) {
        const double value = rogers_bound(u1, ConvexBody::cube(1, r)).value;
        c.require(std::abs(value - 2.0 * (1.0 + 1.0 / r)) <= 1e-12, "n=1 r=" + std::to_string(r) + ": " + fmt(value));
    }
    const BoundEntry ball = rogers_bound(ConvexBody::ball(2, 1.0), ConvexBody::ball(2, 4.0));
    c.require(ball.certified && std::abs(ball.value - 66.58) <= 0.01, "n=2 ball r=4: " + fmt(ball.value));
    double worst = 0.0;
    for (int n = 1; n <= 4; ++n) {
        const ConvexBody u = ConvexBody::cube(n, 1.0);
        for (int r = 1; r <= 10; ++r) {
            const ConvexBody v = ConvexBody::cube(n, r);
            const double tiling = tiling_cover(u, v, tiling_options(u, options)).bound_value;
            const double rogers = rogers_bound(u, v).value;
            worst = std::max(worst, tiling / rogers);
            c.require(tiling < rogers, "cube n=" + std::to_string(n) + " r=" + std::to_string(r) + ": tiling " +
                                           fmt(tiling) + " >= rogers " + fmt(rogers));
        }
    }
    return "ball r=4 value " + fmt(ball.value, 10) + ", worst tiling/rogers " + fmt(worst, 4);
}

struct Criterion {
    const char* name;
    const char* statement;
    double limit;
    std::string (*run)(const AcceptanceOptions&, Checker&);
};

const Criterion kCriteria[kCriterionCount] = {
    {"1D sharp window", "2 - 1/r <= C_1(r) <= 2 + 1/r, r = 1..20", 1.0, one_d_window},
    {"cube sandwich", "(2 - 1/r)^n <= C_n(cube, r cube) <= (2 + 1/r)^n", 10.0, cube_sandwich},
    {"witness containment", "witness ratio - error <= certified upper bound", 120.0, witness_containment},
    {"lattice witness convergence", "1D lattice witness at R = 10..80 increases to 3/2", 1.0, lattice_convergence},
    {"hexagonal asymptote", "C_2(B_1, B_50) lattice bound near 4 pi / sqrt 12", 10.0, hexagonal_asymptote},
    {"Z_q ceiling", "sum_{k<=2n} f(k) <= pi^2 sum_{k<=n} f(k)", 60.0, zq_ceiling},
    {"homogeneity and monotonicity", "C(lU, lV) = C(U, V); C(U, lV) >= l^-n C(U, V)", 5.0, homogeneity},
    {"covering density regression", "2^n |V+U|/|V| theta(n); tiling beats it on cubes", 10.0, rogers_regression},
};

} // namespace

CriterionResult run_criterion(int id, const AcceptanceOptions& options)
{
    if (id < 1 || id > kCriterionCount) throw Error(ErrorCode::BadParameters, "criterion id must lie in 1..8");
    const Criterion& crit = kCriteria[id - 1];
    CriterionResult res;
    res.id = id;
    res.name = crit.name;
    res.statement = crit.statement;
    res.limit_seconds = crit.limit;
    Checker checker;
    const auto start = Clock::now();
    std::string extra;
    try {
        extra = crit.run(options, checker);
    } catch (const std::exception& e) {
        checker.require(false, std::string("exception: ") + e.what());
    }
    res.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    checker.require(res.seconds <= res.limit_seconds, "runtime " + fmt(res.seconds, 3) + " s over limit");
    res.passed = checker.failures == 0;
    res.detail = checker.summary(extra);
    return res;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options)
{
    std::vector<CriterionResult> out;
    for (int id = 1; id <= kCriterionCount; ++id) out.push_back(run_criterion(id, options));
    return out;
}

void print_results(std::ostream& out, const std::vector<CriterionResult>& results)
{
    for (const auto& r : results) {
        out << (r.passed ? "[PASS] " : "[FAIL] ") << r.id << "  " << std::left << std::setw(30) << r.name
            << std::setw(52) << r.statement << std::right << " (" << std::fixed << std::setprecision(2) << r.seconds
            << " s / " << std::setprecision(0) << r.limit_seconds << " s)  " << r.detail << '\n';
        out.unsetf(std::ios::floatfield);
        out << std::setprecision(6);
    }
}

} // namespace pdcert
