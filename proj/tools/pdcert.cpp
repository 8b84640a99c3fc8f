#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pdcert/acceptance.hpp"
#include "pdcert/covering.hpp"
#include "pdcert/literals.hpp"
#include "pdcert/report.hpp"
#include "pdcert/witness.hpp"
#include "pdcert/zq.hpp"

using namespace pdcert;

namespace {

enum Exit { kOk = 0, kFailure = 1, kParse = 2, kInconsistent = 3, kResourceCap = 4 };

struct Global {
    std::uint64_t seed = 1;
    double tol = 1e-10;
    std::string json_path;
    std::string csv_path;
};

void emit_json(const Global& g, const nlohmann::json& j)
{
    if (g.json_path.empty()) return;
    const std::string text = j.dump(2) + "\n";
    if (g.json_path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(g.json_path, std::ios::binary);
    if (!out) throw Error(ErrorCode::BadParameters, "cannot write " + g.json_path);
    out << text;
}

/// Human-readable text goes to stderr when stdout carries JSON.
std::ostream& text_stream(const Global& g)
{
    return g.json_path == "-" ? std::cerr : std::cout;
}

/// "a..b" (integers, inclusive), "a..b:step" or "x,y,z".
std::vector<double> parse_range(const std::string& text)
{
    std::vector<double> out;
    const auto dots = text.find("..");
    try {
        if (dots == std::string::npos) {
            std::stringstream ss(text);
            std::string item;
            while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
        } else {
            const double lo = std::stod(text.substr(0, dots));
            std::string rest = text.substr(dots + 2);
            double step = 1.0;
            if (const auto colon = rest.find(':'); colon != std::string::npos) {
                step = std::stod(rest.substr(colon + 1));
                rest = rest.substr(0, colon);
            }
            const double hi = std::stod(rest);
            if (!(step > 0.0) || hi < lo) throw std::invalid_argument("range");
            for (int i = 0; lo + i * step <= hi + 1e-12 * std::abs(hi); ++i) out.push_back(lo + i * step);
        }
    } catch (const std::logic_error&) {
        throw ParseError(0, "bad range '" + text + "'");
    }
    if (out.empty() || out.size() > 100'000) throw ParseError(0, "bad range '" + text + "'");
    return out;
}

void print_report(std::ostream& out, const BoundReport& rep)
{
    out << "C_" << rep.dim << "(U, V) with U = " << rep.u << ", V = " << rep.v << "\n";
    for (const auto& e : rep.entries) {
        out << "  " << std::left << std::setw(6) << to_string(e.direction) << std::setw(16) << to_string(e.method)
            << std::right << std::setw(22) << std::setprecision(15) << e.value;
        if (e.error_bar > 0.0) out << " +- " << std::setprecision(2) << e.error_bar;
        out << (e.certified ? "  certified" : "  estimate") << "\n";
    }
    out << std::setprecision(15) << "  sandwich: [" << rep.best_lower << ", " << rep.best_upper << "]  (" << rep.lower_method
        << " / " << rep.upper_method << ")\n";
    if (rep.best_witness > 0.0) out << "  best witness: " << rep.best_witness << "\n";
    out << "  consistency: " << (rep.consistency ? "ok" : "VIOLATED") << "\n";
}

int run_bounds(const Global& g, int dim, const std::string& u_text, const std::string& v_text, int trials,
               bool witnesses, const std::string& certificate_path)
{
    const std::optional<int> d = dim > 0 ? std::optional<int>(dim) : std::nullopt;
    const ConvexBody u = parse_body(u_text, d);
    const ConvexBody v = parse_body(v_text, d ? d : std::optional<int>(u.dim()));
    BoundsOptions opts;
    opts.seed = g.seed;
    opts.tol = g.tol;
    opts.witness_trials = trials;
    opts.witnesses = witnesses;
    const BoundReport rep = bounds(u, v, opts);
    const nlohmann::json j = rep.to_json();

    // Certified entries must survive a round trip through their own audit.
    const auto failures = revalidate(BoundReport::from_json(j));
    print_report(text_stream(g), rep);
    for (const auto& f : failures) text_stream(g) << "  audit failure: " << f << "\n";
    emit_json(g, j);
    if (!certificate_path.empty()) {
        const auto cert = certificate_json(tiling_cover(u, v), u, v);
        std::ofstream out(certificate_path, std::ios::binary);
        if (!out) throw Error(ErrorCode::BadParameters, "cannot write " + certificate_path);
        out << cert.dump(2) << "\n";
    }
    return rep.consistency && failures.empty() ? kOk : kInconsistent;
}

int run_sweep(const Global& g, const std::string& dims_text, const std::string& radii_text, const std::string& kind,
              std::string dat_path, bool witnesses)
{
    std::vector<int> dims;
    for (double x : parse_range(dims_text)) {
        if (x != std::floor(x) || x < 1 || x > 64) throw ParseError(0, "dimensions must be integers in [1, 64]");
        dims.push_back(static_cast<int>(x));
    }
    const auto radii = parse_range(radii_text);
    SweepOptions opts;
    opts.kind = kind;
    opts.seed = g.seed;
    opts.tol = g.tol;
    opts.witnesses = witnesses;
    const auto rows = sweep(dims, radii, opts);

    if (g.csv_path == "-" && g.json_path == "-") throw Error(ErrorCode::BadParameters, "--csv and --json cannot both be stdout");
    if (g.csv_path == "-" || (g.csv_path.empty() && g.json_path != "-")) {
        write_sweep_csv(std::cout, rows);
    } else if (!g.csv_path.empty()) {
        std::ofstream out(g.csv_path, std::ios::binary);
        write_sweep_csv(out, rows);
        if (dat_path.empty()) {
            const auto dot = g.csv_path.rfind('.');
            dat_path = (dot == std::string::npos ? g.csv_path : g.csv_path.substr(0, dot)) + ".dat";
        }
    }
    if (!dat_path.empty()) {
        std::ofstream out(dat_path, std::ios::binary);
        write_sweep_dat(out, rows);
    }
    nlohmann::json j = nlohmann::json::array();
    bool consistent = true;
    for (const auto& r : rows) {
        auto num = [](double x) { return std::isnan(x) ? nlohmann::json(nullptr) : nlohmann::json(x); };
        j.push_back({{"n", r.n}, {"r", r.r}, {"lower_lattice", num(r.lower_lattice)}, {"upper_tiling", num(r.upper_tiling)},
                     {"upper_rogers", num(r.upper_rogers)}, {"witness_best", num(r.witness_best)},
                     {"ref_2n", r.ref_2n}, {"ref_2n_delta", num(r.ref_2n_delta)}});
        const double upper = std::isnan(r.upper_tiling) ? r.upper_rogers : std::min(r.upper_tiling, r.upper_rogers);
        if (!std::isnan(r.lower_lattice) && r.lower_lattice > upper + 1e-9) consistent = false;
        if (!std::isnan(r.witness_best) && r.witness_best > upper + 1e-6) consistent = false;
    }
    emit_json(g, {{"kind", kind}, {"rows", j}});
    return consistent ? kOk : kInconsistent;
}

int run_witness(const Global& g, int dim, const std::string& u_text, const std::string& v_text, const std::string& f_text)
{
    const std::optional<int> d = dim > 0 ? std::optional<int>(dim) : std::nullopt;
    const ConvexBody u = parse_body(u_text, d);
    const ConvexBody v = parse_body(v_text, u.dim());
    const WitnessFunction f = parse_witness(f_text, u.dim(), 2.0 / diameter(u));
    const RatioEstimate r = ratio(f, u, v, g.tol);
    UpperBoundOptions uo;
    uo.seed = g.seed;
    const BoundEntry upper = best_upper(u, v, uo);
    const bool contained = r.lower() <= upper.value + 1e-6;
    auto& out = text_stream(g);
    out << std::setprecision(15) << "ratio " << r.value << " +- " << std::setprecision(3) << r.abs_error << " ("
        << r.method << ", " << r.node_count << " nodes)\n"
        << std::setprecision(15) << "best upper " << upper.value << " (" << to_string(upper.method) << ")"
        << (contained ? "" : "  VIOLATION") << "\n";
    emit_json(g, {{"dim", u.dim()},
                  {"U", to_literal(u)},
                  {"V", to_literal(v)},
                  {"witness", f_text},
                  {"ratio", r.value},
                  {"abs_error", r.abs_error},
                  {"lower", r.lower()},
                  {"method", r.method},
                  {"nodes", r.node_count},
                  {"best_upper", upper.value},
                  {"best_upper_method", to_string(upper.method)},
                  {"contained", contained}});
    return contained ? kOk : kInconsistent;
}

int run_zq(const Global& g, std::int64_t q, std::int64_t n, std::int64_t trials)
{
    const auto ex = zq_max_experiment(q, n, trials, g.seed);
    const double pi_sq = std::numbers::pi * std::numbers::pi;
    text_stream(g) << std::setprecision(15) << "q=" << q << " n=" << n << " trials=" << trials << "  max ratio "
                   << ex.max_ratio << " (" << ex.argmax << ", digest " << ex.argmax_digest << ")  pi^2 margin "
                   << pi_sq - ex.max_ratio << "\n";
    emit_json(g, ex.to_json());
    return ex.max_ratio <= pi_sq + 1e-9 ? kOk : kInconsistent;
}

int run_verify(const Global& g, int criterion, double tamper_grid, std::int64_t tamper_count)
{
    AcceptanceOptions opts;
    opts.seed = g.seed;
    opts.grid_offset_fraction = tamper_grid;
    opts.lattice_count_bias = tamper_count;
    std::vector<CriterionResult> results;
    if (criterion > 0) results.push_back(run_criterion(criterion, opts));
    else results = run_acceptance(opts);
    print_results(text_stream(g), results);
    nlohmann::json j = nlohmann::json::array();
    bool all = true;
    for (const auto& r : results) {
        all = all && r.passed;
        j.push_back({{"id", r.id}, {"name", r.name}, {"statement", r.statement}, {"passed", r.passed},
                     {"seconds", r.seconds}, {"limit_seconds", r.limit_seconds}, {"detail", r.detail}});
    }
    emit_json(g, {{"criteria", j}, {"passed", all}});
    return all ? kOk : kInconsistent;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Certified bounds for the doubling constant of non-negative positive definite functions"};
    app.require_subcommand(1);
    Global g;
    app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
    app.add_option("--tol", g.tol, "Relative quadrature tolerance")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--json", g.json_path, "Write JSON output to this file ('-' for stdout)");
    app.add_option("--csv", g.csv_path, "Write CSV output to this file");

    int dim = 0;
    std::string u_text, v_text;
    int trials = 200;
    bool no_witnesses = false;
    std::string certificate_path;
    auto* bounds_cmd = app.add_subcommand("bounds", "Sandwich of lower and upper bounds for one (U, V) pair");
    bounds_cmd->fallthrough();
    bounds_cmd->add_option("--dim", dim, "Dimension")->check(CLI::Range(1, 64));
    bounds_cmd->add_option("--u", u_text, "Body literal for U")->required();
    bounds_cmd->add_option("--v", v_text, "Body literal for V")->required();
    bounds_cmd->add_option("--witness-trials", trials, "Random witnesses in the battery")->check(CLI::Range(0, 1'000'000));
    bounds_cmd->add_flag("--no-witnesses", no_witnesses, "Skip the witness battery");
    bounds_cmd->add_option("--certificate", certificate_path, "Write the covering certificate JSON here");

    std::string dims_text = "1..3", radii_text = "1..10", kind = "cube", dat_path;
    auto* sweep_cmd = app.add_subcommand("sweep", "Bounds over a grid of dimensions and radii");
    sweep_cmd->fallthrough();
    sweep_cmd->add_option("--dims", dims_text, "Dimensions, e.g. 1..3 or 2,4")->capture_default_str();
    sweep_cmd->add_option("--r", radii_text, "Radii, e.g. 1..10, 5..50:5 or 2,4,8")->capture_default_str();
    sweep_cmd->add_option("--kind", kind, "Body family")->check(CLI::IsMember({"cube", "ball", "cross"}))->capture_default_str();
    sweep_cmd->add_option("--dat", dat_path, "Plot data file (default: next to the CSV)");
    sweep_cmd->add_flag("--no-witnesses", no_witnesses, "Skip the witness column");

    std::string f_text;
    auto* witness_cmd = app.add_subcommand("witness", "Doubling ratio of one witness function");
    witness_cmd->fallthrough();
    witness_cmd->add_option("--dim", dim, "Dimension")->check(CLI::Range(1, 64));
    witness_cmd->add_option("--u", u_text, "Body literal for U")->required();
    witness_cmd->add_option("--v", v_text, "Body literal for V")->required();
    witness_cmd->add_option("--f", f_text, "Witness literal: gauss:s, autocorr:<body>, cms:..., latdir:...")->required();

    std::int64_t q = 128, n = 16, zq_trials = 10'000;
    auto* oracle_cmd = app.add_subcommand("oracle", "Discrete experiments");
    oracle_cmd->require_subcommand(1);
    auto* zq_cmd = oracle_cmd->add_subcommand("zq", "Random positive definite functions on Z_q");
    zq_cmd->fallthrough();
    oracle_cmd->fallthrough();
    zq_cmd->add_option("--q", q, "Modulus")->check(CLI::Range(std::int64_t{2}, std::int64_t{65536}))->capture_default_str();
    zq_cmd->add_option("--n", n, "Window, 2n < q")->check(CLI::NonNegativeNumber)->capture_default_str();
    zq_cmd->add_option("--trials", zq_trials, "Random witnesses")->check(CLI::Range(std::int64_t{1}, std::int64_t{100'000'000}))->capture_default_str();

    int criterion = 0;
    double tamper_grid = 0.0;
    std::int64_t tamper_count = 0;
    auto* verify_cmd = app.add_subcommand("verify", "Run the acceptance checks");
    verify_cmd->fallthrough();
    verify_cmd->add_option("--criterion", criterion, "Run only this check (1..8)")->check(CLI::Range(1, kCriterionCount));
    verify_cmd->add_option("--tamper-grid", tamper_grid, "Offset the tiling grid by this fraction of a cell");
    verify_cmd->add_option("--tamper-count", tamper_count, "Add this to every lattice interior count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kParse;
    }

    try {
        if (*bounds_cmd) return run_bounds(g, dim, u_text, v_text, trials, !no_witnesses, certificate_path);
        if (*sweep_cmd) return run_sweep(g, dims_text, radii_text, kind, dat_path, !no_witnesses);
        if (*witness_cmd) return run_witness(g, dim, u_text, v_text, f_text);
        if (*zq_cmd) return run_zq(g, q, n, zq_trials);
        if (*verify_cmd) return run_verify(g, criterion, tamper_grid, tamper_count);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kParse;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        if (e.code() == ErrorCode::ResourceCap) return kResourceCap;
        if (e.code() == ErrorCode::BadParameters || e.code() == ErrorCode::DimensionMismatch) return kParse;
        return kFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kFailure;
}
