#include "pdcert/report.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "pdcert/literals.hpp"
#include "pdcert/random.hpp"
#include "pdcert/witness.hpp"

namespace pdcert {

namespace {

constexpr double kSandwichSlack = 1e-9;
constexpr double kWitnessSlack = 1e-6;
constexpr int kRandomTerms = 8;

bool recoverable(const Error& e)
{
    switch (e.code()) {
    case ErrorCode::UnsupportedKind:
    case ErrorCode::UnsupportedMembership:
    case ErrorCode::UnsupportedExactVolume:
    case ErrorCode::ResourceCap:
    case ErrorCode::QuadratureFailure:
    case ErrorCode::NotAPacking:
    case ErrorCode::DimensionTooLarge:
        return true;
    default:
        return false;
    }
}

BoundEntry witness_entry(const RatioEstimate& r, Method method, nlohmann::json audit)
{
    BoundEntry e;
    e.value = r.value;
    e.error_bar = r.abs_error;
    e.direction = Direction::Lower;
    e.method = method;
    e.certified = false;
    audit["quadrature"] = r.method;
    audit["nodes"] = r.node_count;
    e.audit = std::move(audit);
    return e;
}

std::optional<RatioEstimate> gaussian_optimum(const ConvexBody& u, const ConvexBody& v, double tol, double* sigma,
                                              int* evaluations)
{
    const double d = diameter(u);
    const int n = u.dim();
    const auto best = optimize_family([n](double t) { return WitnessFunction::gaussian(n, std::exp(t)); }, u, v,
                                      std::log(1e-2 * d), std::log(1e2 * d), tol);
    if (sigma) *sigma = std::exp(best.best_param);
    if (evaluations) *evaluations = best.evaluations;
    return best.best_ratio;
}

double tiling_value(const BoundEntry& e)
{
    return static_cast<double>(e.audit.at("translate_count").get<std::uint64_t>()) * e.audit.at("volume_U").get<double>() /
           e.audit.at("volume_V").get<double>();
}

bool close(double a, double b)
{
    return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

/// 10 circumradius(V), reduced until (interior points) x (lines of Λ_R) fits the budget.
double lattice_witness_radius(const Lattice& lattice, const ConvexBody& v, std::uint64_t budget)
{
    const int n = v.dim();
    const double circ = circumradius(v);
    const double interior = std::max(1.0, volume(v) / lattice.determinant());
    const double line_cap = static_cast<double>(budget) / interior;
    // Λ_R has about |Λ_R|^{(n-1)/n} lines; the point count itself is capped for memory.
    const double base_cap = n == 1 ? 1e6 : std::min(1e6, std::pow(line_cap, static_cast<double>(n) / (n - 1)));
    double radius = 10.0 * circ;
    if (unit_ball_volume(n) * std::pow(radius, n) / lattice.determinant() > base_cap) {
        radius = std::pow(base_cap * lattice.determinant() / unit_ball_volume(n), 1.0 / n);
    }
    if (radius < circ) {
        // The smallest admissible R is still worth running at up to four times the budget.
        const double base = unit_ball_volume(n) * std::pow(circ, n) / lattice.determinant();
        const double lines = n == 1 ? 1.0 : std::pow(base, static_cast<double>(n - 1) / n);
        if (interior * lines > 4.0 * static_cast<double>(budget) || base > 4e6) {
            throw Error(ErrorCode::ResourceCap, "lattice witness budget leaves R below circumradius of V");
        }
        radius = circ;
    }
    return radius;
}

ConvexBody unit_body(const std::string& kind, int n)
{
    if (kind == "cube") return ConvexBody::cube(n, 1.0);
    if (kind == "ball") return ConvexBody::ball(n, 1.0);
    if (kind == "cross") return ConvexBody::cross_polytope(n, 1.0);
    throw Error(ErrorCode::BadParameters, "sweep kind must be cube, ball or cross");
}

} // namespace

std::vector<LatticeChoice> lattice_bounds(const ConvexBody& u, const ConvexBody& v, const LatticeBoundOptions& options,
                                          std::vector<std::string>* notes)
{
    std::vector<LatticeChoice> out;
    if (u.dim() > kMaxLatticeDimension) {
        if (notes) notes->push_back("lattice bounds skipped: dimension above " + std::to_string(kMaxLatticeDimension));
        return out;
    }
    for (const auto& entry : catalog(u.dim())) {
        try {
            Lattice lattice = normalize_to_packing(entry, u);
            BoundEntry e = lattice_lower_bound(lattice, u, v, options);
            e.audit["catalog"] = entry.name;
            e.audit["packing_density_H"] = packing_density(lattice, scale(u, 0.5));
            out.push_back({std::move(lattice), std::move(e)});
        } catch (const Error& err) {
            if (!recoverable(err)) throw;
            if (notes) notes->push_back("lattice " + entry.name + " skipped: " + err.what());
        }
    }
    return out;
}

BoundReport bounds(const ConvexBody& u, const ConvexBody& v, const BoundsOptions& options)
{
    if (u.dim() != v.dim()) throw Error(ErrorCode::DimensionMismatch, "U and V dimensions differ");
    const int n = u.dim();
    BoundReport rep;
    rep.dim = n;
    rep.u = to_literal(u);
    rep.v = to_literal(v);

    UpperBoundOptions uo;
    uo.tiling = options.tiling;
    uo.seed = options.seed;
    for (auto& e : upper_bounds(u, v, uo)) rep.entries.push_back(std::move(e));

    const auto lattices = lattice_bounds(u, v, options.lattice, &rep.commentary);
    for (const auto& c : lattices) rep.entries.push_back(c.entry);

    rep.best_upper = std::numeric_limits<double>::infinity();
    rep.upper_method = "none";
    rep.lower_method = "none";
    const bool any_certified_upper = std::any_of(rep.entries.begin(), rep.entries.end(), [](const BoundEntry& e) {
        return e.direction == Direction::Upper && e.certified;
    });
    for (const auto& e : rep.entries) {
        if (e.direction == Direction::Upper && (e.certified || !any_certified_upper)) {
            if (e.value < rep.best_upper || (e.value == rep.best_upper && e.method == Method::TilingCover)) {
                rep.best_upper = e.value;
                rep.upper_method = std::string(to_string(e.method));
            }
        }
        if (e.direction == Direction::Lower && e.certified && e.value > rep.best_lower) {
            rep.best_lower = e.value;
            rep.lower_method = std::string(to_string(e.method));
        }
    }
    if (!any_certified_upper) rep.commentary.push_back("no certified upper bound; the sandwich uses an estimate");

    if (options.witnesses) {
        std::vector<BoundEntry> witnesses;
        auto attempt = [&](const std::string& label, auto&& body) {
            try {
                body();
            } catch (const Error& err) {
                if (!recoverable(err)) throw;
                rep.commentary.push_back(label + " witness skipped: " + err.what());
            }
        };
        attempt("autocorrelation(U)", [&] {
            const auto r = ratio(WitnessFunction::autocorrelation(u), u, v, options.tol);
            witnesses.push_back(witness_entry(r, Method::WitnessFamily,
                                              {{"family", "autocorrelation"}, {"body", to_literal(u)}}));
        });
        attempt("autocorrelation(U/2)", [&] {
            const ConvexBody h = scale(u, 0.5);
            const auto r = ratio(WitnessFunction::autocorrelation(h), u, v, options.tol);
            witnesses.push_back(witness_entry(r, Method::WitnessFamily,
                                              {{"family", "autocorrelation"}, {"body", to_literal(h)}}));
        });
        attempt("gaussian", [&] {
            double sigma = 0.0;
            int evaluations = 0;
            const auto r = gaussian_optimum(u, v, options.tol, &sigma, &evaluations);
            witnesses.push_back(witness_entry(*r, Method::WitnessFamily,
                                              {{"family", "gaussian"}, {"sigma", sigma}, {"evaluations", evaluations}}));
        });

        const double freq_scale = 2.0 / diameter(u);
        std::optional<RatioEstimate> best_random;
        std::int64_t best_trial = -1;
        int skipped = 0;
        for (int i = 0; i < options.witness_trials; ++i) {
            try {
                const auto f = sample_double_pd(n, kRandomTerms, freq_scale, mix_seed(options.seed, static_cast<std::uint64_t>(i)));
                const auto r = ratio(f, u, v, options.tol);
                if (r.lower() > rep.best_upper + kWitnessSlack) ++rep.witness_violations;
                if (!best_random || r.lower() > best_random->lower()) {
                    best_random = r;
                    best_trial = i;
                }
            } catch (const Error& err) {
                if (!recoverable(err)) throw;
                ++skipped;
            }
        }
        if (best_random) {
            witnesses.push_back(witness_entry(*best_random, Method::WitnessRandom,
                                              {{"trials", options.witness_trials},
                                               {"best_trial", best_trial},
                                               {"terms", kRandomTerms},
                                               {"freq_scale", freq_scale},
                                               {"seed", options.seed},
                                               {"skipped", skipped}}));
        }

        if (!lattices.empty()) {
            const auto best = std::max_element(lattices.begin(), lattices.end(), [](const auto& a, const auto& b) {
                return a.entry.value < b.entry.value;
            });
            attempt("lattice", [&] {
                const Lattice& lattice = best->lattice;
                const double radius = lattice_witness_radius(lattice, v, options.lattice_witness_budget);
                const auto lw = lattice_witness(lattice, u, v, radius);
                BoundEntry e;
                e.value = lw.value;
                e.error_bar = 8.0 * std::numeric_limits<double>::epsilon() * lw.value;
                e.direction = Direction::Lower;
                e.method = Method::LatticeWitness;
                e.certified = false;
                e.audit = {{"lattice", lattice_to_json(lattice)},
                           {"catalog", best->entry.audit.at("catalog")},
                           {"R", radius},
                           {"shrink", 1e-9},
                           {"weighted_count", lw.weighted_count},
                           {"base_count", lw.base_count},
                           {"interior_points", lw.interior_points}};
                witnesses.push_back(std::move(e));
            });
        }

        for (auto& w : witnesses) {
            // Random trials were already checked one by one above.
            if (w.method != Method::WitnessRandom && w.usable_value() > rep.best_upper + kWitnessSlack) {
                ++rep.witness_violations;
            }
            rep.best_witness = std::max(rep.best_witness, w.usable_value());
            rep.entries.push_back(std::move(w));
        }
    }

    rep.consistency = rep.best_lower <= rep.best_upper + kSandwichSlack && rep.witness_violations == 0;
    rep.commentary.push_back("certified lower bounds come from concrete catalog lattices; "
                             "existence-only packing constants are not evaluated");
    rep.commentary.push_back("quoted for reference, not computed: \"c_{n}>65963n\" (normalization of the constant is unclear)");
    rep.commentary.push_back("witness values are empirical lower bounds reported as value minus error bar");
    if (!rep.consistency) rep.commentary.push_back("CONSISTENCY VIOLATION: a lower bound exceeds the best upper bound");
    return rep;
}

nlohmann::json BoundReport::to_json() const
{
    return {
        {"dim", dim},
        {"U", u},
        {"V", v},
        {"entries", entries},
        {"sandwich", {{"lower", best_lower}, {"upper", best_upper}, {"lower_method", lower_method}, {"upper_method", upper_method}}},
        {"best_witness", best_witness},
        {"witness_violations", witness_violations},
        {"consistency", consistency},
        {"commentary", commentary},
    };
}

BoundReport BoundReport::from_json(const nlohmann::json& j)
{
    BoundReport r;
    r.dim = j.at("dim").get<int>();
    r.u = j.at("U").get<std::string>();
    r.v = j.at("V").get<std::string>();
    r.entries = j.at("entries").get<std::vector<BoundEntry>>();
    const auto& s = j.at("sandwich");
    r.best_lower = s.at("lower").get<double>();
    r.best_upper = s.at("upper").get<double>();
    r.lower_method = s.at("lower_method").get<std::string>();
    r.upper_method = s.at("upper_method").get<std::string>();
    r.best_witness = j.value("best_witness", 0.0);
    r.witness_violations = j.value("witness_violations", std::uint64_t{0});
    r.consistency = j.at("consistency").get<bool>();
    r.commentary = j.value("commentary", std::vector<std::string>{});
    return r;
}

std::vector<std::string> revalidate(const BoundReport& report)
{
    std::vector<std::string> failures;
    const ConvexBody u = parse_body(report.u, report.dim);
    const ConvexBody v = parse_body(report.v, report.dim);
    for (std::size_t i = 0; i < report.entries.size(); ++i) {
        const BoundEntry& e = report.entries[i];
        if (!e.certified) continue;
        const std::string tag = "entry " + std::to_string(i) + " (" + std::string(to_string(e.method)) + "): ";
        try {
            switch (e.method) {
            case Method::Subset: {
                if (!close(subset_bound(u, v).value, e.value)) failures.push_back(tag + "value differs");
                break;
            }
            case Method::TilingCover: {
                TilingOptions opts;
                const auto offset = e.audit.at("grid_offset").get<std::vector<double>>();
                if (!offset.empty()) opts.grid_offset = Eigen::Map<const Eigen::VectorXd>(offset.data(), static_cast<Eigen::Index>(offset.size()));
                const auto cert = tiling_cover(u, v, opts);
                if (cert.translate_count != e.audit.at("translate_count").get<std::uint64_t>()) {
                    failures.push_back(tag + "translate count differs");
                }
                if (!close(cert.bound_value, e.value) || !close(tiling_value(e), e.value)) failures.push_back(tag + "value differs");
                break;
            }
            case Method::RogersFormula: {
                if (!close(rogers_bound(u, v).value, e.value)) failures.push_back(tag + "value differs");
                break;
            }
            case Method::Chain: {
                const BoundEntry base = e.audit.at("base").get<BoundEntry>();
                const double lambda = e.audit.at("lambda").get<double>();
                const double r = e.audit.at("r").get<double>();
                const auto cert = tiling_cover(u, scale(u, lambda));
                if (!close(cert.bound_value, base.value)) failures.push_back(tag + "base value differs");
                if (!close(chain_bound(base, lambda, r).value, e.value)) failures.push_back(tag + "value differs");
                break;
            }
            case Method::Lattice: {
                const Lattice lattice = lattice_from_json(e.audit.at("lattice"));
                if (!check_packing(lattice, u)) failures.push_back(tag + "lattice does not pack U/2");
                const auto count = count_points(lattice, v, true);
                if (count != e.audit.at("interior_count").get<std::uint64_t>()) failures.push_back(tag + "interior count differs");
                if (!close(static_cast<double>(count) * volume(u) / volume(v), e.value)) failures.push_back(tag + "value differs");
                break;
            }
            default:
                failures.push_back(tag + "witness entries cannot be certified");
            }
        } catch (const std::exception& ex) {
            failures.push_back(tag + ex.what());
        }
    }
    return failures;
}

std::vector<SweepRow> sweep(const std::vector<int>& dims, const std::vector<double>& radii, const SweepOptions& options)
{
    struct Cell {
        int n;
        double r;
    };
    std::vector<Cell> cells;
    for (int n : dims) {
        for (double r : radii) cells.push_back({n, r});
    }
    std::vector<SweepRow> rows(cells.size());
    std::vector<std::exception_ptr> errors(cells.size());
    std::atomic<std::size_t> next{0};

    auto work = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            try {
                const auto [n, r] = cells[i];
                const ConvexBody u = unit_body(options.kind, n);
                const ConvexBody v = scale(u, r);
                const double nan = std::numeric_limits<double>::quiet_NaN();
                SweepRow row;
                row.n = n;
                row.r = r;
                row.ref_2n = std::pow(2.0, n);
                row.lower_lattice = nan;
                row.ref_2n_delta = nan;
                double best_density = 0.0;
                const auto choices = lattice_bounds(u, v, {});
                std::size_t best_choice = 0;
                for (std::size_t c = 0; c < choices.size(); ++c) {
                    const auto& e = choices[c].entry;
                    if (std::isnan(row.lower_lattice) || e.value > row.lower_lattice) {
                        row.lower_lattice = e.value;
                        best_choice = c;
                    }
                    best_density = std::max(best_density, e.audit.at("packing_density_H").get<double>());
                }
                if (best_density > 0.0) row.ref_2n_delta = row.ref_2n * best_density;
                try {
                    row.upper_tiling = tiling_cover(u, v).bound_value;
                } catch (const Error& e) {
                    if (!recoverable(e)) throw;
                    row.upper_tiling = nan;
                }
                row.upper_rogers = rogers_bound(u, v, options.seed).value;
                row.witness_best = nan;
                if (options.witnesses) {
                    double best = -std::numeric_limits<double>::infinity();
                    try {
                        best = std::max(best, ratio(WitnessFunction::autocorrelation(scale(u, 0.5)), u, v, options.tol).lower());
                    } catch (const Error& e) {
                        if (!recoverable(e)) throw;
                    }
                    try {
                        best = std::max(best, gaussian_optimum(u, v, options.tol, nullptr, nullptr)->lower());
                    } catch (const Error& e) {
                        if (!recoverable(e)) throw;
                    }
                    if (!choices.empty()) {
                        try {
                            const Lattice& lattice = choices[best_choice].lattice;
                            const double radius = lattice_witness_radius(lattice, v, options.lattice_witness_budget);
                            const double w = lattice_witness_ratio(lattice, u, v, radius);
                            best = std::max(best, w - 8.0 * std::numeric_limits<double>::epsilon() * w);
                        } catch (const Error& e) {
                            if (!recoverable(e)) throw;
                        }
                    }
                    if (std::isfinite(best)) row.witness_best = best;
                }
                rows[i] = row;
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned workers = std::max(1U, std::min<unsigned>(std::thread::hardware_concurrency(), static_cast<unsigned>(cells.size())));
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return rows;
}

namespace {

void write_row(std::ostream& out, const SweepRow& row, char sep)
{
    const double values[] = {row.lower_lattice, row.upper_tiling, row.upper_rogers,
                             row.witness_best,  row.ref_2n,       row.ref_2n_delta};
    out << row.n << sep << format_number(row.r);
    for (double x : values) out << sep << (std::isnan(x) ? std::string("nan") : format_number(x));
    out << '\n';
}

} // namespace

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows)
{
    out << "n,r,lower_lattice,upper_tiling,upper_rogers,witness_best,ref_2n,ref_2n_delta\n";
    for (const auto& row : rows) write_row(out, row, ',');
}

void write_sweep_dat(std::ostream& out, const std::vector<SweepRow>& rows)
{
    out << "# n r lower_lattice upper_tiling upper_rogers witness_best ref_2n ref_2n_delta\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i > 0 && rows[i].n != rows[i - 1].n) out << "\n\n";
        write_row(out, rows[i], ' ');
    }
}

} // namespace pdcert
