#include "pdcert/covering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pdcert/literals.hpp"
#include "pdcert/random.hpp"

namespace pdcert {

namespace {

bool lex_less(const Coeffs& a, const Coeffs& b)
{
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

/// Exact grid centre offset_i + 2 h_i k_i in the requested scalar.
template <typename Scalar>
Vec<Scalar> grid_point(const Eigen::VectorXd& offset, const Eigen::VectorXd& h, const Coeffs& k)
{
    Vec<Scalar> a(k.size());
    for (Eigen::Index i = 0; i < k.size(); ++i) {
        a(i) = Scalar(offset(i)) + Scalar(2.0 * h(i)) * Scalar(static_cast<double>(k(i)));
    }
    return a;
}

int grid_membership(const ConvexBody& region, const Eigen::VectorXd& offset, const Eigen::VectorXd& h,
                    const Coeffs& k)
{
    const Eigen::VectorXd approx = grid_point<double>(offset, h, k);
    return certified_membership(
        region, [&](auto tag) { return grid_point<decltype(tag)>(offset, h, k); }, approx.lpNorm<1>() + 1.0);
}

struct CellRule {
    ConvexBody region;
    CellTest test;
};

/// Region R such that a grid centre a is kept iff a ∈ int R (open test) or a ∈ R (dilation test).
CellRule cell_rule(const ConvexBody& k, const ConvexBody& cell)
{
    try {
        ConvexBody expanded = minkowski_sum(k, cell);
        if (has_exact_membership(expanded)) return {expanded, CellTest::OpenIntersection};
    } catch (const Error& e) {
        if (e.code() != ErrorCode::UnsupportedKind) throw;
    }
    double rho = cell.as<Box>().half_widths.norm();
    const Rational h2 = cell.as<Box>().half_widths.cast<Rational>().squaredNorm();
    while (Rational(rho) * Rational(rho) < h2) rho = std::nextafter(rho, std::numeric_limits<double>::infinity());
    ConvexBody dilated = minkowski_sum(k, ConvexBody::ball(k.dim(), rho));
    if (!has_exact_membership(dilated)) {
        throw Error(ErrorCode::UnsupportedMembership, "no exact cell test for K = V + U/2");
    }
    return {dilated, CellTest::BallDilation};
}

/// Kept indices along one axis when the rule region is a box: |o + 2 h k| < b.
std::pair<std::int64_t, std::int64_t> axis_range(double offset, double h, double b)
{
    const Rational o(offset), step(2.0 * h), bound(b);
    auto kept = [&](std::int64_t k) {
        return magnitude<Rational>(Rational(o + step * Rational(static_cast<double>(k)))) < bound;
    };
    const double approx = -offset / (2.0 * h);
    auto lo = static_cast<std::int64_t>(std::floor(approx));
    auto hi = lo;
    while (!kept(lo) && !kept(hi)) {
        // The centre nearest the origin is always inside for a 0-symmetric K.
        --lo;
        ++hi;
    }
    if (!kept(lo)) lo = hi;
    if (!kept(hi)) hi = lo;
    while (kept(lo - 1)) --lo;
    while (kept(hi + 1)) ++hi;
    return {lo, hi};
}

} // namespace

Eigen::VectorXd CoveringCertificate::centre(const Coeffs& index) const
{
    return grid_point<double>(grid_offset, cell.as<Box>().half_widths, index);
}

bool CoveringCertificate::contains_index(const Coeffs& index) const
{
    if (product_form()) {
        for (Eigen::Index i = 0; i < index.size(); ++i) {
            const auto [lo, hi] = axis_ranges[static_cast<std::size_t>(i)];
            if (index(i) < lo || index(i) > hi) return false;
        }
        return true;
    }
    return std::binary_search(cells.begin(), cells.end(), index, lex_less);
}

std::vector<Eigen::VectorXd> CoveringCertificate::translates(std::uint64_t cap) const
{
    if (translate_count > cap) {
        throw Error(ErrorCode::ResourceCap,
                    "certificate has " + std::to_string(translate_count) + " translates, cap is " + std::to_string(cap));
    }
    std::vector<Eigen::VectorXd> out;
    out.reserve(static_cast<std::size_t>(translate_count));
    if (!product_form()) {
        for (const auto& c : cells) out.push_back(centre(c));
        return out;
    }
    const auto n = static_cast<Eigen::Index>(axis_ranges.size());
    Coeffs k(n);
    for (Eigen::Index i = 0; i < n; ++i) k(i) = axis_ranges[static_cast<std::size_t>(i)].first;
    while (true) {
        out.push_back(centre(k));
        Eigen::Index i = n - 1;
        for (; i >= 0; --i) {
            if (k(i) < axis_ranges[static_cast<std::size_t>(i)].second) {
                ++k(i);
                break;
            }
            k(i) = axis_ranges[static_cast<std::size_t>(i)].first;
        }
        if (i < 0) break;
    }
    return out;
}

CoveringCertificate tiling_cover(const ConvexBody& u, const ConvexBody& v, const TilingOptions& options)
{
    if (u.dim() != v.dim()) throw Error(ErrorCode::DimensionMismatch, "U and V dimensions differ");
    const int n = u.dim();
    const ConvexBody h = scale(u, 0.5);
    const ConvexBody cell = inscribed_box(h);
    const ConvexBody k = minkowski_sum(v, h);
    const Eigen::VectorXd& hw = cell.as<Box>().half_widths;

    CoveringCertificate cert{h, k, cell, Eigen::VectorXd::Zero(n), CellTest::OpenIntersection, 0, {}, {}};
    if (options.grid_offset.size() == n) cert.grid_offset = options.grid_offset;
    cert.volume_u = volume(u);
    cert.volume_v = volume(v);

    const CellRule rule = cell_rule(k, cell);
    cert.test = rule.test;

    if (rule.test == CellTest::OpenIntersection && rule.region.is<Box>()) {
        const auto& b = rule.region.as<Box>().half_widths;
        cert.translate_count = 1;
        for (int i = 0; i < n; ++i) {
            cert.axis_ranges.push_back(axis_range(cert.grid_offset(i), hw(i), b(i)));
            const auto [lo, hi] = cert.axis_ranges.back();
            const auto width = static_cast<std::uint64_t>(hi - lo + 1);
            if (cert.translate_count > std::numeric_limits<std::uint64_t>::max() / width) {
                throw Error(ErrorCode::ResourceCap, "translate count overflows 64 bits");
            }
            cert.translate_count *= width;
        }
    } else {
        const Eigen::VectorXd b = bounding_half_widths(rule.region);
        Coeffs lo(n), hi(n);
        double candidates = 1.0;
        for (int i = 0; i < n; ++i) {
            lo(i) = static_cast<std::int64_t>(std::floor((-b(i) - cert.grid_offset(i)) / (2.0 * hw(i)))) - 1;
            hi(i) = static_cast<std::int64_t>(std::ceil((b(i) - cert.grid_offset(i)) / (2.0 * hw(i)))) + 1;
            candidates *= static_cast<double>(hi(i) - lo(i) + 1);
        }
        if (candidates > static_cast<double>(options.candidate_cap)) {
            throw Error(ErrorCode::ResourceCap, "tiling cover would examine " + std::to_string(candidates) +
                                                    " cells, cap is " + std::to_string(options.candidate_cap));
        }
        Coeffs idx = lo;
        const bool open = rule.test == CellTest::OpenIntersection;
        while (true) {
            const int s = grid_membership(rule.region, cert.grid_offset, hw, idx);
            if (open ? s > 0 : s >= 0) cert.cells.push_back(idx);
            Eigen::Index i = n - 1;
            for (; i >= 0; --i) {
                if (idx(i) < hi(i)) {
                    ++idx(i);
                    break;
                }
                idx(i) = lo(i);
            }
            if (i < 0) break;
        }
        // Odometer order is already lexicographic.
        cert.translate_count = cert.cells.size();
    }
    cert.bound_value = static_cast<double>(cert.translate_count) * cert.volume_u / cert.volume_v;
    cert.certified = true;
    return cert;
}

CoverageAudit audit_coverage(const CoveringCertificate& cert, std::size_t samples, std::uint64_t seed)
{
    CoverageAudit audit;
    if (!has_exact_membership(cert.k)) {
        audit.applicable = false;
        return audit;
    }
    const int n = cert.k.dim();
    const Eigen::VectorXd& hw = cert.cell.as<Box>().half_widths;
    const Eigen::VectorXd bb = bounding_half_widths(cert.k);
    Engine rng = make_engine(seed, 0xC0FFEE);
    Eigen::VectorXd p(n);
    auto in_cell = [&](const Coeffs& idx) {
        if (!cert.contains_index(idx)) return false;
        const Eigen::VectorXd c = cert.centre(idx);
        return ((p - c).array().abs() <= hw.array() * (1.0 + 1e-12)).all();
    };
    for (std::size_t s = 0; s < samples; ++s) {
        for (int i = 0; i < n; ++i) p(i) = uniform(rng, -bb(i), bb(i));
        ++audit.sampled;
        if (!contains(cert.k, p)) continue;
        ++audit.inside_k;
        Coeffs nearest(n);
        for (int i = 0; i < n; ++i) {
            nearest(i) = static_cast<std::int64_t>(std::llround((p(i) - cert.grid_offset(i)) / (2.0 * hw(i))));
        }
        bool covered = in_cell(nearest);
        if (!covered && n <= 8) {
            // Points on a cell face belong to both neighbours.
            const auto total = static_cast<std::int64_t>(std::pow(3, n));
            for (std::int64_t code = 0; code < total && !covered; ++code) {
                Coeffs probe = nearest;
                std::int64_t c = code;
                for (int i = 0; i < n; ++i, c /= 3) probe(i) += c % 3 - 1;
                covered = in_cell(probe);
            }
        }
        if (!covered) ++audit.uncovered;
    }
    return audit;
}

BoundEntry to_bound_entry(const CoveringCertificate& cert)
{
    BoundEntry e;
    e.value = cert.bound_value;
    e.direction = Direction::Upper;
    e.method = Method::TilingCover;
    e.certified = cert.certified;
    const Eigen::VectorXd& hw = cert.cell.as<Box>().half_widths;
    const double cell_volume = (2.0 * hw.array()).prod();
    e.audit = {
        {"translate_count", cert.translate_count},
        {"cell_half_widths", std::vector<double>(hw.data(), hw.data() + hw.size())},
        {"grid_offset", std::vector<double>(cert.grid_offset.data(), cert.grid_offset.data() + cert.grid_offset.size())},
        {"cell_test", cert.test == CellTest::OpenIntersection ? "open-intersection" : "ball-dilation"},
        {"volume_U", cert.volume_u},
        {"volume_V", cert.volume_v},
        {"K", to_literal(cert.k)},
    };
    if (has_exact_volume(cert.k)) {
        const double vol_k = volume(cert.k);
        e.audit["volumetric_lower_estimate"] = vol_k / cell_volume;
        // |X| |cell| / |K| over this one finite K; not an asymptotic covering density.
        e.audit["density_proxy"] = static_cast<double>(cert.translate_count) * cell_volume / vol_k;
        e.audit["density_proxy_kind"] = "finite-region diagnostic";
    }
    return e;
}

double rogers_theta(int n)
{
    if (n < 1) throw Error(ErrorCode::BadParameters, "dimension must be positive");
    if (n == 1) return 1.0;
    const double x = n;
    return x * std::log(x) + x * std::log(std::log(x)) + 5.0 * x;
}

BoundEntry rogers_bound(const ConvexBody& u, const ConvexBody& v, std::uint64_t seed)
{
    if (u.dim() != v.dim()) throw Error(ErrorCode::DimensionMismatch, "U and V dimensions differ");
    const int n = u.dim();
    BoundEntry e;
    e.direction = Direction::Upper;
    e.method = Method::RogersFormula;
    double vol_sum = 0.0;
    std::string source;
    std::optional<ConvexBody> sum;
    try {
        sum = minkowski_sum(v, u);
    } catch (const Error& err) {
        if (err.code() != ErrorCode::UnsupportedKind) throw;
    }
    if (sum && has_exact_volume(*sum)) {
        vol_sum = volume(*sum);
        e.certified = true;
        source = "exact";
    } else if (sum && has_exact_membership(*sum)) {
        const auto est = volume_estimate(*sum, 1'000'000, seed);
        vol_sum = est.upper_conf;
        e.certified = false;
        source = "monte-carlo-upper-99.9";
    } else {
        // V + U lies in the sum of the bounding boxes.
        vol_sum = (2.0 * (bounding_half_widths(u) + bounding_half_widths(v)).array()).prod();
        e.certified = true;
        source = "bounding-box";
    }
    const double vol_v = volume(v);
    const double theta = rogers_theta(n);
    e.value = std::pow(2.0, n) * vol_sum / vol_v * theta;
    e.audit = {{"volume_V_plus_U", vol_sum}, {"volume_source", source}, {"volume_V", vol_v}, {"theta", theta}};
    return e;
}

BoundEntry subset_bound(const ConvexBody& u, const ConvexBody& v)
{
    if (u.dim() != v.dim()) throw Error(ErrorCode::DimensionMismatch, "U and V dimensions differ");
    const auto inside = is_subset(v, u);
    if (!inside.value_or(false)) {
        throw Error(ErrorCode::NotComparable, "V ⊆ U could not be certified");
    }
    BoundEntry e;
    const double vol_u = volume(u);
    const double vol_v = volume(v);
    e.value = u == v ? 1.0 : vol_u / vol_v;
    e.direction = Direction::Upper;
    e.method = Method::Subset;
    e.certified = true;
    e.audit = {{"volume_U", vol_u}, {"volume_V", vol_v}};
    return e;
}

BoundEntry chain_bound(const BoundEntry& base, double lambda, double r)
{
    if (base.direction != Direction::Upper) {
        throw Error(ErrorCode::BadParameters, "chain bound needs an upper-bound base");
    }
    if (!(lambda > 1.0) || !(r >= lambda) || !std::isfinite(r)) {
        throw Error(ErrorCode::BadParameters, "chain bound needs r >= lambda > 1");
    }
    BoundEntry e;
    const double exponent = std::log(r) / std::log(lambda);
    e.value = r == lambda ? base.value : std::pow(base.value, exponent);
    e.direction = Direction::Upper;
    e.method = Method::Chain;
    e.certified = base.certified;
    e.audit = {{"base", base}, {"lambda", lambda}, {"r", r}, {"exponent", exponent}};
    return e;
}

std::optional<double> homothety_ratio(const ConvexBody& u, const ConvexBody& v)
{
    if (u.dim() != v.dim() || u.is_sum() || v.is_sum() || u.kind().index() != v.kind().index()) return std::nullopt;
    const double r = circumradius(v) / circumradius(u);
    if (scale(u, r) == v) return r;
    if (const auto* bu = std::get_if<Box>(&u.kind())) {
        const Eigen::ArrayXd ratios = v.as<Box>().half_widths.array() / bu->half_widths.array();
        if ((ratios - ratios(0)).abs().maxCoeff() <= 1e-15 * ratios(0)) return ratios(0);
    }
    return std::nullopt;
}

std::vector<BoundEntry> upper_bounds(const ConvexBody& u, const ConvexBody& v, const UpperBoundOptions& options)
{
    std::vector<BoundEntry> out;
    try {
        out.push_back(subset_bound(u, v));
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NotComparable) throw;
    }
    try {
        out.push_back(to_bound_entry(tiling_cover(u, v, options.tiling)));
    } catch (const Error& e) {
        if (e.code() != ErrorCode::UnsupportedKind && e.code() != ErrorCode::UnsupportedMembership &&
            e.code() != ErrorCode::ResourceCap) {
            throw;
        }
    }
    out.push_back(rogers_bound(u, v, options.seed));
    if (const auto r = homothety_ratio(u, v); r && *r > 2.0) {
        try {
            const BoundEntry base = to_bound_entry(tiling_cover(u, scale(u, 2.0), options.tiling));
            out.push_back(chain_bound(base, 2.0, *r));
        } catch (const Error& e) {
            if (e.code() != ErrorCode::ResourceCap && e.code() != ErrorCode::UnsupportedKind &&
                e.code() != ErrorCode::UnsupportedMembership) {
                throw;
            }
        }
    }
    return out;
}

BoundEntry best_upper(const ConvexBody& u, const ConvexBody& v, const UpperBoundOptions& options)
{
    const auto entries = upper_bounds(u, v, options);
    const bool any_certified = std::any_of(entries.begin(), entries.end(), [](const auto& e) { return e.certified; });
    const BoundEntry* best = nullptr;
    for (const auto& e : entries) {
        if (any_certified && !e.certified) continue;
        if (!best || e.value < best->value ||
            (e.value == best->value && e.method == Method::TilingCover)) {
            best = &e;
        }
    }
    return *best;
}

nlohmann::json certificate_json(const CoveringCertificate& cert, const ConvexBody& u, const ConvexBody& v)
{
    nlohmann::json x = nlohmann::json::array();
    for (const auto& a : cert.translates(kMaxExportedTranslates)) {
        x.push_back(std::vector<double>(a.data(), a.data() + a.size()));
    }
    const Eigen::VectorXd& hw = cert.cell.as<Box>().half_widths;
    return {
        {"dim", u.dim()},
        {"U", to_literal(u)},
        {"V", to_literal(v)},
        {"cell_half_widths", std::vector<double>(hw.data(), hw.data() + hw.size())},
        {"X", x},
        {"bound", cert.bound_value},
        {"method", "tiling-cover"},
        {"certified", cert.certified},
    };
}

} // namespace pdcert
