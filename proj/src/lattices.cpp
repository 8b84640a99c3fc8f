#include "pdcert/lattices.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace pdcert {

namespace {

/// Work cap for Fincke–Pohst enumeration (tree nodes visited).
constexpr std::uint64_t kEnumerationBudget = 400'000'000;

void require_dimension(const Lattice& lattice, const ConvexBody& body)
{
    if (lattice.dim() != body.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "lattice and body dimensions differ");
    }
    if (lattice.dim() > kMaxLatticeDimension) {
        throw Error(ErrorCode::DimensionTooLarge,
                    "enumeration limited to n <= " + std::to_string(kMaxLatticeDimension));
    }
}

/// Sign of the membership margin of lattice point M k, certified.
int lattice_point_membership(const Lattice& lattice, const ConvexBody& region, const Coeffs& k)
{
    const Eigen::VectorXd x = lattice.point(k);
    return certified_membership(
        region,
        [&](auto tag) {
            using Scalar = decltype(tag);
            if constexpr (std::is_same_v<Scalar, double>) {
                return Vec<double>(x);
            } else {
                const Vec<Rational> kk = k.cast<double>().cast<Rational>();
                return Vec<Rational>(lattice.exact_basis() * kk);
            }
        },
        x.lpNorm<1>() + 1.0);
}

/// Visits all k with |R k|^2 <= radius2 (with a small outward slack), where
/// R is the upper Cholesky factor of the Gram matrix.
class FinckePohst {
public:
    FinckePohst(const Eigen::MatrixXd& gram, double radius2, const std::function<bool(const Coeffs&)>& visit)
        : r_(gram.llt().matrixU()), radius2_(radius2 * (1.0 + 1e-9) + 1e-300), visit_(visit),
          k_(Coeffs::Zero(gram.rows()))
    {
    }

    void run()
    {
        budget_ = kEnumerationBudget;
        level(static_cast<int>(k_.size()) - 1, 0.0);
    }

private:
    bool level(int i, double used)
    {
        double s = 0.0;
        for (Eigen::Index j = i + 1; j < k_.size(); ++j) s += r_(i, j) * static_cast<double>(k_(j));
        const double rii = r_(i, i);
        const double centre = -s / rii;
        const double rem = radius2_ - used;
        if (rem < 0.0) return true;
        const double half = std::sqrt(rem) / rii;
        const double slack = 1e-9 * (1.0 + std::abs(centre) + half);
        const auto lo = static_cast<std::int64_t>(std::ceil(centre - half - slack));
        const auto hi = static_cast<std::int64_t>(std::floor(centre + half + slack));
        for (std::int64_t v = lo; v <= hi; ++v) {
            k_(i) = v;
            const double t = rii * static_cast<double>(v) + s;
            const double next = used + t * t;
            if (next > radius2_ * (1.0 + 1e-9)) continue;
            if (budget_-- == 0) {
                throw Error(ErrorCode::ResourceCap, "lattice enumeration exceeded its work budget");
            }
            if (i == 0) {
                if (!visit_(k_)) return false;
            } else if (!level(i - 1, next)) {
                return false;
            }
        }
        k_(i) = 0;
        return true;
    }

    Eigen::MatrixXd r_;
    double radius2_;
    const std::function<bool(const Coeffs&)>& visit_;
    Coeffs k_;
    std::uint64_t budget_ = 0;
};

/// Integers k with |d k| < w (strict) or <= w, counted exactly.
std::uint64_t axis_count(double d, double w, bool strict)
{
    const Rational dd = magnitude<Rational>(Rational(d));
    const Rational ww(w);
    auto inside = [&](std::int64_t k) {
        const Rational v = dd * Rational(static_cast<double>(k));
        return strict ? v < ww : v <= ww;
    };
    auto kmax = static_cast<std::int64_t>(std::floor(w / std::abs(d)));
    while (inside(kmax + 1)) ++kmax;
    while (kmax > 0 && !inside(kmax)) --kmax;
    return 2 * static_cast<std::uint64_t>(kmax) + 1;
}

Eigen::MatrixXd from_rows(std::initializer_list<std::initializer_list<double>> rows)
{
    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd m(n, n);
    Eigen::Index i = 0;
    for (const auto& row : rows) {
        Eigen::Index j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

} // namespace

Lattice::Lattice(Eigen::MatrixXd basis, std::string name)
    : basis_(std::move(basis)), name_(std::move(name))
{
    if (basis_.rows() != basis_.cols() || basis_.rows() < 1) {
        throw Error(ErrorCode::BadParameters, "lattice basis must be a non-empty square matrix");
    }
    if (!basis_.allFinite()) throw Error(ErrorCode::BadParameters, "lattice basis has non-finite entries");
    exact_basis_ = basis_.cast<Rational>();
    gram_ = basis_.transpose() * basis_;
    determinant_ = std::abs(basis_.determinant());
    const Rational exact_det = exact_basis_.determinant();
    if (exact_det == 0) throw Error(ErrorCode::BadParameters, "lattice basis is singular");
}

bool Lattice::is_diagonal() const
{
    for (Eigen::Index i = 0; i < basis_.rows(); ++i) {
        for (Eigen::Index j = 0; j < basis_.cols(); ++j) {
            if (i != j && basis_(i, j) != 0.0) return false;
        }
    }
    return true;
}

Lattice Lattice::scaled(double factor) const
{
    if (!(factor > 0.0) || !std::isfinite(factor)) {
        throw Error(ErrorCode::BadParameters, "lattice scale must be positive");
    }
    if (factor == 1.0) return *this;
    return Lattice(basis_ * factor, name_);
}

LatticeCatalogEntry catalog_entry(const std::string& name, int dim)
{
    if (name == "Zn" || name == "Z") {
        if (dim < 1) throw Error(ErrorCode::BadParameters, "Zn needs a positive dimension");
        return {"Zn", Lattice(Eigen::MatrixXd::Identity(dim, dim), "Zn"), 1.0, "2n vectors ±e_i"};
    }
    if (name == "A2") {
        // The second generator is rounded up, so the double lattice keeps minimum distance exactly 1.
        const double y = std::nextafter(std::numbers::sqrt3 / 2.0, 1.0);
        return {"A2", Lattice(from_rows({{1.0, 0.5}, {0.0, y}}), "A2"), 1.0, "6 vectors of the hexagonal lattice"};
    }
    if (name == "E8") {
        Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(8, 8);
        rows(0, 0) = 2.0;
        for (int i = 1; i < 7; ++i) {
            rows(i, i - 1) = -1.0;
            rows(i, i) = 1.0;
        }
        rows.row(7).setConstant(0.5);
        return {"E8", Lattice(rows.transpose(), "E8"), std::numbers::sqrt2, "240 roots of norm 2"};
    }
    if (name.size() == 2 && name[0] == 'D' && name[1] >= '3' && name[1] <= '8') {
        const int n = name[1] - '0';
        Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(n, n);
        rows(0, 0) = -1.0;
        rows(0, 1) = -1.0;
        rows(1, 0) = 1.0;
        rows(1, 1) = -1.0;
        for (int i = 2; i < n; ++i) {
            rows(i, i - 1) = 1.0;
            rows(i, i) = -1.0;
        }
        return {name, Lattice(rows.transpose(), name), std::numbers::sqrt2, "2n(n-1) vectors ±e_i±e_j"};
    }
    throw Error(ErrorCode::BadParameters, "unknown catalog lattice '" + name + "'");
}

std::vector<LatticeCatalogEntry> catalog(int dim)
{
    std::vector<LatticeCatalogEntry> out;
    out.push_back(catalog_entry("Zn", dim));
    if (dim == 2) out.push_back(catalog_entry("A2", 2));
    if (dim >= 3 && dim <= 8) out.push_back(catalog_entry("D" + std::to_string(dim), dim));
    if (dim == 8) out.push_back(catalog_entry("E8", 8));
    return out;
}

void visit_points(const Lattice& lattice, const ConvexBody& region, bool strict,
                  const std::function<bool(const Coeffs&)>& visitor)
{
    require_dimension(lattice, region);
    const double radius = circumradius(region);
    if (!std::isfinite(radius)) throw Error(ErrorCode::UnboundedRegion, "region has no finite circumradius");
    const std::function<bool(const Coeffs&)> filtered = [&](const Coeffs& k) {
        const int s = lattice_point_membership(lattice, region, k);
        if (strict ? s > 0 : s >= 0) return visitor(k);
        return true;
    };
    FinckePohst(lattice.gram(), radius * radius, filtered).run();
}

std::vector<Coeffs> enumerate_coefficients(const Lattice& lattice, const ConvexBody& region, bool strict)
{
    std::vector<Coeffs> out;
    visit_points(lattice, region, strict, [&](const Coeffs& k) {
        out.push_back(k);
        return true;
    });
    return out;
}

std::vector<Eigen::VectorXd> enumerate_points(const Lattice& lattice, const ConvexBody& region, bool strict)
{
    std::vector<Eigen::VectorXd> out;
    visit_points(lattice, region, strict, [&](const Coeffs& k) {
        out.push_back(lattice.point(k));
        return true;
    });
    return out;
}

std::uint64_t count_points(const Lattice& lattice, const ConvexBody& region, bool strict)
{
    require_dimension(lattice, region);
    if (lattice.is_diagonal() && region.is<Box>()) {
        const auto& w = region.as<Box>().half_widths;
        std::uint64_t total = 1;
        for (int i = 0; i < lattice.dim(); ++i) {
            const std::uint64_t c = axis_count(lattice.basis()(i, i), w(i), strict);
            if (total > std::numeric_limits<std::uint64_t>::max() / c) {
                throw Error(ErrorCode::ResourceCap, "lattice point count overflows 64 bits");
            }
            total *= c;
        }
        return total;
    }
    std::uint64_t total = 0;
    visit_points(lattice, region, strict, [&](const Coeffs&) {
        ++total;
        return true;
    });
    return total;
}

double shortest_vector_length(const Lattice& lattice)
{
    double best = lattice.basis().colwise().norm().minCoeff();
    const ConvexBody search = ConvexBody::ball(lattice.dim(), best);
    visit_points(lattice, search, false, [&](const Coeffs& k) {
        if (!k.isZero()) best = std::min(best, lattice.point(k).norm());
        return true;
    });
    return best;
}

bool check_packing(const Lattice& lattice, const ConvexBody& u)
{
    require_dimension(lattice, u);
    if (lattice.is_diagonal() && u.is<Box>()) {
        const auto& w = u.as<Box>().half_widths;
        for (int i = 0; i < lattice.dim(); ++i) {
            if (magnitude<Rational>(Rational(lattice.basis()(i, i))) < Rational(w(i))) return false;
        }
        return true;
    }
    bool interior_vector = false;
    visit_points(lattice, u, true, [&](const Coeffs& k) {
        if (k.isZero()) return true;
        interior_vector = true;
        return false;
    });
    return !interior_vector;
}

double packing_density(const Lattice& lattice, const ConvexBody& h)
{
    if (!check_packing(lattice, scale(h, 2.0))) {
        throw Error(ErrorCode::NotAPacking, "lattice translates of H overlap");
    }
    return volume(h) / lattice.determinant();
}

BoundEntry lattice_lower_bound(const Lattice& lattice, const ConvexBody& u, const ConvexBody& v,
                               const LatticeBoundOptions& options)
{
    if (u.dim() != v.dim()) throw Error(ErrorCode::DimensionMismatch, "U and V dimensions differ");
    if (!check_packing(lattice, u)) {
        throw Error(ErrorCode::NotAPacking, "a nonzero lattice vector lies in the interior of U");
    }
    const double vol_u = volume(u);
    const double vol_v = volume(v);
    const auto raw = static_cast<std::int64_t>(count_points(lattice, v, true));
    const std::int64_t count = std::max<std::int64_t>(0, raw + options.count_bias);

    BoundEntry e;
    e.value = static_cast<double>(count) * vol_u / vol_v;
    e.direction = Direction::Lower;
    e.method = Method::Lattice;
    e.certified = true;
    e.audit = {
        {"lattice", lattice_to_json(lattice)},
        {"interior_count", count},
        {"volume_U", vol_u},
        {"volume_V", vol_v},
    };
    return e;
}

Lattice normalize_to_packing(const LatticeCatalogEntry& entry, const ConvexBody& u)
{
    const Lattice& base = entry.lattice;
    require_dimension(base, u);
    if (u.is_sum()) {
        throw Error(ErrorCode::UnsupportedKind, "normalize_to_packing needs a Ball, Box or CrossPolytope");
    }
    auto packs = [&](double s) { return check_packing(base.scaled(s), u); };

    double hi = 1.0;
    for (int guard = 0; !packs(hi); ++guard) {
        if (guard > 200) throw Error(ErrorCode::BadParameters, "no packing scale found");
        hi *= 2.0;
    }
    double lo = hi;
    for (int guard = 0; packs(lo); ++guard) {
        if (guard > 200) throw Error(ErrorCode::BadParameters, "packing predicate is not monotone");
        hi = lo;
        lo *= 0.5;
    }
    while (hi - lo > 1e-12 * hi) {
        const double mid = 0.5 * (lo + hi);
        (packs(mid) ? hi : lo) = mid;
    }

    // Tighten to the exact critical scale 1 / min gauge over nonzero vectors.
    auto gauge = [&](const Eigen::VectorXd& x) {
        if (const auto* b = std::get_if<Ball>(&u.kind())) return x.norm() / b->radius;
        if (const auto* c = std::get_if<CrossPolytope>(&u.kind())) return x.lpNorm<1>() / c->radius;
        return (x.array().abs() / u.as<Box>().half_widths.array()).maxCoeff();
    };
    double min_gauge = std::numeric_limits<double>::infinity();
    visit_points(base, scale(u, (1.0 + 1e-6) / lo), false, [&](const Coeffs& k) {
        if (!k.isZero()) min_gauge = std::min(min_gauge, gauge(base.point(k)));
        return true;
    });
    double s = std::isfinite(min_gauge) ? 1.0 / min_gauge : hi;
    for (int guard = 0; !packs(s); ++guard) {
        if (guard > 64) {
            s = hi;
            break;
        }
        s = std::nextafter(s, std::numeric_limits<double>::infinity());
    }
    return base.scaled(s);
}

nlohmann::json lattice_to_json(const Lattice& lattice)
{
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < lattice.basis().rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < lattice.basis().cols(); ++j) row.push_back(lattice.basis()(i, j));
        rows.push_back(row);
    }
    return {{"name", lattice.name()}, {"basis", rows}, {"determinant", lattice.determinant()}};
}

Lattice lattice_from_json(const nlohmann::json& j)
{
    const auto& rows = j.at("basis");
    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (static_cast<Eigen::Index>(rows[i].size()) != n) throw Error(ErrorCode::Parse, "basis is not square");
        for (Eigen::Index k = 0; k < n; ++k) m(i, k) = rows[i][k].get<double>();
    }
    return Lattice(m, j.value("name", "custom"));
}

} // namespace pdcert
