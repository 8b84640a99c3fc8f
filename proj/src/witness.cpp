#include "pdcert/witness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "pdcert/quadrature.hpp"
#include "pdcert/random.hpp"

namespace pdcert {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_dim(int expected, Eigen::Index got)
{
    if (got != expected) throw Error(ErrorCode::DimensionMismatch, "witness and point dimensions differ");
}

/// ∫_{-a}^{a} cos(2π η x) dx.
double cosine_interval(double eta, double a)
{
    const double t = kTwoPi * eta * a;
    if (std::abs(t) < 1e-8) return 2.0 * a * (1.0 - t * t / 6.0);
    return 2.0 * a * std::sin(t) / t;
}

/// ∫_{|x| <= R} e(η·x) dx for |η| = rho, in dimension n.
double ball_fourier(int n, double radius, double rho)
{
    const double z = kTwoPi * radius * rho;
    const double base = unit_ball_volume(n) * std::pow(radius, n);
    const double nu = 0.5 * n;
    if (z < 1e-4) return base * (1.0 - z * z / (4.0 * (nu + 1.0)));
    return std::pow(radius / rho, nu) * boost::math::cyl_bessel_j(nu, z);
}

/// ∫_{-a}^{a} max(0, 1 - |x| / (2h)) dx.
double hat_interval(double h, double a)
{
    const double t = std::min(a, 2.0 * h);
    return 2.0 * (t - t * t / (4.0 * h));
}

struct ClosedForm {
    double value;
    double abs_error;
};

ClosedForm cms_integral(const CosineModulusSquare& cms, const ConvexBody& region)
{
    const auto terms = cms.weights.size();
    double value = 0.0, magnitude_sum = 0.0;
    for (Eigen::Index j = 0; j < terms; ++j) {
        for (Eigen::Index k = 0; k < terms; ++k) {
            const Eigen::VectorXd eta = cms.frequencies.col(j) - cms.frequencies.col(k);
            double t = cms.weights(j) * cms.weights(k);
            if (const auto* box = std::get_if<Box>(&region.kind())) {
                for (Eigen::Index i = 0; i < eta.size(); ++i) t *= cosine_interval(eta(i), box->half_widths(i));
            } else {
                t *= ball_fourier(region.dim(), region.as<Ball>().radius, eta.norm());
            }
            value += t;
            magnitude_sum += std::abs(t);
        }
    }
    const double n_terms = static_cast<double>(terms * terms);
    return {value, 64.0 * kEps * (n_terms + region.dim()) * magnitude_sum};
}

ClosedForm gaussian_integral(const Gaussian& g, const ConvexBody& region)
{
    const int n = region.dim();
    double value = 0.0;
    if (const auto* box = std::get_if<Box>(&region.kind())) {
        value = 1.0;
        for (int i = 0; i < n; ++i) {
            value *= g.sigma * std::erf(std::sqrt(std::numbers::pi) * box->half_widths(i) / g.sigma);
        }
    } else {
        const double r = region.as<Ball>().radius;
        value = std::pow(g.sigma, n) * boost::math::gamma_p(0.5 * n, std::numbers::pi * r * r / (g.sigma * g.sigma));
    }
    return {value, 64.0 * kEps * n * value};
}

Integral quadrature_integral(const WitnessFunction& f, const ConvexBody& region, double tol)
{
    const auto q = integrate_region([&](const Eigen::VectorXd& x) { return evaluate(f, x); }, region, tol);
    return {q.value, q.abs_error, "tensor-gauss-legendre", q.nodes};
}

} // namespace

WitnessFunction WitnessFunction::autocorrelation(const ConvexBody& h)
{
    if (h.dim() == 1 && !h.is_sum()) return WitnessFunction(1, Autocorrelation{ConvexBody::cube(1, circumradius(h))});
    if (!h.is<Ball>() && !h.is<Box>()) {
        throw Error(ErrorCode::UnsupportedKind, "autocorrelation witnesses are built from balls and boxes");
    }
    return WitnessFunction(h.dim(), Autocorrelation{h});
}

WitnessFunction WitnessFunction::gaussian(int dim, double sigma)
{
    if (dim < 1 || !(sigma > 0.0) || !std::isfinite(sigma)) {
        throw Error(ErrorCode::BadParameters, "gaussian witness needs dim >= 1 and sigma > 0");
    }
    return WitnessFunction(dim, Gaussian{sigma});
}

WitnessFunction WitnessFunction::cosine_modulus_square(Eigen::VectorXd weights, Eigen::MatrixXd frequencies)
{
    if (weights.size() < 1 || frequencies.cols() != weights.size() || frequencies.rows() < 1) {
        throw Error(ErrorCode::BadParameters, "need one frequency column per weight");
    }
    if ((weights.array() < 0.0).any() || !(weights.array() > 0.0).any()) {
        throw Error(ErrorCode::BadParameters, "weights must be non-negative and not all zero");
    }
    const int n = static_cast<int>(frequencies.rows());
    return WitnessFunction(n, CosineModulusSquare{std::move(weights), std::move(frequencies)});
}

WitnessFunction WitnessFunction::lattice_dirichlet(const Lattice& lattice, double radius)
{
    if (!(radius > 0.0)) throw Error(ErrorCode::BadParameters, "lattice witness radius must be positive");
    return WitnessFunction(lattice.dim(), LatticeDirichlet{lattice, radius});
}

double ball_autocorrelation(int n, double t)
{
    if (t <= 0.0) return 1.0;
    if (t >= 1.0) return 0.0;
    switch (n) {
    case 1: return 1.0 - t;
    case 2: return (2.0 / std::numbers::pi) * (std::acos(t) - t * std::sqrt(1.0 - t * t));
    case 3: return 1.0 - 1.5 * t + 0.5 * t * t * t;
    default: break;
    }
    const double power = 0.5 * (n - 1);
    const double full = std::sqrt(std::numbers::pi) * std::tgamma(0.5 * (n + 1)) / (2.0 * std::tgamma(0.5 * n + 1.0));
    const double cap = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [power](double s) { return std::pow(std::max(0.0, 1.0 - s * s), power); }, t, 1.0, 15, 1e-10);
    return cap / full;
}

double evaluate(const WitnessFunction& f, const Eigen::Ref<const Eigen::VectorXd>& x)
{
    require_dim(f.dim(), x.size());
    return std::visit(
        [&](const auto& fam) -> double {
            using F = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<F, Autocorrelation>) {
                if (const auto* box = std::get_if<Box>(&fam.body.kind())) {
                    return (1.0 - x.array().abs() / (2.0 * box->half_widths.array())).max(0.0).prod();
                }
                return ball_autocorrelation(f.dim(), x.norm() / (2.0 * fam.body.template as<Ball>().radius));
            } else if constexpr (std::is_same_v<F, Gaussian>) {
                return std::exp(-std::numbers::pi * x.squaredNorm() / (fam.sigma * fam.sigma));
            } else if constexpr (std::is_same_v<F, CosineModulusSquare>) {
                double re = 0.0, im = 0.0;
                for (Eigen::Index j = 0; j < fam.weights.size(); ++j) {
                    const double phase = kTwoPi * fam.frequencies.col(j).dot(x);
                    re += fam.weights(j) * std::cos(phase);
                    im += fam.weights(j) * std::sin(phase);
                }
                return re * re + im * im;
            } else {
                throw Error(ErrorCode::UnsupportedKind, "the lattice limit witness has no pointwise values");
            }
        },
        f.family());
}

Integral integrate(const WitnessFunction& f, const ConvexBody& body, double tol)
{
    if (f.dim() != body.dim()) throw Error(ErrorCode::DimensionMismatch, "witness and region dimensions differ");
    // Every 1D body is an interval.
    const ConvexBody region = body.dim() == 1 ? ConvexBody::cube(1, circumradius(body)) : body;
    const bool ball = region.is<Ball>();
    const bool box = region.is<Box>();
    if (const auto* cms = std::get_if<CosineModulusSquare>(&f.family()); cms && (ball || box)) {
        const auto c = cms_integral(*cms, region);
        return {c.value, c.abs_error, "closed-form", 0};
    }
    if (const auto* g = std::get_if<Gaussian>(&f.family()); g && (ball || box)) {
        const auto c = gaussian_integral(*g, region);
        return {c.value, c.abs_error, "closed-form", 0};
    }
    if (const auto* ac = std::get_if<Autocorrelation>(&f.family())) {
        if (ac->body.is<Box>() && box) {
            const auto& h = ac->body.as<Box>().half_widths;
            const auto& a = region.as<Box>().half_widths;
            double value = 1.0;
            for (Eigen::Index i = 0; i < h.size(); ++i) value *= hat_interval(h(i), a(i));
            return {value, 64.0 * kEps * region.dim() * value, "closed-form", 0};
        }
        if (ac->body.is<Ball>() && ball) {
            const int n = f.dim();
            const double rho = ac->body.as<Ball>().radius;
            const double reach = std::min(region.as<Ball>().radius, 2.0 * rho);
            const auto q = integrate_radial([&](double r) { return ball_autocorrelation(n, r / (2.0 * rho)); }, reach,
                                            n, tol);
            return {q.value, q.abs_error, "radial-gauss-legendre", q.nodes};
        }
    }
    if (std::holds_alternative<LatticeDirichlet>(f.family())) {
        throw Error(ErrorCode::UnsupportedKind, "the lattice limit witness is only defined through its ratio");
    }
    return quadrature_integral(f, region, tol);
}

RatioEstimate ratio(const WitnessFunction& f, const ConvexBody& u, const ConvexBody& v, double tol)
{
    if (u.dim() != v.dim() || u.dim() != f.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "witness, U and V dimensions differ");
    }
    if (const auto* ld = std::get_if<LatticeDirichlet>(&f.family())) {
        const double value = lattice_witness_ratio(ld->lattice, u, v, ld->radius);
        return {value, 8.0 * kEps * value, "lattice-limit", 0};
    }
    const Integral iu = integrate(f, u, tol);
    const Integral iv = integrate(f, v, tol);
    if (!(iu.value > 0.0)) throw Error(ErrorCode::ZeroWitness, "witness has zero mass on U");
    RatioEstimate out;
    out.value = (iv.value / volume(v)) / (iu.value / volume(u));
    out.abs_error = std::abs(out.value) * (iv.abs_error / std::abs(iv.value) + iu.abs_error / iu.value);
    out.method = iu.method == iv.method ? iu.method : iu.method + "+" + iv.method;
    out.node_count = iu.nodes + iv.nodes;
    return out;
}

WitnessFunction sample_double_pd(int n, int terms, double freq_scale, std::uint64_t seed)
{
    if (n < 1 || terms < 1) throw Error(ErrorCode::BadParameters, "sample_double_pd needs n >= 1 and J >= 1");
    Engine rng = make_engine(seed, 0x5A3D);
    Eigen::VectorXd w(terms);
    Eigen::MatrixXd xi = Eigen::MatrixXd::Zero(n, terms);
    for (int j = 0; j < terms; ++j) {
        w(j) = uniform_open_closed(rng);
        if (j == 0) continue;
        for (int i = 0; i < n; ++i) xi(i, j) = uniform(rng, -freq_scale, freq_scale);
    }
    return WitnessFunction::cosine_modulus_square(w, xi);
}

namespace {

/// Λ_R sliced into lines along the first coefficient. A ball meets each
/// lattice line in consecutive coefficients, so a line is one interval.
struct Line {
    std::vector<std::int64_t> tail;  ///< coefficients 1..n-1
    std::int64_t lo, hi;             ///< range of coefficient 0
};

std::vector<Line> slice_into_lines(std::vector<Coeffs> points)
{
    auto key = [](const Coeffs& k) {
        std::vector<std::int64_t> t(k.data() + 1, k.data() + k.size());
        t.push_back(k(0));
        return t;
    };
    std::sort(points.begin(), points.end(), [&](const Coeffs& a, const Coeffs& b) { return key(a) < key(b); });
    std::vector<Line> lines;
    for (const auto& k : points) {
        std::vector<std::int64_t> tail(k.data() + 1, k.data() + k.size());
        if (!lines.empty() && lines.back().tail == tail) {
            if (k(0) != lines.back().hi + 1) throw Error(ErrorCode::BadParameters, "truncated lattice line is not an interval");
            lines.back().hi = k(0);
        } else {
            lines.push_back({std::move(tail), k(0), k(0)});
        }
    }
    return lines;
}

} // namespace

LatticeWitness lattice_witness(const Lattice& lattice, const ConvexBody& u, const ConvexBody& v, double radius,
                               double shrink)
{
    if (!(shrink >= 0.0 && shrink < 1.0)) throw Error(ErrorCode::BadParameters, "shrink must lie in [0, 1)");
    if (radius < circumradius(v)) {
        throw Error(ErrorCode::BadParameters, "lattice witness radius must be at least the circumradius of V");
    }
    if (!check_packing(lattice, u)) throw Error(ErrorCode::NotAPacking, "lattice does not pack U/2");

    std::vector<Coeffs> truncated = enumerate_coefficients(lattice, ConvexBody::ball(lattice.dim(), radius), false);
    const ConvexBody inner = shrink > 0.0 ? scale(v, 1.0 - shrink) : v;
    const std::vector<Coeffs> interior = enumerate_coefficients(lattice, inner, true);

    LatticeWitness out;
    out.base_count = truncated.size();
    out.interior_points = interior.size();
    const std::vector<Line> lines = slice_into_lines(std::move(truncated));
    const auto by_tail = [](const Line& a, const std::vector<std::int64_t>& t) { return a.tail < t; };

    // N_c = #{k in Λ_R : k - c in Λ_R}, one interval overlap per line.
    std::vector<std::int64_t> shifted;
    for (const auto& c : interior) {
        for (const auto& line : lines) {
            shifted.assign(line.tail.begin(), line.tail.end());
            for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] -= c(static_cast<Eigen::Index>(i + 1));
            const auto it = std::lower_bound(lines.begin(), lines.end(), shifted, by_tail);
            if (it == lines.end() || it->tail != shifted) continue;
            const std::int64_t lo = std::max(line.lo, it->lo + c(0));
            const std::int64_t hi = std::min(line.hi, it->hi + c(0));
            if (hi >= lo) out.weighted_count += static_cast<std::uint64_t>(hi - lo + 1);
        }
    }
    out.value = volume(u) / volume(v) * static_cast<double>(out.weighted_count) / static_cast<double>(out.base_count);
    return out;
}

double lattice_witness_ratio(const Lattice& lattice, const ConvexBody& u, const ConvexBody& v, double radius,
                             double shrink)
{
    return lattice_witness(lattice, u, v, radius, shrink).value;
}

FamilyOptimum optimize_family(const std::function<WitnessFunction(double)>& family, const ConvexBody& u,
                              const ConvexBody& v, double lo, double hi, double tol, int iterations)
{
    if (!(hi > lo)) throw Error(ErrorCode::BadParameters, "parameter range must be a non-empty interval");
    FamilyOptimum best;
    best.best_ratio.value = -std::numeric_limits<double>::infinity();
    auto eval = [&](double p) {
        const RatioEstimate r = ratio(family(p), u, v, tol);
        ++best.evaluations;
        if (r.value > best.best_ratio.value) {
            best.best_ratio = r;
            best.best_param = p;
        }
        return r.value;
    };
    eval(lo);
    eval(hi);
    const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double c = b - golden * (b - a);
    double d = a + golden * (b - a);
    double fc = eval(c);
    double fd = eval(d);
    for (int it = 0; it < iterations; ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - golden * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + golden * (b - a);
            fd = eval(d);
        }
    }
    return best;
}

} // namespace pdcert
