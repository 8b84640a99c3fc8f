#include "pdcert/geometry.hpp"

#include <cmath>
#include <numbers>

#include "pdcert/random.hpp"

namespace pdcert {

namespace {

bool same_primitive(const Primitive& a, const Primitive& b)
{
    if (a.index() != b.index()) return false;
    if (const auto* x = std::get_if<Ball>(&a)) return x->radius == std::get<Ball>(b).radius;
    if (const auto* x = std::get_if<CrossPolytope>(&a)) return x->radius == std::get<CrossPolytope>(b).radius;
    return std::get<Box>(a).half_widths == std::get<Box>(b).half_widths;
}

Primitive scale_primitive(const Primitive& p, double lambda)
{
    return std::visit(
        [&](const auto& prim) -> Primitive {
            using P = std::decay_t<decltype(prim)>;
            if constexpr (std::is_same_v<P, Box>) return Box{prim.half_widths * lambda};
            else return P{prim.radius * lambda};
        },
        p);
}

double primitive_volume(int n, const Primitive& p)
{
    return std::visit(
        [&](const auto& prim) -> double {
            using P = std::decay_t<decltype(prim)>;
            if constexpr (std::is_same_v<P, Ball>) {
                return unit_ball_volume(n) * std::pow(prim.radius, n);
            } else if constexpr (std::is_same_v<P, Box>) {
                return (2.0 * prim.half_widths.array()).prod();
            } else {
                return std::pow(2.0 * prim.radius, n) / std::tgamma(n + 1.0);
            }
        },
        p);
}

/// Half-length of a 1-D primitive.
double extent_1d(const Primitive& p)
{
    if (const auto* b = std::get_if<Box>(&p)) return b->half_widths(0);
    if (const auto* b = std::get_if<Ball>(&p)) return b->radius;
    return std::get<CrossPolytope>(p).radius;
}

Eigen::VectorXd primitive_bounding(int n, const Primitive& p)
{
    if (const auto* b = std::get_if<Box>(&p)) return b->half_widths;
    if (const auto* b = std::get_if<Ball>(&p)) return Eigen::VectorXd::Constant(n, b->radius);
    return Eigen::VectorXd::Constant(n, std::get<CrossPolytope>(p).radius);
}

double primitive_circumradius(const Primitive& p)
{
    if (const auto* b = std::get_if<Box>(&p)) return b->half_widths.norm();
    if (const auto* b = std::get_if<Ball>(&p)) return b->radius;
    return std::get<CrossPolytope>(p).radius;
}

double primitive_parameter_total(const Primitive& p)
{
    if (const auto* b = std::get_if<Box>(&p)) return b->half_widths.sum();
    if (const auto* b = std::get_if<Ball>(&p)) return b->radius;
    return std::get<CrossPolytope>(p).radius;
}

/// Steiner polynomial of Ball(r) + P for P a Box or CrossPolytope, n = 2, 3.
double steiner_volume(int n, const Primitive& polytope, double r)
{
    const double pi = std::numbers::pi;
    if (const auto* b = std::get_if<Box>(&polytope)) {
        const Eigen::VectorXd a = 2.0 * b->half_widths;
        if (n == 2) return a(0) * a(1) + 2.0 * (a(0) + a(1)) * r + pi * r * r;
        const double surface = 2.0 * (a(0) * a(1) + a(1) * a(2) + a(2) * a(0));
        return a.prod() + surface * r + pi * a.sum() * r * r + 4.0 * pi * r * r * r / 3.0;
    }
    const double rho = std::get<CrossPolytope>(polytope).radius;
    const double sqrt2 = std::numbers::sqrt2;
    if (n == 2) return 2.0 * rho * rho + 4.0 * sqrt2 * rho * r + pi * r * r;
    // Octahedron: 12 edges of length sqrt2*rho, dihedral angle acos(-1/3).
    const double edge_term = 12.0 * sqrt2 * rho * (pi - std::acos(-1.0 / 3.0)) / 2.0;
    return 4.0 * rho * rho * rho / 3.0 + 4.0 * std::numbers::sqrt3 * rho * rho * r + edge_term * r * r +
           4.0 * pi * r * r * r / 3.0;
}

void require_positive(double v, const char* what)
{
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw Error(ErrorCode::BadParameters, std::string(what) + " must be positive and finite");
    }
}

} // namespace

ConvexBody ConvexBody::ball(int dim, double radius)
{
    if (dim < 1) throw Error(ErrorCode::BadParameters, "dimension must be positive");
    require_positive(radius, "ball radius");
    return ConvexBody(dim, Ball{radius});
}

ConvexBody ConvexBody::box(Eigen::VectorXd half_widths)
{
    if (half_widths.size() < 1) throw Error(ErrorCode::BadParameters, "box needs at least one half-width");
    for (Eigen::Index i = 0; i < half_widths.size(); ++i) require_positive(half_widths(i), "box half-width");
    const int n = static_cast<int>(half_widths.size());
    return ConvexBody(n, Box{std::move(half_widths)});
}

ConvexBody ConvexBody::cube(int dim, double half_width)
{
    return box(Eigen::VectorXd::Constant(dim, half_width));
}

ConvexBody ConvexBody::cross_polytope(int dim, double radius)
{
    if (dim < 1) throw Error(ErrorCode::BadParameters, "dimension must be positive");
    require_positive(radius, "cross-polytope radius");
    return ConvexBody(dim, CrossPolytope{radius});
}

ConvexBody ConvexBody::from_primitive(int dim, const Primitive& p)
{
    return std::visit(
        [&](const auto& prim) -> ConvexBody {
            using P = std::decay_t<decltype(prim)>;
            if constexpr (std::is_same_v<P, Ball>) return ball(dim, prim.radius);
            else if constexpr (std::is_same_v<P, Box>) {
                if (prim.half_widths.size() != dim) throw Error(ErrorCode::DimensionMismatch, "box width count");
                return box(prim.half_widths);
            } else return cross_polytope(dim, prim.radius);
        },
        p);
}

std::vector<Primitive> ConvexBody::summands() const
{
    return std::visit(
        [](const auto& k) -> std::vector<Primitive> {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, Sum>) return {k.left, k.right};
            else return {Primitive(k)};
        },
        kind_);
}

bool operator==(const ConvexBody& a, const ConvexBody& b)
{
    if (a.dim() != b.dim() || a.kind().index() != b.kind().index()) return false;
    const auto sa = a.summands();
    const auto sb = b.summands();
    for (std::size_t i = 0; i < sa.size(); ++i) {
        if (!same_primitive(sa[i], sb[i])) return false;
    }
    return true;
}

double unit_ball_volume(int n)
{
    return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

bool has_exact_volume(const ConvexBody& body)
{
    if (!body.is_sum()) return true;
    if (body.dim() == 1) return true;
    if (body.dim() > 3) return false;
    const auto& s = body.as<Sum>();
    return std::holds_alternative<Ball>(s.left) || std::holds_alternative<Ball>(s.right);
}

double volume(const ConvexBody& body)
{
    const int n = body.dim();
    if (!body.is_sum()) return primitive_volume(n, body.summands().front());
    const auto& s = body.as<Sum>();
    if (n == 1) return 2.0 * (extent_1d(s.left) + extent_1d(s.right));
    if (!has_exact_volume(body)) {
        throw Error(ErrorCode::UnsupportedExactVolume,
                    "no closed form for this Minkowski sum in dimension " + std::to_string(n));
    }
    if (const auto* b = std::get_if<Ball>(&s.left)) return steiner_volume(n, s.right, b->radius);
    return steiner_volume(n, s.left, std::get<Ball>(s.right).radius);
}

VolumeEstimate volume_estimate(const ConvexBody& body, std::size_t samples, std::uint64_t seed)
{
    if (samples == 0) throw Error(ErrorCode::BadParameters, "volume_estimate needs samples > 0");
    const Eigen::VectorXd half = bounding_half_widths(body);
    const double box_volume = (2.0 * half.array()).prod();
    Engine rng = make_engine(seed);
    Eigen::VectorXd x(body.dim());
    std::size_t hits = 0;
    for (std::size_t s = 0; s < samples; ++s) {
        for (int i = 0; i < body.dim(); ++i) x(i) = uniform(rng, -half(i), half(i));
        if (contains(body, x)) ++hits;
    }
    const double nn = static_cast<double>(samples);
    const double p = static_cast<double>(hits) / nn;
    // Wilson score bound, one-sided 99.9%.
    constexpr double z = 3.090232306167813;
    const double z2 = z * z;
    const double centre = p + z2 / (2.0 * nn);
    const double spread = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
    const double upper = std::min(1.0, (centre + spread) / (1.0 + z2 / nn));
    return {box_volume * p, box_volume * upper, samples, hits};
}

namespace detail {

double margin_scale(const ConvexBody& body, double point_l1)
{
    double params = 0.0;
    for (const auto& p : body.summands()) params += primitive_parameter_total(p);
    const double l = 1.0 + point_l1 + params;
    const bool linear = body.is<Box>() || body.is<CrossPolytope>();
    return linear ? l : l * l;
}

} // namespace detail

bool has_exact_membership(const ConvexBody&)
{
    // Every primitive and every two-kind sum has a rule in membership_margin.
    return true;
}

bool contains(const ConvexBody& body, const Eigen::Ref<const Eigen::VectorXd>& x, Boundary boundary)
{
    if (x.size() != body.dim()) throw Error(ErrorCode::DimensionMismatch, "point dimension differs from body");
    const Eigen::VectorXd p = x;
    const int s = certified_membership(
        body,
        [&](auto tag) {
            using Scalar = decltype(tag);
            return Vec<Scalar>(p.cast<Scalar>());
        },
        p.lpNorm<1>());
    return boundary == Boundary::Closed ? s >= 0 : s > 0;
}

double distance(const ConvexBody& body, const Eigen::Ref<const Eigen::VectorXd>& x)
{
    if (x.size() != body.dim()) throw Error(ErrorCode::DimensionMismatch, "point dimension differs from body");
    const Eigen::VectorXd p = x;
    auto primitive_distance = [&](const Primitive& prim) {
        if (const auto* b = std::get_if<Ball>(&prim)) return std::max(0.0, p.norm() - b->radius);
        return std::sqrt(detail::squared_distance_to_primitive<double>(prim, p));
    };
    if (!body.is_sum()) return primitive_distance(body.summands().front());
    const auto& s = body.as<Sum>();
    if (const auto* b = std::get_if<Ball>(&s.left)) return std::max(0.0, primitive_distance(s.right) - b->radius);
    if (const auto* b = std::get_if<Ball>(&s.right)) return std::max(0.0, primitive_distance(s.left) - b->radius);
    throw Error(ErrorCode::UnsupportedMembership, "no exact distance for Box + CrossPolytope");
}

ConvexBody scale(const ConvexBody& body, double lambda)
{
    require_positive(lambda, "scale factor");
    if (lambda == 1.0) return body;
    const auto parts = body.summands();
    if (parts.size() == 1) return ConvexBody::from_primitive(body.dim(), scale_primitive(parts[0], lambda));
    return minkowski_sum(ConvexBody::from_primitive(body.dim(), scale_primitive(parts[0], lambda)),
                         ConvexBody::from_primitive(body.dim(), scale_primitive(parts[1], lambda)));
}

ConvexBody minkowski_sum(const ConvexBody& a, const ConvexBody& b)
{
    if (a.dim() != b.dim()) throw Error(ErrorCode::DimensionMismatch, "Minkowski sum of bodies of different dimension");
    const int n = a.dim();
    std::vector<Primitive> merged;
    auto absorb = [&](const Primitive& p) {
        for (auto& m : merged) {
            if (m.index() != p.index()) continue;
            if (auto* mb = std::get_if<Box>(&m)) mb->half_widths += std::get<Box>(p).half_widths;
            else if (auto* mr = std::get_if<Ball>(&m)) mr->radius += std::get<Ball>(p).radius;
            else std::get<CrossPolytope>(m).radius += std::get<CrossPolytope>(p).radius;
            return;
        }
        merged.push_back(p);
    };
    for (const auto& p : a.summands()) absorb(p);
    for (const auto& p : b.summands()) absorb(p);

    if (merged.size() == 1) return ConvexBody::from_primitive(n, merged[0]);
    if (n == 1) {
        double half = 0.0;
        for (const auto& p : merged) half += extent_1d(p);
        return ConvexBody::cube(1, half);
    }
    if (merged.size() > 2) {
        throw Error(ErrorCode::UnsupportedKind, "Minkowski sum would need three distinct primitive kinds");
    }
    // Canonical order: the ball summand (if any) first.
    if (std::holds_alternative<Ball>(merged[1])) std::swap(merged[0], merged[1]);
    return ConvexBody(n, Sum{merged[0], merged[1]});
}

ConvexBody inscribed_box(const ConvexBody& body)
{
    const int n = body.dim();
    if (body.is<Box>()) return body;
    if (const auto* ball = std::get_if<Ball>(&body.kind())) {
        double h = ball->radius / std::sqrt(static_cast<double>(n));
        const Rational r2 = Rational(ball->radius) * Rational(ball->radius);
        while (Rational(n) * Rational(h) * Rational(h) > r2) h = std::nextafter(h, 0.0);
        return ConvexBody::cube(n, h);
    }
    if (const auto* cross = std::get_if<CrossPolytope>(&body.kind())) {
        double h = cross->radius / n;
        while (Rational(n) * Rational(h) > Rational(cross->radius)) h = std::nextafter(h, 0.0);
        return ConvexBody::cube(n, h);
    }
    throw Error(ErrorCode::UnsupportedKind, "inscribed_box is not defined for Minkowski sums");
}

Eigen::VectorXd bounding_half_widths(const ConvexBody& body)
{
    Eigen::VectorXd half = Eigen::VectorXd::Zero(body.dim());
    for (const auto& p : body.summands()) half += primitive_bounding(body.dim(), p);
    return half;
}

double circumradius(const ConvexBody& body)
{
    double r = 0.0;
    for (const auto& p : body.summands()) r += primitive_circumradius(p);
    return r;
}

std::optional<bool> is_subset(const ConvexBody& inner, const ConvexBody& outer)
{
    if (inner.dim() != outer.dim()) throw Error(ErrorCode::DimensionMismatch, "is_subset dimensions differ");
    if (!has_exact_membership(outer)) return std::nullopt;
    const int n = inner.dim();
    if (const auto* box = std::get_if<Box>(&inner.kind())) {
        if (n > 20) return std::nullopt;
        Eigen::VectorXd v(n);
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
            for (int i = 0; i < n; ++i) v(i) = (mask >> i & 1U) ? box->half_widths(i) : -box->half_widths(i);
            if (!contains(outer, v)) return false;
        }
        return true;
    }
    if (const auto* cross = std::get_if<CrossPolytope>(&inner.kind())) {
        for (int i = 0; i < n; ++i) {
            Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
            v(i) = cross->radius;
            if (!contains(outer, v)) return false;
        }
        return true;
    }
    if (const auto* ball = std::get_if<Ball>(&inner.kind())) {
        const Rational rho(ball->radius);
        // Largest radius of an origin-centred ball inside `outer`, squared, exactly.
        auto inradius_ok = [&](const Primitive& p, const Rational& needed) -> bool {
            if (needed <= 0) return true;
            if (const auto* b = std::get_if<Ball>(&p)) return needed <= Rational(b->radius);
            if (const auto* b = std::get_if<Box>(&p)) return needed <= Rational(b->half_widths.minCoeff());
            const Rational c(std::get<CrossPolytope>(p).radius);
            return Rational(n) * needed * needed <= c * c;
        };
        if (!outer.is_sum()) return inradius_ok(outer.summands().front(), rho);
        const auto& s = outer.as<Sum>();
        const Rational slack = rho - Rational(std::get<Ball>(s.left).radius);
        return inradius_ok(s.right, slack) ? std::optional<bool>(true) : std::nullopt;
    }
    return std::nullopt;
}

} // namespace pdcert
