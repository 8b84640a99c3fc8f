#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "pdcert/error.hpp"
#include "pdcert/exact.hpp"

namespace pdcert {

struct Ball {
    double radius;
};

/// Axis-aligned 0-symmetric box `prod [-w_i, w_i]`.
struct Box {
    Eigen::VectorXd half_widths;
};

/// l1 ball `{x : sum |x_i| <= radius}`.
struct CrossPolytope {
    double radius;
};

using Primitive = std::variant<Ball, Box, CrossPolytope>;

/// Minkowski sum of two primitives of different kinds.
struct Sum {
    Primitive left;
    Primitive right;
};

enum class Boundary { Closed, Open };

/// A closed 0-symmetric convex body from the supported catalog.
///
/// Values are immutable. Sums are kept one level deep: building a sum with
/// `minkowski_sum` merges homothetic summands and rejects anything that
/// would need three distinct primitive kinds.
class ConvexBody {
public:
    using Kind = std::variant<Ball, Box, CrossPolytope, Sum>;

    static ConvexBody ball(int dim, double radius);
    static ConvexBody box(Eigen::VectorXd half_widths);
    static ConvexBody cube(int dim, double half_width);
    static ConvexBody cross_polytope(int dim, double radius);
    static ConvexBody from_primitive(int dim, const Primitive& p);

    int dim() const noexcept { return dim_; }
    const Kind& kind() const noexcept { return kind_; }

    bool is_sum() const noexcept { return std::holds_alternative<Sum>(kind_); }
    template <typename T>
    bool is() const noexcept { return std::holds_alternative<T>(kind_); }
    template <typename T>
    const T& as() const { return std::get<T>(kind_); }

    /// The primitive summands (one for primitive bodies, two for sums).
    std::vector<Primitive> summands() const;

private:
    friend ConvexBody minkowski_sum(const ConvexBody&, const ConvexBody&);
    ConvexBody(int dim, Kind kind) : dim_(dim), kind_(std::move(kind)) {}

    int dim_;
    Kind kind_;
};

bool operator==(const ConvexBody& a, const ConvexBody& b);

/// Exact closed-form volume.
///
/// Primitives use the usual formulas; sums are exact in dimension 1 and,
/// through the Steiner formula, for Ball + Box and Ball + CrossPolytope in
/// dimensions 2 and 3. Anything else throws UnsupportedExactVolume.
double volume(const ConvexBody& body);
bool has_exact_volume(const ConvexBody& body);

/// Volume of the Euclidean unit ball in dimension n.
double unit_ball_volume(int n);

struct VolumeEstimate {
    double estimate;
    double upper_conf;  ///< 99.9% one-sided Wilson upper bound
    std::size_t samples;
    std::size_t hits;
};

/// Hit-or-miss Monte Carlo over the bounding box. Deterministic given seed.
VolumeEstimate volume_estimate(const ConvexBody& body, std::size_t samples, std::uint64_t seed);

/// Membership with exact fallback near the boundary. Throws
/// UnsupportedMembership for Box + CrossPolytope sums.
bool contains(const ConvexBody& body, const Eigen::Ref<const Eigen::VectorXd>& x,
              Boundary boundary = Boundary::Closed);
bool has_exact_membership(const ConvexBody& body);

/// Euclidean distance from x to the body (0 inside).
double distance(const ConvexBody& body, const Eigen::Ref<const Eigen::VectorXd>& x);

ConvexBody scale(const ConvexBody& body, double lambda);
ConvexBody minkowski_sum(const ConvexBody& a, const ConvexBody& b);

/// A maximal 0-symmetric axis box inside a Ball, Box or CrossPolytope. The
/// returned half-widths are rounded so that containment holds exactly.
ConvexBody inscribed_box(const ConvexBody& body);

/// Half-widths of the smallest axis box containing the body.
Eigen::VectorXd bounding_half_widths(const ConvexBody& body);

/// Radius of the smallest origin-centred ball containing the body.
double circumradius(const ConvexBody& body);

inline double diameter(const ConvexBody& body) { return 2.0 * circumradius(body); }

/// Certified inclusion `inner ⊆ outer`; nullopt when no exact rule applies.
std::optional<bool> is_subset(const ConvexBody& inner, const ConvexBody& outer);

/// Euclidean distance squared from x to the l1 ball of the given radius, by
/// sort-based projection onto the simplex. Exact for Scalar = Rational.
template <typename Scalar>
Scalar squared_distance_to_cross(const Vec<Scalar>& x, const Scalar& radius)
{
    std::vector<Scalar> u(static_cast<std::size_t>(x.size()));
    Scalar total(0);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        u[static_cast<std::size_t>(i)] = magnitude<Scalar>(x(i));
        total += u[static_cast<std::size_t>(i)];
    }
    if (total <= radius) return Scalar(0);
    std::sort(u.begin(), u.end(), [](const Scalar& a, const Scalar& b) { return a > b; });
    Scalar prefix(0);
    Scalar theta(0);
    for (std::size_t k = 0; k < u.size(); ++k) {
        prefix += u[k];
        const Scalar candidate = (prefix - radius) / Scalar(static_cast<int>(k + 1));
        if (u[k] > candidate) theta = candidate;
        else break;
    }
    Scalar d2(0);
    for (const auto& ui : u) {
        const Scalar m = ui < theta ? ui : theta;
        d2 += m * m;
    }
    return d2;
}

namespace detail {

template <typename Scalar>
Scalar squared_distance_to_box(const Vec<Scalar>& x, const Eigen::VectorXd& w)
{
    Scalar d2(0);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const Scalar excess = positive_part<Scalar>(Scalar(magnitude<Scalar>(x(i)) - Scalar(w(i))));
        d2 += excess * excess;
    }
    return d2;
}

template <typename Scalar>
Scalar squared_distance_to_primitive(const Primitive& p, const Vec<Scalar>& x)
{
    if (const auto* b = std::get_if<Box>(&p)) return squared_distance_to_box<Scalar>(x, b->half_widths);
    if (const auto* c = std::get_if<CrossPolytope>(&p))
        return squared_distance_to_cross<Scalar>(x, Scalar(c->radius));
    throw Error(ErrorCode::UnsupportedMembership, "squared distance to a ball summand is not polynomial");
}

template <typename Scalar>
Scalar primitive_margin(const Primitive& p, const Vec<Scalar>& x)
{
    return std::visit(
        [&](const auto& prim) -> Scalar {
            using P = std::decay_t<decltype(prim)>;
            if constexpr (std::is_same_v<P, Ball>) {
                const Scalar r(prim.radius);
                return r * r - x.squaredNorm();
            } else if constexpr (std::is_same_v<P, Box>) {
                Scalar m = Scalar(prim.half_widths(0)) - magnitude<Scalar>(x(0));
                for (Eigen::Index i = 1; i < x.size(); ++i) {
                    const Scalar mi = Scalar(prim.half_widths(i)) - magnitude<Scalar>(x(i));
                    if (mi < m) m = mi;
                }
                return m;
            } else {
                Scalar s(0);
                for (Eigen::Index i = 0; i < x.size(); ++i) s += magnitude<Scalar>(x(i));
                return Scalar(prim.radius) - s;
            }
        },
        p);
}

/// Magnitude scale of the margin for the floating-point filter.
double margin_scale(const ConvexBody& body, double point_l1);

} // namespace detail

/// Signed membership margin: positive in the interior, zero on the
/// boundary, negative outside. Quadratic kinds return squared quantities.
template <typename Scalar>
Scalar membership_margin(const ConvexBody& body, const Vec<Scalar>& x)
{
    if (!body.is_sum()) {
        return std::visit(
            [&](const auto& prim) -> Scalar {
                using P = std::decay_t<decltype(prim)>;
                if constexpr (std::is_same_v<P, Sum>) {
                    return Scalar(0);
                } else {
                    return detail::primitive_margin<Scalar>(Primitive(prim), x);
                }
            },
            body.kind());
    }
    const auto& s = body.as<Sum>();
    const Ball* ball = std::get_if<Ball>(&s.left);
    const Primitive* other = &s.right;
    if (!ball) {
        ball = std::get_if<Ball>(&s.right);
        other = &s.left;
    }
    if (!ball) {
        // Box + CrossPolytope: the l1 distance to the box against the radius.
        const Box& box = std::holds_alternative<Box>(s.left) ? std::get<Box>(s.left) : std::get<Box>(s.right);
        const double radius =
            std::holds_alternative<CrossPolytope>(s.left) ? std::get<CrossPolytope>(s.left).radius : std::get<CrossPolytope>(s.right).radius;
        Scalar l1(0);
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            l1 += positive_part<Scalar>(Scalar(magnitude<Scalar>(x(i)) - Scalar(box.half_widths(i))));
        }
        return Scalar(radius) - l1;
    }
    const Scalar r(ball->radius);
    return r * r - detail::squared_distance_to_primitive<Scalar>(*other, x);
}

/// Sign of the membership margin of an exactly-known point, certified.
template <typename PointFn>
int certified_membership(const ConvexBody& body, PointFn&& point, double point_l1)
{
    return certified_sign(
        [&](auto tag) {
            using Scalar = decltype(tag);
            return membership_margin<Scalar>(body, point(tag));
        },
        detail::margin_scale(body, point_l1));
}

} // namespace pdcert
