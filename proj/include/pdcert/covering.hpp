#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pdcert/bounds.hpp"
#include "pdcert/geometry.hpp"
#include "pdcert/lattices.hpp"

namespace pdcert {

/// Largest number of explicit translates written into an exported certificate.
inline constexpr std::uint64_t kMaxExportedTranslates = 1'000'000;

enum class CellTest {
    OpenIntersection,  ///< exact: open cell meets int K
    BallDilation,      ///< conservative: centre within the cell circumradius of K
};

struct TilingOptions {
    /// Grid anchor; empty means the origin. Nonzero only for fault injection.
    Eigen::VectorXd grid_offset;
    /// Maximum number of candidate cells examined one by one.
    std::uint64_t candidate_cap = 50'000'000;
};

/// A finite set X with K = V + U/2 ⊆ U/2 + X, witnessed by a grid of boxes.
///
/// The cell is an axis box inside H = U/2; grid translates of the cell tile
/// space, so keeping every cell whose interior meets K covers K. When K is a
/// box, X is an axis-aligned block and is stored by its per-axis ranges.
struct CoveringCertificate {
    ConvexBody h;
    ConvexBody k;
    ConvexBody cell;
    Eigen::VectorXd grid_offset;
    CellTest test = CellTest::OpenIntersection;
    std::uint64_t translate_count = 0;
    std::vector<std::pair<std::int64_t, std::int64_t>> axis_ranges;  ///< product form
    std::vector<Coeffs> cells;  ///< explicit form, sorted lexicographically
    double volume_u = 0.0;
    double volume_v = 0.0;
    double bound_value = 0.0;
    bool certified = true;

    bool product_form() const { return !axis_ranges.empty(); }
    Eigen::VectorXd centre(const Coeffs& index) const;
    bool contains_index(const Coeffs& index) const;
    /// Explicit translate list; throws ResourceCap beyond `cap` points.
    std::vector<Eigen::VectorXd> translates(std::uint64_t cap = kMaxExportedTranslates) const;
};

CoveringCertificate tiling_cover(const ConvexBody& u, const ConvexBody& v, const TilingOptions& options = {});

struct CoverageAudit {
    std::size_t sampled = 0;
    std::size_t inside_k = 0;
    std::size_t uncovered = 0;
    bool applicable = true;  ///< false when K has no exact membership test
    bool passed() const { return uncovered == 0; }
};

/// Samples the bounding box of K and checks every point of K lies in a kept cell.
CoverageAudit audit_coverage(const CoveringCertificate& cert, std::size_t samples, std::uint64_t seed);

BoundEntry to_bound_entry(const CoveringCertificate& cert);

/// Rogers' explicit covering density bound; 1 in dimension one.
double rogers_theta(int n);

BoundEntry rogers_bound(const ConvexBody& u, const ConvexBody& v, std::uint64_t seed = 1);
BoundEntry subset_bound(const ConvexBody& u, const ConvexBody& v);
BoundEntry chain_bound(const BoundEntry& base, double lambda, double r);

struct UpperBoundOptions {
    TilingOptions tiling;
    std::uint64_t seed = 1;
};

/// Smallest certified upper bound among subset, tiling, Rogers and chain.
BoundEntry best_upper(const ConvexBody& u, const ConvexBody& v, const UpperBoundOptions& options = {});

/// Every upper-bound entry that applies, in a fixed order.
std::vector<BoundEntry> upper_bounds(const ConvexBody& u, const ConvexBody& v, const UpperBoundOptions& options = {});

/// If v = r u for some r > 0 (same kind, proportional parameters), returns r.
std::optional<double> homothety_ratio(const ConvexBody& u, const ConvexBody& v);

nlohmann::json certificate_json(const CoveringCertificate& cert, const ConvexBody& u, const ConvexBody& v);

} // namespace pdcert
