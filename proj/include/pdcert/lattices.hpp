#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pdcert/bounds.hpp"
#include "pdcert/exact.hpp"
#include "pdcert/geometry.hpp"

namespace pdcert {

using Coeffs = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

/// Largest dimension handled by point enumeration.
inline constexpr int kMaxLatticeDimension = 8;

/// Full-rank lattice M Z^n; the columns of M are the generators.
///
/// The double basis is taken as exact: every membership decision about a
/// lattice point is certified against these rational coordinates.
class Lattice {
public:
    explicit Lattice(Eigen::MatrixXd basis, std::string name = "custom");

    int dim() const noexcept { return static_cast<int>(basis_.cols()); }
    const Eigen::MatrixXd& basis() const noexcept { return basis_; }
    const Mat<Rational>& exact_basis() const noexcept { return exact_basis_; }
    const Eigen::MatrixXd& gram() const noexcept { return gram_; }
    double determinant() const noexcept { return determinant_; }
    const std::string& name() const noexcept { return name_; }

    bool is_diagonal() const;
    Eigen::VectorXd point(const Coeffs& k) const { return basis_ * k.cast<double>(); }
    Lattice scaled(double factor) const;

private:
    Eigen::MatrixXd basis_;
    Mat<Rational> exact_basis_;
    Eigen::MatrixXd gram_;
    double determinant_;
    std::string name_;
};

struct LatticeCatalogEntry {
    std::string name;              ///< "Zn", "A2", "D3".."D8", "E8"
    Lattice lattice;
    double min_norm;               ///< length of a shortest nonzero vector
    std::string min_vector_description;
};

/// Catalog lookup; `name` is "Zn", "A2", "Dk" or "E8". `dim` is used by Zn.
LatticeCatalogEntry catalog_entry(const std::string& name, int dim);
/// All catalog entries living in dimension `dim`.
std::vector<LatticeCatalogEntry> catalog(int dim);

/// Visits coefficient vectors of all lattice points in `region` (its open
/// interior when `strict`). The visitor returns false to stop early.
void visit_points(const Lattice& lattice, const ConvexBody& region, bool strict,
                  const std::function<bool(const Coeffs&)>& visitor);

std::vector<Coeffs> enumerate_coefficients(const Lattice& lattice, const ConvexBody& region, bool strict);
std::vector<Eigen::VectorXd> enumerate_points(const Lattice& lattice, const ConvexBody& region, bool strict);

/// Number of lattice points in the region. Diagonal lattices in boxes are
/// counted axis by axis, so very large counts stay cheap.
std::uint64_t count_points(const Lattice& lattice, const ConvexBody& region, bool strict);

/// Length of a shortest nonzero vector, by enumeration.
double shortest_vector_length(const Lattice& lattice);

/// True iff no nonzero lattice vector lies in the open interior of U.
bool check_packing(const Lattice& lattice, const ConvexBody& u);

/// |H| / det(lattice); throws NotAPacking unless check_packing(lattice, 2H).
double packing_density(const Lattice& lattice, const ConvexBody& h);

struct LatticeBoundOptions {
    /// Added to the interior count. Nonzero only for fault-injection tests.
    std::int64_t count_bias = 0;
};

/// Certified lower bound |Λ ∩ Int V| |U| / |V|.
BoundEntry lattice_lower_bound(const Lattice& lattice, const ConvexBody& u, const ConvexBody& v,
                               const LatticeBoundOptions& options = {});

/// Scales a catalog lattice by the smallest factor for which it packs U/2.
Lattice normalize_to_packing(const LatticeCatalogEntry& entry, const ConvexBody& u);

nlohmann::json lattice_to_json(const Lattice& lattice);
Lattice lattice_from_json(const nlohmann::json& j);

} // namespace pdcert
