#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <variant>

#include <Eigen/Dense>

#include "pdcert/bounds.hpp"
#include "pdcert/geometry.hpp"
#include "pdcert/lattices.hpp"

namespace pdcert {

/// φ_H = |H|^{-1} χ_H * χ_H for H a Ball or Box; φ_H(0) = 1, support 2H.
struct Autocorrelation {
    ConvexBody body;
};

/// exp(-π |x / σ|²).
struct Gaussian {
    double sigma;
};

/// |Σ_j w_j e(ξ_j · x)|² with w_j >= 0; frequencies are the columns of an n × J matrix.
struct CosineModulusSquare {
    Eigen::VectorXd weights;
    Eigen::MatrixXd frequencies;
};

/// ε → 0 limit of Σ_{a,b ∈ Λ_R} φ_ε(x + a - b); only its doubling ratio is defined.
struct LatticeDirichlet {
    Lattice lattice;
    double radius;
};

/// Non-negative positive definite test function.
class WitnessFunction {
public:
    using Family = std::variant<Autocorrelation, Gaussian, CosineModulusSquare, LatticeDirichlet>;

    static WitnessFunction autocorrelation(const ConvexBody& h);
    static WitnessFunction gaussian(int dim, double sigma);
    static WitnessFunction cosine_modulus_square(Eigen::VectorXd weights, Eigen::MatrixXd frequencies);
    static WitnessFunction lattice_dirichlet(const Lattice& lattice, double radius);

    int dim() const noexcept { return dim_; }
    const Family& family() const noexcept { return family_; }

private:
    WitnessFunction(int dim, Family family) : dim_(dim), family_(std::move(family)) {}
    int dim_;
    Family family_;
};

double evaluate(const WitnessFunction& f, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Normalised overlap |B_ρ ∩ (B_ρ + x)| / |B_ρ| as a function of t = |x| / (2ρ).
double ball_autocorrelation(int n, double t);

struct Integral {
    double value = 0.0;
    double abs_error = 0.0;
    std::string method;
    std::uint64_t nodes = 0;
};

/// ∫_region f, in closed form where one exists, otherwise by quadrature.
Integral integrate(const WitnessFunction& f, const ConvexBody& region, double tol);

/// (mean of f over V) / (mean of f over U).
struct RatioEstimate {
    double value = 0.0;
    double abs_error = 0.0;
    std::string method;
    std::uint64_t node_count = 0;

    double lower() const { return value - abs_error; }
};

RatioEstimate ratio(const WitnessFunction& f, const ConvexBody& u, const ConvexBody& v, double tol = 1e-10);

/// Random squared character sum: weights uniform in (0, 1], ξ_1 = 0 and the
/// remaining frequencies uniform in [-freq_scale, freq_scale]^n.
WitnessFunction sample_double_pd(int n, int terms, double freq_scale, std::uint64_t seed);

struct LatticeWitness {
    double value = 0.0;
    std::uint64_t weighted_count = 0;  ///< Σ_c N_c over interior c
    std::uint64_t base_count = 0;      ///< N_0 = |Λ_R|
    std::uint64_t interior_points = 0;
};

/// Discrete-limit ratio (|U|/|V|) Σ_{c ∈ Λ ∩ Int((1-δ)V)} N_c / N_0 with
/// N_c = |Λ_R ∩ (Λ_R + c)|.
LatticeWitness lattice_witness(const Lattice& lattice, const ConvexBody& u, const ConvexBody& v, double radius,
                               double shrink = 1e-9);
double lattice_witness_ratio(const Lattice& lattice, const ConvexBody& u, const ConvexBody& v, double radius,
                             double shrink = 1e-9);

struct FamilyOptimum {
    double best_param = 0.0;
    RatioEstimate best_ratio;
    int evaluations = 0;
};

/// Golden-section search for the largest ratio over a one-parameter family.
/// Returns the best evaluated point, which is a valid lower bound either way.
FamilyOptimum optimize_family(const std::function<WitnessFunction(double)>& family, const ConvexBody& u,
                              const ConvexBody& v, double lo, double hi, double tol = 1e-10, int iterations = 60);

} // namespace pdcert
