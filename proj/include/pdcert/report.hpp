#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pdcert/bounds.hpp"
#include "pdcert/covering.hpp"
#include "pdcert/geometry.hpp"
#include "pdcert/lattices.hpp"

namespace pdcert {

struct BoundsOptions {
    std::uint64_t seed = 1;
    double tol = 1e-10;
    int witness_trials = 200;
    bool witnesses = true;
    TilingOptions tiling;
    LatticeBoundOptions lattice;
    /// Cap on (interior points) x |Λ_R| for the lattice witness; R shrinks to fit.
    std::uint64_t lattice_witness_budget = 4'000'000;
};

/// Lower and upper bounds on the doubling constant for one (U, V) pair.
struct BoundReport {
    int dim = 0;
    std::string u;
    std::string v;
    std::vector<BoundEntry> entries;
    double best_lower = 0.0;          ///< best certified lower bound
    double best_upper = 0.0;          ///< best certified upper bound
    std::string lower_method;
    std::string upper_method;
    double best_witness = 0.0;        ///< best usable witness value, 0 if none
    std::uint64_t witness_violations = 0;
    bool consistency = true;
    std::vector<std::string> commentary;

    nlohmann::json to_json() const;
    static BoundReport from_json(const nlohmann::json& j);
};

BoundReport bounds(const ConvexBody& u, const ConvexBody& v, const BoundsOptions& options = {});

/// Recomputes every certified entry from its audit; returns the failures.
std::vector<std::string> revalidate(const BoundReport& report);

/// Best-density catalog lattices scaled to pack U/2, with their lower bounds.
struct LatticeChoice {
    Lattice lattice;
    BoundEntry entry;
};
std::vector<LatticeChoice> lattice_bounds(const ConvexBody& u, const ConvexBody& v, const LatticeBoundOptions& options,
                                          std::vector<std::string>* notes = nullptr);

struct SweepRow {
    int n = 0;
    double r = 0.0;
    double lower_lattice = 0.0;
    double upper_tiling = 0.0;
    double upper_rogers = 0.0;
    double witness_best = 0.0;
    double ref_2n = 0.0;
    double ref_2n_delta = 0.0;
};

struct SweepOptions {
    std::string kind = "cube";  ///< cube, ball or cross (U = kind of radius 1)
    std::uint64_t seed = 1;
    double tol = 1e-10;
    bool witnesses = true;
    std::uint64_t lattice_witness_budget = 4'000'000;
};

/// One row per (n, r) in the given order; cells are computed concurrently.
std::vector<SweepRow> sweep(const std::vector<int>& dims, const std::vector<double>& radii, const SweepOptions& options);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
/// Whitespace-separated columns with a '#' header, one blank line between dimensions.
void write_sweep_dat(std::ostream& out, const std::vector<SweepRow>& rows);

} // namespace pdcert
