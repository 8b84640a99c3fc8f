#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "pdcert/geometry.hpp"
#include "pdcert/lattices.hpp"
#include "pdcert/witness.hpp"

namespace pdcert {

/// Parses `ball:R`, `box:w1,...,wn`, `cross:R` or `sum(<body>,<body>)`.
///
/// Balls and cross-polytopes need `dim` (or a box sibling inside a sum to
/// infer it from). A single box width is broadcast to `dim` coordinates.
/// Errors are ParseError with the offending offset.
ConvexBody parse_body(std::string_view text, std::optional<int> dim = std::nullopt);

/// Shortest round-trip literal for a body; parse_body(to_literal(b)) == b.
std::string to_literal(const ConvexBody& body);

/// `lattice:Zn`, `lattice:A2`, `lattice:Dk`, `lattice:E8` or
/// `lattice:matrix[a,b;c,d]` (row-major, generators are the columns).
/// The `lattice:` prefix is optional.
Lattice parse_lattice(std::string_view text, std::optional<int> dim = std::nullopt);
std::string to_literal(const Lattice& lattice);

/// `gauss:σ`, `autocorr:<body>`, `cms:seed=S,J=J,scale=s` or
/// `latdir:<lattice>,R=r`. `default_scale` fills a missing cms scale.
WitnessFunction parse_witness(std::string_view text, int dim, double default_scale);

std::string format_number(double x);

} // namespace pdcert
