#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

namespace pdcert {

enum class Direction { Lower, Upper };

enum class Method {
    TilingCover,
    RogersFormula,
    Subset,
    Chain,
    Lattice,
    WitnessFamily,
    WitnessRandom,
    LatticeWitness,
};

std::string_view to_string(Direction d);
std::string_view to_string(Method m);
Direction direction_from_string(std::string_view s);
Method method_from_string(std::string_view s);

/// One bound on C_n(U, V) together with how it was obtained.
///
/// Certified entries carry enough in `audit` to be recomputed from scratch.
/// Witness entries are lower bounds with `error_bar` set to the quadrature
/// error; their usable value is `value - error_bar`.
struct BoundEntry {
    double value = 0.0;
    Direction direction = Direction::Upper;
    Method method = Method::RogersFormula;
    bool certified = false;
    double error_bar = 0.0;
    nlohmann::json audit = nlohmann::json::object();

    double usable_value() const { return direction == Direction::Lower ? value - error_bar : value + error_bar; }
};

void to_json(nlohmann::json& j, const BoundEntry& e);
void from_json(const nlohmann::json& j, BoundEntry& e);

} // namespace pdcert
