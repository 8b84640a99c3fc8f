#include "pdcert/bounds.hpp"

#include <array>
#include <utility>

#include "pdcert/error.hpp"

namespace pdcert {

namespace {

constexpr std::array<std::pair<Method, std::string_view>, 8> kMethodNames{{
    {Method::TilingCover, "tiling-cover"},
    {Method::RogersFormula, "rogers-formula"},
    {Method::Subset, "subset"},
    {Method::Chain, "chain"},
    {Method::Lattice, "lattice"},
    {Method::WitnessFamily, "witness-family"},
    {Method::WitnessRandom, "witness-random"},
    {Method::LatticeWitness, "lattice-witness"},
}};

} // namespace

std::string_view to_string(Direction d)
{
    return d == Direction::Lower ? "lower" : "upper";
}

std::string_view to_string(Method m)
{
    for (const auto& [method, name] : kMethodNames) {
        if (method == m) return name;
    }
    return "unknown";
}

Direction direction_from_string(std::string_view s)
{
    if (s == "lower") return Direction::Lower;
    if (s == "upper") return Direction::Upper;
    throw Error(ErrorCode::Parse, "unknown bound direction '" + std::string(s) + "'");
}

Method method_from_string(std::string_view s)
{
    for (const auto& [method, name] : kMethodNames) {
        if (name == s) return method;
    }
    throw Error(ErrorCode::Parse, "unknown bound method '" + std::string(s) + "'");
}

void to_json(nlohmann::json& j, const BoundEntry& e)
{
    j = nlohmann::json{
        {"value", e.value},
        {"direction", to_string(e.direction)},
        {"method", to_string(e.method)},
        {"certified", e.certified},
        {"error_bar", e.error_bar},
        {"audit", e.audit},
    };
}

void from_json(const nlohmann::json& j, BoundEntry& e)
{
    e.value = j.at("value").get<double>();
    e.direction = direction_from_string(j.at("direction").get<std::string>());
    e.method = method_from_string(j.at("method").get<std::string>());
    e.certified = j.at("certified").get<bool>();
    e.error_bar = j.value("error_bar", 0.0);
    e.audit = j.value("audit", nlohmann::json::object());
}

} // namespace pdcert
