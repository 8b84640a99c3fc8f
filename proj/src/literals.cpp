#include "pdcert/literals.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <vector>

namespace pdcert {

namespace {

class Cursor {
public:
    explicit Cursor(std::string_view text) : text_(text) {}

    std::size_t pos() const { return pos_; }
    bool done() const { return pos_ >= text_.size(); }
    char peek() const { return done() ? '\0' : text_[pos_]; }
    std::string_view rest() const { return text_.substr(std::min(pos_, text_.size())); }

    bool accept(std::string_view token)
    {
        if (rest().substr(0, token.size()) != token) return false;
        pos_ += token.size();
        return true;
    }

    void expect(std::string_view token)
    {
        if (!accept(token)) fail("expected '" + std::string(token) + "'");
    }

    bool at_number() const
    {
        const char c = peek();
        return std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '+';
    }

    double number()
    {
        const char* first = text_.data() + pos_;
        const char* last = text_.data() + text_.size();
        if (*first == '+') ++first;
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc() || ptr == first) fail("expected a number");
        pos_ = static_cast<std::size_t>(ptr - text_.data());
        if (!std::isfinite(value)) fail("number is not finite");
        return value;
    }

    std::int64_t integer()
    {
        const char* first = text_.data() + pos_;
        std::int64_t value = 0;
        const auto [ptr, ec] = std::from_chars(first, text_.data() + text_.size(), value);
        if (ec != std::errc() || ptr == first) fail("expected an integer");
        pos_ = static_cast<std::size_t>(ptr - text_.data());
        return value;
    }

    std::string word()
    {
        std::string out;
        while (!done() && std::isalnum(static_cast<unsigned char>(peek()))) out += text_[pos_++];
        if (out.empty()) fail("expected a name");
        return out;
    }

    void finish()
    {
        if (!done()) fail("unexpected trailing input");
    }

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(pos_, what); }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

double positive(Cursor& c, const char* what)
{
    const std::size_t at = c.pos();
    const double v = c.number();
    if (!(v > 0.0)) throw ParseError(at, std::string(what) + " must be positive");
    return v;
}

std::vector<double> number_list(Cursor& c, const char* what)
{
    std::vector<double> out{positive(c, what)};
    // A comma followed by another number continues the list; inside a sum a
    // comma followed by a letter starts the next summand.
    while (c.peek() == ',') {
        Cursor probe = c;
        probe.accept(",");
        if (!probe.at_number()) break;
        c.accept(",");
        out.push_back(positive(c, what));
    }
    return out;
}

/// A body parsed before its dimension is known.
struct Draft {
    enum class Tag { Ball, Box, Cross, Sum } tag;
    std::vector<double> values;
    std::vector<Draft> parts;
    std::size_t pos;
};

Draft parse_draft(Cursor& c)
{
    const std::size_t at = c.pos();
    if (c.accept("ball:")) return {Draft::Tag::Ball, {positive(c, "radius")}, {}, at};
    if (c.accept("cross:")) return {Draft::Tag::Cross, {positive(c, "radius")}, {}, at};
    if (c.accept("box:")) return {Draft::Tag::Box, number_list(c, "half-width"), {}, at};
    if (c.accept("sum(")) {
        Draft d{Draft::Tag::Sum, {}, {}, at};
        d.parts.push_back(parse_draft(c));
        c.expect(",");
        d.parts.push_back(parse_draft(c));
        c.expect(")");
        return d;
    }
    c.fail("expected ball:, box:, cross: or sum(");
}

std::optional<int> inferred_dim(const Draft& d)
{
    if (d.tag == Draft::Tag::Box && d.values.size() > 1) return static_cast<int>(d.values.size());
    for (const auto& p : d.parts) {
        if (auto n = inferred_dim(p)) return n;
    }
    return std::nullopt;
}

ConvexBody build(const Draft& d, int dim)
{
    switch (d.tag) {
    case Draft::Tag::Ball: return ConvexBody::ball(dim, d.values[0]);
    case Draft::Tag::Cross: return ConvexBody::cross_polytope(dim, d.values[0]);
    case Draft::Tag::Box: {
        if (d.values.size() == 1) return ConvexBody::cube(dim, d.values[0]);
        if (static_cast<int>(d.values.size()) != dim) {
            throw ParseError(d.pos, "box has " + std::to_string(d.values.size()) + " half-widths but dimension is " +
                                        std::to_string(dim));
        }
        return ConvexBody::box(Eigen::Map<const Eigen::VectorXd>(d.values.data(), dim));
    }
    case Draft::Tag::Sum: return minkowski_sum(build(d.parts[0], dim), build(d.parts[1], dim));
    }
    throw ParseError(d.pos, "unreachable");
}

std::string primitive_literal(const Primitive& p)
{
    return std::visit(
        [](const auto& prim) -> std::string {
            using P = std::decay_t<decltype(prim)>;
            if constexpr (std::is_same_v<P, Ball>) {
                return "ball:" + format_number(prim.radius);
            } else if constexpr (std::is_same_v<P, CrossPolytope>) {
                return "cross:" + format_number(prim.radius);
            } else {
                std::string s = "box:";
                for (Eigen::Index i = 0; i < prim.half_widths.size(); ++i) {
                    if (i) s += ',';
                    s += format_number(prim.half_widths(i));
                }
                return s;
            }
        },
        p);
}

} // namespace

std::string format_number(double x)
{
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), ptr);
}

ConvexBody parse_body(std::string_view text, std::optional<int> dim)
{
    Cursor c(text);
    const Draft d = parse_draft(c);
    c.finish();
    // A mismatch with an explicit dimension is reported by build(), at the offending box.
    const auto inferred = inferred_dim(d);
    int n = dim ? *dim : inferred.value_or(d.tag == Draft::Tag::Box ? 1 : 0);
    if (n < 1) throw ParseError(0, "dimension cannot be inferred from the literal; pass --dim");
    try {
        return build(d, n);
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(0, e.what());
    }
}

std::string to_literal(const ConvexBody& body)
{
    const auto parts = body.summands();
    if (parts.size() == 1) return primitive_literal(parts[0]);
    return "sum(" + primitive_literal(parts[0]) + "," + primitive_literal(parts[1]) + ")";
}

Lattice parse_lattice(std::string_view text, std::optional<int> dim)
{
    Cursor c(text);
    c.accept("lattice:");
    if (c.accept("matrix[")) {
        std::vector<std::vector<double>> rows(1);
        while (true) {
            rows.back().push_back(c.number());
            if (c.accept(",")) continue;
            if (c.accept(";")) {
                rows.emplace_back();
                continue;
            }
            c.expect("]");
            break;
        }
        c.finish();
        const auto n = rows.size();
        for (const auto& r : rows) {
            if (r.size() != n) throw ParseError(0, "lattice matrix must be square");
        }
        if (dim && static_cast<std::size_t>(*dim) != n) throw ParseError(0, "lattice matrix dimension differs from --dim");
        Eigen::MatrixXd m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
        try {
            return Lattice(m, "custom");
        } catch (const Error& e) {
            throw ParseError(0, e.what());
        }
    }
    const std::size_t at = c.pos();
    const std::string name = c.word();
    c.finish();
    std::string key = name;
    int n = dim.value_or(0);
    if (name == "Zn") {
        if (n < 1) throw ParseError(at, "lattice:Zn needs --dim");
    } else if (name.size() > 1 && std::isdigit(static_cast<unsigned char>(name[1]))) {
        const int given = std::stoi(name.substr(1));
        if (dim && *dim != given) throw ParseError(at, "lattice dimension differs from --dim");
        n = given;
        key = name[0] == 'Z' ? "Zn" : name;
    } else {
        throw ParseError(at, "unknown lattice '" + name + "'");
    }
    try {
        return catalog_entry(key, n).lattice;
    } catch (const Error& e) {
        throw ParseError(at, e.what());
    }
}

std::string to_literal(const Lattice& lattice)
{
    std::string s = "lattice:matrix[";
    const auto& m = lattice.basis();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        if (i) s += ';';
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) s += ',';
            s += format_number(m(i, j));
        }
    }
    return s + "]";
}

WitnessFunction parse_witness(std::string_view text, int dim, double default_scale)
{
    Cursor c(text);
    if (c.accept("gauss:")) {
        const double sigma = positive(c, "sigma");
        c.finish();
        return WitnessFunction::gaussian(dim, sigma);
    }
    if (c.accept("autocorr:")) {
        const std::size_t offset = c.pos();
        try {
            const ConvexBody h = parse_body(c.rest(), dim);
            return WitnessFunction::autocorrelation(h);
        } catch (const ParseError& e) {
            throw ParseError(offset + e.position(), e.what());
        } catch (const Error& e) {
            throw ParseError(offset, e.what());
        }
    }
    if (c.accept("cms:")) {
        std::uint64_t seed = 1;
        std::int64_t terms = 8;
        double scale = default_scale;
        while (!c.done()) {
            const std::size_t at = c.pos();
            if (c.accept("seed=")) {
                const auto s = c.integer();
                if (s < 0) throw ParseError(at, "seed must be non-negative");
                seed = static_cast<std::uint64_t>(s);
            } else if (c.accept("J=")) {
                terms = c.integer();
                if (terms < 1 || terms > 4096) throw ParseError(at, "J must lie in [1, 4096]");
            } else if (c.accept("scale=")) {
                scale = positive(c, "scale");
            } else {
                c.fail("expected seed=, J= or scale=");
            }
            if (!c.done()) c.expect(",");
        }
        return sample_double_pd(dim, static_cast<int>(terms), scale, seed);
    }
    if (c.accept("latdir:")) {
        const auto rest = c.rest();
        const auto split = rest.rfind(",R=");
        if (split == std::string_view::npos) c.fail("expected ',R=' after the lattice");
        const std::size_t offset = c.pos();
        Lattice lattice = [&] {
            try {
                return parse_lattice(rest.substr(0, split), dim);
            } catch (const ParseError& e) {
                throw ParseError(offset + e.position(), e.what());
            }
        }();
        Cursor r(rest.substr(split + 3));
        const double radius = positive(r, "R");
        if (!r.done()) throw ParseError(offset + split + 3 + r.pos(), "unexpected trailing input");
        return WitnessFunction::lattice_dirichlet(lattice, radius);
    }
    c.fail("expected gauss:, autocorr:, cms: or latdir:");
}

} // namespace pdcert
