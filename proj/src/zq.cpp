#include "pdcert/zq.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <future>
#include <limits>
#include <numbers>
#include <thread>

#include "pdcert/error.hpp"
#include "pdcert/random.hpp"

namespace pdcert {

namespace {

constexpr std::int64_t kMaxModulus = 1 << 16;

/// cos and sin of 2πj/q, mirrored so that entry q-j is the exact conjugate of entry j.
struct CharacterTable {
    std::vector<double> c, s;

    explicit CharacterTable(std::int64_t q) : c(static_cast<std::size_t>(q)), s(static_cast<std::size_t>(q))
    {
        for (std::int64_t j = 0; 2 * j <= q; ++j) {
            const double t = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(q);
            c[static_cast<std::size_t>(j)] = std::cos(t);
            s[static_cast<std::size_t>(j)] = std::sin(t);
            if (j > 0 && 2 * j != q) {
                c[static_cast<std::size_t>(q - j)] = c[static_cast<std::size_t>(j)];
                s[static_cast<std::size_t>(q - j)] = -s[static_cast<std::size_t>(j)];
            }
        }
        if (q % 2 == 0) s[static_cast<std::size_t>(q / 2)] = 0.0;
    }
};

void check_modulus(std::int64_t q)
{
    if (q < 2 || q > kMaxModulus) throw Error(ErrorCode::BadParameters, "modulus must lie in [2, 65536]");
}

ZqWitness build(std::int64_t q, std::vector<std::pair<std::int64_t, double>> coeffs, const CharacterTable& table,
                std::int64_t k_max)
{
    ZqWitness w;
    w.q = q;
    std::sort(coeffs.begin(), coeffs.end());
    for (const auto& [m, c] : coeffs) {
        if (m < 0 || m >= q) throw Error(ErrorCode::BadParameters, "frequency outside [0, q)");
        if (!(c >= 0.0)) throw Error(ErrorCode::BadParameters, "coefficients must be non-negative");
        if (!w.coeffs.empty() && w.coeffs.back().first == m) w.coeffs.back().second += c;
        else w.coeffs.emplace_back(m, c);
    }
    const std::int64_t upto = std::min(k_max, q - 1);
    w.values.assign(static_cast<std::size_t>(upto + 1), 0.0);
    for (std::int64_t k = 0; k <= upto; ++k) {
        double re = 0.0, im = 0.0;
        for (const auto& [m, c] : w.coeffs) {
            const auto idx = static_cast<std::size_t>((m * k) % q);
            re += c * table.c[idx];
            im += c * table.s[idx];
        }
        w.values[static_cast<std::size_t>(k)] = re * re + im * im;
    }
    return w;
}

std::vector<std::pair<std::int64_t, double>> fejer_coeffs(std::int64_t q, std::int64_t N)
{
    N = std::clamp<std::int64_t>(N, 1, q);
    std::vector<std::pair<std::int64_t, double>> out;
    for (std::int64_t m = 0; m < N; ++m) out.emplace_back(m, 1.0 - static_cast<double>(m) / static_cast<double>(N));
    return out;
}

/// Knuth's multiplication method; fine for small means.
int poisson(Engine& rng, double mean)
{
    const double limit = std::exp(-mean);
    double p = 1.0;
    int k = 0;
    do {
        ++k;
        p *= uniform01(rng);
    } while (p > limit);
    return k - 1;
}

std::vector<std::pair<std::int64_t, double>> random_coeffs(std::int64_t q, std::uint64_t seed, std::int64_t trial)
{
    Engine rng = make_engine(seed, static_cast<std::uint64_t>(trial));
    const int support = std::max(1, poisson(rng, 8.0));
    std::vector<std::pair<std::int64_t, double>> out;
    for (int i = 0; i < support; ++i) {
        const auto m = static_cast<std::int64_t>(uniform01(rng) * static_cast<double>(q));
        out.emplace_back(std::min(m, q - 1), uniform_open_closed(rng));
    }
    return out;
}

double ratio_of(const ZqWitness& w, std::int64_t n)
{
    if (w.coeffs.empty() || std::all_of(w.coeffs.begin(), w.coeffs.end(), [](const auto& p) { return p.second == 0.0; })) {
        throw Error(ErrorCode::ZeroWitness, "all coefficients are zero");
    }
    double num = 0.0, den = 0.0;
    for (std::int64_t k = 0; k <= 2 * n; ++k) {
        const double f = w.values[static_cast<std::size_t>(k)];
        num += f;
        if (k <= n) den += f;
    }
    return num / den;
}

struct Candidate {
    double ratio = -std::numeric_limits<double>::infinity();
    double min_ratio = std::numeric_limits<double>::infinity();
    double min_dft = std::numeric_limits<double>::infinity();
    bool symmetric = true;
    std::string label;
    std::string digest;

    void offer(const ZqWitness& w, std::int64_t n, const std::string& name, bool audit)
    {
        const double r = ratio_of(w, n);
        min_ratio = std::min(min_ratio, r);
        if (audit) {
            min_dft = std::min(min_dft, zq_min_dft(w));
            for (std::int64_t k = 1; k < w.q; ++k) {
                if (w.values[static_cast<std::size_t>(k)] != w.values[static_cast<std::size_t>(w.q - k)]) symmetric = false;
            }
        }
        if (r > ratio) {
            ratio = r;
            label = name;
            digest = zq_digest(w);
        }
    }

    void merge(const Candidate& other)
    {
        if (other.ratio > ratio) {
            ratio = other.ratio;
            label = other.label;
            digest = other.digest;
        }
        min_ratio = std::min(min_ratio, other.min_ratio);
        min_dft = std::min(min_dft, other.min_dft);
        symmetric = symmetric && other.symmetric;
    }
};

} // namespace

ZqWitness make_zq_witness(std::int64_t q, std::vector<std::pair<std::int64_t, double>> coeffs)
{
    check_modulus(q);
    return build(q, std::move(coeffs), CharacterTable(q), q - 1);
}

double zq_ratio(const ZqWitness& w, std::int64_t n)
{
    if (n < 0 || 2 * n >= w.q) throw Error(ErrorCode::BadParameters, "zq_ratio needs 0 <= 2n < q");
    return ratio_of(w, n);
}

double zq_min_dft(const ZqWitness& w)
{
    if (static_cast<std::int64_t>(w.values.size()) != w.q) {
        throw Error(ErrorCode::BadParameters, "DFT audit needs all q values");
    }
    if (w.q > 4096) throw Error(ErrorCode::ResourceCap, "DFT audit is limited to q <= 4096");
    const CharacterTable table(w.q);
    double lowest = std::numeric_limits<double>::infinity();
    for (std::int64_t j = 0; j < w.q; ++j) {
        double re = 0.0;
        for (std::int64_t k = 0; k < w.q; ++k) re += w.values[static_cast<std::size_t>(k)] * table.c[static_cast<std::size_t>((j * k) % w.q)];
        lowest = std::min(lowest, re);
    }
    return lowest;
}

ZqWitness fejer_witness(std::int64_t q, std::int64_t N)
{
    check_modulus(q);
    return make_zq_witness(q, fejer_coeffs(q, N));
}

std::string zq_digest(const ZqWitness& w)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](const void* data, std::size_t len) {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= bytes[i];
            h *= 0x100000001b3ULL;
        }
    };
    feed(&w.q, sizeof w.q);
    for (const auto& [m, c] : w.coeffs) {
        feed(&m, sizeof m);
        std::uint64_t bits = 0;
        std::memcpy(&bits, &c, sizeof bits);
        feed(&bits, sizeof bits);
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

nlohmann::json ZqExperiment::to_json() const
{
    nlohmann::json j{
        {"q", q},
        {"n", n},
        {"trials", trials},
        {"max_ratio", max_ratio},
        {"pi_sq_margin", std::numbers::pi * std::numbers::pi - max_ratio},
        {"argmax", argmax},
        {"argmax_digest", argmax_digest},
        {"min_ratio", min_ratio},
        {"symmetric", symmetric},
    };
    j["min_dft"] = std::isnan(min_dft) ? nlohmann::json(nullptr) : nlohmann::json(min_dft);
    return j;
}

ZqExperiment zq_max_experiment(std::int64_t q, std::int64_t n, std::int64_t trials, std::uint64_t seed)
{
    check_modulus(q);
    if (n < 0 || 2 * n >= q) throw Error(ErrorCode::BadParameters, "experiment needs 0 <= 2n < q");
    if (trials < 1) throw Error(ErrorCode::BadParameters, "experiment needs at least one trial");
    const CharacterTable table(q);
    const bool audit = q <= 256;
    const std::int64_t k_max = audit ? q - 1 : 2 * n;

    Candidate fixed;
    fixed.offer(build(q, {{0, 1.0}}, table, k_max), n, "constant", audit);
    for (const std::int64_t N : {std::max<std::int64_t>(1, n / 2), std::max<std::int64_t>(1, n), 2 * n}) {
        fixed.offer(build(q, fejer_coeffs(q, N), table, k_max), n, "fejer:" + std::to_string(N), audit);
    }

    const auto workers = static_cast<std::int64_t>(std::max(1U, std::thread::hardware_concurrency()));
    const std::int64_t chunk = (trials + workers - 1) / workers;
    std::vector<std::future<Candidate>> parts;
    for (std::int64_t begin = 0; begin < trials; begin += chunk) {
        const std::int64_t end = std::min(trials, begin + chunk);
        parts.push_back(std::async(std::launch::async, [&, begin, end] {
            Candidate local;
            for (std::int64_t t = begin; t < end; ++t) {
                local.offer(build(q, random_coeffs(q, seed, t), table, k_max), n, "trial:" + std::to_string(t), audit);
            }
            return local;
        }));
    }
    // Chunks are merged in trial order and ties keep the earlier witness.
    Candidate best = fixed;
    for (auto& p : parts) best.merge(p.get());

    ZqExperiment out;
    out.q = q;
    out.n = n;
    out.trials = trials;
    out.max_ratio = best.ratio;
    out.argmax = best.label;
    out.argmax_digest = best.digest;
    out.min_ratio = best.min_ratio;
    out.min_dft = audit ? best.min_dft : std::numeric_limits<double>::quiet_NaN();
    out.symmetric = best.symmetric;
    return out;
}

} // namespace pdcert
