#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace pdcert {

/// f(k) = |Σ_m c_m e(mk/q)|² on Z_q with c_m >= 0.
struct ZqWitness {
    std::int64_t q = 0;
    std::vector<std::pair<std::int64_t, double>> coeffs;  ///< sparse (m, c_m), m in [0, q)
    std::vector<double> values;                            ///< f(0), ..., f(q-1)
};

ZqWitness make_zq_witness(std::int64_t q, std::vector<std::pair<std::int64_t, double>> coeffs);

/// Σ_{k<=2n} f(k) / Σ_{k<=n} f(k); needs 2n < q.
double zq_ratio(const ZqWitness& w, std::int64_t n);

/// Smallest real part of the DFT of f, computed directly (q <= 4096).
double zq_min_dft(const ZqWitness& w);

/// c_m = max(0, 1 - m/N) for 0 <= m < N.
ZqWitness fejer_witness(std::int64_t q, std::int64_t N);

/// FNV-1a over the coefficient list, as 16 hex digits.
std::string zq_digest(const ZqWitness& w);

struct ZqExperiment {
    std::int64_t q = 0;
    std::int64_t n = 0;
    std::int64_t trials = 0;
    double max_ratio = 0.0;
    std::string argmax;         ///< "trial:<i>", "constant" or "fejer:<N>"
    std::string argmax_digest;
    double min_ratio = 0.0;
    double min_dft = 0.0;       ///< over all witnesses when q <= 256, else NaN
    bool symmetric = true;

    nlohmann::json to_json() const;
};

/// Random sparse witnesses (Poisson(8) support, weights in (0, 1]) plus the
/// constant and Fejér witnesses. Deterministic given seed.
ZqExperiment zq_max_experiment(std::int64_t q, std::int64_t n, std::int64_t trials, std::uint64_t seed);

} // namespace pdcert
