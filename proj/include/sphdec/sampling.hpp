#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

#include "sphdec/decoder.hpp"
#include "sphdec/matrix.hpp"
#include "sphdec/triangular.hpp"

namespace sphdec {

// All randomness is derived from one 64-bit seed. Per-object streams are
// keyed by (seed, tag, indices) through the splitmix64 finalizer, so every
// trial's bytes are a pure function of its coordinates and independent of
// generation order. Variates come from a single-seeded mt19937_64 (fully
// specified by the standard) with explicit mappings below, which keeps the
// streams identical across platforms.
namespace rngdetail {

constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace rngdetail

enum class stream_tag : std::uint64_t {
    gaussian_matrix = 1,
    voronoi = 2,
    pam_symbols = 3,
    awgn = 4,
    probe_point = 5,
};

inline std::uint64_t derive_key(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    std::uint64_t k = rngdetail::mix64(seed);
    for (std::uint64_t p : path) k = rngdetail::mix64(k ^ p);
    return k;
}

inline std::uint64_t key_part(stream_tag t) { return static_cast<std::uint64_t>(t); }
inline std::uint64_t key_part(double x) { return std::bit_cast<std::uint64_t>(x); }

class stream_rng {
public:
    explicit stream_rng(std::uint64_t key) : eng_(key) {}

    // Uniform on [0, 1), 53 usable bits.
    double uniform01() { return double(eng_() >> 11) * 0x1.0p-53; }

    // Standard normal via the Box-Muller transform, generated in pairs.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double a = std::sqrt(-2.0 * std::log(1.0 - uniform01()));
        const double t = 6.283185307179586476925286766559 * uniform01();
        spare_ = a * std::sin(t);
        have_spare_ = true;
        return a * std::cos(t);
    }

    // Uniform integer in [lo, hi] by rejection.
    long long uniform_int(long long lo, long long hi) {
        const std::uint64_t span = std::uint64_t(hi - lo) + 1;
        const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % span;
        std::uint64_t x;
        do {
            x = eng_();
        } while (x >= limit);
        return lo + static_cast<long long>(x % span);
    }

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// n x n matrix of i.i.d. zero-mean unit-variance Gaussian entries,
// deterministic per (n, seed).
inline matrix random_gaussian_matrix(std::size_t n, std::uint64_t seed) {
    if (n == 0) throw argument_error("random_gaussian_matrix: n must be positive");
    stream_rng rng(derive_key(seed, {key_part(stream_tag::gaussian_matrix), n}));
    matrix g(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) g(i, j) = rng.gaussian();
    return g;
}

// A point uniform over the Voronoi region of the origin: draw w uniform on
// [0,1)^n, fold x = w*G back by subtracting its closest lattice point. The
// folding decode is done with the eager H-form engine; its operation
// counts are discarded.
inline std::vector<double> uniform_voronoi_sample(const lower_triangular_pair& pair,
                                                  std::uint64_t seed, decoder& folding) {
    const std::size_t n = pair.dimension();
    stream_rng rng(derive_key(seed, {key_part(stream_tag::voronoi), n}));
    std::vector<double> w(n);
    for (double& x : w) x = rng.uniform01();
    std::vector<double> point = row_times_matrix<double>(w, pair.g);
    const decode_result res = folding.decode(point);
    for (std::size_t j = 0; j < n; ++j) {
        const double c = double(res.coefficients[j]);
        if (c == 0.0) continue;
        for (std::size_t k = 0; k <= j; ++k) point[k] -= c * pair.g(j, k);
    }
    return point;
}

inline std::vector<double> uniform_voronoi_sample(const lower_triangular_pair& pair,
                                                  std::uint64_t seed) {
    decoder folding(decoder_config::from_algorithm(3), pair);
    return uniform_voronoi_sample(pair, seed, folding);
}

// Average symbol energy of the centered L-point signal set
// {-(L-1)/2, ..., (L-1)/2}.
inline double pam_symbol_energy(std::size_t points) {
    const double l = double(points);
    return (l * l - 1.0) / 12.0;
}

// Per-dimension noise variance that realizes the requested Eb/N0 (dB) for
// an L-point constellation: Eb = Es / log2 L, noise variance N0/2.
inline double pam_noise_variance(std::size_t points, double snr_db) {
    if (points < 2) throw argument_error("pam_noise_variance: need at least two points");
    if (!std::isfinite(snr_db)) throw argument_error("pam_noise_variance: non-finite SNR");
    const double eb = pam_symbol_energy(points) / std::log2(double(points));
    const double n0 = eb / std::pow(10.0, snr_db / 10.0);
    return n0 / 2.0;
}

inline std::vector<long long> pam_symbols(std::size_t n, std::size_t points, std::uint64_t key) {
    stream_rng rng(key);
    std::vector<long long> u(n);
    for (auto& x : u) x = rng.uniform_int(0, static_cast<long long>(points) - 1);
    return u;
}

// symbols * g plus white Gaussian noise of the given per-dimension sigma.
inline std::vector<double> pam_received(const matrix& g, std::span<const long long> symbols,
                                        double sigma, std::uint64_t key) {
    std::vector<double> r = row_times_matrix<long long>(symbols, g);
    stream_rng rng(key);
    for (double& x : r) x += sigma * rng.gaussian();
    return r;
}

// One decodable observation of an L-PAM transmission over an AWGN channel
// with a fresh Gaussian channel matrix. Symbols are drawn from the integer
// range {0, ..., L-1}; the canonical centered signal set is this range
// shifted by (L-1)/2, a fixed translation that affects neither the noise
// nor which symbol vector is closest, so the energy accounting above uses
// the centered set while decoding stays on the integer range.
struct channel_instance {
    matrix g;
    std::vector<long long> symbols;
    std::vector<double> received;
};

inline channel_instance pam_channel_instance(std::size_t n, std::size_t points, double snr_db,
                                             std::uint64_t seed) {
    if (n == 0) throw argument_error("pam_channel_instance: n must be positive");
    channel_instance inst;
    inst.g = random_gaussian_matrix(n, seed);
    inst.symbols = pam_symbols(
        n, points, derive_key(seed, {key_part(stream_tag::pam_symbols), n, points}));
    inst.received = pam_received(
        inst.g, inst.symbols, std::sqrt(pam_noise_variance(points, snr_db)),
        derive_key(seed, {key_part(stream_tag::awgn), n, points, key_part(snr_db)}));
    return inst;
}

} // namespace sphdec
