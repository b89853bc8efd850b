#include "umac/signal_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "umac/io_util.hpp"
#include "umac/rng.hpp"

namespace umac::sig {

namespace {

// One canonical primitive polynomial per order. Taps are the nonzero
// exponents below the leading term of x^m + ... + 1 (the +1 is implicit in
// the Fibonacci feedback through the output bit). Classic minimal-tap
// maximal-length choices.
const std::vector<int>& builtin_taps(int order) {
    static const std::vector<std::vector<int>> table = {
        {3, 2}, {4, 3}, {5, 3}, {6, 5}, {7, 6}, {8, 6, 5, 4}, {9, 5}, {10, 7},
    };
    if (order < 3 || order > 10)
        throw std::invalid_argument("m_sequence: built-in taps cover orders 3..10");
    return table[order - 3];
}

// Reciprocal polynomial: interior exponents map e -> m - e; x^m and the
// constant term stay put. Primitive in, primitive out.
std::vector<int> reciprocal_taps(int order, const std::vector<int>& taps) {
    std::vector<int> out{order};
    for (int e : taps)
        if (e != order) out.push_back(order - e);
    std::sort(out.begin(), out.end(), std::greater<int>());
    return out;
}

}  // namespace

ComplexSequence zc_sequence(const ZcParams& params) {
    const int n = params.n_points;
    const int root = params.root;
    if (n < 2) throw std::invalid_argument("zc_sequence: n_points must be >= 2");
    if (root < 1 || std::gcd(root, n) != 1)
        throw std::invalid_argument("zc_sequence: root must be >= 1 and coprime to n_points");

    ComplexSequence out;
    out.sample_rate_hz = kIsmSampleRateHz;
    out.samples.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        // Odd length uses i(i+1), even length uses i^2.
        const double num = (n % 2 == 1) ? static_cast<double>(i) * (i + 1)
                                        : static_cast<double>(i) * i;
        const double phase = -kPi * root * num / n;
        out.samples[static_cast<std::size_t>(i)] = {std::cos(phase), std::sin(phase)};
    }
    return out;
}

MSequence m_sequence(int order, std::uint32_t seed) {
    return m_sequence(order, builtin_taps(order), seed);
}

MSequence m_sequence(int order, const std::vector<int>& taps, std::uint32_t seed) {
    if (order < 2 || order > 24)
        throw std::invalid_argument("m_sequence: order out of supported range");
    const std::uint32_t mask = (1u << order) - 1u;
    if ((seed & mask) == 0)
        throw std::invalid_argument("m_sequence: seed must be nonzero in the low bits");
    for (int t : taps)
        if (t < 1 || t > order)
            throw std::invalid_argument("m_sequence: tap exponents must lie in 1..order");

    const int period = (1 << order) - 1;
    MSequence out;
    out.order = order;
    out.taps = taps;
    out.seed = seed;
    out.chips.reserve(static_cast<std::size_t>(period));

    // Fibonacci LFSR, right-shifting; the bit at position (order - t) holds
    // the tap for exponent t. Output is the low bit before the shift.
    std::uint32_t state = seed & mask;
    const std::uint32_t start = state;
    for (int step = 0; step < period; ++step) {
        std::uint32_t fb = 0;
        for (int t : taps) fb ^= (state >> (order - t)) & 1u;
        const std::uint32_t out_bit = state & 1u;
        out.chips.push_back(out_bit ? 1 : -1);
        state = (state >> 1) | (fb << (order - 1));
        if (state == start && step != period - 1)
            throw std::invalid_argument("m_sequence: taps are not primitive (short cycle)");
    }
    if (state != start)
        throw std::invalid_argument("m_sequence: taps are not primitive (period mismatch)");
    // Maximal-length check doubles as a balance check: ones outnumber zeros
    // by exactly one per period, so the chip sum must be +1.
    long sum = 0;
    for (int c : out.chips) sum += c;
    if (sum != 1)
        throw std::invalid_argument("m_sequence: balance check failed");
    return out;
}

MSequence pis_code(int order) { return m_sequence(order, builtin_taps(order), 1); }

MSequence sis_code(int order) {
    return m_sequence(order, reciprocal_taps(order, builtin_taps(order)), 1);
}

ComplexSequence build_interrupt_signal(const MSequence& code, const ComplexSequence& zc) {
    if (code.chips.empty() || zc.samples.empty())
        throw std::invalid_argument("build_interrupt_signal: empty code or base sequence");
    const std::size_t n = zc.samples.size();
    const std::size_t q = code.chips.size();
    ComplexSequence out;
    out.sample_rate_hz = zc.sample_rate_hz;
    out.samples.resize(q * n);
    for (std::size_t i = 0; i < q * n; ++i)
        out.samples[i] = static_cast<double>(code.chips[i / n]) * zc.samples[i % n];
    return out;
}

double sidelobe_direct(const ComplexSequence& zc, int shift) {
    const int n = static_cast<int>(zc.samples.size());
    if (shift < 1 || shift >= n)
        throw std::invalid_argument("sidelobe_direct: shift must be in 1..N-1");
    cplx acc{0.0, 0.0};
    for (int i = 0; i + shift < n; ++i)
        acc += std::conj(zc.samples[static_cast<std::size_t>(i)]) *
               zc.samples[static_cast<std::size_t>(i + shift)];
    return 2.0 * std::abs(acc);
}

std::vector<double> sidelobe_profile(int n_points, int root) {
    if (n_points < 2) throw std::invalid_argument("sidelobe_profile: n_points must be >= 2");
    if (root < 1 || std::gcd(root, n_points) != 1)
        throw std::invalid_argument("sidelobe_profile: root must be coprime to n_points");

    const ComplexSequence zc = zc_sequence({n_points, root});
    std::vector<double> out(static_cast<std::size_t>(n_points - 1));
    const std::int64_t n64 = n_points;
    for (std::int64_t l = 1; l < n64; ++l) {
        // sin(pi*k/N) is 2N-periodic in the integer k, so reduce root*l and
        // root*l^2 mod 2N before touching floating point. Exact zeros then
        // come out exact instead of drowning in rounding noise when the raw
        // products are large.
        const std::int64_t kd = (root * l) % (2 * n64);
        const std::int64_t kn = (root * l * l) % (2 * n64);
        const double den = std::sin(kPi * static_cast<double>(kd) / n_points);
        if (std::abs(den) < 1e-9) {
            out[static_cast<std::size_t>(l - 1)] = sidelobe_direct(zc, static_cast<int>(l));
        } else {
            const double num = std::sin(kPi * static_cast<double>(kn) / n_points);
            out[static_cast<std::size_t>(l - 1)] = 2.0 * std::abs(num / den);
        }
    }
    return out;
}

int optimal_root(int n_points) {
    if (n_points < 2) throw std::invalid_argument("optimal_root: n_points must be >= 2");
    // Roots r and N-r produce identical sidelobe magnitudes, so exact ties are
    // the norm; the tolerance absorbs rounding and the ascending scan keeps
    // the smaller root of a tied pair.
    constexpr double kTie = 1e-6;
    int best_root = -1;
    double best_max = 0.0;
    double best_sum = 0.0;
    for (int root = 1; root < n_points; ++root) {
        if (std::gcd(root, n_points) != 1) continue;
        const std::vector<double> prof = sidelobe_profile(n_points, root);
        const double mx = *std::max_element(prof.begin(), prof.end());
        const double sum = std::accumulate(prof.begin(), prof.end(), 0.0);
        const bool better = best_root < 0 || mx < best_max - kTie ||
                            (std::abs(mx - best_max) <= kTie && sum < best_sum - kTie);
        if (better) {
            best_root = root;
            best_max = mx;
            best_sum = sum;
        }
    }
    return best_root;
}

void write_csv(const ComplexSequence& seq, const std::string& path) {
    std::string body = "index,re,im\n";
    body.reserve(seq.samples.size() * 48 + body.size());
    for (std::size_t i = 0; i < seq.samples.size(); ++i) {
        char line[96];
        std::snprintf(line, sizeof line, "%zu,%.17g,%.17g\n", i, seq.samples[i].real(),
                      seq.samples[i].imag());
        body += line;
    }
    io::atomic_write(path, body);
}

void write_raw_iq(const ComplexSequence& seq, const std::string& path) {
    std::string body;
    body.reserve(seq.samples.size() * 8);
    for (const cplx& s : seq.samples) {
        const float re = static_cast<float>(s.real());
        const float im = static_cast<float>(s.imag());
        io::append_le_float(body, re);
        io::append_le_float(body, im);
    }
    io::atomic_write(path, body);
}

}  // namespace umac::sig
