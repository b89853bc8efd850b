#include "umac/channel_model.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace umac::chan {

int ChannelParams::samples_per_symbol() const {
    const double fm = oversample_f * ifft_size;
    const double rounded = std::round(fm);
    if (std::abs(fm - rounded) > 1e-9 || rounded < 1.0)
        throw std::invalid_argument(
            "ChannelParams: oversample_f * ifft_size must be a positive integer");
    return static_cast<int>(rounded);
}

void ChannelParams::validate() const {
    if (rho_i < 0.0 || rho_x < 0.0 || sigma_w2 < 0.0)
        throw std::invalid_argument("ChannelParams: powers must be nonnegative");
    if (ifft_size < 1) throw std::invalid_argument("ChannelParams: ifft_size must be >= 1");
    samples_per_symbol();  // throws if the sample grid is not integral
}

cplx draw_constellation_symbol(Constellation c, int ifft_size, Rng& rng) {
    const double m = ifft_size;
    switch (c) {
        case Constellation::QPSK: {
            const double a = std::sqrt(m / 2.0);
            const std::uint64_t bits = rng.uniform_int(4);
            return {(bits & 1) ? a : -a, (bits & 2) ? a : -a};
        }
        case Constellation::QAM16: {
            // Per-quadrature levels {-3,-1,1,3} scaled so E|s|^2 = M.
            static const double levels[4] = {-3.0, -1.0, 1.0, 3.0};
            const double a = std::sqrt(m / 10.0);
            const std::uint64_t bits = rng.uniform_int(16);
            return {a * levels[bits & 3], a * levels[(bits >> 2) & 3]};
        }
    }
    throw std::invalid_argument("ChannelParams: unknown constellation");
}

ComplexSequence gen_wifi_interference(std::size_t n_samples, const ChannelParams& params,
                                      Rng& rng) {
    if (n_samples < 1)
        throw std::invalid_argument("gen_wifi_interference: n_samples must be >= 1");
    params.validate();
    const int sps = params.samples_per_symbol();
    const int m = params.ifft_size;

    // All tone/sample products hit the sps-th roots of unity exactly.
    std::vector<cplx> twiddle(static_cast<std::size_t>(sps));
    for (int i = 0; i < sps; ++i) {
        const double ph = 2.0 * kPi * i / sps;
        twiddle[static_cast<std::size_t>(i)] = {std::cos(ph), std::sin(ph)};
    }

    // With randomized alignment the window starts mid-symbol: skip a uniform
    // number of samples of the first generated symbol.
    std::size_t skip = 0;
    if (params.randomize_symbol_alignment)
        skip = rng.uniform_int(static_cast<std::uint64_t>(sps));

    ComplexSequence out;
    out.sample_rate_hz = sig::kIsmSampleRateHz;
    out.samples.reserve(n_samples);
    std::vector<cplx> sym(static_cast<std::size_t>(m));
    while (out.samples.size() < n_samples) {
        for (int k = 0; k < m; ++k)
            sym[static_cast<std::size_t>(k)] =
                draw_constellation_symbol(params.constellation, m, rng);
        for (int l = static_cast<int>(skip); l < sps && out.samples.size() < n_samples; ++l) {
            cplx acc{0.0, 0.0};
            for (int k = 0; k < m; ++k)
                acc += sym[static_cast<std::size_t>(k)] *
                       twiddle[static_cast<std::size_t>((k * l) % sps)];
            out.samples.push_back(acc / static_cast<double>(m));
        }
        skip = 0;
    }
    return out;
}

ComplexSequence gen_awgn(std::size_t n_samples, double sigma_w2, Rng& rng) {
    if (sigma_w2 < 0.0) throw std::invalid_argument("gen_awgn: variance must be nonnegative");
    const double scale = std::sqrt(sigma_w2 / 2.0);  // per-quadrature sigma
    ComplexSequence out;
    out.sample_rate_hz = sig::kIsmSampleRateHz;
    out.samples.resize(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        auto [re, im] = rng.gaussian_pair();
        out.samples[i] = {scale * re, scale * im};
    }
    return out;
}

ComplexSequence compose_received(const ComplexSequence* pis, std::size_t offset,
                                 std::size_t n_samples, const ChannelParams& params,
                                 Rng& rng) {
    params.validate();
    if (pis && offset + pis->samples.size() > n_samples)
        throw std::invalid_argument("compose_received: embedded signal overruns the window");

    ComplexSequence out;
    if (params.rho_x > 0.0) {
        out = gen_wifi_interference(n_samples, params, rng);
        const double a = std::sqrt(params.rho_x);
        for (auto& s : out.samples) s *= a;
    } else {
        out.sample_rate_hz = sig::kIsmSampleRateHz;
        out.samples.assign(n_samples, cplx{0.0, 0.0});
    }

    if (params.sigma_w2 > 0.0) {
        const double scale = std::sqrt(params.sigma_w2 / 2.0);
        for (std::size_t i = 0; i < n_samples; ++i) {
            auto [re, im] = rng.gaussian_pair();
            out.samples[i] += cplx{scale * re, scale * im};
        }
    }

    if (pis) {
        const double a = std::sqrt(params.rho_i);
        for (std::size_t i = 0; i < pis->samples.size(); ++i)
            out.samples[offset + i] += a * pis->samples[i];
    }
    return out;
}

double sinr_db(const ChannelParams& params) {
    return 10.0 * std::log10(params.rho_i / (params.rho_x + params.sigma_w2));
}

double rho_x_for_sinr_db(double target_sinr_db, double rho_i, double sigma_w2) {
    const double rho_x = rho_i * std::pow(10.0, -target_sinr_db / 10.0) - sigma_w2;
    if (rho_x < 0.0)
        throw std::invalid_argument("rho_x_for_sinr_db: target above the noise-only SINR");
    return rho_x;
}

}  // namespace umac::chan
