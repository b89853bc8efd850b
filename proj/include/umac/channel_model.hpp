// Received-waveform synthesis: scaled interrupt signal plus OFDM-style
// bandlimited interference plus circularly-symmetric Gaussian noise, and the
// SINR bookkeeping that goes with it.
#pragma once

#include <string>

#include "umac/rng.hpp"
#include "umac/signal_core.hpp"

namespace umac::chan {

using sig::ComplexSequence;
using sig::cplx;

enum class Constellation { QPSK, QAM16 };

struct ChannelParams {
    double rho_i = 1.5e-4;     // interrupt signal average received power, W
    double rho_x = 0.0;        // interference average received power, W
    double sigma_w2 = 1.5e-4;  // noise power, W
    double oversample_f = 7.5; // 150 MHz / 20 MHz
    int ifft_size = 64;        // interferer IFFT size M
    Constellation constellation = Constellation::QPSK;
    // Draw the interferer's symbol boundary uniformly instead of pinning it
    // to sample 0 of the window.
    bool randomize_symbol_alignment = false;

    // F*M, the interferer's samples per OFDM symbol on the 150 MHz grid.
    int samples_per_symbol() const;
    void validate() const;
};

// One constellation point with E|s|^2 = ifft_size. Factored out so the
// detector's collapsed sampler consumes the random stream exactly like the
// waveform generator below.
cplx draw_constellation_symbol(Constellation c, int ifft_size, Rng& rng);

// Unit-average-power OFDM interference: per symbol, M i.i.d. constellation
// points s[k] with E|s|^2 = M, upsampled onto the 150 MHz grid as
// x[l] = (1/M) * sum_k s[k] exp(j 2 pi k l / (F M)). The sqrt(rho_x) scale
// is applied by compose_received, not here.
ComplexSequence gen_wifi_interference(std::size_t n_samples, const ChannelParams& params,
                                      Rng& rng);

// i.i.d. complex Gaussian noise, total variance sigma_w2 per sample
// (sigma_w2 / 2 per quadrature).
ComplexSequence gen_awgn(std::size_t n_samples, double sigma_w2, Rng& rng);

// Full received window: sqrt(rho_i) * pis embedded at offset (pis may be
// null for a signal-free window), plus sqrt(rho_x) * interference, plus
// noise. Draw order is fixed: interference, then noise, then the embedding.
ComplexSequence compose_received(const ComplexSequence* pis, std::size_t offset,
                                 std::size_t n_samples, const ChannelParams& params,
                                 Rng& rng);

// 10 log10(rho_i / (rho_x + sigma_w2)).
double sinr_db(const ChannelParams& params);

// Inverse of sinr_db in rho_x: the interference power that hits the target
// SINR with rho_i and sigma_w2 held fixed. Negative results mean the target
// is unreachable by adding interference and are reported as an error.
double rho_x_for_sinr_db(double target_sinr_db, double rho_i, double sigma_w2);

}  // namespace umac::chan
