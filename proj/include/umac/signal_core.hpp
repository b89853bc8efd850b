// Spread-spectrum interrupt signal construction: Zadoff-Chu base sequences,
// m-sequence block codes, and the Kronecker combination used as the
// primary/secondary interrupt signals (PIS/SIS) on the 150 MHz ISM band.
#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace umac::sig {

using cplx = std::complex<double>;

// ISM-band sample rate the interrupt signals are generated at.
inline constexpr double kIsmSampleRateHz = 150e6;

struct ComplexSequence {
    std::vector<cplx> samples;
    double sample_rate_hz = kIsmSampleRateHz;

    std::size_t size() const { return samples.size(); }
    const cplx& operator[](std::size_t i) const { return samples[i]; }
    cplx& operator[](std::size_t i) { return samples[i]; }
    double duration_s() const {
        return static_cast<double>(samples.size()) / sample_rate_hz;
    }
};

struct ZcParams {
    int n_points = 1024;  // sequence length N
    int root = 1;         // root index, coprime to N
};

// Maximum-length +-1 sequence together with the LFSR recipe that produced
// it, so any consumer can regenerate it bit-for-bit.
struct MSequence {
    std::vector<int> chips;  // +-1 values, period 2^order - 1
    int order = 0;
    std::vector<int> taps;   // feedback polynomial exponents, descending
    std::uint32_t seed = 1;

    int q() const { return static_cast<int>(chips.size()); }
    int operator[](std::size_t i) const { return chips[i]; }
};

// Chirp-like constant-modulus sequence; zero periodic autocorrelation at
// every nonzero cyclic shift for any root coprime to the length.
ComplexSequence zc_sequence(const ZcParams& params);

// Maximal-length sequence from the built-in primitive polynomial table
// (orders 3..10), or from caller-supplied taps. The chip mapping puts the
// majority symbol at +1 so one period sums to exactly +1.
MSequence m_sequence(int order, std::uint32_t seed = 1);
MSequence m_sequence(int order, const std::vector<int>& taps, std::uint32_t seed);

// Code presets for the two interrupt signal families. Same construction,
// distinct polynomials: the SIS family uses the reciprocal polynomial of the
// PIS family's, which is primitive exactly when the original is.
MSequence pis_code(int order);
MSequence sis_code(int order);

// Interrupt signal: code[floor(i/N)] * zc[i mod N], length Q*N.
ComplexSequence build_interrupt_signal(const MSequence& code, const ComplexSequence& zc);

// Worst-case cross-block correlation magnitude at shift l = 1..N-1 for
// adjacent blocks modulated by opposite code values:
//   2*|sin(pi*root*l^2/N) / sin(pi*root*l/N)|,
// falling back to the direct correlation sum where the denominator vanishes.
std::vector<double> sidelobe_profile(int n_points, int root);

// Direct-sum form of the same quantity, used as the closed form's oracle and
// as its fallback: 2*|sum_{n=0}^{N-l-1} z*[n] z[n+l]|.
double sidelobe_direct(const ComplexSequence& zc, int shift);

// Exhaustive search over roots coprime to N minimizing the maximum sidelobe;
// ties break toward the smaller total sidelobe, then the smaller root.
int optimal_root(int n_points);

// Waveform export for inspection: CSV rows "index,re,im" and raw interleaved
// little-endian float32 I/Q. Both write to a temp file and rename into place.
void write_csv(const ComplexSequence& seq, const std::string& path);
void write_raw_iq(const ComplexSequence& seq, const std::string& path);

}  // namespace umac::sig
