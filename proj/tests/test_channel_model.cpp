#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include "umac/channel_model.hpp"
#include "umac/rng.hpp"
#include "umac/signal_core.hpp"

using namespace umac::chan;
using umac::Rng;

TEST_CASE("interference has zero mean, unit power, near-gaussian quadratures") {
    ChannelParams p;
    Rng rng(1001);
    const std::size_t n = 1'000'000;
    auto x = gen_wifi_interference(n, p, rng);
    REQUIRE(x.size() == n);

    cplx mean{0, 0};
    double power = 0;
    double m2 = 0, m4 = 0;
    for (const cplx& s : x.samples) {
        mean += s;
        power += std::norm(s);
        const double re = s.real();
        m2 += re * re;
        m4 += re * re * re * re;
    }
    mean /= static_cast<double>(n);
    power /= static_cast<double>(n);
    m2 /= static_cast<double>(n);
    m4 /= static_cast<double>(n);

    CHECK(std::abs(mean) < 5e-3);
    CHECK(power == doctest::Approx(1.0).epsilon(0.02));
    // Each sample mixes M=64 independent constellation points, so the real
    // part is close to normal; excess kurtosis decays like 1/M.
    const double excess_kurtosis = m4 / (m2 * m2) - 3.0;
    CHECK(std::abs(excess_kurtosis) < 0.1);
}

TEST_CASE("interference options: qam16 power and randomized alignment") {
    ChannelParams p;
    p.constellation = Constellation::QAM16;
    Rng rng(1002);
    auto x = gen_wifi_interference(200'000, p, rng);
    double power = 0;
    for (const cplx& s : x.samples) power += std::norm(s);
    CHECK(power / static_cast<double>(x.size()) == doctest::Approx(1.0).epsilon(0.02));

    ChannelParams pr;
    pr.randomize_symbol_alignment = true;
    Rng r1(7), r2(7), r3(8);
    auto a = gen_wifi_interference(2000, pr, r1);
    auto b = gen_wifi_interference(2000, pr, r2);
    auto c = gen_wifi_interference(2000, pr, r3);
    REQUIRE(a.size() == 2000);
    bool ab_same = true, ac_same = true;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ab_same = ab_same && a[i] == b[i];
        ac_same = ac_same && a[i] == c[i];
    }
    CHECK(ab_same);   // same seed, same stream
    CHECK(!ac_same);  // different seed diverges
}

TEST_CASE("interference power sits in the lowest 13.3 percent of the band") {
    ChannelParams p;
    Rng rng(1003);
    const int sps = p.samples_per_symbol();
    REQUIRE(sps == 480);
    const int n_sym = 10;
    auto x = gen_wifi_interference(static_cast<std::size_t>(sps) * n_sym, p, rng);

    // Per-symbol DFT: the generator's tones are exact bin frequencies, so
    // everything should land in bins 0..M-1.
    double in_band = 0, total = 0;
    for (int s = 0; s < n_sym; ++s) {
        for (int bin = 0; bin < sps; ++bin) {
            cplx acc{0, 0};
            for (int l = 0; l < sps; ++l) {
                const double ph = -2.0 * umac::kPi * bin * l / sps;
                acc += x[static_cast<std::size_t>(s * sps + l)] * cplx{std::cos(ph), std::sin(ph)};
            }
            const double pw = std::norm(acc);
            total += pw;
            if (bin < p.ifft_size) in_band += pw;
        }
    }
    CHECK(in_band / total > 0.99);
}

TEST_CASE("awgn variance, circular symmetry, and edge cases") {
    Rng rng(1004);
    const std::size_t n = 1'000'000;
    const double s2 = 1.5e-4;
    auto w = gen_awgn(n, s2, rng);
    REQUIRE(w.size() == n);

    double power = 0, cross = 0, re2 = 0, im2 = 0;
    for (const cplx& s : w.samples) {
        power += std::norm(s);
        cross += s.real() * s.imag();
        re2 += s.real() * s.real();
        im2 += s.imag() * s.imag();
    }
    CHECK(power / static_cast<double>(n) == doctest::Approx(s2).epsilon(0.02));
    // Quadratures carry half the power each and are uncorrelated.
    CHECK(re2 / static_cast<double>(n) == doctest::Approx(s2 / 2).epsilon(0.03));
    CHECK(im2 / static_cast<double>(n) == doctest::Approx(s2 / 2).epsilon(0.03));
    CHECK(std::abs(cross / static_cast<double>(n)) / (s2 / 2) < 5e-3);

    Rng rng0(1);
    auto z = gen_awgn(100, 0.0, rng0);
    for (const cplx& s : z.samples) REQUIRE(s == cplx{0, 0});

    CHECK_THROWS_AS(gen_awgn(10, -1.0, rng0), std::invalid_argument);
}

TEST_CASE("compose_received embeds the scaled signal and adds powers") {
    auto zc = umac::sig::zc_sequence({64, 1});
    auto pis = umac::sig::build_interrupt_signal(umac::sig::pis_code(3), zc);

    // Clean channel: output is exactly sqrt(rho_i) * pis at the offset.
    ChannelParams clean;
    clean.rho_i = 1.5e-4;
    clean.rho_x = 0.0;
    clean.sigma_w2 = 0.0;
    Rng rng(1005);
    const std::size_t off = 100;
    auto r = compose_received(&pis, off, pis.size() + 200, clean, rng);
    REQUIRE(r.size() == pis.size() + 200);
    const double a = std::sqrt(clean.rho_i);
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (i >= off && i < off + pis.size()) {
            REQUIRE(r[i] == a * pis[i - off]);
        } else {
            REQUIRE(r[i] == cplx{0, 0});
        }
    }

    // Signal-free window is interference plus noise only.
    ChannelParams all;
    all.rho_i = 1.5e-4;
    all.rho_x = 1.5e-4;
    all.sigma_w2 = 1.5e-4;
    Rng rh0(42), rh1(42);
    auto h0 = compose_received(nullptr, 0, pis.size(), all, rh0);
    auto h1 = compose_received(&pis, 0, pis.size(), all, rh1);
    // Same seed: the H1 window is the H0 window plus the embedded term.
    for (std::size_t i = 0; i < pis.size(); ++i)
        REQUIRE(h1[i] == h0[i] + std::sqrt(all.rho_i) * pis[i]);

    // Independent components' powers add over the signal span.
    double power = 0;
    Rng rp(1006);
    const int reps = 40;
    for (int t = 0; t < reps; ++t) {
        auto rr = compose_received(&pis, 0, pis.size(), all, rp);
        for (const cplx& s : rr.samples) power += std::norm(s);
    }
    power /= static_cast<double>(reps * pis.size());
    CHECK(power == doctest::Approx(4.5e-4).epsilon(0.03));

    CHECK_THROWS_AS(compose_received(&pis, 300, pis.size() + 200, all, rp),
                    std::invalid_argument);
}

TEST_CASE("sinr arithmetic and its inverse") {
    ChannelParams p;
    p.rho_i = 1.5e-4;
    p.rho_x = 0.0;
    p.sigma_w2 = 1.5e-4;
    CHECK(sinr_db(p) == doctest::Approx(0.0).scale(1).epsilon(1e-12));

    p.rho_x = 1.5e-4;
    p.rho_i = 3.0e-4;
    CHECK(sinr_db(p) == doctest::Approx(0.0).scale(1).epsilon(1e-12));

    const double rho_x = rho_x_for_sinr_db(-28.2, 1.5e-4, 1.5e-4);
    CHECK(rho_x == doctest::Approx(1.5e-4 * std::pow(10.0, 2.82) - 1.5e-4).epsilon(1e-12));
    ChannelParams q;
    q.rho_i = 1.5e-4;
    q.sigma_w2 = 1.5e-4;
    q.rho_x = rho_x;
    CHECK(sinr_db(q) == doctest::Approx(-28.2).epsilon(1e-9));

    CHECK_THROWS_AS(rho_x_for_sinr_db(10.0, 1.5e-4, 1.5e-4), std::invalid_argument);
}

TEST_CASE("channel params validation") {
    ChannelParams bad;
    bad.oversample_f = 7.3;  // 7.3 * 64 is not an integer
    Rng rng(1);
    CHECK_THROWS_AS(gen_wifi_interference(10, bad, rng), std::invalid_argument);

    ChannelParams neg;
    neg.rho_x = -1.0;
    CHECK_THROWS_AS(neg.validate(), std::invalid_argument);

    ChannelParams ok;
    CHECK(ok.samples_per_symbol() == 480);
    ChannelParams half;
    half.oversample_f = 2.5;
    half.ifft_size = 64;
    CHECK(half.samples_per_symbol() == 160);
}
