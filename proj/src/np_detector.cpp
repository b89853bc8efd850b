#include "umac/np_detector.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace umac::det {

void DetectorConfig::validate() const {
    if (n_points < 1) throw std::invalid_argument("DetectorConfig: n_points must be >= 1");
    if (q_points < 1) throw std::invalid_argument("DetectorConfig: q_points must be >= 1");
    if (static_cast<int>(code.chips.size()) != q_points)
        throw std::invalid_argument("DetectorConfig: code length must equal q_points");
    if (static_cast<int>(zc.samples.size()) != n_points)
        throw std::invalid_argument("DetectorConfig: base sequence length must equal n_points");
    if (!(alpha > 0.0) || alpha > 1.0)
        throw std::invalid_argument("DetectorConfig: alpha must be in (0, 1]");
    for (int c : code.chips)
        if (c != 1 && c != -1)
            throw std::invalid_argument("DetectorConfig: code values must be +-1");
}

DetectorConfig default_detector_config(int n_points, int code_order, double alpha) {
    DetectorConfig cfg;
    cfg.n_points = n_points;
    cfg.zc = sig::zc_sequence({n_points, 1});
    cfg.code = sig::pis_code(code_order);
    cfg.q_points = cfg.code.q();
    cfg.alpha = alpha;
    cfg.validate();
    return cfg;
}

ComplexSequence correlate_zc(const ComplexSequence& r, const ComplexSequence& zc) {
    const std::size_t n = zc.samples.size();
    if (n == 0 || r.samples.size() < n)
        throw std::invalid_argument("correlate_zc: received window shorter than the sequence");
    ComplexSequence y;
    y.sample_rate_hz = r.sample_rate_hz;
    y.samples.resize(r.samples.size() - n + 1);
    for (std::size_t i = 0; i < y.samples.size(); ++i) {
        cplx acc{0.0, 0.0};
        for (std::size_t j = 0; j < n; ++j)
            acc += std::conj(zc.samples[j]) * r.samples[i + j];
        y.samples[i] = acc;
    }
    return y;
}

std::vector<double> accumulate_code(const ComplexSequence& y, const MSequence& code,
                                    int n_points) {
    const int q = code.q();
    if (q < 1) throw std::invalid_argument("accumulate_code: empty code");
    if (n_points < 1) throw std::invalid_argument("accumulate_code: n_points must be >= 1");
    const std::size_t span = static_cast<std::size_t>(n_points) * (q - 1);
    if (y.samples.size() < span + 1)
        throw std::invalid_argument("accumulate_code: correlation too short for the code");
    std::vector<double> out(y.samples.size() - span);
    for (std::size_t i = 0; i < out.size(); ++i) {
        cplx acc{0.0, 0.0};
        for (int j = 0; j < q; ++j)
            acc += static_cast<double>(code[static_cast<std::size_t>(j)]) *
                   y.samples[i + static_cast<std::size_t>(j) * n_points];
        out[i] = std::abs(acc);
    }
    return out;
}

namespace {

int samples_per_symbol_checked(int ifft_size, double oversample_f) {
    const double fm = oversample_f * ifft_size;
    const double rounded = std::round(fm);
    if (ifft_size < 1 || std::abs(fm - rounded) > 1e-9 || rounded < 1.0)
        throw std::invalid_argument("oversample_f * ifft_size must be a positive integer");
    return static_cast<int>(rounded);
}

// e^{j 2 pi i / sps} for i = 0..sps-1.
std::vector<cplx> unit_roots(int sps) {
    std::vector<cplx> roots(static_cast<std::size_t>(sps));
    for (int i = 0; i < sps; ++i) {
        const double ph = 2.0 * kPi * i / sps;
        roots[static_cast<std::size_t>(i)] = {std::cos(ph), std::sin(ph)};
    }
    return roots;
}

}  // namespace

double sigma_x2_approx(const DetectorConfig& cfg, int ifft_size, double oversample_f) {
    cfg.validate();
    const int sps = samples_per_symbol_checked(ifft_size, oversample_f);
    const auto roots = unit_roots(sps);
    // (Q/M) sum_k |V_k|^2 with V_k = sum_n z*[n] e^{j 2 pi k n / sps}; the
    // equivalent double sum over (n, n') is real by construction.
    double total = 0.0;
    for (int k = 0; k < ifft_size; ++k) {
        cplx v{0.0, 0.0};
        std::size_t idx = 0;
        for (int n = 0; n < cfg.n_points; ++n) {
            v += std::conj(cfg.zc.samples[static_cast<std::size_t>(n)]) * roots[idx];
            idx += static_cast<std::size_t>(k);
            if (idx >= static_cast<std::size_t>(sps)) idx -= static_cast<std::size_t>(sps);
        }
        total += std::norm(v);
    }
    return static_cast<double>(cfg.q_points) / ifft_size * total;
}

double sigma_x2_exact(const DetectorConfig& cfg, int ifft_size, double oversample_f) {
    cfg.validate();
    const int sps = samples_per_symbol_checked(ifft_size, oversample_f);
    const auto roots = unit_roots(sps);
    const std::size_t window =
        static_cast<std::size_t>(cfg.n_points) * static_cast<std::size_t>(cfg.q_points);

    // Interferer symbols are independent, so the variance is the sum over
    // symbols phi of the per-tone projection energies of the correlator
    // weights a[l] = code[l / N] z*[l mod N] restricted to that symbol.
    double total = 0.0;
    for (std::size_t lo = 0; lo < window; lo += static_cast<std::size_t>(sps)) {
        const std::size_t hi = std::min(window, lo + static_cast<std::size_t>(sps));
        for (int k = 0; k < ifft_size; ++k) {
            cplx acc{0.0, 0.0};
            std::size_t idx = (lo * static_cast<std::size_t>(k)) % static_cast<std::size_t>(sps);
            for (std::size_t l = lo; l < hi; ++l) {
                const double chip = cfg.code[l / static_cast<std::size_t>(cfg.n_points)];
                const cplx a =
                    chip * std::conj(cfg.zc.samples[l % static_cast<std::size_t>(cfg.n_points)]);
                acc += a * roots[idx];
                idx += static_cast<std::size_t>(k);
                if (idx >= static_cast<std::size_t>(sps)) idx -= static_cast<std::size_t>(sps);
            }
            total += std::norm(acc);
        }
    }
    return total / ifft_size;
}

double np_threshold(double alpha, double sigma_u2) {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw std::invalid_argument("np_threshold: alpha must be in (0, 1]");
    if (!(sigma_u2 > 0.0))
        throw std::invalid_argument("np_threshold: sigma_u2 must be positive");
    return std::sqrt(-2.0 * sigma_u2 * std::log(alpha));
}

double marcum_q1c(double a, double b) {
    if (a < 0.0 || b < 0.0) throw std::invalid_argument("marcum_q1: negative argument");
    if (b == 0.0) return 0.0;
    const double lambda = 0.5 * a * a;  // Poisson intensity of the mixing index
    const double x = 0.5 * b * b;       // gamma tail evaluation point

    // 1 - Q1(a,b) = sum_k Pois(k; lambda) * P(k+1, x) with P the lower
    // regularized gamma at integer shape: P(k+1, x) = sum_{j>k} e^-x x^j/j!.
    // Everything runs on two recurrences seeded at the Poisson mode k0:
    //   p_{k+1} = p_k lambda/(k+1),     g_j = e^-x x^j/j!, g_{j+1} = g_j x/(j+1)
    //   U_{k+1} = U_k - g_{k+1},        U_{k-1} = U_k + g_k
    // The descending direction only adds, so tiny tail values stay exact;
    // ascending cancellation is bounded by eps * U_{k0}, negligible against
    // the dominant terms.
    const auto k0 = static_cast<long>(std::floor(lambda));
    const double log_p0 = -lambda + (k0 > 0 ? k0 * std::log(lambda) : 0.0) -
                          std::lgamma(static_cast<double>(k0) + 1.0);
    const double p_k0 = std::exp(log_p0);

    auto log_g = [x](long j) {
        return -x + (j > 0 ? j * std::log(x) : 0.0) - std::lgamma(static_cast<double>(j) + 1.0);
    };

    // U_{k0} by direct sum of g_j over j > k0, seeded at the mode of g
    // (j near x) so the seed cannot underflow even when g_{k0+1} does;
    // terms below the underflow floor are genuinely negligible.
    double u_k0 = 0.0;
    {
        const long j_start = std::max(k0 + 1, static_cast<long>(std::floor(x)));
        const double g_start = std::exp(log_g(j_start));
        double g = g_start;
        long j = j_start;
        while (g > 0.0) {
            u_k0 += g;
            ++j;
            g *= x / static_cast<double>(j);
            if (static_cast<double>(j) > x && g < u_k0 * 1e-19) break;
        }
        g = g_start;
        for (j = j_start - 1; j > k0; --j) {
            g *= static_cast<double>(j + 1) / x;
            u_k0 += g;
        }
    }

    double sum = p_k0 * u_k0;

    // Ascending k > k0.
    {
        double p = p_k0;
        double u = u_k0;
        double g = std::exp(log_g(k0 + 1));
        long k = k0;
        while (true) {
            ++k;
            p *= lambda / static_cast<double>(k);
            u -= g;
            g *= x / static_cast<double>(k + 1);
            if (u < 0.0) u = 0.0;
            sum += p * u;
            if (p < 1e-20 && k > k0 + 4) break;
            if (k > k0 + 300000) break;
        }
    }

    // Descending k < k0 (all the way down; at most k0 steps).
    if (k0 > 0) {
        double p = p_k0;
        double u = u_k0;
        double g = std::exp(log_g(k0));  // g_{k+1} for the first target k = k0-1
        for (long k = k0 - 1; k >= 0; --k) {
            p *= static_cast<double>(k + 1) / lambda;
            u += g;  // U_k = U_{k+1} + g_{k+1}
            sum += p * u;
            g *= static_cast<double>(k + 1) / x;  // g_k, the next step's g_{k+1}
        }
    }
    return std::min(1.0, sum);
}

double marcum_q1(double a, double b) { return 1.0 - marcum_q1c(a, b); }

double analytic_mdr(double rho_i, int n_points, int q_points, double sigma_u2,
                    double threshold) {
    if (rho_i < 0.0) throw std::invalid_argument("analytic_mdr: rho_i must be nonnegative");
    if (threshold < 0.0)
        throw std::invalid_argument("analytic_mdr: threshold must be nonnegative");
    if (!(sigma_u2 > 0.0))
        throw std::invalid_argument("analytic_mdr: sigma_u2 must be positive");
    const double sigma_u = std::sqrt(sigma_u2);
    const double nq = static_cast<double>(n_points) * static_cast<double>(q_points);
    return marcum_q1c(std::sqrt(rho_i) * nq / sigma_u, threshold / sigma_u);
}

DetectorStats detector_stats(const DetectorConfig& cfg, const ChannelParams& channel,
                             SigmaMode mode) {
    cfg.validate();
    channel.validate();
    DetectorStats stats;
    stats.sigma_x2 = (mode == SigmaMode::Exact)
                         ? sigma_x2_exact(cfg, channel.ifft_size, channel.oversample_f)
                         : sigma_x2_approx(cfg, channel.ifft_size, channel.oversample_f);
    const double nq = static_cast<double>(cfg.n_points) * cfg.q_points;
    // Total complex variance of the accumulator under the null, split evenly
    // between quadratures by circular symmetry; the decision math uses the
    // per-quadrature value.
    stats.sigma_u2 = 0.5 * (channel.rho_x * stats.sigma_x2 + nq * channel.sigma_w2);
    stats.threshold = np_threshold(cfg.alpha, stats.sigma_u2);
    return stats;
}

namespace {

// Per-trial sampler for the accumulator statistic. The correlator output is
// linear in the received samples, so the interference term collapses to
// sum_{phi,k} s_phi[k] D_{phi,k}(delta) with D built from prefix sums of the
// correlator weights projected on each tone; the noise term collapses to one
// complex Gaussian of variance N Q sigma_w2. Symbols are drawn in the same
// order as the waveform generator, so both engines consume the random stream
// identically when the noise term is off.
class CollapsedSampler {
  public:
    CollapsedSampler(const DetectorConfig& cfg, const ChannelParams& channel)
        : sps_(channel.samples_per_symbol()),
          m_(channel.ifft_size),
          constellation_(channel.constellation),
          window_(static_cast<std::size_t>(cfg.n_points) *
                  static_cast<std::size_t>(cfg.q_points)),
          roots_(unit_roots(sps_)) {
        // Layout: prefix_[t * m + k] = sum_{l < t} a[l] e^{j 2 pi k l / sps},
        // tone-major per boundary so one draw touches contiguous memory.
        const auto m = static_cast<std::size_t>(m_);
        prefix_.assign((window_ + 1) * m, cplx{0.0, 0.0});
        std::vector<cplx> run(m, cplx{0.0, 0.0});
        for (std::size_t l = 0; l < window_; ++l) {
            const double chip = cfg.code[l / static_cast<std::size_t>(cfg.n_points)];
            const cplx a =
                chip * std::conj(cfg.zc.samples[l % static_cast<std::size_t>(cfg.n_points)]);
            std::size_t idx = 0;  // (k * l) mod sps, stepped by l per tone
            const std::size_t step = l % static_cast<std::size_t>(sps_);
            for (std::size_t k = 0; k < m; ++k) {
                run[k] += a * roots_[idx];
                prefix_[(l + 1) * m + k] = run[k];
                idx += step;
                if (idx >= static_cast<std::size_t>(sps_)) idx -= static_cast<std::size_t>(sps_);
            }
        }
    }

    // Interference correlator output for symbol alignment delta in [0, sps).
    cplx draw_interference(std::size_t delta, Rng& rng) const {
        cplx acc{0.0, 0.0};
        const auto sps = static_cast<std::size_t>(sps_);
        const auto m = static_cast<std::size_t>(m_);
        const std::size_t phi_hi = (delta + window_ - 1) / sps;
        for (std::size_t phi = 0; phi <= phi_hi; ++phi) {
            const std::size_t start = phi * sps;
            const std::size_t lo = start > delta ? start - delta : 0;
            const std::size_t hi = std::min(window_, start + sps - delta);
            if (lo >= hi) continue;
            const cplx* row_lo = prefix_.data() + lo * m;
            const cplx* row_hi = prefix_.data() + hi * m;
            // Tone phase at the window origin: e^{j 2 pi k delta / sps},
            // stepped through k by rotating the root index.
            std::size_t idx = 0;
            for (std::size_t k = 0; k < m; ++k) {
                const cplx s = chan::draw_constellation_symbol(constellation_, m_, rng);
                acc += s * roots_[idx] * (row_hi[k] - row_lo[k]);
                idx += delta;
                if (idx >= sps) idx -= sps;
            }
        }
        return acc / static_cast<double>(m_);
    }

  private:
    int sps_;
    int m_;
    chan::Constellation constellation_;
    std::size_t window_;
    std::vector<cplx> roots_;
    std::vector<cplx> prefix_;
};

constexpr std::uint64_t kChunk = 4096;

struct TrialCounts {
    std::uint64_t misses = 0;
    std::vector<std::uint64_t> alarms;  // one count per threshold
};

// Shared core for both engines: runs `trials` signal-present and `trials`
// signal-free windows. Either count can be skipped by passing zero-length
// work (h1 == false disables the signal-present half).
TrialCounts run_trials(const DetectorConfig& cfg, const ChannelParams& channel,
                       std::uint64_t trials, Rng& rng, const SimOptions& options, bool h1,
                       const std::vector<double>& thresholds) {
    TrialCounts counts;
    counts.alarms.assign(thresholds.size(), 0);

    const double nq = static_cast<double>(cfg.n_points) * cfg.q_points;
    const double peak = std::sqrt(channel.rho_i) * nq;
    const double noise_scale = std::sqrt(nq * channel.sigma_w2 / 2.0);
    const double sqrt_rho_x = std::sqrt(channel.rho_x);
    const double h1_threshold = thresholds.empty() ? 0.0 : thresholds.front();

    if (options.engine == SimOptions::Engine::Collapsed) {
        // The prefix table is only needed when there is interference to
        // project; a noise-only channel skips the build entirely.
        std::optional<CollapsedSampler> sampler;
        if (channel.rho_x > 0.0) sampler.emplace(cfg, channel);
        const auto sps = static_cast<std::uint64_t>(channel.samples_per_symbol());
        for (std::uint64_t done = 0, chunk = 0; done < trials; done += kChunk, ++chunk) {
            const std::uint64_t batch = std::min(kChunk, trials - done);
            if (h1) {
                Rng r1 = rng.derive(2 * chunk);
                for (std::uint64_t t = 0; t < batch; ++t) {
                    cplx u{peak, 0.0};
                    if (channel.rho_x > 0.0)
                        u += sqrt_rho_x * sampler->draw_interference(0, r1);
                    if (channel.sigma_w2 > 0.0) {
                        auto [re, im] = r1.gaussian_pair();
                        u += cplx{noise_scale * re, noise_scale * im};
                    }
                    if (std::abs(u) < h1_threshold) ++counts.misses;
                }
            }
            Rng r0 = rng.derive(2 * chunk + 1);
            for (std::uint64_t t = 0; t < batch; ++t) {
                const std::size_t delta =
                    options.h0_random_alignment ? r0.uniform_int(sps) : 0;
                cplx u{0.0, 0.0};
                if (channel.rho_x > 0.0)
                    u += sqrt_rho_x * sampler->draw_interference(delta, r0);
                if (channel.sigma_w2 > 0.0) {
                    auto [re, im] = r0.gaussian_pair();
                    u += cplx{noise_scale * re, noise_scale * im};
                }
                const double mag = std::abs(u);
                for (std::size_t i = 0; i < thresholds.size(); ++i)
                    if (mag >= thresholds[i]) ++counts.alarms[i];
            }
        }
        return counts;
    }

    // Waveform engine: full synthesis and both correlation stages. Costs
    // O(window * (M + N)) per trial; intended for small configurations.
    const ComplexSequence pis = sig::build_interrupt_signal(cfg.code, cfg.zc);
    ChannelParams h0_channel = channel;
    h0_channel.randomize_symbol_alignment = options.h0_random_alignment;
    ChannelParams h1_channel = channel;
    h1_channel.randomize_symbol_alignment = false;

    auto statistic = [&](const ComplexSequence& r) {
        const ComplexSequence y = correlate_zc(r, cfg.zc);
        return accumulate_code(y, cfg.code, cfg.n_points).front();
    };

    for (std::uint64_t done = 0, chunk = 0; done < trials; done += kChunk, ++chunk) {
        const std::uint64_t batch = std::min(kChunk, trials - done);
        if (h1) {
            Rng r1 = rng.derive(2 * chunk);
            for (std::uint64_t t = 0; t < batch; ++t) {
                const auto r = chan::compose_received(&pis, 0, pis.size(), h1_channel, r1);
                if (statistic(r) < h1_threshold) ++counts.misses;
            }
        }
        Rng r0 = rng.derive(2 * chunk + 1);
        for (std::uint64_t t = 0; t < batch; ++t) {
            const auto r = chan::compose_received(nullptr, 0, pis.size(), h0_channel, r0);
            const double mag = statistic(r);
            for (std::size_t i = 0; i < thresholds.size(); ++i)
                if (mag >= thresholds[i]) ++counts.alarms[i];
        }
    }
    return counts;
}

}  // namespace

DetectionReport simulate_detection(const DetectorConfig& cfg, const ChannelParams& channel,
                                   std::uint64_t trials, Rng& rng,
                                   const SimOptions& options) {
    cfg.validate();
    channel.validate();
    if (trials < 1) throw std::invalid_argument("simulate_detection: trials must be >= 1");

    DetectionReport report;
    report.stats = detector_stats(cfg, channel, options.sigma_mode);
    report.trials = trials;

    const TrialCounts counts =
        run_trials(cfg, channel, trials, rng, options, true, {report.stats.threshold});
    report.mdr_hat =
        static_cast<double>(counts.misses) / static_cast<double>(trials);
    report.mdr_ci = wilson_interval(static_cast<double>(counts.misses),
                                    static_cast<double>(trials));
    report.far_hat =
        static_cast<double>(counts.alarms.front()) / static_cast<double>(trials);
    report.far_ci = wilson_interval(static_cast<double>(counts.alarms.front()),
                                    static_cast<double>(trials));
    return report;
}

std::vector<double> simulate_far_thresholds(const DetectorConfig& cfg,
                                            const ChannelParams& channel,
                                            const std::vector<double>& thresholds,
                                            std::uint64_t trials, Rng& rng,
                                            const SimOptions& options) {
    cfg.validate();
    channel.validate();
    if (trials < 1 || thresholds.empty())
        throw std::invalid_argument("simulate_far_thresholds: need trials and thresholds");
    const TrialCounts counts =
        run_trials(cfg, channel, trials, rng, options, false, thresholds);
    std::vector<double> rates(thresholds.size());
    for (std::size_t i = 0; i < rates.size(); ++i)
        rates[i] = static_cast<double>(counts.alarms[i]) / static_cast<double>(trials);
    return rates;
}

double multi_signal_miss(double p_m, int d_heard) {
    if (p_m < 0.0 || p_m > 1.0)
        throw std::invalid_argument("multi_signal_miss: p_m must be a probability");
    if (d_heard < 1) throw std::invalid_argument("multi_signal_miss: d_heard must be >= 1");
    return std::pow(p_m, d_heard);
}

double false_alarms_per_hour(double alpha, int n_points, int q_points,
                             double sample_rate_hz) {
    if (alpha < 0.0 || alpha > 1.0)
        throw std::invalid_argument("false_alarms_per_hour: alpha must be in [0, 1]");
    if (n_points < 1 || q_points < 1 || sample_rate_hz <= 0.0)
        throw std::invalid_argument("false_alarms_per_hour: bad window parameters");
    return alpha * 3600.0 * sample_rate_hz /
           (static_cast<double>(q_points) * static_cast<double>(n_points));
}

}  // namespace umac::det
