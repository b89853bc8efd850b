// Experiment runners: a small INI-style config layer, CSV emitters for the
// detection and access sweeps, and a protocol demonstration report. Every
// runner is deterministic given (config, seed) and writes its files
// atomically.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace umac::expt {

inline constexpr const char* kArtifactVersion = "1.0.0";

// Sectioned key = value configuration. '#' starts a comment; keys must live
// under a [section]; duplicate keys within a section are rejected. Lookups
// fall back to a caller default, so an absent file or section simply means
// "use the built-in parameters".
class Config {
  public:
    Config() = default;

    static Config parse(std::istream& in);
    static Config parse_text(const std::string& text);
    static Config load(const std::string& path);

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key,
                    const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key,
                      double fallback) const;
    int get_int(const std::string& section, const std::string& key,
                int fallback) const;
    std::uint64_t get_u64(const std::string& section, const std::string& key,
                          std::uint64_t fallback) const;
    std::vector<double> get_double_list(const std::string& section,
                                        const std::string& key,
                                        const std::vector<double>& fallback) const;
    std::vector<int> get_int_list(const std::string& section, const std::string& key,
                                  const std::vector<int>& fallback) const;

    // All keys of one section, sorted; used for dist_* style families.
    std::vector<std::string> keys(const std::string& section) const;

    // Canonical text form: sorted sections and keys. parse(echo()) round
    // trips to the same echo.
    std::string echo() const;

  private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

struct RunOptions {
    std::uint64_t seed = 1;
    std::string out_dir = ".";
    bool fast = false;   // cap trial counts at 10^4 for quick passes
    bool check = false;  // evaluate the experiment's pass conditions
};

struct RunReport {
    std::string experiment;
    std::string version = kArtifactVersion;
    std::uint64_t seed = 0;
    double wall_seconds = 0.0;
    std::vector<std::string> outputs;
    std::vector<std::string> summary;
    std::string config_echo;
    bool check_requested = false;
    bool check_passed = true;

    std::string to_text() const;
};

// Detection curves: analytic and simulated miss rate over an SINR grid for
// each code length, one CSV row per (sinr, q) point.
RunReport run_fig6(const Config& cfg, const RunOptions& options);

// Multi-replica access sweep over a (K, d) grid: closed form, Poisson
// approximation, and simulation, with the per-K analytic argmin flagged.
RunReport run_aloha_sweep(const Config& cfg, const RunOptions& options);

// Coded access sweep: loss rate per (distribution, K) plus the largest
// sustainable K per distribution.
RunReport run_coded_sweep(const Config& cfg, const RunOptions& options);

// The five reference degree distributions at fixed K.
RunReport run_table2(const Config& cfg, const RunOptions& options);

// Interrupt protocol demonstration: analytic detection rates fed into the
// graph simulation, coverage per neighbor class, and the timing budget.
RunReport run_protocol_demo(const Config& cfg, const RunOptions& options);

// Single detector operating point, fully described by the [custom] section.
RunReport run_custom(const Config& cfg, const RunOptions& options);

// Dispatch by experiment id (fig6, aloha_sweep, coded_sweep, table2,
// protocol_demo, custom).
RunReport run_experiment(const std::string& id, const Config& cfg,
                         const RunOptions& options);

}  // namespace umac::expt
