#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "qkd/pipeline.hpp"

namespace qkd {

struct BatchSpec {
    SessionConfig base;
    std::size_t trials = 1;
    std::uint64_t seed_base = 1;
    std::string sweep_field;          // empty = no sweep
    std::vector<double> sweep_values; // one batch per value
};

struct TrialRow {
    std::size_t trial;
    std::uint64_t seed;
    SessionReport report;
};

struct Aggregates {
    double mean_qber_true = 0.0, std_qber_true = 0.0;
    double mean_sifted_fraction = 0.0, std_sifted_fraction = 0.0;
    double mean_leak_t = 0.0, std_leak_t = 0.0;
    double mean_r_final = 0.0, std_r_final = 0.0;
    double abort_rate = 0.0;
    double eve_key_match_rate = 0.0;
    double eve_info_bound = 0.0; // 2^-s / ln 2
};

struct BatchResult {
    SessionConfig base;
    std::vector<TrialRow> rows;
    Aggregates agg;
};

// Trial i runs with seed = seed_base + i; trials are independent and may run
// on a worker pool, results are merged in trial order.
BatchResult run_batch(const SessionConfig& base, std::size_t trials, std::uint64_t seed_base);

Aggregates compute_aggregates(const SessionConfig& base, const std::vector<TrialRow>& rows);

// Fixed column order:
// trial,seed,variant,adversary,n_photons,sifted_fraction,qber_true,qber_est,
// leak_t,r_final,keys_match,auth_verdict,eve_key_match
// followed by an aggregate block of '#'-prefixed lines.
void write_trials_csv(const BatchResult& result, std::ostream& out);

// Name round-trips for config files, CLI flags, and CSV cells.
std::string variant_name(Variant v);
Variant parse_variant(const std::string& s);
std::string adversary_name(const AdversaryStrategy& a); // none | intercept:F | impersonate
AdversaryStrategy parse_adversary(const std::string& s);

// Flat key=value configuration. Unknown keys and malformed values raise
// CONFIG_INVALID with field-level diagnostics.
SessionConfig parse_config_file(const std::filesystem::path& path);
void apply_override(SessionConfig& cfg, const std::string& key, const std::string& value);
bool set_numeric_field(SessionConfig& cfg, const std::string& field, double value);
bool is_numeric_field(const std::string& field);

// Subcommand cores. Each writes its artifacts under out_dir and logs a
// human-readable summary to `log`.
SessionReport cmd_run(const SessionConfig& cfg, const std::filesystem::path& out_dir,
                      std::ostream& log);
std::vector<BatchResult> cmd_montecarlo(const BatchSpec& spec,
                                        const std::filesystem::path& out_dir, std::ostream& log);
void cmd_attack_demo(std::uint64_t seed, const std::filesystem::path& out_dir, std::ostream& log);

// CLI driver. Exit status: 0 completed, 2 identity verification ABORT,
// 1 usage or configuration error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace qkd
