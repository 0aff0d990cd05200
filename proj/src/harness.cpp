#include "qkd/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "qkd/adversary.hpp"
#include "qkd/errors.hpp"
#include "qkd/privacy_amp.hpp"

namespace qkd {

namespace {

std::string fmt_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

const char* bool_name(bool b) {
    return b ? "true" : "false";
}

double parse_double(const std::string& field, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) {
            throw std::invalid_argument(value);
        }
        return v;
    } catch (const std::exception&) {
        raise(Errc::ConfigInvalid, field + ": '" + value + "' is not a number");
    }
}

std::uint64_t parse_count(const std::string& field, const std::string& value) {
    try {
        std::size_t used = 0;
        const std::uint64_t v = std::stoull(value, &used);
        if (used != value.size()) {
            throw std::invalid_argument(value);
        }
        return v;
    } catch (const std::exception&) {
        raise(Errc::ConfigInvalid, field + ": '" + value + "' is not a count");
    }
}

SplitRule parse_rule(const std::string& value) {
    if (value == "odd-position") {
        return SplitRule::OddPosition;
    }
    if (value == "hash-derived") {
        return SplitRule::HashDerived;
    }
    raise(Errc::ConfigInvalid, "auth_rule: expected odd-position or hash-derived, got '" + value +
                                   "'");
}

std::string rule_name(SplitRule rule) {
    return rule == SplitRule::OddPosition ? "odd-position" : "hash-derived";
}

} // namespace

std::string variant_name(Variant v) {
    switch (v) {
    case Variant::Baseline:
        return "baseline";
    case Variant::AuthLast:
        return "auth-last";
    case Variant::AuthBeforePa:
        return "auth-before-pa";
    }
    return "?";
}

Variant parse_variant(const std::string& s) {
    if (s == "baseline") {
        return Variant::Baseline;
    }
    if (s == "auth-last") {
        return Variant::AuthLast;
    }
    if (s == "auth-before-pa") {
        return Variant::AuthBeforePa;
    }
    raise(Errc::ConfigInvalid,
          "variant: expected baseline, auth-last or auth-before-pa, got '" + s + "'");
}

std::string adversary_name(const AdversaryStrategy& a) {
    switch (a.kind) {
    case AdversaryKind::None:
        return "none";
    case AdversaryKind::InterceptResend:
        return "intercept:" + fmt_double(a.intercept_fraction);
    case AdversaryKind::Impersonate:
        return "impersonate";
    }
    return "?";
}

AdversaryStrategy parse_adversary(const std::string& s) {
    if (s == "none") {
        return AdversaryStrategy{AdversaryKind::None, 1.0};
    }
    if (s == "impersonate") {
        return AdversaryStrategy{AdversaryKind::Impersonate, 1.0};
    }
    if (s == "intercept") {
        return AdversaryStrategy{AdversaryKind::InterceptResend, 1.0};
    }
    if (s.rfind("intercept:", 0) == 0) {
        const double f = parse_double("adversary", s.substr(10));
        return AdversaryStrategy{AdversaryKind::InterceptResend, f};
    }
    raise(Errc::ConfigInvalid,
          "adversary: expected none, intercept:F or impersonate, got '" + s + "'");
}

void apply_override(SessionConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "n_photons") {
        cfg.n_photons = parse_count(key, value);
    } else if (key == "flip_prob") {
        cfg.channel.flip_prob = parse_double(key, value);
    } else if (key == "loss_prob") {
        cfg.channel.loss_prob = parse_double(key, value);
    } else if (key == "variant") {
        cfg.variant = parse_variant(value);
    } else if (key == "adversary") {
        cfg.adversary = parse_adversary(value);
    } else if (key == "intercept_fraction") {
        cfg.adversary.intercept_fraction = parse_double(key, value);
    } else if (key == "safety_s") {
        cfg.safety_s = parse_count(key, value);
    } else if (key == "sample_fraction") {
        cfg.sample_fraction = parse_double(key, value);
    } else if (key == "auth_rule") {
        cfg.auth.rule = parse_rule(value);
    } else if (key == "ka_len") {
        cfg.auth.ka_len = parse_count(key, value);
    } else if (key == "tag_len") {
        cfg.auth.tag_len = parse_count(key, value);
    } else if (key == "nonce_len") {
        cfg.auth.nonce_len = parse_count(key, value);
    } else if (key == "block_size") {
        cfg.recon.initial_block_size = value == "auto" ? kAutoBlockSize : parse_count(key, value);
    } else if (key == "agree_rounds") {
        cfg.recon.agree_rounds_needed = parse_count(key, value);
    } else if (key == "max_rounds") {
        cfg.recon.max_rounds = parse_count(key, value);
    } else if (key == "seed") {
        cfg.seed = parse_count(key, value);
    } else {
        raise(Errc::ConfigInvalid, "unknown configuration key '" + key + "'");
    }
}

bool is_numeric_field(const std::string& field) {
    static const char* fields[] = {"n_photons",   "flip_prob",       "loss_prob",
                                   "safety_s",    "sample_fraction", "intercept_fraction",
                                   "ka_len",      "tag_len",         "nonce_len",
                                   "block_size",  "agree_rounds",    "max_rounds",
                                   "seed"};
    return std::find_if(std::begin(fields), std::end(fields),
                        [&](const char* f) { return field == f; }) != std::end(fields);
}

bool set_numeric_field(SessionConfig& cfg, const std::string& field, double value) {
    if (!is_numeric_field(field)) {
        return false;
    }
    if (field == "flip_prob" || field == "loss_prob" || field == "sample_fraction" ||
        field == "intercept_fraction") {
        apply_override(cfg, field, fmt_double(value));
    } else {
        apply_override(cfg, field, std::to_string(static_cast<std::uint64_t>(value)));
    }
    return true;
}

SessionConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        raise(Errc::ConfigInvalid, "cannot open config file " + path.string());
    }
    SessionConfig cfg;
    std::vector<std::string> problems;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            problems.push_back("line " + std::to_string(line_no) + ": expected key=value");
            continue;
        }
        auto strip = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        const std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));
        try {
            apply_override(cfg, key, value);
        } catch (const Error& e) {
            problems.push_back("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!problems.empty()) {
        std::string what;
        for (std::size_t i = 0; i < problems.size(); ++i) {
            if (i > 0) {
                what += "; ";
            }
            what += problems[i];
        }
        raise(Errc::ConfigInvalid, what);
    }
    return cfg;
}

BatchResult run_batch(const SessionConfig& base, std::size_t trials, std::uint64_t seed_base) {
    if (trials < 1) {
        raise(Errc::ConfigInvalid, "trials: must be >= 1");
    }
    validate_config(base);

    BatchResult result;
    result.base = base;
    result.rows.resize(trials);

    const std::size_t workers =
        std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), trials);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= trials) {
                return;
            }
            try {
                SessionConfig cfg = base;
                cfg.seed = seed_base + i;
                result.rows[i] = TrialRow{i, cfg.seed, run_session(cfg)};
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                return;
            }
        }
    };

    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    result.agg = compute_aggregates(base, result.rows);
    return result;
}

Aggregates compute_aggregates(const SessionConfig& base, const std::vector<TrialRow>& rows) {
    Aggregates agg;
    agg.eve_info_bound = eve_info_bound_bits(base.safety_s);
    if (rows.empty()) {
        return agg;
    }
    const double n = static_cast<double>(rows.size());

    auto mean_std = [&](auto getter, double& mean, double& stddev) {
        double sum = 0.0;
        for (const auto& row : rows) {
            sum += getter(row.report);
        }
        mean = sum / n;
        double sq = 0.0;
        for (const auto& row : rows) {
            const double d = getter(row.report) - mean;
            sq += d * d;
        }
        stddev = std::sqrt(sq / n);
    };

    mean_std([](const SessionReport& r) { return r.qber_true; }, agg.mean_qber_true,
             agg.std_qber_true);
    mean_std([](const SessionReport& r) { return r.sifted_fraction; }, agg.mean_sifted_fraction,
             agg.std_sifted_fraction);
    mean_std([](const SessionReport& r) { return static_cast<double>(r.leak_t); },
             agg.mean_leak_t, agg.std_leak_t);
    mean_std([](const SessionReport& r) { return static_cast<double>(r.r_final); },
             agg.mean_r_final, agg.std_r_final);

    std::size_t aborts = 0;
    std::size_t eve_hits = 0;
    for (const auto& row : rows) {
        aborts += static_cast<std::size_t>(row.report.auth_verdict == AuthOutcome::Abort);
        eve_hits += static_cast<std::size_t>(row.report.eve_key_match);
    }
    agg.abort_rate = static_cast<double>(aborts) / n;
    agg.eve_key_match_rate = static_cast<double>(eve_hits) / n;
    return agg;
}

void write_trials_csv(const BatchResult& result, std::ostream& out) {
    out << "trial,seed,variant,adversary,n_photons,sifted_fraction,qber_true,qber_est,leak_t,"
           "r_final,keys_match,auth_verdict,eve_key_match\n";
    for (const auto& row : result.rows) {
        out << row.trial << ',' << row.seed << ',' << variant_name(result.base.variant) << ','
            << adversary_name(result.base.adversary) << ',' << result.base.n_photons << ','
            << fmt_double(row.report.sifted_fraction) << ',' << fmt_double(row.report.qber_true)
            << ',' << fmt_double(row.report.qber_est) << ',' << row.report.leak_t << ','
            << row.report.r_final << ',' << bool_name(row.report.keys_match) << ','
            << auth_outcome_name(row.report.auth_verdict) << ','
            << bool_name(row.report.eve_key_match) << '\n';
    }
    const Aggregates& a = result.agg;
    out << "# mean_qber_true=" << fmt_double(a.mean_qber_true) << '\n';
    out << "# std_qber_true=" << fmt_double(a.std_qber_true) << '\n';
    out << "# mean_sifted_fraction=" << fmt_double(a.mean_sifted_fraction) << '\n';
    out << "# std_sifted_fraction=" << fmt_double(a.std_sifted_fraction) << '\n';
    out << "# mean_leak_t=" << fmt_double(a.mean_leak_t) << '\n';
    out << "# std_leak_t=" << fmt_double(a.std_leak_t) << '\n';
    out << "# mean_r_final=" << fmt_double(a.mean_r_final) << '\n';
    out << "# std_r_final=" << fmt_double(a.std_r_final) << '\n';
    out << "# abort_rate=" << fmt_double(a.abort_rate) << '\n';
    out << "# eve_key_match_rate=" << fmt_double(a.eve_key_match_rate) << '\n';
    out << "# eve_info_bound=" << fmt_double(a.eve_info_bound) << '\n';
}

namespace {

nlohmann::ordered_json report_json(const SessionConfig& cfg, const SessionReport& report) {
    nlohmann::ordered_json j;
    j["variant"] = variant_name(cfg.variant);
    j["adversary"] = adversary_name(cfg.adversary);
    j["n_photons"] = cfg.n_photons;
    j["seed"] = cfg.seed;
    j["flip_prob"] = cfg.channel.flip_prob;
    j["loss_prob"] = cfg.channel.loss_prob;
    j["auth_rule"] = rule_name(cfg.auth.rule);
    j["tag_len"] = cfg.auth.tag_len;
    j["nonce_len"] = cfg.auth.nonce_len;
    j["safety_s"] = cfg.safety_s;
    j["sifted_fraction"] = report.sifted_fraction;
    j["qber_true"] = report.qber_true;
    j["qber_est"] = report.qber_est;
    j["leak_t"] = report.leak_t;
    j["r_final"] = report.r_final;
    j["keys_match"] = report.keys_match;
    j["auth_verdict"] = auth_outcome_name(report.auth_verdict);
    j["eve_key_match"] = report.eve_key_match;
    j["k_a_reused"] = report.k_a_reused;
    j["eve_info_bound_bits"] = eve_info_bound_bits(cfg.safety_s);
    j["transcript_path"] = report.transcript_path;
    return j;
}

void log_report(std::ostream& log, const SessionReport& report) {
    log << "sifted_fraction=" << fmt_double(report.sifted_fraction)
        << " qber_true=" << fmt_double(report.qber_true)
        << " qber_est=" << fmt_double(report.qber_est) << " leak_t=" << report.leak_t
        << " r_final=" << report.r_final << " keys_match=" << bool_name(report.keys_match)
        << " auth_verdict=" << auth_outcome_name(report.auth_verdict)
        << " eve_key_match=" << bool_name(report.eve_key_match) << '\n';
}

} // namespace

SessionReport cmd_run(const SessionConfig& cfg, const std::filesystem::path& out_dir,
                      std::ostream& log) {
    SessionOutcome outcome = run_session_detailed(cfg);

    std::filesystem::create_directories(out_dir);
    const auto transcript_path = out_dir / "transcript.log";
    {
        std::ofstream t(transcript_path);
        serialize_transcript(outcome.transcript, t);
    }
    outcome.report.transcript_path = transcript_path.string();

    {
        std::ofstream r(out_dir / "report.json");
        r << report_json(cfg, outcome.report).dump(2) << '\n';
    }

    log << "run seed=" << cfg.seed << " variant=" << variant_name(cfg.variant)
        << " adversary=" << adversary_name(cfg.adversary) << '\n';
    log_report(log, outcome.report);
    return outcome.report;
}

std::vector<BatchResult> cmd_montecarlo(const BatchSpec& spec,
                                        const std::filesystem::path& out_dir, std::ostream& log) {
    std::vector<BatchResult> results;

    if (spec.sweep_field.empty()) {
        BatchResult result = run_batch(spec.base, spec.trials, spec.seed_base);
        std::filesystem::create_directories(out_dir);
        std::ofstream csv(out_dir / "trials.csv");
        write_trials_csv(result, csv);
        log << "montecarlo trials=" << spec.trials << " seed_base=" << spec.seed_base
            << " mean_qber_true=" << fmt_double(result.agg.mean_qber_true)
            << " mean_r_final=" << fmt_double(result.agg.mean_r_final)
            << " abort_rate=" << fmt_double(result.agg.abort_rate) << '\n';
        results.push_back(std::move(result));
        return results;
    }

    if (!is_numeric_field(spec.sweep_field)) {
        raise(Errc::ConfigInvalid,
              "sweep: '" + spec.sweep_field + "' is not a numeric configuration field");
    }
    if (spec.sweep_values.empty()) {
        raise(Errc::ConfigInvalid, "sweep: no values given");
    }

    std::filesystem::create_directories(out_dir);
    std::ofstream sweep_csv(out_dir / "sweep.csv");
    sweep_csv << spec.sweep_field
              << ",mean_qber_true,std_qber_true,mean_sifted_fraction,mean_leak_t,mean_r_final,"
                 "abort_rate,eve_key_match_rate\n";

    for (const double value : spec.sweep_values) {
        SessionConfig cfg = spec.base;
        set_numeric_field(cfg, spec.sweep_field, value);
        BatchResult result = run_batch(cfg, spec.trials, spec.seed_base);

        const auto point_dir = out_dir / ("sweep-" + fmt_double(value));
        std::filesystem::create_directories(point_dir);
        std::ofstream csv(point_dir / "trials.csv");
        write_trials_csv(result, csv);

        sweep_csv << fmt_double(value) << ',' << fmt_double(result.agg.mean_qber_true) << ','
                  << fmt_double(result.agg.std_qber_true) << ','
                  << fmt_double(result.agg.mean_sifted_fraction) << ','
                  << fmt_double(result.agg.mean_leak_t) << ','
                  << fmt_double(result.agg.mean_r_final) << ','
                  << fmt_double(result.agg.abort_rate) << ','
                  << fmt_double(result.agg.eve_key_match_rate) << '\n';
        log << "sweep " << spec.sweep_field << "=" << fmt_double(value)
            << " mean_qber_true=" << fmt_double(result.agg.mean_qber_true)
            << " abort_rate=" << fmt_double(result.agg.abort_rate) << '\n';
        results.push_back(std::move(result));
    }
    return results;
}

void cmd_attack_demo(std::uint64_t seed, const std::filesystem::path& out_dir,
                     std::ostream& log) {
    SessionConfig cfg;
    cfg.n_photons = 1024;
    cfg.channel = ChannelParams{0.0, 0.0};
    cfg.safety_s = 16;
    cfg.seed = seed;
    cfg.adversary = AdversaryStrategy{AdversaryKind::Impersonate, 1.0};

    SessionConfig baseline = cfg;
    baseline.variant = Variant::Baseline;
    SessionConfig improved = cfg;
    improved.variant = Variant::AuthBeforePa;

    const SessionReport before = run_session(baseline);
    const SessionReport after = run_session(improved);

    std::filesystem::create_directories(out_dir);
    {
        std::ofstream r(out_dir / "demo-baseline.json");
        r << report_json(baseline, before).dump(2) << '\n';
    }
    {
        std::ofstream r(out_dir / "demo-improved.json");
        r << report_json(improved, after).dump(2) << '\n';
    }

    log << "impersonation attack, seed=" << seed << "\n";
    log << "  baseline:       eve_key_match=" << bool_name(before.eve_key_match)
        << " keys_match=" << bool_name(before.keys_match)
        << " auth_verdict=" << auth_outcome_name(before.auth_verdict)
        << " r_final=" << before.r_final << '\n';
    log << "  auth-before-pa: eve_key_match=" << bool_name(after.eve_key_match)
        << " keys_match=" << bool_name(after.keys_match)
        << " auth_verdict=" << auth_outcome_name(after.auth_verdict)
        << " r_final=" << after.r_final << '\n';
    if (before.eve_key_match && after.auth_verdict == AuthOutcome::Abort) {
        log << "  baseline compromised silently; identity verification aborted the attack\n";
    }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"BB84 key distribution simulator with identity verification"};
    app.require_subcommand(1);

    static const std::vector<std::string> field_keys = {
        "n_photons", "flip_prob",  "loss_prob", "variant",      "adversary",
        "safety_s",  "sample_fraction", "auth_rule", "ka_len",  "tag_len",
        "nonce_len", "block_size", "agree_rounds", "max_rounds", "seed"};

    struct SubState {
        std::string config_path;
        std::string out_dir = "out";
        std::map<std::string, std::string> fields;
    };

    auto add_common = [&](CLI::App* sub, SubState& state) {
        sub->add_option("--config", state.config_path, "key=value configuration file");
        sub->add_option("--out", state.out_dir, "output directory");
        for (const auto& key : field_keys) {
            sub->add_option("--" + key, state.fields[key]);
        }
    };

    auto build_config = [&](CLI::App* sub, SubState& state) {
        SessionConfig cfg =
            state.config_path.empty() ? SessionConfig{} : parse_config_file(state.config_path);
        for (const auto& key : field_keys) {
            if (sub->count("--" + key) > 0) {
                apply_override(cfg, key, state.fields[key]);
            }
        }
        return cfg;
    };

    SubState run_state;
    auto* run_sub = app.add_subcommand("run", "run a single session");
    add_common(run_sub, run_state);

    SubState mc_state;
    std::size_t trials = 100;
    std::string sweep_arg;
    auto* mc_sub = app.add_subcommand("montecarlo", "run a batch of independent sessions");
    add_common(mc_sub, mc_state);
    mc_sub->add_option("--trials", trials, "number of trials");
    mc_sub->add_option("--sweep", sweep_arg, "field=v1,v2,... parameter sweep");

    std::uint64_t demo_seed = 12345;
    std::string demo_out = "out";
    auto* demo_sub = app.add_subcommand("attack-demo",
                                        "baseline vs improved variant under impersonation");
    demo_sub->add_option("--seed", demo_seed, "demo seed");
    demo_sub->add_option("--out", demo_out, "output directory");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return 1;
    }

    try {
        if (run_sub->parsed()) {
            const SessionConfig cfg = build_config(run_sub, run_state);
            const SessionReport report = cmd_run(cfg, run_state.out_dir, out);
            return report.auth_verdict == AuthOutcome::Abort ? 2 : 0;
        }
        if (mc_sub->parsed()) {
            BatchSpec spec;
            spec.base = build_config(mc_sub, mc_state);
            spec.trials = trials;
            spec.seed_base = spec.base.seed;
            if (!sweep_arg.empty()) {
                const auto eq = sweep_arg.find('=');
                if (eq == std::string::npos) {
                    raise(Errc::ConfigInvalid, "sweep: expected field=v1,v2,...");
                }
                spec.sweep_field = sweep_arg.substr(0, eq);
                std::stringstream values(sweep_arg.substr(eq + 1));
                std::string item;
                while (std::getline(values, item, ',')) {
                    spec.sweep_values.push_back(parse_double("sweep", item));
                }
            }
            cmd_montecarlo(spec, mc_state.out_dir, out);
            return 0;
        }
        if (demo_sub->parsed()) {
            cmd_attack_demo(demo_seed, demo_out, out);
            return 0;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    err << "usage error: no subcommand\n";
    return 1;
}

} // namespace qkd
