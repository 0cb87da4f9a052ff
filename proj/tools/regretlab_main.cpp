// regretlab CLI: experiment runner for mismatched-MMSE regret studies.
//
//   regretlab run <config.json> [--strict] [--no-meta]
//   regretlab validate <config.json>
//   regretlab fig2 --snr-db 10 --out fig2.csv
//   regretlab tradeoff --prior '{"kind":"gaussian","mean":0,"var":1}' --out t.csv
//   regretlab bounds --prior ... --gains 0.5,1,2 --offset-rel 0.01 --out b.csv
//   regretlab efficiency --prior ... --gain 1 --n 10000 --trials 500 --out e.csv
//
// Exit codes: 0 success, 1 config/usage error, 2 bound violation under --strict.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "regretlab/harness.hpp"

using namespace regretlab;

namespace {

int finish(const ExperimentConfig& config, const std::vector<ResultRow>& rows,
           bool strict, bool no_meta) {
    if (!config.out_csv.empty())
        write_csv(rows, config.out_csv,
                  (config.emit_meta && !no_meta) ? meta_line(config) : "");
    if (!config.out_json.empty()) write_json(config, rows, config.out_json);

    std::size_t errors = 0, violations = 0;
    for (const auto& r : rows) {
        if (!r.error.empty()) ++errors;
        if (r.any_bound_violated()) ++violations;
    }
    std::fprintf(stderr, "regretlab: %zu rows (%zu errors, %zu bound violations)\n",
                 rows.size(), errors, violations);
    if (strict && (violations > 0 || errors > 0)) return 2;
    return 0;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file", {path + ": not readable"});
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config is not valid JSON", {e.what()});
    }
    return ExperimentConfig::from_json(j);
}

InputDistribution parse_prior_arg(const std::string& text) {
    std::vector<std::string> diags;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("--prior is not valid JSON", {e.what()});
    }
    ExperimentConfig tmp;
    nlohmann::json wrapper = tmp.to_json();
    wrapper["prior"] = j;
    wrapper["kind"] = "tradeoff";
    wrapper["a_grid"] = {1.0};
    return ExperimentConfig::from_json(wrapper).prior;
}

void print_config_error(const ConfigError& e) {
    std::fprintf(stderr, "regretlab: %s\n", e.what());
    for (const auto& d : e.diagnostics()) std::fprintf(stderr, "  - %s\n", d.c_str());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mismatched-MMSE regret experiments on the gain-uncertain AWGN channel"};
    app.require_subcommand(1);

    // run
    auto* cmd_run = app.add_subcommand("run", "run a JSON experiment config");
    std::string run_path;
    bool run_strict = false, run_no_meta = false;
    cmd_run->add_option("config", run_path, "config JSON path")->required();
    cmd_run->add_flag("--strict", run_strict, "exit 2 on any bound-violation flag");
    cmd_run->add_flag("--no-meta", run_no_meta, "suppress the timestamp comment line");

    // validate
    auto* cmd_val = app.add_subcommand("validate", "validate a JSON experiment config");
    std::string val_path;
    cmd_val->add_option("config", val_path, "config JSON path")->required();

    // fig2
    auto* cmd_fig2 = app.add_subcommand(
        "fig2", "regret scalar and output Fisher information versus the gain");
    double fig2_snr_db = 10.0, fig2_astart = 0.05, fig2_astop = 3.0, fig2_astep = 0.005;
    std::string fig2_out;
    bool fig2_no_meta = false;
    cmd_fig2->add_option("--snr-db", fig2_snr_db, "SNR in dB (sx2 = 1)");
    cmd_fig2->add_option("--out", fig2_out, "output CSV path")->required();
    cmd_fig2->add_option("--astart", fig2_astart, "grid start");
    cmd_fig2->add_option("--astop", fig2_astop, "grid stop");
    cmd_fig2->add_option("--astep", fig2_astep, "grid step");
    cmd_fig2->add_flag("--no-meta", fig2_no_meta, "suppress the timestamp comment line");

    // tradeoff
    auto* cmd_tr = app.add_subcommand("tradeoff",
                                      "verify (rho+1) I(Y;a) = snr per grid gain");
    std::string tr_prior = R"({"kind":"gaussian","mean":0,"var":1})";
    double tr_noise = 1.0;
    std::vector<double> tr_gains = {0.2, 0.5, 1.0, 2.0, 5.0};
    std::string tr_out;
    bool tr_strict = false, tr_no_meta = false;
    cmd_tr->add_option("--prior", tr_prior, "prior spec as inline JSON");
    cmd_tr->add_option("--noise-var", tr_noise, "noise variance");
    cmd_tr->add_option("--gains", tr_gains, "gain grid")->delimiter(',');
    cmd_tr->add_option("--out", tr_out, "output CSV path")->required();
    cmd_tr->add_flag("--strict", tr_strict, "exit 2 on any bound-violation flag");
    cmd_tr->add_flag("--no-meta", tr_no_meta, "suppress the timestamp comment line");

    // bounds
    auto* cmd_b = app.add_subcommand("bounds", "deviation-bound report per grid gain");
    std::string b_prior = R"({"kind":"gaussian","mean":0,"var":1})";
    double b_noise = 1.0, b_offset_rel = 0.01;
    std::vector<double> b_gains = {0.5, 1.0, 2.0};
    std::string b_out;
    bool b_strict = false, b_no_meta = false;
    cmd_b->add_option("--prior", b_prior, "prior spec as inline JSON");
    cmd_b->add_option("--noise-var", b_noise, "noise variance");
    cmd_b->add_option("--gains", b_gains, "gain grid")->delimiter(',');
    cmd_b->add_option("--offset-rel", b_offset_rel, "a_hat = a (1 + eps)");
    cmd_b->add_option("--out", b_out, "output CSV path")->required();
    cmd_b->add_flag("--strict", b_strict, "exit 2 on any bound-violation flag");
    cmd_b->add_flag("--no-meta", b_no_meta, "suppress the timestamp comment line");

    // efficiency
    auto* cmd_e = app.add_subcommand("efficiency",
                                     "MLE variance against the Cramer-Rao bound");
    std::string e_prior = R"({"kind":"gaussian","mean":0,"var":1})";
    double e_noise = 1.0, e_gain = 1.0;
    std::size_t e_n = 10000, e_trials = 500;
    std::uint64_t e_seed = 1;
    std::string e_estimator = "numerical-mle";
    std::string e_out;
    bool e_no_meta = false;
    cmd_e->add_option("--prior", e_prior, "prior spec as inline JSON");
    cmd_e->add_option("--noise-var", e_noise, "noise variance");
    cmd_e->add_option("--gain", e_gain, "true channel gain");
    cmd_e->add_option("--n", e_n, "observations per trial");
    cmd_e->add_option("--trials", e_trials, "Monte Carlo trials");
    cmd_e->add_option("--seed", e_seed, "RNG seed");
    cmd_e->add_option("--estimator", e_estimator, "numerical-mle | moment-matching");
    cmd_e->add_option("--out", e_out, "output CSV path")->required();
    cmd_e->add_flag("--no-meta", e_no_meta, "suppress the timestamp comment line");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cmd_run) {
            const auto config = load_config(run_path);
            return finish(config, run(config), run_strict, run_no_meta);
        }
        if (*cmd_val) {
            try {
                (void)load_config(val_path);
            } catch (const ConfigError& e) {
                print_config_error(e);
                return 1;
            }
            std::printf("ok\n");
            return 0;
        }
        if (*cmd_fig2) {
            ExperimentConfig c;
            c.kind = ExperimentConfig::Kind::fig2;
            c.id = "fig2";
            c.prior = InputDistribution::gaussian(0.0, 1.0);
            c.noise_var = 1.0 / std::pow(10.0, fig2_snr_db / 10.0);
            const auto count = static_cast<std::size_t>(
                std::floor((fig2_astop - fig2_astart) / fig2_astep + 1e-9));
            for (std::size_t i = 0; i <= count; ++i)
                c.a_grid.push_back(fig2_astart + fig2_astep * static_cast<double>(i));
            c.out_csv = fig2_out;
            return finish(c, run(c), false, fig2_no_meta);
        }
        if (*cmd_tr) {
            ExperimentConfig c;
            c.kind = ExperimentConfig::Kind::tradeoff;
            c.id = "tradeoff";
            c.prior = parse_prior_arg(tr_prior);
            c.noise_var = tr_noise;
            c.a_grid = tr_gains;
            c.out_csv = tr_out;
            return finish(c, run(c), tr_strict, tr_no_meta);
        }
        if (*cmd_b) {
            ExperimentConfig c;
            c.kind = ExperimentConfig::Kind::bounds;
            c.id = "bounds";
            c.prior = parse_prior_arg(b_prior);
            c.noise_var = b_noise;
            c.a_grid = b_gains;
            c.a_hat_rules.clear();
            AHatRule rule;
            rule.kind = AHatRule::Kind::relative_offset;
            rule.epsilon = b_offset_rel;
            c.a_hat_rules.push_back(rule);
            c.out_csv = b_out;
            return finish(c, run(c), b_strict, b_no_meta);
        }
        if (*cmd_e) {
            ExperimentConfig c;
            c.kind = ExperimentConfig::Kind::efficiency;
            c.id = "efficiency";
            c.prior = parse_prior_arg(e_prior);
            c.noise_var = e_noise;
            c.a_grid = {e_gain};
            c.trials = e_trials;
            c.seed = e_seed;
            c.a_hat_rules.clear();
            AHatRule rule;
            rule.kind = AHatRule::Kind::from_estimator;
            rule.n = e_n;
            rule.estimator.kind = e_estimator == "moment-matching"
                                      ? GainEstimator::Kind::moment_matching
                                      : GainEstimator::Kind::numerical_mle;
            c.a_hat_rules.push_back(rule);
            c.out_csv = e_out;
            return finish(c, run(c), false, e_no_meta);
        }
    } catch (const ConfigError& e) {
        print_config_error(e);
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "regretlab: %s\n", e.what());
        return 1;
    }
    return 0;
}
