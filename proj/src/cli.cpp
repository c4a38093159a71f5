#include "lbtail/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include "lbtail/csv.hpp"
#include "lbtail/errors.hpp"
#include "lbtail/estimators.hpp"
#include "lbtail/experiments.hpp"
#include "lbtail/models.hpp"
#include "lbtail/theory.hpp"

namespace lbtail {

namespace {

std::size_t parse_grid_int(const std::string& token) {
    std::size_t value = 0;
    auto [ptr, ec] =
        std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw Error("config", "bad k grid entry '" + token + "'");
    }
    return value;
}

}  // namespace

std::vector<std::size_t> parse_k_grid(const std::string& text) {
    std::vector<std::size_t> grid;
    if (text.find(':') != std::string::npos) {
        // inclusive range start:stop:step (step optional, default 1)
        std::vector<std::string> parts;
        std::stringstream ss(text);
        std::string token;
        while (std::getline(ss, token, ':')) parts.push_back(token);
        if (parts.size() != 2 && parts.size() != 3) {
            throw Error("config",
                        "k grid range must be start:stop or start:stop:step");
        }
        const std::size_t start = parse_grid_int(parts[0]);
        const std::size_t stop = parse_grid_int(parts[1]);
        const std::size_t step =
            parts.size() == 3 ? parse_grid_int(parts[2]) : 1;
        if (step == 0 || stop < start) {
            throw Error("config", "empty k grid range '" + text + "'");
        }
        for (std::size_t k = start; k <= stop; k += step) grid.push_back(k);
    } else {
        std::stringstream ss(text);
        std::string token;
        while (std::getline(ss, token, ',')) {
            grid.push_back(parse_grid_int(token));
        }
    }
    if (grid.empty()) {
        throw Error("config", "k grid '" + text + "' is empty");
    }
    return grid;
}

namespace {

struct KeyPresence {
    const char* key;
    bool present;
};

void check_keys(const RunConfig& config,
                const std::set<std::string>& required,
                const std::set<std::string>& optional) {
    const KeyPresence keys[] = {
        {"model-x", config.model_x.has_value()},
        {"model-y", config.model_y.has_value()},
        {"input", config.input_path.has_value()},
        {"k", config.k.has_value()},
        {"k-grid", config.k_grid.has_value()},
        {"pn", config.p_n.has_value()},
        {"rho1", config.rho1.has_value()},
        {"n", config.n.has_value()},
        {"replicates", config.replicates.has_value()},
        {"seed", config.seed.has_value()},
        {"output", config.output_path.has_value()},
        {"emit-plot-script", config.emit_plot_script},
    };
    for (const auto& [key, present] : keys) {
        const bool allowed = required.count(key) || optional.count(key);
        if (present && !allowed) {
            throw Error("config", "unexpected key '" + std::string(key) +
                                      "' for command '" + config.command +
                                      "'");
        }
        if (!present && required.count(key)) {
            throw Error("config", "missing key '" + std::string(key) +
                                      "' for command '" + config.command +
                                      "'");
        }
    }
}

}  // namespace

void validate_config(const RunConfig& config) {
    if (config.command == "estimate") {
        check_keys(config, {"input", "k"}, {"pn"});
    } else if (config.command == "curves") {
        check_keys(config,
                   {"model-x", "model-y", "n", "replicates", "seed", "output"},
                   {"k-grid", "emit-plot-script"});
    } else if (config.command == "quantile-curves") {
        check_keys(
            config,
            {"model-x", "model-y", "n", "replicates", "seed", "output", "pn"},
            {"k-grid", "emit-plot-script"});
    } else if (config.command == "clt") {
        check_keys(config,
                   {"model-x", "model-y", "n", "k", "replicates", "seed",
                    "output"},
                   {});
    } else if (config.command == "constants") {
        check_keys(config, {"model-x", "model-y"}, {"rho1", "output"});
    } else {
        throw Error("config",
                    "unknown command '" + config.command +
                        "' (expected estimate, curves, quantile-curves, clt "
                        "or constants)");
    }
}

namespace {

std::string plot_script_path(const std::string& output_path) {
    const auto dot = output_path.find_last_of('.');
    const auto slash = output_path.find_last_of('/');
    if (dot == std::string::npos ||
        (slash != std::string::npos && dot < slash)) {
        return output_path + "_plot.py";
    }
    return output_path.substr(0, dot) + "_plot.py";
}

void write_plot_script(const std::string& path, const std::string& csv_text,
                       const std::string& title) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("io", "cannot write plot script '" + path + "'");
    }
    out << "#!/usr/bin/env python3\n"
        << "# Self-contained: the result CSV is embedded below. Renders\n"
        << "# bias (left) and RMSE (right) against k, one line per\n"
        << "# estimator, and writes a PNG next to this script.\n"
        << "import csv\n"
        << "import io\n"
        << "import os\n\n"
        << "import matplotlib\n"
        << "matplotlib.use(\"Agg\")\n"
        << "import matplotlib.pyplot as plt\n\n"
        << "TITLE = " << std::quoted(title) << "\n"
        << "DATA = \"\"\"" << csv_text << "\"\"\"\n\n"
        << "rows = list(csv.DictReader(io.StringIO(DATA.strip())))\n"
        << "estimators = sorted({r[\"estimator\"] for r in rows})\n"
        << "fig, (ax_bias, ax_rmse) = plt.subplots(1, 2, figsize=(11, 4))\n"
        << "for name in estimators:\n"
        << "    sub = [r for r in rows if r[\"estimator\"] == name]\n"
        << "    ks = [int(r[\"k\"]) for r in sub]\n"
        << "    ax_bias.plot(ks, [float(r[\"bias\"]) for r in sub], "
           "label=name)\n"
        << "    ax_rmse.plot(ks, [float(r[\"rmse\"]) for r in sub], "
           "label=name)\n"
        << "ax_bias.set_xlabel(\"k\")\n"
        << "ax_bias.set_ylabel(\"bias\")\n"
        << "ax_bias.axhline(0.0, color=\"gray\", linewidth=0.5)\n"
        << "ax_rmse.set_xlabel(\"k\")\n"
        << "ax_rmse.set_ylabel(\"RMSE\")\n"
        << "ax_bias.legend()\n"
        << "ax_rmse.legend()\n"
        << "fig.suptitle(TITLE)\n"
        << "fig.tight_layout()\n"
        << "target = os.path.splitext(os.path.abspath(__file__))[0] + "
           "\".png\"\n"
        << "fig.savefig(target, dpi=150)\n"
        << "print(target)\n";
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("io", "cannot write output file '" + path + "'");
    }
    out << content;
    if (!out) {
        throw Error("io", "failed while writing '" + path + "'");
    }
}

ExperimentSpec build_spec(const RunConfig& config, std::ostream& err) {
    ExperimentSpec spec{parse_model(*config.model_x),
                        parse_model(*config.model_y),
                        *config.n,
                        *config.replicates,
                        config.k_grid ? *config.k_grid
                                      : default_k_grid(*config.n),
                        config.p_n,
                        *config.seed};
    if (spec.model_x.evi() >= spec.model_y.evi()) {
        // estimator theory assumes the truncator has the heavier tail;
        // the run proceeds but the estimates are outside that theory
        err << "warning[tail-ordering]: model-x extreme value index ("
            << format_double(spec.model_x.evi())
            << ") is not below model-y's ("
            << format_double(spec.model_y.evi()) << ")\n";
    }
    return spec;
}

int cmd_estimate(const RunConfig& config, std::ostream& out) {
    const ObservedSample sample = read_sample_csv_file(*config.input_path);
    const EviEstimate estimate = evi_lynden_bell(sample, *config.k);
    out << "estimator = " << estimator_name(estimate.kind) << "\n"
        << "n = " << sample.size() << "\n"
        << "k = " << estimate.k << "\n"
        << "threshold = " << format_double(estimate.threshold) << "\n"
        << "exceedances = " << estimate.exceedances << "\n"
        << "gamma = " << format_double(estimate.value) << "\n";
    if (config.p_n) {
        const double x_hat = quantile_weissman(sample, *config.k, *config.p_n);
        out << "p_n = " << format_double(*config.p_n) << "\n"
            << "quantile = " << format_double(x_hat) << "\n";
    }
    return 0;
}

int cmd_curves(const RunConfig& config, std::ostream& out,
               std::ostream& err, bool quantile) {
    const ExperimentSpec spec = build_spec(config, err);
    const CurveResult result = quantile
                                   ? run_quantile_curve(spec, config.threads)
                                   : run_bias_rmse(spec, config.threads);
    const std::string csv = curve_csv_string(result);
    write_file(*config.output_path, csv);
    out << "wrote " << *config.output_path << "\n";
    if (config.emit_plot_script) {
        const std::string script = plot_script_path(*config.output_path);
        std::ostringstream title;
        title << *config.model_x << " truncated by " << *config.model_y
              << "  n=" << *config.n << "  replicates=" << *config.replicates;
        write_plot_script(script, csv, title.str());
        out << "wrote " << script << "\n";
    }
    return 0;
}

int cmd_clt(const RunConfig& config, std::ostream& out) {
    const HeavyTailModel model_x = parse_model(*config.model_x);
    const HeavyTailModel model_y = parse_model(*config.model_y);
    const CltReport report =
        run_clt_check(model_x, model_y, *config.n, *config.k,
                      *config.replicates, *config.seed, config.threads);
    std::ostringstream csv;
    write_clt_csv(csv, report);
    write_file(*config.output_path, csv.str());
    out << "wrote " << *config.output_path << "\n";
    return 0;
}

int cmd_constants(const RunConfig& config, std::ostream& out) {
    const HeavyTailModel model_x = parse_model(*config.model_x);
    const HeavyTailModel model_y = parse_model(*config.model_y);
    const double rho1 = config.rho1.value_or(0.0);
    const TheoryConstants constants =
        make_theory_constants(model_x, model_y, rho1);
    std::ostringstream report;
    report << "model_x = " << model_x.str() << "\n"
           << "model_y = " << model_y.str() << "\n"
           << "gamma1 = " << format_double(constants.gamma1) << "\n"
           << "gamma2 = " << format_double(constants.gamma2) << "\n"
           << "rho1 = " << format_double(constants.rho1) << "\n"
           << "p = " << format_double(constants.p) << "\n"
           << "alpha = " << format_double(constants.alpha) << "\n"
           << "m = " << format_double(constants.m) << "\n"
           << "s2 = " << format_double(constants.s2) << "\n"
           << "c0 = "
           << format_double(c_k(constants.gamma1, constants.gamma2, 0)) << "\n"
           << "c1 = "
           << format_double(c_k(constants.gamma1, constants.gamma2, 1)) << "\n"
           << "c2 = "
           << format_double(c_k(constants.gamma1, constants.gamma2, 2))
           << "\n";
    out << report.str();
    if (config.output_path) {
        write_file(*config.output_path, report.str());
    }
    return 0;
}

}  // namespace

int dispatch(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        validate_config(config);
        if (config.command == "estimate") return cmd_estimate(config, out);
        if (config.command == "curves") {
            return cmd_curves(config, out, err, false);
        }
        if (config.command == "quantile-curves") {
            return cmd_curves(config, out, err, true);
        }
        if (config.command == "clt") return cmd_clt(config, out);
        return cmd_constants(config, out);
    } catch (const Error& e) {
        err << "error[" << e.code() << "]: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error[internal]: " << e.what() << "\n";
        return 1;
    }
}

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
    CLI::App app{"tail-index and extreme-quantile estimation for randomly "
                 "right-truncated heavy-tailed data"};
    app.set_config("--config", "",
                   "INI config file with flat 'key = value' lines; "
                   "command-line flags override file values");

    std::string command;
    std::string model_x, model_y, input, output, k_grid_text;
    std::uint64_t k = 0, n = 0, replicates = 0, seed = 0;
    double p_n = 0.0, rho1 = 0.0;
    bool emit_plot = false;
    int threads = 0;

    app.add_option("command", command,
                   "estimate | curves | quantile-curves | clt | constants")
        ->required();
    auto* opt_mx = app.add_option("--model-x", model_x,
                                  "x model literal, e.g. burr(10,4,1)");
    auto* opt_my = app.add_option("--model-y", model_y,
                                  "y (truncator) model literal");
    auto* opt_input = app.add_option("--input", input, "input sample CSV");
    auto* opt_k = app.add_option("--k", k, "number of top order statistics");
    auto* opt_kgrid = app.add_option("--k-grid", k_grid_text,
                                     "k values: '10,20,50' or '10:150:5'");
    auto* opt_pn = app.add_option("--pn", p_n, "extreme quantile order");
    auto* opt_rho1 =
        app.add_option("--rho1", rho1, "second-order index (nonpositive)");
    auto* opt_n = app.add_option("--n", n, "observed sample size");
    auto* opt_reps =
        app.add_option("--replicates", replicates, "Monte Carlo replicates");
    auto* opt_seed = app.add_option("--seed", seed, "experiment seed");
    auto* opt_output = app.add_option("--output", output, "output CSV path");
    app.add_flag("--emit-plot-script", emit_plot,
                 "also write a self-contained plot script next to the CSV");
    app.add_option("--threads", threads,
                   "worker threads (0 = all, 1 = serial)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    RunConfig config;
    config.command = command;
    config.threads = threads;
    config.emit_plot_script = emit_plot;
    if (opt_mx->count()) config.model_x = model_x;
    if (opt_my->count()) config.model_y = model_y;
    if (opt_input->count()) config.input_path = input;
    if (opt_k->count()) config.k = static_cast<std::size_t>(k);
    if (opt_pn->count()) config.p_n = p_n;
    if (opt_rho1->count()) config.rho1 = rho1;
    if (opt_n->count()) config.n = static_cast<std::size_t>(n);
    if (opt_reps->count()) {
        config.replicates = static_cast<std::size_t>(replicates);
    }
    if (opt_seed->count()) config.seed = seed;
    if (opt_output->count()) config.output_path = output;
    if (opt_kgrid->count()) {
        try {
            config.k_grid = parse_k_grid(k_grid_text);
        } catch (const Error& e) {
            err << "error[" << e.code() << "]: " << e.what() << "\n";
            return 1;
        }
    }
    return dispatch(config, out, err);
}

}  // namespace lbtail
