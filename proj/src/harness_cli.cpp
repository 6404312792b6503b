#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "randop/errors.hpp"
#include "randop/harness.hpp"

namespace randop::harness {

namespace {

enum ExitCode : int { kOk = 0, kInvalid = 1, kNumerical = 2, kCheckFailed = 3 };

nlohmann::json load_json(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw InvalidArgument("cannot open config '" + path + "'");
    try {
        return nlohmann::json::parse(is);
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidArgument("config '" + path + "' is not valid JSON: " + e.what());
    }
}

void print_summary(const ExperimentReport& report, std::ostream& os) {
    os << report.config.experiment << ": " << report.config.replications << " replications, seed "
       << report.config.master_seed << "\n";
    for (const auto& s : report.statistics) {
        char buf[256];
        std::snprintf(buf, sizeof buf, "  %-32s mean %.10g  se %.3g  median %.10g\n", s.name.c_str(), s.mean, s.se,
                      s.median);
        os << buf;
    }
    for (const auto& [k, v] : report.theory) os << "  theory " << k << " = " << v << "\n";
    for (const auto& c : report.checks) os << "  [" << (c.passed ? "PASS" : "FAIL") << "] " << c.name << ": " << c.detail << "\n";
}

}  // namespace

int cli_main(int argc, char** argv) {
    CLI::App app{"Random Gaussian-kernel operators over stationary point processes"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    std::int64_t reps = 0;
    unsigned threads = 0;
    bool check = false;

    for (const auto& name : experiment_names()) {
        auto* sub = app.add_subcommand(name, "run the '" + name + "' experiment");
        sub->add_option("--config", config_path, "JSON experiment config")->required();
        sub->add_option("--out", out_dir, "output directory (default: randop-<experiment>)");
        sub->add_option("--seed", seed, "override master_seed");
        sub->add_option("--reps", reps, "override replications");
        sub->add_option("--threads", threads, "worker threads (default: hardware concurrency)");
        sub->add_flag("--check", check, "exit 3 when any acceptance check fails");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInvalid;
    }

    const std::string experiment = app.get_subcommands().front()->get_name();
    const auto* sub = app.get_subcommands().front();
    try {
        auto doc = load_json(config_path);
        if (sub->count("--seed")) doc["master_seed"] = seed;
        if (sub->count("--reps")) doc["replications"] = reps;
        const auto cfg = parse_config(doc, experiment);
        RunOptions opts;
        if (threads > 0) opts.threads = threads;
        const auto report = run(cfg, opts);
        write_report(report, out_dir.empty() ? "randop-" + experiment : out_dir);
        print_summary(report, std::cout);
        if (check && !report.all_checks_passed()) return kCheckFailed;
        return kOk;
    } catch (const InvalidArgument& e) {
        std::cerr << "randop: invalid input: " << e.what() << "\n";
        return kInvalid;
    } catch (const NumericalFailure& e) {
        std::cerr << "randop: numerical failure: " << e.what() << "\n";
        return kNumerical;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "randop: invalid config: " << e.what() << "\n";
        return kInvalid;
    }
}

}  // namespace randop::harness
