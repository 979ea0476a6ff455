#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "superrad/errors.hpp"
#include "superrad/harness.hpp"

namespace {

enum ExitCode { kOk = 0, kValidation = 1, kPartial = 2, kTotal = 3 };

void print_summary(const superrad::SweepResult& r, const std::filesystem::path& dir) {
    using superrad::RowStatus;
    std::cout << r.name << ": " << r.rows.size() << " rows, " << r.count(RowStatus::Ok) << " ok, "
              << r.count(RowStatus::Partial) << " partial, " << r.count(RowStatus::Failed) << " failed";
    if (r.flagged() > 0) std::cout << ", " << r.flagged() << " cross-check flags";
    std::cout << " (" << r.wall_time << " s, " << r.workers << " workers)\n";
    std::cout << "artifacts: " << dir.string() << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Steady-state simulator for incoherently pumped emitter arrays"};
    app.require_subcommand(1);
    app.set_version_flag("--version", superrad::library_version());

    std::string run_config, output;
    std::size_t workers = 0;
    auto* run = app.add_subcommand("run", "Run an experiment configuration");
    run->add_option("config", run_config, "Configuration file (JSON)")->required();
    run->add_option("-o,--output", output, "Run directory (overrides output_dir)");
    run->add_option("-j,--workers", workers, "Worker threads (overrides SUPERRAD_WORKERS)");

    std::string validate_config;
    auto* validate = app.add_subcommand("validate", "Check a configuration without computing");
    validate->add_option("config", validate_config, "Configuration file (JSON)")->required();

    std::string run_a, run_b;
    double tol = 1e-12;
    auto* compare = app.add_subcommand("compare", "Compare results.csv of two run directories");
    compare->add_option("run_a", run_a, "First run directory")->required();
    compare->add_option("run_b", run_b, "Second run directory")->required();
    compare->add_option("--tol", tol, "Relative tolerance for numeric cells")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kValidation;
    }

    try {
        if (*validate) {
            const auto cfg = superrad::load_config(validate_config);
            std::cout << cfg.name << ": valid, " << superrad::expand_grid(cfg).size() << " grid points\n";
            return kOk;
        }
        if (*run) {
            const auto cfg = superrad::load_config(run_config);
            superrad::RunOptions opts;
            if (!output.empty()) opts.output_dir = output;
            if (workers > 0) opts.workers = workers;
            const auto result = superrad::run(cfg, opts);
            print_summary(result, opts.output_dir.value_or(cfg.output_dir));
            return result.exit_code();
        }
        const auto rep = superrad::compare_runs(run_a, run_b, tol);
        for (const auto& m : rep.mismatches) std::cout << m << "\n";
        std::cout << rep.rows_compared << " rows compared, max abs diff " << rep.max_abs_diff << ", max rel diff "
                  << rep.max_rel_diff << (rep.equal ? ": equal" : ": differ") << "\n";
        return rep.equal ? kOk : kPartial;
    } catch (const superrad::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kValidation;
    } catch (const superrad::InvalidInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kTotal;
    }
}
