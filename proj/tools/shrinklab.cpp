// Command-line front end: shoot, sweep and verify.
// Options live on the top-level app so a key=value config file can set any
// of them by its long name (e.g. `n=3`, `f0-grid=0.1,0.01`).
#include "shrinklab/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    namespace cli = shrinklab::cli;
    cli::RunConfig c;
    CLI::App app{"Shrinker profile shooting and geometric identity verification"};
    app.set_config("--config", "", "key=value configuration file; flags take precedence");
    app.require_subcommand(1);
    app.add_subcommand("shoot", "integrate one profile and locate its first intercept")->fallthrough();
    app.add_subcommand("sweep", "r_alpha over a descending f0 grid")->fallthrough();
    app.add_subcommand("verify", "run identity checks")->fallthrough();

    app.add_option("--n", c.n, "hypersurface dimension n");
    app.add_option("--f0", c.f0, "initial height f(0)");
    app.add_option("--f0-grid", c.f0_grid, "comma-separated descending f0 values (sweep)")->delimiter(',');
    app.add_option("--r0", c.r0, "start radius");
    app.add_option("--rel-tol", c.rel_tol, "integrator relative tolerance");
    app.add_option("--abs-tol", c.abs_tol, "integrator absolute tolerance");
    app.add_option("--intercept-tol", c.intercept_tol, "|f(r_alpha)| bound for the bisection");
    app.add_option("--r-max", c.r_max, "integration horizon in r (default 3 sqrt(n))");
    app.add_flag("--paper-start", c.paper_start, "start at (r0, f0) with f'(r0) = 0 instead of the series start");
    app.add_flag("--mirror", c.mirror, "profile CSV also carries the reflected branch r < 0");
    app.add_option("--out-dir", c.out_dir, "directory for CSV/JSON outputs");
    app.add_option("--seed", c.seed, "seed for sampled checks");
    app.add_option("--set", c.verify_set, "comma-separated checks (verify)")->delimiter(',');
    app.add_option("--kappa", c.kappa, "restrict curvature-dependent checks to one kappa");
    app.add_option("--R-squared", c.r_squared, "Gaussian ball radius squared, e.g. 4n or 3n");
    app.add_option("--radius", c.radius, "geodesic ball radius");
    app.add_option("--s", c.s, "deformation parameter");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cli::exit_usage;
    }
    c.command = app.get_subcommands().front()->get_name();

    try {
        return cli::run(c);
    } catch (const cli::UsageError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return cli::exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::exit_failed;
    }
}
