#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <carpetdim/carpetdim.hpp>

using namespace carpetdim;

namespace {

// exit codes: 0 ok, 1 property violation, 2 bad input, 3 convergence
// failure, 4 resource limit

struct TargetFlags {
    std::string target = "cylinder";
    double H = -1;
    bool has_H = false;
    std::string H_file;

    void attach(CLI::App* cmd) {
        cmd->add_option("--target", target, "target kind")
            ->check(CLI::IsMember({"cylinder", "ball"}));
        cmd->add_option("--H", H, "row-average log fiber count (ball targets)")
            ->each([this](const std::string&) { has_H = true; });
        cmd->add_option("--H-from-bernoulli", H_file,
                        "probability vector file; H = sum of row weights times log T_a");
    }

    DimParams params(const CarpetSpec& spec, double alpha) const {
        if (target == "cylinder") {
            if (has_H || !H_file.empty())
                throw DomainError("--H and --H-from-bernoulli apply to ball targets only");
            return cylinder_params(alpha);
        }
        if (has_H && !H_file.empty())
            throw DomainError("give either --H or --H-from-bernoulli, not both");
        if (has_H) return ball_params(spec, alpha, H);
        if (!H_file.empty())
            return ball_params(spec, alpha, bernoulli_H(spec, load_prob_vector(spec, H_file)));
        throw DomainError("ball target needs --H or --H-from-bernoulli");
    }
};

class OutStream {
public:
    explicit OutStream(const std::string& path) {
        if (path.empty()) return;
        file_.open(path);
        if (!file_) throw DomainError("cannot open output file: " + path);
    }
    std::ostream& get() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

void print_dim(const OptResult& r) {
    std::cout << "DIM " << format_g9(r.value) << '\n'
              << "z_minus " << format_g9(r.argmax.z_minus) << '\n'
              << "z_1 " << format_g9(r.argmax.z1) << '\n'
              << "z_2 " << format_g9(r.argmax.z2) << '\n'
              << "z_plus " << format_g9(r.argmax.z_plus) << '\n';
    for (int i = 0; i < 6; ++i)
        std::cout << 'd' << (i + 1) << ' ' << format_g9(r.breakdown.d[static_cast<std::size_t>(i)])
                  << '\n';
    std::cout << "active " << active_set_string(r.breakdown) << '\n';
}

int run(int argc, char** argv) {
    CLI::App app{"shrinking-target dimensions on self-affine carpets"};
    app.require_subcommand(1);

    std::string carpet_path, out_path;
    double alpha = 0, alpha_min = 0, alpha_max = 0;
    int steps = 0, resolution = 30, grid = 200, words = 200, curve_points = 400;
    long long n = 0;
    double h_bound = -1, z_bound = -1;
    bool has_h = false, has_z = false;
    std::uint64_t seed = 1;
    bool figure5 = false;
    TargetFlags dim_target, sweep_target, oracle_target, sim_target;

    auto* cmd_dim = app.add_subcommand("dim", "maximize the six-term dimension formula");
    cmd_dim->add_option("--carpet", carpet_path, "carpet JSON file")->required();
    cmd_dim->add_option("--alpha", alpha, "shrinking rate")->required();
    dim_target.attach(cmd_dim);

    auto* cmd_sweep = app.add_subcommand("sweep", "dimension curve over an alpha range");
    cmd_sweep->add_option("--carpet", carpet_path, "carpet JSON file");
    auto* opt_min = cmd_sweep->add_option("--alpha-min", alpha_min, "range start");
    auto* opt_max = cmd_sweep->add_option("--alpha-max", alpha_max, "range end");
    auto* opt_steps = cmd_sweep->add_option("--steps", steps, "grid points (>= 2)");
    auto* opt_fig = cmd_sweep->add_flag("--figure5", figure5,
                                        "preset: carpet (3,8,(5,2,8)), ball H=0.8, 600 points on [0,6]");
    opt_fig->excludes(opt_min)->excludes(opt_max)->excludes(opt_steps);
    cmd_sweep->add_option("--out", out_path, "CSV path (default stdout)");
    sweep_target.attach(cmd_sweep);

    auto* cmd_oracle = app.add_subcommand("oracle", "brute-force lattice check of maximize");
    cmd_oracle->add_option("--carpet", carpet_path, "carpet JSON file")->required();
    cmd_oracle->add_option("--alpha", alpha, "shrinking rate")->required();
    cmd_oracle->add_option("--resolution", resolution, "lattice denominator K")
        ->check(CLI::PositiveNumber);
    oracle_target.attach(cmd_oracle);

    auto* cmd_simulate = app.add_subcommand("simulate", "Monte-Carlo local dimensions");
    cmd_simulate->add_option("--carpet", carpet_path, "carpet JSON file")->required();
    cmd_simulate->add_option("--alpha", alpha, "shrinking rate")->required();
    cmd_simulate->add_option("--n", n, "construction depth")->required();
    cmd_simulate->add_option("--words", words, "sample size")->check(CLI::PositiveNumber);
    cmd_simulate->add_option("--seed", seed, "RNG seed");
    cmd_simulate->add_option("--curve-points", curve_points,
                             "thinned curve scales besides the table rows (0 = table only)");
    cmd_simulate->add_option("--out", out_path, "CSV path (default stdout)");
    sim_target.attach(cmd_simulate);

    auto* cmd_count = app.add_subcommand("count", "exact pair/row entropy counts");
    cmd_count->set_help_flag("--help", "print help");  // frees -h / --h for the entropy bound
    cmd_count->add_option("--carpet", carpet_path, "carpet JSON file")->required();
    cmd_count->add_option("--n", n, "word length")->required();
    cmd_count->add_option("--h", h_bound, "pair-entropy ceiling (nats)")
        ->each([&has_h](const std::string&) { has_h = true; });
    cmd_count->add_option("--z", z_bound, "row-entropy floor (nats)")
        ->each([&has_z](const std::string&) { has_z = true; });

    auto* cmd_frontier = app.add_subcommand("frontier", "psi curve CSV");
    cmd_frontier->add_option("--carpet", carpet_path, "carpet JSON file")->required();
    cmd_frontier->add_option("--grid", grid, "grid points")->check(CLI::PositiveNumber);
    cmd_frontier->add_option("--out", out_path, "CSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (cmd_dim->parsed()) {
        auto spec = load_carpet(carpet_path);
        print_dim(maximize(spec, dim_target.params(spec, alpha)));
        return 0;
    }

    if (cmd_sweep->parsed()) {
        CarpetSpec spec = figure5 ? figure5_carpet() : load_carpet(carpet_path);
        DimParams base = figure5 ? figure5_params(spec) : sweep_target.params(spec, 0.0);
        std::vector<double> alphas;
        if (figure5) {
            alphas = figure5_alphas();
        } else {
            if (opt_steps->count() == 0 || steps < 2) throw DomainError("sweep needs --steps >= 2");
            if (opt_min->count() == 0 || opt_max->count() == 0 || !(alpha_max > alpha_min))
                throw DomainError("sweep needs --alpha-min < --alpha-max");
            for (int i = 0; i < steps; ++i)
                alphas.push_back(alpha_min + (alpha_max - alpha_min) * static_cast<double>(i) /
                                                 static_cast<double>(steps - 1));
        }
        OutStream out(out_path);
        write_sweep_csv(out.get(), run_sweep(spec, base, alphas));
        return 0;
    }

    if (cmd_oracle->parsed()) {
        auto spec = load_carpet(carpet_path);
        auto params = oracle_target.params(spec, alpha);
        double bf = brute_force(spec, params, resolution);
        double mx = maximize(spec, params).value;
        double gap = std::fabs(mx - bf);
        double tol = 1.0 / static_cast<double>(resolution);  // lattice gap scale
        std::cout << "brute_force " << format_g9(bf) << '\n'
                  << "maximize " << format_g9(mx) << '\n'
                  << "gap " << format_g9(gap) << '\n'
                  << "tolerance " << format_g9(tol) << '\n';
        bool ok = gap <= tol && bf <= mx + 1e-9;
        std::cout << "check " << (ok ? "PASS" : "FAIL") << '\n';
        return ok ? 0 : 1;
    }

    if (cmd_simulate->parsed()) {
        auto spec = load_carpet(carpet_path);
        auto params = sim_target.params(spec, alpha);
        auto quadruple = maximize(spec, params).vectors;
        SimulateOptions opts;
        opts.words = words;
        opts.seed = seed;
        opts.curve_points = curve_points;
        auto res = simulate_schedule(spec, params, quadruple, n, opts);
        OutStream out(out_path);
        write_simulate_csv(out.get(), res);
        return 0;
    }

    if (cmd_count->parsed()) {
        auto spec = load_carpet(carpet_path);
        if (!has_h && !has_z) throw DomainError("count needs --h or --z");
        std::cout << "n " << n << '\n';
        bool ok = true;
        if (has_h) {
            auto c = count_entropy_bounded(spec, n, h_bound);
            double bound = types_bound(spec, n, h_bound);
            std::cout << "pair_count " << u128_to_string(c) << '\n'
                      << "pair_bound " << format_g9(bound) << '\n';
            double cv = std::stod(u128_to_string(c));
            ok = ok && cv <= bound * (1 + 1e-12);
        }
        if (has_z)
            std::cout << "row_count " << u128_to_string(count_rowentropy_above(spec, n, z_bound))
                      << '\n';
        std::cout << "check " << (ok ? "PASS" : "FAIL") << '\n';
        return ok ? 0 : 1;
    }

    auto spec = load_carpet(carpet_path);
    OutStream out(out_path);
    write_frontier_csv(out.get(), spec, grid);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ConvergenceFailure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const CertificationFailure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const ResourceLimit& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
