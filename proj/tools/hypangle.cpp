#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <tuple>
#include <vector>

#include <CLI11.hpp>

#include "common.hpp"
#include "hypangle/hypangle.hpp"
#include "verify.hpp"

namespace {

using namespace hypangle;

constexpr double no_value = std::numeric_limits<double>::quiet_NaN();

// Exactly one of radius / squared norm bound; returns the bound Q^2.
double resolve_bound(const std::string& radius, const std::string& norm_sq,
                     double& radius_out) {
    if (radius.empty() == norm_sq.empty())
        throw std::invalid_argument("give exactly one of --radius / --norm-sq");
    if (!radius.empty()) {
        radius_out = tool::parse_real(radius);
        return 2.0 * std::cosh(radius_out);
    }
    const double q2 = tool::parse_real(norm_sq);
    if (!(q2 >= 2.0)) throw std::invalid_argument("--norm-sq must be >= 2");
    radius_out = std::acosh(q2 / 2.0);
    return q2;
}

struct CountArgs {
    std::int64_t level = 1;
    std::string z0 = "0,1";
    std::string radius;
    std::string norm_sq;
    int workers = 1;
    std::string config;
    tool::OutputOpts out;
};

int run_count(const CountArgs& args) {
    const Point z0 = tool::parse_point(args.z0);
    if (args.radius.empty() == args.norm_sq.empty())
        throw std::invalid_argument("give exactly one of --radius / --norm-sq");
    const bool by_radius = !args.radius.empty();
    std::vector<double> radii, norms;
    if (by_radius) {
        radii = tool::parse_real_list(args.radius);
        for (const double r : radii) norms.push_back(2.0 * std::cosh(r));
    } else {
        norms = tool::parse_real_list(args.norm_sq);
        for (const double q2 : norms) {
            if (!(q2 >= 2.0)) throw std::invalid_argument("--norm-sq must be >= 2");
            radii.push_back(std::acosh(q2 / 2.0));
        }
    }
    Table table({"radius", "norm_sq", "count", "main", "rel_error"});
    double max_rel = 0.0;
    for (std::size_t i = 0; i < norms.size(); ++i) {
        const std::int64_t count =
            count_ball({args.level, z0, norms[i]}, args.workers);
        const double main = by_radius
                                ? ball_main_term(args.level, radii[i])
                                : ball_main_term_from_norm(args.level, norms[i]);
        const double rel = std::abs(static_cast<double>(count) - main) / main;
        table.add_row({num_cell(radii[i]), num_cell(norms[i]), int_cell(count),
                       num_cell(main), num_cell(rel)});
        max_rel = std::max(max_rel, tool::reparse(rel));
    }
    tool::emit_table(table, args.out);
    JsonObject summary;
    summary.put_str("command", "count")
        .put_int("level", args.level)
        .put_num("z0_x", z0.x)
        .put_num("z0_y", z0.y)
        .put_str("input", by_radius ? "radius" : "norm_sq")
        .put_int("workers", args.workers)
        .put_int("rows", static_cast<std::int64_t>(norms.size()))
        .put_num("max_rel_error", max_rel);
    tool::emit_summary(summary, args.out);
    return 0;
}

struct AnglesArgs {
    std::int64_t level = 1;
    std::string z0 = "0,1";
    std::string z1 = "0,1";
    std::string radius;
    std::string norm_sq;
    int workers = 1;
    std::string config;
    tool::OutputOpts out;
};

void sort_samples(std::vector<AngleSample>& samples) {
    std::sort(samples.begin(), samples.end(),
              [](const AngleSample& l, const AngleSample& r) {
                  return std::tie(l.gamma.c, l.gamma.a, l.gamma.d, l.gamma.b) <
                         std::tie(r.gamma.c, r.gamma.a, r.gamma.d, r.gamma.b);
              });
}

int run_angles(const AnglesArgs& args) {
    const Point z0 = tool::parse_point(args.z0);
    const Point z1 = tool::parse_point(args.z1);
    double radius = no_value;
    const double q2 = resolve_bound(args.radius, args.norm_sq, radius);
    AngleCollection got = collect_angles({args.level, z0, q2}, z1, args.workers);
    sort_samples(got.samples);
    Table table({"a", "b", "c", "d", "theta", "dist"});
    std::vector<double> emitted;
    emitted.reserve(got.samples.size());
    for (const auto& s : got.samples) {
        table.add_row({int_cell(s.gamma.a), int_cell(s.gamma.b), int_cell(s.gamma.c),
                       int_cell(s.gamma.d), num_cell(s.theta), num_cell(s.dist)});
        emitted.push_back(tool::reparse(s.theta));
    }
    tool::emit_table(table, args.out);
    const NormalizedTarget target = normalize_target(z0, z1);
    double ks = no_value;
    if (!emitted.empty())
        ks = ks_distance(Ecdf(std::move(emitted)),
                         [&target](double w) { return xi(target, w); });
    JsonObject summary;
    summary.put_str("command", "angles")
        .put_int("level", args.level)
        .put_num("z0_x", z0.x)
        .put_num("z0_y", z0.y)
        .put_num("z1_x", z1.x)
        .put_num("z1_y", z1.y)
        .put_num("radius", radius)
        .put_num("norm_sq", q2)
        .put_int("workers", args.workers)
        .put_int("count", static_cast<std::int64_t>(got.samples.size()))
        .put_int("undefined_count", got.undefined_count)
        .put_num("ks", ks);
    tool::emit_summary(summary, args.out);
    return 0;
}

struct CdfArgs {
    std::int64_t level = 1;
    std::string z0 = "0,1";
    std::string z1 = "0,1";
    std::string radius;
    std::string norm_sq;
    std::string omega = "-1.5707963267948966:1.5707963267948966:64";
    int workers = 1;
    std::string config;
    tool::OutputOpts out;
};

int run_cdf(const CdfArgs& args) {
    const Point z0 = tool::parse_point(args.z0);
    const Point z1 = tool::parse_point(args.z1);
    double radius = no_value;
    const double q2 = resolve_bound(args.radius, args.norm_sq, radius);
    const tool::Grid grid = tool::parse_grid(args.omega);
    const AngleCollection got = collect_angles({args.level, z0, q2}, z1, args.workers);
    std::vector<double> thetas;
    thetas.reserve(got.samples.size());
    for (const auto& s : got.samples) thetas.push_back(s.theta);
    const bool have = !thetas.empty();
    const Ecdf empirical = have ? Ecdf(std::move(thetas)) : Ecdf({0.0});
    const NormalizedTarget target = normalize_target(z0, z1);
    Table table({"omega", "ecdf", "xi", "abs_err"});
    double max_err = 0.0;
    for (const double w : grid.points()) {
        const double model = xi(target, w);
        const double emp = have ? empirical(w) : no_value;
        const double err = have ? std::abs(emp - model) : no_value;
        table.add_row(
            {num_cell(w), num_cell(emp), num_cell(model), num_cell(err)});
        if (have) max_err = std::max(max_err, tool::reparse(err));
    }
    tool::emit_table(table, args.out);
    JsonObject summary;
    summary.put_str("command", "cdf")
        .put_int("level", args.level)
        .put_num("z0_x", z0.x)
        .put_num("z0_y", z0.y)
        .put_num("z1_x", z1.x)
        .put_num("z1_y", z1.y)
        .put_num("radius", radius)
        .put_num("norm_sq", q2)
        .put_int("workers", args.workers)
        .put_int("samples", static_cast<std::int64_t>(got.samples.size()))
        .put_int("undefined_count", got.undefined_count)
        .put_num("max_abs_err", have ? max_err : no_value);
    tool::emit_summary(summary, args.out);
    return 0;
}

struct DensityArgs {
    std::string z0 = "0,1";
    std::string z1 = "0,1";
    std::string grid = "-1.5:1.5:60";
    double fd_step = 1e-5;
    std::string config;
    tool::OutputOpts out;
};

int run_density(const DensityArgs& args) {
    const Point z0 = tool::parse_point(args.z0);
    const Point z1 = tool::parse_point(args.z1);
    if (!(args.fd_step > 0.0))
        throw std::invalid_argument("--fd-step must be positive");
    const tool::Grid grid = tool::parse_grid(args.grid);
    const TheoryContext ctx = make_context(1, z0, z1);
    Table table({"t", "rho", "xi_prime_fd"});
    double max_gap = 0.0;
    for (const double t : grid.points()) {
        const double rho = density_rho(ctx, t);
        const double fd = (xi(ctx.target, t + args.fd_step) -
                           xi(ctx.target, t - args.fd_step)) /
                          (2.0 * args.fd_step);
        table.add_row({num_cell(t), num_cell(rho), num_cell(fd)});
        max_gap = std::max(max_gap,
                           std::abs(tool::reparse(rho) / pi - tool::reparse(fd)));
    }
    tool::emit_table(table, args.out);
    JsonObject summary;
    summary.put_str("command", "density")
        .put_num("z0_x", z0.x)
        .put_num("z0_y", z0.y)
        .put_num("z1_x", z1.x)
        .put_num("z1_y", z1.y)
        .put_num("fd_step", args.fd_step)
        .put_int("rows", grid.steps + 1)
        .put_num("max_derivative_gap", max_gap);
    tool::emit_summary(summary, args.out);
    return 0;
}

struct SectorArgs {
    std::int64_t level = 1;
    std::string z0 = "0,1";
    std::string radius;
    std::string norm_sq;
    std::string betas = "inf";
    int workers = 1;
    std::string config;
    tool::OutputOpts out;
};

int run_sector(const SectorArgs& args) {
    const Point z0 = tool::parse_point(args.z0);
    double radius = no_value;
    const double q2 = resolve_bound(args.radius, args.norm_sq, radius);
    const double q = std::sqrt(q2);
    Table table({"beta", "count", "main", "rel"});
    double max_rel = 0.0;
    for (const double beta : tool::parse_real_list(args.betas)) {
        const std::int64_t count =
            count_sector({{args.level, z0, q2}, beta}, args.workers);
        const double main = sector_main_term(args.level, beta, q);
        const double rel = std::abs(static_cast<double>(count) - main) / main;
        table.add_row(
            {num_cell(beta), int_cell(count), num_cell(main), num_cell(rel)});
        if (std::isfinite(rel)) max_rel = std::max(max_rel, tool::reparse(rel));
    }
    tool::emit_table(table, args.out);
    JsonObject summary;
    summary.put_str("command", "sector")
        .put_int("level", args.level)
        .put_num("z0_x", z0.x)
        .put_num("z0_y", z0.y)
        .put_num("norm_sq", q2)
        .put_int("workers", args.workers)
        .put_int("rows", static_cast<std::int64_t>(table.row_count()))
        .put_num("max_rel_error", max_rel);
    tool::emit_summary(summary, args.out);
    return 0;
}

struct KloostermanArgs {
    std::string m = "1";
    std::string n = "1";
    std::string q = "5";
    std::string interval;
    std::string config;
    tool::OutputOpts out;
};

int run_kloosterman(const KloostermanArgs& args) {
    const auto ms = tool::parse_int_list(args.m);
    const auto ns = tool::parse_int_list(args.n);
    const auto qs = tool::parse_int_list(args.q);
    const bool with_interval = !args.interval.empty();
    std::int64_t ilo = 0, ihi = -1;
    if (with_interval) {
        const auto bounds = tool::parse_int_list(args.interval);
        if (bounds.size() != 2 || bounds[0] > bounds[1] || bounds[0] < 0)
            throw std::invalid_argument("--interval expects lo,hi with 0 <= lo <= hi");
        ilo = bounds[0];
        ihi = bounds[1];
    }
    std::vector<std::string> columns{"m", "n", "q", "re", "im", "weil_ratio"};
    if (with_interval) {
        columns.push_back("interval_re");
        columns.push_back("interval_im");
        columns.push_back("interval_ratio");
    }
    Table table(columns);
    double max_ratio = 0.0;
    std::int64_t violations = 0;
    for (const std::int64_t m : ms)
        for (const std::int64_t n : ns)
            for (const std::int64_t q : qs) {
                const auto s = kloosterman(m, n, q);
                const double ratio = std::abs(s) / weil_bound(m, n, q);
                std::vector<Cell> row{int_cell(m),        int_cell(n),
                                      int_cell(q),        num_cell(s.real()),
                                      num_cell(s.imag()), num_cell(ratio)};
                if (with_interval) {
                    const std::int64_t hi = std::min(ihi, q - 1);
                    const auto part = ilo <= hi
                                          ? kloosterman_incomplete(m, n, q, ilo, hi)
                                          : std::complex<double>(0.0, 0.0);
                    row.push_back(num_cell(part.real()));
                    row.push_back(num_cell(part.imag()));
                    row.push_back(num_cell(std::abs(part) / std::abs(s)));
                }
                table.add_row(std::move(row));
                max_ratio = std::max(max_ratio, tool::reparse(ratio));
                if (ratio > 1.0) ++violations;
            }
    tool::emit_table(table, args.out);
    JsonObject summary;
    summary.put_str("command", "kloosterman")
        .put_int("rows", static_cast<std::int64_t>(table.row_count()))
        .put_num("max_weil_ratio", max_ratio)
        .put_int("violations", violations);
    tool::emit_summary(summary, args.out);
    return 0;
}

void add_output_options(CLI::App* sub, tool::OutputOpts& out) {
    sub->add_option("--format", out.format, "table format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--output", out.output, "write the table to a file (default stdout)");
    sub->add_option("--summary", out.summary,
                    "write the summary JSON to a file (default stderr)");
}

void add_config_option(CLI::App* sub, std::string& path) {
    sub->add_option("--config", path,
                    "flat key=value file supplying defaults; flags override");
}

// Feeds key=value lines into the subcommand's own options.  Keys name the
// long flags without dashes; values already given on the command line win.
void apply_config(CLI::App* sub, const std::string& path) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot read " + path);
    std::string line;
    int lineno = 0;
    const auto trim = [](const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string();
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const std::string body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                        " is not key=value");
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                        " has an empty key");
        if (key == "config")
            throw std::invalid_argument("config: files cannot chain to other files");
        CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (opt == nullptr)
            throw std::invalid_argument("config: unknown key: " + key);
        if (!opt->empty()) continue;
        try {
            opt->add_result(value);
            opt->run_callback();
        } catch (const CLI::Error& e) {
            throw std::invalid_argument("config: " + key + ": " + e.what());
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Orbit statistics of congruence subgroups acting on the hyperbolic plane"};
    app.require_subcommand(1);

    CountArgs count_args;
    auto* count_cmd =
        app.add_subcommand("count", "count orbit points in a hyperbolic ball");
    add_config_option(count_cmd, count_args.config);
    count_cmd->add_option("--level", count_args.level, "congruence level N")
        ->check(CLI::PositiveNumber);
    count_cmd->add_option("--z0", count_args.z0, "base point x,y (y > 0)");
    count_cmd->add_option("--radius", count_args.radius,
                          "hyperbolic radii, comma separated");
    count_cmd->add_option("--norm-sq", count_args.norm_sq,
                          "squared norm bounds Q^2 = 2 cosh R, comma separated");
    count_cmd->add_option("--workers", count_args.workers, "enumeration threads")
        ->check(CLI::Range(1, 256));
    add_output_options(count_cmd, count_args.out);

    AnglesArgs angles_args;
    auto* angles_cmd =
        app.add_subcommand("angles", "emit per-element observation angles");
    add_config_option(angles_cmd, angles_args.config);
    angles_cmd->add_option("--level", angles_args.level, "congruence level N")
        ->check(CLI::PositiveNumber);
    angles_cmd->add_option("--z0", angles_args.z0, "base point x,y");
    angles_cmd->add_option("--z1", angles_args.z1, "target point x,y");
    angles_cmd->add_option("--radius", angles_args.radius, "hyperbolic radius");
    angles_cmd->add_option("--norm-sq", angles_args.norm_sq, "squared norm bound");
    angles_cmd->add_option("--workers", angles_args.workers, "enumeration threads")
        ->check(CLI::Range(1, 256));
    add_output_options(angles_cmd, angles_args.out);

    CdfArgs cdf_args;
    auto* cdf_cmd = app.add_subcommand(
        "cdf", "empirical angle distribution against the limit CDF");
    add_config_option(cdf_cmd, cdf_args.config);
    cdf_cmd->add_option("--level", cdf_args.level, "congruence level N")
        ->check(CLI::PositiveNumber);
    cdf_cmd->add_option("--z0", cdf_args.z0, "base point x,y");
    cdf_cmd->add_option("--z1", cdf_args.z1, "target point x,y");
    cdf_cmd->add_option("--radius", cdf_args.radius, "hyperbolic radius");
    cdf_cmd->add_option("--norm-sq", cdf_args.norm_sq, "squared norm bound");
    cdf_cmd->add_option("--omega", cdf_args.omega,
                        "evaluation grid start:stop:steps");
    cdf_cmd->add_option("--workers", cdf_args.workers, "enumeration threads")
        ->check(CLI::Range(1, 256));
    add_output_options(cdf_cmd, cdf_args.out);

    DensityArgs density_args;
    auto* density_cmd = app.add_subcommand(
        "density", "limit density against a finite-difference derivative");
    add_config_option(density_cmd, density_args.config);
    density_cmd->add_option("--z0", density_args.z0, "base point x,y");
    density_cmd->add_option("--z1", density_args.z1, "target point x,y");
    density_cmd->add_option("--grid", density_args.grid,
                            "evaluation grid start:stop:steps");
    density_cmd->add_option("--fd-step", density_args.fd_step,
                            "finite-difference step");
    add_output_options(density_cmd, density_args.out);

    SectorArgs sector_args;
    auto* sector_cmd =
        app.add_subcommand("sector", "count orbit points in angular sectors");
    add_config_option(sector_cmd, sector_args.config);
    sector_cmd->add_option("--level", sector_args.level, "congruence level N")
        ->check(CLI::PositiveNumber);
    sector_cmd->add_option("--z0", sector_args.z0, "base point x,y");
    sector_cmd->add_option("--radius", sector_args.radius, "hyperbolic radius");
    sector_cmd->add_option("--norm-sq", sector_args.norm_sq, "squared norm bound");
    sector_cmd->add_option("--beta", sector_args.betas,
                           "sector slopes, comma separated (inf/-inf allowed)");
    sector_cmd->add_option("--workers", sector_args.workers, "enumeration threads")
        ->check(CLI::Range(1, 256));
    add_output_options(sector_cmd, sector_args.out);

    KloostermanArgs kloosterman_args;
    auto* kloosterman_cmd =
        app.add_subcommand("kloosterman", "Kloosterman sums and Weil ratios");
    add_config_option(kloosterman_cmd, kloosterman_args.config);
    kloosterman_cmd->add_option("--m", kloosterman_args.m, "m values, comma separated");
    kloosterman_cmd->add_option("--n", kloosterman_args.n, "n values, comma separated");
    kloosterman_cmd->add_option("--q", kloosterman_args.q, "moduli, comma separated");
    kloosterman_cmd->add_option("--interval", kloosterman_args.interval,
                                "also sum over a in [lo,hi] only (clamped per q)");
    add_output_options(kloosterman_cmd, kloosterman_args.out);

    tool::VerifyConfig verify_cfg;
    std::vector<std::string> suite_list;
    std::string verify_config_path;
    auto* verify_cmd =
        app.add_subcommand("verify", "run the self-check suites at desk scale");
    add_config_option(verify_cmd, verify_config_path);
    verify_cmd->add_option("--suite", suite_list,
                           "suites to run (default: all)")
        ->delimiter(',');
    verify_cmd->add_option("--seed", verify_cfg.seed, "random seed");
    verify_cmd->add_option("--workers", verify_cfg.workers, "enumeration threads")
        ->check(CLI::Range(1, 256));
    verify_cmd->add_option("--inject-fault", verify_cfg.fault,
                           "perturb a named branch to prove the checks can fail");
    verify_cmd->add_flag("--list", verify_cfg.list_only, "list suite names and exit");
    verify_cmd->add_option("--summary", verify_cfg.out.summary,
                           "write the report JSON to a file (default stderr)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (count_cmd->parsed()) {
            apply_config(count_cmd, count_args.config);
            return run_count(count_args);
        }
        if (angles_cmd->parsed()) {
            apply_config(angles_cmd, angles_args.config);
            return run_angles(angles_args);
        }
        if (cdf_cmd->parsed()) {
            apply_config(cdf_cmd, cdf_args.config);
            return run_cdf(cdf_args);
        }
        if (density_cmd->parsed()) {
            apply_config(density_cmd, density_args.config);
            return run_density(density_args);
        }
        if (sector_cmd->parsed()) {
            apply_config(sector_cmd, sector_args.config);
            return run_sector(sector_args);
        }
        if (kloosterman_cmd->parsed()) {
            apply_config(kloosterman_cmd, kloosterman_args.config);
            return run_kloosterman(kloosterman_args);
        }
        if (verify_cmd->parsed()) {
            apply_config(verify_cmd, verify_config_path);
            verify_cfg.suites = suite_list;
            return tool::run_verify(verify_cfg);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::overflow_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
