// vortexred: simulate, project, equilibria, portrait, verify.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "vortexred/vortexred.hpp"

namespace vr = vortexred;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitCollision = 2;

struct Common {
    double gamma = 3.0;
    double alpha = 1.0;
    std::string out = "-";
};

void add_params(CLI::App* cmd, Common& c) {
    cmd->add_option("--gamma", c.gamma, "circulation of the central vortex")->capture_default_str();
    cmd->add_option("--alpha", c.alpha, "radius of the outer ring")->capture_default_str();
}

void emit(const std::string& path, const std::string& content) {
    if (path == "-") {
        std::cout << content;
        std::cout.flush();
    } else {
        vr::io::write_file_atomic(path, content);
    }
}

// Report stream: stdout unless stdout carries the data.
std::ostream& report(const std::string& out) { return out == "-" ? std::cerr : std::cout; }

vr::io::LoadedConfig initial_config(const std::string& init, const vr::SystemParams& params) {
    if (init == "canonical") return {params, vr::canonical_relative_equilibrium(params)};
    if (init == "mirror") return {params, vr::mirror_relative_equilibrium(params)};
    if (init == "saddle") return {params, vr::saddle_relative_equilibrium(params)};
    if (init.rfind("sample:", 0) == 0) {
        const std::string s = init.substr(7);
        std::size_t used = 0;
        const unsigned long long seed = std::stoull(s, &used);
        if (used != s.size()) throw std::invalid_argument("bad seed in --init " + init);
        return {params, vr::sample_level_set(params, seed)};
    }
    if (init.rfind("file:", 0) == 0) {
        return vr::io::config_from_json(vr::io::json::parse(vr::io::read_file(init.substr(5))));
    }
    throw std::invalid_argument("unknown --init '" + init + "' (canonical|mirror|saddle|sample:SEED|file:PATH)");
}

bool on_level_set(const vr::PlanarConfig& c, const vr::SystemParams& params) {
    try {
        vr::to_chart(c, params, 1e-8 * std::max(1.0, std::abs(params.gamma()) * params.alpha() * params.alpha()));
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

struct SimulateArgs {
    Common common;
    std::string init = "canonical";
    double t_end = 1.0;
    double rtol = 1e-12;
    double atol = 1e-12;
    double max_step = std::numeric_limits<double>::infinity();
    std::optional<double> collision_eps;
    double sample_interval = 0.0;
    bool project = false;
    std::string method = "dop853";
};

int cmd_simulate(const SimulateArgs& a) {
    const vr::SystemParams flags(a.common.gamma, a.common.alpha);
    const auto loaded = initial_config(a.init, flags);
    const vr::SystemParams& params = loaded.params;
    std::ostream& rep = report(a.common.out);

    const bool distinguished = loaded.config.size() == 4 &&
                               loaded.config.strengths() == vr::Strengths::distinguished(params.gamma());
    if (!distinguished || !on_level_set(loaded.config, params)) {
        rep << "warning: initial configuration is not on the level set of mu_e; "
               "the full dynamics runs, but `project` will reject this trajectory\n";
    }

    vr::IntegrationSettings s = vr::IntegrationSettings::defaults(params, a.t_end);
    s.rel_tol = a.rtol;
    s.abs_tol = a.atol;
    s.max_step = a.max_step;
    if (a.collision_eps) s.collision_epsilon = *a.collision_eps;
    s.sample_interval = a.sample_interval;
    s.project_to_level_set = a.project;
    if (a.method == "dopri5") s.method = vr::Method::dopri5;
    else if (a.method != "dop853") throw std::invalid_argument("unknown --method " + a.method);

    const vr::Trajectory traj = vr::integrate(loaded.config, s, params);
    std::ostringstream csv;
    vr::io::write_trajectory_csv(csv, traj);
    emit(a.common.out, csv.str());

    const vr::DriftReport d = vr::invariant_drift(traj);
    rep << "status " << vr::to_string(traj.status()) << '\n'
        << "samples " << traj.size() << '\n'
        << "t_final " << vr::io::format_real(traj.times().back()) << '\n'
        << "max |dH| " << vr::io::format_real(d.energy) << '\n'
        << "max |dJ| rot " << vr::io::format_real(d.rot) << " tx " << vr::io::format_real(d.tx) << " ty "
        << vr::io::format_real(d.ty) << '\n';
    if (traj.collision()) {
        const auto& e = *traj.collision();
        rep << "collision of vortices " << e.first + 1 << " and " << e.second + 1 << " at t = "
            << vr::io::format_real(e.time) << '\n';
        return kExitCollision;
    }
    if (traj.status() == vr::TerminalStatus::step_failure) {
        std::cerr << "error: " << traj.failure_message() << '\n';
        return kExitError;
    }
    return kExitOk;
}

struct ProjectArgs {
    Common common;
    std::string in;
    std::string coords = "all";
    double tol = 1e-6;
};

int cmd_project(const ProjectArgs& a) {
    const vr::SystemParams params(a.common.gamma, a.common.alpha);
    const auto sel = vr::io::CoordinateSelection::parse(a.coords);
    std::istringstream in(vr::io::read_file(a.in));
    const vr::Trajectory traj = vr::io::read_trajectory_csv(in, vr::Strengths::distinguished(params.gamma()));

    std::vector<vr::ReducedCoordinates> rows;
    rows.reserve(traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k) {
        try {
            const vr::HopfImage img = vr::hopf(vr::to_chart(traj.states()[k], params, a.tol), params);
            rows.push_back(vr::reduce(img.direction(), params));
        } catch (const vr::MomentumMismatch& e) {
            std::cerr << "error: row at t = " << vr::io::format_real(traj.times()[k])
                      << " is off the momentum level set (residual " << vr::io::format_real(e.residual()) << ")\n";
            return kExitError;
        } catch (const vr::CentroidResidual& e) {
            std::cerr << "error: row at t = " << vr::io::format_real(traj.times()[k])
                      << " is off the momentum level set (" << e.what() << ")\n";
            return kExitError;
        }
    }
    std::ostringstream csv;
    vr::io::write_reduced_csv(csv, traj.times(), rows, sel);
    emit(a.common.out, csv.str());
    return kExitOk;
}

int cmd_equilibria(const Common& c) {
    const vr::SystemParams params(c.gamma, c.alpha);
    vr::CriticalPointOptions opts;
    opts.log = &std::cerr;
    const auto eq = vr::find_critical_points(params, opts);
    emit(c.out, vr::io::equilibria_to_json(eq).dump(2) + "\n");
    std::size_t centers = 0, saddles = 0, degenerate = 0;
    for (const auto& r : eq) {
        if (r.kind == vr::EquilibriumKind::center) ++centers;
        else if (r.kind == vr::EquilibriumKind::saddle) ++saddles;
        else ++degenerate;
    }
    report(c.out) << eq.size() << " equilibria: " << centers << " centers, " << saddles << " saddles";
    if (degenerate > 0) report(c.out) << ", " << degenerate << " degenerate";
    report(c.out) << '\n';
    return degenerate > 0 ? kExitError : kExitOk;
}

struct PortraitArgs {
    Common common;
    std::size_t orbits = 40;
    double t_max = 500.0;
    double closure_tol = 1e-5;
};

int cmd_portrait(const PortraitArgs& a) {
    const vr::SystemParams params(a.common.gamma, a.common.alpha);
    vr::PortraitOptions opts;
    opts.n_orbits = a.orbits;
    opts.orbit.t_max = a.t_max;
    opts.orbit.closure_tol = a.closure_tol;
    const auto orbits = vr::portrait(params, opts);
    std::ostringstream csv;
    vr::io::write_portrait_csv(csv, orbits);
    emit(a.common.out, csv.str());

    std::map<std::string, std::size_t> families;
    std::size_t closed = 0;
    double worst_closure = 0.0;
    for (const auto& o : orbits) {
        ++families[vr::to_string(o.family)];
        if (o.closed(a.closure_tol)) {
            ++closed;
            worst_closure = std::max(worst_closure, o.closure);
        }
    }
    std::ostream& rep = report(a.common.out);
    rep << orbits.size() << " orbits, " << closed << " periodic (closure < " << a.closure_tol
        << ", worst " << worst_closure << ")\n";
    for (const auto& [name, n] : families) rep << "  " << name << ' ' << n << '\n';
    rep << "saddle energy " << vr::io::format_real(vr::saddle_energy(params)) << ", center energy "
        << vr::io::format_real(vr::center_energy(params)) << '\n';
    return kExitOk;
}

int cmd_verify(std::uint64_t seed, const Common& c) {
    const vr::SystemParams params(c.gamma, c.alpha);
    const auto checks = vr::verify::all_suites(seed, params);
    bool ok = true;
    std::printf("%-48s %-12s %-12s %s\n", "property", "measured", "tolerance", "result");
    for (const auto& k : checks) {
        std::printf("%-48s %-12.3g %-12.3g %s%s%s\n", k.name.c_str(), k.measured, k.tolerance,
                    k.passed ? "pass" : "FAIL", k.note.empty() ? "" : "  ", k.note.c_str());
        ok = ok && k.passed;
    }
    if (!ok) {
        for (const auto& k : checks) {
            if (!k.passed) std::fprintf(stderr, "failed: %s\n", k.name.c_str());
        }
    }
    return ok ? kExitOk : kExitError;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Planar four-vortex system and its reduction"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "integrate the full vortex flow, write a trajectory CSV");
    add_params(simulate, sim.common);
    simulate->add_option("--init", sim.init, "canonical|mirror|saddle|sample:SEED|file:PATH")->capture_default_str();
    simulate->add_option("--t-end", sim.t_end, "final time")->capture_default_str();
    simulate->add_option("--rtol", sim.rtol, "relative tolerance")->capture_default_str();
    simulate->add_option("--atol", sim.atol, "absolute tolerance")->capture_default_str();
    simulate->add_option("--max-step", sim.max_step, "largest step");
    simulate->add_option("--collision-eps", sim.collision_eps, "collision distance (default 1e-6 alpha)");
    simulate->add_option("--sample-interval", sim.sample_interval, "extra samples on this time grid");
    simulate->add_flag("--project-level-set", sim.project, "re-impose the level set after every step");
    simulate->add_option("--method", sim.method, "dop853|dopri5")->capture_default_str();
    simulate->add_option("--out", sim.common.out, "output CSV ('-' for stdout)")->capture_default_str();

    ProjectArgs proj;
    auto* project = app.add_subcommand("project", "map a trajectory CSV through the reduction chain");
    add_params(project, proj.common);
    project->add_option("--in", proj.in, "trajectory CSV")->required();
    project->add_option("--coords", proj.coords, "w,p,q,cyl or all")->capture_default_str();
    project->add_option("--tol", proj.tol, "momentum residual allowed per row")->capture_default_str();
    project->add_option("--out", proj.common.out, "output CSV ('-' for stdout)")->capture_default_str();

    Common eq;
    auto* equilibria = app.add_subcommand("equilibria", "critical points of the reduced energy as JSON");
    add_params(equilibria, eq);
    equilibria->add_option("--out", eq.out, "output JSON ('-' for stdout)")->capture_default_str();

    PortraitArgs por;
    auto* portrait = app.add_subcommand("portrait", "orbits of the reduced flow on the cylinder");
    add_params(portrait, por.common);
    portrait->add_option("--orbits", por.orbits, "number of orbits")->capture_default_str()->check(
        CLI::PositiveNumber);
    portrait->add_option("--t-max", por.t_max, "integration limit per orbit")->capture_default_str();
    portrait->add_option("--closure-tol", por.closure_tol, "closure tolerance")->capture_default_str();
    portrait->add_option("--out", por.common.out, "output CSV ('-' for stdout)")->capture_default_str();

    Common ver;
    std::uint64_t seed = 7;
    auto* verify = app.add_subcommand("verify", "run the property suites");
    add_params(verify, ver);
    verify->add_option("--seed", seed, "random seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitError;
    }

    try {
        if (*simulate) return cmd_simulate(sim);
        if (*project) return cmd_project(proj);
        if (*equilibria) return cmd_equilibria(eq);
        if (*portrait) return cmd_portrait(por);
        if (*verify) return cmd_verify(seed, ver);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}
