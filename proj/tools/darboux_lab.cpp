// Command-line laboratory: build soliton systems, run the identity and
// superalgebra suites, query the independent oracles, and export the
// spin-1/2 field profiles. Emits deterministic JSON reports and CSV data.

#include <CLI11.hpp>
#include <json.hpp>

#include "darboux/kernel.hpp"
#include "darboux/oracles.hpp"
#include "darboux/pauli.hpp"
#include "darboux/registry.hpp"
#include "darboux/susy_relations.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

using json = nlohmann::ordered_json;
using namespace darboux;

namespace {

constexpr const char* kSchema = "darboux-lab/1";

struct CommonArgs {
    int n = 0;
    std::vector<double> kappa, tau, kappa2, tau2;
    std::string preset;
    std::string out;
    std::string config;
    bool no_timestamp = false;
    double tol = 1e-9;
    int grid_points = 41;
    double grid_span = 0.0; // 0: choose 8/kappa_1
    std::uint32_t seed = kTestFnSeed;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
    cmd->add_option("--config", a.config, "key=value configuration file; flags override it");
    cmd->add_option("--n", a.n, "number of bound states (consistency check)");
    cmd->add_option("--kappa", a.kappa, "scaling parameters, comma separated")
        ->delimiter(',');
    cmd->add_option("--tau", a.tau, "translation parameters")->delimiter(',');
    cmd->add_option("--kappa2", a.kappa2, "partner scaling parameters")->delimiter(',');
    cmd->add_option("--tau2", a.tau2, "partner translation parameters")->delimiter(',');
    cmd->add_option("--preset", a.preset, "named parameter scenario");
    cmd->add_option("--tol", a.tol, "classification tolerance");
    cmd->add_option("--grid", a.grid_points, "evaluation grid points");
    cmd->add_option("--span", a.grid_span, "evaluation half-span (default 8/kappa_1)");
    cmd->add_option("--seed", a.seed, "test-function seed");
    cmd->add_option("--out", a.out, "output path prefix (default: stdout)");
    cmd->add_flag("--no-timestamp", a.no_timestamp, "omit the timestamp field");
}

std::vector<double> parse_doubles(const std::string& v) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= v.size()) {
        std::size_t next = v.find(',', pos);
        std::string tok = v.substr(pos, next == std::string::npos ? next : next - pos);
        if (!tok.empty()) out.push_back(std::stod(tok));
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return out;
}

// plain key=value configuration; command-line flags take precedence
void apply_config(CLI::App* cmd, CommonArgs& a, double* k, double* L, int* N,
                  double* g, double* c0, bool* c0_set) {
    if (a.config.empty()) return;
    std::ifstream f(a.config);
    if (!f) throw spec_error("ConfigError: cannot read " + a.config);
    auto fresh = [&](const std::string& flag) {
        const CLI::Option* o = cmd->get_option_no_throw(flag);
        return o == nullptr || o->count() == 0;
    };
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        std::size_t h = line.find('#');
        if (h != std::string::npos) line.erase(h);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\r' ||
                                 line.back() == '\t'))
            line.pop_back();
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw spec_error("ConfigError: line " + std::to_string(lineno) +
                             " is not key=value");
        std::string key = line.substr(0, eq);
        std::string val = line.substr(eq + 1);
        if (key == "n" && fresh("--n")) a.n = std::stoi(val);
        else if (key == "kappa" && fresh("--kappa")) a.kappa = parse_doubles(val);
        else if (key == "tau" && fresh("--tau")) a.tau = parse_doubles(val);
        else if (key == "kappa2" && fresh("--kappa2")) a.kappa2 = parse_doubles(val);
        else if (key == "tau2" && fresh("--tau2")) a.tau2 = parse_doubles(val);
        else if (key == "preset" && fresh("--preset")) a.preset = val;
        else if (key == "tol" && fresh("--tol")) a.tol = std::stod(val);
        else if (key == "grid" && fresh("--grid")) a.grid_points = std::stoi(val);
        else if (key == "span" && fresh("--span")) a.grid_span = std::stod(val);
        else if (key == "seed" && fresh("--seed"))
            a.seed = static_cast<std::uint32_t>(std::stoul(val));
        else if (key == "out" && fresh("--out")) a.out = val;
        else if (key == "no-timestamp" && fresh("--no-timestamp"))
            a.no_timestamp = val == "true" || val == "1";
        else if (key == "k" && k && fresh("--k")) *k = std::stod(val);
        else if (key == "L" && L && fresh("--L")) *L = std::stod(val);
        else if (key == "N" && N && fresh("--N")) *N = std::stoi(val);
        else if (key == "g" && g && fresh("--g")) *g = std::stod(val);
        else if (key == "c0" && c0 && fresh("--c0")) {
            *c0 = std::stod(val);
            *c0_set = true;
        } else if (key == "n" || key == "kappa" || key == "tau" || key == "kappa2" ||
                   key == "tau2" || key == "preset" || key == "tol" || key == "grid" ||
                   key == "span" || key == "seed" || key == "out" ||
                   key == "no-timestamp" || key == "k" || key == "L" || key == "N" ||
                   key == "g" || key == "c0") {
            // flag given on the command line wins
        } else {
            throw spec_error("ConfigError: unknown key '" + key + "'");
        }
    }
}

SolitonSpec primary_spec(const CommonArgs& a) {
    if (!a.preset.empty()) return presets::by_name(a.preset).upper;
    if (a.kappa.size() != a.tau.size())
        throw spec_error("SpecShape: --kappa and --tau need equal lengths");
    if (a.n != 0 && a.n != static_cast<int>(a.kappa.size()))
        throw spec_error("SpecShape: --n disagrees with --kappa length");
    return SolitonSpec::make(a.kappa, a.tau);
}

presets::PairSpec pair_spec(const CommonArgs& a) {
    if (!a.preset.empty()) return presets::by_name(a.preset);
    presets::PairSpec p;
    p.upper = primary_spec(a);
    if (a.kappa2.size() != a.tau2.size())
        throw spec_error("SpecShape: --kappa2 and --tau2 need equal lengths");
    p.lower = SolitonSpec::make(a.kappa2, a.tau2);
    return p;
}

json header(const CommonArgs& a, const std::string& command) {
    json j;
    j["schema"] = kSchema;
    j["command"] = command;
    if (!a.no_timestamp) {
        auto now = std::chrono::system_clock::now().time_since_epoch();
        j["timestamp"] =
            std::chrono::duration_cast<std::chrono::seconds>(now).count();
    }
    return j;
}

json spec_json(const SolitonSpec& s) {
    return json{{"n", s.n()}, {"kappa", s.kappas}, {"tau", s.taus}};
}

void emit(const CommonArgs& a, const json& j) {
    if (a.out.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::ofstream f(a.out + ".json");
        f << j.dump(2) << "\n";
    }
}

std::vector<double> linear_grid(const SolitonSpec& s, const CommonArgs& a) {
    double span = a.grid_span > 0.0
                      ? a.grid_span
                      : 8.0 / (s.n() ? s.kappas.front() : 1.0);
    int m = std::max(2, a.grid_points);
    std::vector<double> xs(m);
    for (int i = 0; i < m; ++i) xs[i] = -span + 2.0 * span * i / (m - 1);
    return xs;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string iso_class_flag(IsoTag t) {
    switch (t) {
        case IsoTag::CompleteBreak: return "complete-break";
        case IsoTag::PartialSameLevel: return "partial-same-level";
        case IsoTag::PartialCrossLevel: return "partial-cross-level";
        case IsoTag::ExactGeneric: return "exact-generic";
        case IsoTag::ExactCommonVirtual: return "exact-common-virtual";
        case IsoTag::SpecialCequal: return "special-cequal";
        case IsoTag::Identical: return "identical";
    }
    return "?";
}

// ---------------------------------------------------------------------------

int cmd_build(const CommonArgs& a, double k_scatter) {
    SolitonSpec spec = primary_spec(a);
    validate_spec(spec);
    Chain chain(spec);
    std::vector<double> xs = linear_grid(spec, a);
    std::string path = (a.out.empty() ? std::string("build") : a.out) + ".csv";
    std::ofstream csv(path);
    csv << "x,V";
    for (int j = 1; j <= spec.n(); ++j) csv << ",psi_" << j;
    csv << ",re_psi_k,im_psi_k\n";
    for (double x : xs) {
        csv << fmt(x) << "," << fmt(chain.potential(x));
        for (int j = 1; j <= spec.n(); ++j)
            csv << "," << fmt(chain.bound_state(j, x, 0).value());
        cplx ps = chain.scatter_state(k_scatter, +1, x, 0).value();
        csv << "," << fmt(ps.real()) << "," << fmt(ps.imag()) << "\n";
    }
    json j = header(a, "build");
    j["spec"] = spec_json(spec);
    j["k"] = k_scatter;
    j["csv"] = path;
    j["rows"] = xs.size();
    emit(a, j);
    return 0;
}

int cmd_verify(const CommonArgs& a, const std::vector<std::string>& ids, bool all,
               const std::string& class_filter) {
    std::vector<IdentityRecord> regs = identity_registry();
    std::vector<const IdentityRecord*> chosen;
    if (all) {
        for (const IdentityRecord& r : regs) chosen.push_back(&r);
    } else {
        for (const std::string& id : ids) {
            const IdentityRecord* r = find_record(regs, id);
            if (!r) throw spec_error("ConfigError: unknown identity id " + id);
            chosen.push_back(r);
        }
    }
    std::map<std::string, ExtendedSystem> systems;
    auto system_for = [&](const IdentityRecord& r) -> const ExtendedSystem& {
        std::string name = a.preset.empty() ? r.canonical_preset : a.preset;
        if (!systems.count(name)) {
            presets::PairSpec p = presets::by_name(name);
            systems.emplace(name, ExtendedSystem(p.upper, p.lower, a.tol));
        }
        return systems.at(name);
    };
    RegistryOptions opt;
    opt.grid_points = a.grid_points;
    opt.seed = a.seed;

    json report = header(a, "verify");
    json items = json::array();
    int failures = 0, evaluated = 0, skipped = 0;
    for (const IdentityRecord* r : chosen) {
        if (r->kind == IdentityRecord::Kind::OperatorAction) {
            const ExtendedSystem& sys = system_for(*r);
            if (!class_filter.empty() && iso_class_flag(sys.iso().tag) != class_filter) {
                ++skipped;
                continue;
            }
            if (!r->applicable(sys)) {
                if (!all) throw spec_error("ConfigError: " + r->id +
                                           " is not applicable to the given system");
                ++skipped;
                continue;
            }
            ResidualReport rep = evaluate_identity(*r, sys, opt);
            ++evaluated;
            if (!rep.pass) ++failures;
            items.push_back(json{{"id", r->id},
                                 {"tag", r->tag},
                                 {"formula", r->formula},
                                 {"system", a.preset.empty() ? r->canonical_preset
                                                             : a.preset},
                                 {"class", iso_class_flag(sys.iso().tag)},
                                 {"max_rel_residual", rep.max_rel_residual},
                                 {"threshold", rep.threshold},
                                 {"worst_point", rep.worst_point},
                                 {"skipped_points", rep.skipped_points},
                                 {"pass", rep.pass}});
        } else {
            if (!class_filter.empty()) {
                ++skipped;
                continue;
            }
            double res = trig_identity_residual(100, a.seed);
            ++evaluated;
            bool pass = res <= 1e-13;
            if (!pass) ++failures;
            items.push_back(json{{"id", r->id},
                                 {"tag", r->tag},
                                 {"formula", r->formula},
                                 {"system", "scalar"},
                                 {"max_rel_residual", res},
                                 {"threshold", 1e-13},
                                 {"pass", pass}});
        }
    }
    report["identities"] = items;
    report["summary"] = json{{"evaluated", evaluated},
                             {"passed", evaluated - failures},
                             {"failed", failures},
                             {"skipped", skipped}};
    emit(a, report);
    return failures == 0 ? 0 : 3;
}

int cmd_susy(const CommonArgs& a) {
    presets::PairSpec p = pair_spec(a);
    ExtendedSystem sys(p.upper, p.lower, a.tol);
    SusyIntegrals g = build_integrals(sys);
    std::vector<VecFn> fns = matrix_suite(sys, 6, a.seed);
    double k1 = std::min(sys.upper().kappas.front(), sys.lower().kappas.front());
    double span = a.grid_span > 0.0 ? a.grid_span : 8.0 / k1;
    std::vector<double> grid = chebyshev_grid(span, a.grid_points);

    json report = header(a, "susy");
    report["upper"] = spec_json(sys.upper());
    report["lower"] = spec_json(sys.lower());
    report["class"] = iso_class_flag(sys.iso().tag);
    report["warnings"] = sys.iso().warnings;
    json pairs = json::array();
    for (const Coincidence& c : sys.iso().pairs)
        pairs.push_back(json{{"upper_level", c.upper_level},
                             {"lower_level", c.lower_level},
                             {"tau_equal", c.tau_equal},
                             {"C", c.C},
                             {"provenance", c.provenance}});
    report["coincidences"] = pairs;
    int n = sys.n(), r = sys.iso().r();
    report["generators"] = json{{"even", g.even_label},
                                {"even_order", g.even_order},
                                {"odd", g.odd_label},
                                {"odd_order", g.odd_order},
                                {"lax_order", 2 * n + 1},
                                {"total_irreducible_order", g.even_order + g.odd_order},
                                {"expected_total", 4 * n + 1 - 2 * r}};

    int failures = 0;
    json rels = json::array();
    for (const SusyRelation& rel : susy_relations(sys)) {
        ResidualReport rep = susy_relation_residual(rel, sys, g, fns, grid);
        if (!rep.pass) ++failures;
        rels.push_back(json{{"id", rel.id},
                            {"formula", rel.formula},
                            {"max_rel_residual", rep.max_rel_residual},
                            {"threshold", rep.threshold},
                            {"pass", rep.pass}});
    }
    report["relations"] = rels;
    std::vector<double> ccgrid = filter_poles(grid, g.odd_gen.poles(), 0.12 / k1);
    report["central_charge_residual"] = central_charge_residual(sys, g, fns, ccgrid);
    report["conservation_residual"] =
        conservation_residual(sys, {g.Q1, g.S1, g.P1, g.P2}, fns, ccgrid);
    if (report["conservation_residual"].get<double>() > 1e-8) ++failures;
    emit(a, report);
    return failures == 0 ? 0 : 3;
}

int cmd_spectrum(const CommonArgs& a, double L, int N) {
    SolitonSpec spec = primary_spec(a);
    validate_spec(spec);
    std::vector<double> levels = eigen_oracle(spec, L, N, spec.n() + 3);
    json report = header(a, "spectrum");
    report["spec"] = spec_json(spec);
    report["L"] = L;
    report["N"] = N;
    json lv = json::array();
    bool pass = true;
    for (int j = 0; j < spec.n(); ++j) {
        double expect = -spec.kappas[spec.n() - 1 - j] * spec.kappas[spec.n() - 1 - j];
        double got = j < static_cast<int>(levels.size()) ? levels[j] : 0.0;
        double dev = std::abs(got - expect);
        pass = pass && dev <= 1e-4;
        lv.push_back(json{{"level", j},
                          {"oracle", got},
                          {"expected", expect},
                          {"deviation", dev}});
    }
    report["bound_levels"] = lv;
    report["all_levels"] = levels;
    report["pass"] = pass;
    emit(a, report);
    return pass ? 0 : 3;
}

int cmd_scatter(const CommonArgs& a, double k) {
    SolitonSpec spec = primary_spec(a);
    validate_spec(spec);
    ScatterData sd = scattering_oracle(spec, k);
    cplx closed = transmission_closed_form(spec, k);
    json report = header(a, "scatter");
    report["spec"] = spec_json(spec);
    report["k"] = k;
    report["t"] = json{{"re", sd.t().real()}, {"im", sd.t().imag()}};
    report["r"] = json{{"re", sd.r().real()}, {"im", sd.r().imag()}};
    report["a_closed_form"] = json{{"re", closed.real()}, {"im", closed.imag()}};
    report["abs_r"] = std::abs(sd.r());
    report["phase_deviation"] = std::abs(std::arg(sd.t() * closed));
    bool pass = std::abs(sd.r()) <= 1e-6 &&
                report["phase_deviation"].get<double>() <= 1e-6;
    report["pass"] = pass;
    emit(a, report);
    return pass ? 0 : 3;
}

int cmd_pauli(const CommonArgs& a, double k, double g, std::optional<double> c0) {
    presets::PairSpec p = pair_spec(a);
    ExtendedSystem sys(p.upper, p.lower, a.tol);
    FieldProfile f = field_profile(sys, k, c0, g);
    std::vector<double> xs = linear_grid(sys.upper(), a);
    std::string path = (a.out.empty() ? std::string("pauli") : a.out) + ".csv";
    std::ofstream csv(path);
    csv << "x,a,phi,bz\n";
    for (double x : xs)
        csv << fmt(x) << "," << fmt(f.a(x)) << "," << fmt(f.phi(x)) << ","
            << fmt(f.bz(x)) << "\n";
    ConstantPhiReport rep = constant_phi_check(f, xs);
    json report = header(a, "pauli");
    report["upper"] = spec_json(sys.upper());
    report["lower"] = spec_json(sys.lower());
    report["class"] = iso_class_flag(sys.iso().tag);
    report["k"] = f.k;
    report["c0"] = f.c0;
    report["g"] = f.g;
    report["csv"] = path;
    report["phi"] = json{{"constant", rep.is_constant},
                         {"value", rep.value},
                         {"deviation", rep.deviation}};
    emit(a, report);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"verification laboratory for reflectionless soliton pairs"};
    app.require_subcommand(1);

    CommonArgs args;
    double k = 1.0, L = 25.0, g = 2.0;
    int N = 4001;
    double c0_val = 0.0;
    bool c0_set = false;
    std::vector<std::string> ids;
    bool all = false;
    std::string class_filter;

    CLI::App* build = app.add_subcommand("build", "tabulate potential and states");
    add_common(build, args);
    build->add_option("--k", k, "scattering momentum column");

    CLI::App* verify = app.add_subcommand("verify", "run identity records");
    add_common(verify, args);
    verify->add_option("--id", ids, "identity record ids")->delimiter(',');
    verify->add_flag("--all", all, "run the whole registry");
    verify->add_option("--class", class_filter, "restrict to one isospectrality class");

    CLI::App* susy = app.add_subcommand("susy", "classify a pair and check the superalgebra");
    add_common(susy, args);

    CLI::App* spectrum = app.add_subcommand("spectrum", "finite-difference eigenvalues");
    add_common(spectrum, args);
    spectrum->add_option("--L", L, "half-width of the box");
    spectrum->add_option("--N", N, "interior grid points");

    CLI::App* scatter = app.add_subcommand("scatter", "shooting-integration scattering data");
    add_common(scatter, args);
    scatter->add_option("--k", k, "momentum");

    CLI::App* pauli = app.add_subcommand("pauli", "planar spin-1/2 field profiles");
    add_common(pauli, args);
    pauli->add_option("--k", k, "transverse momentum");
    pauli->add_option("--g", g, "gyromagnetic ratio");
    pauli->add_option("--c0", c0_val, "gauge constant")->each([&](const std::string&) {
        c0_set = true;
    });

    CLI11_PARSE(app, argc, argv);

    try {
        CLI::App* active = app.get_subcommands().front();
        apply_config(active, args, &k, &L, &N, &g, &c0_val, &c0_set);
        if (build->parsed()) return cmd_build(args, k);
        if (verify->parsed()) {
            if (!all && ids.empty())
                throw spec_error("ConfigError: choose --all or --id");
            return cmd_verify(args, ids, all, class_filter);
        }
        if (susy->parsed()) return cmd_susy(args);
        if (spectrum->parsed()) return cmd_spectrum(args, L, N);
        if (scatter->parsed()) return cmd_scatter(args, k);
        if (pauli->parsed())
            return cmd_pauli(args, k, g, c0_set ? std::optional<double>(c0_val)
                                                : std::nullopt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
