#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "heun/bargmann.hpp"
#include "heun/bethe_solver.hpp"
#include "heun/gaudin.hpp"
#include "heun/krawtchouk_chain.hpp"
#include "report.hpp"

using namespace heun;
using report::json;

namespace {

struct Options {
    int two_s = 2;
    double phi = 0.7;
    std::vector<double> rho{0.0, 0.0, 0.0};
    std::optional<double> rho5;
    double r = 0.5;
    double theta = 0.6;
    int fermi = 0;
    int cut = -1;
    int points = 100;
    std::string method = "all";
    std::string branch = "auto";
    std::uint64_t seed = 42;
    std::string out = "-";
    std::string format = "json";
    bool timings = false;
    ToleranceConfig tol;
};

struct Result {
    json body = json::object();
    report::CheckList checks;
    report::Table table;
};

// configuration problems that surface only once the library validates the input
bool is_config_error(const Error& e) {
    return dynamic_cast<const InvalidArgument*>(&e) || dynamic_cast<const ParameterOutOfRange*>(&e) ||
           dynamic_cast<const IndexOutOfRange*>(&e) || dynamic_cast<const SpinMismatch*>(&e) ||
           dynamic_cast<const NotReduced*>(&e) || dynamic_cast<const NonFinite*>(&e);
}

HeunParams heun_params(const Options& o) {
    if (o.rho.size() != 3) throw InvalidArgument("--rho takes three comma-separated values");
    HeunParams p = HeunParams::from_phase(Spin(o.two_s), o.phi, o.rho[0], o.rho[1], o.rho[2]);
    if (o.rho5) p = p.with_rho5(*o.rho5);
    return p;
}

json params_json(const HeunParams& p) {
    return {{"two_s", p.spin.two_s},
            {"a", report::complex(p.a)},
            {"rho", report::reals({p.rho1, p.rho2, p.rho3})},
            {"rho4", report::complex(p.rho4())},
            {"rho5", report::complex(p.rho5())}};
}

json tolerances_json(const ToleranceConfig& t) {
    return {{"hermitian", t.hermitian}, {"eigen_residual", t.eigen_residual}, {"root_polish", t.root_polish},
            {"structure", t.structure}, {"bethe", t.bethe},                   {"oracle", t.oracle},
            {"richardson", t.richardson}, {"bargmann", t.bargmann},          {"entropy_clamp", t.entropy_clamp}};
}

void spectrum_rows(report::Table& t, const std::string& method, const std::vector<double>& ev) {
    for (std::size_t i = 0; i < ev.size(); ++i) t.rows.push_back({method, std::to_string(i), report::format_double(ev[i])});
}

std::vector<double> oracle_of(const HeunParams& p, const ToleranceConfig& tol) {
    return oracle_spectrum(build_w(p, build_spin_rep(p.spin)), tol.hermitian).eigenvalues;
}

double nearest_gap(double x, const std::vector<double>& ref) {
    double g = std::numeric_limits<double>::infinity();
    for (double y : ref) g = std::min(g, std::abs(x - y));
    return g;
}

json solution_json(const BetheSolution& s) {
    json j = {{"regime", to_string(s.regime)},
              {"mu", report::complex(s.mu)},
              {"w", report::complex(s.w)},
              {"w_closed", report::complex(s.w_closed)},
              {"w_mu_form", report::complex(s.w_mu_form)},
              {"sum_Z", report::complex(s.sum_Z)},
              {"Z", report::complexes(s.Z)},
              {"z", report::complexes(s.z)},
              {"roots_ok", s.roots_ok}};
    j["w_closed_alt"] = s.w_closed_alt ? report::complex(*s.w_closed_alt) : json(nullptr);
    j["w_mu_form_variant"] = s.w_mu_form_variant ? report::complex(*s.w_mu_form_variant) : json(nullptr);
    j["residuals"] = {{"bethe_eq", report::residual(s.residuals.bethe_eq)},
                      {"bethe_eq_inverted", report::residual(s.residuals.bethe_eq_inverted)},
                      {"unfactored_eq", report::residual(s.residuals.unfactored_eq)},
                      {"heun_eq", report::residual(s.residuals.heun_eq)},
                      {"z_map", report::residual(s.residuals.z_map)},
                      {"oracle_gap", report::residual(s.residuals.oracle_gap)}};
    return j;
}

double max_bethe_residual(const std::vector<BetheSolution>& sols, int& skipped) {
    double m = 0.0;
    skipped = 0;
    for (const auto& s : sols) {
        if (s.residuals.bethe_eq < 0) ++skipped;
        else m = std::max(m, s.residuals.bethe_eq);
    }
    return m;
}

Result run_spectrum(const Options& o) {
    const HeunParams p = heun_params(o);
    Result r;
    r.body["params"] = params_json(p);
    r.table.header = {"method", "index", "eigenvalue"};
    const bool all = o.method == "all";
    json spectra = json::object();
    std::vector<std::pair<std::string, std::vector<double>>> got;
    if (all || o.method == "oracle") got.emplace_back("oracle", oracle_of(p, o.tol));
    if (all || o.method == "bethe") {
        const auto b = bethe_spectrum(p, o.branch);
        got.emplace_back("bethe", b.spectrum.eigenvalues);
        r.body["bethe_route"] = b.route;
        r.body["warnings"] = b.warnings.messages;
    }
    if (all || o.method == "bargmann") got.emplace_back("bargmann", bargmann_spectrum(p, o.tol.hermitian).eigenvalues);
    for (const auto& [name, ev] : got) {
        spectra[name] = report::reals(ev);
        spectrum_rows(r.table, name, ev);
    }
    r.body["spectra"] = spectra;
    for (std::size_t i = 0; i < got.size(); ++i)
        for (std::size_t j = i + 1; j < got.size(); ++j)
            r.checks.add(got[i].first + "_vs_" + got[j].first, max_sorted_gap(got[i].second, got[j].second), o.tol.oracle);
    return r;
}

Result run_gaudin(const Options& o) {
    const HeunParams p = heun_params(o);
    Result r;
    r.body["params"] = params_json(p);
    const StructureReport sr = verify_structure(p, o.seed, o.points, o.tol);
    r.body["weight_vector_choice"] = sr.weight_vector_choice;
    r.body["points"] = o.points;
    for (const auto& row : sr.rows) r.checks.add(row.name, row.residual, row.tolerance, row.diagnostic);
    return r;
}

Result run_bethe(const Options& o) {
    const HeunParams p = heun_params(o);
    Result r;
    r.body["params"] = params_json(p);
    const HomogeneousCondition hc = homog_condition(p);
    r.body["homogeneous_condition"] = {{"value", report::complex(hc.value)},
                                       {"defect", report::number(hc.defect)},
                                       {"M", hc.M ? json(*hc.M) : json(nullptr)}};
    BetheSpectrum b = bethe_spectrum(p, o.branch);
    const auto ref = oracle_of(p, o.tol);
    for (auto& s : b.solutions) s.residuals.oracle_gap = nearest_gap(s.w.real(), ref);
    r.body["route"] = b.route;
    r.body["oracle"] = report::reals(ref);
    r.body["spectrum"] = report::reals(b.spectrum.eigenvalues);
    json sols = json::array();
    r.table.header = {"index", "regime", "mu_re", "mu_im", "w", "bethe_eq", "heun_eq", "oracle_gap"};
    for (std::size_t i = 0; i < b.solutions.size(); ++i) {
        const auto& s = b.solutions[i];
        sols.push_back(solution_json(s));
        r.table.rows.push_back({std::to_string(i), to_string(s.regime), report::format_double(s.mu.real()),
                                report::format_double(s.mu.imag()), report::format_double(s.w.real()),
                                report::format_double(s.residuals.bethe_eq < 0 ? NAN : s.residuals.bethe_eq),
                                report::format_double(s.residuals.heun_eq),
                                report::format_double(s.residuals.oracle_gap)});
    }
    r.body["solutions"] = sols;
    r.body["warnings"] = b.warnings.messages;
    r.checks.add("completeness_gap", max_sorted_gap(b.spectrum.eigenvalues, ref), o.tol.oracle);
    int skipped = 0;
    const double mb = max_bethe_residual(b.solutions, skipped);
    r.checks.add("bethe_equation_residual", mb, o.tol.bethe);
    r.body["unevaluated_bethe_residuals"] = skipped;
    if (b.route == "homog" && hc.M) {
        const int cut = b.solutions.front().regime == Regime::homog_highest ? *hc.M : -1;
        if (cut >= 0 && cut + 1 < p.spin.two_s + 1)
            r.checks.add("stabilization_product", stabilization_product(p, cut), 1e-12 * (1.0 + p.rho1 * p.rho1 + p.rho2 * p.rho2));
    }
    return r;
}

Result run_o3(const Options& o) {
    Result r;
    const ESpectrum e = e_spectrum(Spin(o.two_s), o.r);
    r.body["params"] = {{"two_s", o.two_s}, {"r", o.r}, {"a", e.a}};
    r.body["oracle"] = report::reals(e.oracle);
    r.body["e1"] = report::reals(e.e1);
    r.body["e1_transfer"] = report::reals(e.e1_transfer);
    r.body["e1_regularized"] = e.e1_regularized;
    r.body["e2"] = report::reals(e.e2);
    r.table.header = {"method", "index", "eigenvalue"};
    spectrum_rows(r.table, "oracle", e.oracle);
    spectrum_rows(r.table, "e1", e.e1);
    spectrum_rows(r.table, "e2", e.e2);
    if (o.two_s % 2 == 0) {
        r.checks.add("e1_vs_oracle", max_sorted_gap(e.e1, e.oracle), o.tol.oracle);
        r.checks.add("e1_transfer_vs_oracle", max_sorted_gap(e.e1_transfer, e.oracle), o.tol.oracle);
    } else {
        r.checks.add("e2_vs_oracle", max_sorted_gap(e.e2, e.oracle), o.tol.oracle);
        r.checks.add("e1_regularized_vs_oracle", max_sorted_gap(e.e1, e.oracle), o.tol.oracle, true);
    }
    return r;
}

struct ChainPoint {
    int cut = 0;
    double entropy = 0, complement = 0, commutator = 0, pt_gap = 0, reconstruction = 0, t_bethe_gap = 0;
    double beq_max = 0, projector = 0, trace = 0;
    int beq_skipped = 0;
    bool fallback = false;
    std::vector<double> c_eigenvalues;
    std::vector<std::string> warnings;
};

ChainPoint chain_point(const Options& o, int cut) {
    const ChainSpec spec(Spin(o.two_s), o.theta, o.fermi, cut);
    const auto rep = build_spin_rep(spec.spin);
    ChainPoint pt;
    pt.cut = cut;
    const auto cm = correlation(spec);
    pt.projector = max_abs_diff(cm.full * cm.full, cm.full);
    pt.trace = std::abs(cm.full.trace() - (o.fermi + 1.0));
    const auto n = static_cast<std::size_t>(cut) + 1;
    const CMatrix tr = commuting_t(spec, rep).block(0, 0, n, n);
    pt.commutator = commutator(tr, cm.chopped).max_abs();
    const Entropy e = entanglement_entropy(spec);
    pt.entropy = e.value;
    pt.complement = e.complement;
    pt.c_eigenvalues = e.eigenvalues;
    const PTResult ptr = spectrum_via_pt(spec);
    pt.pt_gap = max_sorted_gap(ptr.c_eigenvalues, e.eigenvalues);
    pt.reconstruction = ptr.reconstruction;
    pt.fallback = ptr.fallback;
    for (const auto& w : ptr.warnings) pt.warnings.push_back(w);
    const TBetheResult tb = t_spectrum_via_bethe(spec);
    std::vector<double> ts;
    for (const auto& v : tb.values) {
        ts.push_back(v.t);
        if (v.beq_residual < 0) ++pt.beq_skipped;
        else pt.beq_max = std::max(pt.beq_max, v.beq_residual);
    }
    pt.t_bethe_gap = max_sorted_gap(ts, hermitian_eigen(tr).values);
    for (const auto& w : tb.warnings) pt.warnings.push_back(w);
    return pt;
}

unsigned thread_count(std::size_t jobs) {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("HEUN_BETHE_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) n = static_cast<unsigned>(v);
    }
    return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

Result run_krawtchouk(const Options& o) {
    std::vector<int> cuts;
    if (o.cut >= 0) cuts.push_back(o.cut);
    else
        for (int l = 0; l <= o.two_s; ++l) cuts.push_back(l);
    ChainSpec(Spin(o.two_s), o.theta, o.fermi, cuts.front());  // validates the configuration up front

    std::vector<ChainPoint> points(cuts.size());
    std::vector<std::string> errors(cuts.size());
    const unsigned nt = thread_count(cuts.size());
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nt; ++t)
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < cuts.size(); i += nt) {
                try {
                    points[i] = chain_point(o, cuts[i]);
                } catch (const std::exception& e) {
                    errors[i] = e.what();
                }
            }
        });
    for (auto& th : pool) th.join();
    for (std::size_t i = 0; i < cuts.size(); ++i)
        if (!errors[i].empty()) throw NoConvergence("cut " + std::to_string(cuts[i]) + ": " + errors[i]);

    Result r;
    r.body["params"] = {{"two_s", o.two_s}, {"theta", o.theta}, {"fermi", o.fermi}};
    r.table.header = {"cut", "entropy", "complement", "commutator", "pt_gap", "reconstruction", "t_bethe_gap", "beq_max"};
    json arr = json::array();
    double comm = 0, ptg = 0, rec = 0, tbg = 0, beq = 0, sym = 0, proj = 0, tr = 0, neg = 0;
    for (const auto& p : points) {
        arr.push_back({{"cut", p.cut},
                       {"entropy", report::number(p.entropy)},
                       {"complement_entropy", report::number(p.complement)},
                       {"chopped_eigenvalues", report::reals(p.c_eigenvalues)},
                       {"commutator", report::number(p.commutator)},
                       {"pt_gap", report::number(p.pt_gap)},
                       {"pt_reconstruction", report::number(p.reconstruction)},
                       {"pt_fallback", p.fallback},
                       {"t_bethe_gap", report::number(p.t_bethe_gap)},
                       {"beq_residual_max", report::number(p.beq_max)},
                       {"beq_unevaluated", p.beq_skipped},
                       {"warnings", p.warnings}});
        r.table.rows.push_back({std::to_string(p.cut), report::format_double(p.entropy), report::format_double(p.complement),
                                report::format_double(p.commutator), report::format_double(p.pt_gap),
                                report::format_double(p.reconstruction), report::format_double(p.t_bethe_gap),
                                report::format_double(p.beq_max)});
        comm = std::max(comm, p.commutator);
        ptg = std::max(ptg, p.pt_gap);
        rec = std::max(rec, p.reconstruction);
        tbg = std::max(tbg, p.t_bethe_gap);
        beq = std::max(beq, p.beq_max);
        sym = std::max(sym, std::abs(p.entropy - p.complement));
        proj = std::max(proj, p.projector);
        tr = std::max(tr, p.trace);
        neg = std::max(neg, -p.entropy);
    }
    r.body["points"] = arr;
    r.checks.add("projector_defect", proj, 1e-10);
    r.checks.add("trace_defect", tr, 1e-10);
    r.checks.add("commutator", comm, 1e-10);
    r.checks.add("pt_vs_direct", ptg, o.tol.bargmann);
    r.checks.add("pt_reconstruction", rec, o.tol.bargmann);
    r.checks.add("t_bethe_vs_restricted_t", tbg, o.tol.bethe);
    r.checks.add("beq_residual", beq, o.tol.bethe, true);  // clustered roots near z = +-1 are ill-conditioned
    r.checks.add("complementary_entropy", sym, 1e-8);
    r.checks.add("negative_entropy", neg, 1e-300);
    return r;
}

Result run_bargmann(const Options& o) {
    const HeunParams p = heun_params(o);
    Result r;
    r.body["params"] = params_json(p);
    const BargmannMatrix bm = bargmann_matrix(p);
    const auto sp = bargmann_spectrum(p, o.tol.hermitian).eigenvalues;
    const auto ref = oracle_of(p, o.tol);
    r.body["spectrum"] = report::reals(sp);
    r.body["oracle"] = report::reals(ref);
    r.table.header = {"method", "index", "eigenvalue"};
    spectrum_rows(r.table, "bargmann", sp);
    spectrum_rows(r.table, "oracle", ref);
    r.checks.add("degree_preservation", bm.degree_defect, 1e-11);
    r.checks.add("bargmann_vs_oracle", max_sorted_gap(sp, ref), o.tol.bargmann);
    r.body["singularities"] = json::array({report::complex(1.0), report::complex(-1.0), report::complex(1.0 / p.a),
                                           report::complex(-1.0 / p.a), "infinity"});
    if (p.rho1 == 0.0 && p.rho2 == 0.0) {
        const ReducedHeun red = heun_ode_reduction(p);
        json sols = json::array();
        std::vector<double> w;
        double worst = 0;
        for (const auto& s : red.solutions) {
            sols.push_back({{"sigma", s.sigma}, {"q", report::complex(s.q)}, {"w", report::complex(s.w)},
                            {"p", report::complexes(s.p)}, {"ode_residual", report::number(s.ode_residual)}});
            w.push_back(s.w.real());
            worst = std::max(worst, s.ode_residual);
        }
        r.body["reduction"] = {{"singularities", json::array({report::complex(red.singularities[0]),
                                                              report::complex(red.singularities[1]),
                                                              report::complex(red.singularities[2]), "infinity"})},
                               {"solutions", sols}};
        r.checks.add("reduced_ode_residual", worst, o.tol.bargmann);
        r.checks.add("reduced_vs_oracle", max_sorted_gap(w, ref), o.tol.bargmann);
    }
    return r;
}

void add_heun_flags(CLI::App* sub, Options& o, bool phi_required = true) {
    sub->add_option("--two-s", o.two_s, "twice the spin")->required()->check(CLI::NonNegativeNumber);
    auto* phi = sub->add_option("--phi", o.phi, "phase of a = exp(i phi)");
    if (phi_required) phi->required();
    sub->add_option("--rho", o.rho, "rho1,rho2,rho3")->delimiter(',')->expected(3);
    sub->add_option("--rho5", o.rho5, "override of the constant shift");
}

void add_tol_flags(CLI::App* sub, Options& o) {
    sub->add_option("--tol-hermitian", o.tol.hermitian);
    sub->add_option("--tol-eigen-residual", o.tol.eigen_residual);
    sub->add_option("--tol-root-polish", o.tol.root_polish);
    sub->add_option("--tol-structure", o.tol.structure);
    sub->add_option("--tol-bethe", o.tol.bethe);
    sub->add_option("--tol-oracle", o.tol.oracle);
    sub->add_option("--tol-richardson", o.tol.richardson);
    sub->add_option("--tol-bargmann", o.tol.bargmann);
    sub->add_option("--tol-entropy-clamp", o.tol.entropy_clamp);
}

void add_common_flags(CLI::App* sub, Options& o) {
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_option("--out", o.out, "output path, - for stdout");
    sub->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_flag("--timings", o.timings, "include wall-clock timings (breaks byte-identical output)");
    add_tol_flags(sub, o);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectra of the su(2) algebraic Heun operator by diagonalization, Bethe ansatz and Bargmann realization"};
    app.require_subcommand(1);
    Options o;

    auto* spectrum = app.add_subcommand("spectrum", "spectrum of W by one or all methods");
    add_heun_flags(spectrum, o);
    spectrum->add_option("--method", o.method)->check(CLI::IsMember({"oracle", "bethe", "bargmann", "all"}));
    spectrum->add_option("--branch", o.branch)->check(CLI::IsMember({"auto", "inhom", "homog"}));

    auto* gaudin = app.add_subcommand("gaudin-verify", "residuals of the structural identities");
    add_heun_flags(gaudin, o);
    gaudin->add_option("--points", o.points, "random spectral points per identity")->check(CLI::PositiveNumber);

    auto* bethe = app.add_subcommand("bethe", "Bethe roots and diagnostics per eigenvalue");
    add_heun_flags(bethe, o);
    bethe->add_option("--branch", o.branch)->check(CLI::IsMember({"auto", "inhom", "homog"}));

    auto* o3 = app.add_subcommand("o3", "spectrum of 4(J1^2 + r J2^2)");
    o3->add_option("--two-s", o.two_s, "twice the spin")->required()->check(CLI::NonNegativeNumber);
    o3->add_option("--r", o.r, "anisotropy in (0, 1)")->required();

    auto* kraw = app.add_subcommand("krawtchouk", "Krawtchouk chain entanglement; all cuts unless --cut is given");
    kraw->add_option("--two-s", o.two_s, "chain has two_s + 1 sites")->required()->check(CLI::NonNegativeNumber);
    kraw->add_option("--theta", o.theta, "mixing angle")->required();
    kraw->add_option("--fermi", o.fermi, "Fermi index K")->required();
    kraw->add_option("--cut", o.cut, "subsystem is sites 0..cut");

    auto* barg = app.add_subcommand("bargmann", "Bargmann realization and the reduced Heun equation");
    add_heun_flags(barg, o);

    for (auto* sub : {spectrum, gaudin, bethe, o3, kraw, barg}) add_common_flags(sub, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    CLI::App* chosen = app.get_subcommands().front();
    const std::string command = chosen->get_name();
    const auto start = std::chrono::steady_clock::now();
    Result r;
    json doc;
    doc["schema"] = report::kSchema;
    doc["command"] = command;
    doc["seed"] = o.seed;
    doc["tolerances"] = tolerances_json(o.tol);
    int code = 0;
    try {
        if (command == "spectrum") r = run_spectrum(o);
        else if (command == "gaudin-verify") r = run_gaudin(o);
        else if (command == "bethe") r = run_bethe(o);
        else if (command == "o3") r = run_o3(o);
        else if (command == "krawtchouk") r = run_krawtchouk(o);
        else r = run_bargmann(o);
        code = r.checks.all_passed() ? 0 : 1;
    } catch (const Error& e) {
        if (is_config_error(e)) {
            std::cerr << "heun-bethe: " << e.what() << '\n';
            return 2;
        }
        doc["error"] = e.what();
        code = 1;
    } catch (const std::exception& e) {
        doc["error"] = e.what();
        code = 1;
    }

    for (auto& [k, v] : r.body.items()) doc[k] = v;
    doc["checks"] = r.checks.to_json();
    doc["passed"] = code == 0;
    if (o.timings)
        doc["timings"] = {{"total_s", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};

    try {
        if (o.format == "csv") {
            report::Table t = r.table;
            if (t.header.empty()) {
                t.header = {"check", "observed", "tolerance", "passed"};
                for (const auto& c : r.checks.items())
                    t.rows.push_back({c.name, report::format_double(c.observed), report::format_double(c.tolerance),
                                      c.passed() ? "true" : "false"});
            }
            report::write_atomic(o.out, t.to_csv());
        } else {
            report::write_atomic(o.out, doc.dump(2) + "\n");
        }
    } catch (const std::exception& e) {
        std::cerr << "heun-bethe: " << e.what() << '\n';
        return 1;
    }
    for (const auto& c : r.checks.items())
        if (!c.passed())
            std::cerr << "check failed: " << c.name << " observed " << report::format_double(c.observed) << " tolerance "
                      << report::format_double(c.tolerance) << '\n';
    if (doc.contains("error")) std::cerr << "heun-bethe: " << doc["error"].get<std::string>() << '\n';
    return code;
}
