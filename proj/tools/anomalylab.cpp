// anomalylab command-line front end: runs one scenario and writes CSV.
//
//   anomalylab <phase-diagram|bands|current|drift|calibrate|selftest>
//              [--config FILE] [--out FILE] [--grid N] [--oracle MODE]
//              [--species rb87|na23] [--threads N] [--manifest FILE]
//
// Exit codes: 0 success, 2 configuration error, 3 oracle/consistency
// failure, 4 I/O error.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "anomalylab/anomalylab.hpp"

using namespace anomalylab;

namespace {

enum ExitCode { kOk = 0, kConfigError = 2, kOracleError = 3, kIoError = 4 };

struct RunResult {
    CsvTable table;
    std::string command;
    bool oracle_failed = false;
    std::string oracle_note;
};

// --------------------------------------------------------------------------
// phase-diagram

CsvTable cmd_phase_diagram(const ScenarioConfig& c)
{
    CsvTable t(schema_name("phase-diagram"), {"lambda", "delta_t", "phase", "n_pairs"});
    const auto lam = linspace(c.pd_lambda_min, c.pd_lambda_max, c.pd_resolution);
    const auto del = linspace(c.pd_delta_min, c.pd_delta_max, c.pd_resolution);
    for (double l : lam)
        for (double d : del) {
            const DiracPhase ph = classify(l, d);
            t.add(l, d, to_string(ph), pair_count(ph));
        }
    return t;
}

// --------------------------------------------------------------------------
// bands

CsvTable cmd_bands(const ScenarioConfig& c)
{
    CsvTable t(schema_name("bands"), {"lambda", "kx", "ky", "e_minus", "e_plus", "gap", "node"});
    const ModelParams& p = c.model;
    const int n = c.grid;
    for (double lam : c.bands_lambda) {
        const auto dir = DriveProtocol::constant(lam);
        for (int i = 0; i < n; ++i) {
            const double kx = -M_PI / p.a_x + 2.0 * M_PI / p.a_x * i / n;
            for (int j = 0; j < n; ++j) {
                const double ky = -M_PI / p.a_y + 2.0 * M_PI / p.a_y * j / n;
                const BandPair b = band(p, dir, kx, ky, 0.0);
                t.add(lam, kx, ky, b.e_minus, b.e_plus, b.e_plus - b.e_minus, 0);
            }
        }
        // The band-touching points themselves, which a grid rarely hits.
        for (const DiracPoint& q : locate(p, lam).points()) {
            const BandPair b = band(p, dir, q.kx, q.ky, 0.0);
            t.add(lam, q.kx, q.ky, b.e_minus, b.e_plus, b.e_plus - b.e_minus, 1);
        }
    }
    return t;
}

// --------------------------------------------------------------------------
// current

constexpr double kPumpTolerance = 1e-3;
constexpr double kEvolveTolerance = 0.05;
// Samples this close (in lambda +- delta_t) to a Lifshitz level are not
// compared: the oracle's finite time stencil straddles the transition.
constexpr double kLifshitzExclusion = 0.01;

bool near_lifshitz(const CurrentSample& s, double delta)
{
    for (double L : lifshitz_levels(delta))
        if (std::abs(s.lambda - L) < kLifshitzExclusion) return true;
    return false;
}

// Linear interpolation of an evolve trace at tau.
double trace_at(const EvolveTrace& tr, double tau)
{
    const auto it = std::lower_bound(tr.tau.begin(), tr.tau.end(), tau);
    if (it == tr.tau.begin()) return tr.J.front();
    if (it == tr.tau.end()) return tr.J.back();
    const size_t i = static_cast<size_t>(it - tr.tau.begin());
    const double w = (tau - tr.tau[i - 1]) / (tr.tau[i] - tr.tau[i - 1]);
    return (1.0 - w) * tr.J[i - 1] + w * tr.J[i];
}

// Compares oracle values with the analytic samples; returns a description
// of the worst comparison and whether everything was within tolerance.
bool check_oracle(const std::vector<CurrentSample>& a, const std::vector<double>& o, const std::vector<double>& deltas,
                  double rel, std::string& note)
{
    double scale = 0.0;
    for (const auto& s : a)
        if (s.status == SampleStatus::Regular && std::isfinite(s.J_total)) scale = std::max(scale, std::abs(s.J_total));
    double worst = 0.0;
    double worst_tau = NAN;
    size_t compared = 0, failed = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].status != SampleStatus::Regular || near_lifshitz(a[i], deltas[i])) continue;
        const double ref = std::max(std::abs(a[i].J_total), 1e-3 * scale);
        if (ref == 0.0) {
            ++compared;
            if (o[i] != 0.0 && std::abs(o[i]) > 1e-12) ++failed;
            continue;
        }
        const double err = std::abs(o[i] - a[i].J_total) / ref;
        ++compared;
        if (err > rel) ++failed;
        if (err > worst) {
            worst = err;
            worst_tau = a[i].tau;
        }
    }
    char buf[256];
    std::snprintf(buf, sizeof buf, "compared %zu samples, %zu outside tolerance %.3g; worst relative error %.3g at tau=%.6g",
                  compared, failed, rel, worst, worst_tau);
    note = buf;
    return failed == 0;
}

RunResult cmd_current(const ScenarioConfig& c)
{
    const bool sweep = c.current_mode == "delta_sweep";
    std::vector<ModelParams> models;
    std::vector<double> taus;
    if (sweep) {
        for (double d : linspace(c.sweep_delta_min, c.sweep_delta_max, c.sweep_n)) {
            ModelParams p = c.model;
            p.delta_t = d;
            models.push_back(p);
            taus.push_back(c.sweep_tau);
        }
    } else {
        taus = uniform_times(c.tau_min, c.tau_max, c.n_samples);
        models.assign(taus.size(), c.model);
    }

    std::vector<CurrentSample> a(taus.size());
    std::vector<double> deltas(taus.size());
    for (size_t i = 0; i < taus.size(); ++i) {
        a[i] = analytic_current(models[i], c.drive, taus[i]);
        deltas[i] = models[i].delta_t;
    }

    std::vector<double> oracle;
    RunResult r{CsvTable("", {}), "current", false, ""};
    if (c.oracle == OracleMode::Pump) {
        KGrid g;
        g.n_x = g.n_y = c.grid;
        oracle.resize(taus.size());
        for (size_t i = 0; i < taus.size(); ++i) oracle[i] = pump_current(models[i], c.drive, taus[i], g).J;
        r.oracle_failed = !check_oracle(a, oracle, deltas, kPumpTolerance, r.oracle_note);
    } else if (c.oracle == OracleMode::Evolve) {
        if (sweep) throw ConfigError("the evolve oracle needs current_mode = trace");
        KGrid g;
        g.n_x = g.n_y = c.grid;
        EvolveOptions opt;
        opt.tau_max = c.tau_max;
        opt.record_every = 10;
        const EvolveTrace tr = evolve_filled_band(c.model, c.drive, g, opt);
        oracle.resize(taus.size());
        for (size_t i = 0; i < taus.size(); ++i) oracle[i] = trace_at(tr, taus[i]);
        r.oracle_failed = !check_oracle(a, oracle, deltas, kEvolveTolerance, r.oracle_note);
    }

    std::vector<std::string> cols;
    if (sweep) cols = {"delta_t"};
    for (const char* s : {"tau", "lambda", "J_minus", "J_plus", "J_total"}) cols.emplace_back(s);
    if (!oracle.empty()) cols.emplace_back("J_oracle");
    cols.emplace_back("n_pairs");
    cols.emplace_back("status");
    CsvTable t(schema_name(sweep ? "current-sweep" : "current"), cols);
    for (size_t i = 0; i < a.size(); ++i) {
        const auto& s = a[i];
        const std::string st = to_string(s.status);
        if (sweep && oracle.empty()) t.add(deltas[i], s.tau, s.lambda, s.J_minus, s.J_plus, s.J_total, s.n_pairs, st);
        else if (sweep) t.add(deltas[i], s.tau, s.lambda, s.J_minus, s.J_plus, s.J_total, oracle[i], s.n_pairs, st);
        else if (oracle.empty()) t.add(s.tau, s.lambda, s.J_minus, s.J_plus, s.J_total, s.n_pairs, st);
        else t.add(s.tau, s.lambda, s.J_minus, s.J_plus, s.J_total, oracle[i], s.n_pairs, st);
    }
    r.table = std::move(t);
    return r;
}

// --------------------------------------------------------------------------
// drift

CsvTable cmd_drift(const ScenarioConfig& c)
{
    CsvTable t(schema_name("drift"), {"delta_t", "rho", "tau", "x_c", "x_c_closed"});
    const auto taus = uniform_times(c.tau_min, c.tau_max, c.n_samples);
    std::vector<double> deltas{c.model.delta_t};
    if (c.drift_control && c.model.delta_t != 0.0) deltas.push_back(0.0);
    for (double del : deltas) {
        ModelParams p = c.model;
        p.delta_t = del;
        for (double rho : c.rho) {
            const DriftTrace tr = drift(p, c.drive, rho, taus);
            for (const auto& s : tr.samples) t.add(del, rho, s.tau, s.x_c, s.x_c_closed);
        }
    }
    return t;
}

// --------------------------------------------------------------------------
// calibrate

void add_calibration_row(CsvTable& t, const std::string& map, const RamanConfig& rc)
{
    const HoppingSet h = hoppings(rc);
    const double ratio = h.t_x > 0.0 ? h.delta_t / h.t_x : NAN;
    const double khz = h.t_x * rc.recoil_hz() / 1000.0;
    t.add(map, to_string(rc.species), rc.V_L_x, rc.V_R_x, rc.m_ratio, rc.l_ratio, h.t_x, h.t_y, h.delta_t, h.tp_x,
          h.tp_y, ratio, khz, "");
}

CsvTable cmd_calibrate(const ScenarioConfig& c)
{
    CsvTable t(schema_name("calibrate"), {"map", "species", "V_L_x", "V_R_x", "m_ratio", "l_ratio", "t_x", "t_y",
                                          "delta_t", "tp_x", "tp_y", "delta_over_tx", "t_x_khz", "feasible"});
    const int n = c.calib_n;

    // t_x = t_y curves for several trapping depths.
    for (double vl : c.calib_V_L_x) {
        RamanConfig rc = c.raman;
        rc.V_L_x = vl;
        for (int i = 1; i <= n; ++i) {
            const double l = c.calib_l_max * i / n;
            const double m = detail::equal_hopping_m(rc, l);
            if (m > c.calib_m_max) continue;
            rc.l_ratio = l;
            rc.m_ratio = m;
            add_calibration_row(t, "equal_hopping", rc);
        }
    }

    // delta_t / t_x over the (m, l) box at the configured depth.
    {
        RamanConfig rc = c.raman;
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j) {
                rc.m_ratio = c.calib_m_max * i / n;
                rc.l_ratio = c.calib_l_max * j / n;
                add_calibration_row(t, "ratio", rc);
            }
    }

    // Points on the t_x = t_y curve with delta_t / t_x = target.
    {
        RamanConfig rc = c.raman;
        for (const auto& s : solve_equal_hopping(rc, c.calib_target)) {
            if (s.m_ratio > c.calib_m_max || s.l_ratio > c.calib_l_max) continue;
            rc.m_ratio = s.m_ratio;
            rc.l_ratio = s.l_ratio;
            add_calibration_row(t, "target", rc);
        }
    }

    // t_x in kHz and the coherence-time mask per species.
    const auto vl = linspace(4.0, 10.0, n);
    const auto vr = linspace(0.0, 1.0, n);
    for (Species sp : c.calib_species) {
        RamanConfig rc = c.raman;
        rc.species = sp;
        const FeasibilityMap fm = feasibility_map(rc, vl, vr, c.tau_coh);
        for (size_t i = 0; i < vl.size(); ++i)
            for (size_t j = 0; j < vr.size(); ++j) {
                rc.V_L_x = vl[i];
                rc.V_R_x = vr[j];
                const HoppingSet h = hoppings(rc);
                const double ratio = h.t_x > 0.0 ? h.delta_t / h.t_x : NAN;
                t.add("feasibility", to_string(sp), rc.V_L_x, rc.V_R_x, rc.m_ratio, rc.l_ratio, h.t_x, h.t_y,
                      h.delta_t, h.tp_x, h.tp_y, ratio, fm.at(i, j), fm.ok(i, j) ? "1" : "0");
            }
    }
    return t;
}

// --------------------------------------------------------------------------
// selftest: a quick pass over the library's reference values.

int cmd_selftest()
{
    int failures = 0;
    auto check = [&](const char* name, bool ok, double got, double want) {
        std::printf("%s %-44s got %.10g want %.10g\n", ok ? "PASS" : "FAIL", name, got, want);
        if (!ok) ++failures;
    };
    auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };

    ModelParams p;
    {
        // lambda = 0.5 with lambda' = -0.01: pick tau on a cosine drive.
        const DriveProtocol d = DriveProtocol::periodic(1.0, 0.02, 1.0);
        const double tau = M_PI / 2;
        const auto s = analytic_current(p, d, tau);
        check("analytic current at lambda=0.5", rel(s.J_total, 1.16271e-3) < 1e-4, s.J_total, 1.16271e-3);
        KGrid g;
        g.n_x = g.n_y = 200;
        const double jp = pump_current(p, d, tau, g).J;
        check("pump oracle matches analytic", rel(jp, s.J_total) < 1e-3, jp, s.J_total);
    }
    {
        const DriveProtocol d = DriveProtocol::periodic(2.44, 0.2, 0.1);
        const auto tr = drift(p, d, 0.01, uniform_times(0.0, 10.0 * M_PI, 11));
        const double x = tr.samples.back().x_c;
        check("drift at half period, rho=0.01", std::abs(std::abs(x) - 10.2416382350) < 1e-6, std::abs(x),
              10.2416382350);
    }
    check("classify(1.2, 0.32) = one pair", classify(1.2, 0.32) == DiracPhase::OnePairFamily1, pair_count(classify(1.2, 0.32)), 1);
    check("classify(0, 0.32) = two pairs", classify(0.0, 0.32) == DiracPhase::TwoPairs, pair_count(classify(0.0, 0.32)), 2);
    {
        RamanConfig rc;
        rc.V_L_x = 5.0;
        const double tx = hoppings(rc).t_x;
        check("t_x at V=5 over V_R_x", rel(tx, 0.0035919) < 1e-4, tx, 0.0035919);
    }
    {
        ScenarioConfig c;
        c.model.delta_t = 0.1234567890123;
        const std::string a = dump_config(c);
        const bool same = dump_config(parse_config(a)) == a;
        check("config round trip", same, same, 1);
    }
    std::printf("%s\n", failures == 0 ? "selftest passed" : "selftest FAILED");
    return failures == 0 ? kOk : kOracleError;
}

void write_output(const ScenarioConfig& c, const RunResult& r)
{
    const std::string text = r.table.str();
    if (c.out.empty())
        std::cout << text << std::flush;
    else
        write_file(c.out, text);

    if (!c.manifest.empty()) {
        nlohmann::json m;
        m["tool"] = "anomalylab";
        m["version"] = kVersion;
        m["command"] = r.command;
        m["schema"] = r.table.schema();
        m["config"] = to_json(c);
        m["output"] = c.out.empty() ? "-" : c.out;
        m["rows"] = r.table.size();
        m["crc32"] = crc32_hex(text);
        m["threads"] = thread_count();
        if (!r.oracle_note.empty()) {
            m["oracle"] = to_string(c.oracle);
            m["oracle_ok"] = !r.oracle_failed;
            m["oracle_note"] = r.oracle_note;
        }
        write_file(c.manifest, m.dump(2) + "\n");
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"anomalylab: dipolar parity anomaly currents in a driven two-band lattice"};
    app.require_subcommand(0, 1);

    std::string config_path, out, oracle, species, manifest;
    int grid = 0, threads = -1;
    bool dump = false;
    app.add_option("--config", config_path, "JSON scenario file (flat keys)");
    app.add_option("--out", out, "output CSV path (default: stdout)");
    app.add_option("--grid", grid, "k-grid points per axis")->check(CLI::PositiveNumber);
    app.add_option("--oracle", oracle, "current oracle")->check(CLI::IsMember({"none", "pump", "evolve"}));
    app.add_option("--species", species, "atomic species for calibrate")->check(CLI::IsMember({"rb87", "na23"}));
    app.add_option("--threads", threads, "worker threads (0: ANOMALYLAB_THREADS or hardware)")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--manifest", manifest, "write a JSON run manifest to this path");
    app.add_flag("--dump-config", dump, "print the effective configuration and exit");

    std::string command;
    const std::pair<const char*, const char*> commands[] = {
        {"phase-diagram", "classify phases on a (lambda, delta_t) grid"},
        {"bands", "band energies and Dirac nodes at each configured lambda"},
        {"current", "analytic anomaly current along the drive, or a delta_t sweep"},
        {"drift", "centre-of-mass drift for each density, plus the delta_t = 0 control"},
        {"calibrate", "Raman-lattice hoppings, equal-hopping solutions and feasibility"},
        {"selftest", "quick numerical checks against frozen reference values"},
    };
    for (const auto& [name, help] : commands)
        app.add_subcommand(name, help)->fallthrough()->callback([&command, name] { command = name; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfigError;
    }

    try {
        ScenarioConfig c = config_path.empty() ? ScenarioConfig{} : load_config(config_path);
        if (!out.empty()) c.out = out;
        if (!manifest.empty()) c.manifest = manifest;
        if (grid > 0) c.grid = grid;
        if (!oracle.empty()) c.oracle = oracle_mode_from_string(oracle);
        if (!species.empty()) {
            c.raman.species = species_from_string(species);
            c.calib_species = {c.raman.species};
        }
        if (threads >= 0) c.threads = threads;
        c.validate();
        set_thread_count(c.threads);

        if (dump) {
            std::cout << dump_config(c);
            return kOk;
        }
        if (command.empty()) {
            std::cerr << "a subcommand is required\n" << app.help();
            return kConfigError;
        }
        if (command == "selftest") return cmd_selftest();

        RunResult r{CsvTable("", {}), command, false, ""};
        if (command == "phase-diagram") r.table = cmd_phase_diagram(c);
        else if (command == "bands") r.table = cmd_bands(c);
        else if (command == "current") r = cmd_current(c);
        else if (command == "drift") r.table = cmd_drift(c);
        else if (command == "calibrate") r.table = cmd_calibrate(c);

        write_output(c, r);
        if (r.oracle_failed) {
            std::cerr << "oracle disagreement: " << r.oracle_note << "\n";
            return kOracleError;
        }
        if (!r.oracle_note.empty()) std::cerr << "oracle ok: " << r.oracle_note << "\n";
        return kOk;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kConfigError;
    } catch (const DomainError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kConfigError;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kIoError;
    } catch (const ConsistencyError& e) {
        std::cerr << "consistency failure: " << e.what() << "\n";
        return kOracleError;
    } catch (const StepSizeError& e) {
        std::cerr << "oracle failure: " << e.what() << "\n";
        return kOracleError;
    } catch (const NearDegeneracyError& e) {
        std::cerr << "oracle failure: " << e.what() << "\n";
        return kOracleError;
    }
}
