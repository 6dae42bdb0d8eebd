#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include <json.hpp>

#include "drive.hpp"
#include "errors.hpp"
#include "io.hpp"
#include "model.hpp"
#include "raman.hpp"

namespace anomalylab {

enum class OracleMode { None, Pump, Evolve };

inline std::string to_string(OracleMode m)
{
    switch (m) {
    case OracleMode::None: return "none";
    case OracleMode::Pump: return "pump";
    case OracleMode::Evolve: return "evolve";
    }
    return "?";
}

inline OracleMode oracle_mode_from_string(const std::string& s)
{
    if (s == "none") return OracleMode::None;
    if (s == "pump") return OracleMode::Pump;
    if (s == "evolve") return OracleMode::Evolve;
    throw ConfigError("unknown oracle mode '" + s + "'");
}

// Everything a CLI run depends on. The file format is a flat JSON object;
// every key is optional and missing keys keep the defaults below.
struct ScenarioConfig {
    ModelParams model;
    DriveProtocol drive;

    // current / drift time axis
    double tau_min = 0.0;
    double tau_max = 100.0;
    int n_samples = 1001;
    std::vector<double> rho{0.1, 0.05, 0.01};
    bool drift_control = true;          // also emit the delta_t = 0 trace

    // current: "trace" over time or "delta_sweep" at fixed sweep_tau
    std::string current_mode = "trace";
    double sweep_tau = 10.0;
    double sweep_delta_min = 0.0;
    double sweep_delta_max = 0.95;
    int sweep_n = 951;
    OracleMode oracle = OracleMode::None;
    int grid = 400;                     // k-grid per axis for oracles and bands

    // phase-diagram box
    double pd_lambda_min = -3.0;
    double pd_lambda_max = 3.0;
    double pd_delta_min = 0.0;
    double pd_delta_max = 0.99;
    int pd_resolution = 400;

    // bands
    std::vector<double> bands_lambda{1.2, 0.48};

    // calibrate
    RamanConfig raman;
    std::vector<Species> calib_species{Species::Rb87, Species::Na23};
    std::vector<double> calib_V_L_x{4.0, 5.0, 6.0, 7.0, 8.0};
    double calib_target = 0.32;
    double calib_m_max = 10.0;
    double calib_l_max = 10.0;
    int calib_n = 101;
    double tau_coh = kDefaultCoherenceTime;

    // output
    std::string out;                    // empty: stdout
    std::string manifest;               // empty: no manifest
    int threads = 0;                    // 0: ANOMALYLAB_THREADS or hardware

    void validate() const
    {
        try {
            model.validate();
            drive.validate();
            raman.validate();
        } catch (const DomainError& e) {
            throw ConfigError(e.what());
        }
        if (!(tau_max > tau_min)) throw ConfigError("tau_max must exceed tau_min");
        if (n_samples < 2) throw ConfigError("n_samples must be >= 2");
        if (sweep_n < 2) throw ConfigError("sweep_n must be >= 2");
        if (!(sweep_delta_min >= 0.0 && sweep_delta_max < 1.0 && sweep_delta_max > sweep_delta_min))
            throw ConfigError("delta sweep must lie in [0, 1)");
        if (current_mode != "trace" && current_mode != "delta_sweep")
            throw ConfigError("current_mode must be 'trace' or 'delta_sweep'");
        if (grid < 8) throw ConfigError("grid must be >= 8");
        if (pd_resolution < 2) throw ConfigError("pd_resolution must be >= 2");
        if (!(pd_delta_min >= 0.0 && pd_delta_max < 1.0 && pd_delta_max >= pd_delta_min))
            throw ConfigError("phase-diagram delta range must lie in [0, 1)");
        if (!(pd_lambda_max >= pd_lambda_min)) throw ConfigError("phase-diagram lambda range is empty");
        for (double r : rho)
            if (!(r > 0.0)) throw ConfigError("rho values must be positive");
        if (calib_n < 2) throw ConfigError("calib_n must be >= 2");
        if (!(calib_target > 0.0 && calib_target < 1.0)) throw ConfigError("calib_target must lie in (0, 1)");
        if (!(calib_m_max > 0.0) || !(calib_l_max > 0.0)) throw ConfigError("calibration box must be positive");
        if (!(tau_coh > 0.0)) throw ConfigError("tau_coh must be positive");
        if (threads < 0) throw ConfigError("threads must be >= 0");
    }
};

inline nlohmann::json to_json(const ScenarioConfig& c)
{
    nlohmann::json j;
    j["t"] = c.model.t;
    j["a_x"] = c.model.a_x;
    j["a_y"] = c.model.a_y;
    j["delta_t"] = c.model.delta_t;
    j["tp_x"] = c.model.tp_x;
    j["tp_y"] = c.model.tp_y;
    j["pert_eps1"] = c.model.pert_eps1;
    j["pert_epsz"] = c.model.pert_epsz;
    j["pert_channel"] = to_string(c.model.pert_channel);

    j["drive_kind"] = to_string(c.drive.kind);
    j["lambda0"] = c.drive.lambda0;
    j["lambda_amp"] = c.drive.amp;
    j["omega"] = c.drive.omega;

    j["tau_min"] = c.tau_min;
    j["tau_max"] = c.tau_max;
    j["n_samples"] = c.n_samples;
    j["rho"] = c.rho;
    j["drift_control"] = c.drift_control;
    j["current_mode"] = c.current_mode;
    j["sweep_tau"] = c.sweep_tau;
    j["sweep_delta_min"] = c.sweep_delta_min;
    j["sweep_delta_max"] = c.sweep_delta_max;
    j["sweep_n"] = c.sweep_n;
    j["oracle"] = to_string(c.oracle);
    j["grid"] = c.grid;

    j["pd_lambda_min"] = c.pd_lambda_min;
    j["pd_lambda_max"] = c.pd_lambda_max;
    j["pd_delta_min"] = c.pd_delta_min;
    j["pd_delta_max"] = c.pd_delta_max;
    j["pd_resolution"] = c.pd_resolution;
    j["bands_lambda"] = c.bands_lambda;

    j["V_L_x"] = c.raman.V_L_x;
    j["V_R_x"] = c.raman.V_R_x;
    j["m_ratio"] = c.raman.m_ratio;
    j["l_ratio"] = c.raman.l_ratio;
    j["species"] = to_string(c.raman.species);
    j["custom_recoil_hz"] = c.raman.custom_recoil_hz;
    j["wavelength_nm"] = c.raman.wavelength_nm;
    j["depth_convention"] = to_string(c.raman.convention);
    std::vector<std::string> sp;
    for (Species s : c.calib_species) sp.push_back(to_string(s));
    j["calib_species"] = sp;
    j["calib_V_L_x"] = c.calib_V_L_x;
    j["calib_target"] = c.calib_target;
    j["calib_m_max"] = c.calib_m_max;
    j["calib_l_max"] = c.calib_l_max;
    j["calib_n"] = c.calib_n;
    j["tau_coh"] = c.tau_coh;

    j["out"] = c.out;
    j["manifest"] = c.manifest;
    j["threads"] = c.threads;
    return j;
}

namespace detail {

template <class T>
void read_key(const nlohmann::json& j, const char* key, T& dst)
{
    if (!j.contains(key)) return;
    try {
        dst = j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
}

inline const std::vector<std::string>& known_keys()
{
    static const std::vector<std::string> keys = [] {
        const nlohmann::json defaults = to_json(ScenarioConfig{});
        std::vector<std::string> k;
        for (const auto& el : defaults.items()) k.push_back(el.key());
        return k;
    }();
    return keys;
}

} // namespace detail

// Reads a flat JSON object on top of `base`. Unknown keys are rejected so
// that a typo never silently falls back to a default.
inline ScenarioConfig from_json(const nlohmann::json& j, ScenarioConfig c = {})
{
    if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
    const auto& known = detail::known_keys();
    for (const auto& el : j.items())
        if (std::find(known.begin(), known.end(), el.key()) == known.end())
            throw ConfigError("unknown configuration key '" + el.key() + "'");

    using detail::read_key;
    read_key(j, "t", c.model.t);
    read_key(j, "a_x", c.model.a_x);
    read_key(j, "a_y", c.model.a_y);
    read_key(j, "delta_t", c.model.delta_t);
    read_key(j, "tp_x", c.model.tp_x);
    read_key(j, "tp_y", c.model.tp_y);
    read_key(j, "pert_eps1", c.model.pert_eps1);
    read_key(j, "pert_epsz", c.model.pert_epsz);
    std::string s;
    if (j.contains("pert_channel")) {
        read_key(j, "pert_channel", s);
        c.model.pert_channel = pauli_channel_from_string(s);
    }
    if (j.contains("drive_kind")) {
        read_key(j, "drive_kind", s);
        c.drive.kind = drive_kind_from_string(s);
    }
    read_key(j, "lambda0", c.drive.lambda0);
    read_key(j, "lambda_amp", c.drive.amp);
    read_key(j, "omega", c.drive.omega);

    read_key(j, "tau_min", c.tau_min);
    read_key(j, "tau_max", c.tau_max);
    read_key(j, "n_samples", c.n_samples);
    read_key(j, "rho", c.rho);
    read_key(j, "drift_control", c.drift_control);
    read_key(j, "current_mode", c.current_mode);
    read_key(j, "sweep_tau", c.sweep_tau);
    read_key(j, "sweep_delta_min", c.sweep_delta_min);
    read_key(j, "sweep_delta_max", c.sweep_delta_max);
    read_key(j, "sweep_n", c.sweep_n);
    if (j.contains("oracle")) {
        read_key(j, "oracle", s);
        c.oracle = oracle_mode_from_string(s);
    }
    read_key(j, "grid", c.grid);

    read_key(j, "pd_lambda_min", c.pd_lambda_min);
    read_key(j, "pd_lambda_max", c.pd_lambda_max);
    read_key(j, "pd_delta_min", c.pd_delta_min);
    read_key(j, "pd_delta_max", c.pd_delta_max);
    read_key(j, "pd_resolution", c.pd_resolution);
    read_key(j, "bands_lambda", c.bands_lambda);

    read_key(j, "V_L_x", c.raman.V_L_x);
    read_key(j, "V_R_x", c.raman.V_R_x);
    read_key(j, "m_ratio", c.raman.m_ratio);
    read_key(j, "l_ratio", c.raman.l_ratio);
    if (j.contains("species")) {
        read_key(j, "species", s);
        c.raman.species = species_from_string(s);
    }
    read_key(j, "custom_recoil_hz", c.raman.custom_recoil_hz);
    read_key(j, "wavelength_nm", c.raman.wavelength_nm);
    if (j.contains("depth_convention")) {
        read_key(j, "depth_convention", s);
        c.raman.convention = depth_convention_from_string(s);
    }
    if (j.contains("calib_species")) {
        std::vector<std::string> sp;
        read_key(j, "calib_species", sp);
        c.calib_species.clear();
        for (const auto& x : sp) c.calib_species.push_back(species_from_string(x));
    }
    read_key(j, "calib_V_L_x", c.calib_V_L_x);
    read_key(j, "calib_target", c.calib_target);
    read_key(j, "calib_m_max", c.calib_m_max);
    read_key(j, "calib_l_max", c.calib_l_max);
    read_key(j, "calib_n", c.calib_n);
    read_key(j, "tau_coh", c.tau_coh);

    read_key(j, "out", c.out);
    read_key(j, "manifest", c.manifest);
    read_key(j, "threads", c.threads);
    return c;
}

inline ScenarioConfig parse_config(const std::string& text, ScenarioConfig base = {})
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("configuration is not valid JSON: ") + e.what());
    }
    return from_json(j, std::move(base));
}

inline ScenarioConfig load_config(const std::string& path)
{
    std::string text;
    try {
        text = read_file(path);
    } catch (const IoError& e) {
        throw ConfigError(e.what());
    }
    return parse_config(text);
}

inline std::string dump_config(const ScenarioConfig& c) { return to_json(c).dump(2) + "\n"; }

} // namespace anomalylab
