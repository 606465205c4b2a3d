#include "gqed/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "gqed/errors.hpp"

namespace gqed {

using nlohmann::json;

std::vector<double> Range::values() const {
    std::vector<double> v(points);
    for (int i = 0; i < points; ++i)
        v[i] = points == 1 ? start : start + (stop - start) * i / double(points - 1);
    return v;
}

ModelParams RunConfig::params() const {
    return make_params(gamma, R, k0R_over_pi * pi, delta, gamma1_fraction);
}

MomentumGrid RunConfig::grid() const { return MomentumGrid(k_max, n_points); }

MomentumGrid RunConfig::grid_2d() const { return MomentumGrid(k_max_2d, energy_grid_points); }

namespace {

const std::map<std::string, std::set<std::string>> allowed = {
    {"", {"model", "numerics", "run"}},
    {"model", {"gamma", "R", "k0R_over_pi", "delta", "gamma1_fraction"}},
    {"numerics",
     {"k_max", "n_points", "k_max_2d", "energy_grid_points", "f12_max_iter", "refine", "tolerances"}},
    {"numerics.tolerances", {"f12", "power", "pole", "refinement"}},
    {"run",
     {"mode", "observable", "output_dir", "tau", "tau_prime", "delta_scan", "k_samples", "branches"}},
    {"run.tau", {"start", "stop", "points"}},
    {"run.tau_prime", {"start", "stop", "points"}},
    {"run.delta_scan", {"start", "stop", "points"}},
    {"run.k_samples", {"start", "stop", "points"}},
};

void check_keys(const json& j, const std::string& path, std::vector<std::string>& errs) {
    if (!j.is_object()) {
        errs.push_back((path.empty() ? "config" : path) + ": expected an object");
        return;
    }
    const auto& keys = allowed.at(path);
    for (const auto& [k, v] : j.items()) {
        const std::string full = path.empty() ? k : path + "." + k;
        if (!keys.count(k)) {
            errs.push_back("unknown key '" + full + "'");
            continue;
        }
        if (allowed.count(full)) check_keys(v, full, errs);
    }
}

json parse_value(const std::string& s) {
    try {
        return json::parse(s);
    } catch (const json::parse_error&) {
        return json(s);
    }
}

void apply_override(json& j, const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw ParseError("override '" + kv + "' is not key=value");
    const std::string key = kv.substr(0, eq);
    json* node = &j;
    std::stringstream ss(key);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    for (size_t i = 0; i + 1 < parts.size(); ++i) {
        json& next = (*node)[parts[i]];
        if (next.is_null()) next = json::object();
        node = &next;
    }
    (*node)[parts.back()] = parse_value(kv.substr(eq + 1));
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& path,
          std::vector<std::string>& errs) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        errs.push_back(path + "." + key + ": wrong type");
    }
}

void read_range(const json& run, const char* key, Range& r, std::vector<std::string>& errs) {
    if (!run.contains(key)) return;
    const json& j = run.at(key);
    if (!j.is_object()) return;
    const std::string path = std::string("run.") + key;
    read(j, "start", r.start, path, errs);
    read(j, "stop", r.stop, path, errs);
    read(j, "points", r.points, path, errs);
    if (r.points < 0) errs.push_back(path + ".points must be >= 0");
    if (r.points > 1 && !(r.stop > r.start)) errs.push_back(path + ": stop must exceed start");
}

json range_json(const Range& r) { return {{"start", r.start}, {"stop", r.stop}, {"points", r.points}}; }

}  // namespace

RunConfig parse_config_json(json j, const std::vector<std::string>& overrides) {
    if (j.is_null()) j = json::object();
    for (const auto& o : overrides) apply_override(j, o);
    std::vector<std::string> errs;
    check_keys(j, "", errs);
    if (!errs.empty()) {
        std::string msg;
        for (const auto& e : errs) msg += (msg.empty() ? "" : "; ") + e;
        throw ValidationError(msg);
    }
    RunConfig c;
    const json empty = json::object();
    const json& model = j.contains("model") ? j.at("model") : empty;
    const json& num = j.contains("numerics") ? j.at("numerics") : empty;
    const json& tol = num.contains("tolerances") ? num.at("tolerances") : empty;
    const json& run = j.contains("run") ? j.at("run") : empty;

    read(model, "gamma", c.gamma, "model", errs);
    read(model, "R", c.R, "model", errs);
    read(model, "k0R_over_pi", c.k0R_over_pi, "model", errs);
    read(model, "delta", c.delta, "model", errs);
    read(model, "gamma1_fraction", c.gamma1_fraction, "model", errs);
    read(num, "k_max", c.k_max, "numerics", errs);
    read(num, "n_points", c.n_points, "numerics", errs);
    read(num, "k_max_2d", c.k_max_2d, "numerics", errs);
    read(num, "energy_grid_points", c.energy_grid_points, "numerics", errs);
    read(num, "f12_max_iter", c.f12_max_iter, "numerics", errs);
    read(num, "refine", c.refine, "numerics", errs);
    read(tol, "f12", c.tol_f12, "numerics.tolerances", errs);
    read(tol, "power", c.tol_power, "numerics.tolerances", errs);
    read(tol, "pole", c.tol_pole, "numerics.tolerances", errs);
    read(tol, "refinement", c.tol_refinement, "numerics.tolerances", errs);
    std::string mode = "exact";
    read(run, "mode", mode, "run", errs);
    read(run, "observable", c.observable, "run", errs);
    read(run, "output_dir", c.output_dir, "run", errs);
    read(run, "branches", c.branches, "run", errs);
    read_range(run, "tau", c.tau, errs);
    read_range(run, "tau_prime", c.tau_prime, errs);
    read_range(run, "delta_scan", c.delta_scan, errs);
    read_range(run, "k_samples", c.k_samples, errs);

    if (!(c.gamma > 0) || !std::isfinite(c.gamma)) errs.push_back("model.gamma must be > 0");
    if (!(c.R >= 0) || !std::isfinite(c.R)) errs.push_back("model.R must be >= 0");
    if (!std::isfinite(c.k0R_over_pi)) errs.push_back("model.k0R_over_pi must be finite");
    if (!std::isfinite(c.delta)) errs.push_back("model.delta must be finite");
    if (!(c.gamma1_fraction >= 0 && c.gamma1_fraction <= 1))
        errs.push_back("model.gamma1_fraction must lie in [0, 1]");
    if (c.k_max < 0) errs.push_back("numerics.k_max must be > 0");
    if (c.k_max_2d < 0) errs.push_back("numerics.k_max_2d must be > 0");
    if (c.n_points < 9 || c.n_points % 2 == 0) errs.push_back("numerics.n_points must be odd and >= 9");
    if (c.energy_grid_points < 9 || c.energy_grid_points % 2 == 0)
        errs.push_back("numerics.energy_grid_points must be odd and >= 9");
    if (c.f12_max_iter < 1) errs.push_back("numerics.f12_max_iter must be >= 1");
    if (c.refine < 1) errs.push_back("numerics.refine must be >= 1");
    if (!(c.tol_f12 > 0)) errs.push_back("numerics.tolerances.f12 must be > 0");
    if (!(c.tol_power > 0)) errs.push_back("numerics.tolerances.power must be > 0");
    if (!(c.tol_pole > 0)) errs.push_back("numerics.tolerances.pole must be > 0");
    if (!(c.tol_refinement > 0)) errs.push_back("numerics.tolerances.refinement must be > 0");
    try {
        c.mode = mode_from_string(mode);
    } catch (const Error&) {
        errs.push_back("run.mode '" + mode + "' is not one of exact, weak_correlation, "
                       "quasi_markovian, markovian");
    }
    static const std::set<std::string> observables{"", "spectrum", "g2", "g3", "poles",
                                                   "detuning_scan", "validate"};
    if (!observables.count(c.observable))
        errs.push_back("run.observable '" + c.observable + "' is not supported");
    if (c.output_dir.empty()) errs.push_back("run.output_dir must not be empty");
    if (!errs.empty()) {
        std::string msg;
        for (const auto& e : errs) msg += (msg.empty() ? "" : "; ") + e;
        throw ValidationError(msg);
    }

    c.k0R_over_pi = std::fmod(c.k0R_over_pi, 2.0);
    if (c.k0R_over_pi < 0) c.k0R_over_pi += 2.0;
    if (c.k_max == 0) c.k_max = 40 * c.gamma;
    if (c.k_max_2d == 0) c.k_max_2d = 15 * c.gamma;

    c.echo = {{"model",
               {{"gamma", c.gamma},
                {"R", c.R},
                {"k0R_over_pi", c.k0R_over_pi},
                {"delta", c.delta},
                {"gamma1_fraction", c.gamma1_fraction}}},
              {"numerics",
               {{"k_max", c.k_max},
                {"n_points", c.n_points},
                {"k_max_2d", c.k_max_2d},
                {"energy_grid_points", c.energy_grid_points},
                {"f12_max_iter", c.f12_max_iter},
                {"refine", c.refine},
                {"tolerances",
                 {{"f12", c.tol_f12},
                  {"power", c.tol_power},
                  {"pole", c.tol_pole},
                  {"refinement", c.tol_refinement}}}}},
              {"run",
               {{"mode", to_string(c.mode)},
                {"observable", c.observable},
                {"output_dir", c.output_dir},
                {"tau", range_json(c.tau)},
                {"tau_prime", range_json(c.tau_prime)},
                {"delta_scan", range_json(c.delta_scan)},
                {"k_samples", range_json(c.k_samples)},
                {"branches", c.branches}}}};
    return c;
}

RunConfig parse_config(const std::string& path, const std::vector<std::string>& overrides) {
    json j = json::object();
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw ParseError("cannot open config file '" + path + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        const std::string text = ss.str();
        try {
            j = json::parse(text);
        } catch (const json::parse_error& e) {
            const size_t upto = std::min<size_t>(e.byte, text.size());
            const long line = 1 + std::count(text.begin(), text.begin() + upto, '\n');
            throw ParseError(path + ":" + std::to_string(line) + ": " + e.what());
        }
    }
    return parse_config_json(std::move(j), overrides);
}

}  // namespace gqed
