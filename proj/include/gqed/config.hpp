#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gqed/model.hpp"
#include "gqed/numerics.hpp"
#include "gqed/vertex.hpp"

namespace gqed {

struct Range {
    double start = 0.0;
    double stop = 0.0;
    int points = 0;  // 0: command default
    std::vector<double> values() const;
};

struct RunConfig {
    // model
    double gamma = 1.0;
    double R = 0.0;
    double k0R_over_pi = 0.0;  // reduced mod 2
    double delta = 0.0;
    double gamma1_fraction = 0.5;

    // numerics
    double k_max = 0.0;  // 0: 40 γ
    int n_points = 1601;
    double k_max_2d = 0.0;  // 0: 15 γ
    int energy_grid_points = 301;
    int f12_max_iter = 500;
    int refine = 8;  // M resampling for spectra and transforms
    double tol_f12 = 1e-6;
    double tol_power = 1e-3;
    double tol_pole = 1e-8;
    double tol_refinement = 1e-3;

    // run
    Mode mode = Mode::exact;
    std::string observable;
    std::string output_dir = "out";
    Range tau, tau_prime, delta_scan, k_samples;
    std::vector<int> branches{-1, 0, 1};

    nlohmann::json echo;  // effective config, as written to the sidecar

    ModelParams params() const;
    MomentumGrid grid() const;
    MomentumGrid grid_2d() const;
};

// Reads a JSON config (empty path: defaults only), applies `key.path=value` overrides,
// fills defaults and validates. Unknown keys are rejected.
RunConfig parse_config(const std::string& path, const std::vector<std::string>& overrides = {});
RunConfig parse_config_json(nlohmann::json j, const std::vector<std::string>& overrides = {});

}  // namespace gqed
