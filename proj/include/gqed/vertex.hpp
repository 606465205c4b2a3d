#pragma once

#include <memory>
#include <string>
#include <vector>

#include "gqed/model.hpp"
#include "gqed/numerics.hpp"

namespace gqed {

enum class Mode { exact, weak_correlation, quasi_markovian, markovian };

std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);

// Model view selected by a mode (markovian freezes the delay).
EffectiveModel effective_model(const ModelParams& p, Mode m);

struct VertexOptions {
    double contour_depth = 0.0;  // 0: three grid spacings
    bool check_refinement = false;
    double refinement_tol = 1e-3;
};

// F̄(k′, 0; E) for one energy. Internal integrals run along Im q = −δ, which the
// retarded analytic structure of every factor permits; F̄ is reconstructed at
// any k′ with Im k′ ≤ 0 from the Nyström density.
class F11Solution {
public:
    F11Solution() = default;
    F11Solution(std::shared_ptr<const Contour> c, cplx energy, std::vector<cplx> on_contour,
                std::vector<cplx> density, std::vector<cplx> density_de = {})
        : contour_(std::move(c)), energy_(energy), u_(std::move(on_contour)),
          d_(std::move(density)), dd_(std::move(density_de)) {}

    cplx energy() const { return energy_; }
    // regular part F̄(k′)
    cplx regular(cplx kp) const;
    // ∂F̄/∂E at fixed k′; needs the energy derivative of the density
    cplx regular_de(cplx kp) const;
    bool has_derivative() const { return !dd_.empty() || d_.empty(); }
    // G0(E − k′) + F̄(k′); requires Im(E − k′) > 0
    cplx full(cplx kp) const { return 1.0 / (energy_ - kp) + regular(kp); }
    const std::vector<cplx>& on_contour() const { return u_; }
    const std::vector<cplx>& density() const { return d_; }
    const std::vector<cplx>& density_de() const { return dd_; }
    bool trivial() const { return d_.empty(); }

private:
    std::shared_ptr<const Contour> contour_;
    cplx energy_ = 0.0;
    std::vector<cplx> u_;
    std::vector<cplx> d_;
    std::vector<cplx> dd_;
};

struct VertexTable {
    MomentumGrid grid;
    double energy = 0.0;
    Mode mode = Mode::exact;
    std::vector<cplx> values;     // F̄(k′_i, 0; ε) at real nodes
    PVKernelSample free_term;     // P(1/(ε − k′)) = −1/(k′ − pole)
    F11Solution solution;
    double rcond = 1.0;

    // P(1/(ε − k′)) + F̄(k′) at any real k′ ≠ ε
    cplx connected(double kp) const;
    cplx regular(double kp) const { return solution.trivial() ? cplx(0.0) : solution.regular(kp); }
};

// Direct dense solve at energy E (real or Im E > 0).
F11Solution solve_f11_contour(const EffectiveModel& m, std::shared_ptr<const Contour> c, cplx E,
                              bool with_derivative = false);

VertexTable solve_f11(const ModelParams& p, double eps, const MomentumGrid& grid, Mode mode,
                      const VertexOptions& opt = {});

struct EnergyFamilyTable {
    std::vector<double> energy_grid;
    double column = 0.0;
    int interpolation_order = 3;
    Mode mode = Mode::exact;
    std::shared_ptr<const Contour> contour;
    std::vector<F11Solution> solutions;

    // F̄(k′, 0; E) for real k′, E (cubic Hermite in E between nodes)
    cplx value(double kp, double E) const;
    cplx d_energy(double kp, double E) const;
    int node_index(double E) const;
};

EnergyFamilyTable solve_f11_family(const ModelParams& p, const std::vector<double>& energy_grid,
                                   const MomentumGrid& grid, Mode mode,
                                   const VertexOptions& opt = {}, int workers = 1);

// Lattice of energies m·h covering [−2k_max, 2k_max].
std::vector<double> doubled_lattice(const MomentumGrid& grid);

struct TwoPhotonVertexSlice {
    MomentumGrid grid;
    std::vector<cplx> values;  // F̄12(k1′_i, k2′_j) at real nodes, row-major
    std::vector<double> iteration_report;
    bool exchange = true;

    // F̄12(b, c) = F12 − F11(b,0;−c) G(−c) F11(c,0;0) at real (b, c);
    // c off the doubled lattice triggers one extra dense solve
    cplx remainder(double b, double c) const;
    int lattice_index(double c) const;

    EffectiveModel model;
    std::shared_ptr<const Contour> contour;
    std::vector<double> lattice;
    std::vector<std::vector<cplx>> real_density;  // per lattice c
    std::vector<F11Solution> shifted_family;      // E = −z_q
    F11Solution zero_energy;
    std::vector<cplx> column_density;             // Dc[b*n + q]

    std::vector<cplx> density_for(double c) const;
    // F̄12 with first argument real, second on the contour
    cplx mixed(double r, int b) const;
};

struct F12Options {
    int max_iter = 500;
    double tol = 1e-6;
    bool exchange = true;
    int restart = 40;
};

TwoPhotonVertexSlice solve_f12_slice(const ModelParams& p, const MomentumGrid& grid,
                                     const EnergyFamilyTable& f11_family,
                                     const F12Options& opt = {}, int workers = 1);

}  // namespace gqed
