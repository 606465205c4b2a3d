#pragma once

#include <functional>
#include <vector>

#include "gqed/model.hpp"

namespace gqed {

// Uniform symmetric nodes, trapezoid weights with third-order Gregory end
// corrections.
struct MomentumGrid {
    double k_max = 40.0;
    int n_points = 1601;
    std::vector<double> nodes;
    std::vector<double> weights;

    MomentumGrid() = default;
    MomentumGrid(double k_max, int n_points);
    double spacing() const { return 2 * k_max / (n_points - 1); }
    int size() const { return n_points; }
    // index of node equal to x within 1e-9 h, or -1
    int node_index(double x) const;
};

// Quadrature line Im q = −delta carrying the grid's weights.
struct Contour {
    MomentumGrid grid;
    double delta = 0.0;
    std::vector<cplx> z;

    Contour() = default;
    Contour(const MomentumGrid& g, double delta);
    int size() const { return grid.n_points; }
    double weight(int j) const { return grid.weights[j]; }
};

// Default contour depth: three grid spacings.
double default_contour_depth(const MomentumGrid& g);

// Kernel 1/(ε − k′ − k) split into its pole and regular part.
struct PVKernelSample {
    double pole_location = 0.0;
    std::vector<cplx> regular_part;
};

// P∫ f(k)/(k − pole) dk from node samples.
cplx pv_integrate(const std::vector<cplx>& f, double pole, const MomentumGrid& grid);
// Same, with f evaluable anywhere (exact f(pole)).
cplx pv_integrate(const std::function<cplx(double)>& f, double pole, const MomentumGrid& grid);

// c·e^{iκk}/(k − p)^order, Im p ≠ 0, order ∈ {1, 2}.
struct TailTerm {
    cplx c;
    double kappa = 0.0;
    cplx p;
    int order = 1;
};

struct TailSpec {
    std::vector<TailTerm> terms;
    cplx operator()(double k) const;
    // ∫_ℝ e^{ikt} tail(k) dk
    cplx transform(double t) const;
    bool empty() const { return terms.empty(); }
};

// Least-squares tail e^{iκk}[a/(k²+w²) + b·k/(k²+w²)²] over κ ∈ kappas,
// fitted on |k| ∈ [k_max/2, k_max].
TailSpec fit_tail(const std::vector<cplx>& f, const MomentumGrid& grid,
                  std::vector<double> kappas, double w);

// Single-pole tail c/(k − p).
TailSpec pole_tail(cplx c, cplx p);

cplx fourier_oscillatory(const std::vector<cplx>& f, double t, const MomentumGrid& grid,
                         const TailSpec& tail = {});

// f(k, q) stored row-major as f[ik * n + iq]; ∫∫ e^{iqt2} e^{ikt1} f(k,q).
// The inner (k) transform uses inner_tails[iq] when supplied.
cplx fourier_2d(const std::vector<cplx>& f, double t2, double t1, const MomentumGrid& grid,
                const std::vector<TailSpec>* inner_tails = nullptr);

cplx lambert_w(cplx z, int branch);

double default_dq_threshold(cplx a, cplx b, double scale);

cplx safe_difference_quotient(const std::function<cplx(cplx)>& f,
                              const std::function<cplx(cplx)>& df, cplx a, cplx b,
                              double threshold);

}  // namespace gqed
