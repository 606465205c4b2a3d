#pragma once

#include <map>
#include <vector>

#include "gqed/model.hpp"
#include "gqed/numerics.hpp"
#include "gqed/scattering.hpp"

namespace gqed {

// Real-axis perturbative series for the one-photon vertex, independent of the contour solver.
// Every Cauchy factor 1/(X − q + i0) is split into −P/(q − X) − iπδ(q − X).

// ∫ f(q)/(X − q + i0) dq from node samples; X must be a node (or lie outside the grid).
cplx cauchy_integral(const std::vector<cplx>& f, double X, const MomentumGrid& grid);

struct BornSeries {
    MomentumGrid grid;
    double energy = 0.0;
    std::vector<std::vector<cplx>> orders;  // orders[n−1][i] = n-th order F̄(y_i)

    // partial sum through `order` (0: all computed orders) at node i
    cplx sum(int i, int order = 0) const;
};

// Terms of F̄(y; E) = Σ_n F̄_n(y) through max_order, E a grid node.
BornSeries born_f11(const ModelParams& p, double energy, const MomentumGrid& grid, int max_order);

// Lowest-order two-photon remainder F̄12(a, b); F̄11 inside the source enters at first order
// for the shifted energies and through `zero_energy` at E = 0. a, b, a + b nonzero nodes.
cplx born_f12(const ModelParams& p, double a, double b, const BornSeries& zero_energy);

// Stripped three-photon amplitude built from Born vertex functions (order for F̄11).
// Momenta must be grid nodes away from the cutoff.
class BornThreePhoton {
public:
    BornThreePhoton(const ModelParams& p, const MomentumGrid& grid, int order);
    cplx stripped(double a, double b, double c);
    ThreePhotonTerms terms(double a, double b, double c);

private:
    const BornSeries& series(double energy);
    ModelParams p_;
    MomentumGrid grid_;
    int order_;
    std::map<long, BornSeries> cache_;
};

}  // namespace gqed
