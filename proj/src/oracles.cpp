#include "gqed/oracles.hpp"

#include <cmath>
#include <functional>

#include "gqed/errors.hpp"

namespace gqed {

cplx cauchy_integral(const std::vector<cplx>& f, double X, const MomentumGrid& g) {
    const double h = g.spacing();
    const int idx = g.node_index(X);
    if (std::abs(X) < g.k_max - 2 * h - 1e-9 * h) {
        if (idx < 0) throw ValidationError("Cauchy pole must sit on a grid node");
        return -pv_integrate(f, X, g) - I * pi * f[idx];
    }
    // pole at the edge or beyond: the truncated integrand has no interior singularity
    cplx s = 0.0;
    for (int j = 0; j < g.size(); ++j)
        if (j != idx) s += g.weights[j] * f[j] / (X - g.nodes[j]);
    return s;
}

cplx BornSeries::sum(int i, int order) const {
    const int top = order > 0 ? std::min<int>(order, orders.size()) : int(orders.size());
    cplx s = 0.0;
    for (int n = 0; n < top; ++n) s += orders[n][i];
    return s;
}

namespace {

// ∫ φ(q)/(X − q + i0) with φ available off the nodes (exact value and slope at the pole)
cplx cauchy_integral(const std::function<cplx(double)>& phi, double X, const MomentumGrid& g) {
    if (std::abs(X) < g.k_max - 2 * g.spacing())
        return -pv_integrate(phi, X, g) - I * pi * phi(X);
    cplx s = 0.0;
    for (int j = 0; j < g.size(); ++j)
        if (std::abs(g.nodes[j] - X) > 1e-9 * g.spacing())
            s += g.weights[j] * phi(g.nodes[j]) / (X - g.nodes[j]);
    return s;
}

// φ(q) = ρ(q) G(E − q), tabulated on the nodes and evaluated directly elsewhere
std::function<cplx(double)> source(const EffectiveModel& m, double E, const MomentumGrid& g,
                                   std::vector<cplx>& table) {
    table.resize(g.size());
    for (int j = 0; j < g.size(); ++j) table[j] = m.rho(g.nodes[j]) * m.G(E - g.nodes[j]);
    const double h = g.spacing();
    return [&m, &g, &table, E, h](double q) {
        const double u = (q + g.k_max) / h;
        const long j = std::lround(u);
        if (j >= 0 && j < g.size() && std::abs(u - j) < 1e-9) return table[j];
        return m.rho(q) * m.G(E - q);
    };
}

// (C(E − y) − C(E))/y at every node, C(X) = ∫ φ/(X − q + i0); y = 0 by interpolation
std::vector<cplx> first_order(const std::function<cplx(double)>& phi, double E,
                              const MomentumGrid& g) {
    const int n = g.size();
    const cplx cE = cauchy_integral(phi, E, g);
    std::vector<cplx> out(n);
    int zero = -1;
    for (int i = 0; i < n; ++i) {
        const double y = g.nodes[i];
        if (std::abs(y) < 1e-9 * g.spacing()) {
            zero = i;
            continue;
        }
        out[i] = (cauchy_integral(phi, E - y, g) - cE) / y;
    }
    if (zero >= 2 && zero + 2 < n)
        out[zero] = (-out[zero - 2] + 4.0 * out[zero - 1] + 4.0 * out[zero + 1] - out[zero + 2]) / 6.0;
    return out;
}

cplx first_order_at(const EffectiveModel& m, double x, double E, const MomentumGrid& g,
                    std::vector<cplx>& table) {
    const auto phi = source(m, E, g, table);
    return (cauchy_integral(phi, E - x, g) - cauchy_integral(phi, E, g)) / x;
}

// c_i = Π_{j≠i} 1/(X_j − X_i)
std::vector<cplx> partial_fractions(const std::vector<double>& X) {
    std::vector<cplx> c(X.size(), 1.0);
    for (size_t i = 0; i < X.size(); ++i)
        for (size_t j = 0; j < X.size(); ++j)
            if (j != i) c[i] /= (X[j] - X[i]);
    return c;
}

}  // namespace

BornSeries born_f11(const ModelParams& p, double energy, const MomentumGrid& grid, int max_order) {
    if (max_order < 1) throw ValidationError("Born series needs at least one order");
    const EffectiveModel m = effective_model(p, Mode::exact);
    const int n = grid.size();
    BornSeries s;
    s.grid = grid;
    s.energy = energy;
    std::vector<cplx> phi;
    s.orders.push_back(first_order(source(m, energy, grid, phi), energy, grid));
    for (int order = 2; order <= max_order; ++order) {
        const auto& prev = s.orders.back();
        std::vector<cplx> f(n), next(n);
        for (int j = 0; j < n; ++j) f[j] = phi[j] * prev[j];
        for (int i = 0; i < n; ++i) next[i] = cauchy_integral(f, energy - grid.nodes[i], grid);
        s.orders.push_back(std::move(next));
    }
    return s;
}

cplx born_f12(const ModelParams& p, double a, double b, const BornSeries& zero_energy) {
    const MomentumGrid& g = zero_energy.grid;
    if (a == 0.0 || b == 0.0 || a + b == 0.0)
        throw ValidationError("Born F12 needs distinct Cauchy poles");
    const EffectiveModel m = effective_model(p, Mode::exact);
    const int n = g.size();
    std::vector<cplx> f(n), f0(n), fb(n), fbb(n), phi(n);
    for (int j = 0; j < n; ++j) {
        const double q = g.nodes[j];
        const cplx base = m.rho(q) * m.G(-q - b) * m.G(-q);
        const cplx F0 = zero_energy.sum(j);
        const cplx Fb = first_order_at(m, b, -q, g, phi);
        f[j] = base;
        f0[j] = base * F0;
        fb[j] = base * Fb;
        fbb[j] = base * Fb * F0;
    }
    const double X1 = -a - b, X2 = -b, X3 = 0.0;
    cplx total = 0.0;
    auto add = [&](const std::vector<cplx>& v, const std::vector<double>& X) {
        const auto c = partial_fractions(X);
        for (size_t i = 0; i < X.size(); ++i) total += c[i] * cauchy_integral(v, X[i], g);
    };
    add(f, {X1, X2, X3});
    add(f0, {X1, X2});
    add(fb, {X1, X3});
    add(fbb, {X1});
    return total;
}

BornThreePhoton::BornThreePhoton(const ModelParams& p, const MomentumGrid& grid, int order)
    : p_(p), grid_(grid), order_(order) {}

const BornSeries& BornThreePhoton::series(double energy) {
    const long key = std::lround(energy / grid_.spacing());
    auto it = cache_.find(key);
    if (it == cache_.end()) it = cache_.emplace(key, born_f11(p_, energy, grid_, order_)).first;
    return it->second;
}

ThreePhotonTerms BornThreePhoton::terms(double a, double b, double c) {
    const double h = grid_.spacing();
    auto node = [&](double x) {
        const int i = grid_.node_index(x);
        if (i < 0) throw ValidationError("Born oracle evaluates on grid nodes only");
        return i;
    };
    VertexInputs v;
    v.f11 = [&](double x, double E) { return series(E).sum(node(x)); };
    v.f11_de = [&](double x, double E) {
        return (series(E + h).sum(node(x)) - series(E - h).sum(node(x))) / (2 * h);
    };
    v.f12 = [&](double x, double y) { return born_f12(p_, x, y, series(0.0)); };
    return three_photon_terms(effective_model(p_, Mode::exact), v, a, b, c);
}

cplx BornThreePhoton::stripped(double a, double b, double c) { return terms(a, b, c).total(); }

}  // namespace gqed
