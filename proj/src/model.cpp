#include "gqed/model.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <vector>

#include "gqed/errors.hpp"

namespace gqed {

void ModelParams::validate() const {
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ValidationError("gamma must be >= 0");
    if (!(R >= 0.0) || !std::isfinite(R)) throw ValidationError("R must be >= 0");
    if (!(carrier_phase >= 0.0 && carrier_phase < 2 * pi))
        throw ValidationError("carrier_phase must lie in [0, 2pi)");
    if (!std::isfinite(detuning)) throw ValidationError("detuning must be finite");
    if (!(gamma1_fraction >= 0.0 && gamma1_fraction <= 1.0))
        throw ValidationError("gamma1_fraction must lie in [0, 1]");
}

ModelParams make_params(double gamma, double R, double k0R, double delta,
                        double gamma1_fraction) {
    ModelParams p;
    p.gamma = gamma;
    p.R = R;
    double ph = std::fmod(k0R, 2 * pi);
    if (ph < 0) ph += 2 * pi;
    if (ph >= 2 * pi) ph = 0.0;
    p.carrier_phase = ph;
    p.detuning = delta;
    p.gamma1_fraction = gamma1_fraction;
    return p;
}

cplx coupling(const ModelParams& p, int mu, cplx k) {
    const double c = chirality(mu);
    const cplx half = 0.5 * (k * p.R + p.carrier_phase);
    return std::sqrt(p.gamma1() / (2 * pi)) * std::exp(-I * c * half) +
           std::sqrt(p.gamma2() / (2 * pi)) * std::exp(I * c * half);
}

cplx coupling_bar(const ModelParams& p, int mu, cplx k) {
    return std::conj(coupling(p, mu, std::conj(k)));
}

cplx spectral_weight(const ModelParams& p, cplx q) {
    cplx s = 0.0;
    for (int mu = 1; mu <= ModelParams::num_channels; ++mu)
        s += coupling(p, mu, q) * coupling_bar(p, mu, q);
    return s;
}

cplx feedback_phase(const ModelParams& p, cplx eps) {
    return std::exp(I * (eps * p.R + p.carrier_phase));
}

cplx self_energy(const ModelParams& p, const ComplexEnergy& eps) {
    const cplx z = eps.regulated();
    const double g1 = p.gamma1(), g2 = p.gamma2();
    return -I * (g1 + g2) - 2.0 * I * std::sqrt(g1 * g2) * feedback_phase(p, z);
}

cplx inverse_green(const ModelParams& p, cplx eps) {
    return eps + p.detuning - self_energy(p, ComplexEnergy(eps));
}

cplx inverse_green_derivative(const ModelParams& p, cplx eps) {
    const double g1 = p.gamma1(), g2 = p.gamma2();
    return 1.0 - 2.0 * p.R * std::sqrt(g1 * g2) * feedback_phase(p, eps);
}

cplx dressed_green(const ModelParams& p, const ComplexEnergy& eps, double floor) {
    const cplx d = inverse_green(p, eps.regulated());
    if (std::abs(d) < floor) throw PoleProximity("dressed propagator evaluated at a resonance");
    return 1.0 / d;
}

namespace {

// C-infinity step: 1 on [0,1], 0 beyond 2.
double taper(double u) {
    if (u <= 1.0) return 1.0;
    if (u >= 2.0) return 0.0;
    auto psi = [](double x) { return x > 0 ? std::exp(-1.0 / x) : 0.0; };
    const double a = psi(2.0 - u), b = psi(u - 1.0);
    return a / (a + b);
}

// ∫_ℝ ρ(q) χ(|q−x0|/K)/(z − q) dq for Im z > 0, folded about x0 = Re z.
cplx tapered_cauchy(const ModelParams& p, cplx z, double K, double period) {
    using GL = boost::math::quadrature::gauss<double, 20>;
    const double x0 = z.real();
    const cplx w = z - x0;
    auto h = [&](double s) {
        const cplx a = spectral_weight(p, x0 + s) / (w - s);
        const cplx b = spectral_weight(p, x0 - s) / (w + s);
        return (a + b) * taper(s / K);
    };
    // panel edges: geometric refinement around the near-pole peak, then uniform
    std::vector<double> edges{0.0};
    double y = std::max(std::abs(w), 1e-12);
    double e = y / 8;
    while (e < 1.0) {
        edges.push_back(e);
        e *= 2;
    }
    double s = edges.back();
    while (s < 2 * K) {
        const double width = std::min(period / 4, std::max(0.5, 0.25 * s));
        s = std::min(2 * K, s + width);
        edges.push_back(s);
    }
    cplx total = 0.0;
    for (size_t i = 0; i + 1 < edges.size(); ++i) total += GL::integrate(h, edges[i], edges[i + 1]);
    return total;
}

cplx cauchy_extrapolated(const ModelParams& p, cplx z, double K, double period, double* err) {
    const cplx i1 = tapered_cauchy(p, z, K, period);
    const cplx i2 = tapered_cauchy(p, z, 2 * K, period);
    const cplx i4 = tapered_cauchy(p, z, 4 * K, period);
    // error ~ c1/K + c3/K³
    const cplx r12 = 2.0 * i2 - i1, r24 = 2.0 * i4 - i2;
    const cplx best = (8.0 * r24 - r12) / 7.0;
    if (err) *err = std::abs(best - r24);
    return best;
}

}  // namespace

NumericSelfEnergy self_energy_numeric(const ModelParams& p, cplx eps, double tol) {
    if (eps.imag() < 0) throw ValidationError("numeric self-energy requires Im(eps) >= 0");
    const double period = p.R > 0 ? 2 * pi / p.R : 1e300;
    const double K = std::max(50.0, p.R > 0 ? 300.0 / p.R : 50.0);
    const double eta0 = std::min(0.4, 0.15 / std::max(p.R, 0.375));
    if (eps.imag() >= eta0) {
        double err = 0;
        cplx v = cauchy_extrapolated(p, eps, K, period, &err);
        return {v, err};
    }
    constexpr int levels = 5;
    std::vector<double> eta(levels);
    std::vector<cplx> val(levels);
    double kerr = 0;
    for (int j = 0; j < levels; ++j) {
        eta[j] = eta0 / (1 << j);
        double e = 0;
        val[j] = cauchy_extrapolated(p, eps + I * eta[j], K, period, &e);
        kerr = std::max(kerr, e);
    }
    // Neville tableau at η = 0
    std::vector<cplx> t = val;
    cplx prev = t[levels - 1];
    for (int m = 1; m < levels; ++m) {
        for (int j = 0; j + m < levels; ++j)
            t[j] = (eta[j + m] * t[j] - eta[j] * t[j + 1]) / (eta[j + m] - eta[j]);
        if (m == levels - 2) prev = t[0];
    }
    const double err = std::abs(t[0] - prev) + kerr;
    if (err > std::max(tol, 1e-7 * std::abs(t[0])) * 1e3)
        throw NoConvergence("numeric self-energy: extrapolation disagrees across refinements");
    return {t[0], err};
}

}  // namespace gqed
