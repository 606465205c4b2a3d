#pragma once

#include <complex>

namespace gqed {

using cplx = std::complex<double>;
inline constexpr double pi = 3.14159265358979323846;
inline constexpr cplx I{0.0, 1.0};

struct ModelParams {
    double gamma = 1.0;          // Γ1 + Γ2
    double R = 0.0;              // leg separation, v = 1
    double carrier_phase = 0.0;  // k0 R mod 2π
    double detuning = 0.0;       // Δ = ω0 − Ω
    double gamma1_fraction = 0.5;
    static constexpr int num_channels = 2;

    double gamma1() const { return gamma1_fraction * gamma; }
    double gamma2() const { return (1.0 - gamma1_fraction) * gamma; }
    void validate() const;
};

// Builds params with the phase reduced to [0, 2π).
ModelParams make_params(double gamma, double R, double k0R, double delta = 0.0,
                        double gamma1_fraction = 0.5);

// ε with an explicit retarded regulator; eta = 0 means exact boundary value.
struct ComplexEnergy {
    cplx value;
    double eta = 0.0;
    ComplexEnergy(cplx v, double e = 0.0) : value(v), eta(e) {}
    ComplexEnergy(double v) : value(v) {}
    cplx regulated() const { return value + I * eta; }
};

inline int chirality(int mu) { return mu == 1 ? 1 : -1; }

// g_μ(k), analytic in k.
cplx coupling(const ModelParams& p, int mu, cplx k);
// conj(g_μ(conj k)): the analytic continuation of g_μ(k)* off the real axis.
cplx coupling_bar(const ModelParams& p, int mu, cplx k);
// ρ(q) = Σ_μ |g_μ(q)|², continued analytically.
cplx spectral_weight(const ModelParams& p, cplx q);

// e^{i(ε+k0)R}
cplx feedback_phase(const ModelParams& p, cplx eps);

cplx self_energy(const ModelParams& p, const ComplexEnergy& eps);

struct NumericSelfEnergy {
    cplx value;
    double error_estimate;
};
// Σ_μ ∫dq |g_μ(q)|²/(ε − q + iη) by direct quadrature with Richardson
// extrapolation η → 0; independent of the closed form.
NumericSelfEnergy self_energy_numeric(const ModelParams& p, cplx eps, double tol = 1e-9);

cplx inverse_green(const ModelParams& p, cplx eps);
cplx inverse_green_derivative(const ModelParams& p, cplx eps);
cplx dressed_green(const ModelParams& p, const ComplexEnergy& eps, double floor = 1e-14);
// Same without the proximity check; used inside kernels off the real axis.
inline cplx dressed_green_raw(const ModelParams& p, cplx eps) {
    return 1.0 / inverse_green(p, eps);
}

// Propagator and coupling set used by the solvers. With delay_free set, the
// feedback phase is frozen at the carrier (Markov limit of the same model):
// g_μ(k) → g_μ(0), Σ(ε) → Σ(0).
struct EffectiveModel {
    ModelParams p;
    bool delay_free = false;

    cplx g(int mu, cplx k) const { return coupling(p, mu, delay_free ? cplx(0.0) : k); }
    cplx gbar(int mu, cplx k) const { return coupling_bar(p, mu, delay_free ? cplx(0.0) : k); }
    cplx rho(cplx q) const { return spectral_weight(p, delay_free ? cplx(0.0) : q); }
    cplx Gi(cplx x) const {
        return delay_free ? x + p.detuning - self_energy(p, ComplexEnergy(0.0)) : inverse_green(p, x);
    }
    cplx dGi(cplx x) const { return delay_free ? cplx(1.0) : inverse_green_derivative(p, x); }
    cplx G(cplx x) const { return 1.0 / Gi(x); }
};

}  // namespace gqed
