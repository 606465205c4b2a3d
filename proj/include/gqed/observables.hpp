#pragma once

#include <array>
#include <string>
#include <vector>

#include "gqed/model.hpp"
#include "gqed/numerics.hpp"
#include "gqed/scattering.hpp"
#include "gqed/vertex.hpp"

namespace gqed {

// Spectra per unit Φ² (inelastic) and the Φ, Φ² coefficients of the elastic δ(k) weight.
struct SpectrumResult {
    std::vector<double> k;
    std::array<std::vector<double>, 2> s_inel;  // per channel μ
    std::array<double, 2> s_el_linear{};        // |S_μ1(0)|²
    std::array<double, 2> s_el_quadratic{};     // 16π² Σ_μ′ Im{M(0)(S S)*}
    double inelastic_total = 0.0;               // Σ_μ ∫ s_inel
    double power_residual = 0.0;                // Σ_μ s_el_quadratic + inelastic_total
    double relative_residual() const;

    std::vector<double> total() const;  // Σ_μ s_inel
};

// Values on the vertex grid; the power integral resamples M `refine` times more densely.
// tolerance > 0 throws ConservationViolation above that relative residual.
SpectrumResult spectral_density(const ModelParams& p, const VertexTable& f11,
                                double tolerance = 1e-3, int refine = 16);

struct Peak {
    double k;
    double height;
    double fwhm;
};
// Local maxima of a sampled curve sorted by height (largest first).
std::vector<Peak> find_peaks(const std::vector<double>& x, const std::vector<double>& y);

struct KinkOptions {
    double factor = 5.0;          // gap threshold relative to the background median
    double exclusion = 0.0;       // half-width of excluded neighbourhoods around nR; 0: 3 samples
    double period = 0.0;          // R; 0 disables exclusion
};
// Locations where the one-sided derivative gap exceeds factor × the larger of the global
// and local median gap.
std::vector<double> detect_kinks(const std::vector<double>& t, const std::vector<double>& y,
                                 const KinkOptions& opt);

struct CoherenceResult {
    std::vector<double> tau;
    std::vector<double> tau_prime;  // third order only
    std::string mode;
    // second order: by pair_index(μ′, μ); third order: by triple_index(μ″, μ′, μ),
    // row-major [i′ * n + i] over (τ′, τ)
    std::vector<std::vector<double>> values;
    std::vector<int> channels;  // which indices are filled
    std::vector<std::vector<double>> kink_report;
};

// Tail of M used for the Fourier transform: e^{iκk}[a/(k²+w²) + b k/(k²+w²)²], κ ∈ {0, ±R, ±2R}.
TailSpec m_tail(const ModelParams& p, const std::vector<cplx>& m, const MomentumGrid& grid);

// ∫dk e^{ikτ} M_{μ′μ}(k) with tail subtraction.
std::vector<cplx> fourier_m(const ModelParams& p, const TwoPhotonAmplitude& m, int mup, int mu,
                            const std::vector<double>& taus);

CoherenceResult coherence2(const ModelParams& p, const TwoPhotonAmplitude& m,
                           const std::vector<double>& taus);

struct StateOracleOptions {
    std::vector<double> pulse_lengths{};  // empty: {100, 200, 400}·max(R, 1/γ)
    double k_extent = 8.0;                // M integrated over ±k_extent·k_max
    double spacing = 0.0;                 // 0: k_max / 4000
};

// C² from the finite-pulse two-photon state, extrapolated in 1/L.
CoherenceResult oracle_c2_from_state(const ModelParams& p, const VertexTable& f11,
                                     const std::vector<double>& taus,
                                     const StateOracleOptions& opt = {});

struct Coherence3Options {
    // I² uses the amplitude times W(a)W(b)W(c), W = 1 for |x| ≤ taper_start·k_max, 0 beyond
    // the last three nodes
    double taper_start = 0.6;
    int workers = 1;
};

// ∫∫ e^{iq t2} e^{ik t1} W Q(−k−q, k, q) for channel triple (μ, μ′, μ″) of momenta (−k−q, k, q),
// on all (t2, t1) pairs; row-major [i2 * n1 + i1].
std::vector<cplx> fourier_q(const ThreePhotonAmplitude& q, int m1, int m2, int m3,
                            const std::vector<double>& t2, const std::vector<double>& t1,
                            const Coherence3Options& opt = {});

// C³_{μ″μ′μ}(τ′, τ) on a tensor grid for the requested channel triples (μ″, μ′, μ); empty
// requests all eight.
CoherenceResult coherence3(const ModelParams& p, const ThreePhotonAmplitude& q,
                           const TwoPhotonAmplitude& m, const std::vector<double>& tau,
                           const std::vector<double>& tau_prime,
                           std::vector<std::array<int, 3>> triples = {},
                           const Coherence3Options& opt = {});

// Kinks of a 2D map across lines τ′ − τ = const, returned as the set of offsets
// where at least `fraction` of the crossing cuts agree.
std::vector<double> detect_ridges(const std::vector<double>& tau, const std::vector<double>& tau_prime,
                                  const std::vector<double>& values, double period,
                                  double fraction = 0.3);

struct PoleResult {
    int branch;
    int family;  // −1: zero of G⁻¹(k); +1: zero of G⁻¹(−k)
    cplx pole;
    double residual;
};

std::vector<PoleResult> lambert_poles(const ModelParams& p, const std::vector<int>& branches,
                                      double tolerance = 1e-8);

struct DetuningScan {
    std::vector<double> delta;
    std::vector<double> k;
    std::vector<std::vector<double>> s_inel;  // per Δ, total over channels, sampled at k
    std::vector<double> power_residual;
    double asymmetry = 0.0;  // max |s(Δ,k) − s(−Δ,−k)| / max s over mirrored pairs
};

DetuningScan detuning_scan(const ModelParams& base, const std::vector<double>& deltas,
                           const MomentumGrid& grid, const std::vector<double>& k_samples,
                           Mode mode = Mode::exact, int workers = 1);

}  // namespace gqed
