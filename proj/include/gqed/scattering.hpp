#pragma once

#include <array>
#include <functional>
#include <vector>

#include "gqed/model.hpp"
#include "gqed/numerics.hpp"
#include "gqed/vertex.hpp"

namespace gqed {

// S[μ′−1][μ−1]
using ChannelMatrix = std::array<std::array<cplx, 2>, 2>;

ChannelMatrix single_photon_s(const ModelParams& p, double k);
// Same for the propagator and couplings of a mode (markovian freezes the delay).
ChannelMatrix single_photon_s(const EffectiveModel& m, double k);

// Channel-pair index of (μ′, μ): 2(μ′−1) + (μ−1).
inline int pair_index(int mup, int mu) { return 2 * (mup - 1) + (mu - 1); }
// Channel-triple index of (μ1, μ2, μ3).
inline int triple_index(int m1, int m2, int m3) { return 4 * (m1 - 1) + 2 * (m2 - 1) + (m3 - 1); }

// T^(2,C) for outgoing (μ k, μ′ −k), incoming pair in channel 1 at the carrier.
// Undefined at k = 0, where the principal-value part has its pole.
cplx two_photon_connected_t(const ModelParams& p, const VertexTable& f11, double k, int mu,
                            int mup);

// Coupling-stripped symmetric amplitude m(k): M_{μ′μ}(k) = g_μ′(k) g_μ(−k) g₁*(0)² m(k).
// Finite at k = 0.
cplx two_photon_stripped(const ModelParams& p, const VertexTable& f11, double k);

struct TwoPhotonAmplitude {
    MomentumGrid grid;
    Mode mode = Mode::exact;
    std::array<std::vector<cplx>, 4> m_values;  // by pair_index(μ′, μ)

    const std::vector<cplx>& operator()(int mup, int mu) const { return m_values[pair_index(mup, mu)]; }
};

// Symmetrizes tables t[pair_index(μ, μ′)][i] = T^(2,C)(μ k_i, μ′ −k_i).
TwoPhotonAmplitude symmetrize_m(const std::array<std::vector<cplx>, 4>& t2c,
                                const MomentumGrid& grid);

// M on the vertex grid, or on a grid `refine` times denser (off-node F̄ from the contour
// density). Assembled from the stripped amplitude, so regular at k = 0.
TwoPhotonAmplitude two_photon_amplitude(const ModelParams& p, const VertexTable& f11,
                                        int refine = 1);

// Outgoing momenta (k1′, k2′, k3′) = (−k−q, k, q); incoming three photons in
// channel 1 at the carrier. The returned array is indexed by triple_index.
std::array<cplx, 8> three_photon_connected_t(const ModelParams& p,
                                             const EnergyFamilyTable& f11_family,
                                             const TwoPhotonVertexSlice* f12, double k, double q,
                                             Mode mode);

// Stripped T^(3,C) (couplings removed) at outgoing (a, b, c), a + b + c = 0.
cplx three_photon_stripped(const ModelParams& p, const EnergyFamilyTable& f11_family,
                           const TwoPhotonVertexSlice* f12, double a, double b, double c, Mode mode);

// Per-term breakdown of the stripped amplitude, for diagnostics and oracles.
struct ThreePhotonTerms {
    cplx double_quotient;  // first line, two inverse-propagator quotients
    cplx bracket;          // 1/(k1′ − k1) bracket
    cplx vertex_product;   // F̄11 · G · F̄11
    cplx remainder;        // F̄12 term
    cplx total() const { return double_quotient + bracket + vertex_product + remainder; }
};

// Callbacks supplying the vertex functions used by the stripped amplitude.
struct VertexInputs {
    // F̄11(x, 0; E) and its E derivative
    std::function<cplx(double x, double E)> f11;
    std::function<cplx(double x, double E)> f11_de;
    // F̄12(b, c)
    std::function<cplx(double b, double c)> f12;
};

ThreePhotonTerms three_photon_terms(const EffectiveModel& m, const VertexInputs& v, double a,
                                    double b, double c);

struct ThreePhotonAmplitude {
    MomentumGrid grid;
    Mode mode = Mode::exact;
    // Q(−k−q, k, q) for outgoing channel triple, row-major [ik * n + iq]
    std::array<std::vector<cplx>, 8> q_values;
    // stripped symmetric amplitude on the same grid
    std::vector<cplx> stripped;

    const std::vector<cplx>& operator()(int m1, int m2, int m3) const {
        return q_values[triple_index(m1, m2, m3)];
    }
};

// Six-permutation average of a stripped evaluator f(a, b, c) over the grid.
std::vector<cplx> symmetrize_q(const std::function<cplx(double, double, double)>& t3c,
                               const MomentumGrid& grid, int workers = 1);

ThreePhotonAmplitude three_photon_amplitude(const ModelParams& p,
                                            const EnergyFamilyTable& f11_family,
                                            const TwoPhotonVertexSlice* f12, Mode mode,
                                            int workers = 1);

}  // namespace gqed
