#include "gqed/scattering.hpp"

#include <cmath>

#include "gqed/errors.hpp"
#include "gqed/parallel.hpp"

namespace gqed {

ChannelMatrix single_photon_s(const EffectiveModel& m, double k) {
    ChannelMatrix s{};
    const cplx G = m.G(k);
    for (int mup = 1; mup <= 2; ++mup)
        for (int mu = 1; mu <= 2; ++mu)
            s[mup - 1][mu - 1] =
                (mup == mu ? 1.0 : 0.0) - 2 * pi * I * m.gbar(mu, k) * m.g(mup, k) * G;
    return s;
}

ChannelMatrix single_photon_s(const ModelParams& p, double k) {
    return single_photon_s(EffectiveModel{p, false}, k);
}

namespace {

cplx dG(const EffectiveModel& m, cplx x) {
    const cplx G = m.G(x);
    return -m.dGi(x) * G * G;
}

double dq_scale(const EffectiveModel& m) { return std::max(m.p.gamma, 1e-3); }

cplx dq_green(const EffectiveModel& m, double x, double y) {
    return safe_difference_quotient([&](cplx t) { return m.G(t); }, [&](cplx t) { return dG(m, t); },
                                    x, y, default_dq_threshold(x, y, dq_scale(m)));
}

cplx dq_inverse(const EffectiveModel& m, double x, double y) {
    return safe_difference_quotient([&](cplx t) { return m.Gi(t); },
                                    [&](cplx t) { return m.dGi(t); }, x, y,
                                    default_dq_threshold(x, y, dq_scale(m)));
}

// d/dz of (e^z − 1)/z, stable near 0
cplx phi1_prime(cplx z) {
    if (std::abs(z) > 0.25) return (z * std::exp(z) - std::exp(z) + 1.0) / (z * z);
    // Σ_{n≥2} (n−1) z^{n−2} / n!
    cplx sum = 0.0, zp = 1.0;
    double fact = 2.0;
    for (int n = 2; n < 22; ++n) {
        sum += double(n - 1) * zp / fact;
        zp *= z;
        fact *= n + 1;
    }
    return sum;
}

// d/ds of (Gi(s) − Gi(0))/s.
cplx d_quotient_inverse(const EffectiveModel& m, double s) {
    if (m.delay_free || m.p.R == 0.0) return 0.0;
    const double g1 = m.p.gamma1(), g2 = m.p.gamma2();
    const cplx beta = 2.0 * I * std::sqrt(g1 * g2) * std::exp(I * m.p.carrier_phase);
    const cplx iR = I * m.p.R;
    return beta * iR * iR * phi1_prime(iR * s);
}

}  // namespace

cplx two_photon_stripped(const ModelParams& p, const VertexTable& f11, double k) {
    const EffectiveModel m = effective_model(p, f11.mode);
    const cplx G0 = m.G(0.0);
    const cplx Gk = m.G(k), Gmk = m.G(-k);
    return 0.5 * G0 * (2.0 * dq_green(m, k, -k) + Gk * f11.regular(-k) + Gmk * f11.regular(k));
}

cplx two_photon_connected_t(const ModelParams& p, const VertexTable& f11, double k, int mu,
                            int mup) {
    if (k == 0.0) throw PoleProximity("T(2,C) has its principal-value pole at k = 0");
    const EffectiveModel m = effective_model(p, f11.mode);
    const cplx g10 = m.gbar(1, 0.0);
    return m.g(mu, k) * m.g(mup, -k) * g10 * g10 * m.G(k) * m.G(0.0) * (1.0 / k + f11.regular(-k));
}

TwoPhotonAmplitude symmetrize_m(const std::array<std::vector<cplx>, 4>& t2c,
                                const MomentumGrid& grid) {
    TwoPhotonAmplitude a;
    a.grid = grid;
    const int n = grid.size();
    for (int mup = 1; mup <= 2; ++mup)
        for (int mu = 1; mu <= 2; ++mu) {
            auto& out = a.m_values[pair_index(mup, mu)];
            const auto& t1 = t2c[pair_index(mup, mu)];
            const auto& t2 = t2c[pair_index(mu, mup)];
            out.resize(n);
            for (int i = 0; i < n; ++i) out[i] = 0.5 * (t1[i] + t2[n - 1 - i]);
        }
    return a;
}

TwoPhotonAmplitude two_photon_amplitude(const ModelParams& p, const VertexTable& f11, int refine) {
    TwoPhotonAmplitude a;
    a.grid = refine > 1 ? MomentumGrid(f11.grid.k_max, (f11.grid.size() - 1) * refine + 1) : f11.grid;
    a.mode = f11.mode;
    const EffectiveModel m = effective_model(p, f11.mode);
    const int n = a.grid.size();
    const cplx g10 = m.gbar(1, 0.0);
    std::vector<cplx> ms(n);
    for (int i = 0; i < n; ++i) ms[i] = two_photon_stripped(p, f11, a.grid.nodes[i]);
    for (int mup = 1; mup <= 2; ++mup)
        for (int mu = 1; mu <= 2; ++mu) {
            auto& out = a.m_values[pair_index(mup, mu)];
            out.resize(n);
            for (int i = 0; i < n; ++i) {
                const double k = a.grid.nodes[i];
                out[i] = m.g(mup, k) * m.g(mu, -k) * g10 * g10 * ms[i];
            }
        }
    return a;
}

ThreePhotonTerms three_photon_terms(const EffectiveModel& m, const VertexInputs& v, double a,
                                    double b, double c) {
    ThreePhotonTerms t{};
    auto G = [&](double x) { return m.G(x); };
    const cplx G0 = G(0.0);

    // (Gi(b) − Gi(b+c))/c · (Gi(0) − Gi(−a))/(−a)
    t.double_quotient = G(c) * G0 * G0 * G(b + c) * G(b) * dq_inverse(m, b, b + c) *
                        dq_inverse(m, 0.0, -a);

    // H(x) = G(x)(Gi(0) − Gi(x+c))/(x+c) at fixed c
    auto H = [&](cplx x) { return m.G(x) * -dq_inverse(m, 0.0, (x + c).real()); };
    auto dH = [&](cplx x) {
        const double s = (x + c).real();
        return dG(m, x) * -dq_inverse(m, 0.0, s) - m.G(x) * d_quotient_inverse(m, s);
    };
    const cplx hq = safe_difference_quotient(H, dH, a, 0.0, default_dq_threshold(a, 0.0, dq_scale(m)));
    t.bracket = G0 * G0 * G(c) * hq;

    if (v.f11) {
        // U(x) − V(x) at fixed b, vanishing at x = 0
        const cplx fb0 = v.f11(b, 0.0);
        auto W = [&](cplx xc) {
            const double x = xc.real();
            return G(x) * G(-b) * fb0 - G(-x - b) * G(-x) * v.f11(b, -x);
        };
        auto dW = [&](cplx xc) {
            const double x = xc.real();
            const cplx u = dG(m, x) * G(-b) * fb0;
            const cplx f = v.f11(b, -x);
            const cplx vp = -dG(m, -x - b) * G(-x) * f - G(-x - b) * dG(m, -x) * f -
                            G(-x - b) * G(-x) * v.f11_de(b, -x);
            return u - vp;
        };
        t.bracket += G0 * safe_difference_quotient(W, dW, a, 0.0,
                                                   default_dq_threshold(a, 0.0, dq_scale(m)));
        t.vertex_product = G0 * G(a) * v.f11(b, -c) * G(-c) * v.f11(c, 0.0);
    }
    if (v.f12) t.remainder = G0 * G(a) * v.f12(b, c);
    return t;
}

namespace {

VertexInputs family_inputs(const EnergyFamilyTable& fam, const TwoPhotonVertexSlice* f12,
                           Mode mode) {
    VertexInputs v;
    if (mode == Mode::exact || mode == Mode::weak_correlation) {
        v.f11 = [&fam](double x, double E) { return fam.value(x, E); };
        v.f11_de = [&fam](double x, double E) { return fam.d_energy(x, E); };
    }
    if (mode == Mode::exact) {
        if (!f12) throw MissingF12("exact three-photon amplitude requires the two-photon vertex");
        v.f12 = [f12](double b, double c) { return f12->remainder(b, c); };
    }
    return v;
}

}  // namespace

cplx three_photon_stripped(const ModelParams& p, const EnergyFamilyTable& f11_family,
                           const TwoPhotonVertexSlice* f12, double a, double b, double c,
                           Mode mode) {
    const EffectiveModel m = effective_model(p, mode);
    return three_photon_terms(m, family_inputs(f11_family, f12, mode), a, b, c).total();
}

std::array<cplx, 8> three_photon_connected_t(const ModelParams& p,
                                             const EnergyFamilyTable& f11_family,
                                             const TwoPhotonVertexSlice* f12, double k, double q,
                                             Mode mode) {
    const EffectiveModel m = effective_model(p, mode);
    const double a = -k - q;
    const cplx t = three_photon_stripped(p, f11_family, f12, a, k, q, mode);
    const cplx g10 = m.gbar(1, 0.0);
    std::array<cplx, 8> out{};
    for (int m1 = 1; m1 <= 2; ++m1)
        for (int m2 = 1; m2 <= 2; ++m2)
            for (int m3 = 1; m3 <= 2; ++m3)
                out[triple_index(m1, m2, m3)] =
                    g10 * g10 * g10 * m.g(m1, a) * m.g(m2, k) * m.g(m3, q) * t;
    return out;
}

std::vector<cplx> symmetrize_q(const std::function<cplx(double, double, double)>& t3c,
                               const MomentumGrid& grid, int workers) {
    const int n = grid.size();
    std::vector<cplx> out(size_t(n) * n);
    parallel_for(n, workers, [&](int i) {
        const double k = grid.nodes[i];
        for (int j = 0; j < n; ++j) {
            const double q = grid.nodes[j], a = -k - q;
            const cplx s = t3c(a, k, q) + t3c(a, q, k) + t3c(q, k, a) + t3c(q, a, k) +
                           t3c(k, a, q) + t3c(k, q, a);
            out[size_t(i) * n + j] = s / 6.0;
        }
    });
    return out;
}

namespace {

// F̄11(x, 0; E), ∂E F̄11 and F̄12(b, c) tabulated for x, E, b, c on the doubled lattice.
struct LatticeTables {
    std::vector<double> lat;
    double h = 0, x0 = 0;
    int L = 0;
    std::vector<cplx> f11, f11_de, f12;

    int index(double x) const {
        const double u = (x - x0) / h;
        const long i = std::lround(u);
        if (i < 0 || i >= L || std::abs(u - i) > 1e-9) return -1;
        return int(i);
    }
};

}  // namespace

ThreePhotonAmplitude three_photon_amplitude(const ModelParams& p,
                                            const EnergyFamilyTable& f11_family,
                                            const TwoPhotonVertexSlice* f12, Mode mode,
                                            int workers) {
    ThreePhotonAmplitude out;
    const bool needs_f11 = mode == Mode::exact || mode == Mode::weak_correlation;
    if (!f11_family.contour) throw ValidationError("one-photon family has no grid");
    out.grid = f11_family.contour->grid;
    out.mode = mode;
    const auto& grid = out.grid;
    const int n = grid.size();
    if (mode == Mode::exact && !f12)
        throw MissingF12("exact three-photon amplitude requires the two-photon vertex");

    LatticeTables tab;
    tab.lat = doubled_lattice(grid);
    tab.L = int(tab.lat.size());
    tab.h = grid.spacing();
    tab.x0 = tab.lat.front();
    VertexInputs v = family_inputs(f11_family, f12, mode);
    if (needs_f11) {
        std::vector<int> eidx(tab.L);
        for (int e = 0; e < tab.L; ++e) {
            eidx[e] = f11_family.node_index(tab.lat[e]);
            if (eidx[e] < 0) throw ValidationError("one-photon family must cover the doubled lattice");
        }
        tab.f11.resize(size_t(tab.L) * tab.L);
        tab.f11_de.resize(size_t(tab.L) * tab.L);
        parallel_for(tab.L, workers, [&](int e) {
            const auto& s = f11_family.solutions[eidx[e]];
            for (int x = 0; x < tab.L; ++x) {
                tab.f11[size_t(x) * tab.L + e] = s.regular(tab.lat[x]);
                tab.f11_de[size_t(x) * tab.L + e] = s.regular_de(tab.lat[x]);
            }
        });
        auto f = v.f11;
        auto fd = v.f11_de;
        v.f11 = [&tab, f](double x, double E) {
            const int i = tab.index(x), e = tab.index(E);
            return i >= 0 && e >= 0 ? tab.f11[size_t(i) * tab.L + e] : f(x, E);
        };
        v.f11_de = [&tab, fd](double x, double E) {
            const int i = tab.index(x), e = tab.index(E);
            return i >= 0 && e >= 0 ? tab.f11_de[size_t(i) * tab.L + e] : fd(x, E);
        };
    }
    if (mode == Mode::exact && f12->exchange) {
        tab.f12.resize(size_t(tab.L) * tab.L);
        const auto& z = f12->contour->z;
        parallel_for(tab.L, workers, [&](int ci) {
            const auto& d = f12->real_density[ci];
            for (int bi = 0; bi < tab.L; ++bi) {
                cplx acc = 0.0;
                for (size_t q = 0; q < d.size(); ++q)
                    acc += d[q] / (-tab.lat[bi] - tab.lat[ci] - z[q]);
                tab.f12[size_t(bi) * tab.L + ci] = acc;
            }
        });
        auto f = v.f12;
        v.f12 = [&tab, f](double b, double c) {
            const int i = tab.index(b), j = tab.index(c);
            return i >= 0 && j >= 0 ? tab.f12[size_t(i) * tab.L + j] : f(b, c);
        };
    }

    const EffectiveModel m = effective_model(p, mode);
    out.stripped = symmetrize_q(
        [&](double a, double b, double c) { return three_photon_terms(m, v, a, b, c).total(); },
        grid, workers);
    const cplx g10 = m.gbar(1, 0.0);
    for (int m1 = 1; m1 <= 2; ++m1)
        for (int m2 = 1; m2 <= 2; ++m2)
            for (int m3 = 1; m3 <= 2; ++m3) {
                auto& qv = out.q_values[triple_index(m1, m2, m3)];
                qv.resize(size_t(n) * n);
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) {
                        const double k = grid.nodes[i], q = grid.nodes[j];
                        qv[size_t(i) * n + j] = g10 * g10 * g10 * m.g(m1, -k - q) * m.g(m2, k) *
                                                m.g(m3, q) * out.stripped[size_t(i) * n + j];
                    }
            }
    return out;
}

}  // namespace gqed
