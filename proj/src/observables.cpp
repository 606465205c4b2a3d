#include "gqed/observables.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "gqed/errors.hpp"
#include "gqed/parallel.hpp"

namespace gqed {

double SpectrumResult::relative_residual() const {
    return std::abs(power_residual) / std::max(inelastic_total, 1e-300);
}

std::vector<double> SpectrumResult::total() const {
    std::vector<double> t(k.size());
    for (size_t i = 0; i < k.size(); ++i) t[i] = s_inel[0][i] + s_inel[1][i];
    return t;
}

namespace {

std::array<cplx, 4> m_channels(const ModelParams& p, const VertexTable& f11, double k) {
    const EffectiveModel em = effective_model(p, f11.mode);
    const cplx s = two_photon_stripped(p, f11, k);
    const cplx g10 = em.gbar(1, 0.0);
    std::array<cplx, 4> out{};
    for (int mup = 1; mup <= 2; ++mup)
        for (int mu = 1; mu <= 2; ++mu)
            out[pair_index(mup, mu)] = em.g(mup, k) * em.g(mu, -k) * g10 * g10 * s;
    return out;
}

}  // namespace

SpectrumResult spectral_density(const ModelParams& p, const VertexTable& f11, double tolerance,
                                int refine) {
    const EffectiveModel em = effective_model(p, f11.mode);
    const ChannelMatrix S0 = single_photon_s(em, 0.0);
    const TwoPhotonAmplitude m = two_photon_amplitude(p, f11);
    const auto& g = m.grid;
    const int n = g.size();
    const int i0 = g.node_index(0.0);
    SpectrumResult r;
    r.k = g.nodes;
    for (int mu = 1; mu <= 2; ++mu) {
        auto& s = r.s_inel[mu - 1];
        s.assign(n, 0.0);
        double quad = 0.0;
        for (int mup = 1; mup <= 2; ++mup) {
            const auto& M = m(mup, mu);
            for (int i = 0; i < n; ++i) s[i] += 32 * pi * pi * pi * std::norm(M[i]);
            quad += std::imag(M[i0] * std::conj(S0[mup - 1][0] * S0[mu - 1][0]));
        }
        r.s_el_linear[mu - 1] = std::norm(S0[mu - 1][0]);
        r.s_el_quadratic[mu - 1] = 16 * pi * pi * quad;
    }
    const int nf = (n - 1) * std::max(refine, 1) + 1;
    const double hf = 2 * g.k_max / (nf - 1);
    double integral = 0.0;
    for (int i = 0; i < nf; ++i) {
        const double k = -g.k_max + i * hf;
        double a = 0.0;
        for (const cplx& v : m_channels(p, f11, k)) a += std::norm(v);
        integral += ((i == 0 || i == nf - 1) ? 0.5 : 1.0) * hf * 32 * pi * pi * pi * a;
    }
    // ∫_{|k|>K} of a k⁻⁴ tail matched at the cutoff
    const double edge = r.s_inel[0].front() + r.s_inel[1].front() + r.s_inel[0].back() + r.s_inel[1].back();
    r.inelastic_total = integral + edge * g.k_max / 3.0;
    r.power_residual = r.s_el_quadratic[0] + r.s_el_quadratic[1] + r.inelastic_total;
    if (tolerance > 0 && r.relative_residual() > tolerance)
        throw ConservationViolation("O(Phi^2) power balance off by " +
                                    std::to_string(r.relative_residual()) + " (relative)");
    return r;
}

std::vector<Peak> find_peaks(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<Peak> out;
    const int n = static_cast<int>(y.size());
    auto cross = [&](int i, int dir, double half) {
        int j = i;
        while (j + dir >= 0 && j + dir < n && y[j + dir] > half) j += dir;
        if (j + dir < 0 || j + dir >= n) return x[j];
        const int k = j + dir;
        const double t = (y[j] - half) / (y[j] - y[k]);
        return x[j] + t * (x[k] - x[j]);
    };
    for (int i = 1; i + 1 < n; ++i) {
        if (!(y[i] > y[i - 1] && y[i] >= y[i + 1])) continue;
        // parabolic refinement of the apex
        const double d = y[i - 1] - 2 * y[i] + y[i + 1];
        const double off = d != 0 ? 0.5 * (y[i - 1] - y[i + 1]) / d : 0.0;
        const double h = x[i + 1] - x[i];
        const double half = 0.5 * y[i];
        out.push_back({x[i] + off * h, y[i], cross(i, 1, half) - cross(i, -1, half)});
    }
    std::sort(out.begin(), out.end(), [](const Peak& a, const Peak& b) { return a.height > b.height; });
    return out;
}

std::vector<double> detect_kinks(const std::vector<double>& t, const std::vector<double>& y,
                                 const KinkOptions& opt) {
    const int n = static_cast<int>(t.size());
    if (n < 5) return {};
    const double h = t[1] - t[0];
    // second-order one-sided derivatives; their difference is O(h²) on smooth stretches
    std::vector<double> gap(n, 0.0);
    for (int i = 2; i + 2 < n; ++i) {
        const double left = (3 * y[i] - 4 * y[i - 1] + y[i - 2]) / (2 * h);
        const double right = (-3 * y[i] + 4 * y[i + 1] - y[i + 2]) / (2 * h);
        gap[i] = std::abs(right - left);
    }
    const double excl = opt.exclusion > 0 ? opt.exclusion : 3 * std::abs(h);
    auto near_multiple = [&](double x) {
        if (opt.period <= 0) return false;
        const double r = std::round(x / opt.period);
        return std::abs(x - r * opt.period) <= excl;
    };
    std::vector<double> bg;
    for (int i = 2; i + 2 < n; ++i)
        if (!near_multiple(t[i])) bg.push_back(gap[i]);
    if (bg.empty()) return {};
    std::nth_element(bg.begin(), bg.begin() + bg.size() / 2, bg.end());
    const double med = bg[bg.size() / 2];
    // background also from the neighbourhood (±8 samples, the candidate's own ±2 left out)
    auto local_median = [&](int i) {
        std::vector<double> w;
        for (int j = std::max(2, i - 8); j <= std::min(n - 3, i + 8); ++j)
            if (std::abs(j - i) > 2) w.push_back(gap[j]);
        if (w.empty()) return 0.0;
        std::nth_element(w.begin(), w.begin() + w.size() / 2, w.end());
        return w[w.size() / 2];
    };
    // a kink between samples lights up a plateau of equal gaps; report its centre
    std::vector<double> out;
    std::vector<int> run;
    auto flush = [&] {
        if (run.empty()) return;
        double top = 0;
        for (int i : run) top = std::max(top, gap[i]);
        double sum = 0;
        int cnt = 0;
        for (int i : run)
            if (gap[i] >= 0.9 * top) sum += t[i], ++cnt;
        out.push_back(sum / cnt);
        run.clear();
    };
    for (int i = 2; i + 2 < n; ++i) {
        const double thr = opt.factor * std::max({med, local_median(i), 1e-300});
        if (gap[i] <= thr) continue;
        if (!run.empty() && i - run.back() > 2) flush();
        run.push_back(i);
    }
    flush();
    return out;
}

TailSpec m_tail(const ModelParams& p, const std::vector<cplx>& m, const MomentumGrid& grid) {
    std::vector<double> kappas{0.0};
    if (p.R > 0) kappas = {-2 * p.R, -p.R, 0.0, p.R, 2 * p.R};
    return fit_tail(m, grid, kappas, std::max(p.gamma, 0.5));
}

std::vector<cplx> fourier_m(const ModelParams& p, const TwoPhotonAmplitude& m, int mup, int mu,
                            const std::vector<double>& taus) {
    const auto& vals = m(mup, mu);
    const TailSpec tail = m_tail(p, vals, m.grid);
    std::vector<cplx> out(taus.size());
    for (size_t i = 0; i < taus.size(); ++i) out[i] = fourier_oscillatory(vals, taus[i], m.grid, tail);
    return out;
}

namespace {

ChannelMatrix carrier_s(const ModelParams& p, Mode mode) {
    const ChannelMatrix S = single_photon_s(effective_model(p, mode), 0.0);
    for (int mu = 0; mu < 2; ++mu)
        if (std::abs(S[mu][0]) < 1e-6)
            throw DegenerateNormalization("single-photon amplitude into channel " +
                                          std::to_string(mu + 1) + " vanishes at the carrier");
    return S;
}

}  // namespace

CoherenceResult coherence2(const ModelParams& p, const TwoPhotonAmplitude& m,
                           const std::vector<double>& taus) {
    const ChannelMatrix S = carrier_s(p, m.mode);
    CoherenceResult r;
    r.tau = taus;
    r.mode = to_string(m.mode);
    r.values.resize(4);
    r.kink_report.resize(4);
    for (int mup = 1; mup <= 2; ++mup)
        for (int mu = 1; mu <= 2; ++mu) {
            const int c = pair_index(mup, mu);
            const auto I1 = fourier_m(p, m, mup, mu, taus);
            const cplx norm = 4.0 * pi * I / (S[mup - 1][0] * S[mu - 1][0]);
            auto& v = r.values[c];
            v.resize(taus.size());
            for (size_t i = 0; i < taus.size(); ++i) v[i] = std::norm(1.0 - norm * I1[i]);
            if (taus.size() >= 5) r.kink_report[c] = detect_kinks(taus, v, {5.0, 0.0, p.R});
            r.channels.push_back(c);
        }
    return r;
}

CoherenceResult oracle_c2_from_state(const ModelParams& p, const VertexTable& f11,
                                     const std::vector<double>& taus,
                                     const StateOracleOptions& opt) {
    const EffectiveModel em = effective_model(p, f11.mode);
    const double K = f11.grid.k_max;
    const double scale = std::max(p.R, 1.0 / std::max(p.gamma, 1e-12));
    std::vector<double> Ls = opt.pulse_lengths;
    if (Ls.empty()) Ls = {100 * scale, 200 * scale, 400 * scale};
    std::sort(Ls.begin(), Ls.end());
    const double h_m = opt.spacing > 0 ? opt.spacing : K / 4000;

    // connected part: brute-force trapezoid of e^{ikτ} M(k) on ±k_extent·K
    const double Km = opt.k_extent * K;
    const int nm = 2 * int(std::ceil(Km / h_m)) + 1;
    const double hm = 2 * Km / (nm - 1);
    std::vector<cplx> mstrip(nm);
    for (int i = 0; i < nm; ++i) mstrip[i] = two_photon_stripped(p, f11, -Km + i * hm);
    const cplx g10 = em.gbar(1, 0.0);
    std::array<std::vector<cplx>, 4> I1;
    for (int mup = 1; mup <= 2; ++mup)
        for (int mu = 1; mu <= 2; ++mu) {
            auto& out = I1[pair_index(mup, mu)];
            out.assign(taus.size(), 0.0);
            for (int i = 0; i < nm; ++i) {
                const double k = -Km + i * hm;
                const double w = (i == 0 || i == nm - 1) ? 0.5 * hm : hm;
                const cplx M = em.g(mup, k) * em.g(mu, -k) * g10 * g10 * mstrip[i];
                for (size_t t = 0; t < taus.size(); ++t) out[t] += w * std::exp(I * k * taus[t]) * M;
            }
        }

    // disconnected part: χ_μ(x) = (2π)^{-1/2} ∫ φ_L(k) S_μ1(k) e^{ikx} dk at finite L
    auto chi = [&](double L, int mu, double x) {
        const double hk = std::min(K / 4000, 2 * pi / (16 * L));
        const int nk = 2 * int(std::ceil(K / hk)) + 1;
        const double hh = 2 * K / (nk - 1);
        const cplx S0 = single_photon_s(em, 0.0)[mu - 1][0];
        cplx acc = 0.0;
        for (int i = 0; i < nk; ++i) {
            const double k = -K + i * hh;
            const double w = (i == 0 || i == nk - 1) ? 0.5 * hh : hh;
            const double sinc = k == 0 ? L / 2 : std::sin(k * L / 2) / k;
            acc += w * sinc * (single_photon_s(em, k)[mu - 1][0] - S0) * std::exp(I * k * x);
        }
        const double box = std::abs(x) < L / 2 ? 1.0 : 0.0;
        return S0 * box / std::sqrt(L) + std::sqrt(2.0 / (pi * L)) * acc / std::sqrt(2 * pi);
    };

    CoherenceResult r;
    r.tau = taus;
    r.mode = to_string(f11.mode);
    r.values.resize(4);
    r.kink_report.resize(4);
    std::vector<std::array<std::vector<double>, 4>> perL(Ls.size());
    for (size_t l = 0; l < Ls.size(); ++l) {
        const double L = Ls[l];
        std::array<cplx, 2> chi0{chi(L, 1, 0.0), chi(L, 2, 0.0)};
        std::array<std::vector<cplx>, 2> chit;
        for (int mu = 1; mu <= 2; ++mu) {
            chit[mu - 1].resize(taus.size());
            for (size_t t = 0; t < taus.size(); ++t) chit[mu - 1][t] = chi(L, mu, taus[t]);
        }
        for (int mup = 1; mup <= 2; ++mup)
            for (int mu = 1; mu <= 2; ++mu) {
                auto& v = perL[l][pair_index(mup, mu)];
                v.resize(taus.size());
                for (size_t t = 0; t < taus.size(); ++t) {
                    const cplx a = chi0[mu - 1] * chit[mup - 1][t];
                    const cplx amp = a - 4.0 * pi * I / L * I1[pair_index(mup, mu)][t];
                    v[t] = std::norm(amp) / std::norm(a);
                }
            }
    }
    const size_t last = Ls.size() - 1;
    for (int c = 0; c < 4; ++c) {
        r.values[c].resize(taus.size());
        for (size_t t = 0; t < taus.size(); ++t) {
            const double v1 = perL[last][c][t];
            if (last == 0) {
                r.values[c][t] = v1;
                continue;
            }
            const double v0 = perL[last - 1][c][t];
            if (std::abs(v1 - v0) > 0.01 * std::abs(v1))
                throw ExtrapolationUnstable("pulse-length extrapolation moved C2 by more than 1 %");
            const double ratio = Ls[last] / Ls[last - 1];
            r.values[c][t] = (ratio * v1 - v0) / (ratio - 1);
        }
        r.channels.push_back(c);
    }
    return r;
}

namespace {

double window(double x, double start, double stop) {
    const double u = std::abs(x);
    if (u <= start) return 1.0;
    if (u >= stop) return 0.0;
    const double s = (u - start) / (stop - start);
    auto psi = [](double v) { return v > 0 ? std::exp(-1.0 / v) : 0.0; };
    const double a = psi(1 - s), b = psi(s);
    return a / (a + b);
}

}  // namespace

std::vector<cplx> fourier_q(const ThreePhotonAmplitude& q, int m1, int m2, int m3,
                            const std::vector<double>& t2, const std::vector<double>& t1,
                            const Coherence3Options& opt) {
    const auto& g = q.grid;
    const int n = g.size();
    const double h = g.spacing();
    const double start = opt.taper_start * g.k_max, stop = g.k_max - 3 * h;
    std::vector<double> W(n);
    for (int i = 0; i < n; ++i) W[i] = window(g.nodes[i], start, stop);
    const auto& Q = q(m1, m2, m3);
    // Qw[k][q]
    std::vector<cplx> Qw(size_t(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            Qw[size_t(i) * n + j] = h * h * W[i] * W[j] * window(-g.nodes[i] - g.nodes[j], start, stop) *
                                    Q[size_t(i) * n + j];
    const size_t n2 = t2.size(), n1 = t1.size();
    // inner[i2][k] = Σ_q e^{iq t2} Qw[k][q]
    std::vector<cplx> inner(n2 * n);
    parallel_for(int(n2), opt.workers, [&](int a) {
        std::vector<cplx> ph(n);
        for (int j = 0; j < n; ++j) ph[j] = std::exp(I * g.nodes[j] * t2[a]);
        for (int i = 0; i < n; ++i) {
            cplx acc = 0.0;
            const cplx* row = &Qw[size_t(i) * n];
            for (int j = 0; j < n; ++j) acc += ph[j] * row[j];
            inner[size_t(a) * n + i] = acc;
        }
    });
    std::vector<cplx> ph1(n1 * n);
    for (size_t b = 0; b < n1; ++b)
        for (int i = 0; i < n; ++i) ph1[b * n + i] = std::exp(I * g.nodes[i] * t1[b]);
    std::vector<cplx> out(n2 * n1);
    parallel_for(int(n2), opt.workers, [&](int a) {
        for (size_t b = 0; b < n1; ++b) {
            cplx acc = 0.0;
            for (int i = 0; i < n; ++i) acc += ph1[b * n + i] * inner[size_t(a) * n + i];
            out[size_t(a) * n1 + b] = acc;
        }
    });
    return out;
}

namespace {

// I¹ at arbitrary arguments, evaluated once per distinct value.
struct FourierCache {
    const ModelParams& p;
    const TwoPhotonAmplitude& m;
    std::map<std::pair<int, long long>, cplx> memo;
    std::array<TailSpec, 4> tails;
    std::array<bool, 4> have{};

    cplx operator()(int mup, int mu, double t) {
        const int c = pair_index(mup, mu);
        const long long key = std::llround(t * 1e9);
        auto it = memo.find({c, key});
        if (it != memo.end()) return it->second;
        if (!have[c]) {
            tails[c] = m_tail(p, m(mup, mu), m.grid);
            have[c] = true;
        }
        const cplx v = fourier_oscillatory(m(mup, mu), t, m.grid, tails[c]);
        memo[{c, key}] = v;
        return v;
    }
};

}  // namespace

CoherenceResult coherence3(const ModelParams& p, const ThreePhotonAmplitude& q,
                           const TwoPhotonAmplitude& m, const std::vector<double>& tau,
                           const std::vector<double>& tau_prime,
                           std::vector<std::array<int, 3>> triples, const Coherence3Options& opt) {
    const ChannelMatrix S = carrier_s(p, m.mode);
    if (triples.empty())
        for (int a = 1; a <= 2; ++a)
            for (int b = 1; b <= 2; ++b)
                for (int c = 1; c <= 2; ++c) triples.push_back({a, b, c});
    CoherenceResult r;
    r.tau = tau;
    r.tau_prime = tau_prime;
    r.mode = to_string(q.mode);
    r.values.resize(8);
    r.kink_report.resize(8);
    FourierCache I1{p, m, {}, {}, {}};
    const size_t n1 = tau.size(), n2 = tau_prime.size();
    for (const auto& tr : triples) {
        const int mpp = tr[0], mp = tr[1], mu = tr[2];
        const int idx = triple_index(mpp, mp, mu);
        // photons: μ at 0 (momentum −k−q), μ′ at τ (k), μ″ at τ′ (q)
        const auto I2 = fourier_q(q, mu, mp, mpp, tau_prime, tau, opt);
        const cplx s_pp = S[mpp - 1][0], s_p = S[mp - 1][0], s_u = S[mu - 1][0];
        auto& v = r.values[idx];
        v.resize(n2 * n1);
        for (size_t a = 0; a < n2; ++a)
            for (size_t b = 0; b < n1; ++b) {
                const double tp = tau_prime[a], t = tau[b];
                const cplx pairs = I1(mpp, mp, tp - t) / (s_pp * s_p) + I1(mp, mu, t) / (s_u * s_p) +
                                   I1(mpp, mu, tp) / (s_pp * s_u);
                const cplx amp =
                    1.0 - 4.0 * pi * I * pairs - 12.0 * pi * I * I2[a * n1 + b] / (s_pp * s_p * s_u);
                v[a * n1 + b] = std::norm(amp);
            }
        r.channels.push_back(idx);
    }
    return r;
}

std::vector<double> detect_ridges(const std::vector<double>& tau, const std::vector<double>& tau_prime,
                                  const std::vector<double>& values, double period,
                                  double fraction) {
    const int n1 = int(tau.size()), n2 = int(tau_prime.size());
    if (n1 < 5 || n2 < 5) return {};
    const double h = tau[1] - tau[0];
    if (std::abs((tau_prime[1] - tau_prime[0]) - h) > 1e-9 * std::abs(h))
        throw ValidationError("ridge detection needs equal τ and τ′ spacing");
    // cuts of constant τ + τ′: index sum s = a + b, stepping a up and b down
    std::map<long long, int> hits;  // offset in units of h → count
    std::map<long long, int> spans;
    for (int s = 0; s <= n1 + n2 - 2; ++s) {
        std::vector<double> d, y;
        for (int a = std::max(0, s - (n1 - 1)); a <= std::min(n2 - 1, s); ++a) {
            const int b = s - a;
            d.push_back(tau_prime[a] - tau[b]);
            y.push_back(values[size_t(a) * n1 + b]);
        }
        if (d.size() < 9) continue;
        for (double x : d) spans[std::llround(x / h)]++;
        for (double x : detect_kinks(d, y, {5.0, 0.0, period})) hits[std::llround(x / h)]++;
    }
    // cuts alternate parity, so a ridge at offset D lands on D or D ± h
    auto at = [](const std::map<long long, int>& m, long long k) {
        const auto it = m.find(k);
        return it == m.end() ? 0 : it->second;
    };
    int widest = 0;
    for (const auto& kv : spans) widest = std::max(widest, kv.second);
    std::vector<std::pair<long long, double>> pass;
    for (const auto& [k, c] : spans) {
        const int span = c + std::max(at(spans, k - 1), at(spans, k + 1));
        if (span < std::max(10, widest / 5)) continue;  // corner offsets crossed by few cuts
        const double ratio = double(at(hits, k - 1) + at(hits, k) + at(hits, k + 1)) / span;
        if (ratio >= fraction) pass.push_back({k, ratio});
    }
    std::vector<double> out;
    for (size_t a = 0; a < pass.size();) {
        size_t b = a;
        while (b + 1 < pass.size() && pass[b + 1].first <= pass[b].first + 2) ++b;
        double sum = 0, wsum = 0;
        for (long long k = pass[a].first - 1; k <= pass[b].first + 1; ++k) {
            sum += double(k) * at(hits, k);
            wsum += at(hits, k);
        }
        out.push_back(wsum > 0 ? sum / wsum * h : pass[a].first * h);
        a = b + 1;
    }
    return out;
}

std::vector<PoleResult> lambert_poles(const ModelParams& p, const std::vector<int>& branches,
                                      double tolerance) {
    std::vector<PoleResult> out;
    auto residual = [&](cplx k) { return std::abs(inverse_green(p, k)); };
    if (p.R == 0.0) {
        const cplx k = -p.detuning - 2.0 * I * p.gamma;
        out.push_back({0, -1, k, residual(k)});
        out.push_back({0, +1, -k, residual(k)});
        return out;
    }
    const double gR = p.gamma * p.R;
    const cplx z = -gR * std::exp(cplx(gR, p.carrier_phase - p.detuning * p.R));
    for (int n : branches) {
        const cplx W = lambert_w(z, n);
        const cplx k = -I * (gR - I * p.detuning * p.R - W) / p.R;
        const double res = residual(k);
        if (!(res < tolerance))
            throw ResidualTooLarge("pole on branch " + std::to_string(n) + " has residual " +
                                   std::to_string(res));
        out.push_back({n, -1, k, res});
        out.push_back({n, +1, -k, res});
    }
    return out;
}


DetuningScan detuning_scan(const ModelParams& base, const std::vector<double>& deltas,
                           const MomentumGrid& grid, const std::vector<double>& k_samples,
                           Mode mode, int workers) {
    DetuningScan scan;
    scan.delta = deltas;
    scan.k = k_samples;
    scan.s_inel.resize(deltas.size());
    scan.power_residual.resize(deltas.size());
    parallel_for(int(deltas.size()), workers, [&](int d) {
        ModelParams p = base;
        p.detuning = deltas[d];
        const VertexTable f11 = solve_f11(p, 0.0, grid, mode);
        scan.power_residual[d] = spectral_density(p, f11, 0.0).relative_residual();
        auto& s = scan.s_inel[d];
        s.resize(k_samples.size());
        for (size_t i = 0; i < k_samples.size(); ++i) {
            const auto M = m_channels(p, f11, k_samples[i]);
            double acc = 0.0;
            for (const cplx& v : M) acc += std::norm(v);
            s[i] = 32 * pi * pi * pi * acc;
        }
    });
    double num = 0.0, den = 0.0;
    for (size_t a = 0; a < deltas.size(); ++a)
        for (size_t b = 0; b < deltas.size(); ++b) {
            if (std::abs(deltas[a] + deltas[b]) > 1e-12) continue;
            for (size_t i = 0; i < k_samples.size(); ++i)
                for (size_t j = 0; j < k_samples.size(); ++j) {
                    if (std::abs(k_samples[i] + k_samples[j]) > 1e-12) continue;
                    num = std::max(num, std::abs(scan.s_inel[a][i] - scan.s_inel[b][j]));
                    den = std::max(den, scan.s_inel[a][i]);
                }
        }
    scan.asymmetry = den > 0 ? num / den : 0.0;
    return scan;
}

}  // namespace gqed
