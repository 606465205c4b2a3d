// Acceptance checks: one PASS/FAIL line per criterion.
// usage: acceptance <path-to-gqed-cli> [criterion ...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gqed/errors.hpp"
#include "gqed/model.hpp"
#include "gqed/numerics.hpp"
#include "gqed/observables.hpp"
#include "gqed/oracles.hpp"
#include "gqed/scattering.hpp"
#include "gqed/vertex.hpp"

using namespace gqed;
namespace fs = std::filesystem;

namespace {

std::string cli_path;

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

const MomentumGrid wide(40.0, 1601);
const MomentumGrid wider(80.0, 3201);

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
    return v;
}

ModelParams delayed(double R, double delta = 0.0) { return make_params(1.0, R, pi / 4, delta); }

Outcome unitarity() {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0;
    for (int s = 0; s < 20; ++s) {
        const auto p = make_params(0.1 + 2 * u(rng), 10 * u(rng), 2 * pi * u(rng), 4 * u(rng) - 2,
                                   0.1 + 0.8 * u(rng));
        for (int i = 0; i <= 1000; ++i) {
            const auto S = single_photon_s(p, -40.0 + 0.08 * i);
            for (int mu = 0; mu < 2; ++mu)
                worst = std::max(worst, std::abs(std::norm(S[0][mu]) + std::norm(S[1][mu]) - 1.0));
        }
    }
    return {worst < 1e-10, fmt("sup |sum |S|^2 - 1| = %.2e over 20 x 1001", worst)};
}

Outcome self_energy_oracle() {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0;
    for (int s = 0; s < 100; ++s) {
        const auto p = make_params(0.1 + 2 * u(rng), 8 * u(rng), 2 * pi * u(rng), 2 * u(rng) - 1,
                                   0.1 + 0.8 * u(rng));
        const double im = s % 4 == 0 ? 0.0 : 2 * u(rng);
        const cplx eps(6 * u(rng) - 3, im);
        const cplx closed = self_energy(p, ComplexEnergy(eps));
        worst = std::max(worst, std::abs(self_energy_numeric(p, eps).value - closed) / std::abs(closed));
    }
    return {worst < 1e-6, fmt("max relative error %.2e over 100 cases (25 on the real axis)", worst)};
}

Outcome markov_reduction() {
    const auto p = make_params(1.0, 1e-3, 0.0);
    const auto ex = solve_f11(p, 0.0, wide, Mode::exact);
    double num = 0, den = 0;
    for (int i = 0; i < wide.size(); ++i) {
        const double k = wide.nodes[i];
        if (std::abs(k) < p.gamma) continue;
        num = std::max(num, std::abs(ex.connected(k) - 1.0 / (0.0 - k)));
        den = std::max(den, std::abs(1.0 / k));
    }
    return {num / den < 1e-2, fmt("sup-norm relative %.2e on |k| >= gamma", num / den)};
}

Outcome born_oracle() {
    const auto p = make_params(0.05, 1.0, pi / 4);
    const MomentumGrid gb(40.0, 8001);
    const auto born = born_f11(p, 0.0, gb, 3);
    const auto ex = solve_f11(p, 0.0, MomentumGrid(40.0, 1601), Mode::exact);
    double num = 0, den = 0;
    for (int i = 0; i < gb.size(); ++i) {
        const double y = gb.nodes[i];
        if (std::abs(y) > 20) continue;
        const cplx e = ex.regular(y);
        num = std::max(num, std::abs(born.sum(i) - e));
        den = std::max(den, std::abs(e));
    }
    const double f11 = num / den;

    const MomentumGrid g(15.0, 301);
    const auto fam = solve_f11_family(p, doubled_lattice(g), g, Mode::exact);
    const auto slice = solve_f12_slice(p, g, fam);
    BornThreePhoton b3(p, MomentumGrid(15.0, 3001), 3);
    double t3 = 0;
    for (const auto& [a, b] : std::vector<std::pair<double, double>>{
             {0.3, -0.7}, {1.0, 0.5}, {-2.0, 0.6}, {0.1, 0.2}, {-0.5, -0.5}}) {
        const cplx e = three_photon_stripped(p, fam, &slice, a, b, -a - b, Mode::exact);
        t3 = std::max(t3, std::abs(b3.stripped(a, b, -a - b) - e) / std::abs(e));
    }
    return {f11 < 1e-3 && t3 < 1e-3, fmt("F11 relative %.2e, T3C relative %.2e", f11, t3)};
}

Outcome two_photon_identity() {
    const auto p = delayed(5.0);
    const auto ex = two_photon_amplitude(p, solve_f11(p, 0.0, wide, Mode::exact));
    const auto wc = two_photon_amplitude(p, solve_f11(p, 0.0, wide, Mode::weak_correlation));
    double d = 0, scale = 0;
    for (int c = 0; c < 4; ++c)
        for (size_t i = 0; i < ex.m_values[c].size(); ++i) {
            d = std::max(d, std::abs(ex.m_values[c][i] - wc.m_values[c][i]));
            scale = std::max(scale, std::abs(ex.m_values[c][i]));
        }
    return {d / scale < 1e-12, fmt("sup |M_wc - M_exact| / sup |M| = %.2e", d / scale)};
}

std::vector<SpectrumResult> spectra() {
    static std::vector<SpectrumResult> s;
    if (s.empty())
        for (double R : {1.0, 3.0, 5.0}) {
            const auto p = delayed(R);
            s.push_back(spectral_density(p, solve_f11(p, 0.0, wide, Mode::exact)));
        }
    return s;
}

Outcome power_conservation() {
    double worst = 0;
    std::string d;
    const double R[] = {1, 3, 5};
    const auto s = spectra();
    for (size_t i = 0; i < s.size(); ++i) {
        worst = std::max(worst, std::abs(s[i].relative_residual()));
        d += fmt("gR=%g: %.2e  ", R[i], s[i].relative_residual());
    }
    return {worst < 1e-3, d};
}

Outcome spectrum_structure() {
    std::vector<double> pos, width;
    std::string d;
    bool paired = true;
    for (const auto& s : spectra()) {
        auto peaks = find_peaks(s.k, s.total());
        std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) { return a.height > b.height; });
        if (peaks.size() < 2) return {false, "fewer than two peaks"};
        paired = paired && std::abs(peaks[0].k + peaks[1].k) < 2 * (s.k[1] - s.k[0]);
        pos.push_back(0.5 * (std::abs(peaks[0].k) + std::abs(peaks[1].k)));
        width.push_back(0.5 * (peaks[0].fwhm + peaks[1].fwhm));
        d += fmt("|k|=%.4f fwhm=%.4f  ", pos.back(), width.back());
    }
    const bool ok = paired && pos[0] > pos[1] && pos[1] > pos[2] && width[0] > width[1] && width[1] > width[2];
    return {ok, d};
}

Outcome coherence2_structure() {
    const auto p = delayed(5.0);
    const auto m = two_photon_amplitude(p, solve_f11(p, 0.0, wider, Mode::exact), 8);
    const auto c = coherence2(p, m, linspace(0.0, 20.0, 401));
    const double h = 0.05;
    bool kinks = true;
    std::string d = fmt("C2_11(0)=%.3f C2_22(0)=%.3f  kinks:", c.values[pair_index(1, 1)][0],
                        c.values[pair_index(2, 2)][0]);
    for (int ch : c.channels) {
        std::set<int> found;
        int spurious = 0;
        for (double t : c.kink_report[ch]) {
            const double n = std::round(t / p.R);
            if (n >= 1 && n <= 3 && std::abs(t - n * p.R) <= 2 * h)
                found.insert(int(n));
            else
                ++spurious;
        }
        kinks = kinks && found.size() == 3 && spurious <= 1;
        d += " [";
        for (double t : c.kink_report[ch]) d += fmt(" %.2f", t);
        d += " ]";
    }
    const bool ok = c.values[pair_index(1, 1)][0] > 1 && c.values[pair_index(2, 2)][0] < 1 && kinks;
    return {ok, d};
}

Outcome coherence2_oracle() {
    const auto p = delayed(5.0);
    const auto f11 = solve_f11(p, 0.0, wide, Mode::exact);
    const auto taus = linspace(0.0, 20.0, 41);
    const auto c = coherence2(p, two_photon_amplitude(p, f11, 8), taus);
    const auto o = oracle_c2_from_state(p, f11, taus);
    double worst = 0;
    for (int ch : c.channels)
        for (size_t i = 0; i < taus.size(); ++i)
            worst = std::max(worst, std::abs(c.values[ch][i] - o.values[ch][i]) / std::abs(o.values[ch][i]));
    return {worst < 0.02, fmt("max relative deviation %.2e over 41 delays, 4 channels", worst)};
}

Outcome poles_and_ridges() {
    double res = 0;
    size_t count = 0;
    const auto deltas = linspace(-2.0, 2.0, 41);
    for (double dl : deltas)
        for (const auto& r : lambert_poles(delayed(5.0, dl), {-1, 0, 1})) {
            res = std::max(res, r.residual);
            ++count;
        }
    const auto ks = linspace(-2.0, 2.0, 401);
    const auto s = detuning_scan(delayed(5.0), deltas, wide, ks);
    double worst = 0;
    int misses = 0;
    for (size_t i = 0; i < deltas.size(); ++i) {
        const auto& row = s.s_inel[i];
        const double kmax = ks[std::max_element(row.begin(), row.end()) - row.begin()];
        double best = 1e300, width = 0;
        for (const auto& r : lambert_poles(delayed(5.0, deltas[i]), {-1, 0, 1})) {
            const double dist = std::abs(kmax - r.pole.real());
            if (dist < best) best = dist, width = 2 * std::abs(r.pole.imag());
        }
        const double tol = std::max(width, ks[1] - ks[0]);
        worst = std::max(worst, best / tol);
        if (best > tol) ++misses;
    }
    const bool ok = res < 1e-8 && misses == 0;
    return {ok, fmt("%g poles, max residual %.2e; peak-to-pole distance / linewidth max %.3f, %g misses",
                    double(count), res, worst, double(misses))};
}

Outcome coherence3_structure() {
    const auto p = delayed(5.0);
    const MomentumGrid g(15.0, 301);
    const auto fam = solve_f11_family(p, doubled_lattice(g), g, Mode::exact);
    const auto slice = solve_f12_slice(p, g, fam);
    const auto q = three_photon_amplitude(p, fam, &slice, Mode::exact);
    const auto m = two_photon_amplitude(p, solve_f11(p, 0.0, wide, Mode::exact), 8);
    const auto tau = linspace(0.0, 20.0, 201);
    const auto c = coherence3(p, q, m, tau, tau);

    bool ridges = true;
    std::string d = "ridges:";
    for (int ch : c.channels) {
        const auto r = detect_ridges(tau, tau, c.values[ch], p.R);
        int hit = 0;
        for (double target : {-p.R, 0.0, p.R})
            if (std::any_of(r.begin(), r.end(), [&](double x) { return std::abs(x - target) <= 0.2; })) ++hit;
        ridges = ridges && hit == 3;
        d += " [";
        for (double x : r) d += fmt(" %.2f", x);
        d += " ]";
    }

    // permuting the detection order: events {μ@0, μ′@τ, μ″@τ′}, shifted so another photon sits at 0
    const auto sym = linspace(-10.0, 10.0, 201);
    const int n = int(sym.size()), mid = n / 2;
    const auto cs = coherence3(p, q, m, sym, sym, {{1, 1, 2}, {1, 2, 1}, {2, 1, 1}, {1, 2, 2}, {2, 1, 2}, {2, 2, 1}});
    auto at = [&](int x, int y, int z, int ip, int it) { return cs.values[triple_index(x, y, z)][size_t(ip) * n + it]; };
    double degen = 0;
    for (int ip = 0; ip < n; ++ip)
        for (int it = 0; it < n; ++it) {
            const double c112 = at(1, 1, 2, ip, it);
            const double c122 = at(1, 2, 2, ip, it);
            double dev = std::abs(at(2, 1, 2, it, ip) - c122);  // swap τ and τ′
            if (const int d1 = ip - it + mid; d1 >= 0 && d1 < n) {
                dev = std::max(dev, std::abs(at(1, 2, 1, d1, n - 1 - it) - c112));  // (τ′ − τ, −τ)
                dev = std::max(dev, std::abs(at(2, 1, 1, n - 1 - it, d1) - c112));  // (−τ, τ′ − τ)
            }
            if (const int d2 = it - ip + mid; d2 >= 0 && d2 < n)
                dev = std::max(dev, std::abs(at(2, 2, 1, d2, n - 1 - ip) - c122));  // (τ − τ′, −τ′)
            degen = std::max(degen, dev / std::max({1.0, c112, c122}));
        }
    const double c0 = c.values[triple_index(1, 1, 1)][0];

    EnergyFamilyTable wfam = solve_f11_family(p, doubled_lattice(g), g, Mode::weak_correlation);
    const auto qw = three_photon_amplitude(p, wfam, nullptr, Mode::weak_correlation);
    auto mw = m;
    mw.mode = Mode::weak_correlation;
    const auto cw = coherence3(p, qw, mw, {0.0}, {0.0}, {{1, 1, 1}});
    const double w0 = cw.values[triple_index(1, 1, 1)][0];

    d += fmt("  degeneracy %.2e  C3_111(0,0) exact %.3f wc %.3f", degen, c0, w0);
    return {ridges && degen < 1e-6 && w0 > c0, d};
}

std::string slurp(const fs::path& f) {
    std::ifstream in(f, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism() {
    if (cli_path.empty()) return {false, "no CLI path given"};
    const fs::path base = fs::temp_directory_path() / "gqed-acceptance-determinism";
    fs::remove_all(base);
    std::string out[2];
    for (int r = 0; r < 2; ++r) {
        const fs::path dir = base / ("run" + std::to_string(r));
        const std::string cmd =
            "\"" + cli_path + "\" validate --out \"" + dir.string() + "\" --workers 1 > /dev/null 2>&1";
        if (std::system(cmd.c_str()) != 0) return {false, "validate run failed"};
        out[r] = slurp(dir / "validate.csv");
    }
    fs::remove_all(base);
    return {!out[0].empty() && out[0] == out[1], fmt("validate.csv %g bytes, identical: %g", double(out[0].size()),
                                                     double(out[0] == out[1]))};
}

struct Criterion {
    const char* name;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1) cli_path = argv[1];
    std::set<std::string> only(argv + std::min(argc, 2), argv + argc);
    const std::vector<Criterion> all = {
        {"unitarity", unitarity},
        {"self_energy_oracle", self_energy_oracle},
        {"markov_reduction", markov_reduction},
        {"born_series_oracle", born_oracle},
        {"two_photon_sector_identity", two_photon_identity},
        {"power_conservation", power_conservation},
        {"spectrum_structure", spectrum_structure},
        {"coherence2_structure", coherence2_structure},
        {"coherence2_oracle", coherence2_oracle},
        {"poles_and_detuning_ridges", poles_and_ridges},
        {"coherence3_structure", coherence3_structure},
        {"determinism", determinism},
    };
    int failed = 0;
    for (const auto& c : all) {
        if (!only.empty() && !only.count(c.name)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", c.name, secs, o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failed;
    }
    return failed == 0 ? 0 : 1;
}
