#include <doctest.h>

#include "gqed/errors.hpp"
#include "gqed/observables.hpp"

using namespace gqed;

namespace {

TwoPhotonAmplitude zero_m(const MomentumGrid& g) {
    TwoPhotonAmplitude m;
    m.grid = g;
    for (auto& v : m.m_values) v.assign(g.size(), cplx(0.0));
    return m;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
    return v;
}

}  // namespace

TEST_SUITE("observables") {

TEST_CASE("no scatterer, no inelastic light") {
    const MomentumGrid g(10.0, 101);
    auto peak = [&](double gamma) {
        const auto p = make_params(gamma, 2.0, 0.3, 1.0);
        const auto s = spectral_density(p, solve_f11(p, 0.0, g, Mode::exact), 0.0, 2);
        double mx = 0;
        for (int mu = 0; mu < 2; ++mu)
            for (double v : s.s_inel[mu]) mx = std::max(mx, std::abs(v));
        CHECK(s.s_el_linear[0] == doctest::Approx(1.0));
        CHECK(s.s_el_linear[1] == doctest::Approx(0.0));
        return mx;
    };
    const double a = peak(1e-6), b = peak(1e-8);
    CHECK(a < 1e-12);
    CHECK(b / a == doctest::Approx(1e-4).epsilon(1e-3));
}

TEST_CASE("spectrum conserves power and is non-negative") {
    const auto p = make_params(1.0, 1.0, pi / 4);
    const auto s = spectral_density(p, solve_f11(p, 0.0, MomentumGrid(40.0, 1601), Mode::exact));
    CHECK(std::abs(s.relative_residual()) < 1e-3);
    for (int mu = 0; mu < 2; ++mu)
        for (double v : s.s_inel[mu]) CHECK(v >= 0.0);
}

TEST_CASE("spectrum peaks at delay-shifted frequencies") {
    const auto p = make_params(1.0, 5.0, pi / 4);
    const auto s = spectral_density(p, solve_f11(p, 0.0, MomentumGrid(40.0, 1601), Mode::exact));
    const auto peaks = find_peaks(s.k, s.total());
    REQUIRE(peaks.size() >= 2);
    CHECK(std::abs(peaks[0].k) == doctest::Approx(0.3971).epsilon(2e-3));
    CHECK(peaks[0].k == doctest::Approx(-peaks[1].k));
}

TEST_CASE("peak finder reports height and width") {
    const auto x = linspace(-5, 5, 1001);
    std::vector<double> y;
    const double sig = 1.0 / 2.354820045;
    for (double v : x)
        y.push_back(2.0 * std::exp(-0.5 * (v - 1) * (v - 1) / (sig * sig)) +
                    std::exp(-0.5 * (v + 2) * (v + 2) / (sig * sig)));
    const auto peaks = find_peaks(x, y);
    REQUIRE(peaks.size() == 2);
    CHECK(peaks[0].k == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(peaks[0].fwhm == doctest::Approx(1.0).epsilon(2e-2));
    CHECK(peaks[1].k == doctest::Approx(-2.0).epsilon(1e-2));
}

TEST_CASE("kink detector finds derivative jumps only") {
    const auto t = linspace(0, 10, 401);
    std::vector<double> y;
    for (double v : t) y.push_back(std::sin(v) + 0.5 * std::abs(v - 3.0) + 0.2 * std::abs(v - 7.0));
    const auto k = detect_kinks(t, y, {});
    REQUIRE(k.size() == 2);
    CHECK(k[0] == doctest::Approx(3.0));
    CHECK(k[1] == doctest::Approx(7.0));
}

TEST_CASE("coherent light has unit coherence") {
    const auto p = make_params(1.0, 5.0, pi / 4);
    const MomentumGrid g(20.0, 201);
    const auto taus = linspace(0, 10, 21);
    const auto c2 = coherence2(p, zero_m(g), taus);
    for (int c : c2.channels)
        for (double v : c2.values[c]) CHECK(v == doctest::Approx(1.0));
    ThreePhotonAmplitude q;
    q.grid = g;
    for (auto& v : q.q_values) v.assign(size_t(g.size()) * g.size(), cplx(0.0));
    const auto c3 = coherence3(p, q, zero_m(g), taus, taus);
    for (int c : c3.channels)
        for (double v : c3.values[c]) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("extinguished carrier makes coherence undefined") {
    const auto p = make_params(1.0, 5.0, 0.0);
    CHECK_THROWS_AS(coherence2(p, zero_m(MomentumGrid(20.0, 101)), {0.0}), DegenerateNormalization);
}

TEST_CASE("Markov regime coherence relaxes to one") {
    const auto p = make_params(1.0, 1e-3, pi / 4);
    const MomentumGrid g(40.0, 1601);
    const auto m = two_photon_amplitude(p, solve_f11(p, 0.0, g, Mode::exact), 8);
    const auto c = coherence2(p, m, {0.0, 10.0});
    for (int ch : c.channels) {
        CHECK(c.values[ch][0] >= 0.0);
        CHECK(std::abs(c.values[ch][1] - 1.0) < 1e-3);
    }
}

TEST_CASE("ridge detector finds diagonal creases") {
    const auto t = linspace(0, 10, 101);
    const size_t n = t.size();
    std::vector<double> v(n * n);
    for (size_t a = 0; a < n; ++a)
        for (size_t b = 0; b < n; ++b) {
            const double d = t[a] - t[b];
            v[a * n + b] = std::cos(0.3 * t[a]) * std::cos(0.2 * t[b]) + 0.4 * std::abs(d - 3.0) + 0.4 * std::abs(d + 3.0);
        }
    const auto r = detect_ridges(t, t, v, 3.0);
    REQUIRE(r.size() == 2);
    CHECK(r[0] == doctest::Approx(-3.0).epsilon(0.02));
    CHECK(r[1] == doctest::Approx(3.0).epsilon(0.02));
}

TEST_CASE("point-coupled pole") {
    const auto p = make_params(1.0, 0.0, 0.0, 0.4);
    const auto poles = lambert_poles(p, {0});
    REQUIRE(!poles.empty());
    CHECK(std::abs(poles[0].pole - cplx(-0.4, -2.0)) < 1e-14);
}

TEST_CASE("delayed poles satisfy the propagator equation") {
    const auto p = make_params(1.0, 5.0, pi / 4, 0.3);
    const auto poles = lambert_poles(p, {-1, 0, 1});
    CHECK(poles.size() == 6);
    for (const auto& r : poles) {
        const cplx k = r.family < 0 ? r.pole : -r.pole;
        const cplx eq = k + p.detuning + I * p.gamma * (1.0 + std::exp(I * (k * p.R + p.carrier_phase)));
        CHECK(std::abs(eq) < 1e-8);
        CHECK(r.residual < 1e-8);
    }
}

TEST_CASE("poles at known parameters") {
    const auto poles = lambert_poles(make_params(1.0, 5.0, pi / 4), {0});
    bool found = false;
    for (const auto& r : poles)
        if (r.family < 0) {
            found = true;
            CHECK(r.pole.real() == doctest::Approx(0.3951255194).epsilon(1e-8));
            CHECK(r.pole.imag() == doctest::Approx(-0.01235953280).epsilon(1e-8));
        }
    CHECK(found);
}

TEST_CASE("detuning scan symmetry and consistency") {
    const MomentumGrid g(20.0, 401);
    const std::vector<double> deltas{-0.5, 0.0, 0.5};
    std::vector<double> ks;
    for (int i = 150; i <= 250; i += 5) ks.push_back(g.nodes[i]);
    const auto sym = detuning_scan(make_params(1.0, 3.0, 0.0), deltas, g, ks);
    CHECK(sym.asymmetry < 1e-10);

    const auto p = make_params(1.0, 3.0, pi / 4);
    const auto scan = detuning_scan(p, deltas, g, ks);
    const auto s = spectral_density(p, solve_f11(p, 0.0, g, Mode::exact), 0.0, 2);
    const auto total = s.total();
    for (size_t i = 0; i < ks.size(); ++i) {
        const int at = g.node_index(ks[i]);
        CHECK(std::abs(scan.s_inel[1][i] - total[at]) <= 1e-12 * total[at]);
    }
}

}
