#include <doctest.h>

#include "gqed/errors.hpp"
#include "gqed/oracles.hpp"
#include "gqed/vertex.hpp"

using namespace gqed;

namespace {

double sup_diff_on_nodes(const VertexTable& a, const VertexTable& b) {
    double d = 0;
    for (int i = 0; i < a.grid.size(); ++i) d = std::max(d, std::abs(a.values[i] - b.values[i]));
    return d;
}

}  // namespace

TEST_SUITE("vertex") {

TEST_CASE("markovian vertex is the free principal-value term") {
    const auto p = make_params(1.0, 5.0, pi / 4);
    const MomentumGrid g(20.0, 201);
    const auto t = solve_f11(p, 0.0, g, Mode::markovian);
    for (int i = 0; i < g.size(); ++i) {
        CHECK(t.values[i] == cplx(0.0));
        if (g.nodes[i] != 0.0) CHECK(std::abs(t.connected(g.nodes[i]) - 1.0 / (0.0 - g.nodes[i])) < 1e-15);
    }
}

TEST_CASE("decoupled atom reduces the exact vertex to the free term") {
    const auto p = make_params(1e-9, 2.0, 0.3);
    const MomentumGrid g(20.0, 201);
    const auto ex = solve_f11(p, 0.0, g, Mode::exact);
    const auto mk = solve_f11(p, 0.0, g, Mode::markovian);
    CHECK(sup_diff_on_nodes(ex, mk) < 1e-7);
}

TEST_CASE("short delay reproduces the Markov closed form") {
    const auto p = make_params(1.0, 1e-3, 0.0);
    const MomentumGrid g(40.0, 1601);
    const auto ex = solve_f11(p, 0.0, g, Mode::exact);
    double num = 0, den = 0;
    for (int i = 0; i < g.size(); ++i) {
        const double k = g.nodes[i];
        if (std::abs(k) < p.gamma) continue;
        num = std::max(num, std::abs(ex.connected(k) - 1.0 / (0.0 - k)));
        den = std::max(den, std::abs(1.0 / k));
    }
    CHECK(num / den < 1e-2);
}

TEST_CASE("retarded side of the real axis is continuous") {
    const auto p = make_params(1.0, 3.0, pi / 4);
    const MomentumGrid g(20.0, 401);
    const auto t = solve_f11(p, 0.0, g, Mode::exact);
    auto c = std::make_shared<const Contour>(g, default_contour_depth(g));
    const auto shifted = solve_f11_contour(effective_model(p, Mode::exact), c, cplx(0.0, 1e-3));
    double d = 0, scale = 0;
    for (int i = 0; i < g.size(); ++i) {
        d = std::max(d, std::abs(shifted.regular(g.nodes[i]) - t.values[i]));
        scale = std::max(scale, std::abs(t.values[i]));
    }
    CHECK(d < 10 * 1e-3 * std::max(1.0, scale));
}

TEST_CASE("vertex solution converges at least at second order at fixed contour depth") {
    const auto p = make_params(1.0, 2.0, pi / 4);
    VertexOptions opt;
    opt.contour_depth = 0.2;
    const auto a = solve_f11(p, 0.0, MomentumGrid(20.0, 401), Mode::exact, opt);
    const auto b = solve_f11(p, 0.0, MomentumGrid(20.0, 801), Mode::exact, opt);
    const auto c = solve_f11(p, 0.0, MomentumGrid(20.0, 1601), Mode::exact, opt);
    double d1 = 0, d2 = 0;
    for (int i = 0; i < 401; ++i) {
        d1 = std::max(d1, std::abs(a.values[i] - b.values[2 * i]));
        d2 = std::max(d2, std::abs(b.values[2 * i] - c.values[4 * i]));
    }
    CHECK(d1 / d2 >= 4.0);
}

TEST_CASE("refinement check flags an under-resolved grid") {
    const auto p = make_params(1.0, 8.0, pi / 4);
    VertexOptions opt;
    opt.check_refinement = true;
    CHECK_THROWS_AS(solve_f11(p, 0.0, MomentumGrid(40.0, 161), Mode::exact, opt), GridTooCoarse);
    CHECK_NOTHROW(solve_f11(p, 0.0, MomentumGrid(40.0, 401), Mode::exact, opt));
}

TEST_CASE("energy family interpolates between its nodes") {
    const auto p = make_params(1.0, 2.0, pi / 4);
    const MomentumGrid g(10.0, 101);
    const auto fam = solve_f11_family(p, doubled_lattice(g), g, Mode::exact);
    const double h = g.spacing();
    for (double E : {0.5 * h, 3.5 * h, -7.5 * h}) {
        const auto direct = solve_f11(p, E, g, Mode::exact);
        double num = 0, den = 0;
        for (int i = 0; i < g.size(); ++i) {
            num = std::max(num, std::abs(fam.value(g.nodes[i], E) - direct.values[i]));
            den = std::max(den, std::abs(direct.values[i]));
        }
        CHECK(num / den < 1e-4);
    }
}

TEST_CASE("single-energy family matches the direct solve") {
    const auto p = make_params(1.0, 2.0, pi / 4);
    const MomentumGrid g(10.0, 101);
    const auto fam = solve_f11_family(p, {0.0}, g, Mode::exact);
    const auto direct = solve_f11(p, 0.0, g, Mode::exact);
    for (int i = 0; i < g.size(); ++i) CHECK(std::abs(fam.value(g.nodes[i], 0.0) - direct.values[i]) < 1e-12);
}

TEST_CASE("markovian family carries no regular part") {
    const auto p = make_params(1.0, 2.0, pi / 4);
    const MomentumGrid g(10.0, 51);
    const auto fam = solve_f11_family(p, doubled_lattice(g), g, Mode::markovian);
    for (double E : {-3.0, 0.0, 1.2}) CHECK(std::abs(fam.value(0.7, E)) == 0.0);
}

TEST_CASE("two-photon remainder without exchange vanishes") {
    const auto p = make_params(1.0, 2.0, pi / 4);
    const MomentumGrid g(10.0, 101);
    const auto fam = solve_f11_family(p, doubled_lattice(g), g, Mode::exact);
    F12Options opt;
    opt.exchange = false;
    const auto slice = solve_f12_slice(p, g, fam, opt);
    for (auto [b, c] : std::vector<std::pair<double, double>>{{0.4, -1.0}, {2.2, 0.6}})
        CHECK(std::abs(slice.remainder(b, c)) < 1e-6);
}

TEST_CASE("two-photon remainder against the Born series") {
    const auto p = make_params(0.05, 1.0, pi / 4);
    const MomentumGrid g(15.0, 201);
    const auto fam = solve_f11_family(p, doubled_lattice(g), g, Mode::exact);
    const auto slice = solve_f12_slice(p, g, fam);
    const MomentumGrid gb(15.0, 3001);
    const auto zero = born_f11(p, 0.0, gb, 3);
    for (auto [b, c] : std::vector<std::pair<double, double>>{{-0.7, 0.4}, {0.5, -1.7}, {2.1, -1.3}}) {
        const cplx ex = slice.remainder(b, c), bo = born_f12(p, b, c, zero);
        CHECK(std::abs(ex - bo) < 0.15 * std::abs(bo));
    }
}

}
