#include "gqed/numerics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>

#include "gqed/errors.hpp"

namespace gqed {

MomentumGrid::MomentumGrid(double kmax, int n) : k_max(kmax), n_points(n) {
    if (n < 9 || n % 2 == 0) throw ValidationError("n_points must be odd and >= 9");
    if (!(kmax > 0)) throw ValidationError("k_max must be positive");
    nodes.resize(n);
    weights.assign(n, 0.0);
    const double h = 2 * kmax / (n - 1);
    const int c = (n - 1) / 2;
    for (int i = 0; i < n; ++i) nodes[i] = (i - c) * h;
    nodes[0] = -kmax;
    nodes[n - 1] = kmax;
    static const double end[3] = {3.0 / 8, 7.0 / 6, 23.0 / 24};
    for (int i = 0; i < n; ++i) weights[i] = h;
    for (int i = 0; i < 3; ++i) {
        weights[i] = end[i] * h;
        weights[n - 1 - i] = end[i] * h;
    }
}

int MomentumGrid::node_index(double x) const {
    const double h = spacing();
    const double u = (x + k_max) / h;
    const long i = std::lround(u);
    if (i < 0 || i >= n_points) return -1;
    return std::abs(u - i) < 1e-9 ? static_cast<int>(i) : -1;
}

Contour::Contour(const MomentumGrid& g, double d) : grid(g), delta(d), z(g.n_points) {
    for (int j = 0; j < g.n_points; ++j) z[j] = cplx(g.nodes[j], -d);
}

double default_contour_depth(const MomentumGrid& g) { return 3.0 * g.spacing(); }

namespace {

// Taylor coefficients at p of the cubic through the 4 nodes around p.
std::array<cplx, 4> local_cubic(const std::vector<cplx>& f, const MomentumGrid& g, double p,
                                int& first) {
    const double h = g.spacing();
    int i0 = static_cast<int>(std::floor((p + g.k_max) / h));
    first = std::clamp(i0 - 1, 0, g.n_points - 4);
    // Newton form then expand about p
    double x[4];
    cplx d[4];
    for (int m = 0; m < 4; ++m) {
        x[m] = g.nodes[first + m];
        d[m] = f[first + m];
    }
    for (int lvl = 1; lvl < 4; ++lvl)
        for (int m = 3; m >= lvl; --m) d[m] = (d[m] - d[m - 1]) / (x[m] - x[m - lvl]);
    // polynomial in (x − p): Horner on Newton basis
    std::array<cplx, 4> c{d[3], 0.0, 0.0, 0.0};
    for (int m = 2; m >= 0; --m) {
        // c(x) <- c(x)·((x − p) + (p − x[m])) + d[m]
        const double s = p - x[m];
        std::array<cplx, 4> nc{};
        for (int j = 0; j < 4; ++j) {
            if (j + 1 < 4) nc[j + 1] += c[j];
            nc[j] += c[j] * s;
        }
        nc[0] += d[m];
        c = nc;
    }
    return c;
}

void check_pole(double pole, const MomentumGrid& g) {
    if (!(std::abs(pole) < g.k_max - 2 * g.spacing()))
        throw PoleOutOfRange("principal-value pole within two grid spacings of the cutoff");
}

}  // namespace

cplx pv_integrate(const std::vector<cplx>& f, double pole, const MomentumGrid& g) {
    check_pole(pole, g);
    const double h = g.spacing();
    const int at = g.node_index(pole);
    if (at >= 3 && at + 3 < g.n_points) {
        // pole on a node: sixth-order central slope there, plain quotients elsewhere
        const cplx fp = f[at];
        const cplx slope = (-f[at - 3] + 9.0 * f[at - 2] - 45.0 * f[at - 1] + 45.0 * f[at + 1] -
                            9.0 * f[at + 2] + f[at + 3]) / (60.0 * h);
        cplx s = 0.0;
        for (int j = 0; j < g.n_points; ++j)
            s += g.weights[j] * (j == at ? slope : (f[j] - fp) / (g.nodes[j] - pole));
        return s + fp * std::log((g.k_max - pole) / (g.k_max + pole));
    }
    int first = 0;
    const auto c = local_cubic(f, g, pole, first);
    const cplx fp = c[0];
    cplx s = 0.0;
    for (int j = 0; j < g.n_points; ++j) {
        const double d = g.nodes[j] - pole;
        cplx q;
        if (std::abs(d) < h && j >= first && j < first + 4)
            q = c[1] + d * (c[2] + d * c[3]);
        else
            q = (f[j] - fp) / d;
        s += g.weights[j] * q;
    }
    return s + fp * std::log((g.k_max - pole) / (g.k_max + pole));
}

cplx pv_integrate(const std::function<cplx(double)>& f, double pole, const MomentumGrid& g) {
    check_pole(pole, g);
    const double h = g.spacing();
    const cplx fp = f(pole);
    cplx s = 0.0;
    for (int j = 0; j < g.n_points; ++j) {
        const double d = g.nodes[j] - pole;
        cplx q;
        if (std::abs(d) < 1e-6 * h) {
            const double e = 1e-3 * h;
            q = (f(pole + e) - f(pole - e)) / (2 * e);
        } else {
            q = (f(g.nodes[j]) - fp) / d;
        }
        s += g.weights[j] * q;
    }
    return s + fp * std::log((g.k_max - pole) / (g.k_max + pole));
}

cplx TailSpec::operator()(double k) const {
    cplx s = 0.0;
    for (const auto& t : terms) {
        cplx d = k - t.p;
        if (t.order == 2) d *= (k - t.p);
        s += t.c * std::exp(I * t.kappa * k) / d;
    }
    return s;
}

cplx TailSpec::transform(double t) const {
    cplx s = 0.0;
    for (const auto& term : terms) {
        const double u = t + term.kappa;
        const cplx e = std::exp(I * term.p * u);
        const bool upper = term.p.imag() > 0;
        if (term.order == 1) {
            if (u == 0.0)
                s += term.c * (upper ? I * pi : -I * pi);
            else if (upper && u > 0)
                s += term.c * 2.0 * pi * I * e;
            else if (!upper && u < 0)
                s += -term.c * 2.0 * pi * I * e;
        } else {
            if (upper && u > 0)
                s += -term.c * 2.0 * pi * u * e;
            else if (!upper && u < 0)
                s += term.c * 2.0 * pi * u * e;
        }
    }
    return s;
}

TailSpec pole_tail(cplx c, cplx p) { return TailSpec{{TailTerm{c, 0.0, p, 1}}}; }

TailSpec fit_tail(const std::vector<cplx>& f, const MomentumGrid& g, std::vector<double> kappas,
                  double w) {
    std::sort(kappas.begin(), kappas.end());
    std::vector<double> uniq;
    for (double k : kappas)
        if (uniq.empty() || std::abs(k - uniq.back()) > 1e-12) uniq.push_back(k);
    std::vector<int> rows;
    for (int j = 0; j < g.n_points; ++j)
        if (std::abs(g.nodes[j]) >= 0.5 * g.k_max) rows.push_back(j);
    const int nb = 2 * static_cast<int>(uniq.size());
    Eigen::MatrixXcd A(rows.size(), nb);
    Eigen::VectorXcd b(rows.size());
    for (size_t r = 0; r < rows.size(); ++r) {
        const double k = g.nodes[rows[r]];
        const double den = k * k + w * w;
        for (size_t m = 0; m < uniq.size(); ++m) {
            const cplx e = std::exp(I * uniq[m] * k);
            A(r, 2 * m) = e / den;
            A(r, 2 * m + 1) = e * k / (den * den);
        }
        b(r) = f[rows[r]];
    }
    // column scaling for conditioning
    Eigen::VectorXd scale(nb);
    for (int c = 0; c < nb; ++c) {
        scale(c) = A.col(c).norm();
        if (scale(c) > 0) A.col(c) /= scale(c);
    }
    Eigen::VectorXcd x = A.colPivHouseholderQr().solve(b);
    TailSpec t;
    for (size_t m = 0; m < uniq.size(); ++m) {
        const cplx a = x(2 * m) / scale(2 * m);
        const cplx bb = x(2 * m + 1) / scale(2 * m + 1);
        t.terms.push_back({a / (2.0 * I * w), uniq[m], I * w, 1});
        t.terms.push_back({-a / (2.0 * I * w), uniq[m], -I * w, 1});
        t.terms.push_back({bb / (4.0 * I * w), uniq[m], I * w, 2});
        t.terms.push_back({-bb / (4.0 * I * w), uniq[m], -I * w, 2});
    }
    return t;
}

cplx fourier_oscillatory(const std::vector<cplx>& f, double t, const MomentumGrid& g,
                         const TailSpec& tail) {
    if (!tail.empty()) {
        for (int j : {0, g.n_points - 1}) {
            const double a = std::abs(f[j]);
            if (std::abs(f[j] - tail(g.nodes[j])) > 0.1 * a && a > 0)
                throw TailMismatch("tail model deviates from integrand at the cutoff");
        }
    }
    cplx s = 0.0;
    for (int j = 0; j < g.n_points; ++j) {
        const double k = g.nodes[j];
        cplx v = f[j];
        if (!tail.empty()) v -= tail(k);
        s += g.weights[j] * std::exp(I * k * t) * v;
    }
    if (!tail.empty()) s += tail.transform(t);
    return s;
}

cplx fourier_2d(const std::vector<cplx>& f, double t2, double t1, const MomentumGrid& g,
                const std::vector<TailSpec>* inner_tails) {
    const int n = g.n_points;
    std::vector<cplx> col(n);
    cplx s = 0.0;
    for (int iq = 0; iq < n; ++iq) {
        for (int ik = 0; ik < n; ++ik) col[ik] = f[static_cast<size_t>(ik) * n + iq];
        const TailSpec none;
        const TailSpec& tl = inner_tails ? (*inner_tails)[iq] : none;
        s += g.weights[iq] * std::exp(I * g.nodes[iq] * t2) * fourier_oscillatory(col, t1, g, tl);
    }
    return s;
}

namespace {

int unwinding(cplx w, cplx z) {
    const cplx u = w + std::log(w) - std::log(z);
    return static_cast<int>(std::lround(u.imag() / (2 * pi)));
}

bool halley(cplx z, cplx& w) {
    for (int it = 0; it < 100; ++it) {
        const cplx e = std::exp(w);
        const cplx f = w * e - z;
        const cplx wp1 = w + 1.0;
        if (std::abs(wp1) < 1e-300) return std::abs(f) <= 1e-12 * std::max(1.0, std::abs(z));
        const cplx step = f / (e * wp1 - (w + 2.0) * f / (2.0 * wp1));
        w -= step;
        if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) return false;
        if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(w))) break;
    }
    return std::abs(w * std::exp(w) - z) <= 1e-12 * std::max(1.0, std::abs(z));
}

}  // namespace

cplx lambert_w(cplx z, int n) {
    if (z == 0.0) {
        if (n == 0) return 0.0;
        throw NoConvergence("lambert_w: z = 0 is singular on non-principal branches");
    }
    const double e = std::exp(1.0);
    const cplx p = std::sqrt(2.0 * (e * z + 1.0));
    if (std::abs(e * z + 1.0) < 1e-14 && (n == 0 || n == -1)) return -1.0;
    std::vector<cplx> seeds;
    if (std::abs(e * z + 1.0) < 0.3) {
        const cplx up = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
        const cplx dn = -1.0 - p - p * p / 3.0 - 11.0 / 72.0 * p * p * p;
        if (n == 0) seeds = {up, dn};
        if (n == -1) seeds = {dn, up};
        if (n == 1) seeds = {dn, up};
    }
    if (n == 0 && std::abs(z) < 0.3) seeds.push_back(z * (1.0 - z));
    const cplx L1 = std::log(z) + 2.0 * pi * I * static_cast<double>(n);
    if (std::abs(L1) > 0) seeds.push_back(L1 - std::log(L1) + std::log(L1) / L1);
    seeds.push_back(L1 - std::log(L1));
    seeds.push_back(static_cast<double>(n) * 2.0 * pi * I);
    for (cplx w : seeds) {
        if (!halley(z, w)) continue;
        if (unwinding(w, z) == n || (z.imag() == 0.0 && std::abs(w.imag()) < 1e-12 &&
                                     (n == 0 || n == -1)))
            return w;
    }
    throw NoConvergence("lambert_w: Halley iteration failed to reach requested branch");
}

double default_dq_threshold(cplx a, cplx b, double scale) {
    return 1e-6 * std::max({std::abs(a), std::abs(b), scale});
}

cplx safe_difference_quotient(const std::function<cplx(cplx)>& f,
                              const std::function<cplx(cplx)>& df, cplx a, cplx b,
                              double threshold) {
    if (std::abs(a - b) > threshold) return (f(a) - f(b)) / (a - b);
    const cplx m = 0.5 * (a + b);
    const cplx dm = df(m);
    if (a == b) return dm;
    return dm + (df(a) - 2.0 * dm + df(b)) / 6.0;
}

}  // namespace gqed
