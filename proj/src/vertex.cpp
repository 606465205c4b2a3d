#include "gqed/vertex.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gqed/errors.hpp"
#include "gqed/parallel.hpp"

namespace gqed {

std::string to_string(Mode m) {
    switch (m) {
        case Mode::exact: return "exact";
        case Mode::weak_correlation: return "weak_correlation";
        case Mode::quasi_markovian: return "quasi_markovian";
        case Mode::markovian: return "markovian";
    }
    return "exact";
}

Mode mode_from_string(const std::string& s) {
    if (s == "exact") return Mode::exact;
    if (s == "weak_correlation") return Mode::weak_correlation;
    if (s == "quasi_markovian") return Mode::quasi_markovian;
    if (s == "markovian") return Mode::markovian;
    throw ValidationError("unknown mode '" + s + "'");
}

EffectiveModel effective_model(const ModelParams& p, Mode m) {
    return EffectiveModel{p, m == Mode::markovian};
}

cplx F11Solution::regular(cplx kp) const {
    if (d_.empty()) return 0.0;
    const auto& z = contour_->z;
    cplx s = 0.0;
    for (size_t j = 0; j < d_.size(); ++j) s += d_[j] / (energy_ - kp - z[j]);
    return s;
}

cplx F11Solution::regular_de(cplx kp) const {
    if (d_.empty()) return 0.0;
    if (dd_.empty()) throw ValidationError("vertex solution carries no energy derivative");
    const auto& z = contour_->z;
    cplx s = 0.0;
    for (size_t j = 0; j < d_.size(); ++j) {
        const cplx r = 1.0 / (energy_ - kp - z[j]);
        s += dd_[j] * r - d_[j] * r * r;
    }
    return s;
}

cplx VertexTable::connected(double kp) const {
    const double dx = kp - free_term.pole_location;
    if (dx == 0.0) throw PoleProximity("connected vertex evaluated on its principal-value pole");
    return -1.0 / dx + regular(kp);
}

namespace {

Eigen::MatrixXcd f11_kernel(const EffectiveModel& m, const Contour& c, cplx E,
                            std::vector<cplx>& wrg) {
    const int n = c.size();
    wrg.resize(n);
    for (int j = 0; j < n; ++j) wrg[j] = c.weight(j) * m.rho(c.z[j]) * m.G(E - c.z[j]);
    Eigen::MatrixXcd A(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) A(i, j) = wrg[j] / (E - c.z[i] - c.z[j]);
    return A;
}

Eigen::PartialPivLU<Eigen::MatrixXcd> factor(const Eigen::MatrixXcd& A, double* rc) {
    const int n = static_cast<int>(A.rows());
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Identity(n, n) - A;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(M);
    const double r = lu.rcond();
    if (rc) *rc = r;
    if (!(r > 1e-13))
        throw SingularSystem("vertex system is numerically singular (rcond " + std::to_string(r) + ")");
    return lu;
}

std::vector<cplx> to_std(const Eigen::VectorXcd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

F11Solution solve_f11_contour(const EffectiveModel& m, std::shared_ptr<const Contour> c, cplx E,
                              bool with_derivative) {
    const int n = c->size();
    const auto& z = c->z;
    std::vector<cplx> wrg;
    Eigen::MatrixXcd A = f11_kernel(m, *c, E, wrg);
    Eigen::VectorXcd f0(n);
    for (int j = 0; j < n; ++j) f0(j) = 1.0 / (E - z[j]);
    auto lu = factor(A, nullptr);
    Eigen::VectorXcd u = lu.solve(A * f0);
    std::vector<cplx> d(n), dd;
    for (int j = 0; j < n; ++j) d[j] = wrg[j] * (f0(j) + u(j));
    if (with_derivative) {
        // (I − A) ∂u = ∂A (f0 + u) + A ∂f0
        std::vector<cplx> wr(n), dwrg(n);
        Eigen::VectorXcd df0(n), v = f0 + u;
        for (int j = 0; j < n; ++j) {
            wr[j] = c->weight(j) * m.rho(z[j]);
            const cplx G = m.G(E - z[j]);
            dwrg[j] = -wr[j] * m.dGi(E - z[j]) * G * G;
            df0(j) = -f0(j) * f0(j);
        }
        Eigen::VectorXcd rhs = A * df0;
        for (int i = 0; i < n; ++i) {
            cplx acc = 0.0;
            for (int j = 0; j < n; ++j) {
                const cplx r = 1.0 / (E - z[i] - z[j]);
                acc += (dwrg[j] * r - wrg[j] * r * r) * v(j);
            }
            rhs(i) += acc;
        }
        Eigen::VectorXcd du = lu.solve(rhs);
        dd.resize(n);
        for (int j = 0; j < n; ++j) dd[j] = dwrg[j] * v(j) + wrg[j] * (df0(j) + du(j));
    }
    return F11Solution(std::move(c), E, to_std(u), std::move(d), std::move(dd));
}

VertexTable solve_f11(const ModelParams& p, double eps, const MomentumGrid& grid, Mode mode,
                      const VertexOptions& opt) {
    p.validate();
    VertexTable t;
    t.grid = grid;
    t.energy = eps;
    t.mode = mode;
    t.free_term.pole_location = eps;
    t.free_term.regular_part.assign(grid.size(), cplx(-1.0));
    const double delta = opt.contour_depth > 0 ? opt.contour_depth : default_contour_depth(grid);
    auto c = std::make_shared<const Contour>(grid, delta);
    if (mode == Mode::markovian || mode == Mode::quasi_markovian) {
        t.values.assign(grid.size(), cplx(0.0));
        return t;
    }
    const EffectiveModel m = effective_model(p, mode);
    {
        std::vector<cplx> wrg;
        Eigen::MatrixXcd A = f11_kernel(m, *c, eps, wrg);
        Eigen::VectorXcd f0(grid.size());
        for (int j = 0; j < grid.size(); ++j) f0(j) = 1.0 / (eps - c->z[j]);
        auto lu = factor(A, &t.rcond);
        Eigen::VectorXcd u = lu.solve(A * f0);
        std::vector<cplx> d(grid.size());
        for (int j = 0; j < grid.size(); ++j) d[j] = wrg[j] * (f0(j) + u(j));
        t.solution = F11Solution(c, eps, to_std(u), std::move(d));
    }
    t.values.resize(grid.size());
    for (int i = 0; i < grid.size(); ++i) t.values[i] = t.solution.regular(grid.nodes[i]);

    if (opt.check_refinement) {
        MomentumGrid fine(grid.k_max, 2 * grid.size() - 1);
        auto cf = std::make_shared<const Contour>(fine, delta);
        F11Solution sf = solve_f11_contour(m, cf, eps);
        double num = 0, den = 0;
        for (int i = 0; i < grid.size(); ++i) {
            num = std::max(num, std::abs(sf.regular(grid.nodes[i]) - t.values[i]));
            den = std::max(den, std::abs(t.values[i]));
        }
        if (num > opt.refinement_tol * std::max(den, 1e-300))
            throw GridTooCoarse("doubling n_points moved F11 by " + std::to_string(num / den));
    }
    return t;
}

int EnergyFamilyTable::node_index(double E) const {
    auto it = std::lower_bound(energy_grid.begin(), energy_grid.end(), E);
    const double tol = 1e-9 * (energy_grid.size() > 1 ? energy_grid[1] - energy_grid[0] : 1.0);
    if (it != energy_grid.end() && std::abs(*it - E) <= tol) return int(it - energy_grid.begin());
    if (it != energy_grid.begin() && std::abs(*(it - 1) - E) <= tol)
        return int(it - energy_grid.begin()) - 1;
    return -1;
}

namespace {

// Bracketing interval [x_i, x_{i+1}] with E inside.
int bracket(const std::vector<double>& x, double E) {
    const int n = static_cast<int>(x.size());
    if (n < 2 || E < x.front() || E > x.back())
        throw PoleOutOfRange("energy " + std::to_string(E) + " outside the family grid");
    return std::clamp(int(std::upper_bound(x.begin(), x.end(), E) - x.begin()) - 1, 0, n - 2);
}

}  // namespace

cplx EnergyFamilyTable::value(double kp, double E) const {
    const int k = node_index(E);
    if (k >= 0) return solutions[k].regular(kp);
    const int i = bracket(energy_grid, E);
    const double h = energy_grid[i + 1] - energy_grid[i], t = (E - energy_grid[i]) / h;
    const auto& s0 = solutions[i];
    const auto& s1 = solutions[i + 1];
    const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
    const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
    return h00 * s0.regular(kp) + h10 * h * s0.regular_de(kp) + h01 * s1.regular(kp) +
           h11 * h * s1.regular_de(kp);
}

cplx EnergyFamilyTable::d_energy(double kp, double E) const {
    const int k = node_index(E);
    if (k >= 0) return solutions[k].regular_de(kp);
    const int i = bracket(energy_grid, E);
    const double h = energy_grid[i + 1] - energy_grid[i], t = (E - energy_grid[i]) / h;
    const auto& s0 = solutions[i];
    const auto& s1 = solutions[i + 1];
    const double d00 = 6 * t * (t - 1), d10 = (1 - t) * (1 - 3 * t);
    const double d01 = -d00, d11 = t * (3 * t - 2);
    return (d00 * s0.regular(kp) + d01 * s1.regular(kp)) / h + d10 * s0.regular_de(kp) +
           d11 * s1.regular_de(kp);
}

EnergyFamilyTable solve_f11_family(const ModelParams& p, const std::vector<double>& energy_grid,
                                   const MomentumGrid& grid, Mode mode, const VertexOptions& opt,
                                   int workers) {
    p.validate();
    if (!std::is_sorted(energy_grid.begin(), energy_grid.end()))
        throw ValidationError("energy grid must be sorted");
    EnergyFamilyTable f;
    f.energy_grid = energy_grid;
    f.mode = mode;
    const double delta = opt.contour_depth > 0 ? opt.contour_depth : default_contour_depth(grid);
    f.contour = std::make_shared<const Contour>(grid, delta);
    f.solutions.resize(energy_grid.size());
    const EffectiveModel m = effective_model(p, mode);
    const bool trivial = mode == Mode::markovian || mode == Mode::quasi_markovian;
    parallel_for(int(energy_grid.size()), workers, [&](int i) {
        const double E = energy_grid[i];
        if (trivial) {
            f.solutions[i] = F11Solution(f.contour, E, {}, {});
            return;
        }
        try {
            f.solutions[i] = solve_f11_contour(m, f.contour, E, true);
        } catch (const Error& e) {
            throw SingularSystem(std::string(e.what()) + " at energy " + std::to_string(E));
        }
    });
    return f;
}

std::vector<double> doubled_lattice(const MomentumGrid& grid) {
    const int n = grid.size();
    std::vector<double> out(2 * n - 1);
    const int c = n - 1;
    for (int m = 0; m < 2 * n - 1; ++m) out[m] = (m - c) * grid.spacing();
    return out;
}

namespace {

using Vec = std::vector<cplx>;

cplx dot(const Vec& a, const Vec& b) {
    cplx s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

double norm(const Vec& a) { return std::sqrt(std::real(dot(a, a))); }

// Restarted GMRES on (I − K)x = s, started from the fixed-point iterate x = s.
Vec gmres(const std::function<Vec(const Vec&)>& K, const Vec& s, const F12Options& opt,
          std::vector<double>& history) {
    const size_t n = s.size();
    const double bnorm = std::max(norm(s), 1e-300);
    Vec x = s;
    auto apply = [&](const Vec& v) {
        Vec kv = K(v);
        for (size_t i = 0; i < n; ++i) kv[i] = v[i] - kv[i];
        return kv;
    };
    int total = 0;
    while (total < opt.max_iter) {
        Vec r = apply(x);
        for (size_t i = 0; i < n; ++i) r[i] = s[i] - r[i];
        double beta = norm(r);
        history.push_back(beta / bnorm);
        if (beta / bnorm < opt.tol) return x;
        const int m = opt.restart;
        std::vector<Vec> V;
        V.reserve(m + 1);
        Vec v0(n);
        for (size_t i = 0; i < n; ++i) v0[i] = r[i] / beta;
        V.push_back(std::move(v0));
        Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(m + 1, m);
        std::vector<cplx> cs(m), sn(m), g(m + 1, 0.0);
        g[0] = beta;
        int k = 0;
        for (; k < m && total < opt.max_iter; ++k, ++total) {
            Vec w = apply(V[k]);
            for (int j = 0; j <= k; ++j) {
                H(j, k) = dot(V[j], w);
                for (size_t i = 0; i < n; ++i) w[i] -= H(j, k) * V[j][i];
            }
            H(k + 1, k) = norm(w);
            for (int j = 0; j < k; ++j) {
                const cplx t = std::conj(cs[j]) * H(j, k) + std::conj(sn[j]) * H(j + 1, k);
                H(j + 1, k) = -sn[j] * H(j, k) + cs[j] * H(j + 1, k);
                H(j, k) = t;
            }
            const double a = std::abs(H(k, k)), b = std::abs(H(k + 1, k));
            const double rr = std::hypot(a, b);
            cs[k] = rr > 0 ? H(k, k) / rr : cplx(1.0);
            sn[k] = rr > 0 ? H(k + 1, k) / rr : cplx(0.0);
            H(k, k) = rr;
            H(k + 1, k) = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] = std::conj(cs[k]) * g[k];
            const double res = std::abs(g[k + 1]) / bnorm;
            history.push_back(res);
            if (res < opt.tol || H(k, k) == 0.0 || std::abs(H(k + 1, k)) < 1e-300) {
                ++k;
                ++total;
                break;
            }
            Vec vn(n);
            const double hn = norm(w);
            for (size_t i = 0; i < n; ++i) vn[i] = w[i] / hn;
            V.push_back(std::move(vn));
        }
        std::vector<cplx> y(k);
        for (int i = k - 1; i >= 0; --i) {
            cplx t = g[i];
            for (int j = i + 1; j < k; ++j) t -= H(i, j) * y[j];
            y[i] = t / H(i, i);
        }
        for (int j = 0; j < k; ++j)
            for (size_t i = 0; i < n; ++i) x[i] += y[j] * V[j][i];
    }
    Vec r = apply(x);
    for (size_t i = 0; i < n; ++i) r[i] = s[i] - r[i];
    const double fin = norm(r) / bnorm;
    history.push_back(fin);
    if (fin >= opt.tol) {
        std::string h;
        for (size_t i = history.size() > 8 ? history.size() - 8 : 0; i < history.size(); ++i)
            h += " " + std::to_string(history[i]);
        throw NoConvergence("two-photon vertex iteration stalled; last residuals:" + h);
    }
    return x;
}

}  // namespace

int TwoPhotonVertexSlice::lattice_index(double c) const {
    if (lattice.empty()) return -1;
    const double h = grid.spacing();
    const double u = (c - lattice.front()) / h;
    const long i = std::lround(u);
    if (i < 0 || i >= long(lattice.size()) || std::abs(u - i) > 1e-9) return -1;
    return int(i);
}

cplx TwoPhotonVertexSlice::mixed(double r, int b) const {
    if (column_density.empty()) return 0.0;
    const int n = grid.size();
    const auto& z = contour->z;
    cplx s = 0.0;
    for (int q = 0; q < n; ++q) s += column_density[size_t(b) * n + q] / (-r - z[b] - z[q]);
    return s;
}

std::vector<cplx> TwoPhotonVertexSlice::density_for(double c) const {
    const int n = grid.size();
    const auto& z = contour->z;
    std::vector<cplx> t(n);
    for (int q = 0; q < n; ++q) {
        const cplx f11c = 1.0 / (-z[q] - c) + shifted_family[q].regular(c);
        const cplx f11q = 1.0 / (-z[q]) + zero_energy.on_contour()[q];
        t[q] = mixed(c, q) + f11c * model.G(-z[q]) * f11q;
    }
    std::vector<cplx> wrg;
    Eigen::MatrixXcd A = f11_kernel(model, *contour, -c, wrg);
    Eigen::VectorXcd tv = Eigen::Map<Eigen::VectorXcd>(t.data(), n);
    auto lu = factor(A, nullptr);
    Eigen::VectorXcd y = lu.solve(A * tv);
    std::vector<cplx> d(n);
    for (int q = 0; q < n; ++q) d[q] = wrg[q] * (y(q) + t[q]);
    return d;
}

cplx TwoPhotonVertexSlice::remainder(double b, double c) const {
    if (!exchange) return 0.0;
    const int li = lattice_index(c);
    std::vector<cplx> tmp;
    const std::vector<cplx>* d = nullptr;
    if (li >= 0) {
        d = &real_density[li];
    } else {
        tmp = density_for(c);
        d = &tmp;
    }
    const auto& z = contour->z;
    cplx s = 0.0;
    for (size_t q = 0; q < d->size(); ++q) s += (*d)[q] / (-b - c - z[q]);
    return s;
}

TwoPhotonVertexSlice solve_f12_slice(const ModelParams& p, const MomentumGrid& grid,
                                     const EnergyFamilyTable& f11_family, const F12Options& opt,
                                     int workers) {
    p.validate();
    TwoPhotonVertexSlice s;
    s.grid = grid;
    s.exchange = opt.exchange;
    s.model = effective_model(p, Mode::exact);
    s.lattice = doubled_lattice(grid);
    const int n = grid.size();
    s.values.assign(size_t(n) * n, cplx(0.0));
    if (!opt.exchange) {
        s.contour = f11_family.contour ? f11_family.contour
                                       : std::make_shared<const Contour>(grid, default_contour_depth(grid));
        return s;
    }
    if (f11_family.mode != Mode::exact && f11_family.mode != Mode::weak_correlation)
        throw ValidationError("two-photon vertex needs an exact one-photon family");
    if (!f11_family.contour || f11_family.contour->grid.size() != n ||
        std::abs(f11_family.contour->grid.k_max - grid.k_max) > 1e-12)
        throw ValidationError("one-photon family was built on a different grid");
    const int i0 = f11_family.node_index(0.0);
    if (i0 < 0) throw ValidationError("one-photon family must contain energy 0");
    s.contour = f11_family.contour;
    s.zero_energy = f11_family.solutions[i0];
    const auto& z = s.contour->z;
    const auto& m = s.model;

    s.shifted_family.resize(n);
    parallel_for(n, workers, [&](int q) { s.shifted_family[q] = solve_f11_contour(m, s.contour, -z[q]); });

    // P(b, q) on the contour and c_b(q) = w ρ G(−z_q − z_b)
    Vec P(size_t(n) * n), C(size_t(n) * n);
    std::vector<cplx> wr(n), Gq(n), f11q(n);
    for (int q = 0; q < n; ++q) {
        wr[q] = s.contour->weight(q) * m.rho(z[q]);
        Gq[q] = m.G(-z[q]);
        f11q[q] = 1.0 / (-z[q]) + s.zero_energy.on_contour()[q];
    }
    parallel_for(n, workers, [&](int b) {
        for (int q = 0; q < n; ++q) {
            const cplx f11b = 1.0 / (-z[q] - z[b]) + s.shifted_family[q].on_contour()[b];
            P[size_t(b) * n + q] = f11b * Gq[q] * f11q[q];
            C[size_t(b) * n + q] = wr[q] * m.G(-z[q] - z[b]);
        }
    });
    // 1/(−z_a − z_b − z_q) depends only on a + b + q
    const double h = grid.spacing(), delta = s.contour->delta;
    std::vector<cplx> inv(3 * n - 2);
    for (int t = 0; t < 3 * n - 2; ++t) {
        const double x = grid.nodes[0] * 3 + t * h;
        inv[t] = 1.0 / cplx(-x, 3 * delta);
    }
    // out(a, b) = Σ_q inv[a+b+q] y_b(q), stored out[a*n+b], y[b*n+q]
    auto contract = [&](const Vec& y) {
        Vec out(size_t(n) * n);
        parallel_for(n, workers, [&](int a) {
            for (int b = 0; b < n; ++b) {
                const cplx* yb = &y[size_t(b) * n];
                const cplx* iv = &inv[a + b];
                cplx acc = 0.0;
                for (int q = 0; q < n; ++q) acc += iv[q] * yb[q];
                out[size_t(a) * n + b] = acc;
            }
        });
        return out;
    };
    Vec yP(size_t(n) * n);
    for (size_t i = 0; i < yP.size(); ++i) yP[i] = C[i] * P[i];
    const Vec source = contract(yP);
    auto K = [&](const Vec& X) {
        Vec y(size_t(n) * n);
        for (int b = 0; b < n; ++b)
            for (int q = 0; q < n; ++q)
                y[size_t(b) * n + q] =
                    C[size_t(b) * n + q] * (X[size_t(q) * n + b] + X[size_t(b) * n + q]);
        return contract(y);
    };
    const Vec X = gmres(K, source, opt, s.iteration_report);

    s.column_density.resize(size_t(n) * n);
    for (int b = 0; b < n; ++b)
        for (int q = 0; q < n; ++q) {
            const size_t i = size_t(b) * n + q;
            s.column_density[i] = C[i] * (X[size_t(q) * n + b] + X[i] + P[i]);
        }

    s.real_density.resize(s.lattice.size());
    parallel_for(int(s.lattice.size()), workers,
                 [&](int l) { s.real_density[l] = s.density_for(s.lattice[l]); });

    const int off = (n - 1) / 2;
    parallel_for(n, workers, [&](int i) {
        for (int j = 0; j < n; ++j) {
            const auto& d = s.real_density[j + off];
            cplx acc = 0.0;
            for (int q = 0; q < n; ++q) acc += d[q] / (-grid.nodes[i] - grid.nodes[j] - z[q]);
            s.values[size_t(i) * n + j] = acc;
        }
    });
    return s;
}

}  // namespace gqed
