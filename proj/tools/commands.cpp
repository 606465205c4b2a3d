#include "gqed/commands.hpp"

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <random>

#include "gqed/cache.hpp"
#include "gqed/errors.hpp"
#include "gqed/observables.hpp"
#include "gqed/parallel.hpp"

namespace gqed {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12e", v == 0.0 ? 0.0 : v);
    return buf;
}

class Csv {
public:
    Csv(const fs::path& path, const std::string& description, const std::vector<std::string>& columns)
        : out_(path, std::ios::binary) {
        if (!out_) throw ValidationError("cannot write '" + path.string() + "'");
        out_ << "# " << description << "\n";
        for (size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
        out_ << "\n";
    }
    void row(const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
        out_ << "\n";
    }
    void row(const std::vector<double>& cells) {
        std::vector<std::string> s;
        for (double v : cells) s.push_back(fmt(v));
        row(s);
    }

private:
    std::ofstream out_;
};

json grid_json(const MomentumGrid& g) {
    return {{"k_max", g.k_max}, {"n_points", g.n_points}, {"spacing", g.spacing()}};
}

std::string pair_name(int c) { return std::to_string(c / 2 + 1) + std::to_string(c % 2 + 1); }

std::string triple_name(int c) {
    return std::to_string(c / 4 + 1) + std::to_string(c / 2 % 2 + 1) + std::to_string(c % 2 + 1);
}

std::string hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

struct Context {
    RunConfig cfg;
    fs::path out_dir;
    int workers = 1;
    std::ostream& out;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    json meta = json::object();

    fs::path file(const std::string& name) const { return out_dir / name; }

    VertexTable vertex(const ModelParams& p, const MomentumGrid& g, Mode mode, double energy = 0.0) {
        const std::uint64_t h = fnv1a(vertex_key(p, g, mode, energy));
        const fs::path path = out_dir / "cache" / ("vertex-" + hex(h) + ".bin");
        if (auto t = load_vertex_table(path.string(), h)) {
            meta["cache"].push_back({{"file", path.filename().string()}, {"hit", true}});
            return *t;
        }
        VertexTable t = solve_f11(p, energy, g, mode);
        fs::create_directories(path.parent_path());
        save_vertex_table(path.string(), h, t);
        meta["cache"].push_back({{"file", path.filename().string()}, {"hit", false}});
        return t;
    }

    void finish(const std::string& name) {
        meta["config"] = cfg.echo;
        meta["mode"] = to_string(cfg.mode);
        meta["grid"] = grid_json(cfg.grid());
        meta["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::ofstream f(file(name + ".meta.json"), std::ios::binary);
        f << meta.dump(2) << "\n";
    }
};

std::vector<double> range_or(const Range& r, double start, double stop, int points) {
    if (r.points > 0) return r.values();
    return Range{start, stop, points}.values();
}

double delay_scale(const RunConfig& c) { return c.R > 0 ? c.R : 5.0 / c.gamma; }

int run_spectrum(Context& cx) {
    const auto p = cx.cfg.params();
    const auto f11 = cx.vertex(p, cx.cfg.grid(), cx.cfg.mode);
    const auto s = spectral_density(p, f11, 0.0, 2 * cx.cfg.refine);
    const auto total = s.total();
    Csv csv(cx.file("spectrum.csv"),
            "k, inelastic spectral density per channel and summed, per unit flux squared",
            {"k", "s_inel_1", "s_inel_2", "s_inel_total"});
    for (size_t i = 0; i < s.k.size(); ++i) csv.row({s.k[i], s.s_inel[0][i], s.s_inel[1][i], total[i]});

    auto peaks = find_peaks(s.k, total);
    if (peaks.size() > 4) peaks.resize(4);
    cx.meta["elastic_linear"] = s.s_el_linear;
    cx.meta["elastic_quadratic"] = s.s_el_quadratic;
    cx.meta["inelastic_total"] = s.inelastic_total;
    cx.meta["residuals"] = {{"power", s.power_residual}, {"power_relative", s.relative_residual()}};
    for (const auto& pk : peaks) cx.meta["peaks"].push_back({{"k", pk.k}, {"height", pk.height}, {"fwhm", pk.fwhm}});
    cx.finish("spectrum");

    cx.out << "spectrum  gamma*R=" << cx.cfg.gamma * cx.cfg.R << "  mode=" << to_string(cx.cfg.mode) << "\n";
    cx.out << "  peak k            height          fwhm\n";
    for (const auto& pk : peaks) cx.out << "  " << fmt(pk.k) << "  " << fmt(pk.height) << "  " << fmt(pk.fwhm) << "\n";
    cx.out << "  power residual (relative)  " << fmt(s.relative_residual()) << "\n";
    if (s.relative_residual() > cx.cfg.tol_power)
        throw ConservationViolation("power residual " + fmt(s.relative_residual()) + " exceeds " +
                                    fmt(cx.cfg.tol_power));
    return 0;
}

int run_g2(Context& cx) {
    const auto p = cx.cfg.params();
    const auto f11 = cx.vertex(p, cx.cfg.grid(), cx.cfg.mode);
    const auto m = two_photon_amplitude(p, f11, cx.cfg.refine);
    const auto taus = range_or(cx.cfg.tau, 0.0, 4 * delay_scale(cx.cfg), 401);
    const auto c = coherence2(p, m, taus);
    std::vector<std::string> cols{"tau"};
    for (int ch : c.channels) cols.push_back("C2_" + pair_name(ch));
    Csv csv(cx.file("g2.csv"), "tau, second-order coherence C2_{mu' mu}(tau) per channel pair", cols);
    for (size_t i = 0; i < taus.size(); ++i) {
        std::vector<double> row{taus[i]};
        for (int ch : c.channels) row.push_back(c.values[ch][i]);
        csv.row(row);
    }
    cx.out << "g2  mode=" << c.mode << "\n  pair  C2(0)              kinks\n";
    for (int ch : c.channels) {
        cx.meta["c2_at_zero"][pair_name(ch)] = c.values[ch][0];
        cx.meta["kinks"][pair_name(ch)] = c.kink_report[ch];
        cx.out << "  " << pair_name(ch) << "    " << fmt(c.values[ch][0]) << " ";
        for (double k : c.kink_report[ch]) cx.out << " " << k;
        cx.out << "\n";
    }
    cx.finish("g2");
    return 0;
}

ThreePhotonAmplitude three_photon(Context& cx, const ModelParams& p, Mode mode) {
    const MomentumGrid g = cx.cfg.grid_2d();
    F12Options f12;
    f12.max_iter = cx.cfg.f12_max_iter;
    f12.tol = cx.cfg.tol_f12;
    const std::uint64_t h = fnv1a(three_photon_key(p, g, mode, f12));
    const fs::path path = cx.out_dir / "cache" / ("three-" + hex(h) + ".bin");
    if (auto q = load_three_photon(path.string(), h)) {
        cx.meta["cache"].push_back({{"file", path.filename().string()}, {"hit", true}});
        return *q;
    }
    EnergyFamilyTable family;
    if (mode == Mode::exact || mode == Mode::weak_correlation)
        family = solve_f11_family(p, doubled_lattice(g), g, mode, {}, cx.workers);
    else
        family.contour = std::make_shared<const Contour>(g, default_contour_depth(g));
    ThreePhotonAmplitude q;
    if (mode == Mode::exact) {
        const auto slice = solve_f12_slice(p, g, family, f12, cx.workers);
        q = three_photon_amplitude(p, family, &slice, mode, cx.workers);
    } else {
        q = three_photon_amplitude(p, family, nullptr, mode, cx.workers);
    }
    fs::create_directories(path.parent_path());
    save_three_photon(path.string(), h, q);
    cx.meta["cache"].push_back({{"file", path.filename().string()}, {"hit", false}});
    return q;
}

int run_g3(Context& cx) {
    const auto p = cx.cfg.params();
    const Mode mode = cx.cfg.mode;
    const auto q = three_photon(cx, p, mode);
    const Mode m_mode = mode == Mode::weak_correlation ? Mode::exact : mode;
    auto m = two_photon_amplitude(p, cx.vertex(p, cx.cfg.grid(), m_mode), cx.cfg.refine);
    m.mode = mode;
    const double span = 2 * delay_scale(cx.cfg);
    const auto tau = range_or(cx.cfg.tau, 0.0, span, 201);
    const auto tau_prime = range_or(cx.cfg.tau_prime, 0.0, span, 201);
    Coherence3Options opt;
    opt.workers = cx.workers;
    const auto c = coherence3(p, q, m, tau, tau_prime, {}, opt);

    std::vector<std::string> cols{"tau", "tau_prime"};
    for (int ch : c.channels) cols.push_back("C3_" + triple_name(ch));
    Csv csv(cx.file("g3.csv"),
            "tau, tau_prime, third-order coherence C3_{mu'' mu' mu}(tau_prime, tau) per channel triple",
            cols);
    for (size_t a = 0; a < tau_prime.size(); ++a)
        for (size_t b = 0; b < tau.size(); ++b) {
            std::vector<double> row{tau[b], tau_prime[a]};
            for (int ch : c.channels) row.push_back(c.values[ch][a * tau.size() + b]);
            csv.row(row);
        }
    cx.meta["grid_2d"] = grid_json(q.grid);
    cx.out << "g3  mode=" << c.mode << "\n  triple  C3(0,0)            ridges (tau'-tau)\n";
    for (int ch : c.channels) {
        const auto ridges = detect_ridges(tau, tau_prime, c.values[ch], p.R);
        cx.meta["c3_at_origin"][triple_name(ch)] = c.values[ch][0];
        cx.meta["ridges"][triple_name(ch)] = ridges;
        cx.out << "  " << triple_name(ch) << "     " << fmt(c.values[ch][0]) << " ";
        for (double r : ridges) cx.out << " " << r;
        cx.out << "\n";
    }
    cx.finish("g3");
    return 0;
}

void write_poles(Csv& csv, const std::vector<PoleResult>& poles, const std::vector<std::string>& prefix) {
    for (const auto& r : poles) {
        auto row = prefix;
        row.push_back(std::to_string(r.branch));
        row.push_back(r.family > 0 ? "+" : "-");
        row.push_back(fmt(r.pole.real()));
        row.push_back(fmt(r.pole.imag()));
        row.push_back(fmt(r.residual));
        csv.row(row);
    }
}

int run_poles(Context& cx) {
    const auto p = cx.cfg.params();
    const auto poles = lambert_poles(p, cx.cfg.branches, cx.cfg.tol_pole);
    Csv csv(cx.file("poles.csv"),
            "branch, family (- zero of G^-1(k), + zero of G^-1(-k)), Re k, Im k, |G^-1| residual",
            {"branch", "family", "re", "im", "residual"});
    write_poles(csv, poles, {});
    double worst = 0;
    cx.out << "poles\n  branch family  re                  im                  residual\n";
    for (const auto& r : poles) {
        worst = std::max(worst, r.residual);
        cx.out << "  " << r.branch << "      " << (r.family > 0 ? "+" : "-") << "       " << fmt(r.pole.real())
               << "  " << fmt(r.pole.imag()) << "  " << fmt(r.residual) << "\n";
    }
    cx.meta["residuals"] = {{"max_pole_residual", worst}};
    cx.meta["count"] = poles.size();
    cx.finish("poles");
    return 0;
}

int run_detuning_scan(Context& cx) {
    const auto p = cx.cfg.params();
    const double g = cx.cfg.gamma;
    const auto deltas = range_or(cx.cfg.delta_scan, -2 * g, 2 * g, 41);
    const auto ks = range_or(cx.cfg.k_samples, -2 * g, 2 * g, 401);
    const auto s = detuning_scan(p, deltas, cx.cfg.grid(), ks, cx.cfg.mode, cx.workers);
    Csv csv(cx.file("detuning_scan.csv"), "delta, k, summed inelastic spectral density",
            {"delta", "k", "s_inel"});
    for (size_t d = 0; d < deltas.size(); ++d)
        for (size_t i = 0; i < ks.size(); ++i) csv.row({deltas[d], ks[i], s.s_inel[d][i]});
    Csv pc(cx.file("detuning_scan.poles.csv"),
           "delta, branch, family, Re k, Im k, |G^-1| residual (pole loci for overlay)",
           {"delta", "branch", "family", "re", "im", "residual"});
    for (double d : deltas) {
        ModelParams q = p;
        q.detuning = d;
        write_poles(pc, lambert_poles(q, cx.cfg.branches, cx.cfg.tol_pole), {fmt(d)});
    }
    double worst = 0;
    for (double r : s.power_residual) worst = std::max(worst, std::abs(r));
    cx.meta["asymmetry"] = s.asymmetry;
    cx.meta["residuals"] = {{"power", s.power_residual}, {"max_power", worst}};
    cx.finish("detuning_scan");
    cx.out << "detuning-scan  " << deltas.size() << " x " << ks.size() << "  asymmetry " << fmt(s.asymmetry)
           << "\n";
    return 0;
}

struct Check {
    std::string name;
    double value;
    double threshold;
    bool pass() const { return std::isfinite(value) && value <= threshold; }
};

int run_validate(Context& cx) {
    const auto p = cx.cfg.params();
    std::vector<Check> checks;
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    auto random_params = [&] {
        return make_params(0.2 + 2 * U(rng), 6 * U(rng), 2 * pi * U(rng), 2 * U(rng) - 1, 0.2 + 0.6 * U(rng));
    };

    double unit = 0;
    for (int s = 0; s < 20; ++s) {
        const auto q = random_params();
        for (int i = 0; i <= 1000; ++i) {
            const auto S = single_photon_s(q, -20.0 + 0.04 * i);
            for (int mu = 0; mu < 2; ++mu)
                unit = std::max(unit, std::abs(std::norm(S[0][mu]) + std::norm(S[1][mu]) - 1.0));
        }
    }
    checks.push_back({"unitarity", unit, 1e-10});

    double se = 0;
    for (int s = 0; s < 10; ++s) {
        const auto q = random_params();
        const cplx eps(4 * U(rng) - 2, 0.05 + U(rng));
        const cplx closed = self_energy(q, ComplexEnergy(eps));
        se = std::max(se, std::abs(self_energy_numeric(q, eps).value - closed) / std::abs(closed));
    }
    checks.push_back({"self_energy_closed_form", se, 1e-6});

    double pole = 0;
    for (const auto& r : lambert_poles(p, {-1, 0, 1}, cx.cfg.tol_pole)) pole = std::max(pole, r.residual);
    checks.push_back({"pole_residual", pole, cx.cfg.tol_pole});

    const MomentumGrid small(20 * cx.cfg.gamma, 401);
    const auto f11 = cx.vertex(p, small, Mode::exact);
    const auto m = two_photon_amplitude(p, f11);
    double sym = 0, scale = 0;
    const int n = small.size();
    for (int a = 1; a <= 2; ++a)
        for (int b = 1; b <= 2; ++b)
            for (int i = 0; i < n; ++i) {
                sym = std::max(sym, std::abs(m(a, b)[i] - m(b, a)[n - 1 - i]));
                scale = std::max(scale, std::abs(m(a, b)[i]));
            }
    checks.push_back({"m_exchange_symmetry", sym / scale, 1e-9});

    const auto wc = two_photon_amplitude(p, solve_f11(p, 0.0, small, Mode::weak_correlation));
    double wd = 0;
    for (int c = 0; c < 4; ++c)
        for (int i = 0; i < n; ++i) wd = std::max(wd, std::abs(wc.m_values[c][i] - m.m_values[c][i]));
    checks.push_back({"two_photon_sector_identity", wd / scale, 1e-12});

    // f11 came through the cache; a second request must be a hit identical to a cold solve
    const auto cold = solve_f11(p, 0.0, small, Mode::exact);
    const auto hit = cx.vertex(p, small, Mode::exact);
    double cache_diff = 0;
    for (int i = 0; i < n; ++i) {
        const double off = small.nodes[i] + 0.5 * small.spacing();
        cache_diff = std::max(cache_diff, std::abs(hit.values[i] - cold.values[i]));
        cache_diff = std::max(cache_diff, std::abs(hit.regular(off) - cold.regular(off)));
    }
    checks.push_back({"cache_roundtrip", cache_diff, 1e-14});

    const auto spec = spectral_density(p, cx.vertex(p, cx.cfg.grid(), Mode::exact), 0.0, 2 * cx.cfg.refine);
    checks.push_back({"power_conservation", std::abs(spec.relative_residual()), cx.cfg.tol_power});

    Csv csv(cx.file("validate.csv"), "check, value, threshold, pass", {"check", "value", "threshold", "pass"});
    bool ok = true;
    cx.out << "validate\n";
    for (const auto& c : checks) {
        ok = ok && c.pass();
        csv.row({c.name, fmt(c.value), fmt(c.threshold), c.pass() ? "1" : "0"});
        cx.meta["checks"][c.name] = {{"value", c.value}, {"threshold", c.threshold}, {"pass", c.pass()}};
        char line[128];
        std::snprintf(line, sizeof line, "  %-28s %.3e  <= %.1e  %s\n", c.name.c_str(), c.value, c.threshold,
                      c.pass() ? "PASS" : "FAIL");
        cx.out << line;
    }
    cx.meta["all_pass"] = ok;
    cx.finish("validate");
    return ok ? 0 : 4;
}

const std::map<std::string, std::pair<std::string, std::function<int(Context&)>>> commands = {
    {"spectrum", {"spectrum", run_spectrum}},
    {"g2", {"g2", run_g2}},
    {"g3", {"g3", run_g3}},
    {"poles", {"poles", run_poles}},
    {"detuning-scan", {"detuning_scan", run_detuning_scan}},
    {"validate", {"validate", run_validate}},
};

int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::Config: return 2;
        case ErrorKind::Solver: return 3;
        case ErrorKind::Validation: return 4;
    }
    return 3;
}

}  // namespace

RunConfig resolve_config(const CommandLine& cl) {
    auto overrides = cl.overrides;
    const auto it = commands.find(cl.command);
    if (it == commands.end()) throw ValidationError("unknown command '" + cl.command + "'");
    overrides.push_back("run.observable=\"" + it->second.first + "\"");
    if (cl.mode) overrides.push_back("run.mode=\"" + *cl.mode + "\"");
    if (cl.out) overrides.push_back("run.output_dir=" + json(*cl.out).dump());
    return parse_config(cl.config_path, overrides);
}

int run_command(const CommandLine& cl, std::ostream& out, std::ostream& err) {
    try {
        Context cx{resolve_config(cl), {}, resolve_workers(cl.workers), out};
        cx.out_dir = cx.cfg.output_dir;
        fs::create_directories(cx.out_dir);
        cx.meta["workers"] = cx.workers;
        return commands.at(cl.command).second(cx);
    } catch (const Error& e) {
        err << json{{"error", e.name()}, {"message", e.what()}}.dump() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        err << json{{"error", "InternalError"}, {"message", e.what()}}.dump() << "\n";
        return 3;
    }
}

}  // namespace gqed
