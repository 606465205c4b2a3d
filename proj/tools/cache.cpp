#include "gqed/cache.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

namespace gqed {

static_assert(std::endian::native == std::endian::little, "cache layout assumes little-endian");

namespace {

constexpr char magic[8] = {'G', 'Q', 'E', 'D', 'C', 'A', 'C', 'H'};
constexpr std::uint32_t version = 1;
enum Kind : std::uint32_t { vertex_kind = 1, three_photon_kind = 2 };

class Writer {
public:
    Writer(const std::string& path, Kind kind, std::uint64_t hash) : out_(path + ".tmp", std::ios::binary), path_(path) {
        out_.write(magic, 8);
        pod(version);
        pod(std::uint32_t(kind));
        pod(hash);
    }
    template <class T>
    void pod(const T& v) { out_.write(reinterpret_cast<const char*>(&v), sizeof(T)); }
    void vec(const std::vector<cplx>& v) {
        pod(std::uint64_t(v.size()));
        out_.write(reinterpret_cast<const char*>(v.data()), std::streamsize(v.size() * sizeof(cplx)));
    }
    void finish() {
        out_.close();
        std::rename((path_ + ".tmp").c_str(), path_.c_str());
    }

private:
    std::ofstream out_;
    std::string path_;
};

class Reader {
public:
    Reader(const std::string& path, Kind kind, std::uint64_t hash) : in_(path, std::ios::binary) {
        char m[8];
        if (!in_.read(m, 8) || std::memcmp(m, magic, 8) != 0) return;
        std::uint32_t v = 0, k = 0;
        std::uint64_t h = 0;
        if (!pod(v) || !pod(k) || !pod(h)) return;
        ok_ = v == version && k == kind && h == hash;
    }
    bool ok() const { return ok_ && bool(in_); }
    template <class T>
    bool pod(T& v) { return bool(in_.read(reinterpret_cast<char*>(&v), sizeof(T))); }
    bool vec(std::vector<cplx>& v) {
        std::uint64_t n = 0;
        if (!pod(n) || n > (1ull << 32)) return false;
        v.resize(n);
        return bool(in_.read(reinterpret_cast<char*>(v.data()), std::streamsize(n * sizeof(cplx))));
    }

private:
    std::ifstream in_;
    bool ok_ = false;
};

std::string params_key(const ModelParams& p) {
    std::ostringstream s;
    s.precision(17);
    s << "gamma=" << p.gamma << ";R=" << p.R << ";phase=" << p.carrier_phase << ";delta=" << p.detuning
      << ";g1=" << p.gamma1_fraction;
    return s.str();
}

}  // namespace

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string vertex_key(const ModelParams& p, const MomentumGrid& grid, Mode mode, double energy) {
    std::ostringstream s;
    s.precision(17);
    s << "vertex;" << params_key(p) << ";kmax=" << grid.k_max << ";n=" << grid.size()
      << ";mode=" << to_string(mode) << ";E=" << energy << ";v" << version;
    return s.str();
}

std::string three_photon_key(const ModelParams& p, const MomentumGrid& grid, Mode mode,
                             const F12Options& f12) {
    std::ostringstream s;
    s.precision(17);
    s << "three;" << params_key(p) << ";kmax=" << grid.k_max << ";n=" << grid.size()
      << ";mode=" << to_string(mode) << ";tol=" << f12.tol << ";iter=" << f12.max_iter
      << ";restart=" << f12.restart << ";v" << version;
    return s.str();
}

void save_vertex_table(const std::string& path, std::uint64_t hash, const VertexTable& t) {
    Writer w(path, vertex_kind, hash);
    w.pod(t.grid.k_max);
    w.pod(std::int32_t(t.grid.size()));
    w.pod(t.energy);
    w.pod(std::int32_t(t.mode));
    w.pod(t.rcond);
    const bool trivial = t.solution.trivial();
    w.pod(std::int32_t(trivial));
    w.pod(default_contour_depth(t.grid));
    w.vec(t.values);
    w.vec(t.solution.on_contour());
    w.vec(t.solution.density());
    w.vec(t.solution.density_de());
    w.finish();
}

std::optional<VertexTable> load_vertex_table(const std::string& path, std::uint64_t hash) {
    Reader r(path, vertex_kind, hash);
    if (!r.ok()) return std::nullopt;
    double kmax = 0, energy = 0, rcond = 0, depth = 0;
    std::int32_t n = 0, mode = 0, trivial = 0;
    std::vector<cplx> values, u, d, dd;
    if (!r.pod(kmax) || !r.pod(n) || !r.pod(energy) || !r.pod(mode) || !r.pod(rcond) ||
        !r.pod(trivial) || !r.pod(depth) || !r.vec(values) || !r.vec(u) || !r.vec(d) || !r.vec(dd))
        return std::nullopt;
    VertexTable t;
    t.grid = MomentumGrid(kmax, n);
    t.energy = energy;
    t.mode = Mode(mode);
    t.rcond = rcond;
    t.values = std::move(values);
    t.free_term.pole_location = energy;
    t.free_term.regular_part.assign(n, cplx(-1.0));
    auto contour = std::make_shared<const Contour>(t.grid, depth);
    t.solution = F11Solution(contour, energy, std::move(u), std::move(d), std::move(dd));
    return t;
}

void save_three_photon(const std::string& path, std::uint64_t hash, const ThreePhotonAmplitude& q) {
    Writer w(path, three_photon_kind, hash);
    w.pod(q.grid.k_max);
    w.pod(std::int32_t(q.grid.size()));
    w.pod(std::int32_t(q.mode));
    for (const auto& v : q.q_values) w.vec(v);
    w.vec(q.stripped);
    w.finish();
}

std::optional<ThreePhotonAmplitude> load_three_photon(const std::string& path, std::uint64_t hash) {
    Reader r(path, three_photon_kind, hash);
    if (!r.ok()) return std::nullopt;
    double kmax = 0;
    std::int32_t n = 0, mode = 0;
    if (!r.pod(kmax) || !r.pod(n) || !r.pod(mode)) return std::nullopt;
    ThreePhotonAmplitude q;
    q.grid = MomentumGrid(kmax, n);
    q.mode = Mode(mode);
    for (auto& v : q.q_values)
        if (!r.vec(v)) return std::nullopt;
    if (!r.vec(q.stripped)) return std::nullopt;
    return q;
}

}  // namespace gqed
