#include "fwl/grid.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace fwl {

size_t GridFunction::total_cells() const {
    size_t n = 0;
    for (const auto& c : charts) n += c.v.size();
    return n;
}

size_t GridFunction::valid_cells() const {
    size_t n = 0;
    for (const auto& c : charts)
        for (uint8_t m : c.mask) n += m;
    return n;
}

namespace {
constexpr char kMagic[8] = {'F', 'W', 'L', 'G', 'R', 'F', '0', '1'};

template <typename T>
void put(std::ofstream& f, const T& v) {
    f.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
void get(std::ifstream& f, T& v) {
    f.read(reinterpret_cast<char*>(&v), sizeof v);
}
}  // namespace

void write_grid(const GridFunction& g, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for write: " + path);
    f.write(kMagic, 8);
    put(f, g.epsilon);
    int32_t nc = static_cast<int32_t>(g.charts.size());
    put(f, nc);
    for (const auto& c : g.charts) {
        put(f, static_cast<int32_t>(c.disc));
        put(f, static_cast<int32_t>(c.s.n));
        put(f, static_cast<int32_t>(c.p.n));
        put(f, c.s.lo);
        put(f, c.s.hi);
        put(f, c.p.lo);
        put(f, c.p.hi);
        f.write(reinterpret_cast<const char*>(c.v.data()),
                static_cast<std::streamsize>(c.v.size() * sizeof(double)));
        f.write(reinterpret_cast<const char*>(c.mask.data()),
                static_cast<std::streamsize>(c.mask.size()));
    }
}

GridFunction read_grid(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for read: " + path);
    char magic[8];
    f.read(magic, 8);
    if (std::string(magic, 8) != std::string(kMagic, 8))
        throw std::runtime_error("bad grid file magic: " + path);
    GridFunction g;
    get(f, g.epsilon);
    int32_t nc;
    get(f, nc);
    g.charts.resize(nc);
    for (auto& c : g.charts) {
        int32_t disc, ns, np;
        get(f, disc);
        get(f, ns);
        get(f, np);
        c.disc = disc;
        c.s.n = ns;
        c.p.n = np;
        get(f, c.s.lo);
        get(f, c.s.hi);
        get(f, c.p.lo);
        get(f, c.p.hi);
        c.v.resize(static_cast<size_t>(ns) * np);
        c.mask.resize(c.v.size());
        f.read(reinterpret_cast<char*>(c.v.data()),
               static_cast<std::streamsize>(c.v.size() * sizeof(double)));
        f.read(reinterpret_cast<char*>(c.mask.data()),
               static_cast<std::streamsize>(c.mask.size()));
    }
    if (!f) throw std::runtime_error("truncated grid file: " + path);
    return g;
}

void write_grid_csv(const GridFunction& g, const std::string& path) {
    std::ofstream f(path);
    f << "disc,s,p,value\n";
    char buf[160];
    for (const auto& c : g.charts) {
        for (int is = 0; is < c.s.n; ++is) {
            for (int ip = 0; ip < c.p.n; ++ip) {
                if (!c.mask[c.idx(is, ip)]) continue;
                std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", c.disc,
                              c.s.center(is), c.p.center(ip), c.v[c.idx(is, ip)]);
                f << buf;
            }
        }
    }
}

}  // namespace fwl
