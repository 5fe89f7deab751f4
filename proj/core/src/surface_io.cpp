#include "invctl/surface_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace invctl {

static_assert(std::endian::native == std::endian::little,
              "surface files are little-endian; byte-swapping is not implemented");

namespace {

constexpr char kMagic[8] = {'I', 'V', 'S', 'U', 'R', 'F', '0', '1'};

void put_i64(std::ostream& out, std::int64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void put_f64(std::ostream& out, double v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
std::int64_t get_i64(std::istream& in) {
    std::int64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}
double get_f64(std::istream& in) {
    double v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}

void put_array(std::ostream& out, const std::vector<double>& a) {
    out.write(reinterpret_cast<const char*>(a.data()),
              static_cast<std::streamsize>(a.size() * sizeof(double)));
}
void get_array(std::istream& in, std::vector<double>& a, size_t n) {
    a.resize(n);
    in.read(reinterpret_cast<char*>(a.data()), static_cast<std::streamsize>(n * sizeof(double)));
}

}  // namespace

void save_surface(const ValueSurface& s, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write surface file: " + path);
    out.write(kMagic, sizeof kMagic);
    put_i64(out, s.num_states);
    put_i64(out, s.max_demand);
    put_i64(out, s.n_inv - 1);
    put_i64(out, s.resolution);
    put_i64(out, s.n_slices);
    put_f64(out, s.dt);
    put_f64(out, s.horizon);
    put_f64(out, s.unit_cost);
    put_f64(out, s.fixed_cost);
    put_f64(out, s.discount_rate);
    put_f64(out, s.salvage_fraction);
    put_i64(out, s.censored ? 1 : 0);
    put_i64(out, s.allow_sellback ? 1 : 0);
    put_f64(out, s.residual);

    put_array(out, s.value);
    put_array(out, s.intervention);
    put_array(out, s.no_action);
    std::vector<double> tmp(s.act.begin(), s.act.end());
    put_array(out, tmp);
    tmp.assign(s.order_to.begin(), s.order_to.end());
    put_array(out, tmp);
    if (!out) throw std::runtime_error("write failed: " + path);
}

ValueSurface load_surface(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open surface file: " + path);
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
        throw std::runtime_error("not a surface file: " + path);

    ValueSurface s;
    s.num_states = static_cast<int>(get_i64(in));
    s.max_demand = static_cast<int>(get_i64(in));
    s.n_inv = static_cast<int>(get_i64(in)) + 1;
    s.resolution = static_cast<int>(get_i64(in));
    s.n_slices = static_cast<int>(get_i64(in));
    s.dt = get_f64(in);
    s.horizon = get_f64(in);
    s.unit_cost = get_f64(in);
    s.fixed_cost = get_f64(in);
    s.discount_rate = get_f64(in);
    s.salvage_fraction = get_f64(in);
    s.censored = get_i64(in) != 0;
    s.allow_sellback = get_i64(in) != 0;
    s.residual = get_f64(in);

    BeliefGrid grid(s.num_states, s.resolution);
    s.n_nodes = grid.num_nodes();
    const size_t cells = static_cast<size_t>(s.n_slices + 1) * s.n_nodes * s.n_inv;
    get_array(in, s.value, cells);
    get_array(in, s.intervention, cells);
    get_array(in, s.no_action, cells);
    std::vector<double> tmp;
    get_array(in, tmp, cells);
    s.act.assign(tmp.begin(), tmp.end());
    get_array(in, tmp, cells);
    s.order_to.resize(cells);
    for (size_t i = 0; i < cells; ++i) s.order_to[i] = static_cast<std::int16_t>(tmp[i]);
    if (!in) throw std::runtime_error("truncated surface file: " + path);
    return s;
}

void write_surface_csv(std::ostream& out, const ValueSurface& s, const BeliefGrid& grid) {
    out << "T_rem";
    for (int i = 1; i <= s.num_states; ++i) out << ",pi_" << i;
    out << ",a,U,MU,act,d\n";
    out.precision(17);
    for (int t = 0; t <= s.n_slices; ++t) {
        for (int node = 0; node < s.n_nodes; ++node) {
            const auto pi = grid.belief(node);
            for (int a = 0; a < s.n_inv; ++a) {
                out << t * s.dt;
                for (double v : pi) out << ',' << v;
                const size_t i = s.idx(t, node, a);
                out << ',' << a << ',' << s.value[i] << ',' << s.intervention[i] << ','
                    << static_cast<int>(s.act[i]) << ',' << s.order_to[i] << '\n';
            }
        }
    }
}

void export_surface_csv(const ValueSurface& s, const BeliefGrid& grid, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write csv: " + path);
    write_surface_csv(out, s, grid);
}

}  // namespace invctl
