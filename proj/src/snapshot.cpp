#include "plasma_lab/snapshot.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace plasma_lab {

namespace {

constexpr std::array<char, 4> kMagic{'P', 'F', 'L', 'D'};

template <typename T>
void put_le(std::ostream& out, T value) {
    using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
    const U bits = std::bit_cast<U>(value);
    std::array<char, sizeof(U)> bytes;
    for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xffu);
    out.write(bytes.data(), bytes.size());
}

template <typename T>
T get_le(std::istream& in, const char* what) {
    using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
    std::array<unsigned char, sizeof(U)> bytes;
    if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size()))
        throw FormatError(std::string("snapshot truncated while reading ") + what);
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) bits |= static_cast<U>(bytes[i]) << (8 * i);
    return std::bit_cast<T>(bits);
}

Field read_field(std::istream& in, const Grid& grid, const char* what) {
    Field f(grid);
    for (auto& v : f.values()) v = get_le<double>(in, what);
    return f;
}

}  // namespace

void write_snapshot(std::ostream& out, const PlasmaState& state) {
    const Grid& g = state.grid();
    if (!(state.rho_minus.grid() == g)) throw SizingError("species fields live on different grids");
    out.write(kMagic.data(), kMagic.size());
    put_le(out, kSnapshotVersion);
    put_le(out, static_cast<std::uint32_t>(g.n1()));
    put_le(out, static_cast<std::uint32_t>(g.n2()));
    put_le(out, g.box());
    put_le(out, state.time);
    for (double v : state.rho_plus.values()) put_le(out, v);
    for (double v : state.rho_minus.values()) put_le(out, v);
    if (!out) throw std::runtime_error("failed to write snapshot");
}

void write_snapshot(const std::filesystem::path& path, const PlasmaState& state) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_snapshot(out, state);
}

PlasmaState read_snapshot(std::istream& in) {
    std::array<char, 4> magic{};
    if (!in.read(magic.data(), magic.size())) throw FormatError("snapshot truncated while reading magic");
    if (magic != kMagic) throw FormatError("not a snapshot: bad magic bytes");
    const auto version = get_le<std::uint32_t>(in, "version");
    if (version != kSnapshotVersion)
        throw FormatError("unsupported snapshot version " + std::to_string(version));
    const auto n1 = get_le<std::uint32_t>(in, "n1");
    const auto n2 = get_le<std::uint32_t>(in, "n2");
    const double box = get_le<double>(in, "L");
    const double time = get_le<double>(in, "time");
    if (n1 > (1u << 20) || n2 > (1u << 20)) throw FormatError("snapshot grid size is implausible");

    Grid grid;
    try {
        grid = make_grid(static_cast<int>(n1), static_cast<int>(n2), box);
    } catch (const std::invalid_argument& e) {
        throw FormatError(std::string("snapshot header: ") + e.what());
    }
    PlasmaState state{read_field(in, grid, "rho+"), read_field(in, grid, "rho-"), time};
    if (in.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes after snapshot data");
    if (!state.rho_plus.all_finite() || !state.rho_minus.all_finite())
        throw FormatError("snapshot contains non-finite densities");
    return state;
}

PlasmaState read_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open snapshot " + path.string());
    return read_snapshot(in);
}

std::string snapshot_name(long step) {
    std::ostringstream name;
    name << "snapshot_" << std::setw(6) << std::setfill('0') << step << ".pfld";
    return name.str();
}

}  // namespace plasma_lab
