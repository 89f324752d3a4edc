#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "plasma_lab/core.hpp"

namespace plasma_lab {

/// Malformed, truncated or unsupported snapshot data.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t kSnapshotVersion = 1;

/// Binary layout, all little-endian: "PFLD", u32 version, u32 n1, u32 n2,
/// f64 L, f64 time, then rho+ and rho- row-major as f64.
void write_snapshot(std::ostream& out, const PlasmaState& state);
void write_snapshot(const std::filesystem::path& path, const PlasmaState& state);

PlasmaState read_snapshot(std::istream& in);
PlasmaState read_snapshot(const std::filesystem::path& path);

/// "snapshot_000042.pfld" for step 42.
std::string snapshot_name(long step);

}  // namespace plasma_lab
