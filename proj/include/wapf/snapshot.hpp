#pragma once

#include <cstdint>
#include <filesystem>

#include "wapf/domain.hpp"
#include "wapf/fields.hpp"

namespace wapf {

struct Snapshot {
  DomainSpec domain;
  FluidState state;  // carries the time
  bool operator==(const Snapshot&) const = default;
};

inline constexpr std::uint32_t kSnapshotVersion = 1;

/// Little-endian binary layout:
///   "WAPF", u32 version, u32 dim, u32 cells[3], u32 topology, f64 epsilon,
///   f64 origin[3], f64 time, u32 species, u32 flags per species (bit 0:
///   energy present), then per species rho, mom_x..., [energy] as f64 arrays
///   with x fastest.
void write_snapshot(const std::filesystem::path& path, const Snapshot& snap);
/// Throws Error(Io) if unreadable, Error(Format) naming the section that is
/// missing or malformed.
Snapshot read_snapshot(const std::filesystem::path& path);

/// Cell centers plus every field, one row per cell.
void write_snapshot_csv(const std::filesystem::path& path, const Snapshot& snap);

}  // namespace wapf
