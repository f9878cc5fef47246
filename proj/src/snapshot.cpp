#include "wapf/snapshot.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include "wapf/error.hpp"

namespace wapf {

namespace {

constexpr char kMagic[4] = {'W', 'A', 'P', 'F'};

template <typename T>
T to_le(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    std::reverse(b, b + sizeof(T));
    std::memcpy(&v, b, sizeof(T));
    return v;
  }
}

class Writer {
 public:
  explicit Writer(const std::filesystem::path& p) : out_(p, std::ios::binary), path_(p) {
    if (!out_) throw Error(ErrorKind::Io, "cannot write " + p.string());
  }
  void bytes(const void* p, std::size_t n) { out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n)); }
  void u32(std::uint32_t v) {
    v = to_le(v);
    bytes(&v, 4);
  }
  void f64(double v) {
    v = to_le(v);
    bytes(&v, 8);
  }
  void array(const Field& f) {
    if constexpr (std::endian::native == std::endian::little) {
      bytes(f.data(), f.size() * sizeof(double));
    } else {
      for (double v : f) f64(v);
    }
  }
  void finish() {
    out_.flush();
    if (!out_) throw Error(ErrorKind::Io, "write failed: " + path_.string());
  }

 private:
  std::ofstream out_;
  std::filesystem::path path_;
};

class Reader {
 public:
  explicit Reader(std::vector<char> data) : data_(std::move(data)) {}
  void bytes(void* p, std::size_t n, const std::string& section) {
    if (data_.size() - pos_ < n) throw Error(ErrorKind::Format, "truncated snapshot: missing " + section);
    std::memcpy(p, data_.data() + pos_, n);
    pos_ += n;
  }
  std::uint32_t u32(const std::string& section) {
    std::uint32_t v;
    bytes(&v, 4, section);
    return to_le(v);
  }
  double f64(const std::string& section) {
    double v;
    bytes(&v, 8, section);
    return to_le(v);
  }
  Field array(std::size_t n, const std::string& section) {
    Field f(n);
    bytes(f.data(), n * sizeof(double), section);
    if constexpr (std::endian::native != std::endian::little)
      for (double& v : f) v = to_le(v);
    return f;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  std::vector<char> data_;
  std::size_t pos_ = 0;
};

}  // namespace

void write_snapshot(const std::filesystem::path& path, const Snapshot& snap) {
  snap.domain.validate();
  check_shape(snap.state, snap.domain);
  Writer w(path);
  w.bytes(kMagic, 4);
  w.u32(kSnapshotVersion);
  w.u32(static_cast<std::uint32_t>(snap.domain.dim));
  for (int a = 0; a < 3; ++a) w.u32(static_cast<std::uint32_t>(snap.domain.cells[a]));
  w.u32(snap.domain.topology == Topology::Torus ? 0u : 1u);
  w.f64(snap.domain.epsilon);
  for (int a = 0; a < 3; ++a) w.f64(snap.domain.origin[a]);
  w.f64(snap.state.time);
  w.u32(static_cast<std::uint32_t>(snap.state.species.size()));
  for (const auto& s : snap.state.species) w.u32(s.energy ? 1u : 0u);
  for (const auto& s : snap.state.species) {
    w.array(s.rho);
    for (const auto& m : s.mom) w.array(m);
    if (s.energy) w.array(*s.energy);
  }
  w.finish();
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  Reader r(std::vector<char>(std::istreambuf_iterator<char>(in), {}));
  char magic[4];
  r.bytes(magic, 4, "magic");
  if (std::memcmp(magic, kMagic, 4) != 0) throw Error(ErrorKind::Format, path.string() + ": not a WAPF snapshot");
  const auto version = r.u32("format version");
  if (version != kSnapshotVersion) {
    throw Error(ErrorKind::Format, path.string() + ": unsupported format version " + std::to_string(version));
  }
  Snapshot snap;
  DomainSpec& d = snap.domain;
  d.dim = static_cast<int>(r.u32("dim"));
  for (int a = 0; a < 3; ++a) d.cells[a] = static_cast<int>(r.u32("cell counts"));
  const auto topo = r.u32("topology");
  if (topo > 1) throw Error(ErrorKind::Format, path.string() + ": bad topology code");
  d.topology = topo == 0 ? Topology::Torus : Topology::OpenBox;
  d.epsilon = r.f64("epsilon");
  for (int a = 0; a < 3; ++a) d.origin[a] = r.f64("origin");
  snap.state.time = r.f64("time");
  try {
    d.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::Format, path.string() + ": bad domain header: " + e.what());
  }
  const auto nspecies = r.u32("species count");
  if (nspecies > 1024) throw Error(ErrorKind::Format, path.string() + ": implausible species count");
  std::vector<std::uint32_t> flags(nspecies);
  for (auto& f : flags) f = r.u32("species flags");
  const std::size_t n = d.size();
  for (std::uint32_t s = 0; s < nspecies; ++s) {
    const std::string tag = "species " + std::to_string(s);
    SpeciesFields sf;
    sf.rho = r.array(n, tag + " density");
    for (int a = 0; a < d.dim; ++a) sf.mom.push_back(r.array(n, tag + " momentum " + "xyz"[a]));
    if (flags[s] & 1u) sf.energy = r.array(n, tag + " energy");
    snap.state.species.push_back(std::move(sf));
  }
  if (!r.done()) throw Error(ErrorKind::Format, path.string() + ": trailing bytes after last species");
  return snap;
}

void write_snapshot_csv(const std::filesystem::path& path, const Snapshot& snap) {
  const DomainSpec& d = snap.domain;
  check_shape(snap.state, d);
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::Io, "cannot write " + path.string());
  const char* axes = "xyz";
  for (int a = 0; a < d.dim; ++a) f << (a ? "," : "") << axes[a];
  for (std::size_t s = 0; s < snap.state.species.size(); ++s) {
    f << ",rho_" << s;
    for (int a = 0; a < d.dim; ++a) f << ",mom_" << axes[a] << '_' << s;
    if (snap.state.species[s].energy) f << ",energy_" << s;
  }
  f << '\n';
  f.precision(17);
  for (std::size_t c = 0; c < d.size(); ++c) {
    const auto ijk = d.coords(c);
    for (int a = 0; a < d.dim; ++a) f << (a ? "," : "") << d.center(a, ijk[a]);
    for (const auto& s : snap.state.species) {
      f << ',' << s.rho[c];
      for (const auto& m : s.mom) f << ',' << m[c];
      if (s.energy) f << ',' << (*s.energy)[c];
    }
    f << '\n';
  }
  if (!f) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

}  // namespace wapf
