#include "hnls/io.hpp"

#include <openssl/evp.h>

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include "hnls/errors.hpp"

namespace hnls {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

namespace {

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T get(const char* what) {
    if (bytes_.size() - pos_ < sizeof(T)) throw FormatError(std::string("snapshot truncated in ") + what);
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::size_t snapshot_size(std::size_t d, std::size_t points) {
  return sizeof(kSnapshotMagic) + 4 + 4 + 4 * d + 8 * d + 8 * d + 8 + 16 * points;
}

std::string encode_snapshot(const ComplexField& field) {
  if (!field.grid) throw InvalidArgument("encode_snapshot: field has no grid");
  const Grid& g = *field.grid;
  std::string out;
  out.reserve(snapshot_size(g.dim(), field.size()));
  out.append(kSnapshotMagic, sizeof(kSnapshotMagic));
  put<std::uint32_t>(out, kSnapshotVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(g.dim()));
  for (std::size_t j = 0; j < g.dim(); ++j) put<std::uint32_t>(out, static_cast<std::uint32_t>(g.n(j)));
  for (std::size_t j = 0; j < g.dim(); ++j) put<double>(out, g.length(j));
  for (std::size_t j = 0; j < g.dim(); ++j) put<double>(out, g.alpha(j));
  put<double>(out, field.t);
  for (const auto& z : field.values) {
    put<double>(out, z.real());
    put<double>(out, z.imag());
  }
  return out;
}

ComplexField decode_snapshot(std::string_view bytes) {
  if (bytes.size() < sizeof(kSnapshotMagic) || std::memcmp(bytes.data(), kSnapshotMagic, sizeof(kSnapshotMagic)) != 0)
    throw FormatError("snapshot: bad magic (expected HNLSNAP1)");
  Reader r(bytes.substr(sizeof(kSnapshotMagic)));
  const auto version = r.get<std::uint32_t>("version");
  if (version != kSnapshotVersion) throw FormatError("snapshot: unsupported version " + std::to_string(version));
  const auto d = r.get<std::uint32_t>("dimension");
  if (d < 1 || d > kMaxDim) throw FormatError("snapshot: dimension " + std::to_string(d) + " out of range");
  std::vector<std::size_t> n(d);
  std::vector<double> len(d), alpha(d);
  std::size_t points = 1;
  for (auto& v : n) {
    v = r.get<std::uint32_t>("shape");
    if (v == 0) throw FormatError("snapshot: zero-length axis");
    points *= v;
  }
  for (auto& v : len) v = r.get<double>("lengths");
  for (auto& v : alpha) v = r.get<double>("signature");
  const double t = r.get<double>("time");
  if (r.remaining() != 16 * points)
    throw FormatError("snapshot: payload has " + std::to_string(r.remaining()) + " bytes, expected " +
                      std::to_string(16 * points));
  GridPtr grid;
  try {
    grid = make_grid_any(n, len, alpha);
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("snapshot: bad grid header: ") + e.what());
  }
  std::vector<cplx> values(points);
  for (auto& z : values) {
    const double re = r.get<double>("values");
    const double im = r.get<double>("values");
    z = {re, im};
  }
  return ComplexField(std::move(grid), std::move(values), t);
}

void write_snapshot(const ComplexField& field, const std::filesystem::path& path) {
  write_file_atomic(path, encode_snapshot(field));
}

ComplexField read_snapshot(const std::filesystem::path& path) { return decode_snapshot(read_file(path)); }

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error("cannot rename " + tmp.string() + " to " + path.string());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) throw Error("SHA-256 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out(2 * len, '0');
  for (unsigned int i = 0; i < len; ++i) {
    out[2 * i] = hex[md[i] >> 4];
    out[2 * i + 1] = hex[md[i] & 0xf];
  }
  return out;
}

std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string columns_csv(const std::vector<std::string>& names, const std::vector<std::vector<double>>& columns) {
  if (names.size() != columns.size()) throw InvalidArgument("columns_csv: one name per column");
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns)
    if (c.size() != rows) throw InvalidArgument("columns_csv: ragged columns");
  std::string out;
  for (std::size_t j = 0; j < names.size(); ++j) out += (j ? "," : "") + names[j];
  out += '\n';
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (j) out += ',';
      out += format_double(columns[j][i]);
    }
    out += '\n';
  }
  return out;
}

std::string observables_csv(const ObservableSeries& series, std::size_t d) {
  static constexpr const char* axis = "xyz";
  std::vector<std::string> names = {"t", "mass", "energy"};
  for (std::size_t j = 0; j < d; ++j) names.push_back(std::string("p") + axis[j]);
  for (std::size_t j = 0; j < d; ++j) names.push_back(std::string("com") + axis[j]);
  for (const char* s : {"V", "dVdt_pred", "rhs", "lsigma2", "linf"}) names.emplace_back(s);

  std::vector<std::vector<double>> cols(names.size());
  for (const auto& s : series.samples) {
    std::size_t c = 0;
    cols[c++].push_back(s.t);
    cols[c++].push_back(s.mass);
    cols[c++].push_back(s.energy);
    for (std::size_t j = 0; j < d; ++j) cols[c++].push_back(s.momentum[j]);
    for (std::size_t j = 0; j < d; ++j) cols[c++].push_back(s.com[j]);
    cols[c++].push_back(s.virial_v);
    cols[c++].push_back(s.virial_rate);
    cols[c++].push_back(s.virial_rhs);
    cols[c++].push_back(s.lsigma2);
    cols[c++].push_back(s.linf);
  }
  return columns_csv(names, cols);
}

std::string radial_profile_csv(const RadialProfile& profile) {
  std::vector<std::vector<double>> cols(3);
  for (std::size_t i = 0; i < profile.values.size(); ++i) {
    cols[0].push_back(profile.r(i));
    cols[1].push_back(profile.values[i].real());
    cols[2].push_back(profile.values[i].imag());
  }
  return columns_csv({"r", "re", "im"}, cols);
}

std::string radial_series_csv(const RadialTrajectory& traj) {
  std::vector<std::vector<double>> cols(5);
  for (const auto& s : traj.samples) {
    cols[0].push_back(s.t);
    cols[1].push_back(s.mass);
    cols[2].push_back(s.energy);
    cols[3].push_back(s.linf);
    cols[4].push_back(s.outer_fraction);
  }
  return columns_csv({"t", "mass", "energy", "linf", "outer_fraction"}, cols);
}

nlohmann::json stability_report_json(const StabilityReport& r, const std::string& series_file) {
  nlohmann::json j;
  j["eps"] = r.eps;
  j["h_sup"] = r.h_sup;
  j["growth_ratio"] = r.growth_ratio;
  j["status"] = to_string(r.status);
  j["t_detect"] = r.status == StabilityStatus::BlownUp ? nlohmann::json(r.t_detect) : nlohmann::json(nullptr);
  j["detection"] = r.detection;
  j["in_regime"] = r.regime.in_regime;
  j["regime"] = r.regime.label;
  j["warnings"] = r.regime.warnings;
  j["series"] = series_file;
  return j;
}

nlohmann::json conservation_report_json(const ConservationReport& r, std::size_t d) {
  auto head = [d](const std::array<double, 3>& a) { return std::vector<double>(a.begin(), a.begin() + d); };
  nlohmann::json j;
  j["samples"] = r.samples;
  j["mass_drift"] = r.mass_drift;
  j["energy_drift"] = r.energy_drift;
  j["momentum_drift"] = r.momentum_drift;
  j["com_slope"] = head(r.com_slope);
  j["com_fit_residual"] = head(r.com_fit_residual);
  j["momentum0"] = head(r.momentum0);
  j["virial_rate_residual"] = r.virial_rate_residual;
  j["virial_rate_signed_residual"] = r.virial_rate_signed_residual;
  j["virial_rate_scale"] = r.virial_rate_scale;
  j["virial_accel_residual"] = r.virial_accel_residual;
  j["virial_accel_scale"] = r.virial_accel_scale;
  j["moments_reliable"] = r.moments_reliable;
  j["mass_ok"] = r.mass_ok;
  j["energy_ok"] = r.energy_ok;
  j["momentum_ok"] = r.momentum_ok;
  j["com_ok"] = r.com_ok;
  j["virial_ok"] = r.virial_ok;
  return j;
}

}  // namespace hnls
