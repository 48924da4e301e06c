#include "cbvf/field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

static_assert(std::endian::native == std::endian::little,
              "field files are little-endian; big-endian hosts are unsupported");

namespace cbvf {

std::uint32_t crc32(const void* data, std::size_t len) {
  static const auto table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xedb88320u ^ (c >> 1) : c >> 1;
      t[i] = c;
    }
    return t;
  }();
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint32_t c = 0xffffffffu;
  for (std::size_t i = 0; i < len; ++i) c = table[(c ^ p[i]) & 0xffu] ^ (c >> 8);
  return c ^ 0xffffffffu;
}

namespace {

constexpr char kMagic[4] = {'C', 'B', 'V', 'F'};

template <typename T>
void put(std::vector<char>& buf, const T& v) {
  const char* p = reinterpret_cast<const char*>(&v);
  buf.insert(buf.end(), p, p + sizeof(T));
}

struct Reader {
  const char* p;
  const char* end;

  template <typename T>
  T get() {
    if (p + sizeof(T) > end) throw CorruptPayload("truncated field file");
    T v;
    std::memcpy(&v, p, sizeof(T));
    p += sizeof(T);
    return v;
  }
};

std::vector<char> encode_meta(const SolveMeta& m) {
  std::vector<char> b;
  put(b, m.residual);
  put(b, static_cast<std::uint32_t>(m.iterations));
  put(b, static_cast<std::uint8_t>(m.converged ? 1 : 0));
  put(b, m.cfl);
  put(b, m.tol);
  put(b, static_cast<std::uint8_t>(m.n_alphas));
  for (int k = 0; k < m.n_alphas; ++k) put(b, m.alphas[k]);
  return b;
}

SolveMeta decode_meta(Reader& r) {
  SolveMeta m;
  m.residual = r.get<double>();
  m.iterations = static_cast<int>(r.get<std::uint32_t>());
  m.converged = r.get<std::uint8_t>() != 0;
  m.cfl = r.get<double>();
  m.tol = r.get<double>();
  m.n_alphas = r.get<std::uint8_t>();
  for (int k = 0; k < m.n_alphas; ++k) m.alphas[k] = r.get<double>();
  return m;
}

}  // namespace

void save_field(const ValueField& field, const std::string& path) {
  std::vector<char> buf;
  buf.insert(buf.end(), kMagic, kMagic + 4);
  put(buf, kFieldFormatVersion);
  put(buf, static_cast<std::uint8_t>(field.dynamics));
  put(buf, static_cast<std::uint8_t>(field.kind));
  put(buf, static_cast<std::uint8_t>(field.grid.ndim));
  for (int k = 0; k < field.grid.ndim; ++k) {
    const AxisSpec& ax = field.grid.axes[k];
    put(buf, static_cast<std::uint32_t>(ax.n));
    put(buf, ax.lo);
    put(buf, ax.hi);
    put(buf, static_cast<std::uint8_t>(ax.periodic ? 1 : 0));
  }
  const std::vector<char> meta = encode_meta(field.meta);
  put(buf, static_cast<std::uint32_t>(meta.size()));
  buf.insert(buf.end(), meta.begin(), meta.end());

  const char* payload = reinterpret_cast<const char*>(field.values.data());
  const std::size_t payload_bytes = field.values.size() * sizeof(double);
  buf.insert(buf.end(), payload, payload + payload_bytes);
  put(buf, crc32(payload, payload_bytes));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

ValueField load_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  Reader r{buf.data(), buf.data() + buf.size()};
  if (buf.size() < 4 || std::memcmp(r.p, kMagic, 4) != 0) {
    throw FormatVersionMismatch("bad magic bytes in " + path);
  }
  r.p += 4;
  const auto version = r.get<std::uint32_t>();
  if (version != kFieldFormatVersion) {
    throw FormatVersionMismatch("unsupported field format version " + std::to_string(version));
  }

  ValueField f;
  f.dynamics = static_cast<DynamicsKind>(r.get<std::uint8_t>());
  f.kind = static_cast<FieldKind>(r.get<std::uint8_t>());
  f.grid.ndim = r.get<std::uint8_t>();
  if (f.grid.ndim < 1 || f.grid.ndim > 5) throw CorruptPayload("bad axis count");
  for (int k = 0; k < f.grid.ndim; ++k) {
    AxisSpec& ax = f.grid.axes[k];
    ax.n = static_cast<int>(r.get<std::uint32_t>());
    ax.lo = r.get<double>();
    ax.hi = r.get<double>();
    ax.periodic = r.get<std::uint8_t>() != 0;
    if (ax.n < 1) throw CorruptPayload("bad axis size");
  }
  const auto meta_len = r.get<std::uint32_t>();
  if (r.p + meta_len > r.end) throw CorruptPayload("truncated metadata");
  Reader mr{r.p, r.p + meta_len};
  f.meta = decode_meta(mr);
  r.p += meta_len;

  const std::size_t n = f.grid.num_nodes();
  const std::size_t payload_bytes = n * sizeof(double);
  if (r.p + payload_bytes + sizeof(std::uint32_t) > r.end) {
    throw CorruptPayload("truncated payload");
  }
  f.values.resize(n);
  std::memcpy(f.values.data(), r.p, payload_bytes);
  r.p += payload_bytes;
  const auto stored_crc = r.get<std::uint32_t>();
  if (stored_crc != crc32(f.values.data(), payload_bytes)) {
    throw CorruptPayload("payload checksum mismatch in " + path);
  }
  return f;
}

}  // namespace cbvf
