#include "umsa/sequence_file.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <vector>

#include "umsa/errors.hpp"

namespace umsa {

namespace {

constexpr char kMagic[4] = {'U', 'M', 'S', 'A'};

void put_u16(std::string &buf, uint16_t x) {
  buf.push_back(static_cast<char>(x & 0xff));
  buf.push_back(static_cast<char>((x >> 8) & 0xff));
}

void put_u32(std::string &buf, uint32_t x) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((x >> (8 * i)) & 0xff));
}

uint16_t get_u16(const unsigned char *p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

uint32_t get_u32(const unsigned char *p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

}  // namespace

void write_sequence(const Tensor2D &t, const std::filesystem::path &path) {
  if (t.rows < 1 || t.cols < 1) throw FormatError("write_sequence: empty tensor");
  std::string buf;
  buf.reserve(14 + t.size() * 4);
  buf.append(kMagic, 4);
  put_u16(buf, kSequenceFormatVersion);
  put_u32(buf, static_cast<uint32_t>(t.rows));
  put_u32(buf, static_cast<uint32_t>(t.cols));
  for (double d : t.v) {
    const float f = static_cast<float>(d);
    uint32_t bits;
    std::memcpy(&bits, &f, 4);
    put_u32(buf, bits);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw FormatError("short write to '" + path.string() + "'");
}

Tensor2D read_sequence(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open sequence file '" + path.string() + "'");
  std::vector<unsigned char> raw((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  if (raw.size() < 14) throw FormatError("'" + path.string() + "': truncated header");
  if (std::memcmp(raw.data(), kMagic, 4) != 0)
    throw FormatError("'" + path.string() + "': bad magic, not a UMSA sequence file");
  if (get_u16(raw.data() + 4) != kSequenceFormatVersion)
    throw FormatError("'" + path.string() + "': unsupported format version");
  const uint64_t rows = get_u32(raw.data() + 6);
  const uint64_t cols = get_u32(raw.data() + 10);
  if (rows == 0 || cols == 0)
    throw FormatError("'" + path.string() + "': zero dimension in header");
  const uint64_t payload = rows * cols * 4;
  if (rows * cols > (1ull << 31) || raw.size() != 14 + payload)
    throw FormatError("'" + path.string() + "': payload size does not match header (" +
                      std::to_string(raw.size() - 14) + " bytes, expected " +
                      std::to_string(payload) + ")");
  Tensor2D t(static_cast<int>(rows), static_cast<int>(cols));
  const unsigned char *p = raw.data() + 14;
  for (size_t i = 0; i < t.v.size(); ++i, p += 4) {
    const uint32_t bits = get_u32(p);
    float f;
    std::memcpy(&f, &bits, 4);
    t.v[i] = static_cast<double>(f);
  }
  return t;
}

Tensor2D resample(const Tensor2D &x, double source_rate, double target_rate) {
  if (target_rate <= 0.0 || source_rate <= 0.0)
    throw ConfigError("resample: rates must be positive");
  if (target_rate > source_rate)
    throw ConfigError("resample: target rate exceeds source rate");
  const double ratio = source_rate / target_rate;
  std::vector<int> keep;
  for (int i = 0;; ++i) {
    const auto src = static_cast<long long>(std::llround(i * ratio));
    if (src >= x.rows) break;
    keep.push_back(static_cast<int>(src));
  }
  Tensor2D out(static_cast<int>(keep.size()), x.cols);
  for (size_t i = 0; i < keep.size(); ++i)
    std::memcpy(out.row(static_cast<int>(i)), x.row(keep[i]), sizeof(double) * x.cols);
  return out;
}

}  // namespace umsa
