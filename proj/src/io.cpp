#include "bouss/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include <zlib.h>

namespace bouss {

namespace {

constexpr char kMagic[8] = {'B', 'S', 'Q', 'C', 'K', 'P', 'T', '\0'};
constexpr std::uint32_t kVersion = 1;

std::string read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_all(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write '" + path + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("write failed for '" + path + "'");
}

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& tok, const std::string& where) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (tok.empty() || end != tok.c_str() + tok.size()) throw FormatError(where + ": cannot parse '" + tok + "'");
  return v;
}

class Writer {
 public:
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void raw(const char* p, size_t n) { buf_.append(p, n); }
  void matrix(const Eigen::MatrixXcd& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        f64(m(i, j).real());
        f64(m(i, j).imag());
      }
  }
  void vector(const Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) f64(v(i));
  }
  std::string& bytes() { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  Reader(const std::string& b, size_t end) : buf_(b), end_(end) {}
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf_[pos_++])) << (8 * i);
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf_[pos_++])) << (8 * i);
    return v;
  }
  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(buf_[pos_++]);
  }
  double f64() { return std::bit_cast<double>(u64()); }
  void raw(char* p, size_t n) {
    need(n);
    std::memcpy(p, buf_.data() + pos_, n);
    pos_ += n;
  }
  Eigen::MatrixXcd matrix(Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXcd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) {
        const double re = f64();
        m(i, j) = cplx(re, f64());
      }
    return m;
  }
  Eigen::VectorXd vector(Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = f64();
    return v;
  }
  bool done() const { return pos_ == end_; }

 private:
  void need(size_t n) const {
    if (pos_ + n > end_) throw FormatError("checkpoint truncated");
  }
  const std::string& buf_;
  size_t end_;
  size_t pos_ = 0;
};

std::uint32_t crc(const std::string& b, size_t n) {
  return static_cast<std::uint32_t>(crc32(0L, reinterpret_cast<const Bytef*>(b.data()), static_cast<uInt>(n)));
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string tok;
  std::istringstream is(line);
  while (std::getline(is, tok, sep)) out.push_back(tok);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

std::string series_csv(const Series& s) {
  std::string out;
  for (size_t c = 0; c < kRecordColumns.size(); ++c) {
    if (c) out += ',';
    out += kRecordColumns[c];
  }
  out += '\n';
  for (const auto& r : s) {
    const auto v = record_values(r);
    for (size_t c = 0; c < v.size(); ++c) {
      if (c) out += ',';
      out += fmt17(v[c]);
    }
    out += '\n';
  }
  return out;
}

void write_series_csv(const std::string& path, const Series& s) { write_all(path, series_csv(s)); }

Series read_series_csv(const std::string& path) {
  std::istringstream in(read_all(path));
  std::string line;
  if (!std::getline(in, line)) throw FormatError(path + ": empty file");
  const auto header = split(line, ',');
  if (header.size() != kRecordColumns.size()) throw FormatError(path + ": expected 13 columns in the header");
  for (size_t c = 0; c < header.size(); ++c)
    if (header[c] != kRecordColumns[c])
      throw FormatError(path + ": column " + std::to_string(c) + " is '" + header[c] + "', expected '" +
                        std::string(kRecordColumns[c]) + "'");
  Series s;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto tok = split(line, ',');
    const std::string where = path + ":" + std::to_string(row);
    if (tok.size() != kRecordColumns.size()) throw FormatError(where + ": expected 13 values");
    std::array<double, 13> v{};
    for (size_t c = 0; c < v.size(); ++c) v[c] = parse_double(tok[c], where);
    s.push_back(record_from_values(v));
  }
  return s;
}

void write_field(const std::string& path, const Field& f) {
  std::string out = std::to_string(f.grid->kmax) + " " + std::to_string(f.grid->n2) + "\n";
  for (Eigen::Index i = 0; i < f.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < f.values.cols(); ++j) {
      if (j) out += ' ';
      out += fmt17(f.values(i, j));
    }
    out += '\n';
  }
  write_all(path, out);
}

Field read_field(const std::string& path) {
  std::istringstream in(read_all(path));
  int kmax = 0, n2 = 0;
  if (!(in >> kmax >> n2)) throw FormatError(path + ": missing 'kmax n2' header");
  GridPtr g;
  try {
    g = make_grid(kmax, n2);
  } catch (const std::invalid_argument& e) {
    throw FormatError(path + ": " + e.what());
  }
  Field f(g);
  for (int i = 0; i < g->n1; ++i)
    for (int j = 0; j < g->n2; ++j) {
      std::string tok;
      if (!(in >> tok))
        throw FormatError(path + ": expected " + std::to_string(g->n1) + " x " + std::to_string(n2) + " values");
      f.values(i, j) = parse_double(tok, path);
    }
  std::string extra;
  if (in >> extra) throw FormatError(path + ": trailing data after the field");
  return f;
}

void write_profile(const std::string& path, const ChannelGrid& g, const Profile& p) {
  std::string out;
  for (Eigen::Index j = 0; j < p.size(); ++j) out += fmt17(g.x2(j)) + " " + fmt17(p(j)) + "\n";
  write_all(path, out);
}

Profile read_profile(const std::string& path) {
  std::istringstream in(read_all(path));
  std::vector<double> vals;
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty() || tok[0][0] == '#') continue;
    if (tok.size() > 2) throw FormatError(path + ":" + std::to_string(row) + ": expected 'value' or 'x2 value'");
    vals.push_back(parse_double(tok.back(), path + ":" + std::to_string(row)));
  }
  return Eigen::Map<Profile>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

void save_checkpoint(const std::string& path, const SimState& s, const Profile& rho0_star) {
  const auto& g = *s.theta.grid;
  Writer w;
  w.raw(kMagic, sizeof kMagic);
  w.u32(kVersion);
  w.u32(static_cast<std::uint32_t>(g.kmax));
  w.u32(static_cast<std::uint32_t>(g.n2));
  w.f64(s.t);
  w.u64(static_cast<std::uint64_t>(s.step));
  w.matrix(s.theta.coeffs);
  w.matrix(s.phi.coeffs);
  w.vector(s.mean_u1);
  w.u8(s.history.valid ? 1 : 0);
  if (s.history.valid) {
    w.matrix(s.history.theta);
    w.matrix(s.history.omega);
    w.vector(s.history.mean);
  }
  w.vector(rho0_star);
  w.u32(crc(w.bytes(), w.bytes().size()));
  // Write then rename so an interrupted save never leaves a torn file.
  const std::string tmp = path + ".tmp";
  write_all(tmp, w.bytes());
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw FormatError("cannot rename checkpoint to '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
  const std::string b = read_all(path);
  if (b.size() < sizeof kMagic + 4) throw FormatError(path + ": not a checkpoint");
  const size_t body = b.size() - 4;
  const std::string tail = b.substr(body);
  if (Reader(tail, 4).u32() != crc(b, body)) throw FormatError(path + ": checksum mismatch");
  Reader r(b, body);
  char magic[8];
  r.raw(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof magic) != 0) throw FormatError(path + ": bad magic");
  if (r.u32() != kVersion) throw FormatError(path + ": unsupported checkpoint version");
  const int kmax = static_cast<int>(r.u32());
  const int n2 = static_cast<int>(r.u32());
  const GridPtr g = make_grid(kmax, n2);
  Checkpoint c;
  c.state.t = r.f64();
  c.state.step = static_cast<std::int64_t>(r.u64());
  c.state.theta = SpectralField(g, r.matrix(kmax + 1, n2));
  c.state.phi = SpectralField(g, r.matrix(kmax + 1, n2));
  c.state.mean_u1 = r.vector(n2);
  c.state.history.valid = r.u8() != 0;
  if (c.state.history.valid) {
    c.state.history.theta = r.matrix(kmax + 1, n2);
    c.state.history.omega = r.matrix(kmax + 1, n2);
    c.state.history.mean = r.vector(n2);
  }
  c.rho0_star = r.vector(n2);
  if (!r.done()) throw FormatError(path + ": trailing bytes in checkpoint");
  return c;
}

}  // namespace bouss
