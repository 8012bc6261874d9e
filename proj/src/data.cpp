#include "rknn/data.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string_view>

namespace rknn {

namespace {

constexpr char kCacheMagic[8] = {'R', 'K', 'N', 'N', 'P', 'T', '0', '1'};

std::vector<std::string_view> tokenize(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <class T>
bool parse_number(std::string_view tok, T& value) {
  const auto* end = tok.data() + tok.size();
  const auto res = std::from_chars(tok.data(), end, value);
  return res.ec == std::errc{} && res.ptr == end;
}

[[noreturn]] void malformed(std::size_t line_no, const std::string& why) {
  throw Error(ErrorKind::MalformedLine, "line " + std::to_string(line_no) + ": " + why);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> b;
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b.data(), 8);
}

bool get_u64(std::istream& in, std::uint64_t& v) {
  std::array<unsigned char, 8> b;
  if (!in.read(reinterpret_cast<char*>(b.data()), 8)) return false;
  v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return true;
}

}  // namespace

Dataset parse_dimacs_co(std::istream& in, const std::string& label) {
  Dataset ds;
  ds.label = label;
  bool have_header = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tok = tokenize(line);
    if (tok.empty() || tok[0] == "c") continue;
    if (tok[0] == "p") {
      std::size_t n = 0;
      if (have_header || tok.size() != 5 || tok[1] != "aux" || tok[2] != "sp" || tok[3] != "co" ||
          !parse_number(tok[4], n)) {
        malformed(line_no, "bad problem line");
      }
      have_header = true;
      ds.declared_count = n;
      ds.points.reserve(n);
      continue;
    }
    if (tok[0] == "v") {
      long long id = 0;
      Point2 p;
      if (tok.size() != 4 || !parse_number(tok[1], id) || !parse_number(tok[2], p.x) ||
          !parse_number(tok[3], p.y)) {
        malformed(line_no, "expected 'v id x y'");
      }
      if (!is_finite(p)) malformed(line_no, "non-finite coordinate");
      ds.points.push_back(p);
      continue;
    }
    malformed(line_no, "unknown line type '" + std::string(tok[0]) + "'");
  }
  if (have_header && ds.points.size() != ds.declared_count) {
    throw Error(ErrorKind::CountMismatch, "header declares " + std::to_string(ds.declared_count) + " vertices, found " +
                                              std::to_string(ds.points.size()));
  }
  if (!have_header) ds.declared_count = ds.points.size();
  return ds;
}

void write_dimacs_co(std::ostream& out, const Dataset& ds) {
  if (!ds.label.empty()) out << "c " << ds.label << '\n';
  out << "p aux sp co " << ds.points.size() << '\n';
  char buf[96];
  for (std::size_t i = 0; i < ds.points.size(); ++i) {
    std::snprintf(buf, sizeof buf, "v %zu %.17g %.17g\n", i + 1, ds.points[i].x, ds.points[i].y);
    out << buf;
  }
}

void write_point_cache(std::ostream& out, const Dataset& ds) {
  out.write(kCacheMagic, sizeof kCacheMagic);
  put_u64(out, ds.points.size());
  for (const auto& p : ds.points) {
    put_u64(out, std::bit_cast<std::uint64_t>(p.x));
    put_u64(out, std::bit_cast<std::uint64_t>(p.y));
  }
}

Dataset read_point_cache(std::istream& in, const std::string& label) {
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kCacheMagic, 8) != 0) {
    throw Error(ErrorKind::Io, "not a point cache (bad magic)");
  }
  std::uint64_t n = 0;
  if (!get_u64(in, n)) throw Error(ErrorKind::Io, "truncated point cache header");
  Dataset ds;
  ds.label = label;
  ds.declared_count = n;
  ds.points.resize(n);
  for (auto& p : ds.points) {
    std::uint64_t x = 0, y = 0;
    if (!get_u64(in, x) || !get_u64(in, y)) throw Error(ErrorKind::Io, "truncated point cache body");
    p = {std::bit_cast<double>(x), std::bit_cast<double>(y)};
  }
  return ds;
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  char magic[8] = {};
  in.read(magic, 8);
  const bool cache = in.gcount() == 8 && std::memcmp(magic, kCacheMagic, 8) == 0;
  in.clear();
  in.seekg(0);
  return cache ? read_point_cache(in, path) : parse_dimacs_co(in, path);
}

void save_dataset(const std::string& path, const Dataset& ds, bool binary) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
  if (binary) {
    write_point_cache(out, ds);
  } else {
    write_dimacs_co(out, ds);
  }
  if (!out) throw Error(ErrorKind::Io, "write failed for '" + path + "'");
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "empty sampling range");
  const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
  for (;;) {
    const std::uint64_t x = engine_();
    if (x >= threshold) return x % n;
  }
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Split split_facilities(const Dataset& ds, const SplitSpec& spec) {
  const std::size_t n = ds.points.size();
  if (spec.facility_count < 1) throw Error(ErrorKind::InvalidArgument, "facility count must be at least 1");
  if (spec.facility_count > n) {
    throw Error(ErrorKind::SpecTooLarge, "facility count " + std::to_string(spec.facility_count) +
                                             " exceeds dataset size " + std::to_string(n));
  }
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(spec.seed);
  for (std::size_t i = 0; i < spec.facility_count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(idx[i], idx[j]);
  }
  Split s;
  std::vector<std::uint8_t> chosen(n, 0);
  s.facilities.reserve(spec.facility_count);
  for (std::size_t i = 0; i < spec.facility_count; ++i) {
    chosen[idx[i]] = 1;
    s.facilities.push_back(ds.points[idx[i]]);
    s.facility_index.push_back(idx[i]);
  }
  s.users.reserve(n - spec.facility_count);
  for (std::size_t i = 0; i < n; ++i) {
    if (chosen[i]) continue;
    s.users.push_back(ds.points[i]);
    s.user_index.push_back(i);
  }
  return s;
}

GenSpec parse_gen_spec(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  GenSpec g;
  const auto fail = [&] { throw Error(ErrorKind::InvalidArgument, "bad generator spec '" + text + "'"); };
  if (parts.empty()) fail();
  if (parts[0] == "uniform" && parts.size() == 2) {
    g.kind = GenSpec::Kind::Uniform;
    if (!parse_number(std::string_view(parts[1]), g.n)) fail();
  } else if (parts[0] == "clusters" && (parts.size() == 2 || parts.size() == 4)) {
    g.kind = GenSpec::Kind::Clusters;
    if (!parse_number(std::string_view(parts[1]), g.n)) fail();
    if (parts.size() == 4) {
      if (!parse_number(std::string_view(parts[2]), g.clusters) ||
          !parse_number(std::string_view(parts[3]), g.spread) || g.clusters < 1 || !(g.spread >= 0.0)) {
        fail();
      }
    } else {
      g.clusters = 64;
    }
  } else {
    fail();
  }
  return g;
}

std::string to_string(const GenSpec& spec) {
  if (spec.kind == GenSpec::Kind::Uniform) return "uniform:" + std::to_string(spec.n);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", spec.spread);
  return "clusters:" + std::to_string(spec.n) + ":" + std::to_string(spec.clusters) + ":" + buf;
}

Dataset gen_synthetic(const GenSpec& spec, const Rect& rect, std::uint64_t seed) {
  Rng rng(seed);
  Dataset ds;
  ds.label = to_string(spec);
  ds.declared_count = spec.n;
  ds.points.reserve(spec.n);
  const auto in_rect = [&](double ux, double uy) {
    return Point2{rect.min.x + ux * rect.width(), rect.min.y + uy * rect.height()};
  };
  if (spec.kind == GenSpec::Kind::Uniform) {
    for (std::size_t i = 0; i < spec.n; ++i) {
      const double ux = rng.uniform();
      const double uy = rng.uniform();
      ds.points.push_back(in_rect(ux, uy));
    }
    return ds;
  }
  std::vector<Point2> centers;
  for (int c = 0; c < spec.clusters; ++c) {
    const double ux = rng.uniform();
    const double uy = rng.uniform();
    centers.push_back(in_rect(ux, uy));
  }
  for (std::size_t i = 0; i < spec.n; ++i) {
    const Point2 c = centers[rng.below(centers.size())];
    const double dx = rng.normal() * spec.spread;
    const double dy = rng.normal() * spec.spread;
    ds.points.push_back({std::clamp(c.x + dx, rect.min.x, rect.max.x), std::clamp(c.y + dy, rect.min.y, rect.max.y)});
  }
  return ds;
}

}  // namespace rknn
