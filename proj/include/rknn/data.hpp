#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "rknn/types.hpp"

namespace rknn {

struct Dataset {
  std::vector<Point2> points;
  std::string label;
  std::size_t declared_count = 0;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// DIMACS 9th challenge coordinate file: "c" comments, one "p aux sp co N"
/// header, "v id x y" vertex lines. Coordinates are kept verbatim.
Dataset parse_dimacs_co(std::istream& in, const std::string& label = {});
void write_dimacs_co(std::ostream& out, const Dataset& ds);

/// Binary cache: "RKNNPT01", u64 count, then count (x, y) doubles, all little-endian.
void write_point_cache(std::ostream& out, const Dataset& ds);
Dataset read_point_cache(std::istream& in, const std::string& label = {});

/// Reads either format, sniffing the cache magic.
Dataset load_dataset(const std::string& path);
void save_dataset(const std::string& path, const Dataset& ds, bool binary);

/// Platform-independent sampling on top of mt19937_64 (whose output sequence
/// is fixed by the standard; the std distributions are not, so none are used).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, n), n > 0, by rejection.
  std::uint64_t below(std::uint64_t n);
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal via Box-Muller.
  double normal();

 private:
  std::mt19937_64 engine_;
};

struct SplitSpec {
  std::size_t facility_count = 1;
  std::uint64_t seed = 1;
};

struct Split {
  std::vector<Point2> facilities;          // sampled order
  std::vector<Point2> users;               // dataset order
  std::vector<std::size_t> facility_index; // dataset index of each facility
  std::vector<std::size_t> user_index;
};

Split split_facilities(const Dataset& ds, const SplitSpec& spec);

struct GenSpec {
  enum class Kind { Uniform, Clusters } kind = Kind::Uniform;
  std::size_t n = 0;
  int clusters = 1;
  double spread = 0.01;
};

/// "uniform:N" or "clusters:N:COUNT:SPREAD".
GenSpec parse_gen_spec(const std::string& text);
std::string to_string(const GenSpec& spec);

Dataset gen_synthetic(const GenSpec& spec, const Rect& rect, std::uint64_t seed);

}  // namespace rknn
