#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rknn/data.hpp"
#include "rknn/zone.hpp"

namespace rknn {

struct BenchRow {
  std::string dataset;
  std::string algo;
  int k = 0;
  std::size_t facility_count = 0;
  std::size_t user_count = 0;
  std::string query_seq;  // query ordinal, or "mean" for aggregate rows
  double occluders_accepted = 0.0;
  double t_occluder_ms = 0.0;
  double t_bvh_ms = 0.0;
  double t_cast_ms = 0.0;
  double t_transfer_ms = 0.0;
  double t_total_ms = 0.0;
  double result_count = 0.0;
};

std::string csv_header();
std::string to_csv(const BenchRow& row);
void write_csv(std::ostream& out, const std::vector<BenchRow>& rows);
void write_json(std::ostream& out, const std::vector<BenchRow>& rows);

/// Where the points come from and how they are split and queried.
struct InstanceSpec {
  std::optional<std::string> dataset_path;
  std::optional<std::string> gen;  // GenSpec text, used when no path is given
  std::uint64_t gen_seed = 1;
  std::size_t facilities = 1000;
  std::uint64_t facility_seed = 1;
  std::uint64_t query_seed = 2;
  std::size_t queries = 10;
};

struct Instance {
  std::string label;
  Split split;
  std::vector<std::size_t> queries;  // indices into split.facilities
  bool queries_with_replacement = false;
};

/// Q query facilities: without replacement when Q <= m, otherwise with replacement.
std::vector<std::size_t> sample_queries(std::size_t m, std::size_t q, std::uint64_t seed);

Instance make_instance(const InstanceSpec& spec);

inline const std::vector<std::string> kAlgos{"rtrknn", "infzone", "slice", "oracle"};

struct BenchOptions {
  std::vector<int> ks{10};
  std::vector<std::string> algos{"rtrknn"};
  PruningStrategy strategy = ExactPruning{};
  int threads = 1;
  int warmup = 0;
};

/// One row per (algo, k, query) followed by a mean row per (algo, k).
std::vector<BenchRow> run_bench(const Instance& inst, const BenchOptions& options);

/// Entry point shared by the rknn executable and the tests.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rknn
