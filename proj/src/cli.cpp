#include "rknn/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>

#include "rknn/baselines.hpp"
#include "rknn/engine.hpp"
#include "rknn/parallel.hpp"
#include "rknn/scene.hpp"

namespace rknn {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Integral columns print without decimals on detail rows, two decimals on mean rows.
std::string count_field(double v, bool mean) { return mean ? fmt("%.2f", v) : fmt("%.0f", v); }

}  // namespace

std::string csv_header() {
  return "dataset,algo,k,facility_count,user_count,query_seq,occluders_accepted,t_occluder_ms,t_bvh_ms,"
         "t_cast_ms,t_transfer_ms,t_total_ms,result_count";
}

std::string to_csv(const BenchRow& r) {
  const bool mean = r.query_seq == "mean";
  std::ostringstream out;
  out << csv_field(r.dataset) << ',' << r.algo << ',' << r.k << ',' << r.facility_count << ',' << r.user_count
      << ',' << r.query_seq << ',' << count_field(r.occluders_accepted, mean) << ',' << fmt("%.3f", r.t_occluder_ms)
      << ',' << fmt("%.3f", r.t_bvh_ms) << ',' << fmt("%.3f", r.t_cast_ms) << ',' << fmt("%.3f", r.t_transfer_ms)
      << ',' << fmt("%.3f", r.t_total_ms) << ',' << count_field(r.result_count, mean);
  return out.str();
}

void write_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << csv_header() << '\n';
  for (const auto& r : rows) out << to_csv(r) << '\n';
}

void write_json(std::ostream& out, const std::vector<BenchRow>& rows) {
  auto arr = nlohmann::json::array();
  for (const auto& r : rows) {
    arr.push_back({{"dataset", r.dataset},
                   {"algo", r.algo},
                   {"k", r.k},
                   {"facility_count", r.facility_count},
                   {"user_count", r.user_count},
                   {"query_seq", r.query_seq},
                   {"occluders_accepted", r.occluders_accepted},
                   {"t_occluder_ms", r.t_occluder_ms},
                   {"t_bvh_ms", r.t_bvh_ms},
                   {"t_cast_ms", r.t_cast_ms},
                   {"t_transfer_ms", r.t_transfer_ms},
                   {"t_total_ms", r.t_total_ms},
                   {"result_count", r.result_count}});
  }
  out << arr.dump(2) << '\n';
}

std::vector<std::size_t> sample_queries(std::size_t m, std::size_t q, std::uint64_t seed) {
  if (m == 0) throw Error(ErrorKind::EmptyFacilitySet, "no facilities to query");
  Rng rng(seed);
  std::vector<std::size_t> out;
  out.reserve(q);
  if (q <= m) {
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < q; ++i) {
      std::swap(idx[i], idx[i + rng.below(m - i)]);
      out.push_back(idx[i]);
    }
  } else {
    for (std::size_t i = 0; i < q; ++i) out.push_back(rng.below(m));
  }
  return out;
}

Instance make_instance(const InstanceSpec& spec) {
  Dataset ds;
  if (spec.dataset_path) {
    ds = load_dataset(*spec.dataset_path);
    ds.label = std::filesystem::path(*spec.dataset_path).filename().string();
  } else if (spec.gen) {
    ds = gen_synthetic(parse_gen_spec(*spec.gen), Rect{{0, 0}, {1, 1}}, spec.gen_seed);
  } else {
    throw Error(ErrorKind::InvalidArgument, "one of --dataset or --gen is required");
  }
  Instance inst;
  inst.label = ds.label;
  inst.split = split_facilities(ds, {spec.facilities, spec.facility_seed});
  inst.queries = sample_queries(inst.split.facilities.size(), spec.queries, spec.query_seed);
  inst.queries_with_replacement = spec.queries > inst.split.facilities.size();
  return inst;
}

namespace {

BenchRow run_one(const Instance& inst, const std::string& algo, int k, std::size_t q, const BenchOptions& opt) {
  const auto& F = inst.split.facilities;
  const auto& U = inst.split.users;
  BenchRow row;
  row.dataset = inst.label;
  row.algo = algo;
  row.k = k;
  row.facility_count = F.size();
  row.user_count = U.size();
  if (algo == "rtrknn") {
    QueryConfig cfg;
    cfg.k = k;
    cfg.strategy = opt.strategy;
    cfg.workers = opt.threads;
    const auto res = rknn_query(F, U, q, cfg);
    row.occluders_accepted = static_cast<double>(res.occluders_accepted);
    row.t_occluder_ms = res.timings.occluder_build_ms;
    row.t_bvh_ms = res.timings.bvh_build_ms;
    row.t_cast_ms = res.timings.raycast_ms;
    row.t_total_ms = res.timings.total_ms;
    row.result_count = static_cast<double>(res.result_user_ids.size());
    return row;
  }
  const auto t0 = Clock::now();
  std::size_t n = 0;
  if (algo == "infzone") {
    n = infzone_rknn(F, U, q, k).size();
  } else if (algo == "slice") {
    n = slice_rknn(F, U, q, k, {true, opt.threads}).size();
  } else if (algo == "oracle") {
    n = oracle_rknn(F, U, q, k, opt.threads).size();
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown algorithm '" + algo + "'");
  }
  row.t_total_ms = ms_since(t0);
  row.result_count = static_cast<double>(n);
  return row;
}

}  // namespace

std::vector<BenchRow> run_bench(const Instance& inst, const BenchOptions& opt) {
  for (const auto& a : opt.algos) {
    if (std::find(kAlgos.begin(), kAlgos.end(), a) == kAlgos.end()) {
      throw Error(ErrorKind::InvalidArgument, "unknown algorithm '" + a + "'");
    }
  }
  for (int k : opt.ks) {
    if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be at least 1");
  }
  std::vector<BenchRow> rows;
  for (const auto& algo : opt.algos) {
    for (int k : opt.ks) {
      for (int w = 0; w < opt.warmup && !inst.queries.empty(); ++w) run_one(inst, algo, k, inst.queries[0], opt);
      BenchRow mean;
      for (std::size_t j = 0; j < inst.queries.size(); ++j) {
        BenchRow r = run_one(inst, algo, k, inst.queries[j], opt);
        r.query_seq = std::to_string(j);
        if (j == 0) mean = r;
        else {
          mean.occluders_accepted += r.occluders_accepted;
          mean.t_occluder_ms += r.t_occluder_ms;
          mean.t_bvh_ms += r.t_bvh_ms;
          mean.t_cast_ms += r.t_cast_ms;
          mean.t_total_ms += r.t_total_ms;
          mean.result_count += r.result_count;
        }
        rows.push_back(std::move(r));
      }
      if (inst.queries.empty()) continue;
      const double n = static_cast<double>(inst.queries.size());
      mean.query_seq = "mean";
      mean.occluders_accepted /= n;
      mean.t_occluder_ms /= n;
      mean.t_bvh_ms /= n;
      mean.t_cast_ms /= n;
      mean.t_total_ms /= n;
      mean.result_count /= n;
      rows.push_back(std::move(mean));
    }
  }
  return rows;
}

namespace {

struct CommonFlags {
  InstanceSpec spec;
  std::string dataset;
  std::string gen;
  int threads = default_workers();
};

void add_instance_flags(CLI::App* cmd, CommonFlags& f) {
  auto* ds = cmd->add_option("--dataset", f.dataset, "DIMACS .co file or point cache");
  auto* gen = cmd->add_option("--gen", f.gen, "synthetic spec: uniform:N | clusters:N[:COUNT:SPREAD]");
  ds->excludes(gen);
  cmd->add_option("--gen-seed", f.spec.gen_seed, "generator seed")->capture_default_str();
  cmd->add_option("--facilities", f.spec.facilities, "facility count")->capture_default_str();
  cmd->add_option("--facility-seed", f.spec.facility_seed, "facility sampling seed")->capture_default_str();
  cmd->add_option("--query-seed", f.spec.query_seed, "query sampling seed")->capture_default_str();
  cmd->add_option("--queries", f.spec.queries, "number of query facilities")->capture_default_str();
  cmd->add_option("--threads", f.threads, "worker threads (default: RKNN_THREADS or all cores)")
      ->check(CLI::PositiveNumber);
}

InstanceSpec finish(CommonFlags& f) {
  InstanceSpec s = f.spec;
  if (!f.dataset.empty()) s.dataset_path = f.dataset;
  if (!f.gen.empty()) s.gen = f.gen;
  if (!s.dataset_path && !s.gen) throw Error(ErrorKind::InvalidArgument, "one of --dataset or --gen is required");
  return s;
}

nlohmann::json metadata(const InstanceSpec& spec, const Instance& inst, const std::string& strategy, int threads) {
  nlohmann::json m{{"dataset", inst.label},
                   {"facilities", inst.split.facilities.size()},
                   {"users", inst.split.users.size()},
                   {"facility_seed", spec.facility_seed},
                   {"query_seed", spec.query_seed},
                   {"queries", inst.queries.size()},
                   {"query_sampling", inst.queries_with_replacement ? "with_replacement" : "without_replacement"},
                   {"strategy", strategy},
                   {"threads", threads},
                   {"kernels", std::string(simd::active_kernels().name)}};
  if (spec.gen) {
    m["generator"] = *spec.gen;
    m["gen_seed"] = spec.gen_seed;
    m["synthetic"] = true;
  }
  return m;
}

std::vector<std::size_t> diff_users(const std::vector<std::uint32_t>& want, const std::vector<std::uint32_t>& got) {
  std::vector<std::uint32_t> d;
  std::set_symmetric_difference(want.begin(), want.end(), got.begin(), got.end(), std::back_inserter(d));
  return {d.begin(), d.end()};
}

int cmd_verify(const InstanceSpec& spec, const std::vector<int>& ks, const std::vector<std::string>& algos,
               int threads, bool fault, std::ostream& out) {
  const Instance inst = make_instance(spec);
  const auto& F = inst.split.facilities;
  const auto& U = inst.split.users;
  out << "dataset " << inst.label << " facilities " << F.size() << " users " << U.size() << " queries "
      << inst.queries.size() << '\n';

  struct Check {
    std::string name;
    std::string algo;
    PruningStrategy strategy;
  };
  std::vector<Check> checks;
  for (const auto& a : algos) {
    if (a == "rtrknn") {
      checks.push_back({"rtrknn:exact", a, ExactPruning{}});
      checks.push_back({"rtrknn:conservative", a, ConservativePruning{}});
      checks.push_back({"rtrknn:none", a, NoPruning{}});
    } else if (a == "infzone" || a == "slice") {
      checks.push_back({a, a, ExactPruning{}});
    } else if (a != "oracle") {
      throw Error(ErrorKind::InvalidArgument, "unknown algorithm '" + a + "'");
    }
  }

  std::size_t mismatches = 0;
  std::string first;
  for (int k : ks) {
    if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be at least 1");
    for (std::size_t j = 0; j < inst.queries.size(); ++j) {
      const std::size_t q = inst.queries[j];
      const auto want = oracle_rknn(F, U, q, k, threads);
      for (const auto& c : checks) {
        std::vector<std::uint32_t> got;
        if (c.algo == "rtrknn") {
          QueryConfig cfg;
          cfg.k = k;
          cfg.strategy = c.strategy;
          cfg.workers = threads;
          cfg.cast.fault_budget_offset = fault ? 1 : 0;
          got = rknn_query(F, U, q, cfg).result_user_ids;
        } else if (c.algo == "infzone") {
          got = infzone_rknn(F, U, q, k);
        } else {
          got = slice_rknn(F, U, q, k, {true, threads});
        }
        const auto d = diff_users(want, got);
        out << "k " << k << " query " << j << " facility " << q << ' ' << c.name << " diff " << d.size() << '\n';
        if (!d.empty() && first.empty()) {
          const bool expected = std::binary_search(want.begin(), want.end(), static_cast<std::uint32_t>(d[0]));
          first = "first mismatch: k " + std::to_string(k) + " query " + std::to_string(j) + " facility " +
                  std::to_string(q) + " algo " + c.name + " user " + std::to_string(d[0]) +
                  (expected ? " (missing from result)" : " (unexpected in result)");
        }
        mismatches += d.size();
      }
    }
  }
  out << mismatches << " mismatches\n";
  if (mismatches > 0) {
    out << first << '\n';
    return 1;
  }
  return 0;
}

int cmd_stats(const InstanceSpec& spec, int k, std::size_t query_seq, const std::string& strategy_text,
              const std::string& dump_path, std::ostream& out) {
  const Instance inst = make_instance(spec);
  if (query_seq >= inst.queries.size()) throw Error(ErrorKind::InvalidArgument, "--query beyond --queries");
  const auto& F = inst.split.facilities;
  const auto& U = inst.split.users;
  const std::size_t q = inst.queries[query_seq];
  const Rect domain = domain_rect(F, U, 0.001);
  out << "dataset " << inst.label << '\n';
  out << "facilities " << F.size() << " users " << U.size() << " k " << k << " query_facility " << q << '\n';
  for (const PruningStrategy s : {PruningStrategy{ExactPruning{}}, PruningStrategy{ConservativePruning{}},
                                  PruningStrategy{NoPruning{}}}) {
    const auto p = prepare_scene(F, q, k, domain, s);
    out << "strategy " << to_string(s) << " occluders " << p.scene.occluder_count << " coincident_skipped "
        << p.selection.coincident_skipped << " triangles " << p.scene.triangles.size();
    if (p.selection.zone) out << " zone_pieces " << p.selection.zone_pieces;
    out << " bvh_nodes " << p.bvh.nodes.size() << " bvh_leaves " << p.bvh.leaf_count() << " bvh_depth "
        << p.bvh.depth() << '\n';
  }
  if (!dump_path.empty()) {
    const auto p = prepare_scene(F, q, k, domain, parse_strategy(strategy_text));
    std::ofstream dump(dump_path);
    if (!dump) throw Error(ErrorKind::Io, "cannot write '" + dump_path + "'");
    dump_scene(dump, p.scene, p.bvh);
    out << "dump " << dump_path << '\n';
  }
  return 0;
}

Rect parse_rect(const std::vector<double>& v) {
  if (v.size() != 4) throw Error(ErrorKind::InvalidArgument, "--rect needs minx,miny,maxx,maxy");
  return make_rect({v[0], v[1]}, {v[2], v[3]});
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reverse k-nearest-neighbor queries by layered ray casting"};
  app.require_subcommand(1);

  // bench
  CommonFlags bench;
  std::vector<int> bench_k{10};
  std::vector<std::string> bench_algos{"rtrknn"};
  std::string bench_strategy = "exact";
  std::string bench_out;
  std::string bench_format = "csv";
  int bench_warmup = 0;
  auto* cb = app.add_subcommand("bench", "benchmark queries and emit per-query rows");
  add_instance_flags(cb, bench);
  cb->add_option("--k", bench_k, "k values")->delimiter(',')->capture_default_str();
  cb->add_option("--algo", bench_algos, "rtrknn,infzone,slice,oracle")->delimiter(',')->capture_default_str();
  cb->add_option("--strategy", bench_strategy, "exact | conservative[:N] | none")->capture_default_str();
  cb->add_option("--out", bench_out, "output path (default stdout)");
  cb->add_option("--format", bench_format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cb->add_option("--warmup", bench_warmup, "untimed warm-up runs per block")->check(CLI::NonNegativeNumber);

  // verify
  CommonFlags verify;
  std::vector<int> verify_k{10};
  std::vector<std::string> verify_algos{"rtrknn", "infzone", "slice"};
  bool verify_fault = false;
  auto* cv = app.add_subcommand("verify", "compare every algorithm with the brute-force oracle");
  add_instance_flags(cv, verify);
  cv->add_option("--k", verify_k, "k values")->delimiter(',')->capture_default_str();
  cv->add_option("--algo", verify_algos, "algorithms to check")->delimiter(',')->capture_default_str();
  cv->add_flag("--inject-early-exit-fault", verify_fault)->group("");

  // stats
  CommonFlags stats;
  int stats_k = 10;
  std::size_t stats_query = 0;
  std::string stats_strategy = "exact";
  std::string stats_dump;
  auto* cs = app.add_subcommand("stats", "occluder, zone and BVH statistics for one query");
  add_instance_flags(cs, stats);
  stats.spec.queries = 1;
  cs->add_option("--k", stats_k, "k")->check(CLI::PositiveNumber)->capture_default_str();
  cs->add_option("--query", stats_query, "which sampled query to inspect")->capture_default_str();
  cs->add_option("--strategy", stats_strategy, "strategy used for --dump")->capture_default_str();
  cs->add_option("--dump", stats_dump, "write the scene and BVH debug dump here");

  // ingest
  std::string ingest_in;
  std::string ingest_out;
  bool ingest_text = false;
  auto* ci = app.add_subcommand("ingest", "convert a DIMACS .co file to the binary point cache");
  ci->add_option("--input", ingest_in, "source .co file or cache")->required();
  ci->add_option("--output", ingest_out, "destination path")->required();
  ci->add_flag("--text", ingest_text, "write DIMACS text instead of the binary cache");

  // gen
  std::string gen_spec;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  bool gen_binary = false;
  std::vector<double> gen_rect{0, 0, 1, 1};
  auto* cg = app.add_subcommand("gen", "write a synthetic dataset");
  cg->add_option("--gen", gen_spec, "uniform:N | clusters:N[:COUNT:SPREAD]")->required();
  cg->add_option("--seed", gen_seed, "generator seed")->capture_default_str();
  cg->add_option("--out", gen_out, "destination path")->required();
  cg->add_option("--rect", gen_rect, "minx,miny,maxx,maxy")->delimiter(',')->capture_default_str();
  cg->add_flag("--binary", gen_binary, "write the binary point cache");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*cb) {
      const InstanceSpec spec = finish(bench);
      const Instance inst = make_instance(spec);
      BenchOptions opt;
      opt.ks = bench_k;
      opt.algos = bench_algos;
      opt.strategy = parse_strategy(bench_strategy);
      opt.threads = bench.threads;
      opt.warmup = bench_warmup;
      const auto rows = run_bench(inst, opt);
      const auto meta = metadata(spec, inst, to_string(opt.strategy), opt.threads);
      std::ofstream file;
      std::ostream* sink = &out;
      if (!bench_out.empty()) {
        file.open(bench_out, std::ios::binary);
        if (!file) throw Error(ErrorKind::Io, "cannot write '" + bench_out + "'");
        sink = &file;
        std::ofstream meta_file(bench_out + ".meta.json");
        meta_file << meta.dump(2) << '\n';
      } else {
        err << "meta " << meta.dump() << '\n';
      }
      if (bench_format == "json") {
        write_json(*sink, rows);
      } else {
        write_csv(*sink, rows);
      }
      return 0;
    }
    if (*cv) return cmd_verify(finish(verify), verify_k, verify_algos, verify.threads, verify_fault, out);
    if (*cs) return cmd_stats(finish(stats), stats_k, stats_query, stats_strategy, stats_dump, out);
    if (*ci) {
      Dataset ds = load_dataset(ingest_in);
      save_dataset(ingest_out, ds, !ingest_text);
      out << "wrote " << ds.points.size() << " points to " << ingest_out << '\n';
      return 0;
    }
    if (*cg) {
      const Dataset ds = gen_synthetic(parse_gen_spec(gen_spec), parse_rect(gen_rect), gen_seed);
      save_dataset(gen_out, ds, gen_binary);
      out << "wrote " << ds.points.size() << " points to " << gen_out << '\n';
      return 0;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace rknn
