#include <doctest.h>

#include <filesystem>
#include <set>
#include <sstream>

#include "rknn/data.hpp"

using namespace rknn;

TEST_CASE("parse_dimacs_co examples") {
  std::istringstream in("p aux sp co 2\nv 1 100 200\nv 2 300 400");
  const auto ds = parse_dimacs_co(in);
  CHECK(ds.declared_count == 2);
  CHECK(ds.points == std::vector<Point2>{{100, 200}, {300, 400}});

  std::istringstream nohdr("c comment\nv 1 5 5");
  const auto d2 = parse_dimacs_co(nohdr);
  CHECK(d2.points == std::vector<Point2>{{5, 5}});
  CHECK(d2.declared_count == 1);

  std::istringstream bad("v 1 5");
  try {
    parse_dimacs_co(bad);
    FAIL("expected MalformedLine");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MalformedLine);
    CHECK(std::string(e.what()).find("line 1") != std::string::npos);
  }
}

TEST_CASE("parse_dimacs_co tolerates CRLF, blank lines and sparse ids") {
  std::istringstream in("c 9th DIMACS\r\np aux sp co 3\r\n\r\nv 10 -73530767 41085396\r\nv 3 1 2\r\nv 77 3 4\r\n");
  const auto ds = parse_dimacs_co(in);
  CHECK(ds.points.size() == 3);
  CHECK(ds.points[0] == Point2{-73530767, 41085396});
}

TEST_CASE("parse_dimacs_co errors") {
  std::istringstream short_in("p aux sp co 3\nv 1 1 1\n");
  try {
    parse_dimacs_co(short_in);
    FAIL("expected CountMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::CountMismatch);
  }
  for (const char* text : {"p aux sp co x\n", "a 1 2\n", "v 1 2 3 4\n", "v one 2 3\n", "v 1 nan 3\n",
                           "p aux sp co 1\np aux sp co 1\nv 1 1 1\n"}) {
    CAPTURE(text);
    std::istringstream in(text);
    CHECK_THROWS_AS(parse_dimacs_co(in), Error);
  }
}

TEST_CASE("text and binary round trips") {
  Rng rng(1);
  Dataset ds;
  for (int i = 0; i < 500; ++i) ds.points.push_back({rng.normal() * 1e7, rng.uniform() * 1e-3});
  ds.declared_count = ds.points.size();

  std::stringstream text;
  write_dimacs_co(text, ds);
  CHECK(parse_dimacs_co(text) == ds);

  std::stringstream bin;
  write_point_cache(bin, ds);
  CHECK(read_point_cache(bin) == ds);

  std::stringstream junk("NOTACACHE");
  CHECK_THROWS_AS(read_point_cache(junk), Error);

  const auto dir = std::filesystem::temp_directory_path();
  const auto co = (dir / "rknn_test_rt.co").string();
  const auto cache = (dir / "rknn_test_rt.bin").string();
  save_dataset(co, ds, false);
  save_dataset(cache, ds, true);
  CHECK(load_dataset(co).points == ds.points);
  CHECK(load_dataset(cache).points == ds.points);
  std::filesystem::remove(co);
  std::filesystem::remove(cache);
  CHECK_THROWS_AS(load_dataset((dir / "rknn_missing_file.co").string()), Error);
}

TEST_CASE("cache layout is little-endian") {
  Dataset ds;
  ds.points = {{1.0, -2.0}};
  std::stringstream bin;
  write_point_cache(bin, ds);
  const std::string s = bin.str();
  REQUIRE(s.size() == 8 + 8 + 16);
  CHECK(s.substr(0, 8) == "RKNNPT01");
  CHECK(static_cast<unsigned char>(s[8]) == 1);
  // 1.0 = 0x3FF0000000000000 stored low byte first.
  CHECK(static_cast<unsigned char>(s[16 + 7]) == 0x3F);
  CHECK(static_cast<unsigned char>(s[16 + 6]) == 0xF0);
}

TEST_CASE("Rng is reproducible and well formed") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  Rng c(7);
  for (int i = 0; i < 10000; ++i) {
    const double u = c.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    REQUIRE(c.below(13) < 13u);
  }
  CHECK_THROWS_AS(c.below(0), Error);
  // Pinned value: mt19937_64 is fully specified by the standard.
  Rng d(5489);
  CHECK(d.next() == 14514284786278117030ull);
}

TEST_CASE("split_facilities examples") {
  Dataset ds;
  for (int i = 0; i < 10; ++i) ds.points.push_back({static_cast<double>(i), 0});
  const auto all = split_facilities(ds, {10, 1});
  CHECK(all.users.empty());
  CHECK(all.facilities.size() == 10);

  try {
    split_facilities(ds, {11, 1});
    FAIL("expected SpecTooLarge");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SpecTooLarge);
  }
  CHECK_THROWS_AS(split_facilities(ds, {0, 1}), Error);

  Dataset big;
  for (int i = 0; i < 10000; ++i) big.points.push_back({static_cast<double>(i), 1});
  const auto s1 = split_facilities(big, {100, 1});
  const auto s1b = split_facilities(big, {100, 1});
  const auto s2 = split_facilities(big, {100, 2});
  CHECK(s1.facility_index == s1b.facility_index);
  CHECK(s1.facility_index != s2.facility_index);

  std::set<std::size_t> idx(s1.facility_index.begin(), s1.facility_index.end());
  CHECK(idx.size() == 100);
  for (auto i : s1.user_index) CHECK(idx.insert(i).second);
  CHECK(idx.size() == big.points.size());
  CHECK(std::is_sorted(s1.user_index.begin(), s1.user_index.end()));
  for (std::size_t i = 0; i < s1.facilities.size(); ++i) CHECK(s1.facilities[i] == big.points[s1.facility_index[i]]);
}

TEST_CASE("generator specs") {
  const auto u = parse_gen_spec("uniform:100");
  CHECK(u.kind == GenSpec::Kind::Uniform);
  CHECK(u.n == 100);
  const auto c = parse_gen_spec("clusters:1000:4:0.01");
  CHECK(c.kind == GenSpec::Kind::Clusters);
  CHECK(c.clusters == 4);
  CHECK(c.spread == 0.01);
  CHECK(to_string(c) == "clusters:1000:4:0.01");
  for (const char* bad : {"", "uniform", "uniform:x", "clusters:10:0:0.1", "clusters:10:2:-1", "grid:5"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_gen_spec(bad), Error);
  }
}

TEST_CASE("gen_synthetic examples") {
  const Rect unit{{0, 0}, {1, 1}};
  CHECK(gen_synthetic(parse_gen_spec("uniform:0"), unit, 1).points.empty());

  const auto ds = gen_synthetic(parse_gen_spec("uniform:10000"), unit, 3);
  REQUIRE(ds.points.size() == 10000);
  int quad[4] = {};
  for (const auto& p : ds.points) {
    REQUIRE(unit.contains(p));
    quad[(p.x >= 0.5 ? 1 : 0) + (p.y >= 0.5 ? 2 : 0)]++;
  }
  // Binomial(10^4, 1/4): sigma ~ 43.3, 4 sigma ~ 173.
  for (int q : quad) CHECK(std::abs(q - 2500) <= 173);

  const auto cl = gen_synthetic(parse_gen_spec("clusters:1000:4:0.01"), unit, 4);
  for (const auto& p : cl.points) REQUIRE(unit.contains(p));
  CHECK(cl.points == gen_synthetic(parse_gen_spec("clusters:1000:4:0.01"), unit, 4).points);
  CHECK(cl.points != gen_synthetic(parse_gen_spec("clusters:1000:4:0.01"), unit, 5).points);
}
