#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "subpair/catalog.hpp"

using namespace subpair;

namespace {

struct TempFile {
  explicit TempFile(const std::string& contents) {
    path = std::filesystem::temp_directory_path() /
           ("subpair_catalog_" + std::to_string(counter++) + ".csv");
    std::ofstream out(path, std::ios::binary);
    out << contents;
  }
  ~TempFile() { std::filesystem::remove(path); }
  std::filesystem::path path;
  static inline int counter = 0;
};

const char* kHeader = "id,title,year,type,imdbRating,ratingCount,duration,Action,Drama\n";

MovieRecord make(const std::string& id, std::optional<double> rating = {},
                 std::optional<int> year = {}, std::optional<std::string> type = {},
                 std::optional<std::int64_t> duration = {}) {
  MovieRecord r;
  r.id = id;
  r.title = "t-" + id;
  r.rating = rating;
  r.year = year;
  r.media_type = std::move(type);
  r.duration_s = duration;
  return r;
}

}  // namespace

TEST_CASE("load_catalog: header-only file gives an empty catalog") {
  TempFile file(kHeader);
  const CatalogLoad load = load_catalog(file.path);
  CHECK(load.records.empty());
  CHECK(load.skipped == 0);
}

TEST_CASE("load_catalog: rows missing id or title are skipped and counted") {
  TempFile file(std::string(kHeader) +
                "tt1,First,1999,video.movie,7.1,100,5400,1,0\n"
                "tt2,,2001,video.movie,6.0,50,4800,0,1\n"
                "tt3,Third,2005,video.movie,8.0,900,6000,0,0\n");
  const CatalogLoad load = load_catalog(file.path);
  REQUIRE(load.records.size() == 2);
  CHECK(load.skipped == 1);
  CHECK(load.records[0].id == "tt1");
  CHECK(load.records[0].genres == std::set<std::string>{"Action"});
  CHECK(load.records[1].id == "tt3");
  CHECK(load.records[1].genres.empty());
}

TEST_CASE("load_catalog: quoted titles with commas and quotes") {
  TempFile file(std::string(kHeader) +
                "tt1,\"Comma, Title\",1999,video.movie,7.1,100,5400,0,0\n"
                "tt2,\"Say \"\"hi\"\"\",2000,video.movie,6.5,10,4000,0,0\n");
  const CatalogLoad load = load_catalog(file.path);
  REQUIRE(load.records.size() == 2);
  CHECK(load.records[0].title == "Comma, Title");
  CHECK(load.records[1].title == "Say \"hi\"");
}

TEST_CASE("load_catalog: unknown values stay unknown, never zero") {
  TempFile file(std::string(kHeader) +
                "tt1,NoYear,,video.movie,notanumber,,,0,0\n"
                "tt2,BadYear,1492,video.movie,11.0,-3,-60,0,0\n");
  const CatalogLoad load = load_catalog(file.path);
  REQUIRE(load.records.size() == 2);
  CHECK_FALSE(load.records[0].year.has_value());
  CHECK_FALSE(load.records[0].rating.has_value());
  CHECK_FALSE(load.records[0].duration_s.has_value());
  // out-of-range values are treated as unknown
  CHECK_FALSE(load.records[1].year.has_value());
  CHECK_FALSE(load.records[1].rating.has_value());
  CHECK_FALSE(load.records[1].rating_count.has_value());
  CHECK_FALSE(load.records[1].duration_s.has_value());
}

TEST_CASE("load_catalog: duration unit conversion") {
  TempFile file("id,title,duration\ntt1,Movie,90\n");
  ColumnMapping minutes;
  minutes.duration_unit = ColumnMapping::DurationUnit::minutes;
  CHECK(*load_catalog(file.path, minutes).records[0].duration_s == 5400);
  CHECK(*load_catalog(file.path).records[0].duration_s == 90);
}

TEST_CASE("load_catalog: column mapping adapts foreign headers") {
  TempFile file("imdbID,fullTitle,startYear\ntt9,Mapped,1984\n");
  ColumnMapping mapping;
  mapping.id = "imdbID";
  mapping.title = "fullTitle";
  mapping.year = "startYear";
  const CatalogLoad load = load_catalog(file.path, mapping);
  REQUIRE(load.records.size() == 1);
  CHECK(load.records[0].id == "tt9");
  CHECK(load.records[0].title == "Mapped");
  CHECK(*load.records[0].year == 1984);
}

TEST_CASE("load_catalog: errors") {
  CHECK_THROWS_AS(load_catalog("/nonexistent/catalog.csv"), CatalogError);
  TempFile missing_cols("foo,bar\n1,2\n");
  CHECK_THROWS_AS(load_catalog(missing_cols.path), CatalogError);
  TempFile all_bad(std::string(kHeader) + ",NoId,1999,video.movie,7,1,1,0,0\n");
  CHECK_THROWS_AS(load_catalog(all_bad.path), EmptyCatalogError);
}

TEST_CASE("apply_filter: empty spec is the identity") {
  const std::vector<MovieRecord> records = {make("a"), make("b")};
  CHECK(apply_filter(records, {}) == records);
}

TEST_CASE("apply_filter: bounds are inclusive and unknowns are excluded") {
  const std::vector<MovieRecord> records = {
      make("low", 5.9), make("edge", 6.0), make("unknown", std::nullopt)};
  FilterSpec spec;
  spec.rating_min = 6.0;
  const auto out = apply_filter(records, spec);
  REQUIRE(out.size() == 1);
  CHECK(out[0].id == "edge");
}

TEST_CASE("apply_filter: conjunction of all present bounds") {
  const std::vector<MovieRecord> records = {
      make("m1", 7.0, 1999, "video.movie", 5400),
      make("m2", 7.0, 1950, "video.movie", 5400),
      make("m3", 7.0, 1999, "video.episode", 5400),
      make("m4", 5.0, 1999, "video.movie", 5400),
      make("m5", 7.0, 1999, "video.movie", 1200),
  };
  FilterSpec spec;
  spec.type_limit = "video.movie";
  spec.year_min = 1960;
  spec.rating_min = 6.0;
  spec.duration_min_s = 3600;
  const auto out = apply_filter(records, spec);
  REQUIRE(out.size() == 1);
  CHECK(out[0].id == "m1");
}

TEST_CASE("apply_filter: genre_any matches any listed genre") {
  MovieRecord action = make("a");
  action.genres = {"Action"};
  MovieRecord drama = make("d");
  drama.genres = {"Drama"};
  MovieRecord none = make("n");
  FilterSpec spec;
  spec.genre_any = std::set<std::string>{"Action", "Comedy"};
  const auto out = apply_filter({action, drama, none}, spec);
  REQUIRE(out.size() == 1);
  CHECK(out[0].id == "a");
}

namespace {

std::vector<MovieRecord> random_records(std::mt19937_64& rng, std::size_t n) {
  std::vector<MovieRecord> records;
  std::uniform_real_distribution<double> rating(0.0, 10.0);
  std::uniform_int_distribution<int> year(1900, 2030);
  std::uniform_int_distribution<std::int64_t> duration(600, 12000);
  std::bernoulli_distribution has(0.8), movie(0.5);
  for (std::size_t i = 0; i < n; ++i) {
    MovieRecord r = make("id" + std::to_string(i));
    if (has(rng)) r.rating = rating(rng);
    if (has(rng)) r.year = year(rng);
    if (has(rng)) r.duration_s = duration(rng);
    if (has(rng)) r.media_type = movie(rng) ? "video.movie" : "video.episode";
    records.push_back(std::move(r));
  }
  return records;
}

FilterSpec random_spec(std::mt19937_64& rng) {
  std::bernoulli_distribution coin(0.5);
  std::uniform_real_distribution<double> rating(0.0, 10.0);
  std::uniform_int_distribution<int> year(1900, 2030);
  std::uniform_int_distribution<std::int64_t> duration(600, 12000);
  FilterSpec spec;
  if (coin(rng)) spec.type_limit = "video.movie";
  if (coin(rng)) spec.year_min = year(rng);
  if (coin(rng)) spec.rating_min = rating(rng);
  if (coin(rng)) spec.duration_min_s = duration(rng);
  return spec;
}

}  // namespace

TEST_CASE("apply_filter: idempotent and order-preserving") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const auto records = random_records(rng, 60);
    const FilterSpec spec = random_spec(rng);
    const auto once = apply_filter(records, spec);
    CHECK(apply_filter(once, spec) == once);
    // subsequence of the input
    std::size_t cursor = 0;
    for (const MovieRecord& r : once) {
      while (cursor < records.size() && !(records[cursor] == r)) ++cursor;
      CHECK(cursor < records.size());
      ++cursor;
    }
  }
}

TEST_CASE("apply_filter: chaining specs equals their conjunction") {
  std::mt19937_64 rng(100);
  for (int trial = 0; trial < 50; ++trial) {
    const auto records = random_records(rng, 60);
    FilterSpec a, b, both;
    a.rating_min = 5.0;
    b.year_min = 1990;
    both.rating_min = 5.0;
    both.year_min = 1990;
    CHECK(apply_filter(apply_filter(records, a), b) == apply_filter(records, both));
  }
}

TEST_CASE("filter_report: empty spec reports a single all stage") {
  const auto stages = filter_report({make("a"), make("b")}, {});
  REQUIRE(stages.size() == 1);
  CHECK(stages[0].label == "all");
  CHECK(stages[0].count == 2);
}

TEST_CASE("filter_report: cumulative stages with hand-checked counts") {
  const std::vector<MovieRecord> records = {
      make("m1", 7.0, 1999, "video.movie"),
      make("m2", 5.0, 1999, "video.movie"),
      make("m3", 7.0, 1950, "video.movie"),
      make("m4", 7.0, 1999, "video.episode"),
      make("m5", std::nullopt, 1999, "video.movie"),
  };
  FilterSpec spec;
  spec.type_limit = "video.movie";
  spec.year_min = 1960;
  spec.rating_min = 6.0;
  const auto stages = filter_report(records, spec);
  REQUIRE(stages.size() == 4);
  CHECK(stages[0].count == 5);  // all
  CHECK(stages[1].count == 4);  // type
  CHECK(stages[2].count == 3);  // year
  CHECK(stages[3].count == 1);  // rating (m2 low, m5 unknown)
  CHECK(stages[1].label == "type=video.movie");
  CHECK(stages[2].label == "year>=1960");
  CHECK(stages[3].label == "rating>=6");
}

TEST_CASE("filter_report: counts never increase and the last stage matches apply_filter") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 50; ++trial) {
    const auto records = random_records(rng, 80);
    const FilterSpec spec = random_spec(rng);
    const auto stages = filter_report(records, spec);
    for (std::size_t i = 1; i < stages.size(); ++i) {
      CHECK(stages[i].count <= stages[i - 1].count);
    }
    CHECK(stages.back().count == apply_filter(records, spec).size());
  }
}
