// Movie catalog ingestion and attribute filtering.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace subpair {

struct MovieRecord {
  std::string id;
  std::string title;
  std::optional<int> year;                    // [1870, 2100] when present
  std::optional<std::string> media_type;      // e.g. "video.movie"
  std::optional<double> rating;               // [0, 10] when present
  std::optional<std::int64_t> rating_count;
  std::optional<std::int64_t> duration_s;     // normalized to seconds
  std::set<std::string> genres;
  friend bool operator==(const MovieRecord&, const MovieRecord&) = default;
};

struct FilterSpec {
  std::optional<std::string> type_limit;
  std::optional<int> year_min;
  std::optional<double> rating_min;
  std::optional<std::int64_t> duration_min_s;
  std::optional<std::set<std::string>> genre_any;

  bool empty() const {
    return !type_limit && !year_min && !rating_min && !duration_min_s && !genre_any;
  }
};

// Adapts arbitrary catalog headers to the canonical fields. Any column not
// named here is treated as a 0/1 genre column.
struct ColumnMapping {
  enum class DurationUnit { seconds, minutes };

  std::string id = "id";
  std::string title = "title";
  std::string year = "year";
  std::string type = "type";
  std::string rating = "imdbRating";
  std::string rating_count = "ratingCount";
  std::string duration = "duration";
  DurationUnit duration_unit = DurationUnit::seconds;
  std::vector<std::string> genre_columns;  // empty => every unmapped column
};

class CatalogError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
class EmptyCatalogError : public CatalogError {
  using CatalogError::CatalogError;
};

struct CatalogLoad {
  std::vector<MovieRecord> records;
  std::int64_t skipped = 0;  // data rows missing id or title
};

// Delimited text, comma separator, first row header, UTF-8. Rows whose id
// or title cannot be read are skipped and counted. Throws CatalogError on
// unreadable files and EmptyCatalogError when data rows exist but none
// parse.
CatalogLoad load_catalog(const std::filesystem::path& path,
                         const ColumnMapping& mapping = {});

// Conjunction of every present bound, all inclusive (>=). Records with an
// unknown value in a bounded attribute are excluded. Input order preserved.
std::vector<MovieRecord> apply_filter(const std::vector<MovieRecord>& records,
                                      const FilterSpec& spec);

struct FilterStage {
  std::string label;
  std::size_t count;
};

// Applies the bounds cumulatively in declaration order (type, year, rating,
// duration, genre), reporting the surviving count after each stage.
std::vector<FilterStage> filter_report(const std::vector<MovieRecord>& records,
                                       const FilterSpec& spec);

}  // namespace subpair
