#include "subpair/catalog.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace subpair {

namespace {

// RFC 4180-style reader: quoted fields, doubled quotes, commas and line
// breaks inside quotes, CRLF tolerated.
class CsvReader {
 public:
  explicit CsvReader(std::string_view data) : data_(data) {}

  bool next_record(std::vector<std::string>& fields) {
    fields.clear();
    if (pos_ >= data_.size()) return false;
    std::string field;
    bool quoted = false;
    while (pos_ < data_.size()) {
      char c = data_[pos_];
      if (quoted) {
        if (c == '"') {
          if (pos_ + 1 < data_.size() && data_[pos_ + 1] == '"') {
            field += '"';
            ++pos_;
          } else {
            quoted = false;
          }
        } else {
          field += c;
        }
      } else if (c == '"' && field.empty()) {
        quoted = true;
      } else if (c == ',') {
        fields.push_back(std::move(field));
        field.clear();
      } else if (c == '\n') {
        ++pos_;
        strip_cr(field);
        fields.push_back(std::move(field));
        return true;
      } else {
        field += c;
      }
      ++pos_;
    }
    strip_cr(field);
    fields.push_back(std::move(field));
    return true;
  }

 private:
  static void strip_cr(std::string& s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
  }

  std::string_view data_;
  std::size_t pos_ = 0;
};

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::optional<std::int64_t> parse_ll(const std::string& raw) {
  const std::string s = trim(raw);
  if (s.empty()) return std::nullopt;
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<double> parse_double(const std::string& raw) {
  const std::string s = trim(raw);
  if (s.empty()) return std::nullopt;
  try {
    std::size_t consumed = 0;
    double v = std::stod(s, &consumed);
    if (consumed != s.size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::string field_or_empty(const std::vector<std::string>& row, std::size_t idx) {
  return idx < row.size() ? row[idx] : std::string();
}

}  // namespace

CatalogLoad load_catalog(const std::filesystem::path& path, const ColumnMapping& mapping) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CatalogError("cannot open catalog file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw CatalogError("i/o error reading catalog file: " + path.string());
  std::string data = std::move(buffer).str();
  if (data.size() >= 3 && data.compare(0, 3, "\xEF\xBB\xBF") == 0) data.erase(0, 3);

  CsvReader reader(data);
  std::vector<std::string> row;
  if (!reader.next_record(row)) {
    throw CatalogError("catalog file has no header row: " + path.string());
  }

  std::unordered_map<std::string, std::size_t> columns;
  for (std::size_t i = 0; i < row.size(); ++i) columns.emplace(trim(row[i]), i);
  auto column = [&](const std::string& name) -> std::optional<std::size_t> {
    auto it = columns.find(name);
    if (it == columns.end()) return std::nullopt;
    return it->second;
  };

  const auto id_col = column(mapping.id);
  const auto title_col = column(mapping.title);
  if (!id_col || !title_col) {
    throw CatalogError("catalog header is missing required column '" +
                       (!id_col ? mapping.id : mapping.title) + "'");
  }
  const auto year_col = column(mapping.year);
  const auto type_col = column(mapping.type);
  const auto rating_col = column(mapping.rating);
  const auto rating_count_col = column(mapping.rating_count);
  const auto duration_col = column(mapping.duration);

  // Genre columns: explicit list if configured, else every unmapped column.
  std::vector<std::pair<std::string, std::size_t>> genre_cols;
  if (!mapping.genre_columns.empty()) {
    for (const std::string& name : mapping.genre_columns) {
      if (auto idx = column(name)) genre_cols.emplace_back(name, *idx);
    }
  } else {
    for (const auto& [name, idx] : columns) {
      if (idx == *id_col || idx == *title_col) continue;
      if ((year_col && idx == *year_col) || (type_col && idx == *type_col) ||
          (rating_col && idx == *rating_col) ||
          (rating_count_col && idx == *rating_count_col) ||
          (duration_col && idx == *duration_col)) {
        continue;
      }
      genre_cols.emplace_back(name, idx);
    }
  }
  std::sort(genre_cols.begin(), genre_cols.end());

  CatalogLoad load;
  std::int64_t data_rows = 0;
  while (reader.next_record(row)) {
    if (row.size() == 1 && trim(row[0]).empty()) continue;  // stray blank line
    ++data_rows;
    MovieRecord rec;
    rec.id = trim(field_or_empty(row, *id_col));
    rec.title = trim(field_or_empty(row, *title_col));
    if (rec.id.empty() || rec.title.empty()) {
      ++load.skipped;
      continue;
    }
    if (year_col) {
      if (auto y = parse_ll(field_or_empty(row, *year_col));
          y && *y >= 1870 && *y <= 2100) {
        rec.year = static_cast<int>(*y);
      }
    }
    if (type_col) {
      if (std::string t = trim(field_or_empty(row, *type_col)); !t.empty()) {
        rec.media_type = std::move(t);
      }
    }
    if (rating_col) {
      if (auto r = parse_double(field_or_empty(row, *rating_col));
          r && *r >= 0.0 && *r <= 10.0) {
        rec.rating = *r;
      }
    }
    if (rating_count_col) {
      if (auto c = parse_ll(field_or_empty(row, *rating_count_col)); c && *c >= 0) {
        rec.rating_count = *c;
      }
    }
    if (duration_col) {
      if (auto d = parse_ll(field_or_empty(row, *duration_col)); d && *d >= 0) {
        rec.duration_s =
            mapping.duration_unit == ColumnMapping::DurationUnit::minutes ? *d * 60 : *d;
      }
    }
    for (const auto& [name, idx] : genre_cols) {
      if (trim(field_or_empty(row, idx)) == "1") rec.genres.insert(name);
    }
    load.records.push_back(std::move(rec));
  }

  if (data_rows > 0 && load.records.empty()) {
    throw EmptyCatalogError("no parseable rows in catalog file: " + path.string());
  }
  return load;
}

namespace {

bool passes_type(const MovieRecord& r, const std::string& type) {
  return r.media_type && *r.media_type == type;
}
bool passes_year(const MovieRecord& r, int year_min) {
  return r.year && *r.year >= year_min;
}
bool passes_rating(const MovieRecord& r, double rating_min) {
  return r.rating && *r.rating >= rating_min;
}
bool passes_duration(const MovieRecord& r, std::int64_t duration_min_s) {
  return r.duration_s && *r.duration_s >= duration_min_s;
}
bool passes_genre(const MovieRecord& r, const std::set<std::string>& any) {
  return std::any_of(any.begin(), any.end(),
                     [&](const std::string& g) { return r.genres.count(g) != 0; });
}

template <typename Pred>
void filter_in_place(std::vector<MovieRecord>& records, Pred&& pred) {
  std::erase_if(records, [&](const MovieRecord& r) { return !pred(r); });
}

std::string format_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

std::vector<MovieRecord> apply_filter(const std::vector<MovieRecord>& records,
                                      const FilterSpec& spec) {
  std::vector<MovieRecord> out;
  out.reserve(records.size());
  for (const MovieRecord& r : records) {
    if (spec.type_limit && !passes_type(r, *spec.type_limit)) continue;
    if (spec.year_min && !passes_year(r, *spec.year_min)) continue;
    if (spec.rating_min && !passes_rating(r, *spec.rating_min)) continue;
    if (spec.duration_min_s && !passes_duration(r, *spec.duration_min_s)) continue;
    if (spec.genre_any && !passes_genre(r, *spec.genre_any)) continue;
    out.push_back(r);
  }
  return out;
}

std::vector<FilterStage> filter_report(const std::vector<MovieRecord>& records,
                                       const FilterSpec& spec) {
  std::vector<FilterStage> stages;
  std::vector<MovieRecord> current = records;
  stages.push_back({"all", current.size()});

  if (spec.type_limit) {
    filter_in_place(current, [&](const MovieRecord& r) { return passes_type(r, *spec.type_limit); });
    stages.push_back({"type=" + *spec.type_limit, current.size()});
  }
  if (spec.year_min) {
    filter_in_place(current, [&](const MovieRecord& r) { return passes_year(r, *spec.year_min); });
    stages.push_back({"year>=" + std::to_string(*spec.year_min), current.size()});
  }
  if (spec.rating_min) {
    filter_in_place(current, [&](const MovieRecord& r) { return passes_rating(r, *spec.rating_min); });
    stages.push_back({"rating>=" + format_number(*spec.rating_min), current.size()});
  }
  if (spec.duration_min_s) {
    filter_in_place(current,
                    [&](const MovieRecord& r) { return passes_duration(r, *spec.duration_min_s); });
    stages.push_back({"duration>=" + std::to_string(*spec.duration_min_s) + "s", current.size()});
  }
  if (spec.genre_any) {
    filter_in_place(current, [&](const MovieRecord& r) { return passes_genre(r, *spec.genre_any); });
    std::string label = "genre in {";
    bool first = true;
    for (const std::string& g : *spec.genre_any) {
      if (!first) label += ",";
      label += g;
      first = false;
    }
    label += "}";
    stages.push_back({label, current.size()});
  }
  return stages;
}

}  // namespace subpair
