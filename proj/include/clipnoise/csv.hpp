#ifndef CLIPNOISE_CSV_HPP
#define CLIPNOISE_CSV_HPP

/**
 * @file csv.hpp
 * @brief CSV emission with reproducibility comments.
 *
 * Files start with `#`-prefixed comment lines (tool version, timestamp,
 * full run configuration), then one header row and the data rows. Numbers
 * are formatted with %.17g, locale-independent, `.` decimal separator.
 * Output is written to a temporary sibling and renamed into place, so a
 * failed run never leaves a partial file.
 */

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace clipnoise {

/// Shortest-faithful decimal rendering of a double (up to 17 significant
/// digits), identical across runs.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  // trim digits that do not change the value
  for (int precision = 1; precision < 17; ++precision) {
    char probe[40];
    std::snprintf(probe, sizeof(probe), "%.*g", precision, v);
    double back = 0.0;
    std::sscanf(probe, "%lf", &back);
    if (back == v) return probe;
  }
  return buf;
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct CsvDocument {
  std::vector<std::string> comments;  // emitted as "# <line>"
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// Writes the document to `path` atomically (temp file + rename).
inline void write_csv(const std::filesystem::path& path, const CsvDocument& doc) {
  namespace fs = std::filesystem;
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) {
      throw std::ios_base::failure("cannot open output file " + tmp.string());
    }
    for (const auto& c : doc.comments) out << "# " << c << '\n';
    for (std::size_t i = 0; i < doc.columns.size(); ++i) {
      out << doc.columns[i] << (i + 1 < doc.columns.size() ? "," : "");
    }
    out << '\n';
    for (const auto& row : doc.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        out << format_double(row[i]) << (i + 1 < row.size() ? "," : "");
      }
      out << '\n';
    }
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw std::ios_base::failure("write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::ios_base::failure("cannot rename " + tmp.string() + " to " + path.string() + ": " +
                                 ec.message());
  }
}

}  // namespace clipnoise

#endif
