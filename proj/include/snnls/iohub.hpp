#pragma once

#include "snnls/matrix.hpp"

#include <json.hpp>

#include <map>
#include <string>
#include <vector>

namespace snnls {

enum class MatrixFormat { MatrixMarket, Csv };

// Deduce the format from the file extension (.mtx / .csv, case-insensitive).
MatrixFormat format_from_path(const std::string& path);

// Readers validate non-negativity; negative entries are rejected with their
// (row, col) location, parse failures with the offending line number.
NonNegMatrix read_matrix(const std::string& path, MatrixFormat format);
NonNegMatrix read_matrix(const std::string& path);  // format from extension

// Full-precision writers (%.17g): write/read round trips are exact.
// Matrix Market uses the dense "array" layout, column-major.
void write_matrix(const std::string& path, const Matrix& m, MatrixFormat format);
void write_matrix(const std::string& path, const Matrix& m);

// Non-overlapping patch x patch tiles of a PGM image (P2 or P5, maxval up
// to 65535), each flattened row-major into one column, pixel values scaled
// to [0,1]. Tiles are ordered row-major over the tile grid; partial tiles
// at the right/bottom edges are dropped.
NonNegMatrix read_pgm_patches(const std::string& path, int patch);

// Sectioned key=value config text; '#' and ';' start comments. Keys before
// any section header live in the "" section.
class IniConfig {
public:
    bool has(const std::string& section, const std::string& key) const;
    // Returns fallback when absent.
    std::string get(const std::string& section, const std::string& key,
                    const std::string& fallback = "") const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    int get_int(const std::string& section, const std::string& key, int fallback) const;
    const std::map<std::string, std::map<std::string, std::string>>& sections() const {
        return sections_;
    }
    void set(const std::string& section, const std::string& key, const std::string& value) {
        sections_[section][key] = value;
    }

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

IniConfig read_ini(const std::string& path);

// Replace every non-finite number in the document with null, recording each
// replacement's JSON pointer path in `warnings`.
nlohmann::json sanitize_json(const nlohmann::json& doc, std::vector<std::string>& warnings);

// Canonical serialization: sorted keys (nlohmann objects are ordered maps),
// two-space indent, trailing newline. Byte-identical for equal documents.
void write_report(const nlohmann::json& report, const std::string& path);

// Schema tag stamped into every report.
inline constexpr int kReportSchemaVersion = 1;

}  // namespace snnls
