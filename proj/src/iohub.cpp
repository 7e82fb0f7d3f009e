#include "snnls/iohub.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

namespace snnls {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void parse_fail(const std::string& path, int line, const std::string& what) {
    throw ValidationError(path + ":" + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& tok, const std::string& path, int line) {
    try {
        size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size()) parse_fail(path, line, "trailing characters in number '" + tok + "'");
        return v;
    } catch (const ValidationError&) {
        throw;
    } catch (const std::exception&) {
        parse_fail(path, line, "malformed number '" + tok + "'");
    }
}

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

NonNegMatrix checked(Matrix m, const std::string& path) {
    try {
        return NonNegMatrix(std::move(m));
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

NonNegMatrix read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open file: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(t);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            const std::string cell = trim(tok);
            if (cell.empty()) parse_fail(path, lineno, "empty cell");
            row.push_back(parse_double(cell, path, lineno));
        }
        if (!rows.empty() && row.size() != rows.front().size())
            parse_fail(path, lineno,
                       "row has " + std::to_string(row.size()) + " values, expected " +
                           std::to_string(rows.front().size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ValidationError(path + ": no data rows");
    Matrix m(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < rows[i].size(); ++j)
            m(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
    return checked(std::move(m), path);
}

NonNegMatrix read_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open file: " + path);
    std::string line;
    int lineno = 0;
    if (!std::getline(in, line)) parse_fail(path, 1, "empty file");
    ++lineno;
    {
        std::stringstream ss(line);
        std::string banner, object, fmt, field, symmetry;
        ss >> banner >> object >> fmt >> field >> symmetry;
        if (banner != "%%MatrixMarket" || lower(object) != "matrix")
            parse_fail(path, lineno, "not a MatrixMarket file");
        if (lower(fmt) != "array")
            parse_fail(path, lineno, "unsupported storage '" + fmt + "' (only dense array)");
        const std::string f = lower(field);
        if (f != "real" && f != "integer" && f != "double")
            parse_fail(path, lineno, "unsupported field '" + field + "'");
        if (lower(symmetry) != "general")
            parse_fail(path, lineno, "unsupported symmetry '" + symmetry + "'");
    }
    int r = -1, c = -1;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '%') continue;
        std::stringstream ss(t);
        if (!(ss >> r >> c)) parse_fail(path, lineno, "malformed size line '" + t + "'");
        std::string rest;
        if (ss >> rest) parse_fail(path, lineno, "trailing tokens on size line");
        break;
    }
    if (r < 0 || c < 0) parse_fail(path, lineno, "missing size line");
    Matrix m(r, c);
    size_t count = 0;
    const size_t total = static_cast<size_t>(r) * c;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '%') continue;
        std::stringstream ss(t);
        std::string tok;
        while (ss >> tok) {
            if (count >= total) parse_fail(path, lineno, "more entries than header declares");
            const double v = parse_double(tok, path, lineno);
            // Array storage is column-major.
            const int col = static_cast<int>(count / r);
            const int row = static_cast<int>(count % r);
            m(row, col) = v;
            ++count;
        }
    }
    if (count != total)
        throw ValidationError(path + ": expected " + std::to_string(total) + " entries, found " +
                              std::to_string(count));
    return checked(std::move(m), path);
}

void write_csv(const std::string& path, const Matrix& m) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open file for writing: " + path);
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_full(m(i, j));
        }
        out << '\n';
    }
    if (!out) throw ValidationError("write failed: " + path);
}

void write_matrix_market(const std::string& path, const Matrix& m) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open file for writing: " + path);
    out << "%%MatrixMarket matrix array real general\n";
    out << m.rows() << ' ' << m.cols() << '\n';
    for (int j = 0; j < m.cols(); ++j)
        for (int i = 0; i < m.rows(); ++i) out << format_full(m(i, j)) << '\n';
    if (!out) throw ValidationError("write failed: " + path);
}

}  // namespace

MatrixFormat format_from_path(const std::string& path) {
    const size_t dot = path.find_last_of('.');
    const std::string ext = dot == std::string::npos ? "" : lower(path.substr(dot));
    if (ext == ".mtx") return MatrixFormat::MatrixMarket;
    if (ext == ".csv") return MatrixFormat::Csv;
    throw ValidationError("cannot deduce matrix format from path '" + path +
                          "' (expected .mtx or .csv)");
}

NonNegMatrix read_matrix(const std::string& path, MatrixFormat format) {
    return format == MatrixFormat::Csv ? read_csv(path) : read_matrix_market(path);
}

NonNegMatrix read_matrix(const std::string& path) {
    return read_matrix(path, format_from_path(path));
}

void write_matrix(const std::string& path, const Matrix& m, MatrixFormat format) {
    if (format == MatrixFormat::Csv)
        write_csv(path, m);
    else
        write_matrix_market(path, m);
}

void write_matrix(const std::string& path, const Matrix& m) {
    write_matrix(path, m, format_from_path(path));
}

NonNegMatrix read_pgm_patches(const std::string& path, int patch) {
    if (patch < 1) throw ValidationError("read_pgm_patches: patch size must be positive");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open file: " + path);

    // Header tokens (magic, width, height, maxval) separated by whitespace,
    // with '#' comments running to end of line.
    auto next_token = [&]() -> std::string {
        std::string tok;
        int ch;
        while ((ch = in.get()) != EOF) {
            if (ch == '#') {
                while ((ch = in.get()) != EOF && ch != '\n') {
                }
                continue;
            }
            if (std::isspace(ch)) {
                if (!tok.empty()) return tok;
                continue;
            }
            tok.push_back(static_cast<char>(ch));
        }
        return tok;
    };
    const std::string magic = next_token();
    if (magic != "P2" && magic != "P5")
        throw ValidationError(path + ": not a PGM file (magic '" + magic + "')");
    auto header_int = [&](const char* what) {
        const std::string tok = next_token();
        try {
            size_t used = 0;
            const int v = std::stoi(tok, &used);
            if (used != tok.size() || v < 0) throw std::invalid_argument(tok);
            return v;
        } catch (const std::exception&) {
            throw ValidationError(path + ": malformed " + std::string(what) + " '" + tok + "'");
        }
    };
    const int width = header_int("width");
    const int height = header_int("height");
    const int maxval = header_int("maxval");
    if (width < 1 || height < 1) throw ValidationError(path + ": empty image");
    if (maxval < 1 || maxval > 65535)
        throw ValidationError(path + ": maxval " + std::to_string(maxval) + " out of range");
    if (patch > width || patch > height)
        throw ValidationError(path + ": patch " + std::to_string(patch) +
                              " larger than image " + std::to_string(width) + "x" +
                              std::to_string(height));

    const size_t npix = static_cast<size_t>(width) * height;
    std::vector<double> pix(npix);
    if (magic == "P2") {
        for (size_t i = 0; i < npix; ++i) {
            const std::string tok = next_token();
            if (tok.empty()) throw ValidationError(path + ": truncated pixel data");
            try {
                size_t used = 0;
                const long v = std::stol(tok, &used);
                if (used != tok.size() || v < 0 || v > maxval) throw std::invalid_argument(tok);
                pix[i] = static_cast<double>(v) / maxval;
            } catch (const std::exception&) {
                throw ValidationError(path + ": malformed pixel '" + tok + "'");
            }
        }
    } else {
        // Binary data starts after the single whitespace byte terminating the
        // maxval token, which next_token() already consumed.
        const int bytes = maxval > 255 ? 2 : 1;
        std::vector<unsigned char> raw(npix * bytes);
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (static_cast<size_t>(in.gcount()) != raw.size())
            throw ValidationError(path + ": truncated pixel data");
        for (size_t i = 0; i < npix; ++i) {
            const int v = bytes == 2 ? (raw[2 * i] << 8) | raw[2 * i + 1] : raw[i];
            if (v > maxval)
                throw ValidationError(path + ": pixel value " + std::to_string(v) +
                                      " exceeds maxval");
            pix[i] = static_cast<double>(v) / maxval;
        }
    }

    const int tiles_x = width / patch;
    const int tiles_y = height / patch;
    Matrix out(patch * patch, tiles_x * tiles_y);
    int col = 0;
    for (int ty = 0; ty < tiles_y; ++ty)
        for (int tx = 0; tx < tiles_x; ++tx, ++col) {
            int row = 0;
            for (int py = 0; py < patch; ++py)
                for (int px = 0; px < patch; ++px, ++row) {
                    const size_t y = static_cast<size_t>(ty) * patch + py;
                    const size_t x = static_cast<size_t>(tx) * patch + px;
                    out(row, col) = pix[y * width + x];
                }
        }
    return NonNegMatrix(std::move(out));
}

bool IniConfig::has(const std::string& section, const std::string& key) const {
    auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
}

std::string IniConfig::get(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
    auto s = sections_.find(section);
    if (s == sections_.end()) return fallback;
    auto k = s->second.find(key);
    return k == s->second.end() ? fallback : k->second;
}

double IniConfig::get_double(const std::string& section, const std::string& key,
                             double fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get(section, key);
    try {
        size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ValidationError("config value [" + section + "] " + key + " = '" + v +
                              "' is not a number");
    }
}

int IniConfig::get_int(const std::string& section, const std::string& key, int fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get(section, key);
    try {
        size_t used = 0;
        const int x = std::stoi(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ValidationError("config value [" + section + "] " + key + " = '" + v +
                              "' is not an integer");
    }
}

IniConfig read_ini(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open file: " + path);
    IniConfig cfg;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find_first_of("#;");
        std::string t = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']') parse_fail(path, lineno, "unterminated section header");
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        const size_t eq = t.find('=');
        if (eq == std::string::npos) parse_fail(path, lineno, "expected key=value");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty()) parse_fail(path, lineno, "empty key");
        cfg.set(section, key, value);
    }
    return cfg;
}

nlohmann::json sanitize_json(const nlohmann::json& doc, std::vector<std::string>& warnings) {
    std::function<nlohmann::json(const nlohmann::json&, const std::string&)> walk =
        [&](const nlohmann::json& node, const std::string& ptr) -> nlohmann::json {
        if (node.is_object()) {
            nlohmann::json out = nlohmann::json::object();
            for (auto it = node.begin(); it != node.end(); ++it)
                out[it.key()] = walk(it.value(), ptr + "/" + it.key());
            return out;
        }
        if (node.is_array()) {
            nlohmann::json out = nlohmann::json::array();
            for (size_t i = 0; i < node.size(); ++i)
                out.push_back(walk(node[i], ptr + "/" + std::to_string(i)));
            return out;
        }
        if (node.is_number_float()) {
            const double v = node.get<double>();
            if (!std::isfinite(v)) {
                warnings.push_back("non-finite value at " + (ptr.empty() ? "/" : ptr) +
                                   " replaced with null");
                return nullptr;
            }
        }
        return node;
    };
    return walk(doc, "");
}

void write_report(const nlohmann::json& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open file for writing: " + path);
    out << report.dump(2) << '\n';
    if (!out) throw ValidationError("write failed: " + path);
}

}  // namespace snnls
