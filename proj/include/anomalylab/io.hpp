#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include <boost/crc.hpp>

#include "errors.hpp"

namespace anomalylab {

// Doubles are written with 17 significant digits so that they read back
// bit-exactly; non-finite values get fixed spellings.
inline std::string format_number(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <class I>
    requires std::is_integral_v<I>
inline std::string format_number(I v)
{
    return std::to_string(v);
}

// Comma-separated table held in memory and written in one go. The first line
// is a "# schema: anomalylab/<name>/v<version>" comment, the second the
// column header; lines end with LF only.
class CsvTable {
public:
    CsvTable(std::string schema, std::vector<std::string> columns)
        : schema_(std::move(schema)), columns_(std::move(columns))
    {
    }

    // Append one row; every argument becomes one field.
    template <class... A>
    void add(const A&... values)
    {
        std::vector<std::string> f{field(values)...};
        if (f.size() != columns_.size())
            throw IoError("csv row has " + std::to_string(f.size()) + " fields, expected " +
                          std::to_string(columns_.size()));
        rows_.push_back(std::move(f));
    }

    const std::string& schema() const { return schema_; }
    const std::vector<std::string>& columns() const { return columns_; }
    std::size_t size() const { return rows_.size(); }
    const std::vector<std::string>& operator[](std::size_t i) const { return rows_[i]; }

    std::string str() const
    {
        std::ostringstream os;
        os << "# schema: " << schema_ << '\n';
        write_line(os, columns_);
        for (const auto& r : rows_) write_line(os, r);
        return os.str();
    }

private:
    template <class T>
    static std::string field(const T& v)
    {
        if constexpr (std::is_convertible_v<T, std::string>)
            return std::string(v);
        else
            return format_number(v);
    }

    static void write_line(std::ostream& os, const std::vector<std::string>& f)
    {
        for (std::size_t i = 0; i < f.size(); ++i) {
            if (i) os << ',';
            os << f[i];
        }
        os << '\n';
    }

    std::string schema_;
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

inline std::string schema_name(const std::string& command, int version = 1)
{
    return "anomalylab/" + command + "/v" + std::to_string(version);
}

inline std::uint32_t crc32(const std::string& bytes)
{
    boost::crc_32_type crc;
    crc.process_bytes(bytes.data(), bytes.size());
    return crc.checksum();
}

inline std::string crc32_hex(const std::string& bytes)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "%08x", static_cast<unsigned>(crc32(bytes)));
    return buf;
}

inline void write_file(const std::string& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    f << text;
    f.flush();
    if (!f) throw IoError("failed writing '" + path + "'");
}

inline std::string read_file(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path + "'");
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

// Minimal reader for tables written by CsvTable (no quoting needed: all
// fields are numbers or bare identifiers).
struct ParsedCsv {
    std::string schema;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const
    {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return static_cast<int>(i);
        return -1;
    }
};

inline ParsedCsv parse_csv(const std::string& text)
{
    ParsedCsv out;
    std::istringstream is(text);
    std::string line;
    auto split = [](const std::string& s) {
        std::vector<std::string> f;
        std::string cur;
        std::istringstream ls(s);
        while (std::getline(ls, cur, ',')) f.push_back(cur);
        if (!s.empty() && s.back() == ',') f.emplace_back();
        return f;
    };
    while (std::getline(is, line)) {
        if (line.rfind("# schema: ", 0) == 0) {
            out.schema = line.substr(10);
            continue;
        }
        if (line.empty() || line[0] == '#') continue;
        if (out.columns.empty())
            out.columns = split(line);
        else
            out.rows.push_back(split(line));
    }
    return out;
}

} // namespace anomalylab
