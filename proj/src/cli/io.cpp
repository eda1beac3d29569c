#include "ddk/cli/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ddk/error.hpp"

namespace ddk::cli {

namespace fs = std::filesystem;

std::string provenance_comment(const Provenance& p) {
    return "# ddk " + p.version + " config=" + p.config_hash + " seed=" + std::to_string(p.seed) +
           " rng=" + p.generator + "\n";
}

std::string format_number(double v) {
    if (std::isnan(v)) return {};
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string format_optional(const std::optional<double>& v) { return v ? format_number(*v) : std::string{}; }

void write_file(const fs::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    if (ec) throw InputError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InputError("cannot write " + tmp.string());
        out << content;
        if (!out.flush()) throw InputError("write failed for " + tmp.string());
    }
    fs::rename(tmp, path, ec);
    if (ec) throw InputError("cannot move " + tmp.string() + " into place: " + ec.message());
}

TickFile read_tick_file(const fs::path& path, const ColumnMap& columns) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open tick file " + path.string());
    try {
        return parse_ticks(in, columns);
    } catch (const InputError& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

namespace {

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream s(line);
    while (std::getline(s, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

}  // namespace

NumericTable read_numeric_csv(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open sample file " + path.string());
    NumericTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line.front() == '#') continue;
        auto fields = split_commas(line);
        if (table.columns.empty()) {
            for (auto& f : fields) table.columns.push_back(trim(f));
            table.values.resize(table.columns.size());
            continue;
        }
        if (fields.size() != table.columns.size())
            throw InputError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(table.columns.size()) + " fields");
        for (std::size_t c = 0; c < fields.size(); ++c) {
            const auto f = trim(fields[c]);
            double v = 0.0;
            const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
            if (res.ec != std::errc{} || res.ptr != f.data() + f.size() || !std::isfinite(v))
                throw InputError(path.string() + ":" + std::to_string(line_no) + ": not a number: '" + f + "'");
            table.values[c].push_back(v);
        }
    }
    if (table.columns.empty()) throw InputError(path.string() + ": missing header row");
    return table;
}

}  // namespace ddk::cli
