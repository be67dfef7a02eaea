#include "starscat/csv.hpp"

#include <charconv>

namespace starscat {

std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw Error("format_double failed");
    return std::string(buf, ptr);
}

CsvWriter::CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw Error("cannot open output file: " + path);
}

void CsvWriter::comment(const std::string& line) { out_ << "# " << line << "\n"; }

void CsvWriter::header(const std::vector<std::string>& columns) { row(columns); }

void CsvWriter::row(const std::vector<std::string>& fields) {
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ << ",";
        out_ << fields[i];
    }
    out_ << "\n";
    if (!out_) throw Error("write failed");
}

}  // namespace starscat
