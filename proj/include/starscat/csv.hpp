#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "starscat/common.hpp"

namespace starscat {

// Shortest decimal that round-trips the binary value.
std::string format_double(double v);

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path);

    void comment(const std::string& line);                 // "# line"
    void header(const std::vector<std::string>& columns);  // once, before rows
    void row(const std::vector<std::string>& fields);

private:
    std::ofstream out_;
};

}  // namespace starscat
