#pragma once

#include <string>
#include <vector>

namespace earl::csv {

// Shortest round-trip decimal representation ('.' decimal point, no locale).
std::string format_double(double value);

std::vector<std::string> split_line(const std::string& line);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Index of a named column, -1 if absent.
    int column(const std::string& name) const;
};

Table read_file(const std::string& path);

}  // namespace earl::csv
