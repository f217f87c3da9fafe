#pragma once

#include <string>
#include <vector>

namespace levymap {

// 17 significant digits, '.' decimal; loses nothing on round-trip
std::string format_g17(double v);

// write via temp file + rename in the same directory
void atomic_write_file(const std::string& path, const std::string& content);

std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

}  // namespace levymap
