#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fpimpulse {

// Writes the full content to path atomically (temp file, then rename).
void atomic_write_text(const std::string& path, const std::string& content);

// Minimal CSV table builder with deterministic "%.10g" formatting.
class CsvTable {
public:
    explicit CsvTable(std::string header) : header_(std::move(header)) {}

    void add_row(const std::vector<double>& values);
    void add_row_raw(const std::string& line) { rows_.push_back(line); }

    std::string str() const;
    void write(const std::string& path) const { atomic_write_text(path, str()); }

    std::size_t row_count() const { return rows_.size(); }

private:
    std::string header_;
    std::vector<std::string> rows_;
};

// Numeric CSV reader: skips a non-numeric header row, splits on commas.
// Empty cells parse as NaN.
std::vector<std::vector<double>> read_numeric_csv(const std::string& path);

// FNV-1a 64-bit content hash, hex-encoded; used for the run manifest.
std::string fnv1a_hex(const std::string& bytes);

std::string format_double(double v);

} // namespace fpimpulse
