#include "phkin/csv.hpp"

#include <charconv>
#include <fstream>

#include "phkin/common.hpp"

namespace phkin {

std::string format_double(double v) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc())
        throw NumericalError("format_double: conversion failed");
    return std::string(buf, ptr);
}

CsvWriter::CsvWriter(std::vector<std::string> header)
    : header_(std::move(header)) {}

void CsvWriter::add_row(const std::vector<double>& values) {
    if (values.size() != header_.size())
        throw DimensionError("CsvWriter: row width != header width");
    rows_.push_back(values);
}

void CsvWriter::write(std::ostream& out) const {
    for (std::size_t i = 0; i < header_.size(); ++i)
        out << (i ? "," : "") << header_[i];
    out << "\n";
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << format_double(row[i]);
        out << "\n";
    }
}

void CsvWriter::write_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("CsvWriter: cannot open " + path);
    write(out);
}

}  // namespace phkin
