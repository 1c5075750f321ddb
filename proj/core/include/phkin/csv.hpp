#ifndef PHKIN_CSV_HPP
#define PHKIN_CSV_HPP

#include <ostream>
#include <string>
#include <vector>

namespace phkin {

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double v);

/// Minimal deterministic CSV emitter; all floats written round-trip exact.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);

    void add_row(const std::vector<double>& values);
    void write(std::ostream& out) const;
    void write_file(const std::string& path) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<double>> rows_;
};

}  // namespace phkin

#endif
