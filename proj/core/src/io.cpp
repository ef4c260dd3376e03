#include "maxdde/io.hpp"

#include <cstdio>

#include "maxdde/parameters.hpp"

namespace maxdde {

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& columns)
    : out_(path), ncols_(columns.size()) {
    if (!out_) throw Error("cannot open output file: " + path);
    for (std::size_t i = 0; i < columns.size(); ++i)
        out_ << columns[i] << (i + 1 < columns.size() ? "," : "\n");
}

std::string CsvWriter::format(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16e", x);
    return buf;
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != ncols_) throw Error("CsvWriter: column count mismatch");
    for (std::size_t i = 0; i < values.size(); ++i)
        out_ << format(values[i]) << (i + 1 < values.size() ? "," : "\n");
}

}  // namespace maxdde
