#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace maxdde {

/// CSV with full-precision scientific notation (17 significant digits) so
/// re-runs diff byte-identically.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& columns);
    void row(const std::vector<double>& values);
    bool good() const { return out_.good(); }

    static std::string format(double x);

private:
    std::ofstream out_;
    std::size_t ncols_;
};

}  // namespace maxdde
