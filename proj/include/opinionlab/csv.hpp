#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace opinionlab::csv {

/// Full-precision number formatting with '.' decimal separator, stable
/// across reruns.
std::string number(double v);
std::string number(long long v);

/// RFC-4180 quoting; only applied when the field needs it.
std::string escape(const std::string& field);

/// One CSV file: a '#'-prefixed version comment, a header row, then rows.
class Writer {
public:
    Writer(const std::string& path, const std::string& comment,
           const std::vector<std::string>& header);
    void row(const std::vector<std::string>& fields);
    void close();

private:
    std::ofstream out_;
    std::string path_;
    size_t columns_;
};

}  // namespace opinionlab::csv
