#include "opinionlab/csv.hpp"

#include <cstdio>
#include <stdexcept>

namespace opinionlab::csv {

std::string number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string number(long long v) {
    return std::to_string(v);
}

std::string escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) {
        return field;
    }
    std::string quoted = "\"";
    for (char c : field) {
        if (c == '"') {
            quoted += '"';
        }
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

Writer::Writer(const std::string& path, const std::string& comment,
               const std::vector<std::string>& header)
    : out_(path), path_(path), columns_(header.size()) {
    if (!out_) {
        throw std::runtime_error("cannot open CSV file for writing: " + path);
    }
    out_ << "# " << comment << '\n';
    row(header);
}

void Writer::row(const std::vector<std::string>& fields) {
    if (fields.size() != columns_) {
        throw std::logic_error("CSV row width mismatch in " + path_);
    }
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) {
            out_ << ',';
        }
        out_ << escape(fields[i]);
    }
    out_ << '\n';
}

void Writer::close() {
    out_.flush();
    if (!out_) {
        throw std::runtime_error("write failed: " + path_);
    }
    out_.close();
}

}  // namespace opinionlab::csv
