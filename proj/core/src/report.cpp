#include "robinlab/report.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace robinlab {

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Report::Report(std::string command, std::uint64_t config_hash, std::uint64_t seed, std::vector<std::string> columns)
    : command_(std::move(command)), config_hash_(config_hash), seed_(seed), columns_(std::move(columns)) {}

void Report::add_row(std::vector<Cell> row) {
    if (row.size() != columns_.size()) throw std::invalid_argument("report row width does not match the header");
    for (const auto& c : row) {
        if (const auto* s = std::get_if<std::string>(&c); s && s->find_first_of(",\n") != std::string::npos) {
            throw std::invalid_argument("report text cells must not contain commas or newlines");
        }
    }
    rows_.push_back(std::move(row));
}

std::string Report::to_csv() const {
    char head[96];
    std::snprintf(head, sizeof head, "# config=%016" PRIx64 " seed=%" PRIu64, config_hash_, seed_);
    std::string out = head;
    out += " command=" + command_ + " version=" + kVersion + "\n";
    for (std::size_t i = 0; i < columns_.size(); ++i) out += (i ? "," : "") + columns_[i];
    out += "\n";
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ",";
            if (const auto* d = std::get_if<double>(&row[i])) {
                out += format_number(*d);
            } else {
                out += std::get<std::string>(row[i]);
            }
        }
        out += "\n";
    }
    return out;
}

void Report::write(std::ostream& out) const { out << to_csv(); }

void Report::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write report '" + path + "'");
    write(out);
}

}  // namespace robinlab
