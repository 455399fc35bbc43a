#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace robinlab {

inline constexpr const char* kVersion = "0.3.0";

/// Tabular experiment output. Numbers are written with 17 significant digits;
/// text cells are written verbatim (they must not contain commas or newlines).
class Report {
public:
    using Cell = std::variant<double, std::string>;

    Report(std::string command, std::uint64_t config_hash, std::uint64_t seed, std::vector<std::string> columns);

    void add_row(std::vector<Cell> row);

    const std::string& command() const noexcept { return command_; }
    const std::vector<std::string>& columns() const noexcept { return columns_; }
    const std::vector<std::vector<Cell>>& rows() const noexcept { return rows_; }

    /// `# config=<hash> seed=<n> command=<name> version=<v>`, header, rows.
    std::string to_csv() const;
    void write(std::ostream& out) const;
    void save(const std::string& path) const;

private:
    std::string command_;
    std::uint64_t config_hash_;
    std::uint64_t seed_;
    std::vector<std::string> columns_;
    std::vector<std::vector<Cell>> rows_;
};

std::string format_number(double v);

}  // namespace robinlab
