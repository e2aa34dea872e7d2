#include "zenolab/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "zenolab/errors.hpp"

namespace zenolab {

std::string format_double(double value)
{
    if (value == 0.0) {
        value = 0.0;  // drop the sign of negative zero
    }
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                   std::chars_format::general, 17);
    if (ec != std::errc{}) {
        throw Error(ErrorCode::InvalidArgument, "cannot format floating-point value");
    }
    return std::string(buf.data(), end);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(const std::vector<double>& values)
{
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) {
        cells.push_back(format_double(v));
    }
    add_row(cells);
}

void CsvTable::add_row(const std::vector<std::string>& cells)
{
    if (cells.size() != header_.size()) {
        throw Error(ErrorCode::DimensionMismatch, "CSV row width differs from header");
    }
    rows_.push_back(cells);
}

std::string CsvTable::str() const
{
    std::string out;
    auto emit = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i != 0) {
                out += ',';
            }
            out += cells[i];
        }
        out += '\n';
    };
    emit(header_);
    for (const auto& row : rows_) {
        emit(row);
    }
    return out;
}

json CsvTable::to_json() const
{
    json rows = json::array();
    for (const auto& row : rows_) {
        json obj = json::object();
        for (std::size_t i = 0; i < header_.size(); ++i) {
            double number = 0.0;
            const auto& cell = row[i];
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), number);
            if (ec == std::errc{} && ptr == cell.data() + cell.size()) {
                obj[header_[i]] = number;
            } else {
                obj[header_[i]] = cell;
            }
        }
        rows.push_back(std::move(obj));
    }
    return rows;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content)
{
    std::filesystem::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error(ErrorCode::InvalidConfig, "cannot open output file " + tmp.string());
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            throw Error(ErrorCode::InvalidConfig, "failed writing " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw Error(ErrorCode::InvalidConfig, "cannot rename onto " + path.string());
    }
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::InvalidConfig, "cannot read " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json matrix_to_json(const ComplexMatrix& m)
{
    json data = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            row.push_back({m(i, j).real(), m(i, j).imag()});
        }
        data.push_back(std::move(row));
    }
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

ComplexMatrix matrix_from_json(const json& j)
{
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const json& data = j.at("data");
    if (rows <= 0 || cols <= 0 || data.size() != static_cast<std::size_t>(rows)) {
        throw Error(ErrorCode::DimensionMismatch, "matrix JSON shape is inconsistent");
    }
    ComplexMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const json& row = data.at(static_cast<std::size_t>(i));
        if (row.size() != static_cast<std::size_t>(cols)) {
            throw Error(ErrorCode::DimensionMismatch, "matrix JSON row has wrong length");
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            const json& z = row.at(static_cast<std::size_t>(c));
            m(i, c) = Complex(z.at(0).get<double>(), z.at(1).get<double>());
        }
    }
    return m;
}

json state_to_json(const StateVector& v)
{
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out.push_back({v(i).real(), v(i).imag()});
    }
    return out;
}

StateVector state_from_json(const json& j)
{
    StateVector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = Complex(j[i].at(0).get<double>(), j[i].at(1).get<double>());
    }
    return v;
}

}  // namespace zenolab
