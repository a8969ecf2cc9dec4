#include "rankhc/matrix.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace rankhc {

ObservationMatrix::ObservationMatrix(std::size_t n, std::size_t t,
                                     std::vector<double> values)
    : n_(n), t_(t), values_(std::move(values)) {
    if (n_ < 2) throw std::invalid_argument("ObservationMatrix: need n >= 2 subjects");
    if (t_ < 1) throw std::invalid_argument("ObservationMatrix: need t >= 1 referentials");
    if (values_.size() != n_ * t_)
        throw std::invalid_argument("ObservationMatrix: value count does not match n*t");
    for (std::size_t k = 0; k < values_.size(); ++k) {
        if (!std::isfinite(values_[k])) {
            throw std::invalid_argument(
                "ObservationMatrix: non-finite entry at row " + std::to_string(k / t_) +
                ", col " + std::to_string(k % t_));
        }
    }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    cells.push_back(cur);
    return cells;
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
    std::size_t begin = cell.find_first_not_of(" \t");
    std::size_t end = cell.find_last_not_of(" \t");
    if (begin == std::string::npos) {
        throw std::runtime_error("load_csv: missing cell at row " + std::to_string(row) +
                                 ", col " + std::to_string(col));
    }
    const std::string trimmed = cell.substr(begin, end - begin + 1);
    errno = 0;
    char* parse_end = nullptr;
    const double v = std::strtod(trimmed.c_str(), &parse_end);
    if (parse_end != trimmed.c_str() + trimmed.size() || errno == ERANGE ||
        !std::isfinite(v)) {
        throw std::runtime_error("load_csv: cannot parse cell '" + trimmed +
                                 "' at row " + std::to_string(row) + ", col " +
                                 std::to_string(col));
    }
    return v;
}

}  // namespace

ObservationMatrix load_csv(const std::string& path, bool has_header,
                           bool transpose_on_load) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_csv: cannot open " + path);

    std::vector<double> values;
    std::size_t cols = 0;
    std::size_t rows = 0;
    std::string line;
    bool skipped_header = !has_header;
    while (std::getline(in, line)) {
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        if (!skipped_header) {
            skipped_header = true;
            continue;
        }
        const auto cells = split_csv_line(line);
        if (cols == 0) {
            cols = cells.size();
        } else if (cells.size() != cols) {
            throw std::runtime_error("load_csv: ragged row " + std::to_string(rows) +
                                     " has " + std::to_string(cells.size()) +
                                     " cells, expected " + std::to_string(cols));
        }
        for (std::size_t j = 0; j < cells.size(); ++j) {
            values.push_back(parse_cell(cells[j], rows, j));
        }
        ++rows;
    }
    if (rows == 0) throw std::runtime_error("load_csv: no data rows in " + path);
    ObservationMatrix m(rows, cols, std::move(values));
    return transpose_on_load ? transpose(m) : m;
}

void save_csv(const ObservationMatrix& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_csv: cannot open " + path);
    out.precision(17);
    for (std::size_t i = 0; i < m.n(); ++i) {
        for (std::size_t j = 0; j < m.t(); ++j) {
            if (j) out << ',';
            out << m.at(i, j);
        }
        out << '\n';
    }
}

ObservationMatrix apply_direction(const ObservationMatrix& m,
                                  const ColumnDirection& d) {
    if (d.size() != m.t())
        throw std::invalid_argument("apply_direction: direction length != t");
    std::vector<double> values = m.values();
    for (std::size_t j = 0; j < m.t(); ++j) {
        if (d[j] == Direction::MonitorLow) {
            for (std::size_t i = 0; i < m.n(); ++i) values[i * m.t() + j] = -values[i * m.t() + j];
        }
    }
    return ObservationMatrix(m.n(), m.t(), std::move(values));
}

ObservationMatrix transpose(const ObservationMatrix& m) {
    std::vector<double> values(m.n() * m.t());
    for (std::size_t i = 0; i < m.n(); ++i)
        for (std::size_t j = 0; j < m.t(); ++j) values[j * m.n() + i] = m.at(i, j);
    return ObservationMatrix(m.t(), m.n(), std::move(values));
}

}  // namespace rankhc
