#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace rankhc {

// n subjects (rows) observed across t referentials (columns).
// Entries must be finite; missing cells are a hard error upstream.
class ObservationMatrix {
public:
    ObservationMatrix(std::size_t n, std::size_t t, std::vector<double> values);

    std::size_t n() const { return n_; }
    std::size_t t() const { return t_; }
    double at(std::size_t i, std::size_t j) const { return values_[i * t_ + j]; }
    double& at(std::size_t i, std::size_t j) { return values_[i * t_ + j]; }
    const std::vector<double>& values() const { return values_; }

private:
    std::size_t n_;
    std::size_t t_;
    std::vector<double> values_;  // row-major
};

enum class Direction { MonitorHigh, MonitorLow };

using ColumnDirection = std::vector<Direction>;

ObservationMatrix load_csv(const std::string& path, bool has_header,
                           bool transpose_on_load = false);
void save_csv(const ObservationMatrix& m, const std::string& path);

// Monitor-low columns are negated so that large values are always the
// anomalous direction.
ObservationMatrix apply_direction(const ObservationMatrix& m,
                                  const ColumnDirection& d);

ObservationMatrix transpose(const ObservationMatrix& m);

}  // namespace rankhc
