#pragma once

#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "arbphase/saddle.hpp"
#include "arbphase/sweep.hpp"

namespace arbphase::io {

// All numeric CSV fields use 9 significant digits; together with the fixed
// row order this makes outputs byte-identical across reruns and parallelism.
inline std::string format_g9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

inline void write_grid_csv(const PhaseGrid& grid, std::ostream& os) {
    os << "param,n,fraction,marginal_count\n";
    for (std::size_t ip = 0; ip < grid.spec.param_grid.size(); ++ip) {
        for (std::size_t in = 0; in < grid.spec.n_grid.size(); ++in) {
            const CellResult& c = grid.cell(ip, in);
            os << format_g9(grid.spec.param_grid[ip]) << ',' << format_g9(grid.spec.n_grid[in]) << ','
               << format_g9(c.fraction) << ',' << c.marginal << '\n';
        }
    }
}

inline void write_line_csv(const TransitionLine& line, std::ostream& os) {
    os << "param,n_crossing\n";
    for (const auto& [param, n] : line.points) os << format_g9(param) << ',' << format_g9(n) << '\n';
}

inline void write_line_csv(const CriticalLine& line, std::ostream& os) {
    os << "param,n_c\n";
    for (const auto& [param, n] : line.points) os << format_g9(param) << ',' << format_g9(n) << '\n';
}

inline void write_comparison_csv(const LineComparison& cmp, std::ostream& os) {
    os << "param,n_empirical,n_analytic,abs_dev\n";
    for (const auto& r : cmp.rows)
        os << format_g9(r.param) << ',' << format_g9(r.n_empirical) << ',' << format_g9(r.n_analytic)
           << ',' << format_g9(r.abs_dev) << '\n';
}

template <typename T>
void write_csv_file(const T& value, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    if constexpr (std::is_same_v<T, PhaseGrid>)
        write_grid_csv(value, os);
    else if constexpr (std::is_same_v<T, LineComparison>)
        write_comparison_csv(value, os);
    else
        write_line_csv(value, os);
    if (!os) throw std::runtime_error("write failed: " + path);
}

}  // namespace arbphase::io
