#pragma once

// Plain-text symmetric matrix format: first line holds d, followed by d lines
// of d whitespace-separated decimals.

#include <cmath>
#include <cstddef>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "norm_descent/errors.hpp"
#include "norm_descent/linalg.hpp"

namespace norm_descent {

inline constexpr double kMatrixSymmetryTol = 1e-12;

namespace detail {

inline bool next_content_line(std::istream& in, std::string& line, std::size_t& lineno) {
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
}

} // namespace detail

inline SymMatrix parse_matrix(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    if (!detail::next_content_line(in, line, lineno)) throw InputError("matrix: empty input");

    std::istringstream header(line);
    long long d = 0;
    std::string trailing;
    if (!(header >> d) || (header >> trailing) || d <= 0)
        throw InputError("matrix: line 1 must hold a single positive dimension");

    const auto dim = static_cast<std::size_t>(d);
    Matrix a(dim, dim);
    for (std::size_t i = 0; i < dim; ++i) {
        if (!detail::next_content_line(in, line, lineno))
            throw InputError("matrix: expected " + std::to_string(dim) + " rows, found " +
                             std::to_string(i));
        std::istringstream row(line);
        for (std::size_t j = 0; j < dim; ++j) {
            if (!(row >> a(i, j)) || !std::isfinite(a(i, j)))
                throw InputError("matrix: line " + std::to_string(lineno) + " needs " +
                                 std::to_string(dim) + " finite numbers");
        }
        if (row >> trailing)
            throw InputError("matrix: line " + std::to_string(lineno) + " has extra values");
    }
    if (detail::next_content_line(in, line, lineno))
        throw InputError("matrix: unexpected content after row " + std::to_string(dim));

    return SymMatrix::from_dense(a, kMatrixSymmetryTol);
}

inline SymMatrix parse_matrix(const std::string& text) {
    std::istringstream in(text);
    return parse_matrix(in);
}

inline void write_matrix(std::ostream& out, const SymMatrix& h) {
    const auto old = out.precision(std::numeric_limits<double>::max_digits10);
    out << h.dim() << '\n';
    for (std::size_t i = 0; i < h.dim(); ++i) {
        for (std::size_t j = 0; j < h.dim(); ++j) out << (j ? " " : "") << h(i, j);
        out << '\n';
    }
    out.precision(old);
}

} // namespace norm_descent
