#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ibrt/ba.hpp"
#include "ibrt/matrix.hpp"
#include "ibrt/probability.hpp"

namespace testutil {

inline ibrt::Vector random_simplex(std::mt19937_64& rng, std::size_t n, double floor = 0.05) {
    std::uniform_real_distribution<double> u(floor, 1.0);
    ibrt::Vector v(n);
    double s = 0.0;
    for (auto& x : v) s += (x = u(rng));
    for (auto& x : v) x /= s;
    return v;
}

inline ibrt::IBProblem random_problem(std::mt19937_64& rng, std::size_t nx, std::size_t ny) {
    ibrt::Matrix pyx(ny, nx);
    for (std::size_t x = 0; x < nx; ++x) pyx.set_column(x, random_simplex(rng, ny));
    return ibrt::IBProblem::make(pyx, random_simplex(rng, nx, 0.2));
}

/// Arbitrary strictly positive decoder root (not a fixed point).
inline ibrt::DecoderRoot random_root(std::mt19937_64& rng, std::size_t ny, std::size_t clusters, double beta) {
    ibrt::DecoderRoot r{ibrt::Matrix(ny, clusters), random_simplex(rng, clusters, 0.2), beta};
    for (std::size_t t = 0; t < clusters; ++t) r.decoders.set_column(t, random_simplex(rng, ny, 0.1));
    return r;
}

/// BA fixed point from a seeded random encoder.
inline ibrt::BAResult converged(const ibrt::IBProblem& prob, double beta, std::size_t clusters, std::uint64_t seed) {
    return ibrt::ba_iterate(ibrt::random_encoder(clusters, prob.nx(), seed), prob, beta, 1e-14, 1000000);
}

inline ibrt::Matrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c) {
    std::normal_distribution<double> n(0.0, 1.0);
    ibrt::Matrix m(r, c);
    for (auto& x : m.data()) x = n(rng);
    return m;
}

/// Random orthogonal matrix by Gram-Schmidt on a Gaussian matrix.
inline ibrt::Matrix random_orthogonal(std::mt19937_64& rng, std::size_t n) {
    ibrt::Matrix q = random_matrix(rng, n, n);
    for (std::size_t j = 0; j < n; ++j) {
        ibrt::Vector v = q.column(j);
        for (std::size_t k = 0; k < j; ++k) {
            const ibrt::Vector u = q.column(k);
            double d = 0.0;
            for (std::size_t i = 0; i < n; ++i) d += u[i] * v[i];
            for (std::size_t i = 0; i < n; ++i) v[i] -= d * u[i];
        }
        double nv = 0.0;
        for (double x : v) nv += x * x;
        nv = std::sqrt(nv);
        for (double& x : v) x /= nv;
        q.set_column(j, v);
    }
    return q;
}

struct Csv {
    std::string manifest;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t col(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        return header.size();
    }
    double num(std::size_t row, const std::string& name) const { return std::stod(rows.at(row).at(col(name))); }
    const std::string& str(std::size_t row, const std::string& name) const { return rows.at(row).at(col(name)); }
};

inline std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, sep)) out.push_back(cell);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

inline Csv parse_csv(const std::string& text) {
    Csv c;
    std::istringstream is(text);
    std::string line;
    bool have_header = false;
    while (std::getline(is, line)) {
        if (line.rfind("# manifest: ", 0) == 0) {
            c.manifest = line.substr(12);
            continue;
        }
        if (line.empty()) continue;
        if (!have_header) {
            c.header = split(line, ',');
            have_header = true;
        } else {
            c.rows.push_back(split(line, ','));
        }
    }
    return c;
}

}  // namespace testutil
