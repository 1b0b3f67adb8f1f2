#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace ibrt {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles. Small sizes only.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    /// Row-by-row literal. All rows must have equal length.
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);
    static Matrix from_rows(const std::vector<Vector>& rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    const Vector& data() const noexcept { return data_; }
    Vector& data() noexcept { return data_; }

    Vector column(std::size_t c) const;
    Vector row(std::size_t r) const;
    void set_column(std::size_t c, const Vector& v);

    Matrix transpose() const;
    Matrix operator*(const Matrix& other) const;
    Vector operator*(const Vector& v) const;
    Matrix operator-(const Matrix& other) const;
    Matrix operator+(const Matrix& other) const;

    double norm_inf() const;  ///< max absolute row sum
    double norm_one() const;  ///< max absolute column sum
    double max_abs() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    Vector data_;
};

/// Row vector times matrix.
Vector left_multiply(const Vector& v, const Matrix& m);

double max_abs_diff(const Matrix& a, const Matrix& b);
double max_abs_diff(const Vector& a, const Vector& b);
double norm_inf(const Vector& v);

}  // namespace ibrt
