#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace leading {

class Rng;

// Row-major dense matrix of doubles. Storage is always 64-bit; training runs
// that ask for 32-bit precision round values through float at op boundaries
// (see round_to_f32).
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), v_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return v_.size(); }

    double& operator()(std::size_t r, std::size_t c) { return v_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return v_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {v_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {v_.data() + r * cols_, cols_}; }

    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }

    void fill(double x) { std::fill(v_.begin(), v_.end(), x); }

    bool same_shape(const DenseMatrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

    bool operator==(const DenseMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && v_ == o.v_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> v_;
};

// C = A * B. A: n x k, B: k x m.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);

// C = A^T * B. A: k x n, B: k x m -> n x m.
DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b);

// C = A * B^T. A: n x k, B: m x k -> n x m.
DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b);

// a += s * b
void axpy(DenseMatrix& a, double s, const DenseMatrix& b);

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);

bool all_finite(const DenseMatrix& a);

// Round every entry through IEEE float. Used to emulate 32-bit storage when
// a run is configured for f32 precision.
void round_to_f32(DenseMatrix& a);

DenseMatrix random_uniform(std::size_t rows, std::size_t cols, double lo, double hi, Rng& rng);

} // namespace leading
