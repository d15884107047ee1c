#include "bgan/matrix.hpp"

#include <algorithm>
#include <string>

#include "bgan/error.hpp"

namespace bgan {

void Matrix::append_rows(const Matrix& other) {
    if (other.rows_ == 0) return;
    if (rows_ == 0 && data_.empty()) {
        cols_ = other.cols_;
    } else if (other.cols_ != cols_) {
        throw Error(ErrorCode::dimension, "append_rows: column mismatch " + std::to_string(cols_) +
                                              " vs " + std::to_string(other.cols_));
    }
    data_.insert(data_.end(), other.data_.begin(), other.data_.end());
    rows_ += other.rows_;
}

Matrix Matrix::slice_rows(std::size_t first, std::size_t count) const {
    if (first + count > rows_) {
        throw Error(ErrorCode::dimension, "slice_rows: range exceeds row count");
    }
    Matrix out(count, cols_);
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(first * cols_), count * cols_,
                out.data_.begin());
    return out;
}

}  // namespace bgan
