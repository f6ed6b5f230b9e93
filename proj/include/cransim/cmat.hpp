// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cassert>
#include <complex>
#include <cstddef>
#include <vector>

namespace cransim {

using cdouble = std::complex<double>;
using CVec = std::vector<cdouble>;

// Dense row-major complex matrix, just big enough for channel work
// (n_rx x n_tx with single-digit dimensions).
class CMat {
public:
    CMat() = default;
    CMat(int rows, int cols)
        : rows_(rows), cols_(cols),
          data_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    cdouble& operator()(int r, int c) {
        return data_[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) +
                     static_cast<std::size_t>(c)];
    }
    const cdouble& operator()(int r, int c) const {
        return data_[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) +
                     static_cast<std::size_t>(c)];
    }

    // this += scale * a * b^H  (rank-one update)
    void add_outer(const CVec& a, const CVec& b, cdouble scale) {
        assert(static_cast<int>(a.size()) == rows_ && static_cast<int>(b.size()) == cols_);
        for (int r = 0; r < rows_; ++r) {
            const cdouble ra = scale * a[static_cast<std::size_t>(r)];
            for (int c = 0; c < cols_; ++c) {
                (*this)(r, c) += ra * std::conj(b[static_cast<std::size_t>(c)]);
            }
        }
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<cdouble> data_;
};

inline CVec matvec(const CMat& m, const CVec& v) {
    assert(static_cast<int>(v.size()) == m.cols());
    CVec out(static_cast<std::size_t>(m.rows()));
    for (int r = 0; r < m.rows(); ++r) {
        cdouble acc{0.0, 0.0};
        for (int c = 0; c < m.cols(); ++c) acc += m(r, c) * v[static_cast<std::size_t>(c)];
        out[static_cast<std::size_t>(r)] = acc;
    }
    return out;
}

// u^H w
inline cdouble inner(const CVec& u, const CVec& w) {
    assert(u.size() == w.size());
    cdouble acc{0.0, 0.0};
    for (std::size_t i = 0; i < u.size(); ++i) acc += std::conj(u[i]) * w[i];
    return acc;
}

// |u^H H v|^2 — the beamforming gain of a receive filter / precoder pair
inline double beamformed_gain(const CVec& u, const CMat& h, const CVec& v) {
    const cdouble s = inner(u, matvec(h, v));
    return std::norm(s);
}

}  // namespace cransim
