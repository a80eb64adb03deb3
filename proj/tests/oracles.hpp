#pragma once

// Independent reference computations used to freeze and cross-check expected
// values. Nothing here calls into the library's numeric code paths.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

using Rows = std::vector<std::vector<double>>;

// Textbook triple loop, k innermost, accumulating left to right.
inline Rows naive_matmul(const Rows& a, const Rows& b) {
    const std::size_t n = a.size();
    const std::size_t m = b.empty() ? 0 : b[0].size();
    const std::size_t inner = b.size();
    Rows out(n, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < inner; ++k) s += a[i][k] * b[k][j];
            out[i][j] = s;
        }
    return out;
}

// Solves A x = b by Gaussian elimination with partial pivoting.
inline std::vector<double> gauss_solve(Rows a, std::vector<double> b) {
    const std::size_t n = a.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) < 1e-14) throw std::runtime_error("singular system");
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
        x[i] = s / a[i][i];
    }
    return x;
}

// Least squares with intercept via the normal equations [X 1]^T [X 1] w = [X 1]^T y.
// Returns weights followed by the intercept.
inline std::vector<double> normal_equations(const Rows& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    const std::size_t d = x.empty() ? 0 : x[0].size();
    Rows ata(d + 1, std::vector<double>(d + 1, 0.0));
    std::vector<double> aty(d + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row(x[i]);
        row.push_back(1.0);
        for (std::size_t p = 0; p <= d; ++p) {
            aty[p] += row[p] * y[i];
            for (std::size_t q = 0; q <= d; ++q) ata[p][q] += row[p] * row[q];
        }
    }
    return gauss_solve(ata, aty);
}

// Global optimum of the k=2 clustering objective by enumerating every
// partition of the points into two non-empty groups.
inline double exhaustive_two_means(const Rows& pts) {
    const std::size_t n = pts.size();
    const std::size_t d = pts[0].size();
    double best = std::numeric_limits<double>::infinity();
    // Point 0 fixed in group A, so each partition is visited once.
    for (unsigned long mask = 0; mask < (1ul << (n - 1)); ++mask) {
        std::vector<int> group(n, 0);
        std::size_t nb = 0;
        for (std::size_t i = 1; i < n; ++i) {
            group[i] = (mask >> (i - 1)) & 1ul;
            nb += static_cast<std::size_t>(group[i]);
        }
        if (nb == 0) continue;
        double cost = 0.0;
        for (int g = 0; g < 2; ++g) {
            std::vector<double> mean(d, 0.0);
            std::size_t cnt = 0;
            for (std::size_t i = 0; i < n; ++i)
                if (group[i] == g) {
                    for (std::size_t j = 0; j < d; ++j) mean[j] += pts[i][j];
                    ++cnt;
                }
            for (double& m : mean) m /= static_cast<double>(cnt);
            for (std::size_t i = 0; i < n; ++i)
                if (group[i] == g)
                    for (std::size_t j = 0; j < d; ++j) cost += (pts[i][j] - mean[j]) * (pts[i][j] - mean[j]);
        }
        best = std::min(best, cost);
    }
    return best;
}

// True when some threshold t puts every label-0 point strictly on one side
// and every label-1 point strictly on the other, in one dimension.
inline bool threshold_separable(const std::vector<double>& x, const std::vector<int>& label) {
    double max0 = -std::numeric_limits<double>::infinity(), min0 = std::numeric_limits<double>::infinity();
    double max1 = max0, min1 = min0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (label[i] == 0) {
            max0 = std::max(max0, x[i]);
            min0 = std::min(min0, x[i]);
        } else {
            max1 = std::max(max1, x[i]);
            min1 = std::min(min1, x[i]);
        }
    }
    return max0 < min1 || max1 < min0;
}

// Central finite-difference gradient of f at p.
inline std::vector<double> central_difference(const std::function<double(const std::vector<double>&)>& f,
                                              std::vector<double> p, double h) {
    std::vector<double> g(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) {
        const double orig = p[k];
        p[k] = orig + h;
        const double up = f(p);
        p[k] = orig - h;
        const double down = f(p);
        p[k] = orig;
        g[k] = (up - down) / (2.0 * h);
    }
    return g;
}

}  // namespace oracle
