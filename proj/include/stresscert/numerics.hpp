#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "stresscert/errors.hpp"
#include "stresscert/rational.hpp"

namespace stresscert {

template <class T>
inline constexpr bool is_exact_backend = std::is_same_v<T, Rat>;

// Thresholds for the float backend. The exact backend ignores all of them
// except tol_match, which golden-value comparisons use on both backends.
struct Tolerances {
    double tol_solve = 1e-10;  // pivot cutoff in linear solves
    double tol_rank = 1e-9;    // singular-value cutoff in rank decisions
    double tol_psd = 1e-9;     // eigenvalue slack in PSD checks
    double tol_sym = 1e-12;    // allowed relative asymmetry
    double tol_match = 1e-4;   // absolute tolerance for golden-value comparison
};

template <class T>
struct Matrix {
    int rows = 0, cols = 0;
    std::vector<T> a;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, T(0)) {}

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

    T& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    const T& operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

    bool operator==(const Matrix&) const = default;

    void swap_rows(int i, int j) {
        if (i == j) return;
        for (int k = 0; k < cols; ++k) std::swap((*this)(i, k), (*this)(j, k));
    }

    Matrix transpose() const {
        Matrix t(cols, rows);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    Matrix operator*(const Matrix& o) const {
        if (cols != o.rows) throw DimensionMismatch("matrix product shape mismatch");
        Matrix r(rows, o.cols);
        for (int i = 0; i < rows; ++i)
            for (int k = 0; k < cols; ++k) {
                const T& x = (*this)(i, k);
                if constexpr (is_exact_backend<T>) {
                    if (x.is_zero()) continue;
                }
                for (int j = 0; j < o.cols; ++j) r(i, j) += x * o(k, j);
            }
        return r;
    }

    Matrix operator+(const Matrix& o) const {
        if (rows != o.rows || cols != o.cols) throw DimensionMismatch("matrix sum shape mismatch");
        Matrix r(rows, cols);
        for (size_t i = 0; i < a.size(); ++i) r.a[i] = a[i] + o.a[i];
        return r;
    }

    Matrix operator-(const Matrix& o) const {
        if (rows != o.rows || cols != o.cols) throw DimensionMismatch("matrix difference shape mismatch");
        Matrix r(rows, cols);
        for (size_t i = 0; i < a.size(); ++i) r.a[i] = a[i] - o.a[i];
        return r;
    }

    std::vector<T> column(int j) const {
        std::vector<T> c(rows);
        for (int i = 0; i < rows; ++i) c[i] = (*this)(i, j);
        return c;
    }

    std::vector<T> row(int i) const {
        std::vector<T> r(cols);
        for (int j = 0; j < cols; ++j) r[j] = (*this)(i, j);
        return r;
    }
};

template <class T>
inline std::vector<T> mat_vec(const Matrix<T>& M, const std::vector<T>& x) {
    if (M.cols != static_cast<int>(x.size())) throw DimensionMismatch("matrix-vector shape mismatch");
    std::vector<T> y(M.rows, T(0));
    for (int i = 0; i < M.rows; ++i)
        for (int j = 0; j < M.cols; ++j) y[i] += M(i, j) * x[j];
    return y;
}

// S += v v^T
template <class T>
inline void add_outer(Matrix<T>& S, const std::vector<T>& v) {
    if (S.rows != S.cols || S.rows != static_cast<int>(v.size()))
        throw DimensionMismatch("outer-product update shape mismatch");
    for (int i = 0; i < S.rows; ++i) {
        if constexpr (is_exact_backend<T>) {
            if (v[i].is_zero()) continue;
        }
        for (int j = 0; j < S.cols; ++j) S(i, j) += v[i] * v[j];
    }
}

template <class T>
inline T max_abs(const Matrix<T>& M) {
    T m(0);
    for (const T& x : M.a) {
        T ax = x < T(0) ? -x : x;
        if (m < ax) m = ax;
    }
    return m;
}

inline Matrix<double> to_float(const Matrix<Rat>& M) {
    Matrix<double> F(M.rows, M.cols);
    for (size_t i = 0; i < M.a.size(); ++i) F.a[i] = M.a[i].to_double();
    return F;
}

inline Matrix<double> to_float(const Matrix<double>& M) { return M; }

template <class T>
inline bool is_symmetric(const Matrix<T>& M, const Tolerances& tol) {
    if (M.rows != M.cols) return false;
    if constexpr (is_exact_backend<T>) {
        for (int i = 0; i < M.rows; ++i)
            for (int j = i + 1; j < M.cols; ++j)
                if (M(i, j) != M(j, i)) return false;
        return true;
    } else {
        double scale = std::max(1.0, max_abs(M));
        for (int i = 0; i < M.rows; ++i)
            for (int j = i + 1; j < M.cols; ++j)
                if (std::fabs(M(i, j) - M(j, i)) > tol.tol_sym * scale) return false;
        return true;
    }
}

// ---------------------------------------------------------------------------
// Exact elimination (fraction-free, Bareiss two-term update)
// ---------------------------------------------------------------------------

// Multiplies each row by the lcm of its denominators. Rank, consistency and
// solution sets are unchanged; intermediate values stay integral, which keeps
// the fraction-free elimination's coefficients minor-sized.
inline void scale_rows_to_integers(Matrix<Rat>& W) {
    for (int i = 0; i < W.rows; ++i) {
        mpz_class l(1);
        for (int j = 0; j < W.cols; ++j) {
            mpz_class d = W(i, j).denominator();
            mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), d.get_mpz_t());
        }
        if (l == 1) continue;
        Rat f{mpq_class(l)};
        for (int j = 0; j < W.cols; ++j) W(i, j) *= f;
    }
}

// In-place fraction-free row echelon; returns the pivot columns in order.
// Pivots are chosen only among the first pivot_limit columns (all of them
// when negative); trailing columns still take part in the elimination, which
// lets solvers keep appended right-hand sides out of the rank decision.
inline std::vector<int> bareiss_echelon(Matrix<Rat>& W, int pivot_limit = -1) {
    std::vector<int> pivots;
    int limit = pivot_limit < 0 ? W.cols : pivot_limit;
    Rat prev(1);
    int row = 0;
    for (int col = 0; col < limit && row < W.rows; ++col) {
        int pr = -1;
        for (int i = row; i < W.rows; ++i)
            if (!W(i, col).is_zero()) {
                pr = i;
                break;
            }
        if (pr < 0) continue;
        W.swap_rows(pr, row);
        for (int i = row + 1; i < W.rows; ++i) {
            for (int j = col + 1; j < W.cols; ++j)
                W(i, j) = (W(i, j) * W(row, col) - W(i, col) * W(row, j)) / prev;
            W(i, col) = Rat(0);
        }
        prev = W(row, col);
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

// ---------------------------------------------------------------------------
// Float elimination (partial pivoting)
// ---------------------------------------------------------------------------

// In-place row echelon with column-max pivoting; entries at or below
// cutoff are treated as zero. Returns the pivot columns. pivot_limit bounds
// the pivot columns the same way as in bareiss_echelon.
inline std::vector<int> float_echelon(Matrix<double>& W, double cutoff, int pivot_limit = -1) {
    std::vector<int> pivots;
    int limit = pivot_limit < 0 ? W.cols : pivot_limit;
    int row = 0;
    for (int col = 0; col < limit && row < W.rows; ++col) {
        int pr = -1;
        double best = cutoff;
        for (int i = row; i < W.rows; ++i) {
            double v = std::fabs(W(i, col));
            if (v > best) {
                best = v;
                pr = i;
            }
        }
        if (pr < 0) {
            for (int i = row; i < W.rows; ++i) W(i, col) = 0.0;
            continue;
        }
        W.swap_rows(pr, row);
        for (int i = row + 1; i < W.rows; ++i) {
            double f = W(i, col) / W(row, col);
            W(i, col) = 0.0;
            for (int j = col + 1; j < W.cols; ++j) W(i, j) -= f * W(row, j);
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

namespace detail {

template <class T>
inline std::vector<int> echelon(Matrix<T>& W, const Tolerances& tol, int pivot_limit = -1) {
    if constexpr (is_exact_backend<T>) {
        scale_rows_to_integers(W);
        return bareiss_echelon(W, pivot_limit);
    } else {
        // The cutoff scale must come from the pivot-eligible block only; an
        // appended rhs column can dwarf the coefficients and is no grounds
        // for declaring them zero.
        int limit = pivot_limit < 0 ? W.cols : pivot_limit;
        double scale = 0;
        for (int i = 0; i < W.rows; ++i)
            for (int j = 0; j < limit; ++j) scale = std::max(scale, std::fabs(W(i, j)));
        double cutoff = tol.tol_solve * std::max(1.0, scale);
        return float_echelon(W, cutoff, pivot_limit);
    }
}

template <class T>
inline std::vector<T> back_substitute(const Matrix<T>& W, const std::vector<int>& pivots) {
    // W is in echelon form, last column = rhs; pivot variables solved bottom
    // up, free variables pinned to zero.
    int nvars = W.cols - 1;
    std::vector<T> x(static_cast<size_t>(nvars), T(0));
    for (int r = static_cast<int>(pivots.size()) - 1; r >= 0; --r) {
        int pc = pivots[static_cast<size_t>(r)];
        T acc = W(r, nvars);
        for (int j = pc + 1; j < nvars; ++j) acc -= W(r, j) * x[static_cast<size_t>(j)];
        x[static_cast<size_t>(pc)] = acc / W(r, pc);
    }
    return x;
}

}  // namespace detail

// Solves M x = b for square M. Throws SingularMatrix when M is (numerically)
// rank deficient.
template <class T>
inline std::vector<T> solve_square(const Matrix<T>& M, const std::vector<T>& b, const Tolerances& tol) {
    if (M.rows != M.cols) throw DimensionMismatch("solve_square requires a square matrix");
    if (M.rows != static_cast<int>(b.size())) throw DimensionMismatch("solve_square rhs length mismatch");
    int n = M.rows;
    Matrix<T> W(n, n + 1);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) W(i, j) = M(i, j);
        W(i, n) = b[static_cast<size_t>(i)];
    }
    auto pivots = detail::echelon(W, tol, n);
    if (static_cast<int>(pivots.size()) != n)
        throw SingularMatrix("singular system in solve_square");
    return detail::back_substitute(W, pivots);
}

// Solves M x = b for rectangular M when consistent; returns std::nullopt when
// the system has no solution. Free variables are pinned to zero.
template <class T>
inline std::optional<std::vector<T>> solve_consistent(const Matrix<T>& M, const std::vector<T>& b,
                                                      const Tolerances& tol) {
    if (M.rows != static_cast<int>(b.size())) throw DimensionMismatch("solve_consistent rhs length mismatch");
    Matrix<T> W(M.rows, M.cols + 1);
    double bscale = 1.0;
    for (int i = 0; i < M.rows; ++i) {
        for (int j = 0; j < M.cols; ++j) W(i, j) = M(i, j);
        W(i, M.cols) = b[static_cast<size_t>(i)];
        if constexpr (!is_exact_backend<T>)
            bscale = std::max(bscale, std::fabs(b[static_cast<size_t>(i)]));
    }
    auto pivots = detail::echelon(W, tol, M.cols);
    // Rows eliminated to zero must have zero rhs, else 0 = nonzero.
    for (int r = static_cast<int>(pivots.size()); r < M.rows; ++r) {
        if constexpr (is_exact_backend<T>) {
            if (!W(r, M.cols).is_zero()) return std::nullopt;
        } else {
            if (std::fabs(W(r, M.cols)) > tol.tol_solve * bscale) return std::nullopt;
        }
    }
    return detail::back_substitute(W, pivots);
}

// ---------------------------------------------------------------------------
// Symmetric eigenvalues (float backend)
// ---------------------------------------------------------------------------

namespace detail {

// Householder reduction of a symmetric matrix to tridiagonal form, values
// only. On return d holds the diagonal and sub[i] (1 <= i <= n-1) the
// entry T(i-1, i); sub gets one scratch slot beyond n.
inline void householder_tridiagonal(Matrix<double>& A, std::vector<double>& d, std::vector<double>& sub) {
    int n = A.rows;
    d.assign(static_cast<size_t>(n), 0.0);
    sub.assign(static_cast<size_t>(n) + 1, 0.0);
    std::vector<double> w(static_cast<size_t>(n), 0.0);

    for (int i = n - 1; i >= 1; --i) {
        int l = i - 1;
        double h = 0.0;
        if (l > 0) {
            double scale = 0.0;
            for (int k = 0; k <= l; ++k) scale += std::fabs(A(i, k));
            if (scale == 0.0) {
                sub[static_cast<size_t>(i)] = A(i, l);
            } else {
                for (int k = 0; k <= l; ++k) {
                    A(i, k) /= scale;
                    h += A(i, k) * A(i, k);
                }
                double f = A(i, l);
                double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
                sub[static_cast<size_t>(i)] = scale * g;
                h -= f * g;
                A(i, l) = f - g;
                f = 0.0;
                for (int j = 0; j <= l; ++j) {
                    g = 0.0;
                    for (int k = 0; k <= j; ++k) g += A(j, k) * A(i, k);
                    for (int k = j + 1; k <= l; ++k) g += A(k, j) * A(i, k);
                    w[static_cast<size_t>(j)] = g / h;
                    f += w[static_cast<size_t>(j)] * A(i, j);
                }
                double hh = f / (h + h);
                for (int j = 0; j <= l; ++j) {
                    f = A(i, j);
                    g = w[static_cast<size_t>(j)] - hh * f;
                    w[static_cast<size_t>(j)] = g;
                    for (int k = 0; k <= j; ++k) A(j, k) -= f * w[static_cast<size_t>(k)] + g * A(i, k);
                }
            }
        } else {
            sub[static_cast<size_t>(i)] = A(i, l);
        }
    }
    for (int i = 0; i < n; ++i) d[static_cast<size_t>(i)] = A(i, i);
}

// Implicit-shift QL sweep on a symmetric tridiagonal matrix; overwrites d
// with the eigenvalues. sub uses the same convention as above.
inline void tridiagonal_ql(std::vector<double>& d, std::vector<double>& sub) {
    int n = static_cast<int>(d.size());
    if (n == 0) return;
    const double eps = std::numeric_limits<double>::epsilon();
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        while (true) {
            int m = l;
            while (m < n - 1) {
                double dd = std::fabs(d[static_cast<size_t>(m)]) + std::fabs(d[static_cast<size_t>(m) + 1]);
                if (std::fabs(sub[static_cast<size_t>(m) + 1]) <= eps * dd) break;
                ++m;
            }
            if (m == l) break;
            if (iter++ == 60) throw std::runtime_error("eigenvalue iteration failed to converge");
            double g = (d[static_cast<size_t>(l) + 1] - d[static_cast<size_t>(l)]) /
                       (2.0 * sub[static_cast<size_t>(l) + 1]);
            double r = std::hypot(g, 1.0);
            g = d[static_cast<size_t>(m)] - d[static_cast<size_t>(l)] +
                sub[static_cast<size_t>(l) + 1] / (g + std::copysign(r, g));
            double s = 1.0, c = 1.0, p = 0.0;
            bool underflow = false;
            for (int i = m - 1; i >= l; --i) {
                double f = s * sub[static_cast<size_t>(i) + 1];
                double b = c * sub[static_cast<size_t>(i) + 1];
                r = std::hypot(f, g);
                sub[static_cast<size_t>(i) + 2] = r;
                if (r == 0.0) {
                    d[static_cast<size_t>(i) + 1] -= p;
                    sub[static_cast<size_t>(m) + 1] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[static_cast<size_t>(i) + 1] - p;
                r = (d[static_cast<size_t>(i)] - g) * s + 2.0 * c * b;
                p = s * r;
                d[static_cast<size_t>(i) + 1] = g + p;
                g = c * r - b;
            }
            if (underflow) continue;
            d[static_cast<size_t>(l)] -= p;
            sub[static_cast<size_t>(l) + 1] = g;
            sub[static_cast<size_t>(m) + 1] = 0.0;
        }
    }
}

}  // namespace detail

// Eigenvalues of a symmetric matrix, ascending. The input is symmetrized
// (M + M^T)/2 first; call is_symmetric separately to police asymmetry.
inline std::vector<double> symmetric_eigenvalues(const Matrix<double>& M) {
    if (M.rows != M.cols) throw DimensionMismatch("symmetric_eigenvalues requires a square matrix");
    int n = M.rows;
    Matrix<double> A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = 0.5 * (M(i, j) + M(j, i));
    std::vector<double> d, sub;
    detail::householder_tridiagonal(A, d, sub);
    detail::tridiagonal_ql(d, sub);
    std::sort(d.begin(), d.end());
    return d;
}

// Singular values, descending, via the Gram matrix of the smaller side.
inline std::vector<double> singular_values(const Matrix<double>& M) {
    bool wide = M.rows >= M.cols;
    const Matrix<double> G = wide ? M.transpose() * M : M * M.transpose();
    std::vector<double> ev = symmetric_eigenvalues(G);
    std::vector<double> sv;
    sv.reserve(ev.size());
    for (auto it = ev.rbegin(); it != ev.rend(); ++it) sv.push_back(std::sqrt(std::max(0.0, *it)));
    return sv;
}

// ---------------------------------------------------------------------------
// Rank
// ---------------------------------------------------------------------------

template <class T>
inline int matrix_rank(const Matrix<T>& M, const Tolerances& tol) {
    if (M.rows == 0 || M.cols == 0) return 0;
    if constexpr (is_exact_backend<T>) {
        Matrix<Rat> W = M;
        scale_rows_to_integers(W);
        return static_cast<int>(bareiss_echelon(W).size());
    } else {
        // Symmetric matrices get the eigenvalue route: forming a Gram matrix
        // squares the condition number and floors the attainable precision at
        // sqrt(eps), which tol_rank = 1e-9 sits below.
        if (M.rows == M.cols && is_symmetric(M, tol)) {
            std::vector<double> ev = symmetric_eigenvalues(M);
            double amax = 0.0;
            for (double e : ev) amax = std::max(amax, std::fabs(e));
            double cutoff = tol.tol_rank * std::max(1.0, amax);
            int r = 0;
            for (double e : ev)
                if (std::fabs(e) > cutoff) ++r;
            return r;
        }
        std::vector<double> sv = singular_values(M);
        if (sv.empty()) return 0;
        double cutoff = tol.tol_rank * std::max(1.0, sv.front());
        int r = 0;
        for (double s : sv)
            if (s > cutoff) ++r;
        return r;
    }
}

// Rank of an exact matrix modulo a word-sized prime: a certified lower bound
// on the rational rank, computed without coefficient growth. Entries reduce
// as num * den^{-1} mod p; std::nullopt when some denominator is divisible
// by p (practically never).
inline std::optional<int> rank_mod_p(const Matrix<Rat>& M, uint64_t p = (uint64_t(1) << 61) - 1) {
    if (M.rows == 0 || M.cols == 0) return 0;
    auto mulmod = [p](uint64_t a, uint64_t b) -> uint64_t {
        return static_cast<uint64_t>((static_cast<unsigned __int128>(a) * b) % p);
    };
    auto powmod = [&](uint64_t a, uint64_t e) {
        uint64_t r = 1;
        while (e) {
            if (e & 1) r = mulmod(r, a);
            a = mulmod(a, a);
            e >>= 1;
        }
        return r;
    };
    std::vector<uint64_t> w(static_cast<size_t>(M.rows) * static_cast<size_t>(M.cols));
    for (int i = 0; i < M.rows; ++i)
        for (int j = 0; j < M.cols; ++j) {
            const Rat& v = M(i, j);
            if (v.is_zero()) continue;
            mpz_class num = v.numerator();
            bool neg = num < 0;
            if (neg) num = -num;
            uint64_t rn = mpz_fdiv_ui(num.get_mpz_t(), p);
            uint64_t rd = mpz_fdiv_ui(v.denominator().get_mpz_t(), p);
            if (rd == 0) return std::nullopt;
            uint64_t r = mulmod(rn, powmod(rd, p - 2));
            if (neg && r != 0) r = p - r;
            w[static_cast<size_t>(i) * M.cols + j] = r;
        }
    auto at = [&](int i, int j) -> uint64_t& { return w[static_cast<size_t>(i) * M.cols + j]; };
    int rank = 0;
    for (int col = 0; col < M.cols && rank < M.rows; ++col) {
        int pr = -1;
        for (int i = rank; i < M.rows; ++i)
            if (at(i, col) != 0) {
                pr = i;
                break;
            }
        if (pr < 0) continue;
        for (int j = 0; j < M.cols; ++j) std::swap(at(pr, j), at(rank, j));
        uint64_t inv = powmod(at(rank, col), p - 2);
        for (int i = rank + 1; i < M.rows; ++i) {
            if (at(i, col) == 0) continue;
            uint64_t f = mulmod(at(i, col), inv);
            for (int j = col; j < M.cols; ++j) {
                uint64_t sub = mulmod(f, at(rank, j));
                at(i, j) = (at(i, j) >= sub) ? at(i, j) - sub : at(i, j) + p - sub;
            }
        }
        ++rank;
    }
    return rank;
}

namespace detail {

// Candidate columns of C are scanned in lexicographic combination order for
// the first subset of size `need` with full rank. The enumeration is capped:
// under general position the very first combination succeeds, so a long scan
// signals degenerate data and the cap turns it into a clean failure.
template <class T>
inline std::pair<std::vector<int>, bool> select_independent_columns(const Matrix<T>& C, int need,
                                                                    const Tolerances& tol) {
    int c = C.cols;
    if (need == 0) return {{}, false};
    if (c < need) throw SingularMatrix("fewer candidate columns than unknowns");
    std::vector<int> idx(static_cast<size_t>(need));
    for (int i = 0; i < need; ++i) idx[static_cast<size_t>(i)] = i;
    bool reselected = false;
    long attempts = 0;
    while (true) {
        Matrix<T> sub(C.rows, need);
        for (int j = 0; j < need; ++j)
            for (int i = 0; i < C.rows; ++i) sub(i, j) = C(i, idx[static_cast<size_t>(j)]);
        if (matrix_rank(sub, tol) == need) return {idx, reselected};
        reselected = true;
        if (++attempts >= 1000)
            throw SingularMatrix("no nonsingular predecessor subset found within the scan cap");
        int i = need - 1;
        while (i >= 0 && idx[static_cast<size_t>(i)] == c - need + i) --i;
        if (i < 0) throw SingularMatrix("every candidate predecessor subset is singular");
        ++idx[static_cast<size_t>(i)];
        for (int j = i + 1; j < need; ++j) idx[static_cast<size_t>(j)] = idx[static_cast<size_t>(j) - 1] + 1;
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Positive semidefiniteness
// ---------------------------------------------------------------------------

template <class T>
struct PsdResult {
    bool ok = false;
    std::optional<T> witness;  // most negative eigenvalue / failing pivot
    std::string detail;
};

namespace detail {

inline PsdResult<Rat> psd_exact(Matrix<Rat> S) {
    int n = S.rows;
    std::vector<int> live(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) live[static_cast<size_t>(i)] = i;

    // Diagonal-pivoted exact LDL^T: any negative diagonal refutes PSD; an
    // all-zero diagonal forces the whole remaining block to vanish; otherwise
    // eliminate on the largest diagonal entry and recurse on the Schur
    // complement.
    PsdResult<Rat> res;
    while (!live.empty()) {
        int best = -1;
        for (size_t t = 0; t < live.size(); ++t) {
            int i = live[t];
            if (S(i, i).sign() < 0) {
                res.ok = false;
                res.witness = S(i, i);
                res.detail = "negative pivot at index " + std::to_string(i);
                return res;
            }
            if (best < 0 || S(live[static_cast<size_t>(best)], live[static_cast<size_t>(best)]) < S(i, i))
                best = static_cast<int>(t);
        }
        int pi = live[static_cast<size_t>(best)];
        if (S(pi, pi).is_zero()) {
            for (size_t t = 0; t < live.size(); ++t)
                for (size_t u = t + 1; u < live.size(); ++u) {
                    int i = live[t], j = live[u];
                    if (!S(i, j).is_zero()) {
                        res.ok = false;
                        res.witness = -abs(S(i, j));
                        res.detail = "zero diagonal with nonzero entry at (" + std::to_string(i) + "," +
                                     std::to_string(j) + ")";
                        return res;
                    }
                }
            res.ok = true;
            return res;
        }
        Rat piv = S(pi, pi);
        live.erase(live.begin() + best);
        for (size_t t = 0; t < live.size(); ++t) {
            int i = live[t];
            if (S(i, pi).is_zero()) continue;
            Rat f = S(i, pi) / piv;
            for (size_t u = 0; u < live.size(); ++u) {
                int j = live[u];
                S(i, j) -= f * S(pi, j);
            }
        }
    }
    res.ok = true;
    return res;
}

}  // namespace detail

// Decides M >= 0 (PSD). Throws NotSymmetric first when M is not symmetric
// within tol_sym. Exact backend: pivoted LDL^T, witness = failing pivot.
// Float backend: eigenvalue bound, witness = most negative eigenvalue.
template <class T>
inline PsdResult<T> psd_check(const Matrix<T>& M, const Tolerances& tol) {
    if (M.rows != M.cols) throw DimensionMismatch("psd_check requires a square matrix");
    if (!is_symmetric(M, tol)) throw NotSymmetric("matrix is not symmetric");
    if constexpr (is_exact_backend<T>) {
        return detail::psd_exact(M);
    } else {
        PsdResult<double> res;
        if (M.rows == 0) {
            res.ok = true;
            return res;
        }
        std::vector<double> ev = symmetric_eigenvalues(M);
        double lo = ev.front(), hi = ev.back();
        double scale = std::max(std::fabs(lo), std::fabs(hi));
        res.ok = lo >= -tol.tol_psd * std::max(1.0, scale);
        if (!res.ok) {
            res.witness = lo;
            res.detail = "most negative eigenvalue";
        }
        return res;
    }
}

}  // namespace stresscert
