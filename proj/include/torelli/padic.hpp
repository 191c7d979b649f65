#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "torelli/errors.hpp"

// Exact linear algebra over Z/l^N: scalars with valuations, dense matrices,
// the diagonal normal form over the local ring, and cokernel structure.

namespace torelli::padic {

/// Shared (prime l, precision N) arithmetic context. All scalars carry a
/// handle to one of these; contexts compare by value, so independently
/// created contexts with equal parameters are compatible.
class Context {
public:
    static std::shared_ptr<const Context> create(const mpz_class& prime, int precision) {
        if (precision < 1)
            throw Error("precision must be at least 1");
        if (prime < 2 || mpz_probab_prime_p(prime.get_mpz_t(), 40) == 0)
            throw Error("modulus base must be prime, got " + prime.get_str());
        return std::shared_ptr<const Context>(new Context(prime, precision));
    }

    const mpz_class& prime() const { return prime_; }
    int precision() const { return precision_; }
    const mpz_class& modulus() const { return modulus_; }

    /// l^e for 0 <= e <= N.
    mpz_class prime_power(int e) const {
        mpz_class p;
        mpz_pow_ui(p.get_mpz_t(), prime_.get_mpz_t(), static_cast<unsigned long>(e));
        return p;
    }

    mpz_class reduce(const mpz_class& v) const {
        mpz_class r;
        mpz_mod(r.get_mpz_t(), v.get_mpz_t(), modulus_.get_mpz_t());
        return r;
    }

    /// Largest k <= N with l^k dividing v; N for v == 0 mod l^N.
    int valuation(const mpz_class& reduced) const {
        if (reduced == 0)
            return precision_;
        int k = 0;
        mpz_class r = reduced;
        while (mpz_divisible_p(r.get_mpz_t(), prime_.get_mpz_t())) {
            mpz_divexact(r.get_mpz_t(), r.get_mpz_t(), prime_.get_mpz_t());
            ++k;
        }
        return k;
    }

    bool operator==(const Context& o) const {
        return prime_ == o.prime_ && precision_ == o.precision_;
    }
    bool operator!=(const Context& o) const { return !(*this == o); }

private:
    Context(const mpz_class& prime, int precision)
        : prime_(prime), precision_(precision) {
        mpz_pow_ui(modulus_.get_mpz_t(), prime_.get_mpz_t(),
                   static_cast<unsigned long>(precision_));
    }

    mpz_class prime_;
    int precision_;
    mpz_class modulus_;
};

using ContextPtr = std::shared_ptr<const Context>;

inline void require_same(const Context& a, const Context& b) {
    if (a != b)
        throw ContextMismatch("mixed (prime, precision) contexts: (" + a.prime().get_str() +
                              "," + std::to_string(a.precision()) + ") vs (" +
                              b.prime().get_str() + "," + std::to_string(b.precision()) + ")");
}

/// Residue in [0, l^N) together with its context.
class Scalar {
public:
    Scalar(ContextPtr ctx, const mpz_class& value)
        : ctx_(std::move(ctx)), residue_(ctx_->reduce(value)) {}

    static Scalar zero(ContextPtr ctx) { return Scalar(std::move(ctx), 0); }
    static Scalar one(ContextPtr ctx) { return Scalar(std::move(ctx), 1); }

    const mpz_class& residue() const { return residue_; }
    const ContextPtr& context() const { return ctx_; }

    int valuation() const { return ctx_->valuation(residue_); }
    bool is_zero() const { return residue_ == 0; }
    bool is_unit() const { return valuation() == 0; }

    Scalar operator+(const Scalar& o) const {
        require_same(*ctx_, *o.ctx_);
        return Scalar(ctx_, residue_ + o.residue_);
    }
    Scalar operator-(const Scalar& o) const {
        require_same(*ctx_, *o.ctx_);
        return Scalar(ctx_, residue_ - o.residue_);
    }
    Scalar operator*(const Scalar& o) const {
        require_same(*ctx_, *o.ctx_);
        return Scalar(ctx_, residue_ * o.residue_);
    }
    Scalar operator-() const { return Scalar(ctx_, -residue_); }

    Scalar inverse() const {
        if (!is_unit())
            throw NotAUnit("cannot invert " + residue_.get_str() + " mod " +
                           ctx_->modulus().get_str());
        mpz_class inv;
        mpz_invert(inv.get_mpz_t(), residue_.get_mpz_t(), ctx_->modulus().get_mpz_t());
        return Scalar(ctx_, inv);
    }

    /// Exact division by l^e; requires valuation >= e.
    Scalar shift_down(int e) const {
        mpz_class q;
        mpz_class p = ctx_->prime_power(e);
        if (!mpz_divisible_p(residue_.get_mpz_t(), p.get_mpz_t()))
            throw Error("shift_down: valuation below " + std::to_string(e));
        mpz_divexact(q.get_mpz_t(), residue_.get_mpz_t(), p.get_mpz_t());
        return Scalar(ctx_, q);
    }

    bool operator==(const Scalar& o) const {
        require_same(*ctx_, *o.ctx_);
        return residue_ == o.residue_;
    }
    bool operator!=(const Scalar& o) const { return !(*this == o); }

private:
    ContextPtr ctx_;
    mpz_class residue_;
};

/// Dense matrix over Z/l^N. Entries are stored reduced; the context is
/// shared by the whole grid.
class Matrix {
public:
    Matrix(ContextPtr ctx, int rows, int cols)
        : ctx_(std::move(ctx)), rows_(rows), cols_(cols),
          entries_(static_cast<size_t>(rows) * static_cast<size_t>(cols), mpz_class(0)) {
        if (rows < 0 || cols < 0)
            throw Error("matrix dimensions must be non-negative");
    }

    static Matrix identity(ContextPtr ctx, int n) {
        Matrix m(std::move(ctx), n, n);
        for (int i = 0; i < n; ++i)
            m.entry(i, i) = 1;
        return m;
    }

    static Matrix column_vector(ContextPtr ctx, const std::vector<mpz_class>& v) {
        Matrix m(std::move(ctx), static_cast<int>(v.size()), 1);
        for (size_t i = 0; i < v.size(); ++i)
            m.set(static_cast<int>(i), 0, v[i]);
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const ContextPtr& context() const { return ctx_; }

    const mpz_class& at(int r, int c) const { return entries_[index(r, c)]; }
    Scalar scalar_at(int r, int c) const { return Scalar(ctx_, at(r, c)); }

    void set(int r, int c, const mpz_class& v) { entry(r, c) = ctx_->reduce(v); }
    void set(int r, int c, const Scalar& v) {
        require_same(*ctx_, *v.context());
        entry(r, c) = v.residue();
    }

    Matrix operator*(const Matrix& o) const {
        require_same(*ctx_, *o.ctx_);
        if (cols_ != o.rows_)
            throw Error("matrix product shape mismatch");
        Matrix out(ctx_, rows_, o.cols_);
        for (int i = 0; i < rows_; ++i)
            for (int k = 0; k < cols_; ++k) {
                const mpz_class& a = at(i, k);
                if (a == 0)
                    continue;
                for (int j = 0; j < o.cols_; ++j)
                    out.entry(i, j) += a * o.at(k, j);
            }
        for (auto& e : out.entries_)
            e = ctx_->reduce(e);
        return out;
    }

    Matrix operator+(const Matrix& o) const {
        require_same(*ctx_, *o.ctx_);
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw Error("matrix sum shape mismatch");
        Matrix out(ctx_, rows_, cols_);
        for (size_t i = 0; i < entries_.size(); ++i)
            out.entries_[i] = ctx_->reduce(entries_[i] + o.entries_[i]);
        return out;
    }

    Matrix operator-(const Matrix& o) const {
        require_same(*ctx_, *o.ctx_);
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw Error("matrix difference shape mismatch");
        Matrix out(ctx_, rows_, cols_);
        for (size_t i = 0; i < entries_.size(); ++i)
            out.entries_[i] = ctx_->reduce(entries_[i] - o.entries_[i]);
        return out;
    }

    Matrix operator-() const {
        Matrix out(ctx_, rows_, cols_);
        for (size_t i = 0; i < entries_.size(); ++i)
            out.entries_[i] = ctx_->reduce(-entries_[i]);
        return out;
    }

    bool operator==(const Matrix& o) const {
        require_same(*ctx_, *o.ctx_);
        return rows_ == o.rows_ && cols_ == o.cols_ && entries_ == o.entries_;
    }
    bool operator!=(const Matrix& o) const { return !(*this == o); }

    bool is_zero() const {
        return std::all_of(entries_.begin(), entries_.end(),
                           [](const mpz_class& e) { return e == 0; });
    }

    void swap_rows(int a, int b) {
        if (a == b)
            return;
        for (int j = 0; j < cols_; ++j)
            std::swap(entry(a, j), entry(b, j));
    }
    void swap_cols(int a, int b) {
        if (a == b)
            return;
        for (int i = 0; i < rows_; ++i)
            std::swap(entry(i, a), entry(i, b));
    }
    /// row[a] += f * row[b]
    void add_row_multiple(int a, int b, const mpz_class& f) {
        for (int j = 0; j < cols_; ++j)
            entry(a, j) = ctx_->reduce(entry(a, j) + f * at(b, j));
    }
    /// col[a] += f * col[b]
    void add_col_multiple(int a, int b, const mpz_class& f) {
        for (int i = 0; i < rows_; ++i)
            entry(i, a) = ctx_->reduce(entry(i, a) + f * at(i, b));
    }
    void scale_row(int r, const mpz_class& f) {
        for (int j = 0; j < cols_; ++j)
            entry(r, j) = ctx_->reduce(f * at(r, j));
    }

private:
    size_t index(int r, int c) const {
        return static_cast<size_t>(r) * static_cast<size_t>(cols_) + static_cast<size_t>(c);
    }
    mpz_class& entry(int r, int c) { return entries_[index(r, c)]; }

    ContextPtr ctx_;
    int rows_;
    int cols_;
    std::vector<mpz_class> entries_;
};

/// Elementary-divisor description of a finitely presented Z/l^N-module.
/// A diagonal valuation that reaches the precision cap N counts as free
/// *at this precision*; exponents strictly between 0 and N give torsion.
struct ModuleStructure {
    int free_rank = 0;
    std::vector<int> torsion_exponents; // sorted non-decreasing, each in [1, N)
    int precision_note = 0;             // the N this was computed at

    bool operator==(const ModuleStructure& o) const = default;
};

/// U * M * V = D with U, V invertible and D diagonal with entries l^{e_0} |
/// l^{e_1} | ...; exponents[i] in [0, N].
struct Diagonalization {
    Matrix d;
    Matrix u;
    Matrix v;
    std::vector<int> exponents;

    Diagonalization(Matrix d_, Matrix u_, Matrix v_, std::vector<int> e)
        : d(std::move(d_)), u(std::move(u_)), v(std::move(v_)), exponents(std::move(e)) {}
};

/// Normal form over the local ring Z/l^N. Pivot selection is fixed: the
/// lowest-valuation entry of the trailing submatrix, ties broken in
/// row-major order, so the output is reproducible run to run.
inline Diagonalization diagonalize(const Matrix& m) {
    const ContextPtr& ctx = m.context();
    const int n = ctx->precision();
    Matrix d = m;
    Matrix u = Matrix::identity(ctx, m.rows());
    Matrix v = Matrix::identity(ctx, m.cols());
    const int steps = std::min(m.rows(), m.cols());
    std::vector<int> exponents(static_cast<size_t>(steps), n);

    for (int t = 0; t < steps; ++t) {
        int best_val = n;
        int best_r = -1, best_c = -1;
        for (int i = t; i < d.rows(); ++i)
            for (int j = t; j < d.cols(); ++j) {
                int val = ctx->valuation(d.at(i, j));
                if (val < best_val) {
                    best_val = val;
                    best_r = i;
                    best_c = j;
                }
            }
        if (best_r < 0)
            break; // trailing block is zero mod l^N; exponents stay at N
        d.swap_rows(t, best_r);
        u.swap_rows(t, best_r);
        d.swap_cols(t, best_c);
        v.swap_cols(t, best_c);

        const int e = best_val;
        exponents[static_cast<size_t>(t)] = e;
        // normalize pivot to exactly l^e
        Scalar unit = Scalar(ctx, d.at(t, t)).shift_down(e);
        mpz_class unit_inv = unit.inverse().residue();
        d.scale_row(t, unit_inv);
        u.scale_row(t, unit_inv);

        const mpz_class pivot = ctx->prime_power(e);
        for (int i = t + 1; i < d.rows(); ++i) {
            if (d.at(i, t) == 0)
                continue;
            mpz_class f;
            mpz_divexact(f.get_mpz_t(), d.at(i, t).get_mpz_t(), pivot.get_mpz_t());
            d.add_row_multiple(i, t, -f);
            u.add_row_multiple(i, t, -f);
        }
        for (int j = t + 1; j < d.cols(); ++j) {
            if (d.at(t, j) == 0)
                continue;
            mpz_class f;
            mpz_divexact(f.get_mpz_t(), d.at(t, j).get_mpz_t(), pivot.get_mpz_t());
            d.add_col_multiple(j, t, -f);
            v.add_col_multiple(j, t, -f);
        }
    }
    return Diagonalization(std::move(d), std::move(u), std::move(v), std::move(exponents));
}

/// Row transform and per-row exponents describing coker(M) inside its
/// target: coordinate i of U*x is taken mod l^{row_exponents[i]}.
struct CokernelPresentation {
    ModuleStructure structure;
    Matrix u;                      // rows x rows transform from diagonalize
    std::vector<int> row_exponents; // length = target rank, entries in [0, N]
};

inline CokernelPresentation cokernel_presentation(const Matrix& m) {
    const int n = m.context()->precision();
    Diagonalization dg = diagonalize(m);
    CokernelPresentation out{ModuleStructure{0, {}, n}, std::move(dg.u), {}};
    out.row_exponents.assign(static_cast<size_t>(m.rows()), n);
    for (size_t i = 0; i < dg.exponents.size(); ++i)
        out.row_exponents[i] = dg.exponents[i];
    for (int e : out.row_exponents) {
        if (e == n)
            ++out.structure.free_rank;
        else if (e > 0)
            out.structure.torsion_exponents.push_back(e);
    }
    std::sort(out.structure.torsion_exponents.begin(), out.structure.torsion_exponents.end());
    return out;
}

/// Structure of target / im(M).
inline ModuleStructure cokernel(const Matrix& m) {
    return cokernel_presentation(m).structure;
}

/// Basis of ker(M) as columns; exact mod l^N.
inline std::vector<Matrix> kernel_basis(const Matrix& m) {
    const ContextPtr& ctx = m.context();
    const int n = ctx->precision();
    Diagonalization dg = diagonalize(m);
    std::vector<Matrix> basis;
    const int steps = std::min(m.rows(), m.cols());
    for (int j = 0; j < m.cols(); ++j) {
        int e = j < steps ? dg.exponents[static_cast<size_t>(j)] : n;
        if (e == 0)
            continue; // unit pivot column contributes nothing
        // D kills l^{N-e} * eta_j; pull back through V.
        Matrix gen(ctx, m.cols(), 1);
        gen.set(j, 0, e == n ? mpz_class(1) : ctx->prime_power(n - e));
        basis.push_back(dg.v * gen);
    }
    return basis;
}

/// Particular solution of M x = b mod l^N, if one exists.
inline std::optional<Matrix> try_solve(const Matrix& m, const Matrix& b) {
    require_same(*m.context(), *b.context());
    if (b.rows() != m.rows() || b.cols() != 1)
        throw Error("solve: right-hand side shape mismatch");
    const ContextPtr& ctx = m.context();
    const int n = ctx->precision();
    Diagonalization dg = diagonalize(m);
    Matrix c = dg.u * b;
    Matrix y(ctx, m.cols(), 1);
    const int steps = std::min(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i) {
        int e = i < steps ? dg.exponents[static_cast<size_t>(i)] : n;
        const mpz_class& ci = c.at(i, 0);
        if (e == n) {
            if (ci != 0)
                return std::nullopt;
            continue;
        }
        if (ctx->valuation(ci) < e)
            return std::nullopt;
        if (i < m.cols())
            y.set(i, 0, Scalar(ctx, ci).shift_down(e));
    }
    return dg.v * y;
}

inline Matrix solve(const Matrix& m, const Matrix& b) {
    auto x = try_solve(m, b);
    if (!x)
        throw NoSolutionAtPrecision("right-hand side is not in the image mod l^N");
    return *x;
}

/// Inverse of a square matrix whose elementary divisors are all units.
inline Matrix inverse(const Matrix& m) {
    if (m.rows() != m.cols())
        throw Error("inverse: matrix not square");
    Diagonalization dg = diagonalize(m);
    for (int e : dg.exponents)
        if (e != 0)
            throw NotInvertible("matrix determinant has positive valuation");
    // U M V = I  =>  M^{-1} = V U
    return dg.v * dg.u;
}

inline bool is_invertible(const Matrix& m) {
    if (m.rows() != m.cols())
        return false;
    Diagonalization dg = diagonalize(m);
    return std::all_of(dg.exponents.begin(), dg.exponents.end(),
                       [](int e) { return e == 0; });
}

} // namespace torelli::padic
