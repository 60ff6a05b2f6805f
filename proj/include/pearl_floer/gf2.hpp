/**
 * Exact linear algebra over Z/2.
 *
 * Vectors and matrix rows are bit-packed into 64-bit words.  Elimination
 * always pivots on the lowest available row index, so every report derived
 * from these routines is reproducible bit for bit.
 *
 * Cochain complexes are cohomological: the differential raises degree by
 * one, and column j of the differential matrix is the image of generator j.
 * Filtrations are decreasing: a generator at level l lies in F^l and in no
 * F^{l+1}, and the differential must not lower the level.
 */
#ifndef PEARL_FLOER_GF2_HPP
#define PEARL_FLOER_GF2_HPP

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace pearl {

class BitVector
{
public:
    BitVector() = default;
    explicit BitVector(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}

    std::size_t size() const noexcept { return size_; }

    bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
    void set(std::size_t i, bool value)
    {
        const std::uint64_t mask = std::uint64_t{1} << (i & 63);
        if (value)
            words_[i >> 6] |= mask;
        else
            words_[i >> 6] &= ~mask;
    }
    void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

    BitVector& operator^=(const BitVector& other)
    {
        for (std::size_t w = 0; w < words_.size(); ++w)
            words_[w] ^= other.words_[w];
        return *this;
    }

    bool any() const
    {
        return std::any_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w != 0; });
    }

    // Index of the lowest set bit, or size() if none.
    std::size_t lowest() const
    {
        for (std::size_t w = 0; w < words_.size(); ++w)
            if (words_[w] != 0)
                return w * 64 + static_cast<std::size_t>(std::countr_zero(words_[w]));
        return size_;
    }

    bool dot(const BitVector& other) const
    {
        unsigned parity = 0;
        for (std::size_t w = 0; w < words_.size(); ++w)
            parity ^= static_cast<unsigned>(std::popcount(words_[w] & other.words_[w]) & 1);
        return parity != 0;
    }

    friend bool operator==(const BitVector&, const BitVector&) = default;

private:
    std::size_t size_ = 0;
    std::vector<std::uint64_t> words_;
};

class GF2Matrix
{
public:
    GF2Matrix() = default;
    GF2Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows, BitVector(cols)) {}

    static GF2Matrix identity(std::size_t n)
    {
        GF2Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            m.set(i, i, true);
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    bool get(std::size_t i, std::size_t j) const { return data_[i].get(j); }
    void set(std::size_t i, std::size_t j, bool v) { data_[i].set(j, v); }
    void flip(std::size_t i, std::size_t j) { data_[i].flip(j); }

    const BitVector& row(std::size_t i) const { return data_[i]; }

    BitVector column(std::size_t j) const
    {
        BitVector c(rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            if (get(i, j))
                c.set(i, true);
        return c;
    }

    GF2Matrix transpose() const
    {
        GF2Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                if (get(i, j))
                    t.set(j, i, true);
        return t;
    }

    // this * v for a column vector v of length cols().
    BitVector apply(const BitVector& v) const
    {
        BitVector out(rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            if (data_[i].dot(v))
                out.set(i, true);
        return out;
    }

    friend GF2Matrix operator*(const GF2Matrix& a, const GF2Matrix& b)
    {
        if (a.cols_ != b.rows_)
            throw Error(ErrorKind::ShapeMismatch, "matrix product shape mismatch");
        GF2Matrix out(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k)
                if (a.get(i, k))
                    out.data_[i] ^= b.data_[k];
        return out;
    }

    friend GF2Matrix operator+(const GF2Matrix& a, const GF2Matrix& b)
    {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
            throw Error(ErrorKind::ShapeMismatch, "matrix sum shape mismatch");
        GF2Matrix out = a;
        for (std::size_t i = 0; i < a.rows_; ++i)
            out.data_[i] ^= b.data_[i];
        return out;
    }

    bool is_zero() const
    {
        return std::none_of(data_.begin(), data_.end(), [](const BitVector& r) { return r.any(); });
    }

    std::size_t count_nonzero() const
    {
        std::size_t c = 0;
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                c += get(i, j) ? 1 : 0;
        return c;
    }

    friend bool operator==(const GF2Matrix&, const GF2Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<BitVector> data_;
};

/**
 * Incrementally maintained basis of a subspace of GF(2)^dim.  Each stored
 * vector has a distinct pivot (its lowest set bit) and is reduced against
 * every earlier pivot.
 */
class Gf2Span
{
public:
    explicit Gf2Span(std::size_t dim) : dim_(dim), pivot_owner_(dim, npos) {}

    // Returns true when v was independent of the current span.
    bool insert(BitVector v)
    {
        while (true) {
            const std::size_t p = v.lowest();
            if (p == v.size())
                return false;
            const std::size_t owner = pivot_owner_[p];
            if (owner == npos) {
                pivot_owner_[p] = basis_.size();
                basis_.push_back(std::move(v));
                return true;
            }
            v ^= basis_[owner];
        }
    }

    bool contains(BitVector v) const
    {
        while (true) {
            const std::size_t p = v.lowest();
            if (p == v.size())
                return true;
            const std::size_t owner = pivot_owner_[p];
            if (owner == npos)
                return false;
            v ^= basis_[owner];
        }
    }

    std::size_t rank() const noexcept { return basis_.size(); }
    std::size_t dim() const noexcept { return dim_; }
    const std::vector<BitVector>& basis() const noexcept { return basis_; }

private:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t dim_;
    std::vector<std::size_t> pivot_owner_;
    std::vector<BitVector> basis_;
};

inline std::size_t gf2_rank(const GF2Matrix& m)
{
    Gf2Span span(m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        span.insert(m.row(i));
    return span.rank();
}

// Basis (as column vectors of length m.cols()) of {x : m x = 0}.
inline std::vector<BitVector> gf2_null_space(const GF2Matrix& m)
{
    const std::size_t cols = m.cols();
    // Row-reduce to reduced echelon form with pivot columns chosen left to right.
    std::vector<BitVector> rows;
    rows.reserve(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        rows.push_back(m.row(i));

    std::vector<std::size_t> pivot_cols;
    std::size_t next = 0;
    for (std::size_t c = 0; c < cols && next < rows.size(); ++c) {
        std::size_t piv = next;
        while (piv < rows.size() && !rows[piv].get(c))
            ++piv;
        if (piv == rows.size())
            continue;
        std::swap(rows[piv], rows[next]);
        for (std::size_t r = 0; r < rows.size(); ++r)
            if (r != next && rows[r].get(c))
                rows[r] ^= rows[next];
        pivot_cols.push_back(c);
        ++next;
    }

    std::vector<bool> is_pivot(cols, false);
    for (std::size_t c : pivot_cols)
        is_pivot[c] = true;

    std::vector<BitVector> basis;
    for (std::size_t f = 0; f < cols; ++f) {
        if (is_pivot[f])
            continue;
        BitVector v(cols);
        v.set(f, true);
        for (std::size_t k = 0; k < pivot_cols.size(); ++k)
            if (rows[k].get(f))
                v.set(pivot_cols[k], true);
        basis.push_back(std::move(v));
    }
    return basis;
}

struct DegreeViolation
{
    std::size_t from = 0;
    std::size_t to = 0;
};

class GradedComplex
{
public:
    GradedComplex() = default;

    GradedComplex(std::vector<int> degrees, GF2Matrix differential, std::vector<std::string> labels = {})
        : degrees_(std::move(degrees)), d_(std::move(differential)), labels_(std::move(labels))
    {
        if (d_.rows() != degrees_.size() || d_.cols() != degrees_.size())
            throw Error(ErrorKind::ShapeMismatch, "differential must be square over the generators");
        if (labels_.empty())
            for (std::size_t i = 0; i < degrees_.size(); ++i)
                labels_.push_back("g" + std::to_string(i));
        if (labels_.size() != degrees_.size())
            throw Error(ErrorKind::ShapeMismatch, "one label per generator");
    }

    std::size_t size() const noexcept { return degrees_.size(); }
    const std::vector<int>& degrees() const noexcept { return degrees_; }
    int degree(std::size_t i) const { return degrees_[i]; }
    const GF2Matrix& differential() const noexcept { return d_; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }

    std::vector<DegreeViolation> degree_violations() const
    {
        std::vector<DegreeViolation> out;
        for (std::size_t j = 0; j < size(); ++j)
            for (std::size_t i = 0; i < size(); ++i)
                if (d_.get(i, j) && degrees_[i] != degrees_[j] + 1)
                    out.push_back({j, i});
        return out;
    }

    // Sorted distinct degrees.
    std::vector<int> degree_set() const
    {
        std::vector<int> ds = degrees_;
        std::sort(ds.begin(), ds.end());
        ds.erase(std::unique(ds.begin(), ds.end()), ds.end());
        return ds;
    }

    std::vector<std::size_t> generators_in_degree(int k) const
    {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < size(); ++i)
            if (degrees_[i] == k)
                out.push_back(i);
        return out;
    }

private:
    std::vector<int> degrees_;
    GF2Matrix d_;
    std::vector<std::string> labels_;
};

struct SquareZeroReport
{
    bool ok = true;
    // (generator, nonzero component of d(d(generator)))
    std::optional<std::pair<std::size_t, std::size_t>> witness;
    std::vector<DegreeViolation> degree_violations;
};

inline SquareZeroReport verify_square_zero(const GradedComplex& c)
{
    SquareZeroReport report;
    report.degree_violations = c.degree_violations();
    const GF2Matrix dd = c.differential() * c.differential();
    for (std::size_t j = 0; j < c.size() && !report.witness; ++j)
        for (std::size_t i = 0; i < c.size(); ++i)
            if (dd.get(i, j)) {
                report.witness = std::make_pair(j, i);
                break;
            }
    report.ok = !report.witness.has_value();
    return report;
}

namespace detail {

// Submatrix of d with the given rows and columns.
inline GF2Matrix submatrix(const GF2Matrix& d, const std::vector<std::size_t>& rows,
                           const std::vector<std::size_t>& cols)
{
    GF2Matrix out(rows.size(), cols.size());
    for (std::size_t a = 0; a < rows.size(); ++a)
        for (std::size_t b = 0; b < cols.size(); ++b)
            if (d.get(rows[a], cols[b]))
                out.set(a, b, true);
    return out;
}

inline void require_complex(const GradedComplex& c)
{
    const auto report = verify_square_zero(c);
    if (!report.degree_violations.empty()) {
        const auto& v = report.degree_violations.front();
        throw Error(ErrorKind::DegreeViolation,
                    "entry " + c.labels()[v.from] + " -> " + c.labels()[v.to] + " does not raise degree by one");
    }
    if (!report.ok)
        throw Error(ErrorKind::NotAComplex, "d^2 != 0: d(d(" + c.labels()[report.witness->first] +
                                                ")) contains " + c.labels()[report.witness->second]);
}

} // namespace detail

// rank H^k = dim ker d_k - rank d_{k-1}, for every degree carrying generators.
inline std::map<int, int> cohomology_ranks(const GradedComplex& c)
{
    detail::require_complex(c);
    std::map<int, int> ranks;
    std::map<int, int> rank_out; // rank of d restricted to degree k
    const auto degrees = c.degree_set();
    for (int k : degrees) {
        const auto src = c.generators_in_degree(k);
        const auto dst = c.generators_in_degree(k + 1);
        rank_out[k] = static_cast<int>(gf2_rank(detail::submatrix(c.differential(), dst, src)));
    }
    for (int k : degrees) {
        const int n_k = static_cast<int>(c.generators_in_degree(k).size());
        const int in = rank_out.count(k - 1) ? rank_out[k - 1] : 0;
        ranks[k] = n_k - rank_out[k] - in;
    }
    return ranks;
}

inline int total_rank(const std::map<int, int>& ranks)
{
    int s = 0;
    for (const auto& [k, r] : ranks)
        s += r;
    return s;
}

// Phi has one row per generator of c2 and one column per generator of c1.
inline void require_degree_preserving(const GradedComplex& c1, const GradedComplex& c2, const GF2Matrix& phi)
{
    if (phi.rows() != c2.size() || phi.cols() != c1.size())
        throw Error(ErrorKind::ShapeMismatch, "map must be |C2| x |C1|");
    for (std::size_t j = 0; j < c1.size(); ++j)
        for (std::size_t i = 0; i < c2.size(); ++i)
            if (phi.get(i, j) && c2.degree(i) != c1.degree(j))
                throw Error(ErrorKind::DegreeViolation,
                            "map entry " + c1.labels()[j] + " -> " + c2.labels()[i] + " changes degree");
}

inline bool verify_chain_map(const GradedComplex& c1, const GradedComplex& c2, const GF2Matrix& phi)
{
    require_degree_preserving(c1, c2, phi);
    return phi * c1.differential() == c2.differential() * phi;
}

/**
 * Cone(Phi)^k = C1^{k+1} + C2^k with d(a, b) = (d1 a, Phi a + d2 b).
 * Generators of C1 come first.
 */
inline GradedComplex mapping_cone(const GradedComplex& c1, const GradedComplex& c2, const GF2Matrix& phi)
{
    const std::size_t n1 = c1.size();
    const std::size_t n2 = c2.size();
    std::vector<int> degrees;
    std::vector<std::string> labels;
    for (std::size_t j = 0; j < n1; ++j) {
        degrees.push_back(c1.degree(j) - 1);
        labels.push_back("cone:" + c1.labels()[j]);
    }
    for (std::size_t j = 0; j < n2; ++j) {
        degrees.push_back(c2.degree(j));
        labels.push_back(c2.labels()[j]);
    }
    GF2Matrix d(n1 + n2, n1 + n2);
    for (std::size_t j = 0; j < n1; ++j) {
        for (std::size_t i = 0; i < n1; ++i)
            if (c1.differential().get(i, j))
                d.set(i, j, true);
        for (std::size_t i = 0; i < n2; ++i)
            if (phi.get(i, j))
                d.set(n1 + i, j, true);
    }
    for (std::size_t j = 0; j < n2; ++j)
        for (std::size_t i = 0; i < n2; ++i)
            if (c2.differential().get(i, j))
                d.set(n1 + i, n1 + j, true);
    return GradedComplex(std::move(degrees), std::move(d), std::move(labels));
}

inline bool is_quasi_iso(const GradedComplex& c1, const GradedComplex& c2, const GF2Matrix& phi)
{
    if (!verify_chain_map(c1, c2, phi))
        throw Error(ErrorKind::NotChainMap, "Phi d1 != d2 Phi");
    const auto ranks = cohomology_ranks(mapping_cone(c1, c2, phi));
    return total_rank(ranks) == 0;
}

class FilteredComplex
{
public:
    FilteredComplex(GradedComplex complex, std::vector<int> levels)
        : complex_(std::move(complex)), levels_(std::move(levels))
    {
        if (levels_.size() != complex_.size())
            throw Error(ErrorKind::ShapeMismatch, "one filtration level per generator");
        for (int l : levels_)
            if (l < 0)
                throw Error(ErrorKind::InvalidArgument, "filtration levels are non-negative");
    }

    const GradedComplex& complex() const noexcept { return complex_; }
    const std::vector<int>& levels() const noexcept { return levels_; }
    int level(std::size_t i) const { return levels_[i]; }

    // First entry (from, to) that lowers the filtration level, if any.
    std::optional<std::pair<std::size_t, std::size_t>> filtration_violation() const
    {
        const auto& d = complex_.differential();
        for (std::size_t j = 0; j < complex_.size(); ++j)
            for (std::size_t i = 0; i < complex_.size(); ++i)
                if (d.get(i, j) && levels_[i] < levels_[j])
                    return std::make_pair(j, i);
        return std::nullopt;
    }

    int min_level() const { return levels_.empty() ? 0 : *std::min_element(levels_.begin(), levels_.end()); }
    int max_level() const { return levels_.empty() ? 0 : *std::max_element(levels_.begin(), levels_.end()); }

private:
    GradedComplex complex_;
    std::vector<int> levels_;
};

/// Ranks of one page, keyed by (p, q) with p the filtration level and p + q the total degree.
using PageRanks = std::map<std::pair<int, int>, int>;

struct SpectralTable
{
    std::vector<PageRanks> pages; // pages[r] = E_r, r = 0..r_max
    PageRanks infinity;
    int stable_from = 0; // first r with E_r = E_infinity

    int rank(const PageRanks& page, int p, int q) const
    {
        auto it = page.find({p, q});
        return it == page.end() ? 0 : it->second;
    }
};

namespace detail {

class SpectralEngine
{
public:
    explicit SpectralEngine(const FilteredComplex& f) : f_(f), n_(f.complex().size()) {}

    /**
     * Z_r^p in total degree k: x in F^p C^k with d x in F^{p+r} C^{k+1},
     * as vectors over all generators.  Z_{-1}^p is F^p itself.
     */
    std::vector<BitVector> cycles(int r, int p, int k) const
    {
        const auto& c = f_.complex();
        std::vector<std::size_t> cols;
        for (std::size_t i = 0; i < n_; ++i)
            if (c.degree(i) == k && f_.level(i) >= p)
                cols.push_back(i);
        if (r < 0)
            return embed(unit_basis(cols.size()), cols);
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < n_; ++i)
            if (c.degree(i) == k + 1 && f_.level(i) < p + r)
                rows.push_back(i);
        return embed(gf2_null_space(submatrix(c.differential(), rows, cols)), cols);
    }

    // dim E_r^{p, k-p} = dim Z_r^p - dim(Z_{r-1}^{p+1} + d Z_{r-1}^{p-r+1}).
    int page_rank(int r, int p, int k) const
    {
        const auto z = cycles(r, p, k);
        Gf2Span boundaries(n_);
        for (auto& v : cycles(r - 1, p + 1, k))
            boundaries.insert(std::move(v));
        for (const auto& v : cycles(r - 1, p - r + 1, k - 1))
            boundaries.insert(f_.complex().differential().apply(v));
        return static_cast<int>(z.size()) - static_cast<int>(boundaries.rank());
    }

private:
    static std::vector<BitVector> unit_basis(std::size_t m)
    {
        std::vector<BitVector> out;
        for (std::size_t i = 0; i < m; ++i) {
            BitVector v(m);
            v.set(i, true);
            out.push_back(std::move(v));
        }
        return out;
    }

    std::vector<BitVector> embed(const std::vector<BitVector>& local, const std::vector<std::size_t>& cols) const
    {
        std::vector<BitVector> out;
        out.reserve(local.size());
        for (const auto& v : local) {
            BitVector g(n_);
            for (std::size_t b = 0; b < cols.size(); ++b)
                if (v.get(b))
                    g.set(cols[b], true);
            out.push_back(std::move(g));
        }
        return out;
    }

    const FilteredComplex& f_;
    std::size_t n_;
};

} // namespace detail

inline SpectralTable spectral_pages(const FilteredComplex& f, int r_max)
{
    if (r_max < 0)
        throw Error(ErrorKind::InvalidArgument, "r_max must be non-negative");
    if (auto v = f.filtration_violation()) {
        const auto& labels = f.complex().labels();
        throw Error(ErrorKind::FiltrationViolated,
                    "entry " + labels[v->first] + " -> " + labels[v->second] + " lowers the filtration level");
    }
    detail::require_complex(f.complex());

    const detail::SpectralEngine engine(f);
    const auto degrees = f.complex().degree_set();
    const int lo = f.min_level();
    const int hi = f.max_level();
    // Beyond this page every differential d_r vanishes.
    const int r_inf = hi - lo + 2;

    auto page = [&](int r) {
        PageRanks ranks;
        for (int p = lo; p <= hi; ++p)
            for (int k : degrees) {
                const int rank = engine.page_rank(r, p, k);
                if (rank != 0)
                    ranks[{p, k - p}] = rank;
            }
        return ranks;
    };

    SpectralTable table;
    for (int r = 0; r <= r_max; ++r)
        table.pages.push_back(page(r));
    table.infinity = page(std::max(r_inf, r_max));
    table.stable_from = r_max + 1;
    for (int r = r_max; r >= 0; --r) {
        if (table.pages[static_cast<std::size_t>(r)] != table.infinity)
            break;
        table.stable_from = r;
    }
    return table;
}

} // namespace pearl

#endif
