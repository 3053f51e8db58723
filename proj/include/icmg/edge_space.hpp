#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace icmg {

// Number of candidates in an election.  Everything downstream indexes the
// complete graph on these candidates, so the count is validated once here.
class CandidateCount {
public:
    explicit CandidateCount(int ell) : ell_(ell) {
        if (ell < 3 || ell > 64)
            throw std::domain_error("CandidateCount: need 3 <= candidates <= 64, got " +
                                    std::to_string(ell));
    }
    int value() const { return ell_; }

private:
    int ell_;
};

inline std::size_t edge_count(CandidateCount ell) {
    auto l = static_cast<std::size_t>(ell.value());
    return l * (l - 1) / 2;
}

namespace detail {

// Flat position of pair (i,j), 1 <= i < j <= ell, in lexicographic order.
inline std::size_t flat_index(int i, int j, int ell) {
    auto offset = static_cast<std::size_t>(i - 1) * ell - static_cast<std::size_t>(i) * (i - 1) / 2;
    return offset + static_cast<std::size_t>(j - i - 1);
}

} // namespace detail

struct EdgeRef {
    std::size_t flat;
    int sign;
};

// Maps an ordered candidate pair to its flat coordinate and orientation sign:
// coordinates are stored for i < j, and the (j,i) direction is the negation.
inline EdgeRef edge_index(int i, int j, CandidateCount ell) {
    int l = ell.value();
    if (i < 1 || i > l || j < 1 || j > l || i == j)
        throw std::domain_error("edge_index: invalid candidate pair (" + std::to_string(i) +
                                "," + std::to_string(j) + ") for " + std::to_string(l) +
                                " candidates");
    if (i < j) return {detail::flat_index(i, j, l), +1};
    return {detail::flat_index(j, i, l), -1};
}

inline std::pair<int, int> pair_of_flat(std::size_t k, CandidateCount ell) {
    int l = ell.value();
    std::size_t rem = k;
    for (int i = 1; i < l; ++i) {
        std::size_t row = static_cast<std::size_t>(l - i);
        if (rem < row) return {i, i + 1 + static_cast<int>(rem)};
        rem -= row;
    }
    throw std::domain_error("pair_of_flat: index out of range");
}

// A vector in edge space R^{ell(ell-1)/2}: one coordinate per unordered
// candidate pair, read in either direction through the sign convention.
class EdgeVector {
public:
    explicit EdgeVector(CandidateCount ell)
        : ell_(ell.value()), x_(edge_count(ell), 0.0) {}

    EdgeVector(CandidateCount ell, std::vector<double> coords)
        : ell_(ell.value()), x_(std::move(coords)) {
        if (x_.size() != edge_count(ell))
            throw std::invalid_argument("EdgeVector: wrong coordinate count");
        for (double v : x_)
            if (!std::isfinite(v))
                throw std::invalid_argument("EdgeVector: coordinates must be finite");
    }

    int candidates() const { return ell_; }
    std::size_t size() const { return x_.size(); }

    double get(int i, int j) const {
        auto r = edge_index(i, j, CandidateCount(ell_));
        return r.sign * x_[r.flat];
    }
    void set(int i, int j, double v) {
        if (!std::isfinite(v)) throw std::invalid_argument("EdgeVector: non-finite value");
        auto r = edge_index(i, j, CandidateCount(ell_));
        x_[r.flat] = r.sign * v;
    }
    void add(int i, int j, double v) { set(i, j, get(i, j) + v); }

    double operator[](std::size_t k) const { return x_[k]; }
    double& operator[](std::size_t k) { return x_[k]; }
    const std::vector<double>& coords() const { return x_; }

    EdgeVector& operator+=(const EdgeVector& o) {
        check_same(o);
        for (std::size_t k = 0; k < x_.size(); ++k) x_[k] += o.x_[k];
        return *this;
    }
    EdgeVector& operator-=(const EdgeVector& o) {
        check_same(o);
        for (std::size_t k = 0; k < x_.size(); ++k) x_[k] -= o.x_[k];
        return *this;
    }
    EdgeVector& operator*=(double c) {
        for (auto& v : x_) v *= c;
        return *this;
    }

    friend EdgeVector operator+(EdgeVector a, const EdgeVector& b) { return a += b; }
    friend EdgeVector operator-(EdgeVector a, const EdgeVector& b) { return a -= b; }
    friend EdgeVector operator*(double c, EdgeVector a) { return a *= c; }

private:
    void check_same(const EdgeVector& o) const {
        if (o.ell_ != ell_) throw std::invalid_argument("EdgeVector: candidate count mismatch");
    }
    int ell_;
    std::vector<double> x_;
};

inline double dot(const EdgeVector& a, const EdgeVector& b) {
    if (a.candidates() != b.candidates())
        throw std::invalid_argument("dot: candidate count mismatch");
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

inline double norm_sq(const EdgeVector& a) { return dot(a, a); }

namespace detail {

// flow[v] = sum over other candidates of the signed coordinate out of v.
inline void flows_raw(int ell, const double* x, double* flow) {
    for (int v = 0; v < ell; ++v) flow[v] = 0.0;
    std::size_t k = 0;
    for (int i = 1; i <= ell; ++i)
        for (int j = i + 1; j <= ell; ++j, ++k) {
            flow[i - 1] += x[k];
            flow[j - 1] -= x[k];
        }
}

inline void project_cut_raw(int ell, const double* x, double* z, double* flow) {
    flows_raw(ell, x, flow);
    std::size_t k = 0;
    for (int i = 1; i <= ell; ++i)
        for (int j = i + 1; j <= ell; ++j, ++k)
            z[k] = (flow[i - 1] - flow[j - 1]) / ell;
}

} // namespace detail

// Net flow of x out of candidate v.
inline double flow(const EdgeVector& x, int v) {
    int l = x.candidates();
    if (v < 1 || v > l) throw std::domain_error("flow: candidate out of range");
    double s = 0.0;
    for (int j = 1; j <= l; ++j)
        if (j != v) s += x.get(v, j);
    return s;
}

// Orthogonal projection onto the cut space (gradient flows): the component
// explained by a potential on candidates.
inline EdgeVector project_cut(const EdgeVector& x) {
    int l = x.candidates();
    EdgeVector z{CandidateCount(l)};
    std::vector<double> fl(static_cast<std::size_t>(l));
    detail::project_cut_raw(l, x.coords().data(), &z[0], fl.data());
    return z;
}

// Orthogonal projection onto the cycle space (circulations).
inline EdgeVector project_cycle(const EdgeVector& x) {
    EdgeVector y = x;
    EdgeVector z = project_cut(x);
    y -= z;
    return y;
}

// Squared norm of the cut component, evaluated in closed form:
// (2/ell) * (sum of squares + sum over edge pairs sharing a vertex of the
// product of both coordinates read outward from the shared vertex).
inline double cut_norm_sq(const EdgeVector& x) {
    int l = x.candidates();
    double squares = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) squares += x[k] * x[k];
    double cross = 0.0;
    for (int v = 1; v <= l; ++v)
        for (int a = 1; a <= l; ++a) {
            if (a == v) continue;
            double xa = x.get(v, a);
            for (int b = a + 1; b <= l; ++b) {
                if (b == v) continue;
                cross += xa * x.get(v, b);
            }
        }
    return 2.0 / l * (squares + cross);
}

// Basis of the cycle space: for each pair 2 <= i < j <= ell the triangle
// through candidate 1, e(1,i) + e(i,j) - e(1,j).
inline std::vector<EdgeVector> fundamental_cycle_basis(CandidateCount ell) {
    int l = ell.value();
    std::vector<EdgeVector> basis;
    basis.reserve((static_cast<std::size_t>(l) - 1) * (l - 2) / 2);
    for (int i = 2; i <= l; ++i)
        for (int j = i + 1; j <= l; ++j) {
            EdgeVector c(ell);
            c.add(1, i, 1.0);
            c.add(i, j, 1.0);
            c.add(1, j, -1.0);
            basis.push_back(std::move(c));
        }
    return basis;
}

// Spanning set of the cut space: the star of each candidate i = 2..ell.
inline std::vector<EdgeVector> star_cut_basis(CandidateCount ell) {
    int l = ell.value();
    std::vector<EdgeVector> basis;
    basis.reserve(static_cast<std::size_t>(l) - 1);
    for (int i = 2; i <= l; ++i) {
        EdgeVector u(ell);
        for (int j = 1; j <= l; ++j)
            if (j != i) u.add(i, j, 1.0);
        basis.push_back(std::move(u));
    }
    return basis;
}

} // namespace icmg
