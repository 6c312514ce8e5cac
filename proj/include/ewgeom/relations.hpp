#pragma once

#include <Eigen/Dense>
#include <functional>

#include "ewgeom/grassmann.hpp"

namespace ewgeom {

// One sample of a scalar family: member values (graded scalars) plus the
// pre-cancellation magnitude of each member's evaluation.
struct FamilySample {
    std::vector<GrassmannElement> values;
    // Per-member magnitude shadows: coefficient-wise pre-cancellation mass.
    std::vector<GrassmannElement> scales;
};

// A family of scalar evaluators sharing one binding signature: each call
// samples fresh fields for (seed, sample_index) and evaluates every member
// on them.
struct ScalarFamily {
    std::string name;
    std::vector<std::string> member_names;
    std::string statistics;  // "bosonic", "fermionic" or "n/a"
    std::function<FamilySample(std::uint64_t seed, int sample_index)> evaluate;
};

struct RelationBasis {
    std::vector<std::string> member_names;
    int nullspace_dim = 0;
    // Row-reduced nullspace basis; integer-rescaled when every entry sits
    // within 1e-6 of an integer pattern, raw otherwise.
    std::vector<std::vector<double>> basis;
    std::vector<double> singular_values;
    double rank_tol = 0.0;
    int samples = 0;
    int rows = 0;
};

namespace detail {

// Reduced row echelon form with partial pivoting; canonical for the row
// space, which makes multi-dimensional nullspace reports deterministic.
inline void rref(Eigen::MatrixXd& m, double tol) {
    int lead = 0;
    for (int r = 0; r < m.rows() && lead < m.cols(); ++r) {
        int piv = -1;
        double best = tol;
        for (; lead < m.cols(); ++lead) {
            piv = -1;
            best = tol;
            for (int i = r; i < m.rows(); ++i) {
                if (std::abs(m(i, lead)) > best) {
                    best = std::abs(m(i, lead));
                    piv = i;
                }
            }
            if (piv >= 0) break;
        }
        if (lead == m.cols()) break;
        m.row(r).swap(m.row(piv));
        m.row(r) /= m(r, lead);
        for (int i = 0; i < m.rows(); ++i) {
            if (i != r && std::abs(m(i, lead)) > 0.0) m.row(i) -= m(i, lead) * m.row(r);
        }
        ++lead;
    }
}

inline bool integer_rescale(std::vector<double>& v) {
    constexpr double kIntTol = 1e-6;
    double smallest = 0.0;
    for (double x : v) {
        double a = std::abs(x);
        if (a > 1e-9 && (smallest == 0.0 || a < smallest)) smallest = a;
    }
    if (smallest == 0.0) return false;
    double pivot = 0.0;
    for (double x : v) {
        if (std::abs(std::abs(x) - smallest) < 1e-9 * std::max(1.0, smallest)) {
            pivot = x;
            break;
        }
    }
    std::vector<double> scaled(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        double s = v[i] / pivot;
        if (std::abs(s - std::round(s)) > kIntTol) return false;
        scaled[i] = std::round(s) + 0.0;  // normalize -0.0
    }
    v = std::move(scaled);
    return true;
}

}  // namespace detail

// Builds the samples x members matrix (graded scalars flattened to
// coefficient rows, real and imaginary parts separately), thresholds the
// SVD and reports the nullspace. Basis vectors satisfying an integer ratio
// pattern are rescaled so the smallest nonzero entry is +-1.
inline RelationBasis find_linear_relations_from_samples(
    const std::string& family_name, const std::vector<std::string>& member_names,
    std::span<const FamilySample> samples, double rank_tol = 1e-8) {
    if (member_names.empty()) throw Error("empty scalar family");
    const int n = static_cast<int>(member_names.size());

    std::vector<Eigen::VectorXd> rows;
    for (const FamilySample& fs : samples) {
        if (static_cast<int>(fs.values.size()) != n)
            throw Error("family evaluator returned wrong member count");
        // Union of generator subsets across members of this sample.
        std::map<GrassmannElement::Key, int> keys;
        for (const auto& v : fs.values)
            for (const auto& [k, c] : v.terms()) keys.emplace(k, 0);
        for (const auto& [key, unused] : keys) {
            Eigen::VectorXd re(n), im(n);
            for (int j = 0; j < n; ++j) {
                cplx c = fs.values[j].coeff(key);
                re[j] = c.real();
                im[j] = c.imag();
            }
            if (re.norm() > 0.0) rows.push_back(re);
            if (im.norm() > 0.0) rows.push_back(im);
        }
    }

    if (rows.empty())
        throw Error(cat("degenerate sampling for family '", family_name,
                        "': all values are zero; rerun with a different seed"));

    Eigen::MatrixXd m(static_cast<int>(rows.size()), n);
    for (int i = 0; i < m.rows(); ++i) m.row(i) = rows[static_cast<std::size_t>(i)];

    // Compress tall matrices through QR before the SVD.
    Eigen::MatrixXd reduced;
    if (m.rows() > 4 * n) {
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
        reduced = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
    } else {
        reduced = m;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(reduced, Eigen::ComputeFullV);
    Eigen::VectorXd sv = svd.singularValues();
    double smax = sv.size() > 0 ? sv[0] : 0.0;

    RelationBasis out;
    out.member_names = member_names;
    out.rank_tol = rank_tol;
    out.samples = static_cast<int>(samples.size());
    out.rows = static_cast<int>(rows.size());
    for (int i = 0; i < sv.size(); ++i) out.singular_values.push_back(sv[i]);

    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv[i] > rank_tol * smax) ++rank;
    int nulldim = n - rank;
    out.nullspace_dim = nulldim;
    if (nulldim == 0) return out;

    Eigen::MatrixXd basis(nulldim, n);
    for (int k = 0; k < nulldim; ++k) basis.row(k) = svd.matrixV().col(rank + k).transpose();
    detail::rref(basis, 1e-9);

    for (int k = 0; k < nulldim; ++k) {
        std::vector<double> v(n);
        for (int j = 0; j < n; ++j) v[j] = basis(k, j) + 0.0;
        std::vector<double> raw = v;
        if (!detail::integer_rescale(v)) v = raw;
        out.basis.push_back(std::move(v));
    }
    return out;
}

inline RelationBasis find_linear_relations(const ScalarFamily& family, int samples,
                                           std::uint64_t seed, double rank_tol = 1e-8) {
    std::vector<FamilySample> data;
    data.reserve(static_cast<std::size_t>(samples));
    for (int s = 0; s < samples; ++s) data.push_back(family.evaluate(seed, s));
    return find_linear_relations_from_samples(family.name, family.member_names, data,
                                              rank_tol);
}

// Checks that a coefficient vector lies in the span of the reported basis;
// used by tests against the identities a family is known to satisfy.
inline bool in_span(const RelationBasis& rb, const std::vector<double>& vec,
                    double tol = 1e-6) {
    if (rb.basis.empty()) return false;
    const int n = static_cast<int>(vec.size());
    Eigen::MatrixXd b(n, rb.nullspace_dim);
    for (int k = 0; k < rb.nullspace_dim; ++k)
        for (int j = 0; j < n; ++j) b(j, k) = rb.basis[static_cast<std::size_t>(k)][j];
    Eigen::VectorXd v(n);
    for (int j = 0; j < n; ++j) v[j] = vec[static_cast<std::size_t>(j)];
    Eigen::VectorXd coef = b.colPivHouseholderQr().solve(v);
    return (b * coef - v).norm() <= tol * std::max(1.0, v.norm());
}

}  // namespace ewgeom
