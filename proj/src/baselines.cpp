#include "snnls/baselines.hpp"

#include "snnls/kernels.hpp"
#include "snnls/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

namespace snnls {

namespace {

// Extract columns `cols` (ascending) of W into a dense d x |cols| matrix.
Matrix gather_columns(const Matrix& W, const std::vector<int>& cols) {
    Matrix out(W.rows(), static_cast<int>(cols.size()));
    for (int r = 0; r < W.rows(); ++r) {
        const double* src = W.row_ptr(r);
        double* dst = out.row_ptr(r);
        for (size_t c = 0; c < cols.size(); ++c) dst[c] = src[cols[c]];
    }
    return out;
}

double norm2(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

}  // namespace

std::vector<double> lstsq(const Matrix& A, const std::vector<double>& x) {
    const int d = A.rows();
    const int p = A.cols();
    if (static_cast<int>(x.size()) != d)
        throw ValidationError("lstsq: rhs length " + std::to_string(x.size()) +
                              " does not match rows of A " + A.shape());
    if (p > d) throw ValidationError("lstsq: A has more columns than rows (" + A.shape() + ")");
    Matrix R(A);
    std::vector<double> b(x);
    // Householder reduction of R to upper triangular, applied to b alongside.
    for (int j = 0; j < p; ++j) {
        double norm = 0.0;
        for (int r = j; r < d; ++r) {
            const double v = R(r, j);
            norm += v * v;
        }
        norm = std::sqrt(norm);
        if (!(norm > 0.0)) throw NumericalError("lstsq: rank-deficient system (zero pivot column)");
        const double alpha = (R(j, j) >= 0.0) ? -norm : norm;
        std::vector<double> v(d - j);
        v[0] = R(j, j) - alpha;
        for (int r = j + 1; r < d; ++r) v[r - j] = R(r, j);
        double vnorm_sq = 0.0;
        for (double e : v) vnorm_sq += e * e;
        R(j, j) = alpha;
        for (int r = j + 1; r < d; ++r) R(r, j) = 0.0;
        if (vnorm_sq == 0.0) continue;
        for (int c = j + 1; c < p; ++c) {
            double proj = 0.0;
            for (int r = j; r < d; ++r) proj += v[r - j] * R(r, c);
            const double scale = 2.0 * proj / vnorm_sq;
            for (int r = j; r < d; ++r) R(r, c) -= scale * v[r - j];
        }
        double projb = 0.0;
        for (int r = j; r < d; ++r) projb += v[r - j] * b[r];
        const double scaleb = 2.0 * projb / vnorm_sq;
        for (int r = j; r < d; ++r) b[r] -= scaleb * v[r - j];
    }
    std::vector<double> s(p, 0.0);
    for (int j = p - 1; j >= 0; --j) {
        double acc = b[j];
        for (int c = j + 1; c < p; ++c) acc -= R(j, c) * s[c];
        const double piv = R(j, j);
        if (piv == 0.0 || !std::isfinite(piv))
            throw NumericalError("lstsq: rank-deficient system (zero pivot)");
        s[j] = acc / piv;
    }
    return s;
}

std::vector<double> nnls_active_set(const std::vector<double>& x, const Matrix& W, double tol) {
    const int d = W.rows();
    const int n = W.cols();
    if (static_cast<int>(x.size()) != d)
        throw ValidationError("nnls_active_set: rhs length " + std::to_string(x.size()) +
                              " does not match rows of W " + W.shape());
    if (!(tol > 0.0)) throw ValidationError("nnls_active_set: tol must be positive");
    // Correlations are computed against rows of W^T (contiguous access).
    Matrix Wt(n, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < n; ++c) Wt(c, r) = W(r, c);

    std::vector<double> h(n, 0.0);
    std::vector<uint8_t> passive(n, 0);
    std::vector<double> r(x);

    double corr_scale = 1.0;
    for (int i = 0; i < n; ++i)
        corr_scale = std::max(corr_scale, std::fabs(dot(Wt.row_ptr(i), x.data(), d)));
    const double tol_eff = tol * corr_scale;

    const int cap = 10 * n + 10;
    int iter = 0;
    while (true) {
        if (++iter > cap)
            throw NumericalError("nnls_active_set: iteration cap exceeded (degenerate dictionary)");
        // Most positive gradient of the fit over the active (zero) set.
        int best = -1;
        double best_corr = tol_eff;
        for (int i = 0; i < n; ++i) {
            if (passive[i]) continue;
            const double c = dot(Wt.row_ptr(i), r.data(), d);
            if (c > best_corr) {
                best_corr = c;
                best = i;
            }
        }
        if (best < 0) break;  // KKT satisfied on the active set
        passive[best] = 1;

        // Refit on the passive set; walk back along the segment whenever the
        // unconstrained solution leaves the non-negative orthant.
        while (true) {
            std::vector<int> pcols;
            for (int i = 0; i < n; ++i)
                if (passive[i]) pcols.push_back(i);
            if (pcols.empty()) break;
            const Matrix Wp = gather_columns(W, pcols);
            const std::vector<double> s = lstsq(Wp, x);
            double smin = s.empty() ? 1.0 : *std::min_element(s.begin(), s.end());
            if (smin > 0.0) {
                std::fill(h.begin(), h.end(), 0.0);
                for (size_t c = 0; c < pcols.size(); ++c) h[pcols[c]] = s[c];
                break;
            }
            double alpha = 1.0;
            int leave = -1;
            for (size_t c = 0; c < pcols.size(); ++c) {
                if (s[c] > 0.0) continue;
                const double hc = h[pcols[c]];
                const double step = hc / (hc - s[c]);
                if (step < alpha) {
                    alpha = step;
                    leave = static_cast<int>(c);
                }
            }
            for (size_t c = 0; c < pcols.size(); ++c) {
                const int i = pcols[c];
                h[i] += alpha * (s[c] - h[i]);
                if (h[i] <= 0.0 || static_cast<int>(c) == leave) {
                    h[i] = 0.0;
                    passive[i] = 0;
                }
            }
            if (++iter > cap)
                throw NumericalError(
                    "nnls_active_set: iteration cap exceeded (degenerate dictionary)");
        }
        // Fresh residual for the next gradient scan.
        for (int rr = 0; rr < d; ++rr) {
            double acc = 0.0;
            const double* wrow = W.row_ptr(rr);
            for (int i = 0; i < n; ++i)
                if (h[i] != 0.0) acc += wrow[i] * h[i];
            r[rr] = x[rr] - acc;
        }
    }
    return h;
}

BompResult nn_bomp(const std::vector<double>& x, const Matrix& W, const BlockStructure& blocks,
                   int k) {
    const int d = W.rows();
    const int n = W.cols();
    if (static_cast<int>(x.size()) != d)
        throw ValidationError("nn_bomp: rhs length " + std::to_string(x.size()) +
                              " does not match rows of W " + W.shape());
    if (blocks.n() != n)
        throw ValidationError("nn_bomp: block structure covers " + std::to_string(blocks.n()) +
                              " rows, dictionary has " + std::to_string(n) + " atoms");
    if (k < 1) throw ValidationError("nn_bomp: k must be at least 1");
    if (k > blocks.num_blocks())
        throw ValidationError("nn_bomp: k=" + std::to_string(k) + " exceeds number of blocks " +
                              std::to_string(blocks.num_blocks()));

    Matrix Wt(n, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < n; ++c) Wt(c, r) = W(r, c);

    BompResult out;
    out.coeffs.assign(n, 0.0);
    std::vector<double> r(x);
    std::vector<uint8_t> chosen(blocks.num_blocks(), 0);
    std::vector<int> support;

    for (int round = 0; round < k; ++round) {
        int best = -1;
        double best_score = 0.0;
        for (int b = 0; b < blocks.num_blocks(); ++b) {
            if (chosen[b]) continue;
            double score = 0.0;
            for (int i : blocks.group(b)) {
                const double c = dot(Wt.row_ptr(i), r.data(), d);
                if (c > 0.0) score += c * c;
            }
            if (score > best_score) {  // strict: ties keep the lowest index
                best_score = score;
                best = b;
            }
        }
        if (best < 0) break;  // nothing correlates; adding blocks cannot help
        chosen[best] = 1;
        out.blocks.push_back(best);
        for (int i : blocks.group(best)) support.push_back(i);
        std::sort(support.begin(), support.end());

        const Matrix Wsub = gather_columns(W, support);
        std::vector<double> hs = nnls_active_set(x, Wsub);
        std::fill(out.coeffs.begin(), out.coeffs.end(), 0.0);
        for (size_t c = 0; c < support.size(); ++c) out.coeffs[support[c]] = hs[c];
        for (int rr = 0; rr < d; ++rr) {
            double acc = 0.0;
            const double* wrow = W.row_ptr(rr);
            for (size_t c = 0; c < support.size(); ++c)
                acc += wrow[support[c]] * hs[c];
            r[rr] = x[rr] - acc;
        }
    }
    out.residual_norm = norm2(r);
    return out;
}

namespace {

// Restricted plain multiplicative refit shared by both top-k variants:
// iterate h <- h .* (W'x) ./ (W'W h) on the support columns until relative
// changes fall below conv_tol.
void refit_column(const Matrix& G, const Matrix& B, int col, const std::vector<int>& support,
                  double* hcol, int n, double conv_tol, double floor) {
    const int s = static_cast<int>(support.size());
    std::vector<double> h(s), hn(s), den(s), b(s);
    std::vector<double> gs(static_cast<size_t>(s) * s);
    for (int c = 0; c < s; ++c) {
        h[c] = hcol[support[c]];
        b[c] = B(support[c], col);
        const double* grow = G.row_ptr(support[c]);
        for (int c2 = 0; c2 < s; ++c2) gs[static_cast<size_t>(c) * s + c2] = grow[support[c2]];
    }
    std::vector<int> nz;
    nz.reserve(s);
    const int cap = 200000;
    for (int it = 0; it < cap; ++it) {
        nz.clear();
        for (int c = 0; c < s; ++c)
            if (h[c] != 0.0) nz.push_back(c);
        // den = sum_c2 h_c2 * Gs(c2,:) accumulated row-wise over the packed
        // restricted Gram (bitwise symmetric), visiting c2 in the same
        // ascending order a per-entry dot product would.
        std::fill(den.begin(), den.end(), 0.0);
        for (int c2 : nz)
            kern::ops().axpy(h[c2], gs.data() + static_cast<size_t>(c2) * s, den.data(), s);
        bool changed = false;
        for (int c = 0; c < s; ++c) {
            const double g = den[c] > floor ? den[c] : floor;
            hn[c] = (h[c] * b[c]) / g;
            if (hn[c] != 0.0 && std::fabs(hn[c] - h[c]) > conv_tol * h[c]) changed = true;
        }
        h.swap(hn);
        if (!changed) break;
    }
    for (int i = 0; i < n; ++i) hcol[i] = 0.0;
    for (int c = 0; c < s; ++c) hcol[support[c]] = h[c];
}

Matrix topk_common(const Matrix& Hhat, const Matrix& X, const Matrix& W, double conv_tol,
                   double floor,
                   const std::function<std::vector<int>(const double*, int)>& pick_support) {
    const int n = Hhat.rows();
    const int m = Hhat.cols();
    if (W.cols() != n)
        throw ValidationError("topk_refine: W " + W.shape() + " incompatible with H " +
                              Hhat.shape());
    if (X.rows() != W.rows() || X.cols() != m)
        throw ValidationError("topk_refine: X " + X.shape() + " incompatible with W " + W.shape() +
                              " and H " + Hhat.shape());
    if (!(conv_tol > 0.0) || !(floor > 0.0))
        throw ValidationError("topk_refine: conv_tol and floor must be positive");
    const Matrix G = gemm(W, W, true);
    const Matrix B = gemm(W, X, true);
    Matrix out(n, m);
    std::vector<double> hcol(n);
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i < n; ++i) hcol[i] = Hhat(i, j);
        const std::vector<int> support = pick_support(hcol.data(), n);
        refit_column(G, B, j, support, hcol.data(), n, conv_tol, floor);
        for (int i = 0; i < n; ++i) out(i, j) = hcol[i];
    }
    return out;
}

}  // namespace

Matrix topk_refine(const Matrix& Hhat, int k, const Matrix& X, const Matrix& W, double conv_tol,
                   double floor) {
    if (k < 1) throw ValidationError("topk_refine: k must be at least 1");
    return topk_common(Hhat, X, W, conv_tol, floor,
                       [k](const double* hcol, int n) {
                           std::vector<int> idx(n);
                           std::iota(idx.begin(), idx.end(), 0);
                           // Largest magnitude first; equal values keep the lower index.
                           std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
                               return std::fabs(hcol[a]) > std::fabs(hcol[b]);
                           });
                           const int keep = std::min(k, n);
                           std::vector<int> support(idx.begin(), idx.begin() + keep);
                           std::sort(support.begin(), support.end());
                           return support;
                       });
}

Matrix topk_block_refine(const Matrix& Hhat, int k, const BlockStructure& blocks, const Matrix& X,
                         const Matrix& W, double conv_tol, double floor) {
    if (k < 1) throw ValidationError("topk_block_refine: k must be at least 1");
    if (blocks.n() != Hhat.rows())
        throw ValidationError("topk_block_refine: block structure covers " +
                              std::to_string(blocks.n()) + " rows, H has " +
                              std::to_string(Hhat.rows()));
    if (k > blocks.num_blocks())
        throw ValidationError("topk_block_refine: k=" + std::to_string(k) +
                              " exceeds number of blocks " + std::to_string(blocks.num_blocks()));
    return topk_common(Hhat, X, W, conv_tol, floor,
                       [k, &blocks](const double* hcol, int /*n*/) {
                           const int nb = blocks.num_blocks();
                           std::vector<double> energy(nb, 0.0);
                           for (int b = 0; b < nb; ++b)
                               for (int i : blocks.group(b)) energy[b] += hcol[i] * hcol[i];
                           std::vector<int> order(nb);
                           std::iota(order.begin(), order.end(), 0);
                           std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
                               return energy[a] > energy[b];
                           });
                           std::vector<int> support;
                           for (int c = 0; c < k; ++c)
                               for (int i : blocks.group(order[c])) support.push_back(i);
                           std::sort(support.begin(), support.end());
                           return support;
                       });
}

}  // namespace snnls
