#pragma once

// Scalar per-neuron recurrences for the cells. Parameters are read element by
// element; every product and sum is an explicit loop.

#include <cmath>
#include <vector>

#include <Eigen/Core>

namespace oracle {

using Vec = std::vector<double>;

inline double sig(double a) { return 1.0 / (1.0 + std::exp(-a)); }

/// sum_m W(n, m) x(m)
inline double row_dot(const Eigen::MatrixXd& w, int n, const Vec& x) {
    double s = 0;
    for (int m = 0; m < w.cols(); ++m) s += w(n, m) * x[static_cast<std::size_t>(m)];
    return s;
}

/// h_{n,t} = sig(w_n x_t + u_n h_{n,t-1} + b_n); outside_bias moves b_n past sig.
inline std::vector<Vec> indrnn(const Eigen::MatrixXd& W, const Eigen::MatrixXd& u, const Eigen::MatrixXd& b,
                               const std::vector<Vec>& xs, Vec h, bool outside_bias = false) {
    std::vector<Vec> out;
    for (const auto& x : xs) {
        Vec next(h.size());
        for (int n = 0; n < static_cast<int>(h.size()); ++n) {
            const auto k = static_cast<std::size_t>(n);
            const double a = row_dot(W, n, x) + u(n, 0) * h[k];
            next[k] = outside_bias ? sig(a) + b(n, 0) : sig(a + b(n, 0));
        }
        h = next;
        out.push_back(h);
    }
    return out;
}

struct LstmParams {
    Eigen::MatrixXd Wf, Wi, Wg, Wo, Uf, Ui, Ug, Uo, bf, bi, bg, bo;
};

struct LstmOut {
    std::vector<Vec> h, q;
};

inline LstmOut lstm(const LstmParams& p, const std::vector<Vec>& xs, Vec h, Vec q) {
    LstmOut out;
    const int N = static_cast<int>(h.size());
    for (const auto& x : xs) {
        Vec hn(h.size()), qn(q.size());
        for (int n = 0; n < N; ++n) {
            const auto k = static_cast<std::size_t>(n);
            const double f = sig(row_dot(p.Wf, n, x) + row_dot(p.Uf, n, h) + p.bf(n, 0));
            const double i = sig(row_dot(p.Wi, n, x) + row_dot(p.Ui, n, h) + p.bi(n, 0));
            const double g = std::tanh(row_dot(p.Wg, n, x) + row_dot(p.Ug, n, h) + p.bg(n, 0));
            const double o = sig(row_dot(p.Wo, n, x) + row_dot(p.Uo, n, h) + p.bo(n, 0));
            qn[k] = f * q[k] + i * g;
            hn[k] = o * std::tanh(qn[k]);
        }
        h = hn;
        q = qn;
        out.h.push_back(h);
        out.q.push_back(q);
    }
    return out;
}

struct GruParams {
    Eigen::MatrixXd Wz, Wr, Wh, Uz, Ur, Uh, bz, br, bh;
};

inline std::vector<Vec> gru(const GruParams& p, const std::vector<Vec>& xs, Vec h, bool sigmoid_candidate = false) {
    std::vector<Vec> out;
    const int N = static_cast<int>(h.size());
    for (const auto& x : xs) {
        Vec z(h.size()), r(h.size()), rh(h.size()), hn(h.size());
        for (int n = 0; n < N; ++n) {
            const auto k = static_cast<std::size_t>(n);
            z[k] = sig(row_dot(p.Wz, n, x) + row_dot(p.Uz, n, h) + p.bz(n, 0));
            r[k] = sig(row_dot(p.Wr, n, x) + row_dot(p.Ur, n, h) + p.br(n, 0));
            rh[k] = r[k] * h[k];
        }
        for (int n = 0; n < N; ++n) {
            const auto k = static_cast<std::size_t>(n);
            const double a = row_dot(p.Wh, n, x) + row_dot(p.Uh, n, rh) + p.bh(n, 0);
            const double cand = sigmoid_candidate ? sig(a) : std::tanh(a);
            hn[k] = (1.0 - z[k]) * h[k] + z[k] * cand;
        }
        h = hn;
        out.push_back(h);
    }
    return out;
}

} // namespace oracle
