#pragma once

#include <vector>

#include "vfe/core.hpp"
#include "vfe/jet.hpp"
#include "vfe/operators.hpp"

namespace vfe {

inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// Differentiation policies for the recursion: grid fields use diff, jets
// shift their coefficients.
struct FieldCalculus {
    GridSpec grid;
    int p;
    Field3 d(const Field3& f, int k) const { return diff(f, k, grid, p); }
};

struct JetCalculus {
    Jet3 d(const Jet3& f, int k) const { return derivative(f, k); }
};

// P_(0..n_max)(v). With delta = 0 the delta block is skipped, which makes
// this the Q_(n) recursion on the same code path. Every P_(n) is the n-th
// time derivative expressed through s-derivatives only (Leibniz rule on
// each product of the equation).
template <class Calc, class V>
std::vector<V> p_sequence(const Calc& calc, const V& v, int n_max, double alpha, double delta) {
    std::vector<V> P{v};
    std::vector<V> D1, D2, D3;
    P.reserve(n_max + 1);
    for (int n = 1; n <= n_max; ++n) {
        const int m = n - 1;
        D1.push_back(calc.d(P[m], 1));
        D2.push_back(calc.d(P[m], 2));
        D3.push_back(calc.d(P[m], 3));

        V acc = alpha * D3[m];
        for (int j = 0; j <= m; ++j) acc += binomial(m, j) * cross(P[j], D2[m - j]);
        for (int j = 0; j <= m; ++j) {
            for (int k = 0; k <= m - j; ++k) {
                const int l = m - j - k;
                const double c = binomial(m, j) * binomial(m - j, k);
                acc += (3.0 * alpha * c) * cross(D2[j], cross(P[k], D1[l]));
                acc += (-1.5 * alpha * c) * mul(dot(D1[j], D1[k]), D1[l]);
            }
        }
        if (delta != 0.0) {
            acc += delta * D2[m];
            for (int j = 0; j <= m; ++j) {
                for (int k = 0; k <= m - j; ++k) {
                    const int l = m - j - k;
                    const double c = binomial(m, j) * binomial(m - j, k);
                    acc += (delta * c) * mul(dot(D1[j], D1[k]), P[l]);
                }
            }
        }
        P.push_back(std::move(acc));
    }
    return P;
}

}  // namespace vfe
