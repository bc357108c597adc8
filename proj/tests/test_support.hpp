#pragma once

#include <algorithm>
#include <complex>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include <gtest/gtest.h>

#include "qrouter/qstate.hpp"

namespace qrouter::testing {

inline std::vector<Amplitude> random_vector(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> g;
    std::vector<Amplitude> v(n);
    double norm = 0.0;
    for (auto& a : v) {
        a = {g(rng), g(rng)};
        norm += std::norm(a);
    }
    for (auto& a : v) a /= std::sqrt(norm);
    return v;
}

inline JonesVector random_jones(std::mt19937_64& rng) {
    auto v = random_vector(rng, 2);
    return JonesVector::normalized(v[0], v[1]);
}

/// Haar-ish random unitary via Gram-Schmidt on Gaussian columns.
inline SquareOperator random_unitary(std::mt19937_64& rng, std::size_t n) {
    std::vector<std::vector<Amplitude>> cols;
    while (cols.size() < n) {
        auto c = random_vector(rng, n);
        for (const auto& q : cols) {
            Amplitude d = 0.0;
            for (std::size_t i = 0; i < n; ++i) d += std::conj(q[i]) * c[i];
            for (std::size_t i = 0; i < n; ++i) c[i] -= d * q[i];
        }
        double nn = 0.0;
        for (auto a : c) nn += std::norm(a);
        if (nn < 1e-8) continue;
        for (auto& a : c) a /= std::sqrt(nn);
        cols.push_back(c);
    }
    std::vector<Amplitude> e(n * n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) e[r * n + c] = cols[c][r];
    return {n, std::move(e), OperatorKind::kUnitary};
}

/// Independent reference for apply(): build the full operator by looping over
/// every pair of global indices and matching digits.
inline std::vector<Amplitude> reference_apply(const RegisterState& s, const SquareOperator& op,
                                              const std::vector<std::size_t>& targets) {
    const auto& dims = s.dims();
    auto digits = [&](std::size_t idx) {
        std::vector<std::size_t> d(dims.size());
        for (std::size_t k = dims.size(); k-- > 0;) {
            d[k] = idx % dims[k];
            idx /= dims[k];
        }
        return d;
    };
    auto local = [&](const std::vector<std::size_t>& d) {
        std::size_t l = 0;
        for (std::size_t t : targets) l = l * dims[t] + d[t];
        return l;
    };
    std::vector<Amplitude> out(s.size());
    for (std::size_t r = 0; r < s.size(); ++r) {
        auto dr = digits(r);
        for (std::size_t c = 0; c < s.size(); ++c) {
            auto dc = digits(c);
            bool spectators_match = true;
            for (std::size_t k = 0; k < dims.size(); ++k) {
                bool is_target = std::find(targets.begin(), targets.end(), k) != targets.end();
                if (!is_target && dr[k] != dc[k]) spectators_match = false;
            }
            if (spectators_match) out[r] += op(local(dr), local(dc)) * s[c];
        }
    }
    return out;
}

inline double max_diff(std::span<const Amplitude> a, std::span<const Amplitude> b) {
    EXPECT_EQ(a.size(), b.size());
    double w = 0.0;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) w = std::max(w, std::abs(a[i] - b[i]));
    return w;
}

}  // namespace qrouter::testing
