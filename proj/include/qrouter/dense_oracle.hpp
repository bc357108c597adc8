#pragma once

// Brute-force reference evolution: every element is expanded to a full
// register matrix via explicit Kronecker products and evolved by plain
// matrix-vector multiplication. Shares no index arithmetic with the
// structured simulator in circuit.hpp or with qrouter::apply.

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "qrouter/circuit.hpp"

namespace qrouter::dense {

struct Matrix {
    std::size_t n = 0;
    std::vector<Amplitude> a;  // row-major

    Amplitude& at(std::size_t r, std::size_t c) { return a[r * n + c]; }
    Amplitude at(std::size_t r, std::size_t c) const { return a[r * n + c]; }
};

inline Matrix zeros(std::size_t n) { return {n, std::vector<Amplitude>(n * n)}; }

inline Matrix identity(std::size_t n) {
    Matrix m = zeros(n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

inline Matrix from_operator(const SquareOperator& op) {
    return {op.dim(), std::vector<Amplitude>(op.entries().begin(), op.entries().end())};
}

inline Matrix kron(const Matrix& x, const Matrix& y) {
    Matrix m = zeros(x.n * y.n);
    for (std::size_t i = 0; i < x.n; ++i)
        for (std::size_t j = 0; j < x.n; ++j)
            for (std::size_t k = 0; k < y.n; ++k)
                for (std::size_t l = 0; l < y.n; ++l) m.at(i * y.n + k, j * y.n + l) = x.at(i, j) * y.at(k, l);
    return m;
}

inline Matrix operator*(const Matrix& x, const Matrix& y) {
    Matrix m = zeros(x.n);
    for (std::size_t i = 0; i < x.n; ++i)
        for (std::size_t k = 0; k < x.n; ++k)
            for (std::size_t j = 0; j < x.n; ++j) m.at(i, j) += x.at(i, k) * y.at(k, j);
    return m;
}

inline Matrix operator+(Matrix x, const Matrix& y) {
    for (std::size_t i = 0; i < x.a.size(); ++i) x.a[i] += y.a[i];
    return x;
}

inline std::vector<Amplitude> operator*(const Matrix& m, std::span<const Amplitude> v) {
    std::vector<Amplitude> out(m.n);
    for (std::size_t i = 0; i < m.n; ++i)
        for (std::size_t j = 0; j < m.n; ++j) out[i] += m.at(i, j) * v[j];
    return out;
}

inline Matrix transpose(const Matrix& m) {
    Matrix t = zeros(m.n);
    for (std::size_t i = 0; i < m.n; ++i)
        for (std::size_t j = 0; j < m.n; ++j) t.at(j, i) = m.at(i, j);
    return t;
}

/// Elementary |r><c| of size n.
inline Matrix unit(std::size_t n, std::size_t r, std::size_t c, Amplitude value = 1.0) {
    Matrix m = zeros(n);
    m.at(r, c) = value;
    return m;
}

/// Permutation matrix taking a register with subsystem dims `dims` to one
/// whose subsystems are reordered as `order` (new position k holds old
/// subsystem order[k]). Built by enumerating basis states.
inline Matrix subsystem_permutation(const std::vector<std::size_t>& dims, const std::vector<std::size_t>& order) {
    std::size_t total = 1;
    for (std::size_t d : dims) total *= d;
    Matrix p = zeros(total);
    std::vector<std::size_t> digits(dims.size());
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rest = idx;
        for (std::size_t k = dims.size(); k-- > 0;) {
            digits[k] = rest % dims[k];
            rest /= dims[k];
        }
        std::size_t target = 0;
        for (std::size_t k = 0; k < order.size(); ++k) target = target * dims[order[k]] + digits[order[k]];
        p.at(target, idx) = 1.0;
    }
    return p;
}

/// Full-register matrix of `op` acting on `targets`: permute targets to the
/// front, take op (x) I, permute back.
inline Matrix embed(const SquareOperator& op, const std::vector<std::size_t>& targets,
                    const std::vector<std::size_t>& dims) {
    std::vector<std::size_t> order = targets;
    std::size_t rest_dim = 1;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (std::find(targets.begin(), targets.end(), i) == targets.end()) {
            order.push_back(i);
            rest_dim *= dims[i];
        }
    }
    Matrix p = subsystem_permutation(dims, order);
    return transpose(p) * kron(from_operator(op), identity(rest_dim)) * p;
}

/// Full {paths, 2} matrix of one circuit element (checkpoints are identity).
inline Matrix element_matrix(const Element& e, std::size_t paths) {
    const Matrix i2 = identity(2);
    auto on_path = [&](std::size_t path, const Matrix& local) {
        Matrix others = identity(paths);
        others.at(path, path) = 0.0;
        return kron(unit(paths, path, path), local) + kron(others, i2);
    };
    if (const auto* h = std::get_if<HwpElement>(&e)) {
        return on_path(h->path, from_operator(hwp_matrix(h->angle)));
    }
    if (const auto* ph = std::get_if<PhaseElement>(&e)) {
        Matrix local = i2;
        local.at(0, 0) = local.at(1, 1) = std::polar(1.0, ph->phi);
        return on_path(ph->path, local);
    }
    if (const auto* pbs = std::get_if<PbsElement>(&e)) {
        const auto& w = pbs->wiring;
        Amplitude ra = pbs->reflection == ReflectionPhase::kReal ? Amplitude{1.0} : kI;
        Amplitude rb = pbs->reflection == ReflectionPhase::kReal ? Amplitude{-1.0} : kI;
        // Path maps for each polarization; untouched paths pass straight through.
        Matrix route_h = zeros(paths);
        Matrix route_v = zeros(paths);
        for (std::size_t p = 0; p < paths; ++p) {
            if (p != w.in_a && p != w.in_b) {
                route_h.at(p, p) = 1.0;
                route_v.at(p, p) = 1.0;
            }
        }
        route_h.at(w.out_a, w.in_a) = 1.0;
        route_h.at(w.out_b, w.in_b) = 1.0;
        route_v.at(w.out_b, w.in_a) = ra;
        route_v.at(w.out_a, w.in_b) = rb;
        return kron(route_h, unit(2, 0, 0)) + kron(route_v, unit(2, 1, 1));
    }
    if (std::holds_alternative<PpgElement>(e)) {
        throw std::invalid_argument("element_matrix: PPG has two Kraus matrices, use ppg_kraus");
    }
    return identity(2 * paths);
}

/// Dense evolution of every heralding branch. Branch order matches simulate().
inline std::vector<std::vector<Amplitude>> evolve_branches(const CircuitSpec& circuit,
                                                           const RegisterState& input) {
    std::vector<std::vector<Amplitude>> branches{
        std::vector<Amplitude>(input.amps().begin(), input.amps().end())};
    for (const auto& e : circuit.elements) {
        if (const auto* ppg = std::get_if<PpgElement>(&e)) {
            KrausPair k = ppg_kraus(ppg->gate, circuit.paths);
            Matrix ks = from_operator(k.success);
            Matrix kf = from_operator(k.failure);
            std::vector<std::vector<Amplitude>> next;
            for (const auto& b : branches) {
                next.push_back(ks * std::span<const Amplitude>(b));
                next.push_back(kf * std::span<const Amplitude>(b));
            }
            branches = std::move(next);
        } else {
            Matrix m = element_matrix(e, circuit.paths);
            for (auto& b : branches) b = m * std::span<const Amplitude>(b);
        }
    }
    return branches;
}

}  // namespace qrouter::dense
