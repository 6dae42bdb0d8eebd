#pragma once

#include <algorithm>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "model.hpp"

namespace anomalylab {

enum class Boundary { Periodic, Open };

// Tight-binding Hamiltonian on an Lx x Ly lattice. Basis index of site
// (x, y) with spin s (0 = up, 1 = down) is 2*(x + Lx*y) + s.
struct RealSpaceHamiltonian {
    int lx = 0, ly = 0;
    Boundary boundary = Boundary::Periodic;
    Eigen::SparseMatrix<cplx> h;

    int dim() const { return 2 * lx * ly; }
    int index(int x, int y, int s) const { return 2 * (x + lx * y) + s; }
};

namespace detail {

inline Eigen::Matrix2cd pauli_matrix(PauliChannel c)
{
    Eigen::Matrix2cd m;
    switch (c) {
    case PauliChannel::Sigma1: m << 0.0, 1.0, 1.0, 0.0; break;
    case PauliChannel::Sigma2: m << 0.0, cplx(0, -1), cplx(0, 1), 0.0; break;
    case PauliChannel::Sigma3: m << 1.0, 0.0, 0.0, -1.0; break;
    }
    return m;
}

} // namespace detail

// Hopping blocks T with H(k) = sum_bonds T e^{-i k.a} + h.c. + onsite. The
// spin-flip hoppings are (i t/2) sigma1 along x and -(t/2) sigma2 (x, with
// delta_t) and -(t/2) sigma2 (y); the on-site spin flip is lambda*sigma2.
inline RealSpaceHamiltonian build_real_space(const ModelParams& p, int lx, int ly, double lambda,
                                             Boundary boundary = Boundary::Periodic)
{
    p.validate();
    if (lx < 1 || ly < 1) throw DomainError("real-space lattice needs Lx, Ly >= 1");
    const cplx I(0.0, 1.0);
    const Eigen::Matrix2cd s0 = Eigen::Matrix2cd::Identity();
    const Eigen::Matrix2cd s1 = detail::pauli_matrix(PauliChannel::Sigma1);
    const Eigen::Matrix2cd s2 = detail::pauli_matrix(PauliChannel::Sigma2);
    const Eigen::Matrix2cd s3 = detail::pauli_matrix(PauliChannel::Sigma3);

    const Eigen::Matrix2cd tx = I * (p.t / 2.0) * s1 - (p.t * p.delta_t / 2.0) * s2 + p.tp_x * s0;
    const Eigen::Matrix2cd ty = -(p.t / 2.0) * s2 + p.tp_y * s0
                                + I * (p.pert_eps1 / 2.0) * detail::pauli_matrix(p.pert_channel);
    const Eigen::Matrix2cd onsite = lambda * s2 + p.pert_epsz * s3;

    RealSpaceHamiltonian r;
    r.lx = lx;
    r.ly = ly;
    r.boundary = boundary;
    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(static_cast<size_t>(r.dim()) * 20);

    auto add_block = [&](int to, int from, const Eigen::Matrix2cd& m) {
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                if (m(a, b) != cplx(0.0)) trip.emplace_back(to + a, from + b, m(a, b));
    };
    // c^dag_{to} T c_{from} + h.c.; duplicate bonds (L = 2) accumulate.
    auto add_bond = [&](int to, int from, const Eigen::Matrix2cd& t) {
        add_block(to, from, t);
        add_block(from, to, t.adjoint());
    };

    for (int y = 0; y < ly; ++y) {
        for (int x = 0; x < lx; ++x) {
            const int i = r.index(x, y, 0);
            add_block(i, i, onsite);
            if (x + 1 < lx || (boundary == Boundary::Periodic && lx > 1))
                add_bond(r.index((x + 1) % lx, y, 0), i, tx);
            else if (boundary == Boundary::Periodic && lx == 1)
                add_bond(i, i, tx);
            if (y + 1 < ly || (boundary == Boundary::Periodic && ly > 1))
                add_bond(r.index(x, (y + 1) % ly, 0), i, ty);
            else if (boundary == Boundary::Periodic && ly == 1)
                add_bond(i, i, ty);
        }
    }
    r.h.resize(r.dim(), r.dim());
    r.h.setFromTriplets(trip.begin(), trip.end());
    return r;
}

// All eigenvalues of the (dense) real-space Hamiltonian in ascending order.
inline Eigen::VectorXd real_space_spectrum(const RealSpaceHamiltonian& r)
{
    Eigen::MatrixXcd dense(r.h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

// Bloch eigenvalues on the commensurate k mesh of an Lx x Ly torus, sorted.
inline Eigen::VectorXd bloch_spectrum_on_torus(const ModelParams& p, int lx, int ly, double lambda)
{
    Eigen::VectorXd e(2 * lx * ly);
    int n = 0;
    for (int j = 0; j < ly; ++j)
        for (int i = 0; i < lx; ++i) {
            const double kx = 2.0 * M_PI * i / (lx * p.a_x);
            const double ky = 2.0 * M_PI * j / (ly * p.a_y);
            const BandPair b = band_from_pauli(pauli_vector(p, kx, ky, lambda));
            e(n++) = b.e_minus;
            e(n++) = b.e_plus;
        }
    std::sort(e.data(), e.data() + e.size());
    return e;
}

} // namespace anomalylab
