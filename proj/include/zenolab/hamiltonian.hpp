#pragma once

#include "zenolab/qstate.hpp"

namespace zenolab {

// Hermitian operator with hbar = 1. Structured forms are expanded to dense
// matrices on construction.
class Hamiltonian {
public:
    explicit Hamiltonian(ComplexMatrix m);

    /// V(|1><2| + |2><1|) + E|2><2| in the basis (|1>, |2>).
    static Hamiltonian two_level(double v, double e);

    const ComplexMatrix& matrix() const { return m_; }
    Eigen::Index dim() const { return m_.rows(); }

private:
    ComplexMatrix m_;
};

}  // namespace zenolab
