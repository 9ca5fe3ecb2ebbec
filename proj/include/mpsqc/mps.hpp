#pragma once

#include <string>
#include <vector>

#include "mpsqc/pauli.hpp"
#include "mpsqc/rng.hpp"
#include "mpsqc/statevector.hpp"
#include "mpsqc/tensor.hpp"

namespace mpsqc {

// rank-3 site tensor, axes (left, phys=2, right), row-major
struct Tensor3 {
    std::size_t l = 1, r = 1;
    std::vector<cd> d;

    Tensor3() = default;
    Tensor3(std::size_t l_, std::size_t r_) : l(l_), r(r_), d(l_ * 2 * r_, cd{0.0, 0.0}) {}

    cd& at(std::size_t a, int p, std::size_t b) { return d[(a * 2 + p) * r + b]; }
    const cd& at(std::size_t a, int p, std::size_t b) const { return d[(a * 2 + p) * r + b]; }

    Matrix lp_r() const;                                  // (l*2) x r
    Matrix l_pr() const;                                  // l x (2*r)
    static Tensor3 from_lp_r(const Matrix& m, std::size_t l);
    static Tensor3 from_l_pr(const Matrix& m, std::size_t r);
};

enum class CanonicalForm { none, left, right };

struct MPS {
    std::vector<Tensor3> tensors;
    CanonicalForm form = CanonicalForm::none;

    int n() const { return static_cast<int>(tensors.size()); }
    std::size_t max_bond() const;
};

// rank-4 MPO site tensor, axes (left, phys-out=2, phys-in=2, right), row-major
struct Tensor4 {
    std::size_t l = 1, r = 1;
    std::vector<cd> d;

    Tensor4() = default;
    Tensor4(std::size_t l_, std::size_t r_) : l(l_), r(r_), d(l_ * 4 * r_, cd{0.0, 0.0}) {}

    cd& at(std::size_t a, int po, int pi, std::size_t b) {
        return d[((a * 2 + po) * 2 + pi) * r + b];
    }
    const cd& at(std::size_t a, int po, int pi, std::size_t b) const {
        return d[((a * 2 + po) * 2 + pi) * r + b];
    }
};

struct MPO {
    std::vector<Tensor4> tensors;
    int n() const { return static_cast<int>(tensors.size()); }
};

MPS product_state(int n, const std::vector<double>& angles);
MPS random_mps(int n, std::size_t chi, Rng& rng);

MPS canonicalize(const MPS& s, CanonicalForm form);
StateVector to_dense(const MPS& s);
cd overlap(const MPS& a, const MPS& b);

MPO mpo_from_pauli(const PauliSum& h, int n);
Matrix mpo_dense(const MPO& h);
double expectation(const MPS& s, const MPO& h);

// local merge-apply-resplit on sites (site, site+1); singular values are
// renormalized, canonical form is not tracked
MPS apply_two_site_gate(const MPS& s, const Matrix& g, int site, std::size_t chi_max,
                        double cutoff);

MPS tebd_imaginary(const MPS& s, const std::vector<std::pair<int, Matrix>>& bonds, double dtau,
                   int steps, std::size_t chi_max);

struct DmrgResult {
    MPS state;
    double energy = 0.0;
    std::vector<double> sweep_energies;
};

DmrgResult dmrg_ground_state(const MPO& h, int n, std::size_t chi_max, int sweeps,
                             std::uint64_t seed);

struct TruncateResult {
    MPS state;
    double fidelity = 1.0;  // |<trunc|orig>|^2
};

TruncateResult truncate(const MPS& s, std::size_t chi_max);

// serialization (bit-exact round trip)
std::string mps_to_json(const MPS& s);
MPS mps_from_json(const std::string& text);
void save_mps(const MPS& s, const std::string& path);
MPS load_mps(const std::string& path);

}  // namespace mpsqc
