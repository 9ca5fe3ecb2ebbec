#pragma once

#include <optional>
#include <vector>

#include "mpsqc/circuit.hpp"
#include "mpsqc/kak.hpp"
#include "mpsqc/mps.hpp"
#include "mpsqc/rng.hpp"

namespace mpsqc {

// One two-qubit gate of the compiled diagonal, acting on (q0, q0+1).
struct StairGate {
    int q0 = 0;
    KAKAngles angles;
};

// Exact chi<=2 compilation: n-1 two-qubit gates H_k on pairs (k-1, k), applied
// k = n-1 down to 1, then a single-qubit boundary gate on qubit 0. When
// adjoint is set the compiled circuit implements the inverse map (boundary
// first, then H_1^dag ... H_{n-1}^dag), used by the classifier so that the
// all-zeros probability equals |<psi|input>|^2.
struct CompiledStaircase {
    int n = 0;
    bool adjoint = false;
    std::vector<StairGate> gates;        // in application order
    std::array<double, 3> boundary_zyz{};  // single-qubit gate on qubit 0
    double boundary_phase = 0.0;
};

// Second compiled diagonal for chi<=4 states: gate a_j acts on (j-1, j) for
// j = 2..n-1, applied after the main diagonal layer by layer.
struct AdjacentDiagonal {
    std::vector<StairGate> gates;
    std::vector<double> fidelity_trace;  // fit fidelity per iteration, entry 0 = no fit
};

// completes an isometry (rows x cols, rows >= cols, v^dag v = I) to a square
// unitary whose leading columns equal v; the free columns come from a
// deterministic Gram-Schmidt pass over the canonical basis
Matrix embed_isometry(const Matrix& v);

CompiledStaircase mps_to_staircase(const MPS& s, bool adjoint = false);

AdjacentDiagonal approx_compile_chi4(const MPS& s, int iterations, std::uint64_t seed,
                                     CompiledStaircase* main_out);

enum class OffdiagKind { full_kak, ry_crx };

// Brick-wall circuit of the given depth with the compiled diagonals embedded
// and every other slot at angle zero (identity). Gate blocks are emitted as
// primitive rotations; KAK per-block phases accumulate in Circuit.global_phase
// so the initial state equals the staircase output amplitude for amplitude.
std::pair<Circuit, std::vector<double>> init_brickwall(const CompiledStaircase& diag,
                                                       const AdjacentDiagonal* adjacent, int depth,
                                                       OffdiagKind offdiag);

// gates of the staircase alone, for exactness checks and the classifier
std::pair<Circuit, std::vector<double>> staircase_circuit(const CompiledStaircase& diag);

// dense 4x4 unitary of one compiled staircase gate
Matrix stair_gate_unitary(const StairGate& g);

// end-to-end compilation: canonicalize, pick the exact (chi <= 2) or fitted
// (chi <= 4) route, pad to depth. fidelity is 1 for the exact route, the final
// fit fidelity otherwise. Throws UnsupportedBondDimension above chi 4.
struct CompileResult {
    Circuit circuit;
    std::vector<double> params;
    double fidelity = 1.0;
    bool approximate = false;
};

CompileResult compile_to_circuit(const MPS& s, int depth, OffdiagKind offdiag,
                                 bool adjoint = false, int fit_iterations = 60,
                                 std::uint64_t seed = 0);

}  // namespace mpsqc
