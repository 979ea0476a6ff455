#pragma once

// Excitation-number block structure of the exact engine.
//
// Every term of the master equation moves ket and bra excitation numbers
// together (H and the anticommutators keep them, decay jumps lower both by one,
// pump jumps raise both by one), so an operator X is stored as blocks
// X_{k,k'} between the k- and k'-excitation manifolds and the difference
// k' - k is conserved. Blocks are dense column-major matrices packed into a
// single vector so generic integrators and Krylov solvers can act on them.

#include <cstdint>
#include <memory>
#include <vector>

#include "superrad/coupling.hpp"
#include "superrad/geometry.hpp"
#include "superrad/types.hpp"

namespace superrad::detail {

using Mask = std::uint32_t;
using VectorXc = Eigen::VectorXcd;
using MatrixXc = Eigen::MatrixXcd;
using BlockMap = Eigen::Map<MatrixXc>;
using ConstBlockMap = Eigen::Map<const MatrixXc>;

class ExcitationBasis {
public:
    explicit ExcitationBasis(std::size_t emitters);

    std::size_t emitters() const noexcept { return emitters_; }
    std::size_t manifold_size(std::size_t k) const { return masks_[k].size(); }
    Mask mask(std::size_t k, std::size_t i) const { return masks_[k][i]; }
    std::int32_t index_of(Mask m) const { return index_[m]; }

    /// Row/column of a basis state in the full 2^N matrix. Emitter n occupies
    /// tensor slot n (most significant first), with |g> = 0 and |e> = 1.
    std::size_t full_index(Mask m) const { return full_[m]; }

    /// Index in manifold k+1 of state i with emitter n excited, or -1.
    std::int32_t raised(std::size_t k, std::size_t i, std::size_t n) const {
        return raise_[k][i * emitters_ + n];
    }
    /// Index in manifold k-1 of state i with emitter n de-excited, or -1.
    std::int32_t lowered(std::size_t k, std::size_t i, std::size_t n) const {
        return lower_[k][i * emitters_ + n];
    }

private:
    std::size_t emitters_;
    std::vector<std::vector<Mask>> masks_;
    std::vector<std::int32_t> index_;
    std::vector<std::size_t> full_;
    std::vector<std::vector<std::int32_t>> raise_;
    std::vector<std::vector<std::int32_t>> lower_;
};

struct Block {
    int ket;
    int bra;
    Eigen::Index rows;
    Eigen::Index cols;
    Eigen::Index offset;
};

class BlockLayout {
public:
    /// All blocks with bra - ket equal to one of `shifts`.
    BlockLayout(const ExcitationBasis& basis, const std::vector<int>& shifts);

    const std::vector<Block>& blocks() const noexcept { return blocks_; }
    Eigen::Index size() const noexcept { return size_; }
    /// Position in blocks() of (ket, bra), or -1 if not part of the layout.
    int find(int ket, int bra) const;

    BlockMap view(VectorXc& x, const Block& b) const { return BlockMap(x.data() + b.offset, b.rows, b.cols); }
    ConstBlockMap view(const VectorXc& x, const Block& b) const {
        return ConstBlockMap(x.data() + b.offset, b.rows, b.cols);
    }

    VectorXc pack(const ExcitationBasis& basis, const MatrixXc& full) const;
    /// Scatter into a full matrix (entries outside the layout are left untouched).
    void unpack(const ExcitationBasis& basis, const VectorXc& x, MatrixXc& full) const;

private:
    int manifolds_;
    std::vector<Block> blocks_;
    std::vector<int> lookup_;
    Eigen::Index size_ = 0;
};

/// Block form of L[rho] = -i[H, rho] + L_decay[rho] + L_pump[rho].
///
/// Per block: K_k X + X K_k'^H + sum_nm Gamma_nm s-_n X s+_m + sum_n R_n s+_n X s-_n
/// with the non-Hermitian generator K = -iH - (1/2) sum Gamma_nm s+_n s-_m
/// - (1/2) sum R_n s-_n s+_n restricted to each manifold.
class LiouvillianCore {
public:
    LiouvillianCore(const CouplingMatrices& c, const PumpPattern& p);

    const ExcitationBasis& basis() const noexcept { return basis_; }
    std::size_t emitters() const noexcept { return basis_.emitters(); }
    const Eigen::MatrixXd& gamma() const noexcept { return gamma_; }
    const Eigen::VectorXd& rates() const noexcept { return rates_; }
    const MatrixXc& generator(std::size_t k) const { return k_[k]; }

    void apply(const BlockLayout& layout, const VectorXc& x, VectorXc& y) const;
    void apply_adjoint(const BlockLayout& layout, const VectorXc& x, VectorXc& y) const;

    /// Diagonal part of one block: K_ket X + X K_bra^H.
    void apply_diagonal(int ket, int bra, const ConstBlockMap& x, BlockMap& y) const;
    /// y(i,j) += sum_{n,m} coef(n,m) x(i+n, j+m); x lives one manifold up.
    void add_lowering_jump(int ket, int bra, const Eigen::MatrixXd& coef, bool diagonal,
                           const ConstBlockMap& x, BlockMap& y) const;
    /// y(i,j) += sum_{n,m} coef(n,m) x(i-n, j-m); x lives one manifold down.
    void add_raising_jump(int ket, int bra, const Eigen::MatrixXd& coef, bool diagonal,
                          const ConstBlockMap& x, BlockMap& y) const;

    const Eigen::MatrixXd& pump_matrix() const noexcept { return pump_; }

private:
    ExcitationBasis basis_;
    Eigen::MatrixXd gamma_;
    Eigen::VectorXd rates_;
    Eigen::MatrixXd pump_; ///< diag(R)
    std::vector<MatrixXc> k_;
    std::vector<MatrixXc> k_adj_;
};

/// Solves K_a X + X K_b^H = C for the manifold generators (Bartels-Stewart on
/// complex Schur forms).
class SylvesterSolver {
public:
    explicit SylvesterSolver(const LiouvillianCore& core);

    void solve(int ket, int bra, const ConstBlockMap& rhs, BlockMap& out) const;

private:
    std::vector<MatrixXc> unitary_;
    std::vector<MatrixXc> triangular_;
};

} // namespace superrad::detail
