#include "sector.hpp"

#include <bit>

#include "superrad/errors.hpp"

namespace superrad::detail {

ExcitationBasis::ExcitationBasis(std::size_t emitters) : emitters_(emitters) {
    if (emitters == 0 || emitters > 20) {
        throw CapacityError("excitation basis supports 1..20 emitters");
    }
    const Mask states = Mask{1} << emitters;
    masks_.resize(emitters + 1);
    index_.resize(states);
    full_.resize(states);
    for (Mask m = 0; m < states; ++m) {
        auto& manifold = masks_[static_cast<std::size_t>(std::popcount(m))];
        index_[m] = static_cast<std::int32_t>(manifold.size());
        manifold.push_back(m);
        std::size_t full = 0;
        for (std::size_t n = 0; n < emitters; ++n) {
            if (m & (Mask{1} << n)) full |= std::size_t{1} << (emitters - 1 - n);
        }
        full_[m] = full;
    }
    raise_.resize(emitters + 1);
    lower_.resize(emitters + 1);
    for (std::size_t k = 0; k <= emitters; ++k) {
        const auto& manifold = masks_[k];
        raise_[k].assign(manifold.size() * emitters, -1);
        lower_[k].assign(manifold.size() * emitters, -1);
        for (std::size_t i = 0; i < manifold.size(); ++i) {
            for (std::size_t n = 0; n < emitters; ++n) {
                const Mask bit = Mask{1} << n;
                if (manifold[i] & bit) {
                    lower_[k][i * emitters + n] = index_[manifold[i] ^ bit];
                } else {
                    raise_[k][i * emitters + n] = index_[manifold[i] | bit];
                }
            }
        }
    }
}

BlockLayout::BlockLayout(const ExcitationBasis& basis, const std::vector<int>& shifts)
    : manifolds_(static_cast<int>(basis.emitters()) + 1),
      lookup_(static_cast<std::size_t>(manifolds_ * manifolds_), -1) {
    for (int shift : shifts) {
        for (int ket = 0; ket < manifolds_; ++ket) {
            const int bra = ket + shift;
            if (bra < 0 || bra >= manifolds_) continue;
            if (lookup_[static_cast<std::size_t>(ket * manifolds_ + bra)] >= 0) continue;
            Block b{ket, bra, static_cast<Eigen::Index>(basis.manifold_size(static_cast<std::size_t>(ket))),
                    static_cast<Eigen::Index>(basis.manifold_size(static_cast<std::size_t>(bra))), size_};
            lookup_[static_cast<std::size_t>(ket * manifolds_ + bra)] = static_cast<int>(blocks_.size());
            blocks_.push_back(b);
            size_ += b.rows * b.cols;
        }
    }
}

int BlockLayout::find(int ket, int bra) const {
    if (ket < 0 || bra < 0 || ket >= manifolds_ || bra >= manifolds_) return -1;
    return lookup_[static_cast<std::size_t>(ket * manifolds_ + bra)];
}

VectorXc BlockLayout::pack(const ExcitationBasis& basis, const MatrixXc& full) const {
    VectorXc x(size_);
    for (const auto& b : blocks_) {
        BlockMap v = view(x, b);
        for (Eigen::Index j = 0; j < b.cols; ++j) {
            const auto col = basis.full_index(basis.mask(static_cast<std::size_t>(b.bra), static_cast<std::size_t>(j)));
            for (Eigen::Index i = 0; i < b.rows; ++i) {
                const auto row =
                    basis.full_index(basis.mask(static_cast<std::size_t>(b.ket), static_cast<std::size_t>(i)));
                v(i, j) = full(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
            }
        }
    }
    return x;
}

void BlockLayout::unpack(const ExcitationBasis& basis, const VectorXc& x, MatrixXc& full) const {
    for (const auto& b : blocks_) {
        const ConstBlockMap v = view(x, b);
        for (Eigen::Index j = 0; j < b.cols; ++j) {
            const auto col = basis.full_index(basis.mask(static_cast<std::size_t>(b.bra), static_cast<std::size_t>(j)));
            for (Eigen::Index i = 0; i < b.rows; ++i) {
                const auto row =
                    basis.full_index(basis.mask(static_cast<std::size_t>(b.ket), static_cast<std::size_t>(i)));
                full(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = v(i, j);
            }
        }
    }
}

LiouvillianCore::LiouvillianCore(const CouplingMatrices& c, const PumpPattern& p)
    : basis_(c.size()), gamma_(c.gamma) {
    const std::size_t n = c.size();
    if (p.size() != n) {
        throw InvalidInput("pump pattern and coupling matrices have different emitter counts");
    }
    rates_ = Eigen::Map<const Eigen::VectorXd>(p.rates().data(), static_cast<Eigen::Index>(n));
    pump_ = rates_.asDiagonal();

    k_.resize(n + 1);
    k_adj_.resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        const auto d = static_cast<Eigen::Index>(basis_.manifold_size(k));
        MatrixXc gen = MatrixXc::Zero(d, d);
        for (Eigen::Index j = 0; j < d; ++j) {
            const Mask mj = basis_.mask(k, static_cast<std::size_t>(j));
            double loss = 0.0;
            for (std::size_t a = 0; a < n; ++a) {
                loss += (mj & (Mask{1} << a)) ? c.gamma(a, a) : rates_[static_cast<Eigen::Index>(a)];
            }
            gen(j, j) = -0.5 * loss;
            // s+_a s-_b |j> for b excited, a ground, a != b.
            for (std::size_t b = 0; b < n; ++b) {
                if (!(mj & (Mask{1} << b))) continue;
                for (std::size_t a = 0; a < n; ++a) {
                    if (a == b || (mj & (Mask{1} << a))) continue;
                    const Mask target = (mj ^ (Mask{1} << b)) | (Mask{1} << a);
                    const auto i = basis_.index_of(target);
                    gen(i, j) += cplx(-0.5 * c.gamma(a, b), -c.omega(a, b));
                }
            }
        }
        k_adj_[k] = gen.adjoint();
        k_[k] = std::move(gen);
    }
}

void LiouvillianCore::apply_diagonal(int ket, int bra, const ConstBlockMap& x, BlockMap& y) const {
    y.noalias() = k_[static_cast<std::size_t>(ket)] * x;
    y.noalias() += x * k_adj_[static_cast<std::size_t>(bra)];
}

void LiouvillianCore::add_lowering_jump(int ket, int bra, const Eigen::MatrixXd& coef, bool diagonal,
                                        const ConstBlockMap& x, BlockMap& y) const {
    const std::size_t n = emitters();
    const auto uk = static_cast<std::size_t>(ket);
    const auto ub = static_cast<std::size_t>(bra);
    for (Eigen::Index j = 0; j < y.cols(); ++j) {
        for (std::size_t m = 0; m < n; ++m) {
            const auto jp = basis_.raised(ub, static_cast<std::size_t>(j), m);
            if (jp < 0) continue;
            const auto xcol = x.col(jp);
            auto ycol = y.col(j);
            if (diagonal) {
                const double w = coef(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
                if (w == 0.0) continue;
                for (Eigen::Index i = 0; i < y.rows(); ++i) {
                    const auto ip = basis_.raised(uk, static_cast<std::size_t>(i), m);
                    if (ip >= 0) ycol(i) += w * xcol(ip);
                }
            } else {
                const auto wcol = coef.col(static_cast<Eigen::Index>(m));
                for (Eigen::Index i = 0; i < y.rows(); ++i) {
                    cplx acc = 0.0;
                    for (std::size_t a = 0; a < n; ++a) {
                        const auto ip = basis_.raised(uk, static_cast<std::size_t>(i), a);
                        if (ip >= 0) acc += wcol(static_cast<Eigen::Index>(a)) * xcol(ip);
                    }
                    ycol(i) += acc;
                }
            }
        }
    }
}

void LiouvillianCore::add_raising_jump(int ket, int bra, const Eigen::MatrixXd& coef, bool diagonal,
                                       const ConstBlockMap& x, BlockMap& y) const {
    const std::size_t n = emitters();
    const auto uk = static_cast<std::size_t>(ket);
    const auto ub = static_cast<std::size_t>(bra);
    for (Eigen::Index j = 0; j < y.cols(); ++j) {
        for (std::size_t m = 0; m < n; ++m) {
            const auto jp = basis_.lowered(ub, static_cast<std::size_t>(j), m);
            if (jp < 0) continue;
            const auto xcol = x.col(jp);
            auto ycol = y.col(j);
            if (diagonal) {
                const double w = coef(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
                if (w == 0.0) continue;
                for (Eigen::Index i = 0; i < y.rows(); ++i) {
                    const auto ip = basis_.lowered(uk, static_cast<std::size_t>(i), m);
                    if (ip >= 0) ycol(i) += w * xcol(ip);
                }
            } else {
                const auto wcol = coef.col(static_cast<Eigen::Index>(m));
                for (Eigen::Index i = 0; i < y.rows(); ++i) {
                    cplx acc = 0.0;
                    for (std::size_t a = 0; a < n; ++a) {
                        const auto ip = basis_.lowered(uk, static_cast<std::size_t>(i), a);
                        if (ip >= 0) acc += wcol(static_cast<Eigen::Index>(a)) * xcol(ip);
                    }
                    ycol(i) += acc;
                }
            }
        }
    }
}

void LiouvillianCore::apply(const BlockLayout& layout, const VectorXc& x, VectorXc& y) const {
    y.resize(layout.size());
    for (const auto& b : layout.blocks()) {
        BlockMap out = layout.view(y, b);
        apply_diagonal(b.ket, b.bra, layout.view(x, b), out);
        if (const int up = layout.find(b.ket + 1, b.bra + 1); up >= 0) {
            add_lowering_jump(b.ket, b.bra, gamma_, false, layout.view(x, layout.blocks()[static_cast<std::size_t>(up)]),
                              out);
        }
        if (const int down = layout.find(b.ket - 1, b.bra - 1); down >= 0) {
            add_raising_jump(b.ket, b.bra, pump_, true,
                             layout.view(x, layout.blocks()[static_cast<std::size_t>(down)]), out);
        }
    }
}

void LiouvillianCore::apply_adjoint(const BlockLayout& layout, const VectorXc& x, VectorXc& y) const {
    y.resize(layout.size());
    for (const auto& b : layout.blocks()) {
        BlockMap out = layout.view(y, b);
        const ConstBlockMap in = layout.view(x, b);
        out.noalias() = k_adj_[static_cast<std::size_t>(b.ket)] * in;
        out.noalias() += in * k_[static_cast<std::size_t>(b.bra)];
        if (const int up = layout.find(b.ket + 1, b.bra + 1); up >= 0) {
            add_lowering_jump(b.ket, b.bra, pump_, true, layout.view(x, layout.blocks()[static_cast<std::size_t>(up)]),
                              out);
        }
        if (const int down = layout.find(b.ket - 1, b.bra - 1); down >= 0) {
            add_raising_jump(b.ket, b.bra, gamma_, false,
                             layout.view(x, layout.blocks()[static_cast<std::size_t>(down)]), out);
        }
    }
}

SylvesterSolver::SylvesterSolver(const LiouvillianCore& core) {
    const std::size_t manifolds = core.emitters() + 1;
    unitary_.resize(manifolds);
    triangular_.resize(manifolds);
    for (std::size_t k = 0; k < manifolds; ++k) {
        Eigen::ComplexSchur<MatrixXc> schur(core.generator(k));
        if (schur.info() != Eigen::Success) {
            throw SolverFailure("Schur decomposition of a manifold generator failed");
        }
        unitary_[k] = schur.matrixU();
        triangular_[k] = schur.matrixT();
    }
}

void SylvesterSolver::solve(int ket, int bra, const ConstBlockMap& rhs, BlockMap& out) const {
    const auto& ua = unitary_[static_cast<std::size_t>(ket)];
    const auto& ta = triangular_[static_cast<std::size_t>(ket)];
    const auto& ub = unitary_[static_cast<std::size_t>(bra)];
    const auto& tb = triangular_[static_cast<std::size_t>(bra)];
    const Eigen::Index rows = rhs.rows();
    const Eigen::Index cols = rhs.cols();

    MatrixXc y = ua.adjoint() * rhs * ub;
    // T_a Y + Y T_b^H = C', T_b^H lower triangular: sweep columns right to left.
    for (Eigen::Index j = cols - 1; j >= 0; --j) {
        const Eigen::Index tail = cols - 1 - j;
        if (tail > 0) {
            y.col(j).noalias() -= y.rightCols(tail) * tb.row(j).tail(tail).adjoint();
        }
        const cplx shift = std::conj(tb(j, j));
        auto col = y.col(j);
        for (Eigen::Index i = rows - 1; i >= 0; --i) {
            cplx s = col(i);
            const Eigen::Index len = rows - 1 - i;
            if (len > 0) s -= (ta.row(i).tail(len).transpose().cwiseProduct(col.tail(len))).sum();
            col(i) = s / (ta(i, i) + shift);
        }
    }
    out.noalias() = ua * y * ub.adjoint();
}

} // namespace superrad::detail
