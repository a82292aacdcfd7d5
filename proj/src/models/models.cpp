#include "qgtlab/models.hpp"

#include "qgtlab/errors.hpp"

#include <algorithm>
#include <cmath>

namespace qgtlab {

ParamHamiltonian::ParamHamiltonian(std::string name, std::size_t dim, std::vector<std::string> paramNames,
                                   Eval eval)
    : name_(std::move(name)), dim_(dim), paramNames_(std::move(paramNames)), eval_(std::move(eval)) {
    auto sorted = paramNames_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw InvalidArgument("duplicate parameter name in model " + name_);
    }
}

ParamHamiltonian& ParamHamiltonian::with_partial(const std::string& param, Eval d) {
    if (!has_param(param)) throw UnknownParam(param);
    partials_[param] = std::move(d);
    return *this;
}

bool ParamHamiltonian::has_param(const std::string& p) const {
    return std::find(paramNames_.begin(), paramNames_.end(), p) != paramNames_.end();
}

void ParamHamiltonian::check_point(const ParamPoint& pt) const {
    for (const auto& n : paramNames_) {
        const auto it = pt.find(n);
        if (it == pt.end()) throw InvalidArgument("missing parameter '" + n + "' for model " + name_);
        if (!std::isfinite(it->second)) throw InvalidArgument("non-finite parameter '" + n + "'");
    }
}

ComplexMat ParamHamiltonian::operator()(const ParamPoint& pt) const {
    check_point(pt);
    return eval_(pt);
}

ComplexMat ParamHamiltonian::analytic_partial(const ParamPoint& pt, const std::string& param) const {
    const auto it = partials_.find(param);
    if (it == partials_.end()) throw UnknownParam("no analytic partial for '" + param + "'");
    check_point(pt);
    return it->second(pt);
}

namespace {

ComplexMat fd4(const ParamHamiltonian& model, const ParamPoint& pt, const std::string& mu, double h) {
    auto at = [&](double offset) {
        ParamPoint q = pt;
        q[mu] += offset;
        return model(q);
    };
    ComplexMat d = at(-2.0 * h) - at(2.0 * h);
    d += 8.0 * (at(h) - at(-h));
    d *= 1.0 / (12.0 * h);
    return d;
}

}  // namespace

ComplexMat finite_difference_partial(const ParamHamiltonian& model, const ParamPoint& pt, const std::string& mu,
                                     double h) {
    if (!model.has_param(mu)) throw UnknownParam(mu + " (model " + model.name() + ")");
    return fd4(model, pt, mu, h);
}

ComplexMat partial(const ParamHamiltonian& model, const ParamPoint& pt, const std::string& mu) {
    if (!model.has_param(mu)) throw UnknownParam(mu + " (model " + model.name() + ")");
    if (model.has_analytic_partial(mu)) return model.analytic_partial(pt, mu);

    constexpr double h = 1e-4;
    ComplexMat d = fd4(model, pt, mu, h);
    const ComplexMat half = fd4(model, pt, mu, 0.5 * h);
    const double scale = std::max(1.0, max_norm(model(pt)));
    if (max_norm(d - half) > 1e-7 * scale) {
        throw NumericalFailure("finite-difference partial in '" + mu + "' failed the h/2 check");
    }
    return d;
}

// ---------------------------------------------------------------------------

namespace {

ComplexMat bhz_matrix(double bx, double by, double bz, double bg) {
    const cplx i{0.0, 1.0};
    return ComplexMat(4, {
        bz,          0.0,         bx - i * by, bg,
        0.0,         bz,          bg,          -bx - i * by,
        bx + i * by, bg,          -bz,         0.0,
        bg,          -bx + i * by, 0.0,        -bz,
    });
}

double coord(const ParamPoint& pt, const char* name) { return pt.at(name); }

}  // namespace

BField bhz_fields(double kx, double ky, const BHZParams& p) {
    return {p.Hxy * std::sin(kx), p.Hxy * std::sin(ky), p.M - 2.0 * p.Hz * (2.0 - std::cos(kx) - std::cos(ky))};
}

ComplexMat bhz_hamiltonian(double kx, double ky, const BHZParams& p) {
    const BField b = bhz_fields(kx, ky, p);
    return bhz_matrix(b.x, b.y, b.z, p.Bg);
}

ParamHamiltonian bhz_model(const BHZParams& p) {
    ParamHamiltonian m("bhz", 4, {"kx", "ky"},
                       [p](const ParamPoint& pt) { return bhz_hamiltonian(coord(pt, "kx"), coord(pt, "ky"), p); });
    m.with_partial("kx", [p](const ParamPoint& pt) {
        const double kx = coord(pt, "kx");
        return bhz_matrix(p.Hxy * std::cos(kx), 0.0, -2.0 * p.Hz * std::sin(kx), 0.0);
    });
    m.with_partial("ky", [p](const ParamPoint& pt) {
        const double ky = coord(pt, "ky");
        return bhz_matrix(0.0, p.Hxy * std::cos(ky), -2.0 * p.Hz * std::sin(ky), 0.0);
    });
    return m;
}

// ---------------------------------------------------------------------------

namespace {

// Diamond-structured matrix from its diagonal weight d and the two couplings
// c1 = <0010|.|0001>, c2 = <1000|.|0100>.
ComplexMat diamond_matrix(double d, cplx c1, cplx c2) {
    ComplexMat h(4);
    h(0, 0) = d;
    h(1, 1) = -d;
    h(2, 2) = d;
    h(3, 3) = -d;
    h(1, 0) = c1;
    h(0, 1) = std::conj(c1);
    h(3, 2) = c2;
    h(2, 3) = std::conj(c2);
    return h;
}

}  // namespace

ComplexMat diamond_hamiltonian(const DiamondParams& p) {
    if (!(p.Omega0 > 0.0) || !std::isfinite(p.Omega0)) throw InvalidArgument("Omega0 must be positive");
    const double s = std::sin(p.theta), c = std::cos(p.theta);
    return diamond_matrix(p.Omega0 * c, p.Omega0 * s * std::polar(1.0, p.phi),
                          -p.Omega0 * s * std::polar(1.0, -p.phi));
}

ParamHamiltonian diamond_model(double omega0) {
    if (!(omega0 > 0.0)) throw InvalidArgument("Omega0 must be positive");
    ParamHamiltonian m("diamond", 4, {"theta", "phi"}, [omega0](const ParamPoint& pt) {
        return diamond_hamiltonian({omega0, coord(pt, "theta"), coord(pt, "phi")});
    });
    m.with_partial("theta", [omega0](const ParamPoint& pt) {
        const double th = coord(pt, "theta"), ph = coord(pt, "phi");
        return diamond_matrix(-omega0 * std::sin(th), omega0 * std::cos(th) * std::polar(1.0, ph),
                              -omega0 * std::cos(th) * std::polar(1.0, -ph));
    });
    m.with_partial("phi", [omega0](const ParamPoint& pt) {
        const double th = coord(pt, "theta"), ph = coord(pt, "phi");
        const cplx i{0.0, 1.0};
        return diamond_matrix(0.0, i * omega0 * std::sin(th) * std::polar(1.0, ph),
                              i * omega0 * std::sin(th) * std::polar(1.0, -ph));
    });
    return m;
}

// ---------------------------------------------------------------------------

BlockPair ms_blocks(const ComplexMat& h, const Pairing& pairing) {
    if (h.dim() != 4) throw InvalidArgument("ms_blocks expects a 4x4 matrix");
    std::array<bool, 4> seen{};
    for (auto i : {pairing.first[0], pairing.first[1], pairing.second[0], pairing.second[1]}) {
        if (i >= 4 || seen[i]) throw InvalidArgument("pairing must partition {0,1,2,3}");
        seen[i] = true;
    }
    const double tol = 1e-10 * std::max(inf_norm(h), 1e-300);
    for (auto a : pairing.first)
        for (auto b : pairing.second)
            if (std::abs(h(a, b)) > tol || std::abs(h(b, a)) > tol) {
                throw NotBlockDecomposable("coupling between index pairs is non-zero");
            }

    auto sub = [&](const std::array<std::size_t, 2>& idx) {
        ComplexMat b(2);
        for (std::size_t r = 0; r < 2; ++r)
            for (std::size_t c = 0; c < 2; ++c) b(r, c) = h(idx[r], idx[c]);
        return b;
    };
    return {sub(pairing.first), sub(pairing.second)};
}

ComplexMat assemble_blocks(const BlockPair& blocks, const Pairing& pairing) {
    ComplexMat h(4);
    for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < 2; ++c) {
            h(pairing.first[r], pairing.first[c]) = blocks.block1(r, c);
            h(pairing.second[r], pairing.second[c]) = blocks.block2(r, c);
        }
    return h;
}

ParamHamiltonian bhz_block_model(const BHZParams& p, int block) {
    if (block != 1 && block != 2) throw InvalidArgument("block must be 1 or 2");
    if (p.Bg != 0.0) throw NotBlockDecomposable("BHZ with Bg != 0 has no two-level blocks");
    const auto full = bhz_model(p);
    auto pick = [block](const ComplexMat& h) {
        auto b = ms_blocks(h, kBhzPairing);
        return block == 1 ? b.block1 : b.block2;
    };
    ParamHamiltonian m("bhz_block" + std::to_string(block), 2, {"kx", "ky"},
                       [full, pick](const ParamPoint& pt) { return pick(full(pt)); });
    for (const char* k : {"kx", "ky"}) {
        m.with_partial(k, [full, pick, k](const ParamPoint& pt) { return pick(full.analytic_partial(pt, k)); });
    }
    return m;
}

}  // namespace qgtlab
