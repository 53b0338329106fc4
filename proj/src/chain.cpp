#include "necklace/chain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace necklace {

std::string to_string(const StateId& id) {
    if (id.kind == StateId::Kind::link) return "link:" + std::to_string(id.position);
    return "interior:" + std::to_string(id.position) + ":" + std::to_string(id.slot);
}

TransitionOperator::TransitionOperator(Eigen::SparseMatrix<double, Eigen::RowMajor> mat)
    : mat_(std::move(mat)) {
    if (mat_.rows() != mat_.cols())
        fail(Errc::dimension_mismatch, "transition operator must be square");
    mat_.makeCompressed();
    using It = Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator;
    for (int i = 0; i < mat_.outerSize(); ++i) {
        double sum = 0.0;
        for (It it(mat_, i); it; ++it) {
            if (it.value() < 0.0)
                fail(Errc::not_stochastic, "negative entry in row " + std::to_string(i));
            sum += it.value();
        }
        if (std::abs(sum - 1.0) > 1e-12)
            fail(Errc::not_stochastic, "row " + std::to_string(i) + " does not sum to 1");
        for (It it(mat_, i); it; ++it) it.valueRef() /= sum;
    }
}

TransitionOperator TransitionOperator::from_dense(const Eigen::MatrixXd& mat) {
    std::vector<Eigen::Triplet<double>> trip;
    for (int i = 0; i < mat.rows(); ++i)
        for (int j = 0; j < mat.cols(); ++j)
            if (mat(i, j) != 0.0) trip.emplace_back(i, j, mat(i, j));
    Eigen::SparseMatrix<double, Eigen::RowMajor> s(mat.rows(), mat.cols());
    s.setFromTriplets(trip.begin(), trip.end());
    return TransitionOperator(std::move(s));
}

NecklaceSpec::NecklaceSpec(BeadAnalysis bead, std::vector<int> indicator)
    : bead_(std::move(bead)), indicator_(std::move(indicator)) {
    n_ = static_cast<int>(indicator_.size());
    if (n_ < 1) throw std::invalid_argument("indicator must be nonempty");
    prefix_.assign(static_cast<size_t>(n_) + 1, 0);
    offsets_.assign(static_cast<size_t>(n_) + 1, 0);
    const int b = bead_.spec.exit_state();
    for (int i = 0; i < n_; ++i) {
        const int r = indicator_[static_cast<size_t>(i)];
        if (r != 0 && r != 1)
            fail(Errc::out_of_range, "indicator entries must be 0 or 1");
        prefix_[static_cast<size_t>(i) + 1] = prefix_[static_cast<size_t>(i)] + r;
        offsets_[static_cast<size_t>(i) + 1] =
            offsets_[static_cast<size_t>(i)] + (r ? b : 1);
    }
    m_ = prefix_[static_cast<size_t>(n_)];
    if (m_ == 0) fail(Errc::no_beads, "indicator has no ones");
    total_ = offsets_[static_cast<size_t>(n_)];
}

int NecklaceSpec::index_of(const StateId& id) const {
    if (id.position < 0 || id.position >= n_)
        fail(Errc::out_of_range, "position out of range in " + to_string(id));
    if (id.kind == StateId::Kind::link) {
        if (id.slot != 0) fail(Errc::out_of_range, "link states carry no slot");
        return offsets_[static_cast<size_t>(id.position)];
    }
    if (!bead_at(id.position) || id.slot < 1 || id.slot > bead_exit() - 1)
        fail(Errc::out_of_range, "no such interior state " + to_string(id));
    return offsets_[static_cast<size_t>(id.position)] + id.slot;
}

StateId NecklaceSpec::state_of(int index) const {
    if (index < 0 || index >= total_)
        fail(Errc::out_of_range, "state index out of range");
    const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), index);
    const int pos = static_cast<int>(it - offsets_.begin()) - 1;
    const int slot = index - offsets_[static_cast<size_t>(pos)];
    return slot == 0 ? StateId::link(pos) : StateId::interior(pos, slot);
}

Necklace build_necklace(BeadAnalysis bead, std::vector<int> indicator) {
    NecklaceSpec spec(std::move(bead), std::move(indicator));
    const Eigen::MatrixXd& B = spec.bead().spec.rows();
    const int b = spec.bead_exit();
    const int n = spec.link_count();
    std::vector<Eigen::Triplet<double>> trip;
    for (int i = 0; i < n; ++i) {
        const int here = spec.index_of(StateId::link(i));
        const int next = spec.index_of(StateId::link((i + 1) % n));
        if (!spec.bead_at(i)) {
            trip.emplace_back(here, next, 1.0);
            continue;
        }
        for (int from = 0; from < b; ++from)
            for (int to = 0; to <= b; ++to) {
                const double w = B(from, to);
                if (w == 0.0) continue;
                trip.emplace_back(here + from, to == b ? next : here + to, w);
            }
    }
    Eigen::SparseMatrix<double, Eigen::RowMajor> mat(spec.size(), spec.size());
    mat.setFromTriplets(trip.begin(), trip.end());
    return Necklace{std::move(spec), TransitionOperator(std::move(mat))};
}

std::vector<int> indicator_gallery(const std::string& name, int n) {
    if (n < 2) fail(Errc::out_of_range, "indicator families need n >= 2");
    std::vector<int> r(static_cast<size_t>(n), 0);
    if (name == "alternating") {
        for (int i = 0; i < n; i += 2) r[static_cast<size_t>(i)] = 1;
    } else if (name == "block") {
        for (int i = 0; 2 * i < n; ++i) r[static_cast<size_t>(i)] = 1;
    } else if (name == "all") {
        std::fill(r.begin(), r.end(), 1);
    } else if (name.rfind("fixed-count:", 0) == 0) {
        int m = 0;
        try {
            size_t used = 0;
            m = std::stoi(name.substr(12), &used);
            if (used != name.size() - 12) fail(Errc::unknown_pattern, name);
        } catch (const Error&) {
            throw;
        } catch (...) {
            fail(Errc::unknown_pattern, name);
        }
        if (m < 1 || m > n) fail(Errc::out_of_range, "fixed-count needs 1 <= m <= n");
        std::fill(r.begin(), r.begin() + m, 1);
    } else {
        fail(Errc::unknown_pattern, name);
    }
    return r;
}

Eigen::VectorXd stationary(const Necklace& chain) {
    const NecklaceSpec& spec = chain.spec;
    const double W = spec.weight();
    const double beadScale = (spec.mean_fpt() + 1.0) / W;
    const Eigen::VectorXd& cpi = chain.spec.bead().closure_pi;
    Eigen::VectorXd pi(spec.size());
    for (int i = 0; i < spec.link_count(); ++i) {
        const int base = spec.index_of(StateId::link(i));
        if (!spec.bead_at(i)) {
            pi(base) = 1.0 / W;
            continue;
        }
        for (int k = 0; k < spec.bead_exit(); ++k) pi(base + k) = beadScale * cpi(k);
    }
    pi /= pi.sum();
    const double resid =
        (chain.op.matrix().transpose() * pi - pi).cwiseAbs().maxCoeff();
    if (resid > 1e-10)
        fail(Errc::not_stationary, "closed form disagrees with the operator");
    return pi;
}

Eigen::VectorXd point_mass(const NecklaceSpec& spec, const StateId& start) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(spec.size());
    v(spec.index_of(start)) = 1.0;
    return v;
}

Eigen::VectorXd evolve(const TransitionOperator& op, const Eigen::VectorXd& start,
                       long long steps) {
    if (start.size() != op.size())
        fail(Errc::dimension_mismatch, "start distribution has the wrong size");
    if (steps < 0) fail(Errc::out_of_range, "steps must be nonnegative");
    const double mass0 = start.sum();
    const Eigen::SparseMatrix<double> PT = op.matrix().transpose();
    Eigen::VectorXd v = start;
    for (long long s = 0; s < steps; ++s) {
        v = PT * v;
        if (std::abs(v.sum() - mass0) > 1e-9)
            fail(Errc::numerical_drift, "mass drift at step " + std::to_string(s + 1));
    }
    v = v.cwiseMax(0.0);
    const double mass = v.sum();
    if (mass > 0.0) v *= mass0 / mass;
    return v;
}

double tv_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (a.size() != b.size())
        fail(Errc::dimension_mismatch, "distributions differ in size");
    return 0.5 * (a - b).lpNorm<1>();
}

} // namespace necklace
