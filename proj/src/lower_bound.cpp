#include "sparse_bandit/lower_bound.hpp"

#include <string>

namespace sparse_bandit {

std::string_view to_string(SparsityRegime regime) {
    return regime == SparsityRegime::Strong ? "Strong" : "Weak";
}

SparsityRegime sparsity_regime(const SparseBanditInstance& instance) {
    detail::require_null_bad_arms(instance);
    const auto s = static_cast<Eigen::Index>(instance.s());
    const Vector& mu = instance.means();
    const Vector& gaps = instance.gaps();
    double weight = 0.0;
    for (Eigen::Index i = 1; i < s; ++i) {
        if (gaps[i] > 0.0) weight += gaps[i] / (mu[i] * mu[i]);
    }
    const double bad = static_cast<double>(instance.d() - instance.s());
    return bad / mu[0] - weight > 0.0 ? SparsityRegime::Strong : SparsityRegime::Weak;
}

double classical_lower_bound(const SparseBanditInstance& instance) {
    const Eigen::ArrayXd gaps = instance.gaps().array();
    return (gaps > 0.0).select(0.5 / gaps, 0.0).sum();
}

double irrelevance_threshold(std::size_t d, std::size_t s, double mu1) {
    if (s > d || s < 1) throw BanditError(ErrorCode::InvalidArgument, "need 1 <= s <= d");
    if (d == s) throw BanditError(ErrorCode::DegenerateNoBadArms, "d = s leaves no bad arm");
    if (!(mu1 > 0.0)) throw BanditError(ErrorCode::InvalidArgument, "mu1 must be positive");
    const double bad = static_cast<double>(d - s);
    return mu1 * (-1.0 + std::sqrt(1.0 + 4.0 * bad)) / (2.0 * bad);
}

template LowerBoundResult<double> explicit_lower_bound<double>(const SparseBanditInstance&,
                                                               const LowerBoundOptions&);
template LowerBoundResult<double> generalized_lower_bound<double>(const SparseBanditInstance&, double,
                                                                  const LowerBoundOptions&);

}  // namespace sparse_bandit
