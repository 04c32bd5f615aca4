#include "adkey/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace adkey {

Confidence::Confidence(double eps) : epsilon(eps) {
    if (!(eps > 0.0) || eps > 1.0) {
        throw std::domain_error("Confidence epsilon must lie in (0, 1]");
    }
}

double binary_entropy(double x) {
    if (!(x >= 0.0) || x > 1.0) {
        throw std::domain_error("binary_entropy: argument outside [0,1]");
    }
    if (x == 0.0 || x == 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double truncated_binary_entropy(double x) {
    if (!(x >= 0.0) || x > 1.0) {
        throw std::domain_error("truncated_binary_entropy: argument outside [0,1]");
    }
    return x < 0.5 ? binary_entropy(x) : 1.0;
}

double hoeffding_delta(double n_total, Confidence eps) {
    if (n_total < 0.0) throw std::domain_error("hoeffding_delta: negative count");
    return std::sqrt(0.5 * n_total * std::log(1.0 / eps.epsilon));
}

double chernoff_delta(double n, Confidence eps, Direction direction) {
    if (n < 0.0) throw std::domain_error("chernoff_delta: negative count");
    const double l = std::log(1.0 / eps.epsilon);
    if (direction == Direction::upper) {
        return l + std::sqrt(2.0 * n * l + l * l);
    }
    return 0.5 * l + std::sqrt(2.0 * n * l + 0.25 * l * l);
}

double combined_delta(double n_total, double n, Confidence eps, Direction direction) {
    return std::min(hoeffding_delta(n_total, eps), chernoff_delta(n, eps, direction));
}

namespace {
double nu_scale = 1.0;
}

void set_extrapolation_scale(double scale) { nu_scale = scale; }
double extrapolation_scale() { return nu_scale; }

double serfling_nu(double n, double k, Confidence eps) {
    if (n < 1.0 || k < 1.0) throw std::domain_error("serfling_nu: n and k must be >= 1");
    const double l = std::log(1.0 / eps.epsilon);
    return nu_scale * std::sqrt((n + k) * (k + 1.0) / (2.0 * n * k * k) * l);
}

double mcdiarmid_block_delta(double n_total, Confidence eps) {
    return 3.0 * hoeffding_delta(n_total, eps);
}

}  // namespace adkey
