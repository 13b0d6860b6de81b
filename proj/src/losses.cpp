#include "mifi/losses.hpp"

#include <cmath>

#include "mifi/numerics.hpp"

namespace mifi {

namespace {

double clamp_p(double p) {
    if (p < kProbEps) p = kProbEps;
    if (p > 1.0 - kProbEps) p = 1.0 - kProbEps;
    if (!(p > 0.0 && p < 1.0)) {
        throw InvalidInputError("probability outside (0,1) after clamping");
    }
    return p;
}

void check_probs_target(const std::vector<double>& probs, int target) {
    if (probs.empty()) throw InvalidInputError("loss: empty probability vector");
    if (target < 0 || static_cast<std::size_t>(target) >= probs.size()) {
        throw InvalidInputError("loss: target " + std::to_string(target) +
                                " out of range for " + std::to_string(probs.size()) +
                                " classes");
    }
    double sum = 0.0;
    for (double p : probs) sum += p;
    if (std::fabs(sum - 1.0) > 1e-5) {
        throw InvalidInputError("loss: probabilities sum to " + std::to_string(sum));
    }
}

void check_exponent(double v, const char* what) {
    if (!std::isfinite(v) || v < 0.0) {
        throw InvalidInputError(std::string(what) + " must be finite and >= 0");
    }
}

// d/dp of the easy term -(1+p)^g * log(p).
double dLe_dp(double p, double g) {
    if (g == 0.0) return -1.0 / p;
    return -g * std::pow(1.0 + p, g - 1.0) * std::log(p) - std::pow(1.0 + p, g) / p;
}

// d/dp of the hard term -(1-p)^l1 * log(p) - p^l2 * log(1-p).
double dLh_dp(double p, double l1, double l2) {
    double d;
    if (l1 == 0.0) {
        d = -1.0 / p;
    } else {
        d = l1 * std::pow(1.0 - p, l1 - 1.0) * std::log(p) - std::pow(1.0 - p, l1) / p;
    }
    if (l2 == 0.0) {
        d += 1.0 / (1.0 - p);
    } else {
        d += -l2 * std::pow(p, l2 - 1.0) * std::log(1.0 - p) + std::pow(p, l2) / (1.0 - p);
    }
    return d;
}

// Chain rule through softmax: dL/dz_k = dL/dp_t * p_t * (delta_tk - p_k).
std::vector<double> grad_from_dLdp(const std::vector<double>& probs, int target,
                                   double dLdp) {
    std::vector<double> g(probs.size());
    double pt = probs[static_cast<std::size_t>(target)];
    for (std::size_t k = 0; k < probs.size(); ++k) {
        double delta = (static_cast<int>(k) == target) ? 1.0 : 0.0;
        g[k] = dLdp * pt * (delta - probs[k]);
    }
    return g;
}

} // namespace

void CaslConfig::validate() const {
    if (!std::isfinite(beta) || beta <= 0.0) {
        throw InvalidInputError("beta must be finite and positive");
    }
    check_exponent(gamma, "gamma");
    check_exponent(lambda1, "lambda1");
    check_exponent(lambda2, "lambda2");
    if (total_epochs < 1) throw InvalidInputError("total_epochs must be >= 1");
}

std::string LossKind::name() const {
    switch (family) {
        case Family::CE: return "ce";
        case Family::FL: return "fl";
        case Family::ASL: return "asl";
        case Family::CASL: return "casl";
    }
    return "?";
}

double casl_alpha(int epoch, const CaslConfig& config) {
    config.validate();
    if (epoch < 0 || epoch > config.total_epochs) {
        throw InvalidInputError("epoch " + std::to_string(epoch) +
                                " outside [0, " + std::to_string(config.total_epochs) + "]");
    }
    double et = static_cast<double>(config.total_epochs);
    double be = config.beta * static_cast<double>(epoch);
    double alpha;
    if (be <= et) {
        alpha = 1.0 - be / et;
    } else {
        alpha = (be / et - 1.0) / (config.beta - 1.0);
    }
    if (alpha < 0.0) alpha = 0.0;
    if (alpha > 1.0) alpha = 1.0;
    return alpha;
}

double casl_le(double p, double gamma) {
    check_exponent(gamma, "gamma");
    p = clamp_p(p);
    if (gamma == 0.0) return -std::log(p);
    return -std::pow(1.0 + p, gamma) * std::log(p);
}

double casl_lh(double p, double lambda1, double lambda2) {
    check_exponent(lambda1, "lambda1");
    check_exponent(lambda2, "lambda2");
    p = clamp_p(p);
    double t1 = (lambda1 == 0.0) ? -std::log(p) : -std::pow(1.0 - p, lambda1) * std::log(p);
    double t2 = (lambda2 == 0.0) ? -std::log(1.0 - p)
                                 : -std::pow(p, lambda2) * std::log(1.0 - p);
    return t1 + t2;
}

LossValue cross_entropy(const std::vector<double>& probs, int target) {
    check_probs_target(probs, target);
    double pt = clamp_p(probs[static_cast<std::size_t>(target)]);
    LossValue out;
    out.value = -std::log(pt);
    out.grad_logits.resize(probs.size());
    for (std::size_t k = 0; k < probs.size(); ++k) {
        out.grad_logits[k] = probs[k] - ((static_cast<int>(k) == target) ? 1.0 : 0.0);
    }
    return out;
}

LossValue casl_loss(const std::vector<double>& probs, int target, int epoch,
                    const CaslConfig& config) {
    check_probs_target(probs, target);
    double alpha = casl_alpha(epoch, config);
    double pt = clamp_p(probs[static_cast<std::size_t>(target)]);
    // Skip zero-weighted terms so the alpha=1 / alpha=0 reductions are exact.
    double value = 0.0, dLdp = 0.0;
    if (alpha > 0.0) {
        value += alpha * casl_le(pt, config.gamma);
        dLdp += alpha * dLe_dp(pt, config.gamma);
    }
    if (alpha < 1.0) {
        value += (1.0 - alpha) * casl_lh(pt, config.lambda1, config.lambda2);
        dLdp += (1.0 - alpha) * dLh_dp(pt, config.lambda1, config.lambda2);
    }
    return {value, grad_from_dLdp(probs, target, dLdp)};
}

LossValue focal_loss(const std::vector<double>& probs, int target, double gamma_fl) {
    check_probs_target(probs, target);
    check_exponent(gamma_fl, "gamma_fl");
    double pt = clamp_p(probs[static_cast<std::size_t>(target)]);
    LossValue out;
    if (gamma_fl == 0.0) {
        out.value = -std::log(pt);
        out.grad_logits = grad_from_dLdp(probs, target, -1.0 / pt);
    } else {
        out.value = -std::pow(1.0 - pt, gamma_fl) * std::log(pt);
        double dLdp = gamma_fl * std::pow(1.0 - pt, gamma_fl - 1.0) * std::log(pt) -
                      std::pow(1.0 - pt, gamma_fl) / pt;
        out.grad_logits = grad_from_dLdp(probs, target, dLdp);
    }
    return out;
}

LossValue asymmetric_loss(const std::vector<double>& probs, int target, double lambda1p,
                          double lambda2p) {
    check_probs_target(probs, target);
    double pt = clamp_p(probs[static_cast<std::size_t>(target)]);
    double value = casl_lh(pt, lambda1p, lambda2p);
    double dLdp = dLh_dp(pt, lambda1p, lambda2p);
    return {value, grad_from_dLdp(probs, target, dLdp)};
}

LossValue loss_eval(const LossKind& kind, const std::vector<double>& probs, int target,
                    int epoch) {
    switch (kind.family) {
        case LossKind::Family::CE: return cross_entropy(probs, target);
        case LossKind::Family::FL: return focal_loss(probs, target, kind.gamma_fl);
        case LossKind::Family::ASL:
            return asymmetric_loss(probs, target, kind.lambda1p, kind.lambda2p);
        case LossKind::Family::CASL: return casl_loss(probs, target, epoch, kind.casl);
    }
    throw InvalidInputError("unknown loss kind");
}

std::vector<double> loss_grad_wrt_logits(const LossKind& kind,
                                         const std::vector<double>& logits, int target,
                                         int epoch) {
    return loss_eval(kind, softmax(logits), target, epoch).grad_logits;
}

double finite_diff_check(const LossKind& kind, const std::vector<double>& logits,
                         int target, int epoch, double h) {
    if (!(h > 0.0)) throw InvalidInputError("finite_diff_check: h must be positive");
    std::vector<double> analytic = loss_grad_wrt_logits(kind, logits, target, epoch);
    double max_err = 0.0;
    std::vector<double> z = logits;
    for (std::size_t i = 0; i < z.size(); ++i) {
        double zi = z[i];
        z[i] = zi + h;
        double fp = loss_eval(kind, softmax(z), target, epoch).value;
        z[i] = zi - h;
        double fm = loss_eval(kind, softmax(z), target, epoch).value;
        z[i] = zi;
        double cd = (fp - fm) / (2.0 * h);
        double err = std::fabs(analytic[i] - cd) / std::max(1.0, std::fabs(cd));
        if (err > max_err) max_err = err;
    }
    return max_err;
}

} // namespace mifi
