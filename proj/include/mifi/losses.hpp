#pragma once

#include <string>
#include <vector>

#include "mifi/error.hpp"

namespace mifi {

// Hyperparameters of the cyclical loss: alpha(e) blends the easy-focused term
// (exponent gamma) with the hard-focused term (exponents lambda1/lambda2) over
// total_epochs, cycling with factor beta.
struct CaslConfig {
    double beta = 4.0;
    double gamma = 0.0;
    double lambda1 = 0.0;
    double lambda2 = 4.0;
    int total_epochs = 100;

    void validate() const;
};

// Tagged union of the supported training losses.
struct LossKind {
    enum class Family { CE, FL, ASL, CASL };

    Family family = Family::CASL;
    double gamma_fl = 2.0;   // FL focusing exponent
    double lambda1p = 1.0;   // ASL easy exponent
    double lambda2p = 4.0;   // ASL confidence-penalty exponent
    CaslConfig casl;

    static LossKind ce() { return {Family::CE, 2.0, 1.0, 4.0, {}}; }
    static LossKind fl(double gamma_fl = 2.0) { return {Family::FL, gamma_fl, 1.0, 4.0, {}}; }
    static LossKind asl(double l1 = 1.0, double l2 = 4.0) { return {Family::ASL, 2.0, l1, l2, {}}; }
    static LossKind cyclical(CaslConfig cfg = {}) { return {Family::CASL, 2.0, 1.0, 4.0, cfg}; }

    std::string name() const;
};

// Loss value plus its analytic gradient with respect to the logits that
// produced the probability vector.
struct LossValue {
    double value = 0.0;
    std::vector<double> grad_logits;
};

// Probability clamp applied before any log().
inline constexpr double kProbEps = 1e-7;

// Blending factor alpha(e): first branch 1 - beta*e/e_t while beta*e <= e_t,
// then (beta*e/e_t - 1)/(beta - 1); clamped to [0,1]. Both branches meet at 0.
double casl_alpha(int epoch, const CaslConfig& config);

// Easy-sample term: -(1+p)^gamma * log(p). gamma = 0 reduces to -log(p).
double casl_le(double p, double gamma);

// Hard-sample term: -(1-p)^lambda1 * log(p) - p^lambda2 * log(1-p).
double casl_lh(double p, double lambda1, double lambda2);

// -log(p_target); gradient w.r.t. logits is probs - onehot(target).
LossValue cross_entropy(const std::vector<double>& probs, int target);

// alpha * L_e + (1-alpha) * L_h on the target probability.
LossValue casl_loss(const std::vector<double>& probs, int target, int epoch,
                    const CaslConfig& config);

// -(1-p_t)^gamma_fl * log(p_t).
LossValue focal_loss(const std::vector<double>& probs, int target, double gamma_fl);

// -(1-p_t)^l1 * log(p_t) - p_t^l2 * log(1-p_t), epoch-independent.
LossValue asymmetric_loss(const std::vector<double>& probs, int target,
                          double lambda1p, double lambda2p);

// Dispatch on kind. epoch only matters for the cyclical loss.
LossValue loss_eval(const LossKind& kind, const std::vector<double>& probs, int target,
                    int epoch);

// Analytic gradient of loss(softmax(logits)) with respect to the logits.
std::vector<double> loss_grad_wrt_logits(const LossKind& kind,
                                         const std::vector<double>& logits, int target,
                                         int epoch);

// Max over coordinates of |analytic - central difference| / max(1, |cd|),
// all in 64-bit. The verification oracle for every loss family.
double finite_diff_check(const LossKind& kind, const std::vector<double>& logits,
                         int target, int epoch, double h);

} // namespace mifi
