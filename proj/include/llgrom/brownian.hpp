#ifndef LLGROM_BROWNIAN_HPP
#define LLGROM_BROWNIAN_HPP

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace llgrom {

// Truncated vector of Levy-Ciesielski coefficients.
struct ParamVector {
    Eigen::VectorXd y;

    ParamVector() = default;
    explicit ParamVector(Eigen::VectorXd v) : y(std::move(v)) {}
    static ParamVector zero(int s) {
        return ParamVector(Eigen::VectorXd::Zero(s));
    }
    int dim() const { return static_cast<int>(y.size()); }
};

// Brownian path on [0, T] parametrized by y through the truncated expansion
// W(y, t) = sqrt(T) * sum_n y_n eta_n(t / T).
struct BrownianPath {
    ParamVector y;
    double T = 1.0;
};

// Faber-Schauder basis function eta_n on [0, 1]: eta_1(t) = t; for
// n = 2^{l-1} + j (l >= 1, 1 <= j <= 2^{l-1}) the hat supported on
// [(j-1)/2^{l-1}, j/2^{l-1}] with peak 2^{-(l+1)/2} at the midpoint.
double faber_schauder(int n, double t);

double brownian_eval(const BrownianPath& path, double t);

// Partial sum of the Hoelder-summability diagnostic
// sum_l max_j |y_{floor(2^{l-1}) + j}| 2^{-(1-delta) l / 2}
// over the levels covered by the truncation; delta in [0, 1).
double gamma_partial_sum(const ParamVector& y, double delta);

// Deterministic standard-normal sampler: the mt19937_64 bit stream mapped to
// uniforms via the top 53 bits, then the Marsaglia polar transform. The
// output sequence depends only on the seed.
class NormalSampler {
  public:
    explicit NormalSampler(std::uint64_t seed) : eng_(seed) {}
    double next();

  private:
    double next_uniform();
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

std::vector<ParamVector> sample_parameters(int s, int count,
                                           std::uint64_t seed);

// Deterministic per-stage seed derivation from a root seed.
std::uint64_t derive_seed(std::uint64_t root, const char* stage);

}  // namespace llgrom

#endif
