#include "llgrom/brownian.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace llgrom {

double faber_schauder(int n, double t) {
    if (n < 1) {
        throw std::invalid_argument("faber_schauder: n must be >= 1");
    }
    if (t < 0.0 || t > 1.0) {
        throw std::invalid_argument("faber_schauder: t must lie in [0, 1]");
    }
    if (n == 1) {
        return t;
    }
    // n = 2^{l-1} + j with 1 <= j <= 2^{l-1}
    const int level = std::bit_width(static_cast<unsigned>(n - 1));
    const double nseg = std::ldexp(1.0, level - 1);  // 2^{l-1} hats on level l
    const int j = n - static_cast<int>(nseg);
    const double lo = (j - 1) / nseg;
    const double mid = (j - 0.5) / nseg;
    const double halfwidth = 0.5 / nseg;
    const double peak = std::exp2(-0.5 * (level + 1));
    const double arg = 1.0 - std::abs(t - mid) / halfwidth;
    if (t < lo || arg <= 0.0) {
        return 0.0;
    }
    return peak * arg;
}

double brownian_eval(const BrownianPath& path, double t) {
    if (t < 0.0 || t > path.T) {
        throw std::invalid_argument("brownian_eval: t outside [0, T]");
    }
    const double u = (path.T > 0.0) ? t / path.T : 0.0;
    double acc = 0.0;
    for (int n = 1; n <= path.y.dim(); ++n) {
        const double yn = path.y.y[n - 1];
        if (yn != 0.0) {
            acc += yn * faber_schauder(n, u);
        }
    }
    return std::sqrt(path.T) * acc;
}

double gamma_partial_sum(const ParamVector& y, double delta) {
    if (delta < 0.0 || delta >= 1.0) {
        throw std::invalid_argument("gamma_partial_sum: delta must be in [0,1)");
    }
    const int s = y.dim();
    double total = 0.0;
    // level l covers indices floor(2^{l-1}) + 1 .. floor(2^{l-1}) + ceil(2^{l-1})
    for (int level = 0;; ++level) {
        const double half = std::ldexp(1.0, level - 1);
        const int lo = static_cast<int>(std::floor(half)) + 1;
        const int hi = static_cast<int>(std::floor(half)) +
                       static_cast<int>(std::ceil(half));
        if (lo > s) {
            break;
        }
        double level_max = 0.0;
        for (int idx = lo; idx <= std::min(hi, s); ++idx) {
            level_max = std::max(level_max, std::abs(y.y[idx - 1]));
        }
        total += level_max * std::exp2(-0.5 * (1.0 - delta) * level);
    }
    return total;
}

double NormalSampler::next_uniform() {
    // top 53 bits -> [0, 1)
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

double NormalSampler::next() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    while (true) {
        const double u = 2.0 * next_uniform() - 1.0;
        const double v = 2.0 * next_uniform() - 1.0;
        const double s = u * u + v * v;
        if (s > 0.0 && s < 1.0) {
            const double f = std::sqrt(-2.0 * std::log(s) / s);
            spare_ = v * f;
            has_spare_ = true;
            return u * f;
        }
    }
}

std::vector<ParamVector> sample_parameters(int s, int count,
                                           std::uint64_t seed) {
    if (s < 1 || count < 1) {
        throw std::invalid_argument("sample_parameters: s and count must be >= 1");
    }
    NormalSampler sampler(seed);
    std::vector<ParamVector> out;
    out.reserve(count);
    for (int m = 0; m < count; ++m) {
        Eigen::VectorXd y(s);
        for (int i = 0; i < s; ++i) {
            y[i] = sampler.next();
        }
        out.emplace_back(std::move(y));
    }
    return out;
}

std::uint64_t derive_seed(std::uint64_t root, const char* stage) {
    // FNV-1a over the stage tag, then a splitmix64 round
    std::uint64_t h = 1469598103934665603ULL;
    for (const char* p = stage; *p; ++p) {
        h ^= static_cast<unsigned char>(*p);
        h *= 1099511628211ULL;
    }
    std::uint64_t z = root ^ h;
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace llgrom
