#pragma once

#include <cmath>
#include <limits>

namespace ordprob::detail {

// Neumaier's variant of Kahan summation. Also tracks sum |x_i| so callers
// can estimate how much cancellation the total went through.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
        abs_ += std::abs(x);
    }

    double value() const { return sum_ + comp_; }
    double abs_total() const { return abs_; }

    // sum |x_i| / |sum x_i|; infinite for an exact zero total.
    double condition() const {
        const double v = std::abs(value());
        if (v == 0.0) return abs_ == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
        return abs_ / v;
    }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
    double abs_ = 0.0;
};

} // namespace ordprob::detail
