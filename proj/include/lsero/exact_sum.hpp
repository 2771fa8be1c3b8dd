#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace lsero {

/// Correctly rounded floating-point summation (Shewchuk's non-overlapping
/// partials, as in Python's math.fsum).
///
/// The rounded result depends only on the multiset of added values, never on
/// their order. Adding x and later -x cancels exactly, which is what lets the
/// Monte Carlo engine update totals incrementally and still match a full
/// recomputation bit for bit.
class ExactSum {
public:
    ExactSum() = default;

    void add(double x) {
        std::size_t kept = 0;
        for (std::size_t i = 0; i < partials_.size(); ++i) {
            double y = partials_[i];
            if (std::fabs(x) < std::fabs(y)) {
                std::swap(x, y);
            }
            const double hi = x + y;
            const double lo = y - (hi - x);
            if (lo != 0.0) {
                partials_[kept++] = lo;
            }
            x = hi;
        }
        partials_.resize(kept);
        partials_.push_back(x);
    }

    ExactSum& operator+=(double x) {
        add(x);
        return *this;
    }

    ExactSum& operator+=(const ExactSum& other) {
        for (double p : other.partials_) {
            add(p);
        }
        return *this;
    }

    double value() const {
        std::size_t n = partials_.size();
        if (n == 0) {
            return 0.0;
        }
        double hi = partials_[--n];
        double lo = 0.0;
        while (n > 0) {
            const double x = hi;
            const double y = partials_[--n];
            hi = x + y;
            const double yr = hi - x;
            lo = y - yr;
            if (lo != 0.0) {
                break;
            }
        }
        // half-even correction when the remaining partials push past a tie
        if (n > 0 && ((lo < 0.0 && partials_[n - 1] < 0.0) || (lo > 0.0 && partials_[n - 1] > 0.0))) {
            const double y = lo * 2.0;
            const double x = hi + y;
            const double yr = x - hi;
            if (y == yr) {
                hi = x;
            }
        }
        return hi;
    }

private:
    std::vector<double> partials_;
};

template <typename Range>
double exact_sum(const Range& values) {
    ExactSum acc;
    for (double v : values) {
        acc.add(v);
    }
    return acc.value();
}

}  // namespace lsero
