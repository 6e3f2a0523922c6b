#pragma once

namespace radonseis {

// Compensated (Kahan) accumulator. Summation order is the caller's
// responsibility; all reductions in this library add in ascending index
// order so results are identical across runs and thread counts.
class KahanSum {
  public:
    void add(double x) {
        const double y = x - comp_;
        const double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

} // namespace radonseis
