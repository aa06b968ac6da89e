#pragma once

// Embedded Runge-Kutta 5(4) pair of Dormand and Prince with PI step-size
// control and the fourth-order continuous extension, after the DOPRI5 code of
// Hairer, Norsett and Wanner. The stepper is driven one accepted step at a
// time so callers can monitor invariants and locate events on the dense
// output of the most recent step.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "vortexred/errors.hpp"

namespace vortexred::ode {

using State = std::vector<double>;

struct StepControl {
    double rel_tol = 1e-12;
    double abs_tol = 1e-12;
    double max_step = std::numeric_limits<double>::infinity();
    double initial_step = 0.0;  ///< 0 selects the step automatically
    std::size_t max_rejections = 200;  ///< consecutive rejections before giving up
};

namespace dp {
// Butcher tableau.
inline constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                        a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                        a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
inline constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                        a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
// Fifth minus fourth order weights.
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                        e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Continuous extension.
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
}  // namespace dp

/// Rhs is callable as rhs(double t, const State& y, State& dydt).
template <class Rhs>
class DormandPrince45 {
public:
    DormandPrince45(Rhs rhs, StepControl control) : rhs_(std::move(rhs)), control_(control) {}

    /// Restart from (t, y); a positive `h` overrides the initial step selection.
    void reset(double t, State y, double h = 0.0) {
        const std::size_t n = y.size();
        t_ = t;
        t_prev_ = t;
        y_ = std::move(y);
        for (auto* v : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &y_stage_, &y_new_, &r1_, &r2_, &r3_,
                        &r4_, &r5_}) {
            v->assign(n, 0.0);
        }
        rhs_(t_, y_, k1_);
        r1_ = y_;
        if (h > 0.0) {
            h_ = h;
        } else {
            h_ = control_.initial_step > 0.0 ? control_.initial_step : initial_step();
        }
        h_prev_ = 0.0;
        fac_old_ = 1e-4;
        last_rejected_ = false;
        accepted_ = 0;
        rejected_ = 0;
    }

    /// Take one accepted step that does not pass t_limit. Throws StepFailure.
    void step(double t_limit) {
        constexpr double beta = 0.04;
        constexpr double expo1 = 0.2 - beta * 0.75;
        constexpr double safe = 0.9;
        constexpr double fac_min = 0.2;  // hnew >= h * fac_min
        constexpr double fac_max = 10.0;
        const double eps = std::numeric_limits<double>::epsilon();

        std::size_t rejections = 0;
        for (;;) {
            double h = std::min(h_, control_.max_step);
            bool hits_limit = false;
            if (t_ + 1.01 * h >= t_limit) {
                h = t_limit - t_;
                hits_limit = true;
            }
            if (!(h > 10.0 * eps * std::abs(t_)) || h <= 0.0) {
                throw StepFailure("step size underflow at t = " + std::to_string(t_));
            }

            const double err = attempt(h);
            if (std::isfinite(err) && err <= 1.0) {
                const double fac11 = std::pow(err, expo1);
                double fac = fac11 / std::pow(fac_old_, beta);
                fac = std::clamp(fac / safe, 1.0 / fac_max, 1.0 / fac_min);
                double h_new = h / fac;
                fac_old_ = std::max(err, 1e-4);
                if (last_rejected_) h_new = std::min(h_new, h);
                last_rejected_ = false;

                store_dense(h);
                t_prev_ = t_;
                t_ = hits_limit ? t_limit : t_ + h;
                std::swap(y_, y_new_);
                std::swap(k1_, k7_);
                h_prev_ = h;
                // Keep the proposal when the step was only truncated by t_limit.
                h_ = hits_limit ? std::max(h_new, h_) : h_new;
                ++accepted_;
                return;
            }

            ++rejected_;
            last_rejected_ = true;
            if (++rejections > control_.max_rejections) {
                throw StepFailure("too many rejected steps at t = " + std::to_string(t_));
            }
            if (!std::isfinite(err)) {
                h_ = h * 0.2;
            } else {
                const double fac11 = std::pow(err, expo1);
                h_ = h / std::min(1.0 / fac_min, fac11 / safe);
            }
        }
    }

    double t() const noexcept { return t_; }
    double t_previous() const noexcept { return t_prev_; }
    const State& y() const noexcept { return y_; }
    /// Derivative at the current point (first stage of the next step).
    const State& dydt() const noexcept { return k1_; }
    double last_step() const noexcept { return h_prev_; }
    double proposed_step() const noexcept { return h_; }
    std::size_t accepted_steps() const noexcept { return accepted_; }
    std::size_t rejected_steps() const noexcept { return rejected_; }

    /// Dense output over the last accepted step [t_previous(), t()].
    void interpolate(double t, State& out) const {
        out.resize(y_.size());
        if (h_prev_ == 0.0) {
            out = y_;
            return;
        }
        const double theta = (t - t_prev_) / h_prev_;
        const double theta1 = 1.0 - theta;
        for (std::size_t i = 0; i < y_.size(); ++i) {
            out[i] = r1_[i] + theta * (r2_[i] + theta1 * (r3_[i] + theta * (r4_[i] + theta1 * r5_[i])));
        }
    }

    State interpolate(double t) const {
        State out;
        interpolate(t, out);
        return out;
    }

private:
    double weighted_rms(const State& v, const State& scale_from) const {
        double sum = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double sk = control_.abs_tol + control_.rel_tol * std::abs(scale_from[i]);
            const double r = v[i] / sk;
            sum += r * r;
        }
        return v.empty() ? 0.0 : std::sqrt(sum / static_cast<double>(v.size()));
    }

    double initial_step() {
        const std::size_t n = y_.size();
        const double d0 = weighted_rms(y_, y_);
        const double d1 = weighted_rms(k1_, y_);
        double h0 = (d0 < 1e-10 || d1 < 1e-10) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min(h0, control_.max_step);
        for (std::size_t i = 0; i < n; ++i) y_stage_[i] = y_[i] + h0 * k1_[i];
        rhs_(t_ + h0, y_stage_, k2_);
        State diff(n);
        for (std::size_t i = 0; i < n; ++i) diff[i] = k2_[i] - k1_[i];
        const double d2 = weighted_rms(diff, y_) / h0;
        const double dmax = std::max(d1, d2);
        const double h1 = (dmax <= 1e-15 || !std::isfinite(dmax)) ? std::max(1e-6, h0 * 1e-3)
                                                                   : std::pow(0.01 / dmax, 0.2);
        return std::min({100.0 * h0, h1, control_.max_step});
    }

    double attempt(double h) {
        using namespace dp;
        const std::size_t n = y_.size();
        auto& ys = y_stage_;
        for (std::size_t i = 0; i < n; ++i) ys[i] = y_[i] + h * a21 * k1_[i];
        rhs_(t_ + c2 * h, ys, k2_);
        for (std::size_t i = 0; i < n; ++i) ys[i] = y_[i] + h * (a31 * k1_[i] + a32 * k2_[i]);
        rhs_(t_ + c3 * h, ys, k3_);
        for (std::size_t i = 0; i < n; ++i) ys[i] = y_[i] + h * (a41 * k1_[i] + a42 * k2_[i] + a43 * k3_[i]);
        rhs_(t_ + c4 * h, ys, k4_);
        for (std::size_t i = 0; i < n; ++i) {
            ys[i] = y_[i] + h * (a51 * k1_[i] + a52 * k2_[i] + a53 * k3_[i] + a54 * k4_[i]);
        }
        rhs_(t_ + c5 * h, ys, k5_);
        for (std::size_t i = 0; i < n; ++i) {
            ys[i] = y_[i] + h * (a61 * k1_[i] + a62 * k2_[i] + a63 * k3_[i] + a64 * k4_[i] + a65 * k5_[i]);
        }
        rhs_(t_ + h, ys, k6_);
        for (std::size_t i = 0; i < n; ++i) {
            y_new_[i] = y_[i] + h * (a71 * k1_[i] + a73 * k3_[i] + a74 * k4_[i] + a75 * k5_[i] + a76 * k6_[i]);
        }
        rhs_(t_ + h, y_new_, k7_);

        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double e =
                h * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] + e6 * k6_[i] + e7 * k7_[i]);
            const double sk = control_.abs_tol + control_.rel_tol * std::max(std::abs(y_[i]), std::abs(y_new_[i]));
            const double r = e / sk;
            sum += r * r;
            if (!std::isfinite(y_new_[i]) || !std::isfinite(k7_[i])) {
                return std::numeric_limits<double>::infinity();
            }
        }
        return n == 0 ? 0.0 : std::sqrt(sum / static_cast<double>(n));
    }

    void store_dense(double h) {
        using namespace dp;
        for (std::size_t i = 0; i < y_.size(); ++i) {
            const double ydiff = y_new_[i] - y_[i];
            const double bspl = h * k1_[i] - ydiff;
            r1_[i] = y_[i];
            r2_[i] = ydiff;
            r3_[i] = bspl;
            r4_[i] = ydiff - h * k7_[i] - bspl;
            r5_[i] = h * (d1 * k1_[i] + d3 * k3_[i] + d4 * k4_[i] + d5 * k5_[i] + d6 * k6_[i] + d7 * k7_[i]);
        }
    }

    Rhs rhs_;
    StepControl control_;
    double t_ = 0.0;
    double t_prev_ = 0.0;
    double h_ = 0.0;
    double h_prev_ = 0.0;
    double fac_old_ = 1e-4;
    bool last_rejected_ = false;
    std::size_t accepted_ = 0;
    std::size_t rejected_ = 0;
    State y_, y_new_, y_stage_;
    State k1_, k2_, k3_, k4_, k5_, k6_, k7_;
    State r1_, r2_, r3_, r4_, r5_;
};

/// Bisection for a sign change of g on [a, b] (g(a) and g(b) of opposite sign).
template <class Fn>
double bisect_root(Fn&& g, double a, double b, double rel_tol) {
    double ga = g(a);
    for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        if (std::abs(b - a) <= rel_tol * std::max(std::abs(m), 1e-300) || m == a || m == b) break;
        const double gm = g(m);
        if ((gm > 0.0) == (ga > 0.0)) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace vortexred::ode
