#pragma once

// Dormand-Prince 8(5,3) pair with the seventh-order continuous extension,
// after the DOP853 code of Hairer, Norsett and Wanner. Same driving interface
// as DormandPrince45. The error estimate is measured in the max norm over
// components rather than the RMS norm of the original code.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "vortexred/errors.hpp"
#include "vortexred/ode.hpp"

namespace vortexred::ode {

namespace dop853 {
inline constexpr std::size_t kStages = 12;
inline constexpr std::size_t kExtended = 16;
inline constexpr double c[16] = {0, 0.05260015195876773, 0.078900227938151601, 0.1183503419072274, 0.28164965809277259, 0.33333333333333331, 0.25, 0.30769230769230771, 0.6512820512820513, 0.59999999999999998, 0.8571428571428571, 1, 1, 0.10000000000000001, 0.20000000000000001, 0.77777777777777779};
inline constexpr double a[16][16] = {
    {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {0.05260015195876773, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {0.0197250569845379, 0.059175170953613701, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {0.029587585476806851, 0, 0.088762756430420545, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {0.24136513415926669, 0, -0.88454947932828609, 0.92483400326179199, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {0.037037037037037035, 0, 0, 0.17082860872947386, 0.12546768756682242, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {0.037109375, 0, 0, 0.17025221101954405, 0.060216538980455959, -0.017578125, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {0.037092000118504789, 0, 0, 0.17038392571223998, 0.10726203044637328, -0.015319437748624402, 0.0082737891638140233, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {0.62411095871607569, 0, 0, -3.3608926294469414, -0.86821934684172597, 27.59209969944671, 20.154067550477894, -43.489884181069961, 0, 0, 0, 0, 0, 0, 0, 0},
    {0.47766253643826434, 0, 0, -2.4881146199716677, -0.59029082683684297, 21.230051448181193, 15.279233632882423, -33.288210968984863, -0.020331201708508627, 0, 0, 0, 0, 0, 0, 0},
    {-0.9371424300859873, 0, 0, 5.1863724288440638, 1.0914373489967295, -8.1497870107469268, -18.520065659996959, 22.739487099350505, 2.4936055526796523, -3.0467644718982196, 0, 0, 0, 0, 0, 0},
    {2.273310147516538, 0, 0, -10.534495466737249, -2.0008720582248625, -17.958931863118799, 27.94888452941996, -2.8589982771350235, -8.8728569335306293, 12.360567175794303, 0.64339274601576357, 0, 0, 0, 0, 0},
    {0.054293734116568765, 0, 0, 0, 0, 4.4503128927524092, 1.8915178993145003, -5.8012039600105849, 0.3111643669578199, -0.15216094966251609, 0.20136540080403034, 0.044710615727772587, 0, 0, 0, 0},
    {0.056167502283047954, 0, 0, 0, 0, 0, 0.25350021021662483, -0.2462390374708025, -0.12419142326381637, 0.15329179827876568, 0.0082010522956346907, 0.0075678976605456994, -0.0082979999999999998, 0, 0, 0},
    {0.031834648163502142, 0, 0, 0, 0, 0.028300909672366776, 0.053541988307438566, -0.054923748571390991, 0, 0, -0.00010834732869724932, 0.00038257109083565839, -0.00034046500868740456, 0.1413124436746325, 0, 0},
    {-0.42889630158379194, 0, 0, 0, 0, -4.697621415361164, 7.6834211960625991, 4.0689898183971103, 0.35672718745528109, 0, 0, 0, -0.0013990241651590145, 2.9475147891527724, -9.1509584721798696, 0},
};
inline constexpr double b[12] = {0.054293734116568765, 0, 0, 0, 0, 4.4503128927524092, 1.8915178993145003, -5.8012039600105849, 0.3111643669578199, -0.15216094966251609, 0.20136540080403034, 0.044710615727772587};
inline constexpr double e3[13] = {-0.18980075407240762, 0, 0, 0, 0, 4.4503128927524092, 1.8915178993145003, -5.8012039600105849, -0.42268232132379191, -0.15216094966251609, 0.20136540080403034, 0.022651792198360821, 0};
inline constexpr double e5[13] = {0.01312004499419488, 0, 0, 0, 0, -1.2251564463762044, -0.4957589496572502, 1.6643771824549864, -0.35032884874997366, 0.33417911871301748, 0.08192320648511571, -0.022355307863886294, 0};
inline constexpr double d[4][16] = {
    {-8.4289382761090135, 0, 0, 0, 0, 0.56671495351937773, -3.0689499459498917, 2.3846676565120699, 2.1170345824450281, -0.87139158377797299, 2.2404374302607883, 0.63157877876946877, -0.088990336451333307, 18.148505520854727, -9.194632392478356, -4.4360363875948936},
    {10.427508642579134, 0, 0, 0, 0, 242.28349177525817, 165.20045171727028, -374.5467547226902, -22.113666853125306, 7.7334326684722638, -30.674084731089398, -9.3321305264302286, 15.697238121770845, -31.139403219565178, -9.3529243588444793, 35.816841486394082},
    {19.985053242002433, 0, 0, 0, 0, -387.03730874935178, -189.17813819516758, 527.80815920542364, -11.573902539959629, 6.8812326946963003, -1.0006050966910838, 0.77771377980534429, -2.7782057523535082, -60.196695231264123, 84.320405506677162, 11.992291136182789},
    {-25.69393346270375, 0, 0, 0, 0, -154.18974869023643, -231.5293791760455, 357.63911791061412, 93.405324183624316, -37.458323136451632, 104.0996495089623, 29.840293426660502, -43.533456590011141, 96.324553959188279, -39.177261675615441, -149.72683625798564},
};
}  // namespace dop853

template <class Rhs>
class DormandPrince853 {
public:
    DormandPrince853(Rhs rhs, StepControl control) : rhs_(std::move(rhs)), control_(control) {}

    void reset(double t, State y, double h = 0.0) {
        const std::size_t n = y.size();
        t_ = t;
        t_prev_ = t;
        y_ = std::move(y);
        for (auto& k : k_) k.assign(n, 0.0);
        for (auto& f : f_) f.assign(n, 0.0);
        y_stage_.assign(n, 0.0);
        y_new_.assign(n, 0.0);
        y_old_ = y_;
        f0_.assign(n, 0.0);
        rhs_(t_, y_, f0_);
        if (h > 0.0) {
            h_ = h;
        } else {
            h_ = control_.initial_step > 0.0 ? control_.initial_step : initial_step();
        }
        h_prev_ = 0.0;
        fac_old_ = 1e-4;
        last_rejected_ = false;
        dense_ready_ = false;
        accepted_ = 0;
        rejected_ = 0;
    }

    void step(double t_limit) {
        constexpr double beta = 0.04;
        constexpr double expo1 = 1.0 / 8.0 - beta * 0.2;
        constexpr double safe = 0.9;
        constexpr double fac_min = 0.333;
        constexpr double fac_max = 6.0;
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

                t_prev_ = t_;
                t_ = hits_limit ? t_limit : t_ + h;
                std::swap(y_old_, y_);
                std::swap(y_, y_new_);
                std::swap(f0_, k_[kLast]);
                h_prev_ = h;
                dense_ready_ = false;
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
    const State& dydt() const noexcept { return f0_; }
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
        if (!dense_ready_) prepare_dense();
        const double x = (t - t_prev_) / h_prev_;
        const double x1 = 1.0 - x;
        for (std::size_t i = 0; i < y_.size(); ++i) {
            double v = 0.0;
            for (std::size_t j = 7; j-- > 0;) {
                v += f_[j][i];
                v *= ((6 - j) % 2 == 0) ? x : x1;
            }
            out[i] = y_old_[i] + v;
        }
    }

    State interpolate(double t) const {
        State out;
        interpolate(t, out);
        return out;
    }

private:
    // k_[0..11] are the stages of the last attempt, k_[12] is f at its end,
    // k_[13..15] the extra stages of the continuous extension.
    static constexpr std::size_t kLast = dop853::kStages;

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
        const double d1 = weighted_rms(f0_, y_);
        double h0 = (d0 < 1e-10 || d1 < 1e-10) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min(h0, control_.max_step);
        State f1(n);
        for (std::size_t i = 0; i < n; ++i) y_stage_[i] = y_[i] + h0 * f0_[i];
        rhs_(t_ + h0, y_stage_, f1);
        for (std::size_t i = 0; i < n; ++i) f1[i] -= f0_[i];
        const double d2 = weighted_rms(f1, y_) / h0;
        const double dmax = std::max(d1, d2);
        const double h1 = (dmax <= 1e-15 || !std::isfinite(dmax)) ? std::max(1e-6, h0 * 1e-3)
                                                                   : std::pow(0.01 / dmax, 1.0 / 8.0);
        return std::min({100.0 * h0, h1, control_.max_step});
    }

    void stage(std::size_t s, double t0, const State& y0, double h, std::vector<State>& k) const {
        const std::size_t n = y0.size();
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < s; ++j) acc += dop853::a[s][j] * k[j][i];
            y_stage_[i] = y0[i] + h * acc;
        }
        rhs_(t0 + dop853::c[s] * h, y_stage_, k[s]);
    }

    double attempt(double h) {
        const std::size_t n = y_.size();
        k_[0] = f0_;
        for (std::size_t s = 1; s < dop853::kStages; ++s) stage(s, t_, y_, h, k_);
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < dop853::kStages; ++j) acc += dop853::b[j] * k_[j][i];
            y_new_[i] = y_[i] + h * acc;
        }
        rhs_(t_ + h, y_new_, k_[kLast]);

        double err5 = 0.0, err3 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(y_new_[i]) || !std::isfinite(k_[kLast][i])) {
                return std::numeric_limits<double>::infinity();
            }
            double e5 = 0.0, e3 = 0.0;
            for (std::size_t j = 0; j <= kLast; ++j) {
                e5 += dop853::e5[j] * k_[j][i];
                e3 += dop853::e3[j] * k_[j][i];
            }
            const double sk = control_.abs_tol + control_.rel_tol * std::max(std::abs(y_[i]), std::abs(y_new_[i]));
            err5 = std::max(err5, (e5 / sk) * (e5 / sk));
            err3 = std::max(err3, (e3 / sk) * (e3 / sk));
        }
        if (err5 == 0.0 && err3 == 0.0) return 0.0;
        return std::abs(h) * err5 / std::sqrt(err5 + 0.01 * err3);
    }

    /// After an accepted step k_[0] holds f at the step start and f0_ the
    /// derivative at its end.
    void prepare_dense() const {
        const std::size_t n = y_.size();
        const double h = h_prev_;
        std::vector<State>& k = k_;
        k[kLast] = f0_;
        for (std::size_t s = kLast + 1; s < dop853::kExtended; ++s) stage(s, t_prev_, y_old_, h, k);
        for (std::size_t i = 0; i < n; ++i) {
            const double dy = y_[i] - y_old_[i];
            f_[0][i] = dy;
            f_[1][i] = h * k[0][i] - dy;
            f_[2][i] = 2.0 * dy - h * (f0_[i] + k[0][i]);
            for (std::size_t r = 0; r < 4; ++r) {
                double acc = 0.0;
                for (std::size_t j = 0; j < dop853::kExtended; ++j) acc += dop853::d[r][j] * k[j][i];
                f_[3 + r][i] = h * acc;
            }
        }
        dense_ready_ = true;
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
    State y_, y_new_, y_old_, f0_;
    mutable State y_stage_;
    mutable std::vector<State> k_ = std::vector<State>(dop853::kExtended);
    mutable std::array<State, 7> f_;
    mutable bool dense_ready_ = false;
};

}  // namespace vortexred::ode
