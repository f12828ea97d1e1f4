#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "fbrs/error.hpp"

namespace fbrs::ode {

template <std::size_t N>
using State = std::array<double, N>;

namespace dop853 {

// Dormand-Prince 8(5,3) tableau (Hairer, Norsett & Wanner).
inline constexpr double c2 = 0.526001519587677318785587544488e-01;
inline constexpr double c3 = 0.789002279381515978178381316732e-01;
inline constexpr double c4 = 0.118350341907227396726757197510e+00;
inline constexpr double c5 = 0.281649658092772603273242802490e+00;
inline constexpr double c6 = 0.333333333333333333333333333333e+00;
inline constexpr double c7 = 0.25e+00;
inline constexpr double c8 = 0.307692307692307692307692307692e+00;
inline constexpr double c9 = 0.651282051282051282051282051282e+00;
inline constexpr double c10 = 0.6e+00;
inline constexpr double c11 = 0.857142857142857142857142857142e+00;

inline constexpr double a21 = 5.26001519587677318785587544488e-2;
inline constexpr double a31 = 1.97250569845378994544595329183e-2;
inline constexpr double a32 = 5.91751709536136983633785987549e-2;
inline constexpr double a41 = 2.95875854768068491816892993775e-2;
inline constexpr double a43 = 8.87627564304205475450678981324e-2;
inline constexpr double a51 = 2.41365134159266685502369798665e-1;
inline constexpr double a53 = -8.84549479328286085344864962717e-1;
inline constexpr double a54 = 9.24834003261792003115737966543e-1;
inline constexpr double a61 = 3.7037037037037037037037037037e-2;
inline constexpr double a64 = 1.70828608729473871279604482173e-1;
inline constexpr double a65 = 1.25467687566822425016691814123e-1;
inline constexpr double a71 = 3.7109375e-2;
inline constexpr double a74 = 1.70252211019544039314978060272e-1;
inline constexpr double a75 = 6.02165389804559606850219397283e-2;
inline constexpr double a76 = -1.7578125e-2;
inline constexpr double a81 = 3.70920001185047927108779319836e-2;
inline constexpr double a84 = 1.70383925712239993810214054705e-1;
inline constexpr double a85 = 1.07262030446373284651809199168e-1;
inline constexpr double a86 = -1.53194377486244017527936158236e-2;
inline constexpr double a87 = 8.27378916381402288758473766002e-3;
inline constexpr double a91 = 6.24110958716075717114429577812e-1;
inline constexpr double a94 = -3.36089262944694129406857109825e0;
inline constexpr double a95 = -8.68219346841726006818189891453e-1;
inline constexpr double a96 = 2.75920996994467083049415600797e1;
inline constexpr double a97 = 2.01540675504778934086186788979e1;
inline constexpr double a98 = -4.34898841810699588477366255144e1;
inline constexpr double a101 = 4.77662536438264365890433908527e-1;
inline constexpr double a104 = -2.48811461997166764192642586468e0;
inline constexpr double a105 = -5.90290826836842996371446475743e-1;
inline constexpr double a106 = 2.12300514481811942347288949897e1;
inline constexpr double a107 = 1.52792336328824235832596922938e1;
inline constexpr double a108 = -3.32882109689848629194453265587e1;
inline constexpr double a109 = -2.03312017085086261358222928593e-2;
inline constexpr double a111 = -9.3714243008598732571704021658e-1;
inline constexpr double a114 = 5.18637242884406370830023853209e0;
inline constexpr double a115 = 1.09143734899672957818500254654e0;
inline constexpr double a116 = -8.14978701074692612513997267357e0;
inline constexpr double a117 = -1.85200656599969598641566180701e1;
inline constexpr double a118 = 2.27394870993505042818970056734e1;
inline constexpr double a119 = 2.49360555267965238987089396762e0;
inline constexpr double a1110 = -3.0467644718982195003823669022e0;
inline constexpr double a121 = 2.27331014751653820792359768449e0;
inline constexpr double a124 = -1.05344954667372501984066689879e1;
inline constexpr double a125 = -2.00087205822486249909675718444e0;
inline constexpr double a126 = -1.79589318631187989172765950534e1;
inline constexpr double a127 = 2.79488845294199600508499808837e1;
inline constexpr double a128 = -2.85899827713502369474065508674e0;
inline constexpr double a129 = -8.87285693353062954433549289258e0;
inline constexpr double a1210 = 1.23605671757943030647266201528e1;
inline constexpr double a1211 = 6.43392746015763530355970484046e-1;

inline constexpr double b1 = 5.42937341165687622380535766363e-2;
inline constexpr double b6 = 4.45031289275240888144113950566e0;
inline constexpr double b7 = 1.89151789931450038304281599044e0;
inline constexpr double b8 = -5.8012039600105847814672114227e0;
inline constexpr double b9 = 3.1116436695781989440891606237e-1;
inline constexpr double b10 = -1.52160949662516078556178806805e-1;
inline constexpr double b11 = 2.01365400804030348374776537501e-1;
inline constexpr double b12 = 4.47106157277725905176885569043e-2;

inline constexpr double e31 = 0.244094488188976377952755905512e+00;
inline constexpr double e32 = 0.733846688281611857341361741547e+00;
inline constexpr double e33 = 0.220588235294117647058823529412e-01;

inline constexpr double e51 = 0.1312004499419488073250102996e-01;
inline constexpr double e56 = -0.1225156446376204440720569753e+01;
inline constexpr double e57 = -0.4957589496572501915214079952e+00;
inline constexpr double e58 = 0.1664377182454986536961530415e+01;
inline constexpr double e59 = -0.3503288487499736816886487290e+00;
inline constexpr double e510 = 0.3341791187130174790297318841e+00;
inline constexpr double e511 = 0.8192320648511571246570742613e-01;
inline constexpr double e512 = -0.2235530786388629525884427845e-01;

}  // namespace dop853

template <std::size_t N>
struct StepAttempt {
  State<N> y{};
  double error_norm = 0.0;  // scaled; <= 1 means acceptable
};

/// One explicit DOP853 step of size h from (t, y) with k1 = rhs(t, y).
/// Returns the 8th-order solution and Hairer's combined 5th/3rd-order error
/// norm for the given tolerances.
template <std::size_t N, class Rhs>
StepAttempt<N> dop853_step(Rhs& rhs, double t, const State<N>& y, const State<N>& k1, double h, double rtol,
                           double atol) {
  using namespace dop853;
  State<N> k2, k3, k4, k5, k6, k7, k8, k9, k10, k11, k12, w;
  auto stage = [&](double c, State<N>& out, auto&& combine) {
    for (std::size_t i = 0; i < N; ++i) w[i] = y[i] + h * combine(i);
    out = rhs(t + c * h, w);
  };
  stage(c2, k2, [&](std::size_t i) { return a21 * k1[i]; });
  stage(c3, k3, [&](std::size_t i) { return a31 * k1[i] + a32 * k2[i]; });
  stage(c4, k4, [&](std::size_t i) { return a41 * k1[i] + a43 * k3[i]; });
  stage(c5, k5, [&](std::size_t i) { return a51 * k1[i] + a53 * k3[i] + a54 * k4[i]; });
  stage(c6, k6, [&](std::size_t i) { return a61 * k1[i] + a64 * k4[i] + a65 * k5[i]; });
  stage(c7, k7, [&](std::size_t i) { return a71 * k1[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]; });
  stage(c8, k8, [&](std::size_t i) { return a81 * k1[i] + a84 * k4[i] + a85 * k5[i] + a86 * k6[i] + a87 * k7[i]; });
  stage(c9, k9, [&](std::size_t i) {
    return a91 * k1[i] + a94 * k4[i] + a95 * k5[i] + a96 * k6[i] + a97 * k7[i] + a98 * k8[i];
  });
  stage(c10, k10, [&](std::size_t i) {
    return a101 * k1[i] + a104 * k4[i] + a105 * k5[i] + a106 * k6[i] + a107 * k7[i] + a108 * k8[i] + a109 * k9[i];
  });
  stage(c11, k11, [&](std::size_t i) {
    return a111 * k1[i] + a114 * k4[i] + a115 * k5[i] + a116 * k6[i] + a117 * k7[i] + a118 * k8[i] +
           a119 * k9[i] + a1110 * k10[i];
  });
  stage(1.0, k12, [&](std::size_t i) {
    return a121 * k1[i] + a124 * k4[i] + a125 * k5[i] + a126 * k6[i] + a127 * k7[i] + a128 * k8[i] +
           a129 * k9[i] + a1210 * k10[i] + a1211 * k11[i];
  });

  StepAttempt<N> out;
  double err3 = 0.0;
  double err5 = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double incr = b1 * k1[i] + b6 * k6[i] + b7 * k7[i] + b8 * k8[i] + b9 * k9[i] + b10 * k10[i] +
                        b11 * k11[i] + b12 * k12[i];
    out.y[i] = y[i] + h * incr;
    const double scale = atol + rtol * std::max(std::abs(y[i]), std::abs(out.y[i]));
    const double e3 = (incr - e31 * k1[i] - e32 * k9[i] - e33 * k12[i]) / scale;
    const double e5 = (e51 * k1[i] + e56 * k6[i] + e57 * k7[i] + e58 * k8[i] + e59 * k9[i] + e510 * k10[i] +
                       e511 * k11[i] + e512 * k12[i]) /
                      scale;
    err3 += e3 * e3;
    err5 += e5 * e5;
  }
  const double denom = err5 + 0.01 * err3;
  out.error_norm = denom > 0.0 ? std::abs(h) * err5 / std::sqrt(static_cast<double>(N) * denom) : 0.0;
  return out;
}

/// Adaptive DOP853 driver. Each advance() performs one accepted step and keeps
/// the step's starting state so callers can evaluate the state anywhere inside
/// the step by re-stepping from it (state_at).
template <std::size_t N, class Rhs>
class AdaptiveDop853 {
 public:
  AdaptiveDop853(Rhs rhs, double rtol, double atol, double h_max)
      : rhs_(std::move(rhs)), rtol_(rtol), atol_(atol), h_max_(h_max) {
    if (!(rtol > 0.0) || !(atol > 0.0)) throw Error(Errc::InvalidParameter, "ODE tolerances must be positive");
  }

  void initialize(double t0, const State<N>& y0) {
    t_ = t_prev_ = t0;
    y_ = y_prev_ = y0;
    f_ = f_prev_ = rhs_(t0, y0);
    double ynorm = 0.0;
    double fnorm = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double scale = atol_ + rtol_ * std::abs(y0[i]);
      ynorm += (y0[i] / scale) * (y0[i] / scale);
      fnorm += (f_[i] / scale) * (f_[i] / scale);
    }
    h_ = (ynorm > 1e-10 && fnorm > 1e-10) ? 0.01 * std::sqrt(ynorm / fnorm) : 1e-6;
    h_ = std::min(h_, h_max_);
    rejected_last_ = false;
  }

  /// Takes one accepted step, not past t_end.
  void advance(double t_end) {
    t_prev_ = t_;
    y_prev_ = y_;
    f_prev_ = f_;
    for (int attempt = 0; attempt < 1000; ++attempt) {
      double h = std::min(h_, t_end - t_);
      const bool last = h == t_end - t_;
      if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t_))) {
        throw Error(Errc::StepFailure, "step size underflow at t = " + std::to_string(t_));
      }
      const auto trial = dop853_step<N>(rhs_, t_, y_, f_, h, rtol_, atol_);
      ++steps_attempted_;
      const double err = trial.error_norm;
      if (err <= 1.0) {
        double factor = err == 0.0 ? 6.0 : std::clamp(0.9 * std::pow(err, -0.125), 0.333, 6.0);
        if (rejected_last_) factor = std::min(factor, 1.0);
        t_ = last ? t_end : t_ + h;
        y_ = trial.y;
        f_ = rhs_(t_, y_);
        if (!last || factor < 1.0) h_ = std::min(h * factor, h_max_);
        rejected_last_ = false;
        return;
      }
      h_ = h * std::max(0.9 * std::pow(err, -0.125), 0.333);
      rejected_last_ = true;
    }
    throw Error(Errc::StepFailure, "too many rejected steps at t = " + std::to_string(t_));
  }

  /// State at time tau within the last accepted step [t_prev, t].
  State<N> state_at(double tau) {
    if (tau == t_prev_) return y_prev_;
    if (tau == t_) return y_;
    return dop853_step<N>(rhs_, t_prev_, y_prev_, f_prev_, tau - t_prev_, rtol_, atol_).y;
  }

  State<N> derivative(double t, const State<N>& y) { return rhs_(t, y); }

  double t() const noexcept { return t_; }
  double t_prev() const noexcept { return t_prev_; }
  const State<N>& y() const noexcept { return y_; }
  const State<N>& y_prev() const noexcept { return y_prev_; }
  std::size_t steps_attempted() const noexcept { return steps_attempted_; }

 private:
  Rhs rhs_;
  double rtol_;
  double atol_;
  double h_max_;
  double h_ = 0.0;
  double t_ = 0.0;
  double t_prev_ = 0.0;
  State<N> y_{};
  State<N> y_prev_{};
  State<N> f_{};
  State<N> f_prev_{};
  bool rejected_last_ = false;
  std::size_t steps_attempted_ = 0;
};

}  // namespace fbrs::ode
