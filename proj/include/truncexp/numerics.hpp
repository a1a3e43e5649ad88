#pragma once

#include <cmath>

// Small numerically-careful building blocks shared by the model and the
// estimator. Everything here is a pure function of its arguments.

namespace truncexp::numerics {

// 1 - e^{-x} without cancellation for small x >= 0.
inline double one_minus_exp(double x) {
    return -std::expm1(-x);
}

// u(x) = x / (e^x - 1), continuously extended with u(0) = 1.
// Direct evaluation is 0/0-prone near zero, so a Maclaurin series takes over.
inline double u_ratio(double x) {
    if (std::fabs(x) < 0.02) {
        const double x2 = x * x;
        return 1.0 - 0.5 * x + x2 * (1.0 / 12.0) - x2 * x2 * (1.0 / 720.0) +
               x2 * x2 * x2 * (1.0 / 30240.0);
    }
    return x / std::expm1(x);
}

// u(x) - 1, accurate near zero where u(x) ~ 1 - x/2 would cancel.
inline double u_ratio_m1(double x) {
    if (std::fabs(x) < 0.02) {
        const double x2 = x * x;
        return -0.5 * x + x2 * (1.0 / 12.0) - x2 * x2 * (1.0 / 720.0) +
               x2 * x2 * x2 * (1.0 / 30240.0);
    }
    if (x > 709.0) {
        return -1.0; // e^x overflows; u(x) has fully decayed to 0
    }
    const double e = std::expm1(x);
    return (x - e) / e;
}

// First derivative of u(x). Away from zero this is (u(x)/x)(1 - x/(1-e^{-x})).
inline double u_ratio_d1(double x) {
    if (std::fabs(x) < 0.02) {
        const double x2 = x * x;
        return -0.5 + x * (1.0 / 6.0) - x2 * x * (1.0 / 180.0) +
               x2 * x2 * x * (1.0 / 5040.0);
    }
    return (u_ratio(x) / x) * (1.0 - x / one_minus_exp(x));
}

// q(x) - 1 where q(x) = x^2 e^{-x} / (1 - e^{-x})^2 = (t / sinh t)^2, t = x/2.
// q(0) = 1; the difference is returned directly so that sums of the form
// 2 - q(a) - q(b) keep full precision when a and b are small.
inline double q_ratio_m1(double x) {
    if (std::fabs(x) < 0.1) {
        const double x2 = x * x;
        return x2 * (-1.0 / 12.0 + x2 * (1.0 / 240.0 - x2 * (1.0 / 6048.0)));
    }
    const double t = 0.5 * x;
    if (t >= 700.0) {
        return -1.0; // sinh would overflow; the ratio has fully decayed
    }
    const double r = t / std::sinh(t);
    return r * r - 1.0;
}

// 64-point Gauss-Legendre rule on [-1,1], stored as the positive half of the
// symmetric node set (nodes +/- x_k share the weight w_k).
inline constexpr double kGaussLegendreNode[32] = {
    0.02435029266342443250896, 0.07299312178779903944954,
    0.1214628192961205544704,  0.1696444204239928180373,
    0.2174236437400070841496,  0.264687162208767416374,
    0.3113228719902109561575,  0.3572201583376681159504,
    0.4022701579639916036958,  0.4463660172534640879849,
    0.4894031457070529574785,  0.531279464019894545658,
    0.5718956462026340342839,  0.6111553551723932502489,
    0.6489654712546573398578,  0.6852363130542332425636,
    0.7198818501716108268489,  0.7528199072605318966119,
    0.7839723589433414076102,  0.8132653151227975597419,
    0.8406292962525803627517,  0.8659993981540928197608,
    0.8893154459951141058534,  0.9105221370785028057564,
    0.9295691721319395758215,  0.9464113748584028160625,
    0.9610087996520537189186,  0.9733268277899109637419,
    0.9833362538846259569313,  0.9910133714767443207394,
    0.9963401167719552793469,  0.9993050417357721394569,
};
inline constexpr double kGaussLegendreWeight[32] = {
    0.04869095700913972038337,  0.0485754674415034269348,
    0.04834476223480295716977,  0.04799938859645830772813,
    0.04754016571483030866228,  0.04696818281621001732533,
    0.04628479658131441729595,  0.04549162792741814447977,
    0.04459055816375656306013,  0.04358372452932345337683,
    0.04247351512365358900734,  0.04126256324262352861016,
    0.03995374113272034138666,  0.03855015317861562912896,
    0.03705512854024004604042,  0.03547221325688238381069,
    0.03380516183714160939157,  0.03205792835485155358547,
    0.03023465707240247886797,  0.02833967261425948322751,
    0.02637746971505465867169,  0.02435270256871087333818,
    0.0222701738083832541593,   0.02013482315353020937234,
    0.01795171577569734308505,  0.01572603047602471932197,
    0.01346304789671864259806,  0.01116813946013112881859,
    0.008846759826363947723031, 0.006504457968978362856117,
    0.004147033260562467635288, 0.001783280721696432947296,
};

// Composite 64-point Gauss-Legendre integration of f over [a, b] split into
// `panels` equal panels. Exact for smooth integrands at the scales used here.
template <class F>
double gauss_legendre(F&& f, double a, double b, int panels = 1) {
    if (!(b > a)) {
        return 0.0;
    }
    if (panels < 1) {
        panels = 1;
    }
    const double width = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * width;
        const double mid = lo + 0.5 * width;
        const double half = 0.5 * width;
        double acc = 0.0;
        for (int k = 0; k < 32; ++k) {
            const double dx = half * kGaussLegendreNode[k];
            acc += kGaussLegendreWeight[k] * (f(mid - dx) + f(mid + dx));
        }
        total += half * acc;
    }
    return total;
}

} // namespace truncexp::numerics
