// Generated by tests/oracles/make_reference.py; do not edit by hand.
// All values are adaptive-quadrature evaluations of the defining
// integrals at 25-digit working precision.
#pragma once

#include <complex>

namespace refvals {

using cd = std::complex<double>;

// Received-power mixture law, macro-tier constants, kappa = 0.008 /m.
// Rows: {r_m, x_watts, cdf, pdf}.
inline constexpr struct { double r, x, cdf, pdf; } kMixtureLaw[] = {
    {50.0, 2.8803043287591418729e-7, 0.065938532537157407641, 201587.86872148926396},
    {50.0, 1.4401521643795709364e-6, 0.29268990825540923251, 187037.47559194316846},
    {50.0, 0.000017281825972554851237, 0.94786090179566133429, 4853.8940970171704378},
    {200.0, 7.6317056967986595088e-10, 0.15254744595883566341, 154624267.71395923527},
    {200.0, 3.8158528483993297544e-9, 0.39907577129273959559, 45324043.890610585521},
    {200.0, 4.5790234180791957053e-8, 0.76051051461089405431, 2704822.2320470121311},
    {800.0, 2.0221103465008030466e-12, 0.19081983369546816183, 72998321631.328246988},
    {800.0, 1.0110551732504015233e-11, 0.49916922136349213062, 21384905189.507794508},
    {800.0, 1.213266207900481828e-10, 0.90981366096472991446, 717427342.13652728487},
};

// Partial means E[P 1{P <= t}] and full means, same constants.
// Rows: {r_m, t_watts, partial, full}.
inline constexpr struct { double r, t, partial, full; } kMixtureMoments[] = {
    {50.0, 7.2007608218978546822e-7, 5.2213140766373507186e-8, 5.8937247785025559199e-6},
    {50.0, 5.7606086575182837457e-6, 1.6308470542054045052e-6, 5.8937247785025559199e-6},
    {200.0, 1.9079264241996648772e-9, 2.2039317204161196942e-10, 5.135520572713584159e-8},
    {200.0, 1.5263411393597319018e-8, 2.3269143146802544728e-9, 5.135520572713584159e-8},
    {800.0, 5.0552758662520076165e-12, 7.3046081656172056693e-13, 6.5048152916719106232e-11},
    {800.0, 4.0442206930016060932e-11, 7.5972958855078707546e-12, 6.5048152916719106232e-11},
};

// Radial kernel J(b), real arguments spanning all three regimes and
// both regime boundaries.  Rows: {alpha, b, J}.
inline constexpr struct { double alpha, b, j; } kRadialKernelReal[] = {
    {4.28, 1.0e-6, 4.3859641500857335547e-7},
    {4.28, 0.05, 0.021741180585134596579},
    {4.28, 0.499, 0.20163287694875737559},
    {4.28, 0.501, 0.20237818586448815902},
    {4.28, 0.7, 0.27434784693539048726},
    {4.28, 5.0, 1.2678296738809636347},
    {4.28, 39.5, 4.1433430384658625027},
    {4.28, 40.5, 4.1979086459499964267},
    {4.28, 500.0, 14.704015261441568668},
    {4.28, 10000.0, 61.147609227195788992},
    {2.42, 1.0e-6, 2.3809522048955031579e-6},
    {2.42, 0.05, 0.11861140525993841459},
    {2.42, 0.499, 1.1478815586645779045},
    {2.42, 0.501, 1.1523339307779553015},
    {2.42, 0.7, 1.5900912597795160215},
    {2.42, 5.0, 9.5844484073232552411},
    {2.42, 39.5, 55.151204123609620581},
    {2.42, 40.5, 56.313044051530248592},
    {2.42, 500.0, 452.94702433112268967},
    {2.42, 10000.0, 5391.6002453179766217},
    {3.0, 1.0e-6, 9.9999987500002380952e-7},
    {3.0, 0.05, 0.049690450347781814419},
    {3.0, 0.499, 0.47059347315482412122},
    {3.0, 0.501, 0.47237539104740087508},
    {3.0, 0.7, 0.64601457379611213859},
    {3.0, 5.0, 3.4169795023863571084},
    {3.0, 39.5, 15.035699683067244438},
    {3.0, 40.5, 15.296811498512322445},
    {3.0, 500.0, 83.881276281320462795},
    {3.0, 10000.0, 621.22655943172306615},
};

// J(b) on transform-node rays (complex b, Re b > 0).
// Rows: {alpha, b, J}.
inline const struct { double alpha; cd b, j; } kRadialKernelComplex[] = {
    {4.28, {0.28941827054759847833, 0.078975088940988798327}, {0.12130776823006107928, 0.031432918871862574831}},
    {4.28, {6.7530929794439644943, 1.8427520752897386276}, {1.5525138900380265772, 0.25680044878236037862}},
    {4.28, {115.76730821903939133, 31.590035576395519331}, {7.2439730861940164735, 0.96898935678061032929}},
    {4.28, {0.071199468030242278201, 0.29142861175974212804}, {0.037029598643657559741, 0.12436271746006439338}},
    {4.28, {1.661320920705653158, 6.8000009410606496542}, {1.1804617741733726663, 1.1995092456767183818}},
    {4.28, {28.479787212096911281, 116.57144470389685121}, {5.8425108987967607993, 4.5475944225376667714}},
    {2.42, {0.28941827054759847833, 0.078975088940988798327}, {0.67601795645161488202, 0.18056437269786877251}},
    {2.42, {6.7530929794439644943, 1.8427520752897386276}, {12.495381290411281923, 2.9081165981354567005}},
    {2.42, {115.76730821903939133, 31.590035576395519331}, {135.54838348923539811, 30.445468754647417839}},
    {2.42, {0.071199468030242278201, 0.29142861175974212804}, {0.18299586771428155003, 0.6859642487404225237}},
    {2.42, {1.661320920705653158, 6.8000009410606496542}, {5.5380405726768147987, 11.858834604855673972}},
    {2.42, {28.479787212096911281, 116.57144470389685121}, {62.719054755965454466, 124.25554447785263405}},
};

// Shadowed single-link transform factor, macro-tier blocked branch:
// E[exp(-s B_N v^-alpha e^{beta xi})], sigma_dB = 8.  Rows: {v, s, value}.
inline const struct { double v; cd s, value; } kFarLinkFactor[] = {
    {200.0, 131032306.50252656211, 0.53318620477764330996},
    {200.0, 1310323065.0252656211, 0.16222258362310319689},
    {200.0, {1005710118.8444814033, 2469900788.9475812512}, {0.056765656176737831271, -0.090683292684408198072}},
    {500.0, 6615483992.2215264328, 0.53318620477764330996},
    {500.0, 66154839922.215264328, 0.16222258362310319689},
    {500.0, {50775716078.100080119, 124698935459.4241459}, {0.056765656176737831271, -0.090683292684408198072}},
};

// Far-field aggregate transform beyond r_n, all links blocked branch,
// macro tier, lambda = 2e-6 /m^2.  Rows: {r_n, s, value}.
inline const struct { double rn; cd s, value; } kFarFieldLt[] = {
    {150.0, 15300322.48079043728, 0.92858723653104714886},
    {150.0, 153003224.8079043728, 0.70691937836035648888},
    {150.0, 1530032248.079043728, 0.28815704624619624001},
    {150.0, {440378680.7783717098, 600842258.79007497673}, {0.42934244183155597043, -0.18958552871651682076}},
    {400.0, 1018232039.9734501518, 0.59045080002868508112},
    {400.0, 10182320399.734501518, 0.084889217228459100949},
    {400.0, 101823203997.34501518, 0.00014366914632097421648},
    {400.0, {29307073955.6472945, 39985878705.379246053}, {-0.0045336712657407983092, -0.00084669037444090031524}},
};

// Truncated-power transform E[e^{-sP} 1{P <= t}], macro tier, r = 200 m,
// t = blocked-branch median at 150 m.  Rows: {s, value}.
inline const struct { cd s, value; } kTruncatedLt[] = {
    {0.0, 0.59899303169426758689},
    {53551128.682766530482, 0.50756274165591760479},
    {459009674.42371311841, 0.24838031261922307218},
    {{440378680.7783717098, 240336903.51602999069}, {0.23314122589728566709, -0.064845828552320732934}},
    {{440378680.7783717098, 1321852969.3381649488}, {0.088884256158275431265, -0.11322397560831009179}},
};
inline const double kTruncatedLtR = 200.0;
inline const double kTruncatedLtT = 1.307161991200512947e-8;

// Ordered-distance joint log density at lambda = 3e-6 /m^2,
// r = (100, 250, 400).
inline const double kOrderedLogPdf = -18.026932431425237754;

}  // namespace refvals
