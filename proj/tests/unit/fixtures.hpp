#pragma once
// Generated by tests/oracles/make_fixtures.py; do not edit by hand.
#include <cstdint>
#include <limits>
namespace fixtures {
inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr std::uint64_t kGoldenA = 3913ULL, kGoldenB = 2145ULL;
inline constexpr std::uint64_t kGoldenHash[] = {1, 3, 1, 3, 1, 3, 1, 3, 1, 3, 1, 3, 0, 2, 0, 2};
inline constexpr std::uint64_t kSplitSeed7[] = {0, 0, 0, 1, 1, 1};
inline constexpr std::uint64_t kDerived_1_2_3 = 14353343830262008873ULL;
inline constexpr double kKlHalf = 0.20751874963942190927;
inline constexpr double kJsHalf = 0.048794940695398532581;
inline constexpr double kBcHalf = 0.96592582628906828675;
inline constexpr double kDbHalf = 0.050015686523504151079;
inline constexpr double kHellingerHalf = 0.18459191128251452516;
inline constexpr std::uint64_t kStirling_10_3 = 9330ULL;
inline constexpr std::uint64_t kStirlingBrute_6[] = {1, 31, 90, 65, 15, 1};
inline constexpr double kStarKl = 0.32192809488736234787;  // at ((0,), (1, 2))
inline constexpr double kFullKl = 0.39657842846620870436;
inline constexpr double kPascal20[] = {0.031020132201767494, 0.04772328031041152, 0.06118369270565578, 0.07059656850652593, 0.07602707377625871, 0.07797648592436793, 0.07711960146366059, 0.07415346294582746, 0.06971693097470959, 0.06435409013050114, 0.05850371830045562, 0.05250333693630641, 0.04660059491388129, 0.04096755596824734, 0.03571530520308744, 0.03090747565651803, 0.02657203789474395, 0.022711143499781147, 0.019309069372283574, 0.016338443315009193};
inline constexpr double kPoisson20[] = {0.0004547421920233032, 0.0022737109601165166, 0.00757903653372172, 0.01894759133430432, 0.037895182668608675, 0.06315863778101438, 0.09022662540144906, 0.1127832817518114, 0.12531475750201296, 0.12531475750201296, 0.1139225068200115, 0.09493542235000989, 0.07302724796154618, 0.05216231997253266, 0.034774879981688586, 0.021734299988555306, 0.012784882346208983, 0.007102712414560598, 0.0037382696918739845, 0.001869134845937002};
inline constexpr double kBinomial20[] = {1.9073486328124985e-06, 3.623962402343757e-05, 0.00032615661621093766, 0.0018482208251953088, 0.007392883300781242, 0.022178649902343743, 0.05175018310546871, 0.09610748291015628, 0.1441612243652344, 0.17619705200195301, 0.17619705200195307, 0.14416122436523443, 0.09610748291015628, 0.05175018310546871, 0.022178649902343747, 0.007392883300781242, 0.0018482208251953088, 0.00032615661621093766, 3.623962402343757e-05, 1.9073486328124992e-06};
inline constexpr double kZipf2_20[] = {0.6265023354055452, 0.1566255838513863, 0.06961137060061613, 0.03915639596284658, 0.02506009341622181, 0.017402842650154033, 0.012785761947051942, 0.009789098990711644, 0.007734596733401792, 0.006265023354055452, 0.005177705251285498, 0.004350710662538508, 0.0037071144106836994, 0.0031964404867629854, 0.0027844548240246454, 0.002447274747677911, 0.002167828150192198, 0.001933649183350448, 0.0017354635329793497, 0.001566255838513863};
inline constexpr double kChi2_999_df99 = 148.23035916510173;
}  // namespace fixtures
