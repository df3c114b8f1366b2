#ifndef SSMR_REFERENCE_VALUES_HPP
#define SSMR_REFERENCE_VALUES_HPP

#include <array>

#include "ssm.hpp"

// Reference results for the I-80 lane-change data, kept for
// side-by-side comparison with runs on the same trajectory data.
// Values are copied as printed, including the lane-2 total of 40 whose
// direction counts sum to 38.

namespace ssmr::reference {

inline constexpr std::size_t kept_before_lane_exclusion = 320;
inline constexpr std::size_t kept_events = 199;
inline constexpr std::size_t left_events = 168;
inline constexpr std::size_t right_events = 31;
/// DRAC ratios at +1 (collision course with the follower only) and -1 (leader only).
inline constexpr std::size_t drac_follower_only = 156;
inline constexpr std::size_t drac_leader_only = 32;

struct LaneCounts {
    int lane;
    std::size_t right;
    std::size_t left;
    std::size_t total;
};

inline constexpr std::array<LaneCounts, 5> lane_counts{{
    {2, 0, 38, 40},
    {3, 4, 27, 31},
    {4, 7, 44, 51},
    {5, 6, 59, 65},
    {6, 14, 0, 14},
}};

struct StatisticAndP {
    SsmKind kind;
    double statistic;
    double p_value;
};

inline constexpr std::array<StatisticAndP, 4> wilcoxon_overall{{
    {SsmKind::th, 14918, 5.06e-10},
    {SsmKind::picud, 12945, 1.15e-4},
    {SsmKind::drac, 16470, 9.97e-20},
    {SsmKind::ittc, 15948, 8.29e-14},
}};

struct SpearmanRow {
    SsmKind kind;
    std::array<double, 3> rho;  // v_ego, v_lead, v_follow
    std::array<double, 3> p_value;
};

inline constexpr std::array<SpearmanRow, 4> spearman{{
    {SsmKind::th,
     {0.0585823723721705, 0.02776762600883204, 0.046852444038373686},
     {0.4111303010389328, 0.6970409058378425, 0.5110957822877924}},
    {SsmKind::picud,
     {0.3347201934525483, 0.12270290848180294, 0.046852444038373686},
     {0.0, 0.08424607603382729, 0.5110957822877924}},
    {SsmKind::drac,
     {0.414984783265845765, 0.1173608045877719, 0.046852444038373686},
     {0.0, 0.09876751343166058, 0.5110957822877924}},
    {SsmKind::ittc,
     {0.5272162256926984, 0.002014618547281864, 0.11361961321760317},
     {0.0, 0.9774701870532531, 0.11006891244143477}},
}};

inline constexpr std::array<StatisticAndP, 4> kruskal_by_lane{{
    {SsmKind::th, 8.52552940745204, 0.0741171591517968},
    {SsmKind::picud, 14.004658327420316, 0.007280203099052684},
    {SsmKind::drac, 6.066186467981345, 0.19425965235597878},
    {SsmKind::ittc, 12.462285473205384, 0.014225122917383563},
}};

inline constexpr std::array<StatisticAndP, 4> kruskal_by_direction{{
    {SsmKind::th, 0.0755875576037397, 0.7833685473867442},
    {SsmKind::picud, 0.8029493087557285, 0.37021303502492386},
    {SsmKind::drac, 1.4685979418582908, 0.22556703722461036},
    {SsmKind::ittc, 13.562500000000114, 0.00023074954964083063},
}};

inline constexpr std::array<StatisticAndP, 4> kruskal_left_by_lane{{
    {SsmKind::th, 7.465286534755705, 0.058457129975731964},
    {SsmKind::picud, 13.69264990424847, 0.003354811205488093},
    {SsmKind::drac, 3.723931241834033, 0.29285904999280366},
    {SsmKind::ittc, 6.602712213790937, 0.08569862032878196},
}};

struct LaneWilcoxon {
    SsmKind kind;
    int lane;
    double statistic;
    double p_value;
};

inline constexpr std::array<LaneWilcoxon, 16> wilcoxon_left_by_lane{{
    {SsmKind::th, 2, 582, 0.0003526316271973612},
    {SsmKind::th, 3, 330, 0.0003526316271973612},
    {SsmKind::th, 4, 797, 0.00021222297129865923},
    {SsmKind::th, 5, 1070, 0.08130071611813722},
    {SsmKind::picud, 2, 586, 0.0008882989962719475},
    {SsmKind::picud, 3, 308, 0.002125062183838671},
    {SsmKind::picud, 4, 651, 0.034337641488415234},
    {SsmKind::picud, 5, 842, 0.6272440704298268},
    {SsmKind::drac, 2, 658, 1.4767707340532819e-06},
    {SsmKind::drac, 3, 326.5, 0.00014892154569324883},
    {SsmKind::drac, 4, 893, 8.658367801244551e-08},
    {SsmKind::drac, 5, 1355.5, 3.283570175174748e-05},
    {SsmKind::ittc, 2, 677, 4.395666770206776e-06},
    {SsmKind::ittc, 3, 326, 0.0004984062045524902},
    {SsmKind::ittc, 4, 895, 1.5201596083528361e-06},
    {SsmKind::ittc, 5, 1263, 0.0021645118898306163},
}};

}

#endif
