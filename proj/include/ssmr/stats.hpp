#ifndef SSMR_STATS_HPP
#define SSMR_STATS_HPP

#include "stats/kruskal.hpp"
#include "stats/rank.hpp"
#include "stats/report.hpp"
#include "stats/spearman.hpp"
#include "stats/special_functions.hpp"
#include "stats/wilcoxon.hpp"

#endif
