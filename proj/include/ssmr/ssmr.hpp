#ifndef SSMR_SSMR_HPP
#define SSMR_SSMR_HPP

#include "errors.hpp"
#include "events.hpp"
#include "fixture.hpp"
#include "histogram.hpp"
#include "pipeline.hpp"
#include "ratio.hpp"
#include "reference_values.hpp"
#include "report_io.hpp"
#include "ssm.hpp"
#include "stats.hpp"
#include "trajectory.hpp"

#endif
