#pragma once

#include "jobfit/ability.hpp"
#include "jobfit/dataio.hpp"
#include "jobfit/error.hpp"
#include "jobfit/job.hpp"
#include "jobfit/merging.hpp"
#include "jobfit/random.hpp"
#include "jobfit/report_json.hpp"
#include "jobfit/simulate.hpp"
#include "jobfit/sweep.hpp"
#include "jobfit/theory.hpp"
#include "jobfit/worker.hpp"
