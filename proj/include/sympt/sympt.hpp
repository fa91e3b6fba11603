#pragma once

#include "sympt/binomial.hpp"
#include "sympt/campaign.hpp"
#include "sympt/classify.hpp"
#include "sympt/errors.hpp"
#include "sympt/extremal.hpp"
#include "sympt/oracle.hpp"
#include "sympt/random.hpp"
#include "sympt/spectra.hpp"
#include "sympt/symcore.hpp"
