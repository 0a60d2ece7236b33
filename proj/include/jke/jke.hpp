#pragma once

#include "jke/adc_model.hpp"
#include "jke/adversary_race.hpp"
#include "jke/core_model.hpp"
#include "jke/protocol_sim/jamming.hpp"
#include "jke/protocol_sim/kem.hpp"
#include "jke/protocol_sim/session.hpp"
#include "jke/secrecy_analysis.hpp"
