#pragma once

#include "seeflow/action.hpp"
#include "seeflow/change_detection.hpp"
#include "seeflow/error.hpp"
#include "seeflow/evaluation.hpp"
#include "seeflow/font.hpp"
#include "seeflow/frame.hpp"
#include "seeflow/frame_io.hpp"
#include "seeflow/geometry.hpp"
#include "seeflow/heuristic_action.hpp"
#include "seeflow/layout.hpp"
#include "seeflow/pipeline.hpp"
#include "seeflow/steps.hpp"
#include "seeflow/synth.hpp"
#include "seeflow/text.hpp"
#include "seeflow/text_backend.hpp"
