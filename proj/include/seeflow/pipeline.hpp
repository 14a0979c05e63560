#pragma once

// Frames → per-frame text lines + per-pair action events → coding steps.

#include <vector>

#include "seeflow/action.hpp"
#include "seeflow/change_detection.hpp"
#include "seeflow/frame.hpp"
#include "seeflow/steps.hpp"
#include "seeflow/text.hpp"
#include "seeflow/text_backend.hpp"

namespace seeflow {

struct Perception {
  std::vector<std::vector<TextLine>> lines;  // one list per frame
  std::vector<ActionEvent> events;
};

inline Perception perceive(const FrameSequence& frames, const TextBackend& text, const ActionBackend& actions,
                           int diff_tolerance = 0) {
  Perception p;
  p.lines.reserve(frames.size());
  for (const auto& f : frames) p.lines.push_back(extract_lines(text, f));
  for (std::size_t i = 0; i + 1 < frames.size(); ++i) {
    const auto region = diff_region(frames[i], frames[i + 1], diff_tolerance);
    if (!region) continue;
    const auto action = actions.recognize(frames[i], frames[i + 1], *region, ActionContext{&p.lines[i], &p.lines[i + 1]});
    if (!action) continue;
    p.events.push_back(ActionEvent{*action, *region, i, i + 1});
  }
  return p;
}

inline SequenceInfo sequence_info(const FrameSequence& frames) {
  return SequenceInfo{frames.size(), frames.fps(), frames.source_id()};
}

inline IdentificationResult extract_steps_detailed(const FrameSequence& frames, const TextBackend& text,
                                                   const ActionBackend& actions, int diff_tolerance = 0,
                                                   const StepConfig& config = {}) {
  const auto p = perceive(frames, text, actions, diff_tolerance);
  return identify_steps_detailed(sequence_info(frames), p.events, p.lines, config);
}

inline std::vector<CodingStep> extract_steps(const FrameSequence& frames, const TextBackend& text,
                                             const ActionBackend& actions, int diff_tolerance = 0,
                                             const StepConfig& config = {}) {
  return extract_steps_detailed(frames, text, actions, diff_tolerance, config).steps;
}

}  // namespace seeflow
