#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "seeflow/heuristic_action.hpp"
#include "seeflow/pipeline.hpp"
#include "seeflow/synth.hpp"

using namespace seeflow;

namespace {

// Heuristic label for every visible pair of a rendered session, keyed by frame_a.
std::map<std::size_t, ActionType> heuristic_labels(const SynthResult& r, const SessionScript& s) {
  const RasterTextBackend text(s.layout());
  const HeuristicActionBackend actions(HeuristicActionConfig{s.cell_height});
  const auto p = perceive(r.frames, text, actions);
  std::map<std::size_t, ActionType> out;
  for (const auto& e : p.events) out[e.frame_a_index] = e.action;
  return out;
}

std::map<std::size_t, ActionType> scripted_labels(const SynthResult& r) {
  std::map<std::size_t, ActionType> out;
  for (const auto& l : r.actions) out[l.frame_a] = l.action;
  return out;
}

ActionType single(const SessionScript& s) {
  const auto r = render_session(s);
  const auto got = heuristic_labels(r, s);
  EXPECT_EQ(got.size(), 1u);
  return got.empty() ? ActionType::MoveCursor : got.begin()->second;
}

}  // namespace

TEST(ActionCategory, PartitionIsFixed) {
  std::map<ActionCategory, std::set<ActionType>> parts;
  for (ActionType a : kAllActionTypes) parts[category_of(a)].insert(a);
  EXPECT_EQ(parts[ActionCategory::Skip],
            (std::set<ActionType>{ActionType::MoveCursor, ActionType::MoveMouseEditable, ActionType::MoveMouseNonEditable}));
  EXPECT_EQ(parts[ActionCategory::CodingRelated],
            (std::set<ActionType>{ActionType::EnterChars, ActionType::DeleteChars, ActionType::SelectChars}));
  EXPECT_EQ(parts[ActionCategory::NonCoding],
            (std::set<ActionType>{ActionType::ScrollContent, ActionType::TriggerOrLeavePopup, ActionType::SwitchWindows,
                                  ActionType::OtherAction}));
  for (ActionType a : kAllActionTypes) EXPECT_EQ(is_bridgeable(a), a == ActionType::ScrollContent);
  EXPECT_EQ(category_of(ActionType::EnterChars), ActionCategory::CodingRelated);
  EXPECT_EQ(category_of(ActionType::MoveCursor), ActionCategory::Skip);
  EXPECT_EQ(category_of(ActionType::SwitchWindows), ActionCategory::NonCoding);
}

TEST(ActionNames, RoundTripAndAreDistinct) {
  std::set<std::string_view> names;
  for (ActionType a : kAllActionTypes) {
    EXPECT_TRUE(names.insert(action_name(a)).second);
    EXPECT_EQ(parse_action_name(action_name(a)), a);
  }
  EXPECT_FALSE(parse_action_name("fly"));
}

TEST(ActionSidecar, TwoEventsInOrder) {
  std::istringstream in(
      "{\"frame_a\":1,\"frame_b\":2,\"action\":\"scroll_content\"}\n"
      "{\"frame_a\":0,\"frame_b\":1,\"action\":\"enter_chars\"}\n");
  const auto labels = parse_action_labels(in, "t");
  ASSERT_EQ(labels.size(), 2u);
  EXPECT_EQ(labels[0], (ActionLabel{0, 1, ActionType::EnterChars}));
  EXPECT_EQ(labels[1], (ActionLabel{1, 2, ActionType::ScrollContent}));
}

TEST(ActionSidecar, Errors) {
  auto kind_of = [](const std::string& text) {
    std::istringstream in(text);
    try {
      parse_action_labels(in, "t");
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::InvariantViolation;
  };
  EXPECT_EQ(kind_of("{\"frame_a\":3,\"frame_b\":4,\"action\":\"enter_chars\"}\n"
                    "{\"frame_a\":3,\"frame_b\":4,\"action\":\"delete_chars\"}\n"),
            ErrorKind::DuplicateEvent);
  EXPECT_EQ(kind_of("{\"frame_a\":0,\"frame_b\":1,\"action\":\"fly\"}\n"), ErrorKind::UnknownAction);
  EXPECT_EQ(kind_of("{\"frame_a\":0,\"frame_b\":1\n"), ErrorKind::SidecarFormat);
  EXPECT_EQ(kind_of("{\"frame_a\":0,\"frame_b\":2,\"action\":\"enter_chars\"}\n"), ErrorKind::SidecarFormat);
  EXPECT_EQ(kind_of("{\"frame_a\":-1,\"frame_b\":0,\"action\":\"enter_chars\"}\n"), ErrorKind::SidecarFormat);
}

TEST(ActionSidecar, WriteParseRoundTrip) {
  const std::vector<ActionLabel> labels = {{0, 1, ActionType::EnterChars}, {4, 5, ActionType::TriggerOrLeavePopup}};
  std::stringstream ss;
  write_action_labels(ss, labels);
  EXPECT_EQ(parse_action_labels(ss, "rt"), labels);
}

TEST(OracleBackend, EchoesScriptedActionForEveryPair) {
  RandomScriptParams p;
  p.seed = 5;
  p.target_events = 150;
  p.scroll_rate = 0.2;
  p.popup_rate = 0.1;
  p.switch_rate = 0.1;
  const auto script = generate_random_script(p);
  const auto r = render_session(script);
  const SidecarTextBackend text(r.words);
  const PrecomputedActionBackend actions(r.actions);
  const auto perception = perceive(r.frames, text, actions);
  std::vector<ActionLabel> echoed;
  for (const auto& e : perception.events) echoed.push_back(ActionLabel{e.frame_a_index, e.frame_b_index, e.action});
  EXPECT_EQ(echoed, r.actions);
  for (const auto& l : r.actions) EXPECT_EQ(l.action, scripted_action(script.events[l.frame_a].kind));
}

TEST(HeuristicBackend, TypeCharIsEnter) {
  SessionScript s;
  s.buffer = std::vector<std::string>{"int x"};
  s.events = {ScriptEvent::type_char(0, 5, ';')};
  EXPECT_EQ(single(s), ActionType::EnterChars);
}

TEST(HeuristicBackend, DeleteCharIsDelete) {
  SessionScript s;
  s.buffer = std::vector<std::string>{"int x;"};
  s.events = {ScriptEvent::delete_char(0, 5)};
  EXPECT_EQ(single(s), ActionType::DeleteChars);
}

TEST(HeuristicBackend, SelectAndDeselect) {
  SessionScript s;
  s.buffer = std::vector<std::string>{"a = 1", "b = 2", "c = 3"};
  s.events = {ScriptEvent::select_lines(0, 1), ScriptEvent::deselect()};
  const auto r = render_session(s);
  const auto got = heuristic_labels(r, s);
  ASSERT_EQ(got.size(), 2u);
  EXPECT_EQ(got.at(0), ActionType::SelectChars);
  EXPECT_EQ(got.at(1), ActionType::OtherAction);
}

TEST(HeuristicBackend, ScrollIsScroll) {
  SessionScript s;
  std::vector<std::string> buffer;
  for (int i = 0; i < 50; ++i) buffer.push_back("row " + std::to_string(i));
  s.buffer = buffer;
  s.events = {ScriptEvent::scroll(3), ScriptEvent::scroll(-1)};
  const auto r = render_session(s);
  const auto got = heuristic_labels(r, s);
  ASSERT_EQ(got.size(), 2u);
  EXPECT_EQ(got.at(0), ActionType::ScrollContent);
  EXPECT_EQ(got.at(1), ActionType::ScrollContent);
}

TEST(HeuristicBackend, WindowSwitchIsSwitch) {
  SessionScript s;
  s.buffer = std::vector<std::string>{"class A {", "  int x;", "}"};
  s.events = {ScriptEvent::switch_window({"print('hi')", "exit()"})};
  EXPECT_EQ(single(s), ActionType::SwitchWindows);
}

TEST(HeuristicBackend, PopupShowAndHide) {
  SessionScript s;
  s.buffer = std::vector<std::string>{"foo.", "bar", "baz"};
  s.events = {ScriptEvent::popup_show(CellRect{1, 4, 3, 10}), ScriptEvent::popup_hide()};
  const auto r = render_session(s);
  const auto got = heuristic_labels(r, s);
  ASSERT_EQ(got.size(), 2u);
  EXPECT_EQ(got.at(0), ActionType::TriggerOrLeavePopup);
  EXPECT_EQ(got.at(1), ActionType::TriggerOrLeavePopup);
}

TEST(HeuristicBackend, AgreesWithScriptOnRandomSessions) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    RandomScriptParams p;
    p.seed = seed;
    p.target_events = 120;
    p.scroll_rate = 0.2;
    p.mid_step_scroll_rate = 0.2;
    p.popup_rate = 0.1;
    p.switch_rate = 0.1;
    const auto script = generate_random_script(p);
    const auto r = render_session(script);
    EXPECT_EQ(heuristic_labels(r, script), scripted_labels(r)) << "seed " << seed;
  }
}
