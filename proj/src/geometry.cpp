#include "swapsim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace swapsim {

const SpacetimeEvent& GeometryPreset::event(EventLabel label) const {
  for (const auto& e : events) {
    if (e.label == label) return e;
  }
  throw std::invalid_argument("geometry is missing event " + to_string(label));
}

std::optional<SpacetimeEvent> GeometryPreset::find(EventLabel label) const {
  for (const auto& e : events) {
    if (e.label == label) return e;
  }
  return std::nullopt;
}

CausalRelation classify(const SpacetimeEvent& from, const SpacetimeEvent& other) {
  const double dt = other.t - from.t;
  const double dx = other.x - from.x;
  const double interval = dt * dt - dx * dx;
  if (std::abs(interval) <= kLightlikeTolerance) return CausalRelation::Lightlike;
  if (interval < 0) return CausalRelation::Spacelike;
  return dt > 0 ? CausalRelation::TimelikeFuture : CausalRelation::TimelikePast;
}

GeometryClass classify_geometry(const GeometryPreset& preset) {
  const auto& a = preset.event(EventLabel::A);
  const auto& b = preset.event(EventLabel::B);
  const auto& c = preset.event(EventLabel::C);
  const auto ra = classify(a, c);
  const auto rb = classify(b, c);
  if (ra != rb) return GeometryClass::Mixed;
  switch (ra) {
    case CausalRelation::TimelikePast: return GeometryClass::ED;
    case CausalRelation::TimelikeFuture: return GeometryClass::DD;
    case CausalRelation::Spacelike: return GeometryClass::Spacelike;
    case CausalRelation::Lightlike: return GeometryClass::Mixed;
  }
  return GeometryClass::Mixed;
}

double boosted_time(const SpacetimeEvent& e, double velocity) {
  const double gamma = 1.0 / std::sqrt(1.0 - velocity * velocity);
  return gamma * (e.t - velocity * e.x);
}

std::vector<EventLabel> boosted_time_order(const GeometryPreset& preset, double velocity) {
  if (!(std::abs(velocity) < 1.0)) {
    throw std::domain_error("boost velocity must satisfy |v| < 1");
  }
  std::vector<std::pair<double, EventLabel>> keyed;
  keyed.reserve(preset.events.size());
  for (const auto& e : preset.events) keyed.emplace_back(boosted_time(e, velocity), e.label);
  std::sort(keyed.begin(), keyed.end());
  std::vector<EventLabel> out;
  for (const auto& [t, label] : keyed) out.push_back(label);
  return out;
}

namespace {

GeometryPreset make(PresetName name, std::vector<SpacetimeEvent> events) {
  return GeometryPreset{name, std::move(events)};
}

}  // namespace

GeometryPreset early_delft() {
  return make(PresetName::EarlyDelft, {{EventLabel::SourceLeft, 0.5, -0.5},
                                       {EventLabel::SourceRight, 0.5, 0.5},
                                       {EventLabel::A, 2.0, -1.0},
                                       {EventLabel::B, 2.0, 1.0},
                                       {EventLabel::C, 0.0, 0.0}});
}

GeometryPreset delayed_delft() {
  return make(PresetName::DelayedDelft, {{EventLabel::SourceLeft, 0.0, -1.0},
                                         {EventLabel::SourceRight, 0.0, 1.0},
                                         {EventLabel::A, 1.0, -1.0},
                                         {EventLabel::B, 1.0, 1.0},
                                         {EventLabel::C, 3.0, 0.0}});
}

GeometryPreset spacelike_delft() {
  return make(PresetName::SpacelikeDelft, {{EventLabel::SourceLeft, 0.0, -1.0},
                                           {EventLabel::SourceRight, 0.0, 1.0},
                                           {EventLabel::A, 1.5, -1.5},
                                           {EventLabel::B, 1.5, 1.5},
                                           {EventLabel::C, 1.5, 0.0}});
}

GeometryPreset preset_by_name(std::string_view name) {
  if (name == "early" || name == "EarlyDelft" || name == "ed") return early_delft();
  if (name == "delayed" || name == "DelayedDelft" || name == "dd") return delayed_delft();
  if (name == "spacelike" || name == "SpacelikeDelft") return spacelike_delft();
  throw std::invalid_argument("unknown geometry preset: " + std::string(name));
}

GeometryPreset with_event(GeometryPreset preset, const SpacetimeEvent& event) {
  preset.name = PresetName::Custom;
  for (auto& e : preset.events) {
    if (e.label == event.label) {
      e = event;
      return preset;
    }
  }
  preset.events.push_back(event);
  return preset;
}

std::vector<std::string> preset_violations(const GeometryPreset& preset) {
  std::vector<std::string> out;
  for (const auto& e : preset.events) {
    if (!std::isfinite(e.t) || !std::isfinite(e.x)) {
      out.push_back("non-finite coordinate on " + to_string(e.label));
    }
  }
  for (EventLabel label : {EventLabel::SourceLeft, EventLabel::SourceRight, EventLabel::A,
                           EventLabel::B, EventLabel::C}) {
    if (!preset.find(label)) out.push_back("missing event " + to_string(label));
  }
  if (!out.empty()) return out;

  const auto feeds = [&](EventLabel source, EventLabel target) {
    if (classify(preset.event(source), preset.event(target)) != CausalRelation::TimelikeFuture) {
      out.push_back(to_string(source) + " is not timelike-past of " + to_string(target));
    }
  };
  feeds(EventLabel::SourceLeft, EventLabel::A);
  feeds(EventLabel::SourceRight, EventLabel::B);

  const auto cls = classify_geometry(preset);
  const auto expect = [&](GeometryClass wanted) {
    if (cls != wanted) {
      out.push_back(to_string(preset.name) + " classifies as " + to_string(cls));
    }
  };
  switch (preset.name) {
    case PresetName::EarlyDelft: expect(GeometryClass::ED); break;
    case PresetName::DelayedDelft: expect(GeometryClass::DD); break;
    case PresetName::SpacelikeDelft: expect(GeometryClass::Spacelike); break;
    case PresetName::Custom: break;
  }
  return out;
}

std::string to_string(EventLabel label) {
  switch (label) {
    case EventLabel::SourceLeft: return "SourceLeft";
    case EventLabel::SourceRight: return "SourceRight";
    case EventLabel::A: return "A";
    case EventLabel::B: return "B";
    case EventLabel::C: return "C";
  }
  return "?";
}

std::string to_string(CausalRelation relation) {
  switch (relation) {
    case CausalRelation::TimelikePast: return "TimelikePast";
    case CausalRelation::TimelikeFuture: return "TimelikeFuture";
    case CausalRelation::Lightlike: return "Lightlike";
    case CausalRelation::Spacelike: return "Spacelike";
  }
  return "?";
}

std::string to_string(PresetName name) {
  switch (name) {
    case PresetName::EarlyDelft: return "EarlyDelft";
    case PresetName::DelayedDelft: return "DelayedDelft";
    case PresetName::SpacelikeDelft: return "SpacelikeDelft";
    case PresetName::Custom: return "Custom";
  }
  return "?";
}

std::string to_string(GeometryClass cls) {
  switch (cls) {
    case GeometryClass::ED: return "ED";
    case GeometryClass::DD: return "DD";
    case GeometryClass::Spacelike: return "Spacelike";
    case GeometryClass::Mixed: return "Mixed";
  }
  return "?";
}

std::string preset_token(PresetName name) {
  switch (name) {
    case PresetName::EarlyDelft: return "early";
    case PresetName::DelayedDelft: return "delayed";
    case PresetName::SpacelikeDelft: return "spacelike";
    case PresetName::Custom: return "custom";
  }
  return "?";
}

EventLabel parse_event_label(std::string_view text) {
  for (EventLabel label : {EventLabel::SourceLeft, EventLabel::SourceRight, EventLabel::A,
                           EventLabel::B, EventLabel::C}) {
    if (text == to_string(label)) return label;
  }
  if (text == "SL") return EventLabel::SourceLeft;
  if (text == "SR") return EventLabel::SourceRight;
  throw std::invalid_argument("unknown event label: " + std::string(text));
}

}  // namespace swapsim
