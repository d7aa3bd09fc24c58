// 1+1 dimensional event bookkeeping in natural units (c = 1).

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace swapsim {

/// Declaration order doubles as the tie-break order for simultaneous events.
enum class EventLabel { SourceLeft, SourceRight, A, B, C };

struct SpacetimeEvent {
  EventLabel label = EventLabel::A;
  double t = 0.0;
  double x = 0.0;
};

enum class CausalRelation { TimelikePast, TimelikeFuture, Lightlike, Spacelike };

enum class PresetName { EarlyDelft, DelayedDelft, SpacelikeDelft, Custom };

enum class GeometryClass { ED, DD, Spacelike, Mixed };

inline constexpr double kLightlikeTolerance = 1e-12;

struct GeometryPreset {
  PresetName name = PresetName::Custom;
  std::vector<SpacetimeEvent> events;

  /// Throws std::invalid_argument if the label is missing.
  const SpacetimeEvent& event(EventLabel label) const;
  std::optional<SpacetimeEvent> find(EventLabel label) const;
};

/// Relation of `other` as seen from `from`: TimelikeFuture means `other`
/// lies inside the future light cone of `from`. Coincident events count as
/// Lightlike.
CausalRelation classify(const SpacetimeEvent& from, const SpacetimeEvent& other);

/// Needs A, B and C; throws std::invalid_argument otherwise.
GeometryClass classify_geometry(const GeometryPreset& preset);

double boosted_time(const SpacetimeEvent& e, double velocity);

/// Labels ordered by t' = gamma (t - v x), ties by label. Throws
/// std::domain_error unless |v| < 1.
std::vector<EventLabel> boosted_time_order(const GeometryPreset& preset, double velocity);

GeometryPreset early_delft();
GeometryPreset delayed_delft();
GeometryPreset spacelike_delft();

/// Accepts "early", "delayed", "spacelike" and the long preset names.
GeometryPreset preset_by_name(std::string_view name);

/// Replaces (or adds) one event and marks the preset Custom.
GeometryPreset with_event(GeometryPreset preset, const SpacetimeEvent& event);

/// Human-readable invariant violations; empty when the preset is consistent.
std::vector<std::string> preset_violations(const GeometryPreset& preset);

std::string to_string(EventLabel label);
std::string to_string(CausalRelation relation);
std::string to_string(PresetName name);
std::string to_string(GeometryClass cls);
/// Short CLI token: early, delayed, spacelike, custom.
std::string preset_token(PresetName name);
EventLabel parse_event_label(std::string_view text);

}  // namespace swapsim
