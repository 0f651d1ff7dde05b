#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "iliosim/anatomy.hpp"
#include "iliosim/geometry.hpp"
#include "iliosim/wire.hpp"

namespace iliosim::fluoro {

enum class ViewName { Inlet, Outlet, AP };

std::string_view to_string(ViewName name);
ViewName view_from_string(std::string_view text);

/// A point-source C-arm pose. Detector coordinates are measured in mm from
/// detector_center along (up x normal, up).
struct ViewSpec {
  ViewName name = ViewName::AP;
  Vec3 source = Vec3::Zero();
  Vec3 detector_center = Vec3::Zero();
  Vec3 detector_normal = -Vec3::UnitY();  // source -> detector
  Vec3 up = Vec3::UnitZ();
  double detector_diameter = 300.0;

  double source_to_detector() const { return (detector_center - source).dot(detector_normal); }
  Vec3 detector_u() const { return up.cross(detector_normal); }
};

/// C-arm settings from which the three standard views are derived.
struct ViewParams {
  double inlet_tilt_deg = 45.0;
  double outlet_tilt_deg = 45.0;
  double source_to_detector = 1000.0;
  double source_to_isocenter = 750.0;
  double detector_diameter = 300.0;

  bool operator==(const ViewParams&) const = default;
};

using ViewSpecs = std::array<ViewSpec, 3>;  // indexed by ViewName

const ViewSpec& view(const ViewSpecs& views, ViewName name);

/// Inlet, outlet and AP views around the corridor center. AP looks along -y;
/// inlet tilts the beam caudally and outlet cranially about the x axis.
ViewSpecs standard_views(const anatomy::AnatomyModel& model, const ViewParams& params = {});
ViewSpecs standard_views(const anatomy::AnatomyModel& model, double inlet_tilt_deg, double outlet_tilt_deg,
                         double source_to_detector);

/// Central projection of p onto the detector. Throws BehindSource unless
/// p is strictly in front of the source.
Vec2 project_point(const ViewSpec& view, const Vec3& p);

struct Polyline {
  std::string label;
  std::vector<Vec2> points;

  bool operator==(const Polyline&) const = default;
};

/// Vector image of one exposure. `taken_at` is informational only and does
/// not participate in equality.
struct Radiograph {
  ViewName view_name = ViewName::AP;
  int seq = 0;
  std::vector<Vec2> wire_2d;  // one point (degenerate) or entry -> tip
  std::vector<Polyline> silhouette;
  bool clipped = false;
  double taken_at = 0.0;

  bool operator==(const Radiograph& other) const {
    return view_name == other.view_name && seq == other.seq && wire_2d == other.wire_2d &&
           silhouette == other.silhouette && clipped == other.clipped;
  }
};

inline constexpr int kSilhouetteSamples = 64;

Radiograph render_radiograph(const ViewSpec& view, const anatomy::AnatomyModel& model, const WirePose& pose,
                             int seq, double taken_at = 0.0);

/// Fixed six-decimal text form; identical radiographs give identical bytes.
std::string radiograph_to_text(const Radiograph& image);
Radiograph radiograph_from_json(const nlohmann::json& doc);

nlohmann::json view_params_to_json(const ViewParams& params);
ViewParams view_params_from_json(const nlohmann::json& doc);
nlohmann::json view_spec_to_json(const ViewSpec& view);

}  // namespace iliosim::fluoro
