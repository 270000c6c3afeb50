#pragma once

#include <string>

#include "json.hpp"

#include "mss/config.hpp"
#include "mss/curve.hpp"
#include "mss/mss.hpp"
#include "mss/transitions.hpp"

namespace mss {

/// Effective numerical settings, echoed into every report.
nlohmann::ordered_json config_echo(const Config& cfg);

nlohmann::ordered_json mss_point_to_json(const MssPoint& p);

/// Analysis report: traced symmetry set, caustic polyline, lightlike
/// parameters, masked-region metadata, and the effective config.
nlohmann::ordered_json build_analysis_report(const CurveFamily& curve, double u,
                                             const TraceResult& trace,
                                             const Config& cfg);

nlohmann::ordered_json event_to_json(const TransitionEvent& ev);

/// Scan report: converged transition events (sorted by family parameter)
/// plus scan metadata and non-converged seeds.
nlohmann::ordered_json build_event_report(const CurveFamily& curve,
                                          const ScanResult& scan,
                                          const Config& cfg);

/// Deterministic SVG of an analysis report: curve, caustic (dashed), MSS
/// branches, lightlike ticks, cusp and endpoint markers. Throws InputError
/// on a malformed report document.
std::string render_svg(const nlohmann::json& analysis_report);

/// CSV dump of the dense bitangency-residual map, header "t1,t2,g"; one
/// row per in-domain grid node, masked nodes carry g = nan.
std::string oracle_csv(const DenseMap& map);

} // namespace mss
