//! Request resolution and the search → compress → narrate pipeline.

use std::time::Instant;

use floorwalk::compressor::{compress, render_terse, replay};
use floorwalk::narrator::{
    narrate_traced, render_template, FallbackReason, LmConfig, LmError, NarrateMode, SystemPrompt,
};
use floorwalk::planner::astar;
use floorwalk::{BuildingMap, NodeRef};

use crate::protocol::{
    check_schema, ErrorCode, NarrateChoice, RouteRequest, RouteResponse, SearchCounters,
    ServiceError, Timings, PROTOCOL_SCHEMA,
};

/// Parses `floor:i:j`.
pub fn parse_node(text: &str) -> Option<NodeRef> {
    let mut parts = text.trim().split(':');
    let floor = parts.next()?.trim().parse().ok()?;
    let i = parts.next()?.trim().parse().ok()?;
    let j = parts.next()?.trim().parse().ok()?;
    parts.next().is_none().then(|| NodeRef::new(floor, i, j))
}

/// A POI name (case-insensitive, exact) or `floor:i:j` naming a free cell.
pub fn resolve_endpoint(map: &BuildingMap, text: &str) -> Result<NodeRef, ServiceError> {
    if let Some(poi) = map.find_poi(text) {
        return Ok(poi.location);
    }
    let Some(node) = parse_node(text) else {
        return Err(ServiceError::new(
            ErrorCode::UnknownPoi,
            format!("no POI named '{}'", text.trim()),
        ));
    };
    let grid = map.grid(node.floor).ok_or_else(|| {
        ServiceError::new(
            ErrorCode::UnknownFloor,
            format!("floor {} does not exist", node.floor),
        )
    })?;
    if !grid.in_bounds(node.cell) {
        return Err(ServiceError::new(
            ErrorCode::BadCoordinate,
            format!("{node} is outside the {}x{} grid", grid.rows(), grid.cols()),
        ));
    }
    Ok(node)
}

/// Narration backend available to the pipeline.
#[derive(Clone, Debug, Default)]
pub struct NarratorSettings {
    pub lm: Option<(LmConfig, SystemPrompt)>,
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Runs the full pipeline for one request against one map snapshot.
pub fn plan_route(
    map_id: &str,
    map: &BuildingMap,
    req: &RouteRequest,
    narrator: &NarratorSettings,
) -> Result<RouteResponse, ServiceError> {
    check_schema(req.schema.as_deref())?;
    let origin = resolve_endpoint(map, &req.origin)?;
    let destination = resolve_endpoint(map, &req.destination)?;
    if origin == destination {
        return Err(ServiceError::new(
            ErrorCode::SameEndpoints,
            format!("origin and destination are both {origin}"),
        ));
    }

    let t = Instant::now();
    let path = astar(map, origin, destination, req.corner_rule)?;
    let search_ms = ms(t);

    let t = Instant::now();
    let script = compress(&path, map, req.corner_rule)?;
    let end = replay(&script, map)?;
    if end != destination {
        return Err(ServiceError::new(
            ErrorCode::Internal,
            format!("terse script ends at {end}, not {destination}"),
        ));
    }
    let compress_ms = ms(t);

    let t = Instant::now();
    let (guide, fallback) = match (req.narrate, &narrator.lm) {
        (NarrateChoice::Template, _) => (render_template(&script), None),
        (NarrateChoice::Lm, Some((config, system))) => {
            let mode = NarrateMode::LanguageModel {
                config: config.clone(),
                system: system.clone(),
            };
            match narrate_traced(&script, &mode) {
                Ok((g, why)) => (Ok(g), why),
                Err(e) => (Err(e), None),
            }
        }
        (NarrateChoice::Lm, None) => {
            let why = FallbackReason::Transport(LmError::EndpointUnavailable(
                "no completion endpoint configured".into(),
            ));
            log::warn!("falling back to template narration: {why}");
            (render_template(&script), Some(why))
        }
    };
    let guide = guide.map_err(|e| ServiceError::new(ErrorCode::Internal, e.to_string()))?;
    let narrate_ms = ms(t);

    Ok(RouteResponse {
        schema: PROTOCOL_SCHEMA.to_owned(),
        map: map_id.to_owned(),
        origin: origin.into(),
        destination: destination.into(),
        corner_rule: req.corner_rule,
        cost: path.total_cost,
        path: path.nodes.iter().map(|&n| n.into()).collect(),
        terse: render_terse(&script),
        guide: guide.render(),
        guide_source: guide.source,
        fallback: fallback.map(|f| f.to_string()),
        search: SearchCounters {
            expanded_nodes: path.stats.expanded_nodes,
            pushed_nodes: path.stats.pushed_nodes,
        },
        timings: Timings {
            search_ms,
            compress_ms,
            narrate_ms,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use floorwalk::gridmap::{Floor, OccupancyGrid, Poi};
    use floorwalk::Portal;
    use floorwalk::PortalKind;

    fn mall() -> BuildingMap {
        let g = OccupancyGrid::from_row_strings(&["11111", "11011", "11111"]).unwrap();
        BuildingMap::new("mall")
            .with_floor(Floor::new(0, "G", g.clone()))
            .with_floor(Floor::new(1, "1", g))
            .with_portal(Portal::new(
                PortalKind::Escalator,
                NodeRef::new(0, 2, 4),
                NodeRef::new(1, 2, 4),
            ))
            .with_poi(Poi::new("Entrance", NodeRef::new(0, 0, 0)))
            .with_poi(Poi::new("Food Court", NodeRef::new(1, 0, 0)))
    }

    #[test]
    fn parses_coordinates() {
        assert_eq!(parse_node("1:2:3"), Some(NodeRef::new(1, 2, 3)));
        assert_eq!(parse_node(" 0 : 4 : 5 "), Some(NodeRef::new(0, 4, 5)));
        assert_eq!(parse_node("1:2"), None);
        assert_eq!(parse_node("1:2:3:4"), None);
        assert_eq!(parse_node("food"), None);
    }

    #[test]
    fn resolves_names_and_cells() {
        let m = mall();
        assert_eq!(
            resolve_endpoint(&m, "food court").unwrap(),
            NodeRef::new(1, 0, 0)
        );
        assert_eq!(
            resolve_endpoint(&m, "0:2:2").unwrap(),
            NodeRef::new(0, 2, 2)
        );
        assert_eq!(
            resolve_endpoint(&m, "Cinema").unwrap_err().code,
            ErrorCode::UnknownPoi
        );
        assert_eq!(
            resolve_endpoint(&m, "0:9:9").unwrap_err().code,
            ErrorCode::BadCoordinate
        );
        assert_eq!(
            resolve_endpoint(&m, "7:0:0").unwrap_err().code,
            ErrorCode::UnknownFloor
        );
    }

    #[test]
    fn cross_floor_route() {
        let r = plan_route(
            "mall",
            &mall(),
            &RouteRequest::new("Entrance", "Food Court"),
            &NarratorSettings::default(),
        )
        .unwrap();
        assert!(r
            .guide
            .iter()
            .any(|l| l.contains("Take the escalator from Floor 0 to 1")));
        assert_eq!(r.path.first().copied(), Some(NodeRef::new(0, 0, 0).into()));
        assert_eq!(r.path.last().copied(), Some(NodeRef::new(1, 0, 0).into()));
        assert!(r.route_section().starts_with("cost: "));
    }

    #[test]
    fn endpoint_errors() {
        let s = NarratorSettings::default();
        let e =
            plan_route("m", &mall(), &RouteRequest::new("Entrance", "entrance"), &s).unwrap_err();
        assert_eq!(e.code, ErrorCode::SameEndpoints);
        let e = plan_route("m", &mall(), &RouteRequest::new("Entrance", "0:1:2"), &s).unwrap_err();
        assert_eq!(e.code, ErrorCode::GoalBlocked);
    }

    #[test]
    fn lm_without_endpoint_falls_back() {
        let mut req = RouteRequest::new("Entrance", "0:2:4");
        req.narrate = NarrateChoice::Lm;
        let r = plan_route("m", &mall(), &req, &NarratorSettings::default()).unwrap();
        assert_eq!(r.guide_source, floorwalk::narrator::GuideSource::Template);
        assert!(r
            .fallback
            .unwrap()
            .contains("no completion endpoint configured"));
    }
}
