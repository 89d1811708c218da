#![allow(dead_code)]

use std::io::{Read, Write};
use std::net::TcpListener;
use std::path::{Path, PathBuf};

use floorwalk::gridmap::{save_bundle, OccupancyGrid, Poi};
use floorwalk::synth::{floor_plan, two_floor_building};
use floorwalk::{BuildingMap, NodeRef};

/// 120x190 single floor, about 40% blocked.
pub fn concourse() -> BuildingMap {
    let mut m = BuildingMap::single_floor("concourse", floor_plan(120, 190, 0.4, 7));
    let free: Vec<_> = m.floors[0].grid.free_cells().collect();
    m.pois
        .push(Poi::new("Gate A", NodeRef::new(0, free[0].i, free[0].j)));
    m.pois.push(Poi::new(
        "Gate B",
        NodeRef::new(0, free[free.len() - 1].i, free[free.len() - 1].j),
    ));
    m
}

/// 80x130 ground floor and 80x100 first floor joined by an escalator.
pub fn mall() -> BuildingMap {
    let mut m = two_floor_building::<f64>((80, 130), (80, 100), 0.4, 2024);
    m.name = "mall".into();
    m
}

/// Three-row hall whose middle row is the only way from west to east.
pub fn hall() -> BuildingMap {
    let g = OccupancyGrid::from_row_strings(&["1110111", "1111111", "1110111"]).unwrap();
    BuildingMap::single_floor("hall", g)
        .with_poi(Poi::new("West", NodeRef::new(0, 0, 0)))
        .with_poi(Poi::new("East", NodeRef::new(0, 2, 6)))
}

pub fn write_bundle(dir: &Path, id: &str, map: &BuildingMap) -> PathBuf {
    let p = dir.join(format!("{id}.json"));
    save_bundle(map, &p).unwrap();
    p
}

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_floorwalk")
}

/// Line-JSON completion server that answers every connection with `text`.
pub fn stub_completion_server(text: &'static str) -> String {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap().to_string();
    std::thread::spawn(move || {
        for conn in listener.incoming() {
            let Ok(mut s) = conn else { continue };
            let mut req = Vec::new();
            let _ = s.read_to_end(&mut req);
            let reply = serde_json::json!({ "text": text }).to_string();
            let _ = s.write_all(reply.as_bytes());
        }
    });
    addr
}

/// Completion text from the published prompt example, with its repeated
/// "2." numbering.
pub const MALFORMED_EXAMPLE: &str = "1. Start by walking east for 3 steps.\n2. Take the escalator from Floor 0 to 1.\n2. Finally, walk north for 1 step, and you will reach your destination.";
