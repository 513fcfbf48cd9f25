use std::path::{Path, PathBuf};

use super::*;
use crate::graph::Effect;
use crate::graphlang::compile_source;

fn assets() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("assets")
}

fn standard() -> Scene {
    build_standard_scene(SceneConfig::default()).unwrap()
}

fn rotator_graph() -> Arc<CompiledGraph> {
    let src = std::fs::read_to_string(assets().join("graphs/cube_rotator.fg")).unwrap();
    Arc::new(compile_source(&src).unwrap())
}

fn cube(name: &str, x: f64) -> Actor {
    let mut a = Actor::new(name, ActorKind::Cube, Vec3::new(x, 0.75, 0.0));
    a.tag = Some(PICK_UP_TAG.into());
    a.trigger = Some(TriggerVolume {
        half_extents: Vec3::new(0.5, 0.5, 0.5),
    });
    a
}

#[test]
fn standard_scene_layout() {
    let s = standard();
    assert_eq!(s.actors().len(), 17);
    assert_eq!(s.remaining_pickups(), 12);
    let count = |k: ActorKind| s.actors().iter().filter(|a| a.kind == k).count();
    assert_eq!((count(ActorKind::Ball), count(ActorKind::Cube), count(ActorKind::Rail)), (1, 12, 4));
    let ball = s.find_by_name("ball").unwrap();
    assert_eq!(ball.transform.position, Vec3::new(0.0, 0.5, 0.0));
    assert_eq!(ball.body.as_ref().unwrap().velocity, Vec3::ZERO);
    assert_eq!(ball.body.as_ref().unwrap().mass, 1.0);
    for (k, c) in s.actors().iter().filter(|a| a.kind == ActorKind::Cube).enumerate() {
        let theta = (k as f64 * 30.0).to_radians();
        let p = c.transform.position;
        assert!((p.x - 3.0 * theta.cos()).abs() < 1e-12 && (p.z - 3.0 * theta.sin()).abs() < 1e-12);
        assert_eq!(p.y, 0.75);
        assert_eq!(c.trigger.unwrap().half_extents, Vec3::new(0.5, 0.5, 0.5));
        assert!(c.has_tag(PICK_UP_TAG));
    }
}

#[test]
fn rails_enclose_a_ten_metre_square() {
    let s = standard();
    for a in s.actors().iter().filter(|a| a.kind == ActorKind::Rail) {
        let he = a.solid.unwrap().half_extents;
        let p = a.transform.position;
        let inner = (p.x.abs() - he.x).max(p.z.abs() - he.z);
        assert_eq!(inner, 5.0, "{}", a.name);
    }
}

#[test]
fn oversized_cube_circle_is_rejected() {
    let err = build_standard_scene(SceneConfig {
        cube_circle_radius: 6.0,
        ..SceneConfig::default()
    })
    .unwrap_err();
    assert!(matches!(err, SceneError::InvalidConfig(_)));
    for bad in [
        SceneConfig {
            ball_radius: 0.0,
            ..SceneConfig::default()
        },
        SceneConfig {
            fixed_dt: -0.02,
            ..SceneConfig::default()
        },
        SceneConfig {
            restitution: 1.5,
            ..SceneConfig::default()
        },
    ] {
        assert!(build_standard_scene(bad).is_err());
    }
}

#[test]
fn deactivate_is_idempotent_and_counts_once() {
    let mut s = standard();
    let id = s.find_by_name("cube_03").unwrap().id;
    s.deactivate(id).unwrap();
    assert_eq!(s.remaining_pickups(), 11);
    s.deactivate(id).unwrap();
    assert_eq!(s.remaining_pickups(), 11);
    assert!(!s.get(id).unwrap().active);
    let removed = s.journal().iter().filter(|e| matches!(e, JournalEntry::Removed { .. })).count();
    assert_eq!(removed, 1);
    assert_eq!(s.deactivate(ActorId(999)), Err(SceneError::UnknownActor(ActorId(999))));
}

#[test]
fn destroy_is_deferred_and_keeps_order() {
    let mut s = standard();
    let ball = s.find_by_name("ball").unwrap().id;
    s.destroy(ball).unwrap();
    assert!(s.get(ball).is_some());
    assert!(s.has_pending_removals());
    s.flush_removals();
    assert!(s.get(ball).is_none());
    assert_eq!(s.actors().len(), 16);
    let ids: Vec<u32> = s.actors().iter().map(|a| a.id.0).collect();
    assert_eq!(ids, (1..17).collect::<Vec<_>>());
    assert!(s.destroy(ball).is_err());
    // fresh ids are never reused
    let id = s.spawn(cube("late", 0.0));
    assert_eq!(id, ActorId(17));
}

#[test]
fn one_graph_cube_gets_one_tick() {
    let mut s = Scene::new(0.02);
    let mut c = cube("a", 0.0);
    c.scripting = Some(Scripting::Graphs(vec![rotator_graph()]));
    let id = s.spawn(c);
    s.dispatch_frame_events(0.02, AxisSample::default());
    let journal = s.take_journal();
    assert_eq!(
        journal[0],
        JournalEntry::Dispatch {
            actor: id,
            event: EventKind::Tick
        }
    );
    let JournalEntry::Effect { record, .. } = &journal[1] else { panic!("{journal:?}") };
    let Effect::AddWorldRotation { delta, .. } = record.effect else { panic!() };
    assert_eq!(delta.yaw, 0.02 * 20.0);
    assert_eq!(journal.len(), 2);
}

#[test]
fn no_active_actors_no_events() {
    let mut s = Scene::new(0.02);
    s.dispatch_frame_events(0.02, AxisSample::new(1.0, 1.0));
    s.dispatch_fixed_tick(0.02);
    assert!(s.journal().is_empty());

    let mut c = cube("a", 0.0);
    c.scripting = Some(Scripting::Graphs(vec![rotator_graph()]));
    let id = s.spawn(c);
    s.deactivate(id).unwrap();
    s.take_journal();
    s.dispatch_frame_events(0.02, AxisSample::default());
    assert!(s.journal().is_empty());
    assert_eq!(s.get(id).unwrap().transform.orientation, crate::math::Orientation::IDENTITY);
}

#[test]
fn spawn_order_decides_dispatch_order() {
    let mut s = Scene::new(0.02);
    let g = rotator_graph();
    let mut ids = Vec::new();
    for (name, x) in [("b_second_name", 1.0), ("a_first_name", 2.0), ("c", 3.0)] {
        let mut c = cube(name, x);
        c.scripting = Some(Scripting::Graphs(vec![g.clone()]));
        ids.push(s.spawn(c));
    }
    for _ in 0..3 {
        s.dispatch_frame_events(0.02, AxisSample::default());
    }
    let order: Vec<ActorId> = s
        .journal()
        .iter()
        .filter_map(|e| match e {
            JournalEntry::Effect { actor, .. } => Some(*actor),
            _ => None,
        })
        .collect();
    assert_eq!(order, [ids.clone(), ids.clone(), ids].concat());
}

#[test]
fn frame_events_order_axes_then_tick() {
    let dir = assets();
    let file = SceneFile::standard_layout(SceneConfig::default())
        .unwrap()
        .with_standard_scripts("graphs");
    let mut s = file.instantiate(&dir, ScriptMode::Graph).unwrap();
    s.dispatch_frame_events(0.02, AxisSample::new(1.0, -1.0));
    let events: Vec<(ActorId, EventKind)> = s
        .journal()
        .iter()
        .filter_map(|e| match e {
            JournalEntry::Dispatch { actor, event } => Some((*actor, *event)),
            _ => None,
        })
        .collect();
    assert_eq!(
        &events[..2],
        &[(ActorId(0), EventKind::InputAxisMoveRight), (ActorId(0), EventKind::InputAxisMoveForward)]
    );
    // every cube ticks, in spawn order
    let ticks: Vec<u32> = events.iter().filter(|(_, e)| *e == EventKind::Tick).map(|(a, _)| a.0).collect();
    assert_eq!(ticks, (1..=12).collect::<Vec<_>>());
    let ball = s.get(ActorId(0)).unwrap().body.as_ref().unwrap();
    assert_eq!(ball.accumulated_force, Vec3::new(10.0, 0.0, -10.0));
}

#[test]
fn overlap_goes_to_owner_then_other() {
    let dir = assets();
    let file = SceneFile::standard_layout(SceneConfig::default())
        .unwrap()
        .with_standard_scripts("graphs");
    let mut s = file.instantiate(&dir, ScriptMode::Script).unwrap();
    let ev = crate::physics::OverlapEvent {
        trigger_owner: ActorId(1),
        other: ActorId(0),
        step_index: 0,
    };
    s.take_journal();
    s.dispatch_overlaps(&[ev]);
    let j = s.take_journal();
    assert_eq!(
        j,
        vec![
            JournalEntry::Dispatch {
                actor: ActorId(1),
                event: EventKind::BeginOverlap
            },
            JournalEntry::Dispatch {
                actor: ActorId(0),
                event: EventKind::BeginOverlap
            },
        ]
    );
    assert!(s.get(ActorId(1)).unwrap().active);
    s.flush_removals();
    assert!(!s.get(ActorId(1)).unwrap().active);
    assert_eq!(s.remaining_pickups(), 11);
}

#[test]
fn scene_file_round_trip_and_strictness() {
    let file = SceneFile::standard_layout(SceneConfig::default())
        .unwrap()
        .with_standard_scripts("graphs");
    assert!(file.is_paired());
    let text = file.to_json();
    assert_eq!(SceneFile::from_json(&text).unwrap(), file);
    let extra = text.replacen("\"actors\"", "\"colour\": 1, \"actors\"", 1);
    assert!(matches!(SceneFile::from_json(&extra), Err(SceneFileError::Json { .. })));
    let wrong = text.replacen("scene/1", "scene/9", 1);
    assert!(matches!(SceneFile::from_json(&wrong), Err(SceneFileError::Format(_))));
}

#[test]
fn short_script_entries() {
    let text = r#"{
        "format": "scene/1",
        "actors": [
            {"name": "ball", "kind": "ball", "position": [0, 0.5, 0], "script": "player_controller"},
            {"name": "c", "kind": "cube", "tag": "Pick Up", "position": [3, 0.75, 0], "script": "graphs/cube_rotator.fg"},
            {"name": "d", "kind": "cube", "position": [-3, 0.75, 0], "script": "none"}
        ]
    }"#;
    let file = SceneFile::from_json(text).unwrap();
    assert!(!file.is_paired());
    let s = file.instantiate(&assets(), ScriptMode::Script);
    assert!(matches!(s, Err(SceneFileError::MissingVariant { ref actor, .. }) if actor == "c"));
    let s = file.instantiate(&assets(), ScriptMode::Graph);
    assert!(matches!(s, Err(SceneFileError::MissingVariant { ref actor, .. }) if actor == "ball"));
    assert_eq!(file.graph_paths(), vec!["graphs/cube_rotator.fg"]);
    let s = file.instantiate_unscripted().unwrap();
    assert!(s.actors().iter().all(|a| a.scripting.is_none()));
}

#[test]
fn unknown_behavior_and_bad_graph() {
    let text = r#"{"format": "scene/1", "actors": [
        {"name": "ball", "kind": "ball", "position": [0, 0.5, 0], "script": "jump"}]}"#;
    let file = SceneFile::from_json(text).unwrap();
    assert!(matches!(
        file.instantiate(&assets(), ScriptMode::Script),
        Err(SceneFileError::UnknownBehavior { .. })
    ));
    let text = r#"{"format": "scene/1", "actors": [
        {"name": "c", "kind": "cube", "position": [0, 0.75, 0], "script": "graphs/invalid/type_mismatch.fg"}]}"#;
    let file = SceneFile::from_json(text).unwrap();
    let Err(SceneFileError::Graph { diagnostics, .. }) = file.instantiate(&assets(), ScriptMode::Graph) else {
        panic!("expected a graph error")
    };
    assert_eq!(diagnostics[0].code, crate::graph::DiagCode::TypeMismatch);
}

#[test]
fn content_hash_covers_graph_sources() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir(dir.path().join("graphs")).unwrap();
    for f in ["cube_rotator.fg", "cube_removal.fg", "ball_force.fg"] {
        std::fs::copy(assets().join("graphs").join(f), dir.path().join("graphs").join(f)).unwrap();
    }
    let file = SceneFile::standard_layout(SceneConfig::default())
        .unwrap()
        .with_standard_scripts("graphs");
    let h1 = file.content_hash(dir.path()).unwrap();
    assert_eq!(h1, file.content_hash(dir.path()).unwrap());
    assert_eq!(h1.len(), 64);
    let p = dir.path().join("graphs/cube_rotator.fg");
    let text = std::fs::read_to_string(&p).unwrap().replace("20.0", "21.0");
    std::fs::write(&p, text).unwrap();
    assert_ne!(h1, file.content_hash(dir.path()).unwrap());
}

#[test]
fn graphs_are_shared_between_actors() {
    let file = SceneFile::standard_layout(SceneConfig::default())
        .unwrap()
        .with_standard_scripts("graphs");
    let s = file.instantiate(&assets(), ScriptMode::Graph).unwrap();
    let graphs: Vec<_> = s
        .actors()
        .iter()
        .filter_map(|a| match &a.scripting {
            Some(Scripting::Graphs(g)) if a.kind == ActorKind::Cube => Some(g[0].clone()),
            _ => None,
        })
        .collect();
    assert_eq!(graphs.len(), 12);
    assert!(graphs.windows(2).all(|w| Arc::ptr_eq(&w[0], &w[1])));
}
