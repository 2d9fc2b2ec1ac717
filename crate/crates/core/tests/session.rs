mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use common::*;
use flexunit::dataset::{load_csv, CsvOptions, Value};
use flexunit::fusion::{Modality, Scope, LISTEN_WINDOW_MS};
use flexunit::geometry::Point;
use flexunit::layout::ScaleKind;
use flexunit::nl::{OperationKind, Params};
use flexunit::session::{EventBody, FeedbackKind, Session, SessionConfig, SessionSnapshot};
use flexunit::view_state::{Annotation, Arrangement, Paint};

fn fresh() -> ScriptBuilder {
    ScriptBuilder::new(dataset(), SEED)
}

#[test]
fn followup_chain_equals_explicit_commands() {
    let mut chain = fresh();
    chain.typed(0, "Order Mid-Atlantic schools by control");
    let second = chain.typed(1_000, "admission rate");
    assert_eq!(second.feedback[0].kind, FeedbackKind::FollowupInferred);
    assert!(second.feedback[0].text.contains("undo"));
    let third = chain.typed(2_000, "Align horizontally by SAT average");
    assert_eq!(third.feedback[0].kind, FeedbackKind::FollowupInferred);

    let mut explicit = fresh();
    for (t, u) in [
        (0, "Order Mid-Atlantic schools by control"),
        (1_000, "Order Mid-Atlantic schools by admission rate"),
        (2_000, "Align Mid-Atlantic schools horizontally by SAT average"),
    ] {
        assert_eq!(explicit.typed(t, u).feedback[0].kind, FeedbackKind::Success, "{u}");
    }
    assert_eq!(chain.session.state(), explicit.session.state());
    let ctx = chain.session.context().unwrap();
    assert_eq!(ctx.operation, OperationKind::AssignAxis);
}

#[test]
fn parameter_only_without_context_is_partial() {
    let mut b = fresh();
    let before = b.session.state().clone();
    let r = b.typed(0, "admission rate");
    assert_eq!(r.feedback[0].kind, FeedbackKind::PartialSuggestion);
    assert!(r.feedback[0].example_command.is_some());
    let r = b.typed(10, "repeat");
    assert_eq!(r.feedback[0].kind, FeedbackKind::PartialSuggestion);
    assert!(r.feedback[0].text.contains("nothing to repeat") || r.feedback[0].text.contains("no previous command"));
    assert_eq!(b.session.state(), &before);
}

#[test]
fn repeat_without_selection_reuses_context_targets() {
    let mut b = fresh();
    b.typed(0, "Order Mid-Atlantic schools by admission rate");
    let once = b.session.state().clone();
    let r = b.typed(1_000, "repeat");
    assert_eq!(r.feedback[0].kind, FeedbackKind::FollowupInferred);
    assert_eq!(b.session.state().points, once.points);
}

#[test]
fn point_hold_brings_region_here() {
    let ds = dataset();
    let mut b = fresh();
    b.push(0, EventBody::PointHold { x: 300.0, y: 200.0 });
    let r = b.spoken(1_500, "Bring the Great Lakes schools here");
    assert_eq!(r.feedback[0].kind, FeedbackKind::Success, "{:?}", r.feedback);
    let st = b.session.state();
    let gl = rows_where(&ds, "Region", &["Great Lakes"]);
    assert!(gl.iter().all(|id| st.point(*id).pinned));
    let n = gl.len() as f64;
    let cx = gl.iter().map(|id| st.point(*id).position.x).sum::<f64>() / n;
    let cy = gl.iter().map(|id| st.point(*id).position.y).sum::<f64>() / n;
    assert!(Point::new(cx, cy).distance(Point::new(300.0, 200.0)) <= 5.0);
}

#[test]
fn utterance_before_pointer_fuses_when_pointer_arrives() {
    let mut after = fresh();
    after.push(0, EventBody::PointHold { x: 300.0, y: 200.0 });
    after.spoken(1_000, "Bring the Great Lakes schools here");

    let mut before = fresh();
    before.push(0, EventBody::MicTap);
    let r = before.spoken(500, "Bring the Great Lakes schools here");
    assert_eq!(r.feedback[0].kind, FeedbackKind::PartialSuggestion);
    let r = before.push(1_000, EventBody::PointHold { x: 300.0, y: 200.0 });
    assert!(
        r.feedback.iter().any(|f| f.kind == FeedbackKind::Success),
        "{:?}",
        r.feedback
    );
    assert_eq!(before.session.state().points, after.session.state().points);
}

#[test]
fn lasso_then_order_is_local() {
    let ds = dataset();
    let mut b = fresh();
    b.typed(0, "Color by region");
    let before = b.session.state().clone();
    // a band of the initial cluster
    let chosen: BTreeSet<u32> = before
        .visible()
        .filter(|p| p.position.x < 590.0)
        .map(|p| p.row_id)
        .collect();
    let lasso = vec![
        Point::new(0.0, 0.0),
        Point::new(590.0, 0.0),
        Point::new(590.0, 800.0),
        Point::new(0.0, 800.0),
    ];
    b.push(1_000, EventBody::Lasso { path: lasso });
    assert_eq!(
        b.session.state().selection.iter().copied().collect::<BTreeSet<_>>(),
        chosen
    );
    let r = b.spoken(2_000, "Order by admission rate");
    assert_eq!(r.feedback[0].kind, FeedbackKind::Success);
    let st = b.session.state();
    for p in &st.points {
        if !chosen.contains(&p.row_id) {
            assert_eq!(p, before.point(p.row_id));
        }
    }
    assert_eq!(order_violations(&ds, st, &chosen, "Admission Rate"), 0);
}

/// Band index by category position among the categories present, over the
/// inset canvas width.
fn band_oracle(ds: &flexunit::dataset::Dataset, attribute: &str, id: u32, width: f64) -> (f64, f64) {
    let present: Vec<String> = ds.attribute(attribute).unwrap().categories().to_vec();
    let v = match ds.value_by_name(id, attribute) {
        Some(Value::Text(t)) => t.clone(),
        _ => "NA".into(),
    };
    let k = present.len() as f64;
    let i = present.iter().position(|c| *c == v).unwrap() as f64;
    let (lo, hi) = (0.05 * width, 0.95 * width);
    let step = (hi - lo) / k;
    (lo + i * step, lo + (i + 1.0) * step)
}

#[test]
fn swipe_plus_attribute_builds_global_band_chart() {
    let ds = dataset();
    let mut b = fresh();
    b.push(
        0,
        EventBody::Swipe {
            path: horizontal_swipe(),
        },
    );
    let r = b.spoken(1_000, "region");
    assert_eq!(r.feedback[0].kind, FeedbackKind::Success, "{:?}", r.feedback);
    let st = b.session.state();
    let x = st.global.x_axis.as_ref().unwrap();
    assert!(matches!(x.kind, ScaleKind::Band { .. }));
    for p in st.visible() {
        let (a, z) = band_oracle(&ds, "Region", p.row_id, st.canvas.width);
        assert!(
            p.position.x > a && p.position.x < z,
            "row {} x={} band=({a},{z})",
            p.row_id,
            p.position.x
        );
    }
}

#[test]
fn spoken_utterance_needs_listening() {
    let mut b = fresh();
    let before = b.session.state().clone();
    let r = b.spoken(0, "Color by region");
    assert_eq!(r.feedback.len(), 1);
    assert_eq!(r.feedback[0].kind, FeedbackKind::Failure);
    assert_eq!(b.session.state(), &before);

    b.push(1_000, EventBody::DoubleTap { x: 5.0, y: 5.0 });
    let r = b.spoken(1_000 + LISTEN_WINDOW_MS + 1, "Color by region");
    assert_eq!(r.feedback[0].kind, FeedbackKind::Failure, "window lapsed");
    b.push(10_000, EventBody::DoubleTap { x: 5.0, y: 5.0 });
    let r = b.spoken(11_000, "Color by region");
    assert_eq!(r.feedback[0].kind, FeedbackKind::Success);
    assert!(!r.listening);

    let r = b.typed(60_000, "Color by locale");
    assert_eq!(r.feedback[0].kind, FeedbackKind::Success, "typed entry always runs");
}

#[test]
fn fusion_is_independent_of_delay() {
    let run = |delay: u64, typed: bool| {
        let mut b = fresh();
        b.push(
            0,
            EventBody::Swipe {
                path: horizontal_swipe(),
            },
        );
        if typed {
            b.typed(delay, "Median Debt");
        } else {
            b.spoken(delay, "Median Debt");
        }
        b.session.snapshot()
    };
    let reference = run(0, true);
    assert!(reference.state.global.x_axis.is_some());
    for (delay, typed) in [(1, false), (4_000, false), (5_000, true), (9_999, true), (10_000, true)] {
        assert_eq!(run(delay, typed), reference, "delay {delay}");
    }
}

#[test]
fn undo_restores_and_is_single_level() {
    let mut b = fresh();
    b.typed(0, "Color by region");
    let after_color = b.session.snapshot();
    b.typed(10, "Bring the Great Lakes schools to the top left");
    assert_ne!(b.session.snapshot(), after_color);
    let r = b.typed(20, "undo");
    assert_eq!(r.feedback[0].kind, FeedbackKind::Success);
    assert_eq!(b.session.snapshot(), after_color);
    let r = b.typed(30, "undo");
    assert_eq!(r.feedback[0].text, "Nothing to undo.");
    assert_eq!(b.session.snapshot(), after_color);
}

#[test]
fn failed_command_is_atomic_and_keeps_undo() {
    let mut b = fresh();
    let initial = b.session.snapshot();
    b.typed(0, "Color by region");
    let colored = b.session.snapshot();
    let r = b.typed(10, "Size by region");
    assert_eq!(r.feedback[0].kind, FeedbackKind::Failure, "{:?}", r.feedback);
    assert_eq!(b.session.snapshot(), colored);
    b.typed(20, "undo");
    assert_eq!(b.session.snapshot(), initial);
}

fn menu(operation: OperationKind, params: Params, scope: Scope) -> EventBody {
    EventBody::Menu {
        operation,
        params,
        scope,
    }
}

#[test]
fn menu_commands_suggest_speech_once() {
    let clear_labels = || {
        menu(
            OperationKind::Clear,
            Params {
                clear: Some(flexunit::dataset::ClearTarget::Labels),
                ..Default::default()
            },
            Scope::Global,
        )
    };
    let mut b = fresh();
    let r = b.push(0, clear_labels());
    assert_eq!(r.feedback.len(), 2);
    assert_eq!(r.feedback[1].kind, FeedbackKind::DiscoveryHint);
    assert_eq!(
        r.feedback[1].text,
        "To remove all labels, you could also say \"Clear all labels\""
    );
    let r = b.push(10, clear_labels());
    assert_eq!(r.feedback.len(), 1, "same hint is not repeated");

    let mut quiet = fresh();
    quiet.push(0, EventBody::Suggestions { enabled: false });
    assert_eq!(quiet.push(10, clear_labels()).feedback.len(), 1);

    let mut spoken = fresh();
    let r = spoken.typed(0, "Clear all labels");
    assert!(r.feedback.iter().all(|f| f.kind != FeedbackKind::DiscoveryHint));
}

#[test]
fn hints_are_runnable_commands() {
    let ds = dataset();
    let g = flexunit::nl::Grammar::new(&ds);
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(0);
    let cases = [
        (
            OperationKind::ColorBy,
            Params {
                attribute: Some("Region".into()),
                ..Default::default()
            },
            Scope::Global,
        ),
        (
            OperationKind::OrderBy,
            Params {
                attribute: Some("Population".into()),
                ..Default::default()
            },
            Scope::Local,
        ),
        (
            OperationKind::ColorExplicit,
            Params {
                color: Some(flexunit::color::NamedColor::Red),
                ..Default::default()
            },
            Scope::Local,
        ),
        (
            OperationKind::Tag,
            Params {
                tag: Some("favorites".into()),
                ..Default::default()
            },
            Scope::Local,
        ),
        (OperationKind::Label, Params::default(), Scope::Global),
    ];
    for (op, params, scope) in cases {
        let mut b = fresh();
        let lasso = vec![
            Point::new(0.0, 0.0),
            Point::new(600.0, 0.0),
            Point::new(600.0, 800.0),
            Point::new(0.0, 800.0),
        ];
        b.push(0, EventBody::Lasso { path: lasso });
        let r = b.push(10, menu(op, params, scope));
        let hint = r
            .feedback
            .iter()
            .find(|f| f.kind == FeedbackKind::DiscoveryHint)
            .expect("hint");
        let cmd = hint.example_command.clone().unwrap();
        let parsed = g.parse(&cmd, &mut rng);
        assert!(parsed.is_complete(), "{cmd}");
        assert_eq!(parsed.operation(), Some(op), "{cmd}");
    }
}

#[test]
fn ambiguity_pick_reexecutes() {
    let ds = Arc::new(
        load_csv(
            "Name,Average Cost,Cost of Books,Region\nA,1,20,X\nB,3,4,Y\nC,2,9,X\n".as_bytes(),
            CsvOptions::default(),
        )
        .unwrap(),
    );
    let mut b = ScriptBuilder::new(ds.clone(), 1);
    let r = b.typed(0, "Size by cost");
    assert_eq!(r.feedback.len(), 1);
    assert_eq!(r.feedback[0].ambiguities.len(), 1);
    assert_eq!(
        b.session.state().global.size_by.as_ref().unwrap().attribute,
        "Average Cost"
    );
    let r = b.push(
        10,
        EventBody::ResolveAmbiguity {
            ambiguity: 0,
            choice: 1,
        },
    );
    assert_eq!(r.feedback[0].kind, FeedbackKind::Success, "{:?}", r.feedback);
    assert_eq!(
        b.session.state().global.size_by.as_ref().unwrap().attribute,
        "Cost of Books"
    );

    let mut direct = ScriptBuilder::new(ds, 1);
    direct.typed(0, "Size by cost of books");
    assert_eq!(direct.session.state(), b.session.state());

    // undo goes back to before the original command, not to the provisional one
    b.typed(20, "undo");
    assert!(b.session.state().global.size_by.is_none());
}

#[test]
fn sequence_is_one_command() {
    let mut b = fresh();
    let initial = b.session.snapshot();
    let r = b.typed(0, "Color by region then order by cost");
    assert_eq!(r.feedback.len(), 1);
    assert_eq!(r.feedback[0].kind, FeedbackKind::Success, "{:?}", r.feedback);
    assert!(b.session.state().global.color_by.is_some());
    b.typed(10, "undo");
    assert_eq!(b.session.snapshot(), initial);

    let r = b.typed(20, "Color by region then size by region");
    assert_eq!(r.feedback[0].kind, FeedbackKind::Failure);
    assert_eq!(
        b.session.snapshot(),
        initial,
        "failed step rolls back the whole sequence"
    );
}

#[test]
fn dragging_a_point_moves_and_pins_it() {
    let mut b = fresh();
    let p = b.session.state().point(3).position;
    let r = b.push(
        0,
        EventBody::Drag {
            path: vec![p, Point::new(p.x + 20.0, p.y), Point::new(100.0, 100.0)],
        },
    );
    assert_eq!(r.feedback[0].kind, FeedbackKind::Success);
    assert!(r
        .feedback
        .iter()
        .any(|f| f.example_command.as_deref() == Some("Move these here")));
    let st = b.session.state();
    assert!(st.point(3).pinned);
    assert!(st.point(3).position.distance(Point::new(100.0, 100.0)) < 1e-9);
}

#[test]
fn pen_and_touch_lasso_agree_and_brush_inks() {
    let lasso = vec![
        Point::new(500.0, 300.0),
        Point::new(700.0, 300.0),
        Point::new(700.0, 500.0),
        Point::new(500.0, 500.0),
    ];
    let mut pen = fresh();
    pen.push_as(0, EventBody::Lasso { path: lasso.clone() }, Modality::Pen);
    let mut touch = fresh();
    touch.push_as(0, EventBody::Lasso { path: lasso.clone() }, Modality::Touch);
    assert!(!pen.session.state().selection.is_empty());
    assert_eq!(pen.session.state(), touch.session.state());

    let stroke = vec![Point::new(5.0, 5.0), Point::new(60.0, 30.0), Point::new(90.0, 5.0)];
    let mut ink = fresh();
    ink.push(0, EventBody::Tool { brush: true });
    ink.push_as(10, EventBody::Drag { path: stroke.clone() }, Modality::Pen);
    assert!(
        matches!(&ink.session.state().annotations[..], [Annotation::InkStroke { points, .. }] if *points == stroke)
    );
    ink.push_as(20, EventBody::Drag { path: stroke }, Modality::Touch);
    assert_eq!(
        ink.session.state().annotations.len(),
        1,
        "touch drag with brush is not ink"
    );
}

#[test]
fn presses_and_taps() {
    let ds = dataset();
    let mut b = fresh();
    let p = b.session.state().point(5).position;
    let r = b.push(0, EventBody::Tap { x: p.x, y: p.y });
    assert_eq!(r.tooltip.as_ref().unwrap().label, ds.label_for(5));
    let r = b.push(10, EventBody::LongPress { x: p.x, y: p.y });
    assert_eq!(r.menu.as_ref().unwrap().scope, Scope::Local);
    assert!(r.listening);
    assert_eq!(b.session.state().selection, vec![5]);
    let r = b.push(20, EventBody::LongPress { x: 20.0, y: 20.0 });
    assert_eq!(r.menu.as_ref().unwrap().scope, Scope::Global);
    let r = b.push(30, EventBody::Tap { x: 20.0, y: 20.0 });
    assert!(b.session.state().selection.is_empty());
    assert!(r.listening, "tap on canvas leaves listening unchanged");
    let r = b.push(40, EventBody::MicTap);
    assert!(!r.listening, "mic tap toggles listening off");
}

#[test]
fn restore_returns_points_to_global_axis() {
    let ds = dataset();
    let mut b = fresh();
    b.typed(0, "Align horizontally by average cost");
    b.typed(10, "Remove private schools");
    let r = b.typed(20, "Restore removed points");
    assert_eq!(r.feedback[0].kind, FeedbackKind::Success, "{:?}", r.feedback);
    let st = b.session.state();
    assert!(st.bin.is_empty());
    let x = st.global.x_axis.as_ref().unwrap();
    for p in st.visible().filter(|p| !p.pinned) {
        if let Some(v) = number(&ds, p.row_id, "Average Cost") {
            assert!((p.position.x - x.map(v)).abs() <= 0.5, "row {}", p.row_id);
        }
    }
}

#[test]
fn clear_colors_drops_binding_and_overrides() {
    let mut b = fresh();
    b.typed(0, "Color by region");
    b.typed(10, "Color Mid-Atlantic schools red");
    b.typed(20, "Clear all colors");
    let st = b.session.state();
    assert!(st.global.color_by.is_none());
    assert!(st
        .points
        .iter()
        .all(|p| p.color == Paint::Bound(flexunit::color::DEFAULT_FILL)));
}

#[test]
fn local_order_creates_order_binding() {
    let mut b = fresh();
    b.typed(0, "Order Mid-Atlantic schools by admission rate");
    let st = b.session.state();
    assert!(matches!(st.locals[..], [ref l] if matches!(l.arrangement, Arrangement::Order { .. })));
}

#[test]
fn followup_survives_snapshot_restore() {
    let ds = dataset();
    let mut a = fresh();
    a.typed(0, "Order Mid-Atlantic schools by control");
    let snap: SessionSnapshot = serde_json::from_str(&a.session.snapshot().to_json()).unwrap();
    a.typed(10, "admission rate");

    let config = SessionConfig {
        seed: SEED,
        ..Default::default()
    };
    let mut resumed = Session::from_snapshot(ds, snap, config).unwrap();
    resumed
        .handle(&flexunit::session::InputEvent::typed(1, 10, "admission rate"))
        .unwrap();
    assert_eq!(resumed.state(), a.session.state());
}

#[test]
fn all_points_overrides_context_targets() {
    let mut b = fresh();
    b.typed(0, "Move the schools in the Far West to the top left corner");
    let pinned: Vec<u32> = b
        .session
        .state()
        .points
        .iter()
        .filter(|p| p.pinned)
        .map(|p| p.row_id)
        .collect();
    b.typed(10, "Align all points horizontally by population");
    let st = b.session.state();
    assert_eq!(st.global.x_axis.as_ref().unwrap().attribute, "Population");
    assert!(pinned.iter().all(|id| st.point(*id).pinned));
    assert!(st.locals.is_empty());
}

#[test]
fn removed_context_targets_fall_back_to_all() {
    let mut b = fresh();
    b.typed(0, "Remove schools in the Far West");
    let r = b.typed(10, "Align horizontally by population");
    assert_eq!(r.feedback[0].kind, FeedbackKind::Success, "{:?}", r.feedback);
    assert!(b.session.state().global.x_axis.is_some());
}
