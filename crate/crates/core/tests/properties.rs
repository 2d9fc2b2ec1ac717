mod common;

use std::collections::BTreeSet;

use common::checks::succeeded;
use common::*;
use flexunit::fusion::Modality;
use flexunit::geometry::Point;
use flexunit::session::replay::replay;
use flexunit::session::{EventBody, FeedbackKind};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn global_axes_follow_linear_oracle(seed in any::<u64>(), filter in any::<bool>(), n in 1usize..4) {
        let r = checks::scale_check(seed, filter, n);
        prop_assert!(r.is_ok(), "{:?}", r);
    }

    #[test]
    fn moved_points_ignore_axes_until_reordered(seed in any::<u64>()) {
        let r = checks::pin_check(seed);
        prop_assert!(r.is_ok(), "{:?}", r);
    }

    #[test]
    fn undo_restores_previous_snapshot(seed in any::<u64>()) {
        let r = checks::undo_check(seed);
        prop_assert!(r.is_ok(), "{:?}", r);
    }

    #[test]
    fn failed_commands_change_nothing(seed in any::<u64>()) {
        let ds = dataset();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut b = ScriptBuilder::new(ds.clone(), seed);
        b.typed(0, &random_command(&ds, &mut rng));
        let before = b.session.snapshot();
        let bad = ["Size by region", "Apply a legion shelter", "Bring the private schools here"];
        let r = b.typed(10, bad[rng.gen_range(0..bad.len())]);
        prop_assert_ne!(r.feedback[0].kind, FeedbackKind::Success);
        prop_assert_eq!(b.session.snapshot().state, before.state);
    }

    #[test]
    fn selection_commands_are_local(x0 in 0.0f64..900.0, y0 in 0.0f64..600.0, w in 60.0f64..300.0, h in 60.0f64..200.0, op in 0usize..3) {
        let mut b = ScriptBuilder::new(dataset(), SEED);
        b.typed(0, "Color by region");
        b.typed(10, "Align horizontally by average cost");
        let lasso = vec![Point::new(x0, y0), Point::new(x0 + w, y0), Point::new(x0 + w, y0 + h), Point::new(x0, y0 + h)];
        b.push(20, EventBody::Lasso { path: lasso });
        let chosen: BTreeSet<u32> = b.session.state().selection.iter().copied().collect();
        prop_assume!(!chosen.is_empty());
        let before = b.session.state().clone();
        let cmd = ["Order by admission rate", "Color red", "Size by population"][op];
        let r = b.spoken(1_000, cmd);
        prop_assert!(succeeded(&r), "{:?}", r.feedback);
        for p in &b.session.state().points {
            if !chosen.contains(&p.row_id) {
                prop_assert_eq!(p, before.point(p.row_id));
            }
        }
    }

    #[test]
    fn replay_is_deterministic(seed in any::<u64>(), n in 1usize..6) {
        let ds = dataset();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut b = ScriptBuilder::new(ds.clone(), seed);
        for i in 0..n {
            let t = i as u64 * 1_000;
            match rng.gen_range(0..4) {
                0 => { b.push(t, EventBody::Swipe { path: horizontal_swipe() }); }
                1 => { b.push(t, EventBody::PointHold { x: rng.gen_range(50.0..1150.0), y: rng.gen_range(50.0..750.0) }); }
                _ => {}
            }
            b.typed(t + 500, &random_command(&ds, &mut rng));
        }
        let script = b.script(seed);
        let a = replay(ds.clone(), &script, None).unwrap().snapshot.to_json();
        let c = replay(ds, &script, None).unwrap().snapshot.to_json();
        prop_assert_eq!(&a, &c);
        prop_assert_eq!(a, b.session.snapshot().to_json());
    }

    #[test]
    fn attribute_followups_keep_operation_and_targets(seed in any::<u64>()) {
        let ds = dataset();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut b = ScriptBuilder::new(ds.clone(), seed);
        let regions = regions(&ds);
        let region = &regions[rng.gen_range(0..regions.len())];
        let q = QUANTITATIVE[rng.gen_range(0..QUANTITATIVE.len())];
        let first = [format!("Order schools in the {region} by {q}"), format!("Size by {q}"), format!("Align vertically by {q}")];
        b.typed(0, &first[rng.gen_range(0..3)]);
        let ctx0 = b.session.context().unwrap().clone();
        let q2 = QUANTITATIVE[rng.gen_range(0..QUANTITATIVE.len())];
        let r = b.typed(10, q2);
        prop_assert_eq!(r.feedback[0].kind, FeedbackKind::FollowupInferred);
        let ctx1 = b.session.context().unwrap();
        prop_assert_eq!(ctx1.operation, ctx0.operation);
        prop_assert_eq!(ctx1.params.attribute.as_deref(), Some(q2));
        prop_assert_eq!(ctx1.params.direction, ctx0.params.direction);
        prop_assert_eq!(&ctx1.target_ids, &ctx0.target_ids);
        prop_assert_eq!(ctx1.command_index, ctx0.command_index + 1);
    }

    #[test]
    fn equivalent_gestures_give_equal_states(x0 in 100.0f64..800.0, y0 in 100.0f64..500.0, w in 80.0f64..300.0) {
        let lasso = vec![Point::new(x0, y0), Point::new(x0 + w, y0), Point::new(x0 + w, y0 + w), Point::new(x0, y0 + w)];
        let mut pen = ScriptBuilder::new(dataset(), SEED);
        pen.push_as(0, EventBody::Lasso { path: lasso.clone() }, Modality::Pen);
        pen.spoken(100, "Order by population");
        let mut touch = ScriptBuilder::new(dataset(), SEED);
        touch.push_as(0, EventBody::Lasso { path: lasso }, Modality::Touch);
        touch.spoken(100, "Order by population");
        prop_assert_eq!(pen.session.state(), touch.session.state());

        let (x, y) = (x0 + w / 2.0, y0 + w / 2.0);
        let mut hold = ScriptBuilder::new(dataset(), SEED);
        hold.push(0, EventBody::PointHold { x, y });
        hold.spoken(100, "Bring the private schools here");
        let mut press = ScriptBuilder::new(dataset(), SEED);
        press.push_as(0, EventBody::LongPress { x, y }, Modality::Pen);
        press.spoken(100, "Bring the private schools here");
        prop_assert_eq!(hold.session.state(), press.session.state());
    }

    #[test]
    fn fusion_ignores_timing_within_window(delay in 0u64..10_000, q in 0usize..7) {
        let run = |d: u64| {
            let mut b = ScriptBuilder::new(dataset(), SEED);
            b.push(0, EventBody::Swipe { path: horizontal_swipe() });
            b.typed(d, QUANTITATIVE[q]);
            b.session.snapshot()
        };
        prop_assert_eq!(run(delay), run(0));
    }
}
