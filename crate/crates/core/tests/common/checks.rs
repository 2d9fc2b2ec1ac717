//! Randomized checks shared by the property tests and the acceptance runner.
//! Each returns `Err` with a description of the first violation.

use flexunit::geometry::{Direction, RegionKeyword};
use flexunit::session::{EventResponse, FeedbackKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;

pub fn succeeded(r: &EventResponse) -> bool {
    matches!(
        r.feedback.first().map(|f| f.kind),
        Some(FeedbackKind::Success | FeedbackKind::FollowupInferred)
    )
}

pub fn non_filter_command(ds: &Dataset, rng: &mut impl Rng) -> String {
    loop {
        let c = random_command(ds, rng);
        if !c.starts_with("Remove") && !c.starts_with("Keep") {
            return c;
        }
    }
}

fn expect_success(r: &EventResponse, cmd: &str) -> Result<(), String> {
    if succeeded(r) {
        Ok(())
    } else {
        Err(format!("{cmd:?} failed: {:?}", r.feedback.first().map(|f| &f.text)))
    }
}

/// Optional filter, then one to three global axis assignments; every
/// unpinned point the global axis governs must sit within half a pixel of
/// the hand-computed linear map. Returns how many coordinates were checked.
pub fn scale_check(seed: u64, filter: bool, n: usize) -> Result<usize, String> {
    let ds = dataset();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = ScriptBuilder::new(ds.clone(), seed);
    let mut t = 0;
    if filter {
        let regions = regions(&ds);
        let region = &regions[rng.gen_range(0..regions.len())];
        b.typed(t, &format!("Remove schools in the {region}"));
    }
    for _ in 0..n {
        t += 100;
        let q = QUANTITATIVE[rng.gen_range(0..QUANTITATIVE.len())];
        let dir = if rng.gen_bool(0.5) {
            "horizontally"
        } else {
            "vertically"
        };
        let cmd = format!("Align {dir} by {q}");
        expect_success(&b.typed(t, &cmd), &cmd)?;
    }
    let st = b.session.state();
    let mut checked = 0;
    for direction in [Direction::Horizontal, Direction::Vertical] {
        let Some(scale) = st.global.axis(direction) else {
            continue;
        };
        for p in st.visible().filter(|p| !p.pinned) {
            if st.governing_scale(p.row_id, direction) != Some(scale) {
                continue;
            }
            let Some(v) = number(&ds, p.row_id, &scale.attribute) else {
                continue;
            };
            let want = linear_oracle(&ds, st, &scale.attribute, direction, v);
            let got = match direction {
                Direction::Horizontal => p.position.x,
                Direction::Vertical => p.position.y,
            };
            if (got - want).abs() > 0.5 {
                return Err(format!("row {} {direction:?}: {got} vs {want}", p.row_id));
            }
            checked += 1;
        }
    }
    Ok(checked)
}

/// Move a region, reassign the global x or y axis, then order the region.
/// Moved points must not budge for the axis; ordering unpins them and lays
/// them out in value order.
pub fn pin_check(seed: u64) -> Result<(), String> {
    let ds = dataset();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = ScriptBuilder::new(ds.clone(), seed);
    for i in 0..rng.gen_range(0..3) {
        b.typed(i * 10, &non_filter_command(&ds, &mut rng));
    }
    let regions = regions(&ds);
    let region = regions[rng.gen_range(0..regions.len())].clone();
    let place = RegionKeyword::ALL[rng.gen_range(0..RegionKeyword::ALL.len())].phrase();
    let cmd = format!("Move the schools in the {region} to the {place}");
    expect_success(&b.typed(100, &cmd), &cmd)?;
    let moved = visible(&b.session, &rows_where(&ds, "Region", &[region.as_str()]));
    let before: Vec<_> = moved.iter().map(|id| b.session.state().point(*id).clone()).collect();

    let q = QUANTITATIVE[rng.gen_range(0..QUANTITATIVE.len())];
    let dir = if rng.gen_bool(0.5) {
        "horizontally"
    } else {
        "vertically"
    };
    let cmd = format!("Align all schools {dir} by {q}");
    expect_success(&b.typed(200, &cmd), &cmd)?;
    let after: Vec<_> = moved.iter().map(|id| b.session.state().point(*id).clone()).collect();
    if before != after {
        return Err(format!("{cmd:?} moved pinned {region} points"));
    }

    let q2 = QUANTITATIVE[rng.gen_range(0..QUANTITATIVE.len())];
    let cmd = format!("Order schools in the {region} by {q2}");
    expect_success(&b.typed(300, &cmd), &cmd)?;
    let st = b.session.state();
    if let Some(id) = moved.iter().find(|id| st.point(**id).pinned) {
        return Err(format!("row {id} still pinned after {cmd:?}"));
    }
    match order_violations(&ds, st, &moved, q2) {
        0 => Ok(()),
        n => Err(format!("{n} order violations after {cmd:?}")),
    }
}

/// A random prefix, then one random command, undo, undo. Returns the
/// command that was undone.
pub fn undo_check(seed: u64) -> Result<String, String> {
    let ds = dataset();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = ScriptBuilder::new(ds.clone(), seed);
    for i in 0..rng.gen_range(0..3) {
        b.typed(i * 10, &non_filter_command(&ds, &mut rng));
    }
    let before = b.session.snapshot();
    let cmd = random_command(&ds, &mut rng);
    expect_success(&b.typed(100, &cmd), &cmd)?;
    b.typed(200, "undo");
    if b.session.snapshot() != before {
        return Err(format!("undo after {cmd:?} did not restore the snapshot"));
    }
    let r = b.typed(300, "undo");
    if r.feedback.first().map(|f| f.text.as_str()) != Some("Nothing to undo.") {
        return Err(format!("second undo after {cmd:?} answered {:?}", r.feedback));
    }
    if b.session.snapshot() != before {
        return Err(format!("second undo after {cmd:?} changed the state"));
    }
    Ok(cmd)
}
