#![allow(dead_code)]

pub mod checks;

use std::collections::BTreeSet;
use std::sync::Arc;

use flexunit::dataset::{colleges, Dataset, Value};
use flexunit::fusion::Modality;
use flexunit::geometry::{Direction, Point, Rect, RegionKeyword};
use flexunit::session::replay::{ReplayHeader, Script};
use flexunit::session::{EventBody, EventResponse, InputEvent, Session, SessionConfig};
use flexunit::view_state::ViewState;
use rand::Rng;

pub const SEED: u64 = 7;

pub fn dataset() -> Arc<Dataset> {
    Arc::new(colleges())
}

/// Rows whose `attribute` equals one of `values`, by direct scan.
pub fn rows_where(ds: &Dataset, attribute: &str, values: &[&str]) -> BTreeSet<u32> {
    ds.row_ids()
        .filter(|id| matches!(ds.value_by_name(*id, attribute), Some(Value::Text(t)) if values.contains(&t.as_str())))
        .collect()
}

pub fn number(ds: &Dataset, id: u32, attribute: &str) -> Option<f64> {
    ds.value_by_name(id, attribute).and_then(Value::as_number)
}

/// Drives a live session while recording the events it was fed, so that
/// gestures can be aimed at wherever points currently are.
pub struct ScriptBuilder {
    pub session: Session,
    pub events: Vec<InputEvent>,
    seq: u64,
}

impl ScriptBuilder {
    pub fn new(ds: Arc<Dataset>, seed: u64) -> ScriptBuilder {
        let config = SessionConfig {
            seed,
            ..Default::default()
        };
        ScriptBuilder {
            session: Session::new(ds, config),
            events: Vec::new(),
            seq: 0,
        }
    }

    pub fn push(&mut self, t_ms: u64, body: EventBody) -> EventResponse {
        self.push_as(t_ms, body, Modality::Touch)
    }

    pub fn push_as(&mut self, t_ms: u64, body: EventBody, modality: Modality) -> EventResponse {
        self.seq += 1;
        let ev = InputEvent::new(self.seq, t_ms, body).with_modality(modality);
        let resp = self.session.handle(&ev).expect("event accepted");
        self.events.push(ev);
        resp
    }

    pub fn typed(&mut self, t_ms: u64, text: &str) -> EventResponse {
        self.push(
            t_ms,
            EventBody::Utterance {
                text: text.into(),
                entry_mode: flexunit::session::EntryMode::Typed,
            },
        )
    }

    pub fn spoken(&mut self, t_ms: u64, text: &str) -> EventResponse {
        self.push(
            t_ms,
            EventBody::Utterance {
                text: text.into(),
                entry_mode: flexunit::session::EntryMode::Spoken,
            },
        )
    }

    /// A rectangle around the given points, `margin` px wider on each side.
    pub fn lasso_around(&self, ids: &BTreeSet<u32>, margin: f64) -> Vec<Point> {
        let st = self.session.state();
        let r = Rect::bounding(ids.iter().map(|id| st.point(*id).position)).expect("non-empty");
        vec![
            Point::new(r.x0 - margin, r.y0 - margin),
            Point::new(r.x1 + margin, r.y0 - margin),
            Point::new(r.x1 + margin, r.y1 + margin),
            Point::new(r.x0 - margin, r.y1 + margin),
        ]
    }

    pub fn script(&self, seed: u64) -> Script {
        Script {
            header: Some(ReplayHeader {
                version: 1,
                seed: Some(seed),
                canvas: None,
                suggestions: None,
            }),
            events: self
                .events
                .iter()
                .cloned()
                .enumerate()
                .map(|(i, e)| (i + 2, e))
                .collect(),
        }
    }
}

pub fn horizontal_swipe() -> Vec<Point> {
    (0..=8).map(|i| Point::new(100.0 + 50.0 * i as f64, 760.0)).collect()
}

/// The usage scenario: color by region, swipe + "Region", remove schools
/// outside large cities and suburbs, bring Great Lakes schools to a held
/// point, lasso them and order by admission rate, then lasso the Far West
/// and say "repeat".
pub fn scenario(ds: Arc<Dataset>) -> ScriptBuilder {
    let mut b = ScriptBuilder::new(ds.clone(), SEED);
    b.typed(0, "Color by region");
    b.push(
        2_000,
        EventBody::Swipe {
            path: horizontal_swipe(),
        },
    );
    b.spoken(3_000, "Region");
    b.typed(5_000, "Remove schools that are not in large cities or large suburbs");
    b.push(8_000, EventBody::PointHold { x: 600.0, y: 150.0 });
    b.spoken(9_000, "Bring the Great Lakes schools here");
    let great_lakes: BTreeSet<u32> = visible(&b.session, &rows_where(&ds, "Region", &["Great Lakes"]));
    let lasso = b.lasso_around(&great_lakes, 6.0);
    b.push(12_000, EventBody::Lasso { path: lasso });
    b.spoken(13_000, "Order by admission rate");
    b.push(16_000, EventBody::Tap { x: 1190.0, y: 10.0 });
    let far_west = visible(&b.session, &rows_where(&ds, "Region", &["Far West"]));
    let lasso = b.lasso_around(&far_west, 3.0);
    b.push(17_000, EventBody::Lasso { path: lasso });
    b.spoken(18_000, "repeat");
    b
}

pub fn visible(session: &Session, ids: &BTreeSet<u32>) -> BTreeSet<u32> {
    ids.iter()
        .copied()
        .filter(|id| session.state().is_visible(*id))
        .collect()
}

pub const QUANTITATIVE: [&str; 7] = [
    "SAT Average",
    "Average Cost",
    "Median Debt",
    "Admission Rate",
    "Population",
    "Median Earnings",
    "Expenditure",
];

pub const CATEGORICAL: [&str; 3] = ["Region", "Locale", "Control"];

pub fn regions(ds: &Dataset) -> Vec<String> {
    ds.attribute("Region").unwrap().categories().to_vec()
}

/// Ids in serpentine reading order: rows top to bottom, alternating
/// left-to-right and right-to-left.
pub fn reading_order(st: &ViewState, ids: &BTreeSet<u32>) -> Vec<u32> {
    let mut rows: Vec<f64> = ids.iter().map(|id| st.point(*id).position.y).collect();
    rows.sort_by(f64::total_cmp);
    rows.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
    let mut out = Vec::new();
    for (r, y) in rows.iter().enumerate() {
        let mut row: Vec<u32> = ids
            .iter()
            .copied()
            .filter(|id| (st.point(*id).position.y - y).abs() < 1e-6)
            .collect();
        row.sort_by(|a, b| st.point(*a).position.x.total_cmp(&st.point(*b).position.x));
        if r % 2 == 1 {
            row.reverse();
        }
        out.extend(row);
    }
    out
}

/// Adjacent pairs in reading order whose values decrease; missing values
/// belong at the end.
pub fn order_violations(ds: &Dataset, st: &ViewState, ids: &BTreeSet<u32>, attribute: &str) -> usize {
    let keys: Vec<(bool, f64)> = reading_order(st, ids)
        .iter()
        .map(|id| match number(ds, *id, attribute) {
            Some(v) => (false, v),
            None => (true, 0.0),
        })
        .collect();
    keys.windows(2)
        .filter(|w| w[0].0.cmp(&w[1].0).then(w[0].1.total_cmp(&w[1].1)).is_gt())
        .count()
}

/// Where a global linear axis should put `v`, computed from the visible
/// domain and the inset canvas rather than through the scale object.
pub fn linear_oracle(ds: &Dataset, st: &ViewState, attribute: &str, direction: Direction, v: f64) -> f64 {
    let vals: Vec<f64> = st
        .visible_ids()
        .into_iter()
        .filter_map(|id| number(ds, id, attribute))
        .collect();
    let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (start, end) = match direction {
        Direction::Horizontal => (0.05 * st.canvas.width, 0.95 * st.canvas.width),
        Direction::Vertical => (0.95 * st.canvas.height, 0.05 * st.canvas.height),
    };
    if lo == hi {
        return (start + end) / 2.0;
    }
    start + (v - lo) / (hi - lo) * (end - start)
}

fn pick<'a, T>(rng: &mut impl Rng, xs: &'a [T]) -> &'a T {
    &xs[rng.gen_range(0..xs.len())]
}

/// A command that succeeds on the unfiltered colleges view.
pub fn random_command(ds: &Dataset, rng: &mut impl Rng) -> String {
    let regions = regions(ds);
    let region = pick(rng, &regions).clone();
    let q = *pick(rng, &QUANTITATIVE);
    let c = *pick(rng, &CATEGORICAL);
    let any = if rng.gen_bool(0.5) { q } else { c };
    let place = pick(rng, &RegionKeyword::ALL).phrase();
    let dir = if rng.gen_bool(0.5) {
        "horizontally"
    } else {
        "vertically"
    };
    let color = *pick(rng, &["red", "blue", "green", "orange", "purple"]);
    match rng.gen_range(0..12) {
        0 => format!("Color by {any}"),
        1 => format!("Size by {q}"),
        2 => format!("Align {dir} by {any}"),
        3 => format!("Order schools in the {region} by {q}"),
        4 => format!("Move the schools in the {region} to the {place}"),
        5 => format!("Remove schools in the {region}"),
        6 => format!("Keep only schools in the {region}"),
        7 => format!("Color schools in the {region} {color}"),
        8 => format!("Add labels to schools in the {region}"),
        9 => format!("Highlight schools in the {region}"),
        10 => format!("Tag schools in the {region} as picks"),
        _ => "Summarize".to_string(),
    }
}
