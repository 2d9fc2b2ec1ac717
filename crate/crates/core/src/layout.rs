//! Position, color and size computation for bound and locally bound
//! arrangements. Every function here is pure over `(state, params)`; the
//! returned results are applied by [`ViewState::apply_layout`] or the session.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::color::{palette_color, ramp, Rgb, MISSING_FILL, RAMP_HIGH, RAMP_LOW};
use crate::dataset::{AttributeKind, Dataset, Value};
use crate::geometry::{Canvas, Direction, Point, Rect};
use crate::text::format_number;
use crate::view_state::{Arrangement, ColorBinding, SizeBinding, ViewState};

pub const AXIS_INSET: f64 = 0.05;
pub const R_MIN: f64 = 3.0;
pub const R_MAX: f64 = 12.0;
pub const HISTOGRAM_BINS: usize = 10;
const MISSING_BAND: &str = "NA";

#[derive(Debug, Error, PartialEq)]
pub enum LayoutError {
    #[error("unknown attribute '{0}'")]
    UnknownAttribute(String),
    #[error("all values of '{0}' are missing among the targets")]
    AllMissing(String),
    #[error("size requires a quantitative attribute")]
    SizeRequiresQuantitative,
    #[error("unknown region '{0}'")]
    UnknownRegion(String),
    #[error("no target points")]
    EmptyTargets,
    #[error("destination ({0}, {1}) is outside the canvas")]
    OutsideCanvas(f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tick {
    pub label: String,
    pub px: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScaleKind {
    Linear { domain: (f64, f64) },
    Band { categories: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scale {
    pub attribute: String,
    #[serde(flatten)]
    pub kind: ScaleKind,
    /// Pixel interval; may be decreasing (vertical axes grow upward).
    pub range: (f64, f64),
    pub tick_marks: Vec<Tick>,
}

impl Scale {
    pub fn linear(attribute: &str, domain: (f64, f64), range: (f64, f64)) -> Scale {
        let mut scale = Scale {
            attribute: attribute.to_string(),
            kind: ScaleKind::Linear { domain },
            range,
            tick_marks: Vec::new(),
        };
        let ticks = if domain.0 == domain.1 {
            vec![domain.0]
        } else {
            (0..5)
                .map(|i| domain.0 + (domain.1 - domain.0) * i as f64 / 4.0)
                .collect()
        };
        scale.tick_marks = ticks
            .into_iter()
            .map(|v| Tick {
                label: format_number((v * 100.0).round() / 100.0),
                px: scale.map(v),
            })
            .collect();
        scale
    }

    pub fn band(attribute: &str, categories: Vec<String>, range: (f64, f64)) -> Scale {
        let mut scale = Scale {
            attribute: attribute.to_string(),
            kind: ScaleKind::Band { categories },
            range,
            tick_marks: Vec::new(),
        };
        if let ScaleKind::Band { categories } = &scale.kind {
            scale.tick_marks = categories
                .iter()
                .map(|c| {
                    let (lo, hi) = scale.band_of(c).expect("own category");
                    Tick {
                        label: c.clone(),
                        px: (lo + hi) / 2.0,
                    }
                })
                .collect();
        }
        scale
    }

    /// Linear map; a degenerate domain maps to the range midpoint.
    pub fn map(&self, v: f64) -> f64 {
        let (r0, r1) = self.range;
        match &self.kind {
            ScaleKind::Linear { domain: (d0, d1) } => {
                if d0 == d1 {
                    (r0 + r1) / 2.0
                } else {
                    r0 + (v - d0) / (d1 - d0) * (r1 - r0)
                }
            }
            ScaleKind::Band { .. } => (r0 + r1) / 2.0,
        }
    }

    /// Pixel interval `(lo, hi)` with `lo <= hi` of a band category.
    pub fn band_of(&self, category: &str) -> Option<(f64, f64)> {
        let ScaleKind::Band { categories } = &self.kind else {
            return None;
        };
        let i = categories.iter().position(|c| c == category)?;
        let (r0, r1) = self.range;
        let step = (r1 - r0) / categories.len() as f64;
        let a = r0 + step * i as f64;
        let b = r0 + step * (i + 1) as f64;
        Some((a.min(b), a.max(b)))
    }

    pub fn is_linear(&self) -> bool {
        matches!(self.kind, ScaleKind::Linear { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegendEntry {
    pub value: String,
    pub color: Rgb,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Legend {
    Categorical { entries: Vec<LegendEntry> },
    Ramp { min: f64, max: f64, low: Rgb, high: Rgb },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub enum BindingChange {
    #[default]
    None,
    /// Members leave every local binding (user-placed points).
    Detach { members: BTreeSet<u32> },
    Global {
        direction: Direction,
        scale: Scale,
        members: BTreeSet<u32>,
    },
    Local {
        members: BTreeSet<u32>,
        arrangement: Arrangement,
        region: Rect,
    },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LayoutResult {
    pub positions: BTreeMap<u32, Point>,
    pub updated_pins: BTreeMap<u32, bool>,
    pub scale_used: Option<Scale>,
    pub binding: BindingChange,
}

/// Grid pitch: two of the largest visible radii plus 2 px padding.
pub fn cell_size(state: &ViewState) -> f64 {
    2.0 * state.max_radius() + 2.0
}

/// Phyllotaxis offsets for `n` points with the given pitch, shifted so that
/// their centroid is exactly the origin.
pub fn spiral_offsets(n: usize, spacing: f64) -> Vec<Point> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let raw: Vec<Point> = (0..n)
        .map(|k| {
            let r = spacing * (k as f64).sqrt();
            let theta = k as f64 * golden;
            Point::new(r * theta.cos(), r * theta.sin())
        })
        .collect();
    if n == 0 {
        return raw;
    }
    let cx = raw.iter().map(|p| p.x).sum::<f64>() / n as f64;
    let cy = raw.iter().map(|p| p.y).sum::<f64>() / n as f64;
    raw.into_iter().map(|p| Point::new(p.x - cx, p.y - cy)).collect()
}

fn sorted_visible(state: &ViewState, targets: &[u32]) -> Vec<u32> {
    let mut ids: Vec<u32> = targets.iter().copied().filter(|id| state.is_visible(*id)).collect();
    ids.sort_unstable();
    ids.dedup();
    ids
}

/// Whole visible dataset as a circular cluster at the canvas center.
pub fn initial_cluster(state: &ViewState) -> LayoutResult {
    let ids = state.visible_ids();
    let canvas = state.canvas;
    let n = ids.len().max(1) as f64;
    let spacing = cell_size(state).min(0.24 * canvas.width.min(canvas.height) / n.sqrt());
    let center = canvas.center();
    let positions = ids
        .iter()
        .zip(spiral_offsets(ids.len(), spacing))
        .map(|(&id, o)| (id, canvas.clamp(Point::new(center.x + o.x, center.y + o.y))))
        .collect();
    LayoutResult {
        positions,
        updated_pins: ids.iter().map(|&id| (id, false)).collect(),
        scale_used: None,
        binding: BindingChange::None,
    }
}

fn global_range(canvas: &Canvas, direction: Direction) -> (f64, f64) {
    match direction {
        Direction::Horizontal => (AXIS_INSET * canvas.width, (1.0 - AXIS_INSET) * canvas.width),
        Direction::Vertical => ((1.0 - AXIS_INSET) * canvas.height, AXIS_INSET * canvas.height),
    }
}

fn region_range(region: &Rect, direction: Direction) -> (f64, f64) {
    match direction {
        Direction::Horizontal => (region.x0, region.x1),
        Direction::Vertical => (region.y1, region.y0),
    }
}

/// Bounding box of the targets grown to a usable minimum and kept on canvas.
fn local_region(state: &ViewState, ids: &[u32], cell: f64) -> Rect {
    let bbox = Rect::bounding(ids.iter().map(|id| state.point(*id).position)).expect("non-empty targets");
    let min_side = (4.0 * cell).max(cell * (ids.len() as f64).sqrt().ceil());
    let canvas = state.canvas;
    let fit = |lo: f64, hi: f64, limit: f64| -> (f64, f64) {
        let len = (hi - lo).max(min_side).min(limit);
        let mid = (lo + hi) / 2.0;
        let mut a = mid - len / 2.0;
        a = a.clamp(0.0, limit - len);
        (a, a + len)
    };
    let (x0, x1) = fit(bbox.x0, bbox.x1, canvas.width);
    let (y0, y1) = fit(bbox.y0, bbox.y1, canvas.height);
    Rect::new(x0, y0, x1, y1)
}

fn axis_point(direction: Direction, along: f64, across: f64) -> Point {
    match direction {
        Direction::Horizontal => Point::new(along, across),
        Direction::Vertical => Point::new(across, along),
    }
}

fn other(direction: Direction) -> Direction {
    match direction {
        Direction::Horizontal => Direction::Vertical,
        Direction::Vertical => Direction::Horizontal,
    }
}

fn coord(p: Point, direction: Direction) -> f64 {
    match direction {
        Direction::Horizontal => p.x,
        Direction::Vertical => p.y,
    }
}

/// Band labels for a categorical value, with missing values in their own band.
fn category_of(v: &Value) -> String {
    match v {
        Value::Text(s) => s.clone(),
        Value::Number(n) => format_number(*n),
        Value::Missing => MISSING_BAND.to_string(),
    }
}

/// Positions `targets` along `direction` by `attribute`. When `global` the
/// scale becomes the global binding and pinned targets are left in place;
/// otherwise a local binding is created over the targets' bounding region.
pub fn assign_axis(
    state: &ViewState,
    dataset: &Dataset,
    direction: Direction,
    attribute: &str,
    targets: &[u32],
    global: bool,
) -> Result<LayoutResult, LayoutError> {
    let col = dataset
        .attribute_index(attribute)
        .ok_or_else(|| LayoutError::UnknownAttribute(attribute.to_string()))?;
    let schema = &dataset.schema()[col];
    let targets = sorted_visible(state, targets);
    if targets.is_empty() {
        return Err(LayoutError::EmptyTargets);
    }
    if targets.iter().all(|id| dataset.value(*id, col).is_missing()) {
        return Err(LayoutError::AllMissing(schema.name.clone()));
    }
    let movers: Vec<u32> = if global {
        targets.iter().copied().filter(|id| !state.point(*id).pinned).collect()
    } else {
        targets.clone()
    };
    let cell = cell_size(state);
    let canvas = state.canvas;
    let (range, across_span) = if global {
        let across = global_range(&canvas, other(direction));
        (global_range(&canvas, direction), across)
    } else {
        let region = local_region(state, &targets, cell);
        (
            region_range(&region, direction),
            region_range(&region, other(direction)),
        )
    };

    let scale = match schema.kind {
        AttributeKind::Quantitative => {
            let (lo, hi) = targets
                .iter()
                .filter_map(|id| dataset.number(*id, col))
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
            Scale::linear(&schema.name, (lo, hi), range)
        }
        AttributeKind::Categorical => {
            let present: BTreeSet<String> = targets.iter().map(|id| category_of(dataset.value(*id, col))).collect();
            let mut categories: Vec<String> = schema
                .categories()
                .iter()
                .filter(|c| present.contains(*c))
                .cloned()
                .collect();
            if present.contains(MISSING_BAND) && !categories.iter().any(|c| c == MISSING_BAND) {
                categories.push(MISSING_BAND.to_string());
            }
            Scale::band(&schema.name, categories, range)
        }
    };

    // Whether a mover's cross-axis coordinate is already governed elsewhere.
    let across_dir = other(direction);
    let across_governed = |id: u32| -> bool {
        if global {
            state
                .local_for(id, across_dir)
                .is_some_and(|l| !matches!(l.arrangement, Arrangement::Order { .. }))
                || state.global.axis(across_dir).is_some()
                    && !state.point(id).pinned
                    && state.local_for(id, across_dir).is_none()
                    && !in_conflicting_local(state, id, direction)
        } else {
            true
        }
    };

    let mut positions = BTreeMap::new();
    match &scale.kind {
        ScaleKind::Linear { .. } => {
            let sign = if range.1 >= range.0 { 1.0 } else { -1.0 };
            let along = |id: u32| match dataset.number(id, col) {
                Some(v) => scale.map(v),
                None => range.0 - sign * cell,
            };
            let free: Vec<u32> = movers.iter().copied().filter(|id| !across_governed(*id)).collect();
            for &id in &movers {
                if free.contains(&id) {
                    continue;
                }
                let across = coord(state.point(id).position, across_dir);
                positions.insert(id, axis_point(direction, along(id), across));
            }
            // fresh single-axis charts: stack coincident points into rows
            let across_mid = match (global, state.global.axis(across_dir)) {
                (true, Some(s)) => (s.range.0 + s.range.1) / 2.0,
                _ => (across_span.0 + across_span.1) / 2.0,
            };
            let across_limit = match across_dir {
                Direction::Horizontal => canvas.width,
                Direction::Vertical => canvas.height,
            };
            let base = range.0.min(range.1);
            let mut buckets: BTreeMap<i64, usize> = BTreeMap::new();
            for &id in &free {
                let a = along(id);
                let bucket = ((a - base) / cell).floor() as i64;
                let k = buckets.entry(bucket).or_insert(0);
                let step = (*k as f64 / 2.0).ceil() * if *k % 2 == 1 { 1.0 } else { -1.0 };
                *k += 1;
                let across = (across_mid + step * cell).clamp(0.0, across_limit);
                positions.insert(id, axis_point(direction, a, across));
            }
        }
        ScaleKind::Band { categories } => {
            let mut by_band: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
            for &id in &movers {
                let cat = category_of(dataset.value(id, col));
                let i = categories.iter().position(|c| *c == cat).expect("category present");
                by_band.entry(i).or_default().push(id);
            }
            // across span runs from the "bottom" of the band outward
            let (start, end) = match across_dir {
                Direction::Vertical => (across_span.0.max(across_span.1), across_span.0.min(across_span.1)),
                Direction::Horizontal => (across_span.0.min(across_span.1), across_span.0.max(across_span.1)),
            };
            for (i, ids) in by_band {
                let (lo, hi) = scale.band_of(&categories[i]).expect("band exists");
                let (packed, spread): (Vec<u32>, Vec<u32>) = ids.iter().partition(|id| !across_governed(**id));
                positions.extend(pack_band(&packed, lo, hi, start, end, direction, cell));
                for (j, &id) in spread.iter().enumerate() {
                    let along = lo + (j as f64 + 0.5) * (hi - lo) / spread.len() as f64;
                    let across = coord(state.point(id).position, across_dir);
                    positions.insert(id, axis_point(direction, along, across));
                }
            }
        }
    }

    for p in positions.values_mut() {
        *p = canvas.clamp(*p);
    }
    let members: BTreeSet<u32> = movers.iter().copied().collect();
    let binding = if global {
        BindingChange::Global {
            direction,
            scale: scale.clone(),
            members,
        }
    } else {
        BindingChange::Local {
            members,
            arrangement: Arrangement::Axis {
                direction,
                scale: scale.clone(),
            },
            region: local_region(state, &targets, cell),
        }
    };
    Ok(LayoutResult {
        updated_pins: movers.iter().map(|&id| (id, false)).collect(),
        positions,
        scale_used: Some(scale),
        binding,
    })
}

fn in_conflicting_local(state: &ViewState, id: u32, direction: Direction) -> bool {
    state.local_for(id, direction).is_some()
}

/// Grid-packs a band's points, starting at `start` on the cross axis and
/// stacking toward `end`; rows compress if they would overflow.
fn pack_band(
    ids: &[u32],
    lo: f64,
    hi: f64,
    start: f64,
    end: f64,
    direction: Direction,
    cell: f64,
) -> Vec<(u32, Point)> {
    if ids.is_empty() {
        return Vec::new();
    }
    let width = hi - lo;
    let cols = ((width / cell).floor() as usize).max(1);
    let col_w = width / cols as f64;
    let rows = ids.len().div_ceil(cols);
    let dir = if end >= start { 1.0 } else { -1.0 };
    let avail = (end - start).abs() - cell;
    let step = if rows > 1 {
        cell.min(avail.max(0.0) / (rows - 1) as f64)
    } else {
        cell
    };
    ids.iter()
        .enumerate()
        .map(|(j, &id)| {
            let along = lo + ((j % cols) as f64 + 0.5) * col_w;
            let across = start + dir * (cell / 2.0 + (j / cols) as f64 * step);
            (id, axis_point(direction, along, across))
        })
        .collect()
}

/// Sort key: numbers ascending, text lexicographic, missing last.
fn order_key(dataset: &Dataset, col: usize, id: u32) -> (u8, f64, String, u32) {
    match dataset.value(id, col) {
        Value::Number(n) => (0, *n, String::new(), id),
        Value::Text(s) => (0, 0.0, s.clone(), id),
        Value::Missing => (1, 0.0, String::new(), id),
    }
}

/// Targets in ascending attribute order as a serpentine grid anchored at the
/// top-left of their current bounding box.
pub fn order_by(
    state: &ViewState,
    dataset: &Dataset,
    targets: &[u32],
    attribute: &str,
) -> Result<LayoutResult, LayoutError> {
    let col = dataset
        .attribute_index(attribute)
        .ok_or_else(|| LayoutError::UnknownAttribute(attribute.to_string()))?;
    let mut ids = sorted_visible(state, targets);
    if ids.is_empty() {
        return Err(LayoutError::EmptyTargets);
    }
    ids.sort_by(|a, b| {
        let (ka, kb) = (order_key(dataset, col, *a), order_key(dataset, col, *b));
        ka.0.cmp(&kb.0)
            .then(ka.1.total_cmp(&kb.1))
            .then(ka.2.cmp(&kb.2))
            .then(ka.3.cmp(&kb.3))
    });
    let cell = cell_size(state);
    let n = ids.len();
    let bbox = Rect::bounding(ids.iter().map(|id| state.point(*id).position)).expect("non-empty");
    let fit_cols = ((bbox.width() + cell) / cell + 1e-9).floor() as usize;
    let min_cols = (n as f64).sqrt().ceil() as usize;
    let cols = fit_cols.max(min_cols).min(n).max(1);
    let rows = n.div_ceil(cols);

    let canvas = state.canvas;
    let half = cell / 2.0;
    let span_x = (cols - 1) as f64 * cell;
    let span_y = (rows - 1) as f64 * cell;
    let x0 = bbox.x0.min(canvas.width - half - span_x).max(half);
    let y0 = bbox.y0.min(canvas.height - half - span_y).max(half);

    let positions: BTreeMap<u32, Point> = ids
        .iter()
        .enumerate()
        .map(|(i, &id)| {
            let row = i / cols;
            let mut c = i % cols;
            if row % 2 == 1 {
                c = cols - 1 - c;
            }
            let p = Point::new(x0 + c as f64 * cell, y0 + row as f64 * cell);
            (id, canvas.clamp(p))
        })
        .collect();
    let region = Rect::new(x0 - half, y0 - half, x0 + span_x + half, y0 + span_y + half);
    Ok(LayoutResult {
        updated_pins: ids.iter().map(|&id| (id, false)).collect(),
        positions,
        scale_used: None,
        binding: BindingChange::Local {
            members: ids.iter().copied().collect(),
            arrangement: Arrangement::Order {
                attribute: dataset.schema()[col].name.clone(),
            },
            region,
        },
    })
}

/// Re-clusters targets around `destination` and pins them.
pub fn move_points(state: &ViewState, targets: &[u32], destination: Point) -> Result<LayoutResult, LayoutError> {
    if !state.canvas.contains(destination) {
        return Err(LayoutError::OutsideCanvas(destination.x, destination.y));
    }
    let ids = sorted_visible(state, targets);
    if ids.is_empty() {
        return Err(LayoutError::EmptyTargets);
    }
    let cell = cell_size(state);
    let positions = ids
        .iter()
        .zip(spiral_offsets(ids.len(), cell))
        .map(|(&id, o)| {
            (
                id,
                state.canvas.clamp(Point::new(destination.x + o.x, destination.y + o.y)),
            )
        })
        .collect();
    Ok(LayoutResult {
        positions,
        updated_pins: ids.iter().map(|&id| (id, true)).collect(),
        scale_used: None,
        binding: BindingChange::Detach {
            members: ids.into_iter().collect(),
        },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColorOutcome {
    pub fills: BTreeMap<u32, Rgb>,
    pub binding: ColorBinding,
}

/// Color mapping over `targets`, or over every point when `targets` is `None`.
pub fn color_by(
    state: &ViewState,
    dataset: &Dataset,
    attribute: &str,
    targets: Option<&[u32]>,
) -> Result<ColorOutcome, LayoutError> {
    let col = dataset
        .attribute_index(attribute)
        .ok_or_else(|| LayoutError::UnknownAttribute(attribute.to_string()))?;
    let schema = &dataset.schema()[col];
    let ids: Vec<u32> = match targets {
        Some(t) => sorted_visible(state, t),
        None => state.points.iter().map(|p| p.row_id).collect(),
    };
    if ids.is_empty() {
        return Err(LayoutError::EmptyTargets);
    }
    let mut fills = BTreeMap::new();
    let legend = match schema.kind {
        AttributeKind::Categorical => {
            let cats = schema.categories();
            for &id in &ids {
                let fill = match dataset.value(id, col) {
                    Value::Text(s) => palette_color(cats.iter().position(|c| c == s).unwrap_or(0)),
                    _ => MISSING_FILL,
                };
                fills.insert(id, fill);
            }
            let used: BTreeSet<&str> = ids.iter().filter_map(|id| dataset.value(*id, col).as_text()).collect();
            Legend::Categorical {
                entries: cats
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| used.contains(c.as_str()))
                    .map(|(i, c)| LegendEntry {
                        value: c.clone(),
                        color: palette_color(i),
                    })
                    .collect(),
            }
        }
        AttributeKind::Quantitative => {
            let (lo, hi) =
                numeric_domain(dataset, col, &ids).ok_or_else(|| LayoutError::AllMissing(schema.name.clone()))?;
            for &id in &ids {
                let fill = match dataset.number(id, col) {
                    Some(v) if hi > lo => ramp((v - lo) / (hi - lo)),
                    Some(_) => ramp(0.5),
                    None => MISSING_FILL,
                };
                fills.insert(id, fill);
            }
            Legend::Ramp {
                min: lo,
                max: hi,
                low: RAMP_LOW,
                high: RAMP_HIGH,
            }
        }
    };
    Ok(ColorOutcome {
        fills,
        binding: ColorBinding {
            attribute: schema.name.clone(),
            legend,
        },
    })
}

fn numeric_domain(dataset: &Dataset, col: usize, ids: &[u32]) -> Option<(f64, f64)> {
    ids.iter()
        .filter_map(|id| dataset.number(*id, col))
        .fold(None, |acc, v| match acc {
            None => Some((v, v)),
            Some((lo, hi)) => Some((f64::min(lo, v), f64::max(hi, v))),
        })
}

/// Square-root radius scale: `r_min + (r_max - r_min) * sqrt(t)` with `t`
/// the value's position in the domain; a degenerate domain gives the middle radius.
pub fn sqrt_radius(v: f64, domain: (f64, f64), r_min: f64, r_max: f64) -> f64 {
    let (lo, hi) = domain;
    if hi <= lo {
        return (r_min + r_max) / 2.0;
    }
    let t = ((v - lo) / (hi - lo)).clamp(0.0, 1.0);
    r_min + (r_max - r_min) * t.sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SizeOutcome {
    pub radii: BTreeMap<u32, f64>,
    pub binding: SizeBinding,
}

pub fn size_by(
    state: &ViewState,
    dataset: &Dataset,
    attribute: &str,
    targets: Option<&[u32]>,
) -> Result<SizeOutcome, LayoutError> {
    let col = dataset
        .attribute_index(attribute)
        .ok_or_else(|| LayoutError::UnknownAttribute(attribute.to_string()))?;
    let schema = &dataset.schema()[col];
    if schema.kind != AttributeKind::Quantitative {
        return Err(LayoutError::SizeRequiresQuantitative);
    }
    let ids: Vec<u32> = match targets {
        Some(t) => sorted_visible(state, t),
        None => state.points.iter().map(|p| p.row_id).collect(),
    };
    if ids.is_empty() {
        return Err(LayoutError::EmptyTargets);
    }
    let domain = numeric_domain(dataset, col, &ids);
    let radii = ids
        .iter()
        .map(|&id| {
            let r = match (dataset.number(id, col), domain) {
                (Some(v), Some(d)) => sqrt_radius(v, d, R_MIN, R_MAX),
                _ => crate::view_state::DEFAULT_RADIUS,
            };
            (id, r)
        })
        .collect();
    Ok(SizeOutcome {
        radii,
        binding: SizeBinding {
            attribute: schema.name.clone(),
            domain,
            r_min: R_MIN,
            r_max: R_MAX,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HistogramSpec {
    Quantitative {
        attribute: String,
        /// `HISTOGRAM_BINS + 1` edges; empty when every value is missing.
        edges: Vec<f64>,
        counts: Vec<usize>,
    },
    Categorical {
        attribute: String,
        counts: Vec<(String, usize)>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub histograms: Vec<HistogramSpec>,
}

/// Equal-width histograms (quantitative) and value counts (categorical).
pub fn summarize(state: &ViewState, dataset: &Dataset, targets: &[u32]) -> Summary {
    let ids = sorted_visible(state, targets);
    let histograms = dataset
        .schema()
        .iter()
        .enumerate()
        .map(|(col, attr)| match attr.kind {
            AttributeKind::Quantitative => {
                let values: Vec<f64> = ids.iter().filter_map(|id| dataset.number(*id, col)).collect();
                let mut counts = vec![0; HISTOGRAM_BINS];
                let edges = match numeric_domain(dataset, col, &ids) {
                    None => Vec::new(),
                    Some((lo, hi)) => {
                        let width = (hi - lo) / HISTOGRAM_BINS as f64;
                        for v in &values {
                            let bin = if hi > lo {
                                (((v - lo) / width).floor() as usize).min(HISTOGRAM_BINS - 1)
                            } else {
                                0
                            };
                            counts[bin] += 1;
                        }
                        (0..=HISTOGRAM_BINS).map(|i| lo + width * i as f64).collect()
                    }
                };
                HistogramSpec::Quantitative {
                    attribute: attr.name.clone(),
                    edges,
                    counts,
                }
            }
            AttributeKind::Categorical => {
                let mut counts: Vec<(String, usize)> = attr.categories().iter().map(|c| (c.clone(), 0)).collect();
                for id in &ids {
                    if let Some(s) = dataset.value(*id, col).as_text() {
                        if let Some(slot) = counts.iter_mut().find(|(c, _)| c == s) {
                            slot.1 += 1;
                        }
                    }
                }
                counts.retain(|(_, n)| *n > 0);
                HistogramSpec::Categorical {
                    attribute: attr.name.clone(),
                    counts,
                }
            }
        })
        .collect();
    Summary {
        count: ids.len(),
        histograms,
    }
}
