//! Per-point visual state, bindings, selection, tags, annotations and the
//! filter bin of a flexible unit visualization.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::color::{NamedColor, Rgb, DEFAULT_FILL};
use crate::dataset::{Dataset, Value, VisualFlag};
use crate::geometry::{point_in_polygon, polygon_area, Canvas, Direction, Point, Rect};
use crate::layout::{self, LayoutResult, Legend, Scale};

pub const SNAPSHOT_VERSION: u32 = 1;
pub const DEFAULT_RADIUS: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", content = "value", rename_all = "snake_case")]
pub enum Paint {
    /// Derived from the global color mapping (or the default fill).
    Bound(Rgb),
    Explicit(Rgb),
}

impl Paint {
    pub fn rgb(&self) -> Rgb {
        match *self {
            Paint::Bound(c) | Paint::Explicit(c) => c,
        }
    }

    pub fn is_explicit(&self) -> bool {
        matches!(self, Paint::Explicit(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", content = "value", rename_all = "snake_case")]
pub enum Radius {
    Bound(f64),
    Explicit(f64),
}

impl Radius {
    pub fn px(&self) -> f64 {
        match *self {
            Radius::Bound(r) | Radius::Explicit(r) => r,
        }
    }

    pub fn is_explicit(&self) -> bool {
        matches!(self, Radius::Explicit(_))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointVisual {
    pub row_id: u32,
    pub position: Point,
    pub pinned: bool,
    pub color: Paint,
    pub size: Radius,
    pub label_visible: bool,
    pub selected: bool,
    pub tags: BTreeSet<String>,
    pub filtered_out: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColorBinding {
    pub attribute: String,
    pub legend: Legend,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeBinding {
    pub attribute: String,
    pub domain: Option<(f64, f64)>,
    pub r_min: f64,
    pub r_max: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GlobalBindings {
    pub x_axis: Option<Scale>,
    pub y_axis: Option<Scale>,
    pub color_by: Option<ColorBinding>,
    pub size_by: Option<SizeBinding>,
}

impl GlobalBindings {
    pub fn axis(&self, direction: Direction) -> Option<&Scale> {
        match direction {
            Direction::Horizontal => self.x_axis.as_ref(),
            Direction::Vertical => self.y_axis.as_ref(),
        }
    }

    pub fn axis_mut(&mut self, direction: Direction) -> &mut Option<Scale> {
        match direction {
            Direction::Horizontal => &mut self.x_axis,
            Direction::Vertical => &mut self.y_axis,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Arrangement {
    Axis {
        direction: Direction,
        scale: Scale,
    },
    /// Serpentine grid ordered by an attribute; governs both dimensions.
    Order {
        attribute: String,
    },
}

impl Arrangement {
    pub fn governs(&self, direction: Direction) -> bool {
        match self {
            Arrangement::Axis { direction: d, .. } => *d == direction,
            Arrangement::Order { .. } => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalBinding {
    pub id: u32,
    pub member_ids: BTreeSet<u32>,
    pub arrangement: Arrangement,
    pub region: Rect,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stroke {
    pub width: f64,
    pub color: Rgb,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Annotation {
    InkStroke {
        points: Vec<Point>,
        style: Stroke,
    },
    TextLabel {
        anchor: Point,
        content: String,
        style: Stroke,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparator {
    Gt,
    Ge,
    Lt,
    Le,
    Eq,
}

impl Comparator {
    pub fn holds(self, lhs: f64, rhs: f64) -> bool {
        match self {
            Comparator::Gt => lhs > rhs,
            Comparator::Ge => lhs >= rhs,
            Comparator::Lt => lhs < rhs,
            Comparator::Le => lhs <= rhs,
            Comparator::Eq => lhs == rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Comparator::Gt => ">",
            Comparator::Ge => ">=",
            Comparator::Lt => "<",
            Comparator::Le => "<=",
            Comparator::Eq => "=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "predicate", rename_all = "snake_case")]
pub enum Predicate {
    ValueIn {
        attribute: String,
        values: Vec<String>,
    },
    Compare {
        attribute: String,
        comparator: Comparator,
        value: f64,
    },
    ColorIs {
        colors: Vec<NamedColor>,
    },
    Flag {
        flag: VisualFlag,
    },
    Not {
        inner: Box<Predicate>,
    },
    And {
        all: Vec<Predicate>,
    },
}

impl Predicate {
    pub fn and(mut parts: Vec<Predicate>) -> Predicate {
        if parts.len() == 1 {
            parts.pop().expect("one element")
        } else {
            Predicate::And { all: parts }
        }
    }

    pub fn negate(self) -> Predicate {
        match self {
            Predicate::Not { inner } => *inner,
            p => Predicate::Not { inner: Box::new(p) },
        }
    }

    /// Three-valued: `None` when a referenced value is missing. Missing never matches.
    fn eval(&self, dataset: &Dataset, p: &PointVisual) -> Option<bool> {
        match self {
            Predicate::ValueIn { attribute, values } => match dataset.value_by_name(p.row_id, attribute)? {
                Value::Text(s) => Some(values.iter().any(|v| v.eq_ignore_ascii_case(s))),
                Value::Number(n) => Some(values.iter().any(|v| v.parse::<f64>().is_ok_and(|x| x == *n))),
                Value::Missing => None,
            },
            Predicate::Compare {
                attribute,
                comparator,
                value,
            } => dataset
                .value_by_name(p.row_id, attribute)?
                .as_number()
                .map(|n| comparator.holds(n, *value)),
            Predicate::ColorIs { colors } => Some(colors.contains(&p.color.rgb().nearest_named())),
            Predicate::Flag { flag } => Some(match flag {
                VisualFlag::Pinned => p.pinned,
                VisualFlag::Labeled => p.label_visible,
                VisualFlag::Selected => p.selected,
            }),
            Predicate::Not { inner } => inner.eval(dataset, p).map(|b| !b),
            Predicate::And { all } => {
                let mut unknown = false;
                for part in all {
                    match part.eval(dataset, p) {
                        Some(false) => return Some(false),
                        None => unknown = true,
                        Some(true) => {}
                    }
                }
                if unknown {
                    None
                } else {
                    Some(true)
                }
            }
        }
    }

    pub fn matches(&self, dataset: &Dataset, p: &PointVisual) -> bool {
        self.eval(dataset, p) == Some(true)
    }

    pub fn describe(&self) -> String {
        match self {
            Predicate::ValueIn { attribute, values } => {
                if values.len() == 1 {
                    format!("{attribute}={}", values[0])
                } else {
                    format!("{attribute} in {{{}}}", values.join(", "))
                }
            }
            Predicate::Compare {
                attribute,
                comparator,
                value,
            } => format!(
                "{attribute}{}{}",
                comparator.symbol(),
                crate::text::format_number(*value)
            ),
            Predicate::ColorIs { colors } => {
                let names: Vec<_> = colors.iter().map(|c| c.name()).collect();
                format!("{} points", names.join("/"))
            }
            Predicate::Flag { flag } => format!("{flag:?} points").to_lowercase(),
            Predicate::Not { inner } => format!("not {}", inner.describe()),
            Predicate::And { all } => all.iter().map(Predicate::describe).collect::<Vec<_>>().join(" and "),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "target", rename_all = "snake_case")]
pub enum TargetSpec {
    AllVisible,
    /// The active selection at resolution time (deictic "these").
    Selection,
    Ids {
        ids: Vec<u32>,
    },
    Tag {
        tag: String,
    },
    Where {
        predicate: Predicate,
    },
}

impl TargetSpec {
    pub fn describe(&self) -> String {
        match self {
            TargetSpec::AllVisible => "all points".into(),
            TargetSpec::Selection => "the selection".into(),
            TargetSpec::Ids { ids } => format!("{} selected points", ids.len()),
            TargetSpec::Tag { tag } => format!("points tagged '{tag}'"),
            TargetSpec::Where { predicate } => predicate.describe(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Resolved {
    pub ids: Vec<u32>,
    pub warning: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterMode {
    Remove,
    KeepOnly,
}

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("malformed snapshot: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error("unsupported snapshot version {0}")]
    Version(u32),
    #[error("snapshot violates invariant: {0}")]
    Invariant(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViewState {
    pub canvas: Canvas,
    pub points: Vec<PointVisual>,
    pub global: GlobalBindings,
    pub locals: Vec<LocalBinding>,
    pub annotations: Vec<Annotation>,
    pub selection: Vec<u32>,
    pub bin: BTreeSet<u32>,
    pub next_local_id: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub version: u32,
    pub state: ViewState,
}

impl Snapshot {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("snapshot serializes")
    }
}

impl ViewState {
    /// All rows visible, default paint, laid out as the initial cluster.
    pub fn new(dataset: &Dataset, canvas: Canvas) -> Self {
        let points = dataset
            .row_ids()
            .map(|row_id| PointVisual {
                row_id,
                position: canvas.center(),
                pinned: false,
                color: Paint::Bound(DEFAULT_FILL),
                size: Radius::Bound(DEFAULT_RADIUS),
                label_visible: false,
                selected: false,
                tags: BTreeSet::new(),
                filtered_out: false,
            })
            .collect();
        let mut state = Self {
            canvas,
            points,
            global: GlobalBindings::default(),
            locals: Vec::new(),
            annotations: Vec::new(),
            selection: Vec::new(),
            bin: BTreeSet::new(),
            next_local_id: 0,
        };
        if !state.points.is_empty() {
            let result = layout::initial_cluster(&state);
            state.apply_layout(result);
        }
        state
    }

    pub fn point(&self, row_id: u32) -> &PointVisual {
        &self.points[row_id as usize]
    }

    pub fn point_mut(&mut self, row_id: u32) -> &mut PointVisual {
        &mut self.points[row_id as usize]
    }

    pub fn is_visible(&self, row_id: u32) -> bool {
        self.points.get(row_id as usize).is_some_and(|p| !p.filtered_out)
    }

    pub fn visible_ids(&self) -> Vec<u32> {
        self.points
            .iter()
            .filter(|p| !p.filtered_out)
            .map(|p| p.row_id)
            .collect()
    }

    pub fn visible(&self) -> impl Iterator<Item = &PointVisual> {
        self.points.iter().filter(|p| !p.filtered_out)
    }

    /// Largest radius among visible points; drives grid cell size.
    pub fn max_radius(&self) -> f64 {
        self.visible().map(|p| p.size.px()).fold(DEFAULT_RADIUS, f64::max)
    }

    pub fn set_selection(&mut self, ids: impl IntoIterator<Item = u32>) {
        let mut seen = BTreeSet::new();
        let ids: Vec<u32> = ids
            .into_iter()
            .filter(|id| self.is_visible(*id) && seen.insert(*id))
            .collect();
        for p in &mut self.points {
            p.selected = false;
        }
        for &id in &ids {
            self.point_mut(id).selected = true;
        }
        self.selection = ids;
    }

    pub fn add_to_selection(&mut self, id: u32) {
        if self.is_visible(id) && !self.selection.contains(&id) {
            self.selection.push(id);
            self.point_mut(id).selected = true;
        }
    }

    pub fn clear_selection(&mut self) {
        self.set_selection(std::iter::empty());
    }

    /// Replaces the selection with visible points inside the polygon.
    pub fn select_by_lasso(&mut self, polygon: &[Point]) -> Vec<u32> {
        let hits: Vec<u32> = if polygon.len() < 3 || polygon_area(polygon) == 0.0 {
            Vec::new()
        } else {
            self.visible()
                .filter(|p| point_in_polygon(p.position, polygon))
                .map(|p| p.row_id)
                .collect()
        };
        self.set_selection(hits.iter().copied());
        hits
    }

    pub fn hit_test(&self, at: Point, slack: f64) -> Option<u32> {
        self.visible()
            .filter(|p| p.position.distance(at) <= p.size.px() + slack)
            .min_by(|a, b| {
                a.position
                    .distance(at)
                    .total_cmp(&b.position.distance(at))
                    .then(a.row_id.cmp(&b.row_id))
            })
            .map(|p| p.row_id)
    }

    pub fn resolve_targets(&self, spec: &TargetSpec, dataset: &Dataset) -> Resolved {
        self.resolve_among(spec, dataset, false)
    }

    /// Same as `resolve_targets` but over the filter bin.
    pub fn resolve_in_bin(&self, spec: &TargetSpec, dataset: &Dataset) -> Resolved {
        self.resolve_among(spec, dataset, true)
    }

    fn resolve_among(&self, spec: &TargetSpec, dataset: &Dataset, binned: bool) -> Resolved {
        let pool = self.points.iter().filter(|p| p.filtered_out == binned);
        let mut warning = None;
        let mut ids: Vec<u32> = match spec {
            TargetSpec::AllVisible => pool.map(|p| p.row_id).collect(),
            TargetSpec::Selection => {
                let sel: BTreeSet<u32> = self.selection.iter().copied().collect();
                pool.filter(|p| sel.contains(&p.row_id)).map(|p| p.row_id).collect()
            }
            TargetSpec::Ids { ids } => {
                let want: BTreeSet<u32> = ids.iter().copied().collect();
                pool.filter(|p| want.contains(&p.row_id)).map(|p| p.row_id).collect()
            }
            TargetSpec::Tag { tag } => {
                if !self.points.iter().any(|p| p.tags.contains(tag)) {
                    warning = Some(format!("unknown tag '{tag}'"));
                }
                pool.filter(|p| p.tags.contains(tag)).map(|p| p.row_id).collect()
            }
            TargetSpec::Where { predicate } => pool
                .filter(|p| predicate.matches(dataset, p))
                .map(|p| p.row_id)
                .collect(),
        };
        ids.sort_unstable();
        Resolved { ids, warning }
    }

    /// Moves targets (or their complement) to the bin and prunes selection
    /// and local bindings. Returns the ids newly binned.
    pub fn apply_filter(&mut self, targets: &[u32], mode: FilterMode) -> Vec<u32> {
        let target_set: BTreeSet<u32> = targets.iter().copied().filter(|id| self.is_visible(*id)).collect();
        let removed: Vec<u32> = match mode {
            FilterMode::Remove => target_set.into_iter().collect(),
            FilterMode::KeepOnly => self
                .visible_ids()
                .into_iter()
                .filter(|id| !target_set.contains(id))
                .collect(),
        };
        for &id in &removed {
            let p = self.point_mut(id);
            p.filtered_out = true;
            p.selected = false;
            self.bin.insert(id);
        }
        let removed_set: BTreeSet<u32> = removed.iter().copied().collect();
        self.selection.retain(|id| !removed_set.contains(id));
        for local in &mut self.locals {
            local.member_ids.retain(|id| !removed_set.contains(id));
        }
        self.locals.retain(|l| !l.member_ids.is_empty());
        removed
    }

    /// Returns binned points to the canvas. Returns the ids restored.
    pub fn restore_from_bin(&mut self, ids: &[u32]) -> Vec<u32> {
        let mut restored = Vec::new();
        for &id in ids {
            if self.bin.remove(&id) {
                self.point_mut(id).filtered_out = false;
                restored.push(id);
            }
        }
        restored
    }

    pub fn tag_points(&mut self, targets: &[u32], tag: &str) {
        for &id in targets {
            if self.is_visible(id) {
                self.point_mut(id).tags.insert(tag.to_string());
            }
        }
    }

    pub fn resolve_tag(&self, tag: &str) -> Resolved {
        let ids = self
            .visible()
            .filter(|p| p.tags.contains(tag))
            .map(|p| p.row_id)
            .collect();
        let known = self.points.iter().any(|p| p.tags.contains(tag));
        Resolved {
            ids,
            warning: (!known).then(|| format!("unknown tag '{tag}'")),
        }
    }

    pub fn tags(&self) -> BTreeSet<&str> {
        self.points
            .iter()
            .flat_map(|p| p.tags.iter().map(String::as_str))
            .collect()
    }

    /// Local binding governing `row_id` on `direction`, if any.
    pub fn local_for(&self, row_id: u32, direction: Direction) -> Option<&LocalBinding> {
        self.locals
            .iter()
            .find(|l| l.member_ids.contains(&row_id) && l.arrangement.governs(direction))
    }

    /// The axis scale a point's position follows on `direction`, if any.
    pub fn governing_scale(&self, row_id: u32, direction: Direction) -> Option<&Scale> {
        let p = self.point(row_id);
        if p.pinned || p.filtered_out {
            return None;
        }
        match self.local_for(row_id, direction) {
            Some(LocalBinding {
                arrangement: Arrangement::Axis { scale, .. },
                ..
            }) => Some(scale),
            Some(_) => None,
            None => self.global.axis(direction),
        }
    }

    /// Drops `ids` from every local binding that governs `direction`
    /// (or any local binding when `direction` is `None`).
    pub fn detach_from_locals(&mut self, ids: &BTreeSet<u32>, direction: Option<Direction>) {
        for local in &mut self.locals {
            let conflicts = direction.is_none_or(|d| local.arrangement.governs(d));
            if conflicts {
                local.member_ids.retain(|id| !ids.contains(id));
            }
        }
        self.locals.retain(|l| !l.member_ids.is_empty());
    }

    pub fn apply_layout(&mut self, result: LayoutResult) {
        let LayoutResult {
            positions,
            updated_pins,
            binding,
            ..
        } = result;
        for (id, pos) in positions {
            self.point_mut(id).position = pos;
        }
        for (id, pinned) in updated_pins {
            self.point_mut(id).pinned = pinned;
        }
        match binding {
            layout::BindingChange::None => {}
            layout::BindingChange::Detach { members } => {
                self.detach_from_locals(&members, None);
            }
            layout::BindingChange::Global {
                direction,
                scale,
                members,
            } => {
                self.detach_from_locals(&members, Some(direction));
                *self.global.axis_mut(direction) = Some(scale);
            }
            layout::BindingChange::Local {
                members,
                arrangement,
                region,
            } => {
                let conflict = match &arrangement {
                    Arrangement::Axis { direction, .. } => Some(*direction),
                    Arrangement::Order { .. } => None,
                };
                self.detach_from_locals(&members, conflict);
                let id = self.next_local_id;
                self.next_local_id += 1;
                self.locals.push(LocalBinding {
                    id,
                    member_ids: members,
                    arrangement,
                    region,
                });
            }
        }
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            version: SNAPSHOT_VERSION,
            state: self.clone(),
        }
    }

    pub fn to_snapshot_json(&self) -> String {
        self.snapshot().to_json()
    }

    pub fn restore(bytes: &[u8]) -> Result<ViewState, SnapshotError> {
        let snap: Snapshot = serde_json::from_slice(bytes)?;
        if snap.version != SNAPSHOT_VERSION {
            return Err(SnapshotError::Version(snap.version));
        }
        snap.state.check_invariants().map_err(SnapshotError::Invariant)?;
        Ok(snap.state)
    }

    pub fn check_invariants(&self) -> Result<(), String> {
        for (i, p) in self.points.iter().enumerate() {
            if p.row_id as usize != i {
                return Err(format!("point at index {i} has row_id {}", p.row_id));
            }
            if p.filtered_out != self.bin.contains(&p.row_id) {
                return Err(format!("bin disagrees with point {}", p.row_id));
            }
            if p.size.px() <= 0.0 {
                return Err(format!("point {} has non-positive radius", p.row_id));
            }
            if p.selected != self.selection.contains(&p.row_id) {
                return Err(format!("selection flag mismatch on {}", p.row_id));
            }
        }
        if self.bin.iter().any(|id| *id as usize >= self.points.len()) {
            return Err("bin references unknown row".into());
        }
        for id in &self.selection {
            if !self.is_visible(*id) {
                return Err(format!("selected point {id} is not visible"));
            }
        }
        for local in &self.locals {
            for id in &local.member_ids {
                let p = self
                    .points
                    .get(*id as usize)
                    .ok_or_else(|| format!("local {} has unknown member {id}", local.id))?;
                if p.pinned {
                    return Err(format!("pinned point {id} is governed by local {}", local.id));
                }
            }
            if local.member_ids.is_empty() {
                return Err(format!("local {} is empty", local.id));
            }
        }
        for a in &self.annotations {
            if let Annotation::InkStroke { points, .. } = a {
                if points.len() < 2 {
                    return Err("ink stroke with fewer than two points".into());
                }
            }
        }
        Ok(())
    }

    /// Per-point fills keyed by row id, for legends and diffs.
    pub fn fills(&self) -> BTreeMap<u32, Rgb> {
        self.points.iter().map(|p| (p.row_id, p.color.rgb())).collect()
    }
}
