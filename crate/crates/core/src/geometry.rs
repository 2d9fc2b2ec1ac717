use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2)).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Canvas {
    pub width: f64,
    pub height: f64,
}

impl Default for Canvas {
    fn default() -> Self {
        Self {
            width: 1200.0,
            height: 800.0,
        }
    }
}

impl Canvas {
    pub fn center(&self) -> Point {
        Point::new(self.width / 2.0, self.height / 2.0)
    }

    pub fn contains(&self, p: Point) -> bool {
        (0.0..=self.width).contains(&p.x) && (0.0..=self.height).contains(&p.y)
    }

    pub fn clamp(&self, p: Point) -> Point {
        Point::new(p.x.clamp(0.0, self.width), p.y.clamp(0.0, self.height))
    }

    pub fn bounds(&self) -> Rect {
        Rect::new(0.0, 0.0, self.width, self.height)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub const fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self { x0, y0, x1, y1 }
    }

    pub fn bounding(points: impl IntoIterator<Item = Point>) -> Option<Rect> {
        points.into_iter().fold(None, |acc, p| {
            Some(match acc {
                None => Rect::new(p.x, p.y, p.x, p.y),
                Some(r) => Rect::new(r.x0.min(p.x), r.y0.min(p.y), r.x1.max(p.x), r.y1.max(p.y)),
            })
        })
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn center(&self) -> Point {
        Point::new((self.x0 + self.x1) / 2.0, (self.y0 + self.y1) / 2.0)
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.x0 && p.x <= self.x1 && p.y >= self.y0 && p.y <= self.y1
    }

    pub fn union(&self, other: &Rect) -> Rect {
        Rect::new(
            self.x0.min(other.x0),
            self.y0.min(other.y0),
            self.x1.max(other.x1),
            self.y1.max(other.y1),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Horizontal,
    Vertical,
}

impl Direction {
    pub fn name(self) -> &'static str {
        match self {
            Direction::Horizontal => "horizontally",
            Direction::Vertical => "vertically",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionKeyword {
    TopLeft,
    Top,
    TopRight,
    Left,
    Center,
    Right,
    BottomLeft,
    Bottom,
    BottomRight,
}

impl RegionKeyword {
    pub const ALL: [RegionKeyword; 9] = [
        RegionKeyword::TopLeft,
        RegionKeyword::Top,
        RegionKeyword::TopRight,
        RegionKeyword::Left,
        RegionKeyword::Center,
        RegionKeyword::Right,
        RegionKeyword::BottomLeft,
        RegionKeyword::Bottom,
        RegionKeyword::BottomRight,
    ];

    /// Anchor fractions: corners and edges sit 12.5% in from the border.
    pub fn fractions(self) -> (f64, f64) {
        const LO: f64 = 0.125;
        const MID: f64 = 0.5;
        const HI: f64 = 0.875;
        match self {
            RegionKeyword::TopLeft => (LO, LO),
            RegionKeyword::Top => (MID, LO),
            RegionKeyword::TopRight => (HI, LO),
            RegionKeyword::Left => (LO, MID),
            RegionKeyword::Center => (MID, MID),
            RegionKeyword::Right => (HI, MID),
            RegionKeyword::BottomLeft => (LO, HI),
            RegionKeyword::Bottom => (MID, HI),
            RegionKeyword::BottomRight => (HI, HI),
        }
    }

    pub fn anchor(self, canvas: &Canvas) -> Point {
        let (fx, fy) = self.fractions();
        Point::new(fx * canvas.width, fy * canvas.height)
    }

    pub fn phrase(self) -> &'static str {
        match self {
            RegionKeyword::TopLeft => "top left corner",
            RegionKeyword::Top => "top",
            RegionKeyword::TopRight => "top right corner",
            RegionKeyword::Left => "left",
            RegionKeyword::Center => "center",
            RegionKeyword::Right => "right",
            RegionKeyword::BottomLeft => "bottom left corner",
            RegionKeyword::Bottom => "bottom",
            RegionKeyword::BottomRight => "bottom right corner",
        }
    }

    pub fn parse(keyword: &str) -> Option<RegionKeyword> {
        let k = keyword.to_lowercase().replace(['-', '_'], " ");
        let k = k.trim().trim_end_matches(" corner");
        Some(match k {
            "top left" => RegionKeyword::TopLeft,
            "top" => RegionKeyword::Top,
            "top right" => RegionKeyword::TopRight,
            "left" => RegionKeyword::Left,
            "center" | "centre" | "middle" => RegionKeyword::Center,
            "right" => RegionKeyword::Right,
            "bottom left" => RegionKeyword::BottomLeft,
            "bottom" => RegionKeyword::Bottom,
            "bottom right" => RegionKeyword::BottomRight,
            _ => return None,
        })
    }
}

/// Even-odd rule; the polygon is implicitly closed.
pub fn point_in_polygon(p: Point, polygon: &[Point]) -> bool {
    let n = polygon.len();
    if n < 3 {
        return false;
    }
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (polygon[i], polygon[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x_cross = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
            if p.x < x_cross {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

pub fn polygon_area(polygon: &[Point]) -> f64 {
    let n = polygon.len();
    if n < 3 {
        return 0.0;
    }
    let twice: f64 = (0..n)
        .map(|i| {
            let (a, b) = (polygon[i], polygon[(i + 1) % n]);
            a.x * b.y - b.x * a.y
        })
        .sum();
    twice.abs() / 2.0
}
