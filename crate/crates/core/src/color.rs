use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rgb(pub u8, pub u8, pub u8);

impl Rgb {
    pub fn from_hex(s: &str) -> Option<Rgb> {
        let h = s.strip_prefix('#')?;
        if h.len() != 6 {
            return None;
        }
        let byte = |i: usize| u8::from_str_radix(&h[i..i + 2], 16).ok();
        Some(Rgb(byte(0)?, byte(2)?, byte(4)?))
    }

    fn distance_sq(self, other: Rgb) -> u32 {
        let d = |a: u8, b: u8| (a as i32 - b as i32).pow(2) as u32;
        d(self.0, other.0) + d(self.1, other.1) + d(self.2, other.2)
    }

    pub fn lerp(self, other: Rgb, t: f64) -> Rgb {
        let mix = |a: u8, b: u8| (a as f64 + (b as f64 - a as f64) * t).round() as u8;
        Rgb(mix(self.0, other.0), mix(self.1, other.1), mix(self.2, other.2))
    }

    /// Nearest entry of the named-color table in RGB space.
    pub fn nearest_named(self) -> NamedColor {
        NamedColor::ALL
            .iter()
            .copied()
            .min_by_key(|c| self.distance_sq(c.rgb()))
            .expect("table is non-empty")
    }
}

impl fmt::Display for Rgb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{:02x}{:02x}{:02x}", self.0, self.1, self.2)
    }
}

impl Serialize for Rgb {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rgb {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Rgb::from_hex(&s).ok_or_else(|| serde::de::Error::custom(format!("bad color '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedColor {
    Blue,
    Orange,
    Green,
    Red,
    Purple,
    Brown,
    Pink,
    Gray,
    Yellow,
    Teal,
    Black,
    White,
}

impl NamedColor {
    pub const ALL: [NamedColor; 12] = [
        NamedColor::Blue,
        NamedColor::Orange,
        NamedColor::Green,
        NamedColor::Red,
        NamedColor::Purple,
        NamedColor::Brown,
        NamedColor::Pink,
        NamedColor::Gray,
        NamedColor::Yellow,
        NamedColor::Teal,
        NamedColor::Black,
        NamedColor::White,
    ];

    pub fn rgb(self) -> Rgb {
        match self {
            NamedColor::Blue => Rgb(0x1f, 0x77, 0xb4),
            NamedColor::Orange => Rgb(0xff, 0x7f, 0x0e),
            NamedColor::Green => Rgb(0x2c, 0xa0, 0x2c),
            NamedColor::Red => Rgb(0xd6, 0x27, 0x28),
            NamedColor::Purple => Rgb(0x94, 0x67, 0xbd),
            NamedColor::Brown => Rgb(0x8c, 0x56, 0x4b),
            NamedColor::Pink => Rgb(0xe3, 0x77, 0xc2),
            NamedColor::Gray => Rgb(0x7f, 0x7f, 0x7f),
            NamedColor::Yellow => Rgb(0xe6, 0xc2, 0x29),
            NamedColor::Teal => Rgb(0x17, 0xbe, 0xcf),
            NamedColor::Black => Rgb(0x22, 0x22, 0x22),
            NamedColor::White => Rgb(0xf5, 0xf5, 0xf5),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NamedColor::Blue => "blue",
            NamedColor::Orange => "orange",
            NamedColor::Green => "green",
            NamedColor::Red => "red",
            NamedColor::Purple => "purple",
            NamedColor::Brown => "brown",
            NamedColor::Pink => "pink",
            NamedColor::Gray => "gray",
            NamedColor::Yellow => "yellow",
            NamedColor::Teal => "teal",
            NamedColor::Black => "black",
            NamedColor::White => "white",
        }
    }
}

/// Categorical palette, cycled in category first-appearance order.
pub const PALETTE: [Rgb; 12] = [
    Rgb(0x1f, 0x77, 0xb4),
    Rgb(0xff, 0x7f, 0x0e),
    Rgb(0x2c, 0xa0, 0x2c),
    Rgb(0xd6, 0x27, 0x28),
    Rgb(0x94, 0x67, 0xbd),
    Rgb(0x8c, 0x56, 0x4b),
    Rgb(0xe3, 0x77, 0xc2),
    Rgb(0x7f, 0x7f, 0x7f),
    Rgb(0xe6, 0xc2, 0x29),
    Rgb(0x17, 0xbe, 0xcf),
    Rgb(0x39, 0x3b, 0x79),
    Rgb(0xad, 0x49, 0x4a),
];

pub fn palette_color(index: usize) -> Rgb {
    PALETTE[index % PALETTE.len()]
}

/// Fill used when no color mapping applies.
pub const DEFAULT_FILL: Rgb = Rgb(0x6b, 0x8e, 0xae);
/// Fill for points whose bound attribute is missing.
pub const MISSING_FILL: Rgb = Rgb(0xcc, 0xcc, 0xcc);

pub const RAMP_LOW: Rgb = Rgb(0xde, 0xeb, 0xf7);
pub const RAMP_HIGH: Rgb = Rgb(0x08, 0x51, 0x9c);

pub fn ramp(t: f64) -> Rgb {
    RAMP_LOW.lerp(RAMP_HIGH, t.clamp(0.0, 1.0))
}
