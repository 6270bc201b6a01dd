//! Three-layer directed network: friendly-match initiations (F, signed),
//! messages (M) and regular matches (R) over a single dense set of users.

mod manifest;
mod network;
mod parse;
mod view;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use manifest::{load_manifest, read_id_map, write_layer_file, IdMap, LayerPaths, LoadedNetwork, Manifest};
pub use network::{build_network, MultilayerNetwork};
pub use parse::{parse_layer_file, parse_layer_str, parse_pairs, PairLine};
pub use view::{embeddedness, mask_f_edges, positive_neighborhood, MaskedView, NetworkView};

/// Dense index of a user.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<u32> for NodeId {
    fn from(v: u32) -> Self {
        NodeId(v)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Response to a link initiation: accepted (+1) or rejected (−1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Positive, Sign::Negative];

    pub fn value(self) -> i8 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }

    pub fn from_value(v: i64) -> Option<Sign> {
        match v {
            1 => Some(Sign::Positive),
            -1 => Some(Sign::Negative),
            _ => None,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Positive => '+',
            Sign::Negative => '-',
        }
    }

    /// Parses the `+1` / `-1` tokens used in layer and pair files.
    pub fn parse_token(token: &str) -> Option<Sign> {
        match token {
            "+1" | "1" => Some(Sign::Positive),
            "-1" => Some(Sign::Negative),
            _ => None,
        }
    }

    pub fn is_positive(self) -> bool {
        self == Sign::Positive
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sign::Positive => f.write_str("+1"),
            Sign::Negative => f.write_str("-1"),
        }
    }
}

impl Serialize for Sign {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i8(self.value())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = i64::deserialize(d)?;
        Sign::from_value(v).ok_or_else(|| serde::de::Error::custom(format!("invalid sign {v}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LayerKind {
    F,
    M,
    R,
}

impl LayerKind {
    pub const ALL: [LayerKind; 3] = [LayerKind::F, LayerKind::M, LayerKind::R];

    pub fn is_signed(self) -> bool {
        self == LayerKind::F
    }

    pub fn name(self) -> &'static str {
        match self {
            LayerKind::F => "F",
            LayerKind::M => "M",
            LayerKind::R => "R",
        }
    }

    pub fn parse(s: &str) -> Option<LayerKind> {
        match s {
            "F" | "f" => Some(LayerKind::F),
            "M" | "m" => Some(LayerKind::M),
            "R" | "r" => Some(LayerKind::R),
            _ => None,
        }
    }
}

impl fmt::Display for LayerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Inverse,
}

impl Direction {
    pub fn reversed(self) -> Direction {
        match self {
            Direction::Forward => Direction::Inverse,
            Direction::Inverse => Direction::Forward,
        }
    }
}

/// One hop of a meta-path over a user-to-user relation.
///
/// F steps normally carry a sign filter; [`RelationStep::any_f`] builds the
/// unfiltered variant used for unsigned recounts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RelationStep {
    pub layer: LayerKind,
    pub direction: Direction,
    pub sign: Option<Sign>,
}

impl RelationStep {
    /// Step over an unsigned source layer (M or R).
    pub fn source(layer: LayerKind, direction: Direction) -> Self {
        debug_assert!(!layer.is_signed(), "source steps run over M or R");
        RelationStep { layer, direction, sign: None }
    }

    pub fn signed(direction: Direction, sign: Sign) -> Self {
        RelationStep { layer: LayerKind::F, direction, sign: Some(sign) }
    }

    pub fn any_f(direction: Direction) -> Self {
        RelationStep { layer: LayerKind::F, direction, sign: None }
    }

    pub fn inverse(self) -> Self {
        RelationStep { direction: self.direction.reversed(), ..self }
    }

    /// Short name, e.g. `R`, `M-1`, `F+`, `F-1-`.
    pub fn label(&self) -> String {
        let mut s = self.layer.name().to_string();
        if self.direction == Direction::Inverse {
            s.push_str("-1");
        }
        if let Some(sign) = self.sign {
            s.push(sign.symbol());
        }
        s
    }
}

/// A merged directed edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SignedEdge {
    pub src: NodeId,
    pub dst: NodeId,
    pub layer: LayerKind,
    pub sign: Option<Sign>,
    pub weight: u32,
}

impl SignedEdge {
    pub fn unsigned(layer: LayerKind, src: u32, dst: u32) -> Self {
        SignedEdge { src: NodeId(src), dst: NodeId(dst), layer, sign: None, weight: 1 }
    }

    pub fn f(src: u32, dst: u32, sign: Sign) -> Self {
        SignedEdge { src: NodeId(src), dst: NodeId(dst), layer: LayerKind::F, sign: Some(sign), weight: 1 }
    }
}

#[inline]
pub(crate) fn pair_key(src: NodeId, dst: NodeId) -> u64 {
    ((src.0 as u64) << 32) | dst.0 as u64
}
