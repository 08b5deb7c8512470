use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::SpectralIndex;
use crate::error::{DfsError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    L1,
    L2,
}

/// Full `Z^2` or the half plane `Z x N_0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Full,
    Half,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Shape {
    /// `|n1| <= h` and `|n2| <= h`
    Rectangle { h: i64 },
    /// `|n| <= h` in the given norm
    Ball { h: i64, norm: Norm },
    Explicit(BTreeSet<SpectralIndex>),
}

/// A finite truncation set. Membership uses exact integer arithmetic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectralSet {
    shape: Shape,
    domain: Domain,
}

impl SpectralSet {
    pub fn rectangle(h: i64, domain: Domain) -> Self {
        Self {
            shape: Shape::Rectangle { h: h.max(0) },
            domain,
        }
    }

    pub fn ball(h: i64, norm: Norm, domain: Domain) -> Self {
        Self {
            shape: Shape::Ball { h: h.max(0), norm },
            domain,
        }
    }

    pub fn explicit(indices: impl IntoIterator<Item = SpectralIndex>, domain: Domain) -> Result<Self> {
        let set: BTreeSet<_> = indices.into_iter().collect();
        if domain == Domain::Half {
            if let Some(bad) = set.iter().find(|n| n.n2 < 0) {
                return Err(DfsError::InvalidArgument(format!(
                    "half-domain set contains ({}, {})",
                    bad.n1, bad.n2
                )));
            }
        }
        Ok(Self {
            shape: Shape::Explicit(set),
            domain,
        })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn shape_tag(&self) -> String {
        match &self.shape {
            Shape::Rectangle { .. } => "rect".into(),
            Shape::Ball { norm: Norm::L1, .. } => "ball-l1".into(),
            Shape::Ball { norm: Norm::L2, .. } => "ball-l2".into(),
            Shape::Explicit(_) => "explicit".into(),
        }
    }

    pub fn contains(&self, n1: i64, n2: i64) -> bool {
        if self.domain == Domain::Half && n2 < 0 {
            return false;
        }
        match &self.shape {
            Shape::Rectangle { h } => n1.abs() <= *h && n2.abs() <= *h,
            Shape::Ball { h, norm: Norm::L1 } => n1.abs() + n2.abs() <= *h,
            Shape::Ball { h, norm: Norm::L2 } => n1 * n1 + n2 * n2 <= h * h,
            Shape::Explicit(set) => set.contains(&SpectralIndex::new(n1, n2)),
        }
    }

    /// `max(|n1|, |n2|)` over the set, 0 when empty.
    pub fn extent(&self) -> i64 {
        match &self.shape {
            Shape::Rectangle { h } | Shape::Ball { h, .. } => *h,
            Shape::Explicit(set) => set.iter().map(|n| n.n1.abs().max(n.n2.abs())).max().unwrap_or(0),
        }
    }

    /// Members in ascending `(n1, n2)` order.
    pub fn indices(&self) -> Vec<SpectralIndex> {
        match &self.shape {
            Shape::Explicit(set) => set.iter().copied().collect(),
            _ => {
                let h = self.extent();
                let lo2 = if self.domain == Domain::Half { 0 } else { -h };
                let mut out = Vec::new();
                for n1 in -h..=h {
                    for n2 in lo2..=h {
                        if self.contains(n1, n2) {
                            out.push(SpectralIndex::new(n1, n2));
                        }
                    }
                }
                out
            }
        }
    }

    pub fn len(&self) -> usize {
        match &self.shape {
            Shape::Explicit(set) => set.len(),
            _ => self.indices().len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `Omega ~ = Omega u M(Omega)` as a full-domain set.
    pub fn symmetrized(&self) -> Self {
        match &self.shape {
            Shape::Explicit(set) => Self {
                shape: Shape::Explicit(set.iter().flat_map(|n| [*n, n.reflect()]).collect()),
                domain: Domain::Full,
            },
            shape => Self {
                shape: shape.clone(),
                domain: Domain::Full,
            },
        }
    }
}
