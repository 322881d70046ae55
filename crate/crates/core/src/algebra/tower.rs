use serde_json::{json, Value};

use super::group::FinAbPres;
use super::hom::GroupHom;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extrapolation {
    /// `maps[n]` is an isomorphism for every `n >= from`.
    Stabilized { from: usize },
    Truncated,
}

/// Finite window `stages[0] <- stages[1] <- ...`, `maps[n]: stages[n+1] -> stages[n]`.
#[derive(Clone, Debug)]
pub struct Tower {
    pub stages: Vec<FinAbPres>,
    pub maps: Vec<GroupHom>,
    pub extrapolation: Extrapolation,
}

#[derive(Clone, Debug)]
pub struct DerivedLimitResult {
    pub h0: FinAbPres,
    pub h1: FinAbPres,
    pub stabilized_at: Option<usize>,
    /// Orders (as invariants) of the stable images along the window.
    pub image_profile: Vec<String>,
}

impl DerivedLimitResult {
    pub fn is_stable(&self) -> bool {
        self.stabilized_at.is_some()
    }

    pub fn require_stable(self) -> Result<Self> {
        if self.stabilized_at.is_some() {
            Ok(self)
        } else {
            Err(Error::NotStabilized {
                window: self.image_profile.len(),
            })
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "h0": self.h0.invariants().to_string(),
            "h1": self.h1.invariants().to_string(),
            "stabilized_at": self.stabilized_at,
            "image_profile": self.image_profile,
        })
    }
}

impl Tower {
    pub fn new(stages: Vec<FinAbPres>, maps: Vec<GroupHom>) -> Result<Tower> {
        if stages.is_empty() || maps.len() + 1 != stages.len() {
            return Err(Error::Dimension(format!(
                "tower with {} stages needs {} maps, got {}",
                stages.len(),
                stages.len().saturating_sub(1),
                maps.len()
            )));
        }
        for (n, m) in maps.iter().enumerate() {
            if m.source().num_generators() != stages[n + 1].num_generators()
                || m.target().num_generators() != stages[n].num_generators()
            {
                return Err(Error::Dimension(format!("map {n} does not connect stages {} and {n}", n + 1)));
            }
            m.check()?;
        }
        Ok(Tower {
            stages,
            maps,
            extrapolation: Extrapolation::Truncated,
        })
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    /// Composite `stages[m] -> stages[n]` for `m >= n`.
    pub fn composite(&self, m: usize, n: usize) -> GroupHom {
        assert!(m >= n);
        let mut h = GroupHom::identity(&self.stages[m]);
        for k in (n..m).rev() {
            h = h.compose(&self.maps[k]).reduced();
        }
        h
    }
}

/// Inverse limit and lim^1 of a finite window.
///
/// The limit is read off from stable images: `I_n = im(stages[N-1] -> stages[n])`,
/// confirmed stable when it agrees with `im(stages[N-2] -> stages[n])`. Once the
/// stable images have constant order the maps between them are isomorphisms and
/// the limit is that common group.
pub fn lim_lim1(t: &Tower) -> Result<DerivedLimitResult> {
    for s in &t.stages {
        if !s.is_finite() && !matches!(t.extrapolation, Extrapolation::Stabilized { .. }) {
            return Err(Error::UnsupportedRepresentation(
                "lim of a truncated tower with infinite stages".into(),
            ));
        }
    }
    let n = t.len();
    let h1 = FinAbPres::trivial();
    if let Extrapolation::Stabilized { from } = t.extrapolation {
        for k in from..t.maps.len() {
            if !t.maps[k].is_iso() {
                return Err(Error::Mismatch(format!(
                    "tower tagged stabilized from {from} but map {k} is not an isomorphism"
                )));
            }
        }
        let from = from.min(n - 1);
        let (g, _, _) = t.stages[from].normalize();
        return Ok(DerivedLimitResult {
            h0: g,
            h1,
            stabilized_at: Some(from),
            image_profile: vec![],
        });
    }
    if n == 1 {
        let (g, _, _) = t.stages[0].normalize();
        return Ok(DerivedLimitResult {
            h0: g,
            h1,
            stabilized_at: None,
            image_profile: vec![t.stages[0].invariants().to_string()],
        });
    }
    // Stable images for n <= N-2, each checked against the image one step lower.
    let mut images = Vec::new();
    let mut confirmed = Vec::new();
    for k in 0..n - 1 {
        let top = t.composite(n - 1, k).image().0;
        let below = t.composite(n - 2, k).image().0;
        confirmed.push(top.order() == below.order());
        images.push(top);
    }
    let profile: Vec<String> = images.iter().map(|g| g.invariants().to_string()).collect();
    let orders: Vec<_> = images.iter().map(|g| g.order()).collect();
    let Some(last) = (0..images.len()).rev().find(|&k| confirmed[k]) else {
        let (h0, _, _) = images[images.len() - 1].normalize();
        return Ok(DerivedLimitResult {
            h0,
            h1,
            stabilized_at: None,
            image_profile: profile,
        });
    };
    let mut start = last;
    while start > 0 && confirmed[start - 1] && orders[start - 1] == orders[last] {
        start -= 1;
    }
    let stable = start < last;
    let (h0, _, _) = images[if stable { start } else { last }].normalize();
    Ok(DerivedLimitResult {
        h0,
        h1,
        stabilized_at: stable.then_some(start),
        image_profile: profile,
    })
}
