//! Progeny-law models for multitype branching forests.
//!
//! A model over `d` types is one lattice pmf per type, the litter law of a
//! parent of that type, with support in `N^d`. Continuous-time models carry
//! in addition one positive exponential lifetime rate per type.

use rand::Rng;

use crate::{Error, Pmf, Point, Result};

/// Per-type dichotomy governing which cluster laws are defined.
///
/// `A`: the same-type mean satisfies `m_ii <= 1`, so a cluster of type `i` is
/// finite a.s. and the mutation progeny law exists. `B`: `m_ii > 1` but a
/// type-`i` parent never begets other types, so clusters are sterile for
/// mutations and the mutation progeny law degenerates to a Dirac at zero.
/// `Neither` rejects the type for mutation-law purposes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionAB {
    A,
    B,
    Neither,
}

/// Validated progeny-law model.
#[derive(Debug, Clone)]
pub struct ProgenyLaw {
    d: usize,
    laws: Vec<Pmf>,
    rates: Option<Vec<f64>>,
}

/// Tolerance for accepting a pmf whose entries were given in decimal.
pub const MASS_TOL: f64 = 1e-9;

impl ProgenyLaw {
    /// Builds and validates a model. Each law must be a pmf on `N^d` with
    /// mass 1 within [`MASS_TOL`]; rates, when given, must be finite and
    /// positive, one per type.
    pub fn new(laws: Vec<Pmf>, rates: Option<Vec<f64>>) -> Result<Self> {
        let d = laws.len();
        if d == 0 {
            return Err(Error::BadModel("no types".into()));
        }
        for (i, law) in laws.iter().enumerate() {
            if law.dim() != d {
                return Err(Error::DimMismatch {
                    expected: d,
                    got: law.dim(),
                });
            }
            law.validate_mass_one(MASS_TOL)?;
            if let Some((p, _)) = law.iter().find(|(p, _)| p.iter().any(|&x| x < 0)) {
                return Err(Error::BadModel(format!(
                    "law {i} has negative offspring count at {p:?}"
                )));
            }
        }
        if let Some(r) = &rates {
            if r.len() != d {
                return Err(Error::DimMismatch {
                    expected: d,
                    got: r.len(),
                });
            }
            if let Some(x) = r.iter().find(|x| !x.is_finite() || **x <= 0.0) {
                return Err(Error::BadModel(format!("nonpositive lifetime rate {x}")));
            }
        }
        Ok(Self { d, laws, rates })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn law(&self, i: usize) -> &Pmf {
        &self.laws[i]
    }

    pub fn rates(&self) -> Option<&[f64]> {
        self.rates.as_deref()
    }

    pub fn rate(&self, i: usize) -> Result<f64> {
        self.rates
            .as_ref()
            .map(|r| r[i])
            .ok_or_else(|| Error::BadModel("model has no lifetime rates".into()))
    }

    /// Expected number of type-`j` children of a type-`i` parent.
    pub fn mean(&self, i: usize, j: usize) -> f64 {
        self.laws[i].mean_coord(j).expect("validated dims")
    }

    /// Mean matrix `m[i][j]`.
    pub fn mean_matrix(&self) -> Vec<Vec<f64>> {
        (0..self.d)
            .map(|i| (0..self.d).map(|j| self.mean(i, j)).collect())
            .collect()
    }

    /// Whether a type-`i` parent can beget a child of a different type.
    pub fn has_cross_children(&self, i: usize) -> bool {
        self.laws[i]
            .iter()
            .any(|(p, _)| p.iter().enumerate().any(|(j, &x)| j != i && x > 0))
    }

    /// Classifies type `i`; see [`ConditionAB`].
    pub fn condition_ab(&self, i: usize) -> ConditionAB {
        if self.mean(i, i) <= 1.0 + 1e-12 {
            ConditionAB::A
        } else if !self.has_cross_children(i) {
            ConditionAB::B
        } else {
            ConditionAB::Neither
        }
    }

    /// Step law of the type-`i` coding walk: the litter law shifted down by
    /// one in coordinate `i`, so steps live on `{k : k_i >= -1, k_j >= 0}`.
    pub fn step_law(&self, i: usize) -> Pmf {
        let mut e = vec![0i32; self.d];
        e[i] = -1;
        self.laws[i].shift(&e).expect("validated dims")
    }

    /// Checks the extra hypotheses of the continuous-time engines: rates
    /// present and no litter equal to exactly one child of the parent's own
    /// type (such a birth would be invisible in the population process).
    pub fn ct_ready(&self) -> Result<()> {
        if self.rates.is_none() {
            return Err(Error::BadModel("continuous time needs lifetime rates".into()));
        }
        for i in 0..self.d {
            let mut e = vec![0i32; self.d];
            e[i] = 1;
            if self.laws[i].prob(&e) > 0.0 {
                return Err(Error::BadModel(format!(
                    "law {i} puts mass on a single same-type child"
                )));
            }
        }
        Ok(())
    }

    /// Inverse-cdf sampling tables, one per type.
    pub fn tables(&self) -> Vec<LitterTable> {
        self.laws.iter().map(LitterTable::new).collect()
    }
}

/// Cumulative table for sampling litters of one type.
#[derive(Debug, Clone)]
pub struct LitterTable {
    points: Vec<Point>,
    cum: Vec<f64>,
}

impl LitterTable {
    pub fn new(law: &Pmf) -> Self {
        let mut points = Vec::with_capacity(law.len());
        let mut cum = Vec::with_capacity(law.len());
        let mut acc = 0.0;
        for (p, w) in law.iter() {
            acc += *w;
            points.push(p.clone());
            cum.push(acc);
        }
        // Guard the last bin against rounding shortfall.
        if let Some(last) = cum.last_mut() {
            *last = f64::INFINITY;
        }
        Self { points, cum }
    }

    /// Draws one litter.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> &[i32] {
        let u: f64 = rng.random();
        let idx = self.cum.partition_point(|c| *c < u);
        &self.points[idx]
    }
}
