//! Sparse probability mass functions on the integer lattice `Z^d`.
//!
//! Atoms live in a `BTreeMap` keyed by lattice point, so iteration order is
//! deterministic and independent of insertion history. All algebra is generic
//! over the [`Weight`] scalar; the f64 backend is used at runtime and the
//! exact-rational backend pins reference values in tests.

use std::collections::BTreeMap;

use crate::{Error, Result, Weight};

/// A point of the integer lattice.
pub type Point = Vec<i32>;

/// Axis-aligned box of lattice points, inclusive on both ends.
///
/// Used to cap supports during repeated convolution; mass convolved outside
/// the box is dropped from the pmf but accounted for exactly, so callers can
/// bound the error they accepted.
#[derive(Debug, Clone)]
pub struct SupportBox {
    pub lo: Vec<i32>,
    pub hi: Vec<i32>,
}

impl SupportBox {
    pub fn new(lo: Vec<i32>, hi: Vec<i32>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimMismatch {
                expected: lo.len(),
                got: hi.len(),
            });
        }
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return Err(Error::Domain("empty support box".into()));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, p: &[i32]) -> bool {
        p.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(x, (lo, hi))| lo <= x && x <= hi)
    }
}

/// Sparse pmf (or more generally a finitely supported signed measure) on `Z^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparsePmf<W> {
    dim: usize,
    atoms: BTreeMap<Point, W>,
}

impl<W: Weight> SparsePmf<W> {
    /// The zero measure on `Z^dim`.
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            atoms: BTreeMap::new(),
        }
    }

    /// Unit mass at `point`.
    pub fn dirac(point: &[i32]) -> Self {
        let mut atoms = BTreeMap::new();
        atoms.insert(point.to_vec(), W::one());
        Self {
            dim: point.len(),
            atoms,
        }
    }

    /// Builds from `(point, weight)` entries. Duplicate points accumulate.
    /// Negative weights and non-finite f64 weights are rejected; zero weights
    /// are dropped.
    pub fn from_entries<I>(dim: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Point, W)>,
    {
        let mut atoms: BTreeMap<Point, W> = BTreeMap::new();
        for (p, w) in entries {
            if p.len() != dim {
                return Err(Error::DimMismatch {
                    expected: dim,
                    got: p.len(),
                });
            }
            let wf = w.as_f64();
            if !wf.is_finite() || w < W::zero() {
                return Err(Error::BadWeight {
                    point: p,
                    why: format!("{wf} is negative or not finite"),
                });
            }
            if !w.is_zero() {
                *atoms.entry(p).or_insert_with(W::zero) += w;
            }
        }
        Ok(Self { dim, atoms })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Iterates atoms in lattice-point order.
    pub fn iter(&self) -> impl Iterator<Item = (&Point, &W)> {
        self.atoms.iter()
    }

    /// Weight at `point` (zero when absent).
    pub fn prob(&self, point: &[i32]) -> W {
        self.atoms.get(point).cloned().unwrap_or_else(W::zero)
    }

    /// Total mass.
    pub fn mass(&self) -> W {
        let mut m = W::zero();
        for w in self.atoms.values() {
            m += w.clone();
        }
        m
    }

    /// Checks `|mass - 1| <= tol`.
    pub fn validate_mass_one(&self, tol: f64) -> Result<()> {
        let mass = self.mass().as_f64();
        if (mass - 1.0).abs() <= tol {
            Ok(())
        } else {
            Err(Error::MassNotOne { mass, tol })
        }
    }

    /// Adds `w` at `point`, keeping the map free of explicit zeros.
    pub fn add_atom(&mut self, point: &[i32], w: W) -> Result<()> {
        if point.len() != self.dim {
            return Err(Error::DimMismatch {
                expected: self.dim,
                got: point.len(),
            });
        }
        let entry = self.atoms.entry(point.to_vec()).or_insert_with(W::zero);
        *entry += w;
        if entry.is_zero() {
            self.atoms.remove(point);
        }
        Ok(())
    }

    /// In-place scaling by `c`.
    pub fn scale(&mut self, c: &W) {
        if c.is_zero() {
            self.atoms.clear();
            return;
        }
        for w in self.atoms.values_mut() {
            *w = w.clone() * c.clone();
        }
    }

    /// Pointwise sum of measures.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let mut out = self.clone();
        for (p, w) in &other.atoms {
            out.add_atom(p, w.clone())?;
        }
        Ok(out)
    }

    /// Translates every atom by `delta`.
    pub fn shift(&self, delta: &[i32]) -> Result<Self> {
        if delta.len() != self.dim {
            return Err(Error::DimMismatch {
                expected: self.dim,
                got: delta.len(),
            });
        }
        let atoms = self
            .atoms
            .iter()
            .map(|(p, w)| {
                let q: Point = p.iter().zip(delta).map(|(a, b)| a + b).collect();
                (q, w.clone())
            })
            .collect();
        Ok(Self {
            dim: self.dim,
            atoms,
        })
    }

    /// Convolution, optionally capped to `keep`. Returns the result and the
    /// mass that fell outside the box (zero when `keep` is `None`).
    pub fn convolve_capped(&self, other: &Self, keep: Option<&SupportBox>) -> Result<(Self, W)> {
        if other.dim != self.dim {
            return Err(Error::DimMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let mut atoms: BTreeMap<Point, W> = BTreeMap::new();
        let mut lost = W::zero();
        let mut buf: Point = vec![0; self.dim];
        for (p, wp) in &self.atoms {
            for (q, wq) in &other.atoms {
                for ((b, x), y) in buf.iter_mut().zip(p).zip(q) {
                    *b = x + y;
                }
                let w = wp.clone() * wq.clone();
                if keep.is_some_and(|k| !k.contains(&buf)) {
                    lost += w;
                } else {
                    *atoms.entry(buf.clone()).or_insert_with(W::zero) += w;
                }
            }
        }
        Ok((Self { dim: self.dim, atoms }, lost))
    }

    /// Plain convolution.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        Ok(self.convolve_capped(other, None)?.0)
    }

    /// `n`-fold convolution power by binary exponentiation, with optional
    /// support cap. The returned weight is the total mass lost to the cap
    /// across all intermediate products; `n = 0` gives the Dirac at the
    /// origin.
    pub fn convolve_power(&self, n: u32, keep: Option<&SupportBox>) -> Result<(Self, W)> {
        let mut acc = Self::dirac(&vec![0; self.dim]);
        let mut sq = self.clone();
        let mut lost = W::zero();
        let mut k = n;
        loop {
            if k & 1 == 1 {
                let (next, l) = acc.convolve_capped(&sq, keep)?;
                acc = next;
                lost += l;
            }
            k >>= 1;
            if k == 0 {
                break;
            }
            let (next, l) = sq.convolve_capped(&sq, keep)?;
            sq = next;
            lost += l;
        }
        Ok((acc, lost))
    }

    /// Marginal law of coordinate `coord`, a pmf on `Z^1`.
    pub fn marginal(&self, coord: usize) -> Result<Self> {
        if coord >= self.dim {
            return Err(Error::Domain(format!(
                "coordinate {coord} out of range for dim {}",
                self.dim
            )));
        }
        let mut atoms: BTreeMap<Point, W> = BTreeMap::new();
        for (p, w) in &self.atoms {
            *atoms.entry(vec![p[coord]]).or_insert_with(W::zero) += w.clone();
        }
        Ok(Self { dim: 1, atoms })
    }

    /// First moment of coordinate `coord`, as f64.
    pub fn mean_coord(&self, coord: usize) -> Result<f64> {
        if coord >= self.dim {
            return Err(Error::Domain(format!(
                "coordinate {coord} out of range for dim {}",
                self.dim
            )));
        }
        Ok(self
            .atoms
            .iter()
            .map(|(p, w)| f64::from(p[coord]) * w.as_f64())
            .sum())
    }

    /// Restricts to the atoms where `pred` holds; returns kept and dropped mass.
    pub fn filter<F: Fn(&[i32]) -> bool>(&self, pred: F) -> (Self, W) {
        let mut atoms = BTreeMap::new();
        let mut dropped = W::zero();
        for (p, w) in &self.atoms {
            if pred(p) {
                atoms.insert(p.clone(), w.clone());
            } else {
                dropped += w.clone();
            }
        }
        (
            Self {
                dim: self.dim,
                atoms,
            },
            dropped,
        )
    }

    /// Largest absolute difference of weights over the union of supports.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0_f64;
        for (p, w) in &self.atoms {
            worst = worst.max((w.as_f64() - other.prob(p).as_f64()).abs());
        }
        for (p, w) in &other.atoms {
            worst = worst.max((w.as_f64() - self.prob(p).as_f64()).abs());
        }
        worst
    }

    /// Maps weights into another scalar type (e.g. exact to f64).
    pub fn map_weights<V: Weight, F: Fn(&W) -> V>(&self, f: F) -> SparsePmf<V> {
        SparsePmf {
            dim: self.dim,
            atoms: self.atoms.iter().map(|(p, w)| (p.clone(), f(w))).collect(),
        }
    }
}

impl SparsePmf<f64> {
    /// Total variation distance to `other` over the union of supports.
    pub fn tv_distance(&self, other: &Self) -> f64 {
        let mut sum = 0.0;
        for (p, w) in &self.atoms {
            sum += (w - other.prob(p)).abs();
        }
        for (p, w) in &other.atoms {
            if !self.atoms.contains_key(p) {
                sum += w.abs();
            }
        }
        sum / 2.0
    }
}
