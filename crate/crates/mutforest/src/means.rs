//! Mean matrices, class structure and Perron data of progeny-law models.
//!
//! Irreducibility and primitivity are decided on the boolean support
//! pattern of the litter laws by graph reachability and cycle gcd, never by
//! thresholding floating-point matrix powers. The dominant eigenvalue and its
//! eigenvectors come from power iteration on `M + I`, which converges for
//! every irreducible nonnegative matrix, periodic ones included.

use crate::{Error, ProgenyLaw, Result};

/// Position of the dominant eigenvalue relative to 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criticality {
    Subcritical,
    Critical,
    Supercritical,
}

/// Width of the band around `rho = 1` reported as critical.
pub const CRIT_TOL: f64 = 1e-9;

/// Dominant eigenvalue with right and left eigenvectors.
#[derive(Debug, Clone)]
pub struct PerronData {
    pub rho: f64,
    /// Right eigenvector, normalized to sum 1.
    pub u: Vec<f64>,
    /// Left eigenvector, normalized so that `u . v = 1`.
    pub v: Vec<f64>,
    pub iterations: usize,
}

/// Structural and spectral summary of a progeny-law model.
#[derive(Debug, Clone)]
pub struct MeanReport {
    pub d: usize,
    /// `m[i][j]`: expected type-`j` children per type-`i` parent.
    pub m: Vec<Vec<f64>>,
    pub irreducible: bool,
    pub primitive: bool,
    pub rho: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub criticality: Criticality,
    /// Per type, whether `m_ii < 1` (strictly), so the collapsed mean matrix
    /// has a finite row for that type.
    pub diag_subunit: Vec<bool>,
    /// Every litter of every type is exactly one child, so the population
    /// never branches and the usual limit theory does not apply.
    pub singular: bool,
    /// Finite `x log x` moment of the litter laws. Always true here: supports
    /// are finite by construction.
    pub xlogx_ok: bool,
}

/// Builds the full report for a model.
pub fn mean_report(law: &ProgenyLaw) -> Result<MeanReport> {
    let d = law.d();
    let m = law.mean_matrix();
    let adj = support_adjacency(law);
    let irreducible = is_irreducible(&adj);
    let primitive = irreducible && period(&adj) == 1;
    let perron = perron(&m)?;
    let rho = perron.rho;
    let criticality = if (rho - 1.0).abs() <= CRIT_TOL {
        Criticality::Critical
    } else if rho < 1.0 {
        Criticality::Subcritical
    } else {
        Criticality::Supercritical
    };
    let singular = (0..d).all(|i| {
        law.law(i)
            .iter()
            .all(|(p, _)| p.iter().map(|&k| i64::from(k)).sum::<i64>() == 1)
    });
    Ok(MeanReport {
        d,
        diag_subunit: (0..d).map(|i| m[i][i] < 1.0).collect(),
        singular,
        m,
        irreducible,
        primitive,
        rho,
        u: perron.u,
        v: perron.v,
        criticality,
        xlogx_ok: true,
    })
}

/// `adj[i][j]`: a type-`i` parent can beget a type-`j` child.
pub fn support_adjacency(law: &ProgenyLaw) -> Vec<Vec<bool>> {
    let d = law.d();
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| law.law(i).iter().any(|(p, _)| p[j] > 0))
                .collect()
        })
        .collect()
}

fn reachable_from(adj: &[Vec<bool>], start: usize) -> Vec<bool> {
    let d = adj.len();
    let mut seen = vec![false; d];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(u) = stack.pop() {
        for (v, &edge) in adj[u].iter().enumerate() {
            if edge && !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen
}

/// Strong connectivity of the directed support graph.
pub fn is_irreducible(adj: &[Vec<bool>]) -> bool {
    let d = adj.len();
    (0..d).all(|s| reachable_from(adj, s).iter().all(|&r| r))
}

/// Period of an irreducible support graph: the gcd of `dist(u) + 1 - dist(v)`
/// over edges `u -> v`, with distances from any fixed root.
pub fn period(adj: &[Vec<bool>]) -> u64 {
    let d = adj.len();
    let mut dist = vec![usize::MAX; d];
    let mut queue = std::collections::VecDeque::from([0usize]);
    dist[0] = 0;
    while let Some(u) = queue.pop_front() {
        for (v, &edge) in adj[u].iter().enumerate() {
            if edge && dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    let mut g: u64 = 0;
    for u in 0..d {
        for (v, &edge) in adj[u].iter().enumerate() {
            if edge && dist[u] != usize::MAX && dist[v] != usize::MAX {
                let skew = (dist[u] as i64 + 1 - dist[v] as i64).unsigned_abs();
                g = gcd(g, skew);
            }
        }
    }
    g
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Power iteration for the dominant eigenvalue of a nonnegative matrix,
/// run on `M + I` so that periodic irreducible matrices converge too.
/// Deterministic all-ones start; right and left vectors from the same loop.
pub fn perron(m: &[Vec<f64>]) -> Result<PerronData> {
    let d = m.len();
    if d == 0 || m.iter().any(|row| row.len() != d) {
        return Err(Error::Domain("perron needs a square matrix".into()));
    }
    if m.iter().flatten().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::Domain("perron needs finite nonnegative entries".into()));
    }
    let apply = |x: &[f64], transpose: bool| -> Vec<f64> {
        let mut y = x.to_vec();
        for i in 0..d {
            for j in 0..d {
                let a = if transpose { m[j][i] } else { m[i][j] };
                y[i] += a * x[j];
            }
        }
        y
    };
    let run = |transpose: bool| -> (f64, Vec<f64>, usize) {
        let mut x = vec![1.0 / d as f64; d];
        let mut lambda = 0.0;
        let mut iters = 0;
        for it in 0..500_000 {
            iters = it + 1;
            let y = apply(&x, transpose);
            let norm: f64 = y.iter().sum();
            if norm == 0.0 {
                return (0.0, y, iters);
            }
            let next: Vec<f64> = y.iter().map(|t| t / norm).collect();
            let delta: f64 = next
                .iter()
                .zip(&x)
                .map(|(a, b)| (a - b).abs())
                .sum();
            x = next;
            lambda = norm;
            if delta < 1e-15 && it > 3 {
                break;
            }
        }
        (lambda - 1.0, x, iters)
    };
    let (rho_r, u, it_r) = run(false);
    let (_, mut v, it_l) = run(true);
    // Scale the left vector so that u . v = 1 when possible.
    let dot: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
    if dot.abs() > 1e-300 {
        for t in v.iter_mut() {
            *t /= dot;
        }
    }
    Ok(PerronData {
        rho: rho_r,
        u,
        v,
        iterations: it_r.max(it_l),
    })
}

/// Collapsed mean matrix: off-diagonal `m_ij / (1 - m_ii)`, zero diagonal.
/// Defined only when every `m_ii < 1`.
pub fn collapsed_mean_matrix(m: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let d = m.len();
    for i in 0..d {
        if m[i][i] >= 1.0 {
            return Err(Error::Domain(format!(
                "collapsed mean undefined: m[{i}][{i}] = {} >= 1",
                m[i][i]
            )));
        }
    }
    Ok((0..d)
        .map(|i| {
            (0..d)
                .map(|j| if i == j { 0.0 } else { m[i][j] / (1.0 - m[i][i]) })
                .collect()
        })
        .collect())
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve_linear(a: &[Vec<f64>], b: &[f64]) -> Result<Vec<f64>> {
    let n = a.len();
    if b.len() != n || a.iter().any(|row| row.len() != n) {
        return Err(Error::Domain("solve_linear shape mismatch".into()));
    }
    let mut aug: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| aug[i][col].abs().total_cmp(&aug[j][col].abs()))
            .unwrap();
        if aug[pivot][col].abs() < 1e-300 {
            return Err(Error::Numeric("singular linear system".into()));
        }
        aug.swap(col, pivot);
        for row in col + 1..n {
            let f = aug[row][col] / aug[col][col];
            for k in col..=n {
                aug[row][k] -= f * aug[col][k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut s = aug[col][n];
        for k in col + 1..n {
            s -= aug[col][k] * x[k];
        }
        x[col] = s / aug[col][col];
    }
    Ok(x)
}

/// Expected visit counts per seed direction: for a subcritical model,
/// `c_i(w) = sum_k w_k (I - M)^{-1}_{ki}` is the mean number of type-`i`
/// individuals per unit of seed mass along `w`, and the matching mean
/// mutation count per type is `(1 - m_ii) c_i(w) - w_i`.
///
/// The mutation constant follows from Wald's identity: mutants of type `i`
/// are births of type `i` to parents of other types, so their mean is
/// `sum_{k != i} c_k(w) m_ki = (1 - m_ii) c_i(w) - w_i`, the last step by
/// the visit equation `c_i = w_i + sum_k c_k m_ki`.
pub fn direction_constants(m: &[Vec<f64>], w: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let d = m.len();
    if w.len() != d {
        return Err(Error::DimMismatch {
            expected: d,
            got: w.len(),
        });
    }
    // c solves (I - M)^T c = w.
    let a: Vec<Vec<f64>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| if i == j { 1.0 - m[j][i] } else { -m[j][i] })
                .collect()
        })
        .collect();
    let c = solve_linear(&a, w)?;
    let mu: Vec<f64> = (0..d).map(|i| (1.0 - m[i][i]) * c[i] - w[i]).collect();
    Ok((c, mu))
}
