//! Closed-form dimension tables over `Z/2`: Betti numbers of tori, the
//! perfect Morse functions on the critical manifolds, and the filtered
//! (relative) symplectic homology dimensions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase_space::PhaseSpaceConfig;
use crate::report::{fmt_float, CsvTable};

pub fn binomial(m: usize, k: usize) -> u64 {
    if k > m {
        return 0;
    }
    let k = k.min(m - k);
    (0..k).fold(1u64, |acc, i| acc * (m - i) as u64 / (i + 1) as u64)
}

/// `b_k(T^m)` for `k = 0..=m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BettiVector {
    pub dims: Vec<u64>,
}

impl BettiVector {
    pub fn total(&self) -> u64 {
        self.dims.iter().sum()
    }

    /// `b_k`, zero outside `0..=m`.
    pub fn get(&self, k: usize) -> u64 {
        self.dims.get(k).copied().unwrap_or(0)
    }
}

pub fn betti(m: usize) -> BettiVector {
    BettiVector {
        dims: (0..=m).map(|k| binomial(m, k)).collect(),
    }
}

/// Reduced Betti number `b̃_k(T^m)`.
pub fn reduced_betti(m: usize, k: usize) -> u64 {
    if k == 0 {
        0
    } else {
        binomial(m, k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MorseFunction {
    /// On `T^n × T^{n+1}` with coordinates `(p_1..p_n, q_0..q_n)`.
    FT,
    /// On `T^{n+1}` with coordinates `(q_0..q_n)`.
    FMinusT,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CritPoint {
    pub coordinates: Vec<f64>,
    pub index: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MorseCritTable {
    pub function: MorseFunction,
    pub n: usize,
    pub points: Vec<CritPoint>,
    pub min_value: f64,
    /// `F_T` at the point maximal in `p` and minimal in `q`.
    pub gamma_value: Option<f64>,
}

impl MorseCritTable {
    pub fn index_counts(&self) -> Vec<u64> {
        let dim = match self.function {
            MorseFunction::FT => 2 * self.n + 1,
            MorseFunction::FMinusT => self.n + 1,
        };
        let mut counts = vec![0u64; dim + 1];
        for p in &self.points {
            counts[p.index] += 1;
        }
        counts
    }
}

fn offset(n: usize) -> f64 {
    -((n * (n + 2)) as f64)
}

pub fn f_t(n: usize, p: &[f64], q: &[f64]) -> f64 {
    let nf = n as f64;
    let sp: f64 = p.iter().map(|x| (std::f64::consts::PI * x).cos()).sum();
    let sq: f64 = q.iter().map(|x| (std::f64::consts::TAU * x).cos()).sum();
    offset(n) + 0.5 * (nf + 2.0) * (nf + sp) + 0.5 * (nf + 1.0 + sq)
}

pub fn f_minus_t(n: usize, q: &[f64]) -> f64 {
    let sq: f64 = q.iter().map(|x| (std::f64::consts::TAU * x).cos()).sum();
    offset(n) + 0.5 * (n as f64 + 1.0 + sq)
}

/// Critical points of a cosine sum sit where every cosine is `±1`. Each
/// coordinate at a cosine maximum contributes one to the index. Values
/// are computed from the sign pattern, so the anchors hold exactly.
pub fn morse_crit_table(function: MorseFunction, n: usize) -> MorseCritTable {
    let (p_dim, q_dim) = match function {
        MorseFunction::FT => (n, n + 1),
        MorseFunction::FMinusT => (0, n + 1),
    };
    let nf = n as f64;
    let mut points = Vec::with_capacity(1 << (p_dim + q_dim));
    for mask in 0..(1usize << (p_dim + q_dim)) {
        // bit set: cosine = -1
        let down = |j: usize| (mask >> j) & 1 == 1;
        let mut coordinates = Vec::with_capacity(p_dim + q_dim);
        let mut index = 0;
        let mut sp = 0.0;
        let mut sq = 0.0;
        for j in 0..p_dim {
            coordinates.push(if down(j) { 1.0 } else { 0.0 });
            sp += if down(j) { -1.0 } else { 1.0 };
            index += usize::from(!down(j));
        }
        for j in p_dim..p_dim + q_dim {
            coordinates.push(if down(j) { 0.5 } else { 0.0 });
            sq += if down(j) { -1.0 } else { 1.0 };
            index += usize::from(!down(j));
        }
        let mut value = offset(n) + 0.5 * (nf + 1.0 + sq);
        if function == MorseFunction::FT {
            value += 0.5 * (nf + 2.0) * (nf + sp);
        }
        points.push(CritPoint {
            coordinates,
            index,
            value,
        });
    }
    let min_value = points.iter().map(|p| p.value).fold(f64::INFINITY, f64::min);
    let gamma_value = (function == MorseFunction::FT).then(|| {
        let sp = nf;
        let sq = -(nf + 1.0);
        offset(n) + 0.5 * (nf + 2.0) * (nf + sp) + 0.5 * (nf + 1.0 + sq)
    });
    MorseCritTable {
        function,
        n,
        points,
        min_value,
        gamma_value,
    }
}

/// `dim SH_k^{[a,∞)}(A_R × T^{2n}; α_ℓ)`.
pub fn sh_dims(geometry: &PhaseSpaceConfig, ell: i64, a: f64, k: usize) -> Result<u64> {
    let n = geometry.torus_dim();
    let full = betti(2 * n + 1).get(k);
    if ell == 0 {
        if !(a > 0.0) {
            return Err(Error::InvalidInterval(format!(
                "the contractible class needs a > 0, got {a}"
            )));
        }
        return Ok(full);
    }
    let threshold = geometry.radius() * ell.unsigned_abs() as f64;
    Ok(if a < threshold { 0 } else { full })
}

fn check_relative(geometry: &PhaseSpaceConfig, ell: i64, a: f64, c: f64) -> Result<f64> {
    let u_ell = geometry.marked_level() * ell as f64;
    if !(c > u_ell.max(0.0)) {
        return Err(Error::InvalidHypothesis(format!(
            "c = {c} must exceed max(u*ell, 0) = {}",
            u_ell.max(0.0)
        )));
    }
    if !(a > 0.0) {
        return Err(Error::InvalidInterval(format!("relative homology needs a > 0, got {a}")));
    }
    Ok(c - u_ell)
}

/// `dim RSH_k^{[a,∞);c}(A_R × T^{2n}, L_u × T^n; α_ℓ)`.
pub fn rsh_dims(geometry: &PhaseSpaceConfig, ell: i64, a: f64, c: f64, k: usize) -> Result<u64> {
    let top = check_relative(geometry, ell, a, c)?;
    Ok(if a <= top { betti(geometry.torus_dim() + 1).get(k) } else { 0 })
}

/// Rank of `T_k: SH_k → RSH_k`.
pub fn t_map_rank(geometry: &PhaseSpaceConfig, ell: i64, a: f64, c: f64, k: usize) -> Result<u64> {
    let top = check_relative(geometry, ell, a, c)?;
    let low = geometry.radius() * ell.unsigned_abs() as f64;
    Ok(if low < a && a <= top { betti(geometry.torus_dim() + 1).get(k) } else { 0 })
}

/// Closed form of the middle term in the exact-sequence bookkeeping.
pub fn claim6_dims(n: usize, k: usize) -> u64 {
    if k == 0 || k > 2 * n + 1 {
        0
    } else if k <= n + 1 {
        betti(2 * n + 1).get(k) - betti(n + 1).get(k)
    } else {
        betti(2 * n + 1).get(k)
    }
}

/// `Σ_{i+j=k} b̃_i(T^n) b_j(T^{n+1})`.
pub fn claim6_kunneth(n: usize, k: usize) -> u64 {
    (0..=k).map(|i| reduced_betti(n, i) * betti(n + 1).get(k - i)).sum()
}

/// One row of a dimension table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DimRow {
    pub k: usize,
    pub dim: u64,
}

/// `f(k)` for `k = 0..=2n+1`.
pub fn dim_table(n: usize, f: impl Fn(usize) -> Result<u64>) -> Result<Vec<DimRow>> {
    (0..=2 * n + 1).map(|k| Ok(DimRow { k, dim: f(k)? })).collect()
}

pub fn dim_rows_table(rows: &[DimRow]) -> CsvTable {
    let mut table = CsvTable::new(&["k", "dim"]);
    for r in rows {
        table.push(vec![r.k.to_string(), r.dim.to_string()]);
    }
    table
}

pub fn morse_points_table(table: &MorseCritTable) -> CsvTable {
    let mut out = CsvTable::new(&["coordinates", "index", "value"]);
    for p in &table.points {
        out.push(vec![
            p.coordinates.iter().map(|c| fmt_float(*c)).collect::<Vec<_>>().join(" "),
            p.index.to_string(),
            fmt_float(p.value),
        ]);
    }
    out
}
